#pragma once

#include <utility>
#include <vector>

#include "deltawall/permutation.hpp"
#include "deltawall/spectrum.hpp"
#include "deltawall/well.hpp"

namespace deltawall {

enum class StageKind { Insert, Move, Remove, Flip };

// One leg of an adiabatic cycle.  Insert ramps the strength from zero to a
// signed infinity at fixed position; Remove is the mirror image; Move
// carries the fully opaque wall (strength +inf) between positions; Flip
// swaps +inf <-> -inf instantaneously at fixed position.
struct Stage {
    StageKind kind = StageKind::Insert;
    double x_from = 0.5, x_to = 0.5;
    Strength g_from = Strength::finite(0.0);
    Strength g_to = Strength::finite(0.0);
};

// A closed strength-position loop: one or more primitive cycles placed end
// to end, each starting and ending at strength zero.
class CyclePath {
  public:
    static CyclePath from_stages(std::vector<Stage> stages);

    const std::vector<Stage>& stages() const { return stages_; }

    CyclePath inverse() const;
    CyclePath then(const CyclePath& next) const;

    std::string str() const;

  private:
    CyclePath() = default;
    std::vector<Stage> stages_;
};

// Wall-insertion cycle through position space: insert at x0, carry the
// opaque wall to x1, remove there.
CyclePath make_cx(double x0, double x1, const WellConfig& cfg = {});

// Strength-flip cycle at fixed position: insert at x0 up to +inf, flip to
// -inf, remove back to zero.
CyclePath make_cy(double x0, const WellConfig& cfg = {});

// Degeneracy of sub-box modes (Left m_left) and (Right m_right) while the
// opaque wall moves: they cross at X = m_left L / (m_left + m_right).
double crossing_position(int m_left, int m_right, const WellConfig& cfg = {});

struct Window {
    double lo = 0.0, hi = 0.0;  // open interval
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return lo < x && x < hi; }
};

// Flanking windows for the (m_left, m_right) crossing: a cycle inserting
// anywhere in the first window and removing anywhere in the second passes
// exactly this crossing of the pair and no other crossing involving either
// partner.
std::pair<Window, Window> crossing_window(int m_left, int m_right,
                                          const WellConfig& cfg = {});

// Windows for the insertion cycle that exchanges levels n and n+1.
std::pair<Window, Window> cx_window_for_level(int n, const WellConfig& cfg = {});

// A degeneracy encountered during a Move stage.
struct CrossingEvent {
    int stage = 0;        // index into CyclePath::stages()
    double position = 0.0;  // located by bisection on the energy difference
    int m_left = 0, m_right = 0;
    int rank_low = 0;     // the pair occupies ranks (rank_low, rank_low + 1)
    double energy = 0.0;  // degenerate energy at the crossing
};

struct FlowSample {
    int stage = 0;   // index into CyclePath::stages()
    double s = 0.0;  // stage-local parameter in [0, 1]
    double x = 0.0;
    Strength g = Strength::finite(0.0);
    // energies[t-1] follows the level that started the cycle at index t.
    // Divergent entries are -inf; NaN marks a curve truncated after its
    // label left the tracked window.
    std::vector<double> energies;
};

struct SpectralFlow {
    int n_max = 0;
    std::vector<FlowSample> samples;
    std::vector<CrossingEvent> events;
    HolonomyMap map;  // extracted from the traced curves
};

// Predicted relabeling for one full cycle, from closed-form ranking of the
// separated limits.  Partial entries mark levels that diverge at a flip or
// leave the n_max window.
HolonomyMap holonomy_permutation(const CyclePath& cycle, int n_max,
                                 const WellConfig& cfg = {});

// Numerically sampled eigenvalue flow along the cycle, steps samples per
// ramped stage.  The permutation read off the traced curves is required to
// match holonomy_permutation; a mismatch throws std::logic_error.
SpectralFlow trace(const CyclePath& cycle, int n_max, int steps,
                   const WellConfig& cfg = {});

// Sequence of insertion cycles whose composed holonomy carries the level
// index source to target, built from adjacent exchanges through window
// midpoints.  Empty when source == target.
std::vector<CyclePath> plan_connection(int source, int target,
                                       const WellConfig& cfg = {});

// Holonomy of a cycle sequence, composed in application order.
HolonomyMap composed_holonomy(const std::vector<CyclePath>& cycles, int n_max,
                              const WellConfig& cfg = {});

} // namespace deltawall
