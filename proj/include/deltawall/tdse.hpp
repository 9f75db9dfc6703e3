#pragma once

#include <complex>
#include <vector>

#include "deltawall/cycles.hpp"
#include "deltawall/well.hpp"

namespace deltawall {

// Uniform Dirichlet grid: interior points x_i = (i+1) dx, i = 0..points-1,
// with dx = L / (points + 1); the wavefunction vanishes at 0 and L.
struct Grid {
    int points = 512;
    WellConfig cfg;

    double dx() const { return cfg.length / (points + 1); }
    double x(int i) const { return (i + 1) * dx(); }
    void validate() const;
};

using WaveField = std::vector<std::complex<double>>;

std::complex<double> inner(const WaveField& a, const WaveField& b,
                           const Grid& grid);
double norm(const WaveField& a, const Grid& grid);
double fidelity(const WaveField& a, const WaveField& b, const Grid& grid);

// Real symmetric tridiagonal Hamiltonian: three-point kinetic stencil plus
// the delta wall spread over the two neighboring grid points with linear
// weights (total weight g / dx).
struct TridiagOperator {
    std::vector<double> diag;
    std::vector<double> off;  // sub/superdiagonal, size points - 1
};

TridiagOperator discretize_hamiltonian(const WallState& wall, const Grid& grid);

struct GridLevels {
    std::vector<double> energies;    // ascending
    std::vector<WaveField> modes;    // dx-normalized, real entries
};

// Lowest count eigenpairs of the discretized Hamiltonian.
GridLevels instantaneous_levels(const WallState& wall, const Grid& grid,
                                int count);

// Time-dependent control realizing a cycle with the strength capped at
// g_cap: ramps follow the tan profile saturated at the cap, moves traverse
// a narrow window around each predicted level crossing in a small fraction
// of the stage time (fast passage keeps the transit diabatic), and flips
// become instantaneous sign jumps of the capped strength.
class Protocol {
  public:
    double duration() const { return duration_; }
    double g_cap() const { return g_cap_; }

    // control values at time t in [0, duration]
    WallState at(double t) const;

    // times of the instantaneous sign jumps, if any
    const std::vector<double>& jump_times() const { return jumps_; }

  private:
    friend Protocol make_protocol(const CyclePath&, double, double, int,
                                  const WellConfig&, double, double);
    struct Segment {
        StageKind kind = StageKind::Insert;
        double t0 = 0.0, t1 = 0.0;
        double x_from = 0.0, x_to = 0.0;
        double sign = 1.0;  // strength sign of the ramp or plateau
        // move re-timing: breakpoints (time, position), piecewise linear
        std::vector<double> bp_t, bp_x;
    };
    std::vector<Segment> segments_;
    std::vector<double> jumps_;
    double duration_ = 0.0;
    double g_cap_ = 0.0;
    double g_star_ = 0.0;
};

// Build the capped protocol for a cycle.  Total time T is split equally
// among the non-flip stages.  n_track bounds the crossing ranks that get a
// diabatic window; window_fraction is the share of a move's time spent
// inside its windows, window_half_width their half width in units of L.
Protocol make_protocol(const CyclePath& cycle, double T, double g_cap,
                       int n_track, const WellConfig& cfg = {},
                       double window_fraction = 0.05,
                       double window_half_width = 0.01);

struct EvolveOptions {
    double dt = 1e-3;
    int record_stride = 0;  // 0 records only the endpoints
    double norm_tolerance = 1e-8;
};

struct EvolveResult {
    WaveField psi;                  // final state
    std::vector<double> times;      // recorded times
    std::vector<WaveField> states;  // recorded states
    double max_norm_drift = 0.0;
    std::size_t steps = 0;
};

// Crank-Nicolson propagation of psi0 under the protocol, with the
// Hamiltonian frozen at each step midpoint.  Unitary up to roundoff; a
// norm drift beyond the tolerance throws NormDriftError.
EvolveResult evolve(const Protocol& protocol, const WaveField& psi0,
                    const Grid& grid, const EvolveOptions& opts = {});

} // namespace deltawall
