#include "deltawall/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "deltawall/roots.hpp"
#include "deltawall/spectral.hpp"

namespace deltawall {

namespace {

const double inf = std::numeric_limits<double>::infinity();
const double quiet_nan = std::numeric_limits<double>::quiet_NaN();

enum class LoopState { Closed, OpenPlus, OpenMinus };

bool is_zero_strength(const Strength& g) {
    return g.is_finite() && g.value() == 0.0;
}

// Structural validation: stages chain into one or more primitive cycles,
// each opened by an Insert from strength zero and closed by a Remove back
// to zero, with continuous positions, moves only at +inf, and flips
// between the two infinities.
void validate_stages(const std::vector<Stage>& stages) {
    if (stages.empty())
        throw std::invalid_argument("cycle has no stages");
    LoopState state = LoopState::Closed;
    double x = 0.0;
    for (const Stage& st : stages) {
        switch (st.kind) {
        case StageKind::Insert:
            if (state != LoopState::Closed)
                throw std::invalid_argument("insert inside an open cycle");
            if (!is_zero_strength(st.g_from) || st.g_to.is_finite())
                throw std::invalid_argument("insert must ramp zero -> infinity");
            if (st.x_from != st.x_to)
                throw std::invalid_argument("insert must hold its position");
            state = st.g_to.is_plus_infinity() ? LoopState::OpenPlus
                                               : LoopState::OpenMinus;
            x = st.x_to;
            break;
        case StageKind::Move:
            if (state != LoopState::OpenPlus)
                throw std::invalid_argument("move requires an opaque (+inf) wall");
            if (!st.g_from.is_plus_infinity() || !st.g_to.is_plus_infinity())
                throw std::invalid_argument("move must keep strength at +inf");
            if (st.x_from != x)
                throw std::invalid_argument("move discontinuous in position");
            if (st.x_from == st.x_to)
                throw std::invalid_argument("move endpoints coincide");
            x = st.x_to;
            break;
        case StageKind::Flip:
            if (state == LoopState::Closed)
                throw std::invalid_argument("flip outside an open cycle");
            if (st.x_from != x || st.x_to != x)
                throw std::invalid_argument("flip must hold its position");
            if (st.g_from.is_finite() || st.g_to.is_finite() ||
                st.g_from == st.g_to)
                throw std::invalid_argument("flip must swap the two infinities");
            if ((state == LoopState::OpenPlus) != st.g_from.is_plus_infinity())
                throw std::invalid_argument("flip strength does not match state");
            state = (state == LoopState::OpenPlus) ? LoopState::OpenMinus
                                                   : LoopState::OpenPlus;
            break;
        case StageKind::Remove:
            if (state == LoopState::Closed)
                throw std::invalid_argument("remove outside an open cycle");
            if ((state == LoopState::OpenPlus) != st.g_from.is_plus_infinity() ||
                st.g_from.is_finite())
                throw std::invalid_argument("remove strength does not match state");
            if (!is_zero_strength(st.g_to))
                throw std::invalid_argument("remove must ramp back to zero");
            if (st.x_from != x || st.x_to != x)
                throw std::invalid_argument("remove must hold its position");
            state = LoopState::Closed;
            break;
        }
    }
    if (state != LoopState::Closed)
        throw std::invalid_argument("cycle does not close at strength zero");
}

Stage reversed(const Stage& st) {
    Stage r = st;
    if (st.kind == StageKind::Insert)
        r.kind = StageKind::Remove;
    else if (st.kind == StageKind::Remove)
        r.kind = StageKind::Insert;
    std::swap(r.x_from, r.x_to);
    std::swap(r.g_from, r.g_to);
    return r;
}

// Energy of a separated-limit state (side, m) with the wall at x.
double separated_energy(const SideLabel& lab, double x, const WellConfig& cfg) {
    double width = (lab.side == Side::Left) ? x : cfg.length - x;
    double k = lab.m * M_PI / width;
    double p = cfg.hbar * k;
    return p * p / (2.0 * cfg.mass);
}

std::optional<int> rank_of_label(const Spectrum& sep, const SideLabel& lab) {
    for (const Level& lv : sep.levels) {
        if (lv.side && *lv.side == lab)
            return lv.index;
    }
    return std::nullopt;
}

// Per-level tracking state while the automaton walks the stages.
struct TrackState {
    bool diverged = false;       // fell to -inf at a flip
    bool lost = false;           // rank left even the curve buffer
    bool exited_window = false;  // rank left the n_max window at some point
    int global = 0;              // current ascending-spectrum index
    SideLabel label{Side::Left, 0};  // valid during Move stages
};

void note_rank(TrackState& t, std::optional<int> rank, int n_max, int buffer) {
    if (!rank || *rank > buffer) {
        t.lost = true;
        t.exited_window = true;
        return;
    }
    t.global = *rank;
    if (*rank > n_max)
        t.exited_window = true;
}

// Advance every live track across one stage.  Insert and Remove keep the
// index (no crossings on a monotone finite ramp); Move re-ranks the
// carried sub-box label at the new position; Flip applies the exact
// correspondence between the two separated limits: the state at rank j for
// g -> +inf is the (j+1)-th level for g -> -inf, and back.
void apply_transition(const Stage& st, int n_max, int buffer,
                      const WellConfig& cfg, std::vector<TrackState>& tracks) {
    switch (st.kind) {
    case StageKind::Insert:
        if (st.g_to.is_minus_infinity()) {
            for (TrackState& t : tracks)
                if (!t.diverged && !t.lost && t.global == 1)
                    t.diverged = true;
        }
        break;
    case StageKind::Move: {
        Spectrum from = separated_spectrum(st.x_from, buffer, cfg);
        Spectrum to = separated_spectrum(st.x_to, buffer, cfg);
        for (TrackState& t : tracks) {
            if (t.diverged || t.lost)
                continue;
            t.label = *from.levels[t.global - 1].side;
            note_rank(t, rank_of_label(to, t.label), n_max, buffer);
        }
        break;
    }
    case StageKind::Flip:
        for (TrackState& t : tracks) {
            if (t.diverged || t.lost)
                continue;
            if (st.g_from.is_plus_infinity()) {
                if (t.global + 1 > buffer) {
                    t.lost = true;
                    t.exited_window = true;
                } else {
                    t.global += 1;
                    if (t.global > n_max)
                        t.exited_window = true;
                }
            } else {
                if (t.global == 1)
                    t.diverged = true;
                else
                    t.global -= 1;
            }
        }
        break;
    case StageKind::Remove:
        break;
    }
}

HolonomyMap map_from_tracks(const std::vector<TrackState>& tracks, int n_max) {
    HolonomyMap map(n_max);
    for (int t = 1; t <= n_max; ++t) {
        const TrackState& ts = tracks[t - 1];
        if (ts.diverged)
            map.set_exit(t, ExitReason::DivergedBelow);
        else if (ts.exited_window)
            map.set_exit(t, ExitReason::LeftWindow);
        else
            map.set_image(t, ts.global);
    }
    return map;
}

// Positions where the wall is inserted, removed, or flipped must not host
// a node of any tracked level; such a level would decouple from the ramp.
void check_node_clearance(const CyclePath& cycle, int n_max,
                          const WellConfig& cfg) {
    for (const Stage& st : cycle.stages()) {
        if (st.kind == StageKind::Move)
            continue;
        validate_position(st.x_from, cfg);
        auto exc = exceptional_levels(st.x_from, n_max, cfg);
        if (!exc.empty()) {
            std::ostringstream msg;
            msg << "level " << exc.front() << " has a node at wall position "
                << st.x_from << "; choose a different cycle position";
            throw std::invalid_argument(msg.str());
        }
    }
    for (const Stage& st : cycle.stages()) {
        if (st.kind == StageKind::Move) {
            validate_position(st.x_from, cfg);
            validate_position(st.x_to, cfg);
        }
    }
}

std::vector<TrackState> init_tracks(int n_max) {
    std::vector<TrackState> tracks(n_max);
    for (int t = 1; t <= n_max; ++t)
        tracks[t - 1].global = t;
    return tracks;
}

// Degeneracies of the separated spectrum crossed by one Move stage, with
// positions re-located by bisection on the energy difference.  Only pairs
// whose ranks (m_left + m_right - 1, m_left + m_right) fit inside the
// n_max window are reported.
std::vector<CrossingEvent> move_events(const Stage& st, int stage_index,
                                       int n_max, const WellConfig& cfg) {
    std::vector<CrossingEvent> events;
    double lo = std::min(st.x_from, st.x_to);
    double hi = std::max(st.x_from, st.x_to);
    double L = cfg.length;
    double pref = cfg.hbar * cfg.hbar * M_PI * M_PI / (2.0 * cfg.mass);
    for (int ml = 1; ml + 1 <= n_max; ++ml) {
        for (int mr = 1; ml + mr <= n_max; ++mr) {
            double xc = crossing_position(ml, mr, cfg);
            if (!(xc > lo && xc < hi))
                continue;
            auto gap = [&](double x) {
                double a = (double)ml / x;
                double b = (double)mr / (L - x);
                return pref * (a * a - b * b);
            };
            CrossingEvent ev;
            ev.stage = stage_index;
            ev.position = bisect_checked(gap, lo, hi, 1e-14);
            ev.m_left = ml;
            ev.m_right = mr;
            ev.rank_low = ml + mr - 1;
            ev.energy = separated_energy({Side::Left, ml}, ev.position, cfg);
            events.push_back(ev);
        }
    }
    bool forward = st.x_to > st.x_from;
    std::sort(events.begin(), events.end(),
              [&](const CrossingEvent& a, const CrossingEvent& b) {
                  if (a.position != b.position)
                      return forward ? a.position < b.position
                                     : a.position > b.position;
                  return a.rank_low < b.rank_low;
              });
    return events;
}

double ramp_strength(const Stage& st, double s, const WellConfig& cfg) {
    // tan ramp: finite strictly inside the stage, formally infinite at the
    // symbolic end (which is emitted as a symbolic sample, never evaluated)
    bool to_inf = st.kind == StageKind::Insert;
    double u = to_inf ? s : 1.0 - s;
    double mag = cfg.g_star() * std::tan(0.5 * M_PI * u);
    double sign = (to_inf ? st.g_to : st.g_from).is_plus_infinity() ? 1.0 : -1.0;
    return sign * mag;
}

} // namespace

CyclePath CyclePath::from_stages(std::vector<Stage> stages) {
    validate_stages(stages);
    CyclePath p;
    p.stages_ = std::move(stages);
    return p;
}

CyclePath CyclePath::inverse() const {
    std::vector<Stage> rev;
    rev.reserve(stages_.size());
    for (auto it = stages_.rbegin(); it != stages_.rend(); ++it)
        rev.push_back(reversed(*it));
    return from_stages(std::move(rev));
}

CyclePath CyclePath::then(const CyclePath& next) const {
    std::vector<Stage> all = stages_;
    all.insert(all.end(), next.stages_.begin(), next.stages_.end());
    return from_stages(std::move(all));
}

std::string CyclePath::str() const {
    std::ostringstream out;
    for (const Stage& st : stages_) {
        switch (st.kind) {
        case StageKind::Insert:
            out << "[insert@" << st.x_from << " ->" << st.g_to.str() << "]";
            break;
        case StageKind::Move:
            out << "[move " << st.x_from << "->" << st.x_to << "]";
            break;
        case StageKind::Flip:
            out << "[flip@" << st.x_from << " " << st.g_from.str() << "->"
                << st.g_to.str() << "]";
            break;
        case StageKind::Remove:
            out << "[remove@" << st.x_from << " " << st.g_from.str() << "->0]";
            break;
        }
    }
    return out.str();
}

CyclePath make_cx(double x0, double x1, const WellConfig& cfg) {
    cfg.validate();
    validate_position(x0, cfg);
    validate_position(x1, cfg);
    if (x0 == x1)
        throw std::invalid_argument("insertion cycle needs distinct endpoints");
    std::vector<Stage> st(3);
    st[0] = {StageKind::Insert, x0, x0, Strength::finite(0.0),
             Strength::plus_infinity()};
    st[1] = {StageKind::Move, x0, x1, Strength::plus_infinity(),
             Strength::plus_infinity()};
    st[2] = {StageKind::Remove, x1, x1, Strength::plus_infinity(),
             Strength::finite(0.0)};
    return CyclePath::from_stages(std::move(st));
}

CyclePath make_cy(double x0, const WellConfig& cfg) {
    cfg.validate();
    validate_position(x0, cfg);
    std::vector<Stage> st(3);
    st[0] = {StageKind::Insert, x0, x0, Strength::finite(0.0),
             Strength::plus_infinity()};
    st[1] = {StageKind::Flip, x0, x0, Strength::plus_infinity(),
             Strength::minus_infinity()};
    st[2] = {StageKind::Remove, x0, x0, Strength::minus_infinity(),
             Strength::finite(0.0)};
    return CyclePath::from_stages(std::move(st));
}

double crossing_position(int m_left, int m_right, const WellConfig& cfg) {
    cfg.validate();
    if (m_left < 1 || m_right < 1)
        throw std::invalid_argument("mode numbers must be positive");
    return m_left * cfg.length / (m_left + m_right);
}

std::pair<Window, Window> crossing_window(int m_left, int m_right,
                                          const WellConfig& cfg) {
    double xc = crossing_position(m_left, m_right, cfg);
    Window before, after;
    before.lo = std::max(m_left > 1 ? crossing_position(m_left - 1, m_right, cfg)
                                    : 0.0,
                         crossing_position(m_left, m_right + 1, cfg));
    before.hi = xc;
    after.lo = xc;
    after.hi = std::min(crossing_position(m_left + 1, m_right, cfg),
                        m_right > 1 ? crossing_position(m_left, m_right - 1, cfg)
                                    : cfg.length);
    return {before, after};
}

std::pair<Window, Window> cx_window_for_level(int n, const WellConfig& cfg) {
    if (n < 1)
        throw std::invalid_argument("level index must be positive");
    int mr = (n + 1) / 2;
    int ml = n + 1 - mr;
    return crossing_window(ml, mr, cfg);
}

HolonomyMap holonomy_permutation(const CyclePath& cycle, int n_max,
                                 const WellConfig& cfg) {
    cfg.validate();
    if (n_max < 1)
        throw std::invalid_argument("window size must be at least 1");
    check_node_clearance(cycle, n_max, cfg);
    int buffer = n_max + 1;
    auto tracks = init_tracks(n_max);
    for (const Stage& st : cycle.stages())
        apply_transition(st, n_max, buffer, cfg, tracks);
    return map_from_tracks(tracks, n_max);
}

HolonomyMap composed_holonomy(const std::vector<CyclePath>& cycles, int n_max,
                              const WellConfig& cfg) {
    HolonomyMap acc(n_max);
    for (int i = 1; i <= n_max; ++i)
        acc.set_image(i, i);
    for (const CyclePath& c : cycles)
        acc = acc.then(holonomy_permutation(c, n_max, cfg));
    return acc;
}

SpectralFlow trace(const CyclePath& cycle, int n_max, int steps,
                   const WellConfig& cfg) {
    cfg.validate();
    if (n_max < 1)
        throw std::invalid_argument("window size must be at least 1");
    if (steps < 16)
        throw std::invalid_argument("need at least 16 steps per stage");
    check_node_clearance(cycle, n_max, cfg);

    const int buffer = n_max + 1;
    auto tracks = init_tracks(n_max);

    SpectralFlow flow;
    flow.n_max = n_max;

    auto curve_value = [&](const TrackState& t, double energy) {
        return (t.diverged || t.lost) ? quiet_nan : energy;
    };

    // energies of all live tracks at a finite-strength sample
    auto sample_finite = [&](int stage, double s, double x, double g) {
        Spectrum sp = solve_spectrum({x, Strength::finite(g)}, buffer, cfg);
        FlowSample fs;
        fs.stage = stage;
        fs.s = s;
        fs.x = x;
        fs.g = Strength::finite(g);
        fs.energies.resize(n_max, quiet_nan);
        for (int t = 1; t <= n_max; ++t) {
            const TrackState& ts = tracks[t - 1];
            if (!ts.diverged && !ts.lost)
                fs.energies[t - 1] = sp.levels[ts.global - 1].energy;
        }
        flow.samples.push_back(std::move(fs));
    };

    // energies at a symbolic-infinity sample; during Move stages the track
    // follows its sub-box label in closed form
    auto sample_infinite = [&](int stage, double s, double x, bool plus,
                               bool by_label) {
        FlowSample fs;
        fs.stage = stage;
        fs.s = s;
        fs.x = x;
        fs.g = plus ? Strength::plus_infinity() : Strength::minus_infinity();
        fs.energies.resize(n_max, quiet_nan);
        Spectrum sep = separated_spectrum(x, buffer, cfg);
        for (int t = 1; t <= n_max; ++t) {
            const TrackState& ts = tracks[t - 1];
            if (ts.diverged || ts.lost)
                continue;
            double e;
            if (by_label) {
                e = separated_energy(ts.label, x, cfg);
            } else if (plus) {
                e = sep.levels[ts.global - 1].energy;
            } else {
                e = (ts.global == 1) ? -inf : sep.levels[ts.global - 2].energy;
            }
            fs.energies[t - 1] = curve_value(ts, e);
        }
        flow.samples.push_back(std::move(fs));
    };

    const auto& stages = cycle.stages();
    for (int si = 0; si < (int)stages.size(); ++si) {
        const Stage& st = stages[si];
        switch (st.kind) {
        case StageKind::Insert: {
            bool plus = st.g_to.is_plus_infinity();
            for (int j = 0; j < steps; ++j) {
                double s = (double)j / steps;
                sample_finite(si, s, st.x_from, ramp_strength(st, s, cfg));
            }
            sample_infinite(si, 1.0, st.x_from, plus, false);
            // divergence of the ground track happens exactly at s = 1
            apply_transition(st, n_max, buffer, cfg, tracks);
            break;
        }
        case StageKind::Move: {
            // fix labels at the stage entrance, then sample them in closed
            // form; the re-ranking at the exit is the stage transition
            Spectrum from = separated_spectrum(st.x_from, buffer, cfg);
            for (TrackState& t : tracks)
                if (!t.diverged && !t.lost)
                    t.label = *from.levels[t.global - 1].side;
            for (int j = 0; j <= steps; ++j) {
                double s = (double)j / steps;
                double x = st.x_from + (st.x_to - st.x_from) * s;
                sample_infinite(si, s, x, true, true);
            }
            auto ev = move_events(st, si, n_max, cfg);
            flow.events.insert(flow.events.end(), ev.begin(), ev.end());
            apply_transition(st, n_max, buffer, cfg, tracks);
            break;
        }
        case StageKind::Flip: {
            sample_infinite(si, 0.0, st.x_from, st.g_from.is_plus_infinity(),
                            false);
            apply_transition(st, n_max, buffer, cfg, tracks);
            sample_infinite(si, 1.0, st.x_from, st.g_to.is_plus_infinity(),
                            false);
            break;
        }
        case StageKind::Remove: {
            bool plus = st.g_from.is_plus_infinity();
            sample_infinite(si, 0.0, st.x_from, plus, false);
            for (int j = 1; j <= steps; ++j) {
                double s = (double)j / steps;
                sample_finite(si, s, st.x_from, ramp_strength(st, s, cfg));
            }
            apply_transition(st, n_max, buffer, cfg, tracks);
            break;
        }
        }
    }

    flow.map = map_from_tracks(tracks, n_max);

    // Read the final indices off the traced curves themselves: at the end
    // of the last Remove the strength is exactly zero, so every live curve
    // must sit on a clean-box energy.  This pins the numeric flow to the
    // closed-form prediction.
    HolonomyMap predicted = holonomy_permutation(cycle, n_max, cfg);
    const FlowSample& last = flow.samples.back();
    for (int t = 1; t <= n_max; ++t) {
        const TrackState& ts = tracks[t - 1];
        if (ts.diverged || ts.lost)
            continue;
        double e = last.energies[t - 1];
        int best = 0;
        double best_err = inf;
        for (int j = 1; j <= buffer; ++j) {
            double err = std::abs(e - unperturbed_energy(j, cfg));
            if (err < best_err) {
                best_err = err;
                best = j;
            }
        }
        if (best != ts.global || best_err > 1e-9 * std::abs(e))
            throw std::logic_error("traced flow does not land on the "
                                   "predicted final level");
        auto want = predicted.image(t);
        if (ts.global <= n_max && (!want || *want != ts.global))
            throw std::logic_error("traced permutation disagrees with the "
                                   "holonomy prediction");
    }
    return flow;
}

std::vector<CyclePath> plan_connection(int source, int target,
                                       const WellConfig& cfg) {
    cfg.validate();
    if (source < 1 || target < 1)
        throw std::invalid_argument("level indices must be positive");
    std::vector<CyclePath> out;
    if (source == target)
        return out;
    auto step = [&](int k) {
        auto [w0, w1] = cx_window_for_level(k, cfg);
        return make_cx(w0.mid(), w1.mid(), cfg);
    };
    if (target > source) {
        for (int k = source; k < target; ++k)
            out.push_back(step(k));
    } else {
        for (int k = source - 1; k >= target; --k)
            out.push_back(step(k).inverse());
    }
    int window = std::max(source, target) + 1;
    auto composed = composed_holonomy(out, window, cfg);
    auto image = composed.image(source);
    if (!image || *image != target)
        throw std::logic_error("planned cycle sequence failed verification");
    return out;
}

} // namespace deltawall
