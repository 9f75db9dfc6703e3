#include "deltawall/tdse.hpp"

#include <algorithm>
#include <cmath>
#include <lapacke.h>
#include <stdexcept>

namespace deltawall {

void Grid::validate() const {
    cfg.validate();
    if (points < 8)
        throw std::invalid_argument("grid needs at least 8 interior points");
}

std::complex<double> inner(const WaveField& a, const WaveField& b,
                           const Grid& grid) {
    if (a.size() != b.size() || (int)a.size() != grid.points)
        throw std::invalid_argument("field size does not match grid");
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += std::conj(a[i]) * b[i];
    return s * grid.dx();
}

double norm(const WaveField& a, const Grid& grid) {
    double s = 0.0;
    for (const auto& v : a)
        s += std::norm(v);
    return std::sqrt(s * grid.dx());
}

double fidelity(const WaveField& a, const WaveField& b, const Grid& grid) {
    return std::norm(inner(a, b, grid));
}

TridiagOperator discretize_hamiltonian(const WallState& wall, const Grid& grid) {
    grid.validate();
    validate_position(wall.position, grid.cfg);
    if (!wall.strength.is_finite())
        throw BranchError("grid Hamiltonian requires finite strength");
    const int J = grid.points;
    const double dx = grid.dx();
    const double kin = grid.cfg.hbar * grid.cfg.hbar /
                       (2.0 * grid.cfg.mass * dx * dx);
    TridiagOperator H;
    H.diag.assign(J, 2.0 * kin);
    H.off.assign(J - 1, -kin);

    // delta wall split over the bracketing nodes with linear weights
    double g = wall.strength.value();
    double pos = wall.position / dx - 1.0;  // continuous 0-based node index
    double fl = std::floor(pos);
    int i_lo = (int)fl;
    double theta = pos - fl;
    if (i_lo >= 0 && i_lo < J)
        H.diag[i_lo] += g * (1.0 - theta) / dx;
    if (i_lo + 1 >= 0 && i_lo + 1 < J)
        H.diag[i_lo + 1] += g * theta / dx;
    return H;
}

GridLevels instantaneous_levels(const WallState& wall, const Grid& grid,
                                int count) {
    if (count < 1 || count > grid.points)
        throw std::invalid_argument("invalid level count for this grid");
    TridiagOperator H = discretize_hamiltonian(wall, grid);
    const int J = grid.points;
    std::vector<double> values(J);
    std::vector<double> vecs((std::size_t)J * count);
    std::vector<lapack_int> isuppz(2 * count);
    lapack_int found = 0;
    lapack_int info = LAPACKE_dstevr(
        LAPACK_COL_MAJOR, 'V', 'I', J, H.diag.data(), H.off.data(), 0.0, 0.0,
        1, count, 0.0, &found, values.data(), vecs.data(), J, isuppz.data());
    if (info != 0)
        throw std::runtime_error("dstevr failed with info " + std::to_string(info));
    if (found < count)
        throw std::runtime_error("dstevr returned fewer levels than requested");

    GridLevels out;
    out.energies.assign(values.begin(), values.begin() + count);
    out.modes.resize(count);
    double scale = 1.0 / std::sqrt(grid.dx());
    for (int j = 0; j < count; ++j) {
        WaveField mode(J);
        double* col = vecs.data() + (std::size_t)j * J;
        // fix the overall sign: first appreciable component positive
        double sign = 1.0;
        for (int i = 0; i < J; ++i) {
            if (std::abs(col[i]) > 1e-8) {
                sign = col[i] > 0 ? 1.0 : -1.0;
                break;
            }
        }
        for (int i = 0; i < J; ++i)
            mode[i] = col[i] * sign * scale;
        out.modes[j] = std::move(mode);
    }
    return out;
}

namespace {

double ramp_value(double s, double sign, double g_star, double g_cap,
                  bool rising) {
    double u = rising ? s : 1.0 - s;
    double mag = (u >= 1.0) ? g_cap : g_star * std::tan(0.5 * M_PI * u);
    return sign * std::min(mag, g_cap);
}

} // namespace

WallState Protocol::at(double t) const {
    if (t < 0.0 || t > duration_)
        throw std::invalid_argument("time outside the protocol");
    // segments partition [0, T]; pick the one whose half-open window holds t
    const Segment* seg = &segments_.back();
    for (const Segment& s : segments_) {
        if (t < s.t1 || (&s == &segments_.back() && t <= s.t1)) {
            seg = &s;
            break;
        }
    }
    double span = seg->t1 - seg->t0;
    double s = (span > 0.0) ? (t - seg->t0) / span : 0.0;
    WallState w;
    switch (seg->kind) {
    case StageKind::Insert:
        w.position = seg->x_from;
        w.strength = Strength::finite(
            ramp_value(s, seg->sign, g_star_, g_cap_, true));
        break;
    case StageKind::Remove:
        w.position = seg->x_from;
        w.strength = Strength::finite(
            ramp_value(s, seg->sign, g_star_, g_cap_, false));
        break;
    case StageKind::Move: {
        // piecewise-linear schedule through the re-timed breakpoints
        const auto& bt = seg->bp_t;
        const auto& bx = seg->bp_x;
        std::size_t k = 1;
        while (k + 1 < bt.size() && t >= bt[k])
            ++k;
        double f = (bt[k] > bt[k - 1]) ? (t - bt[k - 1]) / (bt[k] - bt[k - 1])
                                       : 1.0;
        f = std::clamp(f, 0.0, 1.0);
        w.position = bx[k - 1] + (bx[k] - bx[k - 1]) * f;
        w.strength = Strength::finite(seg->sign * g_cap_);
        break;
    }
    case StageKind::Flip:
        // zero-duration; never selected
        w.position = seg->x_from;
        w.strength = Strength::finite(seg->sign * g_cap_);
        break;
    }
    return w;
}

Protocol make_protocol(const CyclePath& cycle, double T, double g_cap,
                       int n_track, const WellConfig& cfg,
                       double window_fraction, double window_half_width) {
    cfg.validate();
    if (!(T > 0.0) || !std::isfinite(T))
        throw std::invalid_argument("protocol duration must be positive");
    if (!(g_cap > 0.0) || !std::isfinite(g_cap))
        throw std::invalid_argument("strength cap must be positive");
    if (n_track < 1)
        throw std::invalid_argument("tracked level count must be at least 1");
    if (!(window_fraction > 0.0) || !(window_fraction < 1.0))
        throw std::invalid_argument("window fraction must lie in (0, 1)");
    if (!(window_half_width > 0.0) || !(window_half_width < 0.5))
        throw std::invalid_argument("window half width must lie in (0, 0.5)");

    const auto& stages = cycle.stages();
    int timed = 0;
    for (const Stage& st : stages)
        if (st.kind != StageKind::Flip)
            ++timed;
    if (timed == 0)
        throw std::invalid_argument("cycle has no timed stages");
    double per = T / timed;

    Protocol p;
    p.duration_ = T;
    p.g_cap_ = g_cap;
    p.g_star_ = cfg.g_star();

    double t = 0.0;
    double current_sign = 1.0;
    for (const Stage& st : stages) {
        Protocol::Segment seg;
        seg.kind = st.kind;
        seg.x_from = st.x_from;
        seg.x_to = st.x_to;
        switch (st.kind) {
        case StageKind::Insert:
            current_sign = st.g_to.is_plus_infinity() ? 1.0 : -1.0;
            seg.sign = current_sign;
            seg.t0 = t;
            seg.t1 = t + per;
            break;
        case StageKind::Remove:
            current_sign = st.g_from.is_plus_infinity() ? 1.0 : -1.0;
            seg.sign = current_sign;
            seg.t0 = t;
            seg.t1 = t + per;
            break;
        case StageKind::Flip:
            current_sign = st.g_to.is_plus_infinity() ? 1.0 : -1.0;
            seg.sign = current_sign;
            seg.t0 = seg.t1 = t;
            p.jumps_.push_back(t);
            break;
        case StageKind::Move: {
            seg.sign = 1.0;
            seg.t0 = t;
            seg.t1 = t + per;
            // collect crossing windows along the path, clipped and ordered
            double lo = std::min(st.x_from, st.x_to);
            double hi = std::max(st.x_from, st.x_to);
            double w = window_half_width * cfg.length;
            std::vector<std::pair<double, double>> wins;
            for (int ml = 1; ml + 1 <= n_track; ++ml)
                for (int mr = 1; ml + mr <= n_track; ++mr) {
                    double xc = crossing_position(ml, mr, cfg);
                    if (xc > lo && xc < hi)
                        wins.push_back({std::max(lo, xc - w),
                                        std::min(hi, xc + w)});
                }
            std::sort(wins.begin(), wins.end());
            std::vector<std::pair<double, double>> merged;
            for (auto& win : wins) {
                if (!merged.empty() && win.first <= merged.back().second)
                    merged.back().second = std::max(merged.back().second,
                                                    win.second);
                else
                    merged.push_back(win);
            }
            // carve the path into slow stretches and fast windows
            bool forward = st.x_to > st.x_from;
            if (!forward)
                std::reverse(merged.begin(), merged.end());
            std::vector<std::pair<double, bool>> pieces;  // (end_x, fast)
            double cur = st.x_from;
            for (auto& win : merged) {
                double a = forward ? win.first : win.second;
                double b = forward ? win.second : win.first;
                if (a != cur)
                    pieces.push_back({a, false});
                pieces.push_back({b, true});
                cur = b;
            }
            if (cur != st.x_to)
                pieces.push_back({st.x_to, false});
            double fast_len = 0.0, slow_len = 0.0, prev = st.x_from;
            for (auto& pc : pieces) {
                (pc.second ? fast_len : slow_len) += std::abs(pc.first - prev);
                prev = pc.first;
            }
            double t_fast = merged.empty() ? 0.0 : window_fraction * per;
            double t_slow = per - t_fast;
            seg.bp_t.push_back(seg.t0);
            seg.bp_x.push_back(st.x_from);
            double tt = seg.t0;
            prev = st.x_from;
            for (auto& pc : pieces) {
                double len = std::abs(pc.first - prev);
                double share = pc.second ? t_fast * len / fast_len
                                         : t_slow * len / slow_len;
                tt += share;
                seg.bp_t.push_back(tt);
                seg.bp_x.push_back(pc.first);
                prev = pc.first;
            }
            seg.bp_t.back() = seg.t1;  // absorb rounding
            seg.bp_x.back() = st.x_to;
            break;
        }
        }
        t = seg.t1;
        p.segments_.push_back(std::move(seg));
    }
    return p;
}

EvolveResult evolve(const Protocol& protocol, const WaveField& psi0,
                    const Grid& grid, const EvolveOptions& opts) {
    grid.validate();
    if ((int)psi0.size() != grid.points)
        throw std::invalid_argument("initial state does not match grid");
    if (!(opts.dt > 0.0))
        throw std::invalid_argument("time step must be positive");

    const int J = grid.points;
    const double T = protocol.duration();
    EvolveResult out;
    out.psi = psi0;

    std::vector<std::complex<double>> rhs(J), dlo(J), dmid(J), dhi(J);
    const std::complex<double> iu(0.0, 1.0);

    std::size_t total_steps = (std::size_t)std::ceil(T / opts.dt);
    if (total_steps == 0)
        total_steps = 1;
    double dt = T / (double)total_steps;

    auto record = [&](double time) {
        out.times.push_back(time);
        if (opts.record_stride > 0)
            out.states.push_back(out.psi);
    };
    record(0.0);

    for (std::size_t n = 0; n < total_steps; ++n) {
        double t0 = n * dt;
        double tm = t0 + 0.5 * dt;
        TridiagOperator H = discretize_hamiltonian(protocol.at(tm), grid);
        // (1 + i dt H / 2 hbar) psi' = (1 - i dt H / 2 hbar) psi
        std::complex<double> lam = iu * dt / (2.0 * grid.cfg.hbar);
        for (int i = 0; i < J; ++i) {
            std::complex<double> hpsi = H.diag[i] * out.psi[i];
            if (i > 0)
                hpsi += H.off[i - 1] * out.psi[i - 1];
            if (i + 1 < J)
                hpsi += H.off[i] * out.psi[i + 1];
            rhs[i] = out.psi[i] - lam * hpsi;
            dmid[i] = 1.0 + lam * H.diag[i];
        }
        for (int i = 0; i + 1 < J; ++i) {
            dhi[i] = lam * H.off[i];
            dlo[i] = lam * H.off[i];
        }
        // Thomas elimination
        for (int i = 1; i < J; ++i) {
            std::complex<double> m = dlo[i - 1] / dmid[i - 1];
            dmid[i] -= m * dhi[i - 1];
            rhs[i] -= m * rhs[i - 1];
        }
        out.psi[J - 1] = rhs[J - 1] / dmid[J - 1];
        for (int i = J - 2; i >= 0; --i)
            out.psi[i] = (rhs[i] - dhi[i] * out.psi[i + 1]) / dmid[i];

        double drift = std::abs(norm(out.psi, grid) - 1.0);
        out.max_norm_drift = std::max(out.max_norm_drift, drift);
        if (drift > opts.norm_tolerance)
            throw NormDriftError(n, drift);

        ++out.steps;
        double now = (n + 1 == total_steps) ? T : t0 + dt;
        if (opts.record_stride > 0 && (n + 1) % opts.record_stride == 0 &&
            n + 1 != total_steps)
            record(now);
        if (n + 1 == total_steps)
            record(T);
    }
    return out;
}

} // namespace deltawall
