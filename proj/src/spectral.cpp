#include "deltawall/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "deltawall/roots.hpp"

namespace deltawall {

namespace {

// Coupling constant in the characteristic functions, c = 2 m g / hbar^2.
double coupling(double g, const WellConfig& cfg) {
    return 2.0 * cfg.mass * g / (cfg.hbar * cfg.hbar);
}

// Exponentially rescaled evanescent characteristic function,
//   Ghat(kappa) = 4 exp(-kappa L) G(kappa)
//               = 2 kappa (1 - e^{-2 kappa L})
//                 + c (1 - e^{-2 kappa X}) (1 - e^{-2 kappa (L-X)}).
// Same zeros as G on kappa > 0, no overflow for any kappa.
double scaled_negative(double kappa, double c, double x, double L) {
    double a = -std::expm1(-2.0 * kappa * L);
    double b = -std::expm1(-2.0 * kappa * x);
    double d = -std::expm1(-2.0 * kappa * (L - x));
    return 2.0 * kappa * a + c * b * d;
}

struct SeparatedEntry {
    double k;
    SideLabel label;
};

// Merged sub-box wavenumbers m pi / X and m pi / (L - X), ascending.
// Coincidences (within relative 1e-12) are ordered Left before Right.
std::vector<SeparatedEntry> separated_wavenumbers(double x, int count,
                                                  const WellConfig& cfg) {
    std::vector<SeparatedEntry> out;
    out.reserve(count);
    int ml = 1, mr = 1;
    double wl = x, wr = cfg.length - x;
    while ((int)out.size() < count) {
        double kl = ml * M_PI / wl;
        double kr = mr * M_PI / wr;
        if (kl <= kr * (1.0 + 1e-12)) {
            out.push_back({kl, {Side::Left, ml}});
            ++ml;
        } else {
            out.push_back({kr, {Side::Right, mr}});
            ++mr;
        }
    }
    return out;
}

void validate_common(double x, int n_max, const WellConfig& cfg) {
    cfg.validate();
    validate_position(x, cfg);
    if (n_max < 1)
        throw std::invalid_argument("level count must be at least 1");
}

} // namespace

double unperturbed_energy(int n, const WellConfig& cfg) {
    cfg.validate();
    if (n < 1)
        throw std::invalid_argument("level index must be positive");
    double k = n * M_PI / cfg.length;
    double p = cfg.hbar * k;
    return p * p / (2.0 * cfg.mass);
}

double characteristic_value(double k, double g, double x, const WellConfig& cfg) {
    cfg.validate();
    validate_position(x, cfg);
    if (!std::isfinite(g))
        throw BranchError("characteristic function requires finite strength");
    double L = cfg.length;
    return k * std::sin(k * L) +
           coupling(g, cfg) * std::sin(k * x) * std::sin(k * (L - x));
}

double characteristic_value_negative(double kappa, double g, double x,
                                     const WellConfig& cfg) {
    cfg.validate();
    validate_position(x, cfg);
    if (!std::isfinite(g))
        throw BranchError("characteristic function requires finite strength");
    if (!(kappa >= 0.0))
        throw std::invalid_argument("kappa must be nonnegative");
    double ghat = scaled_negative(kappa, coupling(g, cfg), x, cfg.length);
    if (ghat == 0.0)
        return 0.0;
    // G = Ghat * exp(kappa L) / 4; the exponential may overflow, in which
    // case the sign of Ghat decides the signed infinity.
    return 0.25 * ghat * std::exp(kappa * cfg.length);
}

double ground_negative_threshold(double x, const WellConfig& cfg) {
    cfg.validate();
    validate_position(x, cfg);
    return -cfg.hbar * cfg.hbar * cfg.length /
           (2.0 * cfg.mass * x * (cfg.length - x));
}

std::vector<int> exceptional_levels(double x, int n_max, const WellConfig& cfg) {
    validate_common(x, n_max, cfg);
    std::vector<int> out;
    for (int n = 1; n <= n_max; ++n) {
        if (std::abs(std::sin(n * M_PI * x / cfg.length)) < node_tolerance)
            out.push_back(n);
    }
    return out;
}

Spectrum separated_spectrum(double x, int count, const WellConfig& cfg) {
    validate_common(x, count, cfg);
    auto ks = separated_wavenumbers(x, count, cfg);
    Spectrum s;
    s.wall = WallState{x, Strength::plus_infinity()};
    s.levels.reserve(count);
    for (int i = 0; i < count; ++i) {
        Level lv;
        lv.index = i + 1;
        lv.wavenumber = ks[i].k;
        double p = cfg.hbar * ks[i].k;
        lv.energy = p * p / (2.0 * cfg.mass);
        lv.branch = Branch::Oscillatory;
        lv.side = ks[i].label;
        s.levels.push_back(lv);
    }
    return s;
}

namespace {

// Root of the oscillatory characteristic function for one level, given its
// bracket.  The bracket endpoints carry analytically known, opposite signs;
// bisect_checked re-verifies and subdivides once if rounding spoiled an
// endpoint.
double oscillatory_root(int n, double g, double x, const WellConfig& cfg,
                        const std::vector<SeparatedEntry>& sep) {
    double L = cfg.length;
    double c = coupling(g, cfg);
    auto F = [&](double k) {
        return k * std::sin(k * L) + c * std::sin(k * x) * std::sin(k * (L - x));
    };
    double k0 = n * M_PI / L;
    double lo, hi;
    if (g > 0.0) {
        lo = k0;
        hi = sep[n - 1].k;  // n-th separated wavenumber
    } else if (n >= 2) {
        lo = sep[n - 2].k;
        hi = k0;
    } else {
        // level 1 for mildly attractive wall: root between 0+ and pi/L.
        // F vanishes quadratically at k = 0, so start just above it.
        lo = 1e-12 * M_PI / L;
        hi = k0;
    }
    return bisect_checked(F, lo, hi, 1e-13);
}

double evanescent_root(double g, double x, const WellConfig& cfg) {
    double c = coupling(g, cfg);
    auto Ghat = [&](double kappa) {
        return scaled_negative(kappa, c, x, cfg.length);
    };
    double lo = 1e-12 / cfg.length;
    double hi = -c + 1.0 / cfg.length;  // kappa < 2 m |g| / hbar^2 + 1/L
    return bisect_checked(Ghat, lo, hi, 1e-13);
}

} // namespace

Spectrum solve_spectrum(const WallState& wall, int n_max, const WellConfig& cfg) {
    validate_common(wall.position, n_max, cfg);
    double x = wall.position;
    double L = cfg.length;

    if (wall.strength.is_plus_infinity()) {
        Spectrum s = separated_spectrum(x, n_max, cfg);
        return s;
    }
    if (wall.strength.is_minus_infinity()) {
        // Limit spectrum for g -> -inf: the ground state dives to -infinity
        // while level j (j >= 2) lands on the (j-1)-th separated energy.
        Spectrum s;
        s.wall = wall;
        Level ground;
        ground.index = 1;
        ground.energy = -std::numeric_limits<double>::infinity();
        ground.branch = Branch::Evanescent;
        ground.wavenumber = std::numeric_limits<double>::infinity();
        s.levels.push_back(ground);
        if (n_max >= 2) {
            auto sep = separated_spectrum(x, n_max - 1, cfg);
            for (int j = 2; j <= n_max; ++j) {
                Level lv = sep.levels[j - 2];
                lv.index = j;
                s.levels.push_back(lv);
            }
        }
        return s;
    }

    double g = wall.strength.value();
    Spectrum s;
    s.wall = wall;

    auto exc = exceptional_levels(x, n_max, cfg);
    if (g != 0.0)
        s.exceptional_levels.insert(exc.begin(), exc.end());

    auto sep = separated_wavenumbers(x, n_max + 1, cfg);

    double g_th = ground_negative_threshold(x, cfg);
    for (int n = 1; n <= n_max; ++n) {
        Level lv;
        lv.index = n;
        if (g == 0.0 || s.exceptional_levels.count(n)) {
            lv.wavenumber = n * M_PI / L;
            lv.energy = unperturbed_energy(n, cfg);
            lv.exceptional = (g != 0.0);
        } else if (n == 1 && g < g_th) {
            double kappa = evanescent_root(g, x, cfg);
            lv.branch = Branch::Evanescent;
            lv.wavenumber = kappa;
            double p = cfg.hbar * kappa;
            lv.energy = -p * p / (2.0 * cfg.mass);
        } else if (n == 1 && g == g_th) {
            lv.wavenumber = 0.0;
            lv.energy = 0.0;
        } else {
            double k = oscillatory_root(n, g, x, cfg, sep);
            lv.wavenumber = k;
            double p = cfg.hbar * k;
            lv.energy = p * p / (2.0 * cfg.mass);
        }
        s.levels.push_back(lv);
    }

    for (std::size_t i = 1; i < s.levels.size(); ++i) {
        if (!(s.levels[i].energy > s.levels[i - 1].energy))
            throw std::logic_error("spectrum not strictly ascending");
    }
    return s;
}

PiecewiseEigenfunction eigenfunction(const WallState& wall, int n,
                                     const WellConfig& cfg) {
    validate_common(wall.position, n, cfg);
    if (!wall.strength.is_finite())
        throw BranchError("eigenfunction requires finite strength");

    Spectrum s = solve_spectrum(wall, n, cfg);
    const Level& lv = s.levels[n - 1];
    double x = wall.position;
    double L = cfg.length;

    PiecewiseEigenfunction f;
    f.cfg = cfg;
    f.branch = lv.branch;
    f.wavenumber = lv.wavenumber;
    f.junction = x;

    double A, B, norm2;
    if (lv.branch == Branch::Oscillatory) {
        double k = lv.wavenumber;
        if (k == 0.0)
            throw std::domain_error("eigenfunction undefined at the zero-energy threshold");
        if (lv.exceptional || wall.strength.value() == 0.0) {
            // clean-box eigenfunction, written in the piecewise convention
            A = 1.0;
            B = (n % 2 == 1) ? 1.0 : -1.0;
        } else {
            A = std::sin(k * (L - x));
            B = std::sin(k * x);
        }
        norm2 = A * A * (x / 2.0 - std::sin(2.0 * k * x) / (4.0 * k)) +
                B * B * ((L - x) / 2.0 - std::sin(2.0 * k * (L - x)) / (4.0 * k));
    } else {
        double kp = lv.wavenumber;
        if (kp * L > 350.0)
            throw std::domain_error(
                "eigenfunction amplitudes overflow for this deeply bound state");
        A = std::sinh(kp * (L - x));
        B = std::sinh(kp * x);
        norm2 = A * A * (std::sinh(2.0 * kp * x) / (4.0 * kp) - x / 2.0) +
                B * B * (std::sinh(2.0 * kp * (L - x)) / (4.0 * kp) - (L - x) / 2.0);
    }
    double scale = 1.0 / std::sqrt(norm2);
    if (A < 0.0)
        scale = -scale;  // fix sign: positive slope at the left edge
    f.amp_left = A * scale;
    f.amp_right = B * scale;
    return f;
}

double PiecewiseEigenfunction::value(double x) const {
    double L = cfg.length;
    if (branch == Branch::Oscillatory) {
        if (x <= junction)
            return amp_left * std::sin(wavenumber * x);
        return amp_right * std::sin(wavenumber * (L - x));
    }
    if (x <= junction)
        return amp_left * std::sinh(wavenumber * x);
    return amp_right * std::sinh(wavenumber * (L - x));
}

double PiecewiseEigenfunction::derivative(double x) const {
    double L = cfg.length;
    if (branch == Branch::Oscillatory) {
        if (x < junction)
            return amp_left * wavenumber * std::cos(wavenumber * x);
        return -amp_right * wavenumber * std::cos(wavenumber * (L - x));
    }
    if (x < junction)
        return amp_left * wavenumber * std::cosh(wavenumber * x);
    return -amp_right * wavenumber * std::cosh(wavenumber * (L - x));
}

double PiecewiseEigenfunction::derivative_jump() const {
    double L = cfg.length;
    double right, left;
    if (branch == Branch::Oscillatory) {
        right = -amp_right * wavenumber * std::cos(wavenumber * (L - junction));
        left = amp_left * wavenumber * std::cos(wavenumber * junction);
    } else {
        right = -amp_right * wavenumber * std::cosh(wavenumber * (L - junction));
        left = amp_left * wavenumber * std::cosh(wavenumber * junction);
    }
    return right - left;
}

} // namespace deltawall
