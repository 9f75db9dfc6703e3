#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace deltawall {

// Box geometry and physical constants. Defaults give the dimensionless
// convention L = hbar = m = 1 used throughout the tests.
struct WellConfig {
    double length = 1.0;
    double hbar = 1.0;
    double mass = 1.0;

    // Natural energy unit: ground state energy of the clean box times 1,
    // e_star = (hbar*pi/L)^2 / (2 m).
    double e_star() const {
        double p = hbar * M_PI / length;
        return p * p / (2.0 * mass);
    }

    // Natural strength unit g_star = pi*hbar^2 / (2 m L).
    double g_star() const {
        return M_PI * hbar * hbar / (2.0 * mass * length);
    }

    void validate() const {
        if (!(length > 0.0) || !std::isfinite(length))
            throw std::invalid_argument("well length must be positive and finite");
        if (!(hbar > 0.0) || !std::isfinite(hbar))
            throw std::invalid_argument("hbar must be positive and finite");
        if (!(mass > 0.0) || !std::isfinite(mass))
            throw std::invalid_argument("mass must be positive and finite");
    }
};

// Wall strength, either a finite real value or a signed infinity.  The
// symbolic infinities are kept out of the floating-point arithmetic: every
// operation that receives an infinite strength must dispatch to a closed
// form instead of evaluating a characteristic function.
class Strength {
  public:
    static Strength finite(double v) {
        if (!std::isfinite(v))
            throw std::invalid_argument("finite strength must be a finite real");
        return Strength(Kind::Finite, v);
    }
    static Strength plus_infinity() { return Strength(Kind::PlusInf, 0.0); }
    static Strength minus_infinity() { return Strength(Kind::MinusInf, 0.0); }

    bool is_finite() const { return kind_ == Kind::Finite; }
    bool is_plus_infinity() const { return kind_ == Kind::PlusInf; }
    bool is_minus_infinity() const { return kind_ == Kind::MinusInf; }

    // Finite value; throws on symbolic infinities so that no caller can
    // silently fold an infinity into arithmetic.
    double value() const;

    std::string str() const {
        if (kind_ == Kind::PlusInf) return "inf";
        if (kind_ == Kind::MinusInf) return "-inf";
        return std::to_string(value_);
    }

    bool operator==(const Strength& o) const {
        return kind_ == o.kind_ && (kind_ != Kind::Finite || value_ == o.value_);
    }

  private:
    enum class Kind { Finite, PlusInf, MinusInf };
    Strength(Kind k, double v) : kind_(k), value_(v) {}
    Kind kind_;
    double value_;
};

// Position plus strength of the delta wall.
struct WallState {
    double position = 0.5;
    Strength strength = Strength::finite(0.0);
};

// Thrown when a finite-strength code path receives a symbolic infinity
// (or an evanescent-branch routine is asked about the oscillatory branch).
class BranchError : public std::logic_error {
  public:
    explicit BranchError(const std::string& what) : std::logic_error(what) {}
};

inline double Strength::value() const {
    if (kind_ != Kind::Finite)
        throw BranchError("symbolic infinite strength has no finite value");
    return value_;
}

// Thrown by the time propagator when unitarity is lost.
class NormDriftError : public std::runtime_error {
  public:
    NormDriftError(std::size_t step, double drift)
        : std::runtime_error("norm drift " + std::to_string(drift) +
                             " exceeded tolerance at step " + std::to_string(step)),
          step_(step), drift_(drift) {}
    std::size_t step() const { return step_; }
    double drift() const { return drift_; }

  private:
    std::size_t step_;
    double drift_;
};

// A level n is treated as exceptional at wall position X when
// |sin(n pi X / L)| falls below this tolerance; the level then has a node
// at the wall and decouples from it for every strength.
constexpr double node_tolerance = 1e-9;

inline void validate_position(double x, const WellConfig& cfg) {
    if (!(x > 0.0) || !(x < cfg.length) || !std::isfinite(x))
        throw std::invalid_argument("wall position must lie strictly inside (0, L)");
}

} // namespace deltawall
