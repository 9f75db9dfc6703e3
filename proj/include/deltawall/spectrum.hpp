#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "deltawall/well.hpp"

namespace deltawall {

enum class Branch { Oscillatory, Evanescent };

// Side of the wall a separated-limit state lives on.
enum class Side { Left, Right };

// Label (side, m) of the m-th mode of one sub-box in the g -> +inf limit.
struct SideLabel {
    Side side;
    int m;  // 1-based mode number within the sub-box

    bool operator==(const SideLabel& o) const { return side == o.side && m == o.m; }
    std::string str() const { return (side == Side::Left ? "L" : "R") + std::to_string(m); }
};

struct Level {
    int index = 0;           // 1-based position in the ascending spectrum
    double energy = 0.0;
    Branch branch = Branch::Oscillatory;
    double wavenumber = 0.0; // k on the oscillatory branch, kappa on the evanescent one
    std::optional<SideLabel> side;  // populated only in the separated limit
    bool exceptional = false;
};

struct Spectrum {
    WallState wall;
    std::vector<Level> levels;        // ascending in energy
    std::set<int> exceptional_levels; // indices n with a node at the wall
};

// One-dimensional eigenfunction of the box with a delta wall, stored in
// piecewise closed form.  Oscillatory branch:
//   psi(x) = A sin(k x)            for x <= X
//   psi(x) = B sin(k (L - x))      for x >= X
// Evanescent branch replaces sin by sinh and k by kappa.  Both pieces agree
// at X by construction; the derivative jump at X encodes the wall strength.
struct PiecewiseEigenfunction {
    WellConfig cfg;
    Branch branch = Branch::Oscillatory;
    double wavenumber = 0.0;
    double junction = 0.5;   // wall position X
    double amp_left = 0.0;   // A
    double amp_right = 0.0;  // B

    double value(double x) const;
    double derivative(double x) const;  // one-sided at the junction

    // Jump of the derivative across the junction, psi'(X+) - psi'(X-).
    double derivative_jump() const;
};

} // namespace deltawall
