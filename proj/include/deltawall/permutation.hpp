#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deltawall/well.hpp"

namespace deltawall {

// Bijection on {1, ..., degree()}.  images[i] is the image of i+1.
class Permutation {
  public:
    Permutation() = default;
    explicit Permutation(std::vector<int> images);
    static Permutation identity(int degree);
    static Permutation transposition(int degree, int a, int b);

    int degree() const { return (int)images_.size(); }
    int apply(int i) const;

    // Composition in application order: (p.then(q))(i) = q(p(i)).
    Permutation then(const Permutation& q) const;
    Permutation inverse() const;

    bool is_identity() const;
    bool operator==(const Permutation& o) const { return images_ == o.images_; }

    // Disjoint cycle notation, fixed points omitted: "(1 2)(3 4)", "id".
    std::string cycle_notation() const;

  private:
    std::vector<int> images_;
};

// Composition in application order; compose(p, q) applies p first, then q.
inline Permutation compose(const Permutation& p, const Permutation& q) {
    return p.then(q);
}

// Why a tracked level left the holonomy map's window.
enum class ExitReason { DivergedBelow, LeftWindow };

// Level relabeling induced by one closed adiabatic cycle, possibly partial:
// a tracked level can leave the n_max window (top of a shift) or dive to
// -infinity (strength flip through the attractive side).
class HolonomyMap {
  public:
    HolonomyMap() = default;
    explicit HolonomyMap(int degree) : degree_(degree) {}

    int degree() const { return degree_; }
    void set_image(int i, int image);
    void set_exit(int i, ExitReason r);

    bool is_total() const;
    std::optional<int> image(int i) const;
    std::optional<ExitReason> exit_reason(int i) const;

    // Chain two cycle maps; defined where every intermediate is defined.
    HolonomyMap then(const HolonomyMap& q) const;

    // Total maps convert to a Permutation; throws std::logic_error otherwise.
    Permutation permutation() const;

    std::string str() const;

  private:
    int degree_ = 0;
    std::map<int, int> images_;
    std::map<int, ExitReason> exits_;
};

} // namespace deltawall
