#include "deltawall/permutation.hpp"

#include <algorithm>
#include <stdexcept>

namespace deltawall {

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
    std::vector<bool> seen(images_.size(), false);
    for (int v : images_) {
        if (v < 1 || v > (int)images_.size() || seen[v - 1])
            throw std::invalid_argument("images do not form a permutation");
        seen[v - 1] = true;
    }
}

Permutation Permutation::identity(int degree) {
    if (degree < 0)
        throw std::invalid_argument("degree must be nonnegative");
    std::vector<int> im(degree);
    for (int i = 0; i < degree; ++i)
        im[i] = i + 1;
    return Permutation(std::move(im));
}

Permutation Permutation::transposition(int degree, int a, int b) {
    if (a < 1 || b < 1 || a > degree || b > degree || a == b)
        throw std::invalid_argument("invalid transposition");
    Permutation p = identity(degree);
    std::swap(p.images_[a - 1], p.images_[b - 1]);
    return p;
}

int Permutation::apply(int i) const {
    if (i < 1 || i > degree())
        throw std::invalid_argument("index outside permutation domain");
    return images_[i - 1];
}

Permutation Permutation::then(const Permutation& q) const {
    if (degree() != q.degree())
        throw std::invalid_argument("permutation degrees differ");
    std::vector<int> im(degree());
    for (int i = 1; i <= degree(); ++i)
        im[i - 1] = q.apply(apply(i));
    return Permutation(std::move(im));
}

Permutation Permutation::inverse() const {
    std::vector<int> im(degree());
    for (int i = 1; i <= degree(); ++i)
        im[apply(i) - 1] = i;
    return Permutation(std::move(im));
}

bool Permutation::is_identity() const {
    for (int i = 1; i <= degree(); ++i)
        if (apply(i) != i)
            return false;
    return true;
}

std::string Permutation::cycle_notation() const {
    std::string out;
    std::vector<bool> done(degree(), false);
    for (int start = 1; start <= degree(); ++start) {
        if (done[start - 1] || apply(start) == start)
            continue;
        out += "(";
        int i = start;
        bool first = true;
        while (!done[i - 1]) {
            done[i - 1] = true;
            if (!first)
                out += " ";
            out += std::to_string(i);
            first = false;
            i = apply(i);
        }
        out += ")";
    }
    return out.empty() ? "id" : out;
}

void HolonomyMap::set_image(int i, int image) {
    if (i < 1 || i > degree_ || image < 1 || image > degree_)
        throw std::invalid_argument("holonomy entry outside window");
    if (exits_.count(i))
        throw std::invalid_argument("level already marked as exited");
    images_[i] = image;
}

void HolonomyMap::set_exit(int i, ExitReason r) {
    if (i < 1 || i > degree_)
        throw std::invalid_argument("holonomy entry outside window");
    if (images_.count(i))
        throw std::invalid_argument("level already has an image");
    exits_[i] = r;
}

bool HolonomyMap::is_total() const {
    return (int)images_.size() == degree_;
}

std::optional<int> HolonomyMap::image(int i) const {
    auto it = images_.find(i);
    if (it == images_.end())
        return std::nullopt;
    return it->second;
}

std::optional<ExitReason> HolonomyMap::exit_reason(int i) const {
    auto it = exits_.find(i);
    if (it == exits_.end())
        return std::nullopt;
    return it->second;
}

HolonomyMap HolonomyMap::then(const HolonomyMap& q) const {
    if (degree_ != q.degree_)
        throw std::invalid_argument("holonomy window sizes differ");
    HolonomyMap out(degree_);
    for (int i = 1; i <= degree_; ++i) {
        if (auto mid = image(i)) {
            if (auto fin = q.image(*mid))
                out.set_image(i, *fin);
            else if (auto r = q.exit_reason(*mid))
                out.set_exit(i, *r);
        } else if (auto r = exit_reason(i)) {
            out.set_exit(i, *r);
        }
    }
    return out;
}

Permutation HolonomyMap::permutation() const {
    if (!is_total())
        throw std::logic_error("holonomy map is partial; no permutation");
    std::vector<int> im(degree_);
    for (int i = 1; i <= degree_; ++i)
        im[i - 1] = images_.at(i);
    return Permutation(std::move(im));
}

std::string HolonomyMap::str() const {
    std::string out;
    for (int i = 1; i <= degree_; ++i) {
        if (!out.empty())
            out += ", ";
        out += std::to_string(i) + " -> ";
        if (auto im = image(i))
            out += std::to_string(*im);
        else if (auto r = exit_reason(i))
            out += (*r == ExitReason::DivergedBelow) ? "-inf" : "exit";
        else
            out += "?";
    }
    return out;
}

} // namespace deltawall
