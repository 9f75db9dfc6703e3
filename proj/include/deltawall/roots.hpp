#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace deltawall {

// Bisection on a bracket with a known sign change.  Converges to relative
// width rel_tol (plus an absolute floor for roots near zero).  The endpoint
// values are not re-evaluated; callers pass the sign of f at lo.
template <class F>
double bisect(F&& f, double lo, double hi, bool f_lo_negative,
              double rel_tol = 1e-15, double abs_tol = 1e-300) {
    if (!(lo < hi))
        throw std::invalid_argument("bisect: empty bracket");
    for (int it = 0; it < 2000; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;  // bracket exhausted at floating point resolution
        double fm = f(mid);
        bool mid_negative = std::signbit(fm) && fm != 0.0;
        if (fm == 0.0)
            return mid;
        if (mid_negative == f_lo_negative)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= rel_tol * std::abs(mid) + abs_tol)
            break;
    }
    return 0.5 * (lo + hi);
}

// Bisection that first verifies the sign change, with one level of bracket
// subdivision as fallback when the endpoint evaluations do not straddle
// zero (e.g. because an endpoint sits on a coincidental zero).
template <class F>
double bisect_checked(F&& f, double lo, double hi,
                      double rel_tol = 1e-15) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::signbit(flo) != std::signbit(fhi))
        return bisect(f, lo, hi, std::signbit(flo), rel_tol);
    // one round of subdivision
    const int pieces = 16;
    double prev = lo, fprev = flo;
    for (int i = 1; i <= pieces; ++i) {
        double x = lo + (hi - lo) * i / pieces;
        double fx = (i == pieces) ? fhi : f(x);
        if (fx == 0.0) return x;
        if (std::signbit(fprev) != std::signbit(fx))
            return bisect(f, prev, x, std::signbit(fprev), rel_tol);
        prev = x;
        fprev = fx;
    }
    throw std::runtime_error("bisect_checked: no sign change in bracket");
}

} // namespace deltawall
