#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "deltawall/spectral.hpp"

using namespace deltawall;

namespace {

const double inf = std::numeric_limits<double>::infinity();

// Simpson rule on [0, L]; n_panels must be even.
double integrate(const PiecewiseEigenfunction& psi, double length, int n_panels) {
    double h = length / n_panels;
    double acc = 0.0;
    for (int i = 0; i <= n_panels; ++i) {
        double w = (i == 0 || i == n_panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        double v = psi.value(i * h);
        acc += w * v * v;
    }
    return acc * h / 3.0;
}

void check_eigenfunction_identities(const WallState& wall, int n, const WellConfig& cfg) {
    CAPTURE(wall.strength.str());
    CAPTURE(wall.position);
    CAPTURE(n);
    auto psi = eigenfunction(wall, n, cfg);
    double X = wall.position;
    double eps = 1e-9 * cfg.length;

    // Continuity across the wall and Dirichlet walls.
    CHECK(psi.value(X - eps) == doctest::Approx(psi.value(X + eps)).epsilon(1e-6));
    CHECK(std::abs(psi.value(0.0)) < 1e-12);
    CHECK(std::abs(psi.value(cfg.length)) < 1e-12);

    // Derivative jump matches the wall strength: psi'(X+) - psi'(X-) = (2 m g / hbar^2) psi(X).
    double jump = psi.derivative(X + eps) - psi.derivative(X - eps);
    double expected = 2.0 * cfg.mass * wall.strength.value() / (cfg.hbar * cfg.hbar) * psi.value(X);
    // One-sided finite offsets cost O(eps * k^2 * psi); compare with a scale-aware tolerance.
    double scale = std::max(1.0, std::abs(expected));
    CHECK(jump == doctest::Approx(expected).epsilon(1e-5).scale(scale));

    // Exact jump from the closed-form pieces.
    CHECK(psi.derivative_jump() == doctest::Approx(expected).epsilon(1e-10).scale(scale));

    // Unit L2 norm.
    CHECK(integrate(psi, cfg.length, 20000) == doctest::Approx(1.0).epsilon(1e-8));
}

} // namespace

TEST_CASE("clean box energies and reference scales") {
    WellConfig cfg;
    CHECK(unperturbed_energy(1, cfg) == doctest::Approx(M_PI * M_PI / 2.0).epsilon(1e-15));
    CHECK(unperturbed_energy(3, cfg) == doctest::Approx(9.0 * M_PI * M_PI / 2.0).epsilon(1e-15));
    CHECK(cfg.e_star() == doctest::Approx(4.934802200544679).epsilon(1e-15));
    CHECK(cfg.g_star() == doctest::Approx(1.5707963267948966).epsilon(1e-15));

    WellConfig other{2.0, 0.5, 3.0};
    double expect = 0.5 * 0.5 * M_PI * M_PI * 4.0 / (2.0 * 3.0 * 4.0);
    CHECK(unperturbed_energy(2, other) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("characteristic function values") {
    WellConfig cfg;
    double g = 10.0 * cfg.g_star();
    double X = 0.41;

    // At a root of the characteristic equation the value vanishes.
    double k1 = 5.030826491754791;
    CHECK(std::abs(characteristic_value(k1, g, X, cfg)) < 1e-10);

    // At unperturbed wavenumbers the oscillatory term collapses to
    // c * (-1)^(n+1) * sin^2(n pi X / L).
    double c = 2.0 * cfg.mass * g / (cfg.hbar * cfg.hbar);
    for (int n = 1; n <= 5; ++n) {
        double k = n * M_PI / cfg.length;
        double s = std::sin(n * M_PI * X / cfg.length);
        double expect = c * (n % 2 == 1 ? 1.0 : -1.0) * s * s;
        CHECK(characteristic_value(k, g, X, cfg) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("evanescent characteristic function") {
    WellConfig cfg;
    double X = 0.41;
    double g = -10.0 * cfg.g_star();

    // Frozen evanescent root at g = -10 g*.
    double kappa = std::sqrt(2.0 * cfg.mass * 123.36942430606897) / cfg.hbar;
    CHECK(std::abs(characteristic_value_negative(kappa, g, X, cfg)) < 1e-8);

    // Large-argument evaluation saturates to +/-inf instead of NaN.
    double big = characteristic_value_negative(800.0, g, X, cfg);
    CHECK(std::isinf(big));
    CHECK(big > 0.0);
    double bigger = characteristic_value_negative(5000.0, 100.0, X, cfg);
    CHECK(std::isinf(bigger));
    CHECK_FALSE(std::isnan(characteristic_value_negative(2000.0, g, X, cfg)));
}

TEST_CASE("ground state negative threshold") {
    WellConfig cfg;
    CHECK(ground_negative_threshold(0.5, cfg) == doctest::Approx(-2.0).epsilon(1e-15));
    double expect = -1.0 / (2.0 * 0.41 * 0.59);
    CHECK(ground_negative_threshold(0.41, cfg) == doctest::Approx(expect).epsilon(1e-15));

    WellConfig other{2.0, 0.5, 3.0};
    double X = 0.7;
    double formula = -other.hbar * other.hbar * other.length /
                     (2.0 * other.mass * X * (other.length - X));
    CHECK(ground_negative_threshold(X, other) == doctest::Approx(formula).epsilon(1e-15));
}

TEST_CASE("exceptional level detection") {
    WellConfig cfg;
    CHECK(exceptional_levels(0.5, 6, cfg) == std::vector<int>{2, 4, 6});
    CHECK(exceptional_levels(1.0 / 3.0, 6, cfg) == std::vector<int>{3, 6});
    CHECK(exceptional_levels(0.41, 8, cfg).empty());

    // The node test uses |sin(n pi X / L)| < 1e-9.
    CHECK(exceptional_levels(0.5 + 5e-11, 2, cfg) == std::vector<int>{2});
    CHECK(exceptional_levels(0.5 + 1e-8, 2, cfg).empty());
}

TEST_CASE("separated spectrum ordering and labels") {
    WellConfig cfg;
    auto sep = separated_spectrum(0.41, 6, cfg);
    REQUIRE(sep.levels.size() == 6);

    const Side R = Side::Right;
    const Side L = Side::Left;
    std::vector<std::pair<Side, int>> want = {
        {R, 1}, {L, 1}, {R, 2}, {L, 2}, {R, 3}, {R, 4}};
    for (int i = 0; i < 6; ++i) {
        REQUIRE(sep.levels[i].side.has_value());
        CHECK(sep.levels[i].side->side == want[i].first);
        CHECK(sep.levels[i].side->m == want[i].second);
        double width = want[i].first == Side::Left ? 0.41 : 0.59;
        double e = std::pow(want[i].second * M_PI / width, 2) / 2.0;
        CHECK(sep.levels[i].energy == doctest::Approx(e).epsilon(1e-13));
        if (i > 0) CHECK(sep.levels[i].energy > sep.levels[i - 1].energy);
    }

    // Symmetric wall: degenerate pairs are listed left side first.
    auto half = separated_spectrum(0.5, 4, cfg);
    CHECK(half.levels[0].side->side == Side::Left);
    CHECK(half.levels[1].side->side == Side::Right);
    CHECK(half.levels[0].side->m == 1);
    CHECK(half.levels[1].side->m == 1);
    CHECK(half.levels[0].energy == doctest::Approx(half.levels[1].energy).epsilon(1e-15));
}

TEST_CASE("spectrum at frozen repulsive configuration") {
    WellConfig cfg;
    WallState wall{0.41, Strength::finite(10.0 * cfg.g_star())};
    auto sp = solve_spectrum(wall, 6, cfg);
    REQUIRE(sp.levels.size() == 6);
    std::vector<double> frozen = {12.6546076, 25.71632812, 52.00298256,
                                  98.89477016, 124.08285766, 201.85802537};
    for (int i = 0; i < 6; ++i) {
        CHECK(sp.levels[i].branch == Branch::Oscillatory);
        CHECK(sp.levels[i].energy == doctest::Approx(frozen[i]).epsilon(1e-8));
        CHECK_FALSE(sp.levels[i].exceptional);
    }
    CHECK(sp.levels[0].wavenumber == doctest::Approx(5.030826491754791).epsilon(1e-12));
    CHECK(sp.exceptional_levels.empty());
}

TEST_CASE("spectrum at frozen attractive configuration") {
    WellConfig cfg;
    WallState wall{0.41, Strength::finite(-10.0 * cfg.g_star())};
    auto sp = solve_spectrum(wall, 6, cfg);
    REQUIRE(sp.levels.size() == 6);

    CHECK(sp.levels[0].branch == Branch::Evanescent);
    CHECK(sp.levels[0].energy == doctest::Approx(-123.36942430606897).epsilon(1e-11));
    double kappa = std::sqrt(-2.0 * sp.levels[0].energy);
    CHECK(sp.levels[0].wavenumber == doctest::Approx(kappa).epsilon(1e-10));

    std::vector<double> frozen = {15.58732237, 34.15325691, 63.30562181,
                                  122.5748916, 151.02886179};
    for (int i = 1; i < 6; ++i) {
        CHECK(sp.levels[i].branch == Branch::Oscillatory);
        CHECK(sp.levels[i].energy == doctest::Approx(frozen[i - 1]).epsilon(1e-8));
    }
}

TEST_CASE("spectrum near the ground threshold") {
    WellConfig cfg;
    auto e1 = [&](double g) {
        return solve_spectrum({0.5, Strength::finite(g)}, 1, cfg).levels[0].energy;
    };
    CHECK(e1(-1.99) == doctest::Approx(0.029970).epsilon(2e-4));
    CHECK(e1(-2.01) == doctest::Approx(-0.030030).epsilon(2e-4));
    CHECK(e1(-1.99) > 0.0);
    CHECK(e1(-2.01) < 0.0);
    CHECK(e1(-2.5) == doctest::Approx(-1.57714032).epsilon(1e-7));

    // Exactly at threshold the ground level sits at zero energy.
    auto sp = solve_spectrum({0.5, Strength::finite(-2.0)}, 2, cfg);
    CHECK(sp.levels[0].energy == 0.0);
    CHECK(sp.levels[0].wavenumber == 0.0);
    CHECK(sp.levels[1].energy == doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-14));
}

TEST_CASE("exceptional levels are pinned for every strength") {
    WellConfig cfg;
    double four_estar = 4.0 * cfg.e_star();
    for (double g : {-20.0, -3.0, -0.5, 0.7, 4.0, 60.0}) {
        auto sp = solve_spectrum({0.5, Strength::finite(g)}, 4, cfg);
        CHECK(sp.levels[1].energy == doctest::Approx(four_estar).epsilon(1e-14));
        CHECK(sp.levels[3].energy == doctest::Approx(16.0 * cfg.e_star()).epsilon(1e-14));
        CHECK(sp.levels[1].exceptional);
        CHECK(sp.levels[3].exceptional);
        CHECK(sp.exceptional_levels == std::set<int>{2, 4});
    }
    // Vanishing strength leaves the clean box spectrum with no exceptional marks.
    auto clean = solve_spectrum({0.5, Strength::finite(0.0)}, 4, cfg);
    CHECK(clean.exceptional_levels.empty());
    for (int n = 1; n <= 4; ++n)
        CHECK(clean.levels[n - 1].energy ==
              doctest::Approx(unperturbed_energy(n, cfg)).epsilon(1e-15));
}

TEST_CASE("monotonicity and interlacing in the wall strength") {
    WellConfig cfg;
    double X = 0.41;
    auto sep = separated_spectrum(X, 6, cfg);
    std::vector<double> prev;
    int negatives_max = 0;
    for (double t = -10.0; t <= 10.0 + 1e-9; t += 0.8) {
        double g = t * cfg.g_star();
        auto sp = solve_spectrum({X, Strength::finite(g)}, 6, cfg);
        std::vector<double> cur;
        int negatives = 0;
        for (int i = 0; i < 6; ++i) {
            double e = sp.levels[i].energy;
            cur.push_back(e);
            if (e < 0.0) ++negatives;
            if (i > 0) CHECK(e > cur[i - 1]);

            double e0 = unperturbed_energy(i + 1, cfg);
            if (g > 0.0) {
                CHECK(e > e0);
                CHECK(e < sep.levels[i].energy);
            } else if (g < 0.0) {
                CHECK(e < e0);
                if (i > 0) CHECK(e > sep.levels[i - 1].energy);
            }
        }
        negatives_max = std::max(negatives_max, negatives);
        if (!prev.empty())
            for (int i = 0; i < 6; ++i) CHECK(cur[i] > prev[i]);
        prev = cur;
    }
    CHECK(negatives_max <= 1);

    // Even far into attraction only the ground level can run negative.
    auto deep = solve_spectrum({X, Strength::finite(-50.0 * cfg.g_star())}, 6, cfg);
    CHECK(deep.levels[0].energy < 0.0);
    CHECK(deep.levels[1].energy > 0.0);
}

TEST_CASE("symbolic strengths") {
    WellConfig cfg;
    auto plus = solve_spectrum({0.41, Strength::plus_infinity()}, 6, cfg);
    auto sep = separated_spectrum(0.41, 6, cfg);
    for (int i = 0; i < 6; ++i) {
        CHECK(plus.levels[i].energy == doctest::Approx(sep.levels[i].energy).epsilon(1e-15));
        REQUIRE(plus.levels[i].side.has_value());
        CHECK(plus.levels[i].side->str() == sep.levels[i].side->str());
    }

    auto minus = solve_spectrum({0.41, Strength::minus_infinity()}, 4, cfg);
    CHECK(minus.levels[0].energy == -inf);
    CHECK(minus.levels[0].branch == Branch::Evanescent);
    CHECK(minus.levels[0].wavenumber == inf);
    for (int j = 2; j <= 4; ++j) {
        CHECK(minus.levels[j - 1].energy ==
              doctest::Approx(sep.levels[j - 2].energy).epsilon(1e-15));
        CHECK(minus.levels[j - 1].side->str() == sep.levels[j - 2].side->str());
    }
}

TEST_CASE("scale invariance in reduced units") {
    WellConfig a;
    WellConfig b{2.7, 0.6, 1.9};
    double xi = 0.37;
    for (double t : {-4.0, -1.2, 0.9, 7.5}) {
        auto sa = solve_spectrum({xi * a.length, Strength::finite(t * a.g_star())}, 5, a);
        auto sb = solve_spectrum({xi * b.length, Strength::finite(t * b.g_star())}, 5, b);
        for (int i = 0; i < 5; ++i)
            CHECK(sa.levels[i].energy / a.e_star() ==
                  doctest::Approx(sb.levels[i].energy / b.e_star()).epsilon(1e-10));
    }
}

TEST_CASE("eigenfunction identities") {
    WellConfig cfg;
    check_eigenfunction_identities({0.41, Strength::finite(10.0 * cfg.g_star())}, 1, cfg);
    check_eigenfunction_identities({0.41, Strength::finite(10.0 * cfg.g_star())}, 3, cfg);
    check_eigenfunction_identities({0.41, Strength::finite(-2.3)}, 2, cfg);
    check_eigenfunction_identities({0.31, Strength::finite(4.0)}, 5, cfg);
    check_eigenfunction_identities({0.5, Strength::finite(3.0)}, 1, cfg);

    // Evanescent ground state.
    check_eigenfunction_identities({0.41, Strength::finite(-4.0 * cfg.g_star())}, 1, cfg);

    // Exceptional level: node at the wall, no derivative jump.
    auto psi = eigenfunction({0.5, Strength::finite(5.0)}, 2, cfg);
    CHECK(std::abs(psi.value(0.5)) < 1e-12);
    CHECK(std::abs(psi.derivative_jump()) < 1e-9);
    CHECK(integrate(psi, 1.0, 20000) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("argument validation") {
    WellConfig cfg;
    CHECK_THROWS_AS(validate_position(0.0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(validate_position(1.0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(validate_position(-0.3, cfg), std::invalid_argument);
    CHECK_THROWS_AS(solve_spectrum({1.2, Strength::finite(1.0)}, 3, cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve_spectrum({0.4, Strength::finite(1.0)}, 0, cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(unperturbed_energy(0, cfg), std::invalid_argument);
    CHECK_THROWS_AS(separated_spectrum(0.4, 0, cfg), std::invalid_argument);

    WellConfig bad{-1.0, 1.0, 1.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS(solve_spectrum({0.4, Strength::finite(1.0)}, 3, bad),
                    std::invalid_argument);

    // Symbolic strengths expose no finite value.
    CHECK_THROWS_AS(Strength::plus_infinity().value(), BranchError);
    CHECK_THROWS_AS(eigenfunction({0.4, Strength::plus_infinity()}, 1, cfg), BranchError);
}
