#pragma once

#include <Eigen/Dense>
#include <vector>

#include "deltawall/well.hpp"

namespace deltawall {

// Truncated-basis representation of the walled box in the first N clean-box
// modes:  H_{mn} = E_m delta_{mn} + g phi_m(X) phi_n(X), with
// phi_n(X) = sqrt(2/L) sin(n pi X / L).   This route shares nothing with
// the transcendental characteristic equations and serves as the
// independent check on them.
Eigen::MatrixXd build_matrix(const WallState& wall, int basis_size,
                             const WellConfig& cfg = {});

// Two interchangeable eigensolvers for the truncated matrix.
//
// Secular exploits the diagonal-plus-rank-one structure exactly: the
// eigenvalues are the roots of  w(lambda) = 1 + g sum_m phi_m(X)^2 /
// (E_m - lambda),  one per interlacing interval, found by bisection to
// machine precision.  O(N) per eigenvalue and deterministic.
//
// Dense diagonalizes the full matrix with LAPACK (dsyevr).  O(N^3); kept
// as a cross-check that the secular route matches a stock solver.
enum class OracleEngine { Secular, Dense };

// Lowest n_max eigenvalues of the truncated matrix, ascending.
std::vector<double> oracle_spectrum(const WallState& wall, int n_max,
                                    int basis_size, const WellConfig& cfg = {},
                                    OracleEngine engine = OracleEngine::Secular);

struct OracleEigenpairs {
    std::vector<double> values;  // ascending
    Eigen::MatrixXd vectors;     // column j pairs with values[j], unit norm
};

// Lowest n_max eigenpairs, for residual tests against the explicit matrix.
OracleEigenpairs oracle_eigenpairs(const WallState& wall, int n_max,
                                   int basis_size, const WellConfig& cfg = {},
                                   OracleEngine engine = OracleEngine::Secular);

// Basis-limit estimate of the lowest n_max eigenvalues by Richardson
// extrapolation of the O(1/N) truncation tail:  2 E(N) - E(N/2).
// Tightens the plain basis_size values by two to three orders of magnitude
// at negative strengths, where the evanescent ground state converges
// slowest.  basis_size must be even.
std::vector<double> oracle_limit(const WallState& wall, int n_max,
                                 int basis_size, const WellConfig& cfg = {});

} // namespace deltawall
