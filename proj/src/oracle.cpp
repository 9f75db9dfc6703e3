#include "deltawall/oracle.hpp"

#include <cmath>
#include <lapacke.h>
#include <stdexcept>

#include "deltawall/roots.hpp"
#include "deltawall/spectral.hpp"

namespace deltawall {

namespace {

void validate_oracle_args(const WallState& wall, int n_max, int basis_size,
                          const WellConfig& cfg) {
    cfg.validate();
    validate_position(wall.position, cfg);
    if (!wall.strength.is_finite())
        throw BranchError("truncated-basis oracle requires finite strength");
    if (n_max < 1)
        throw std::invalid_argument("level count must be at least 1");
    if (basis_size <= n_max)
        throw std::invalid_argument("basis size must exceed the level count");
}

// Clean-box energies and wall-site mode amplitudes for the first N modes.
void basis_data(double x, int N, const WellConfig& cfg, std::vector<double>& d,
                std::vector<double>& v) {
    d.resize(N);
    v.resize(N);
    double L = cfg.length;
    double amp = std::sqrt(2.0 / L);
    double e1 = cfg.hbar * cfg.hbar * M_PI * M_PI / (2.0 * cfg.mass * L * L);
    for (int m = 1; m <= N; ++m) {
        d[m - 1] = e1 * m * m;
        v[m - 1] = amp * std::sin(m * M_PI * x / L);
    }
}

// j-th eigenvalue (1-based) of diag(d) + g v v^T via the secular equation
//   w(lambda) = 1 + g sum_i v_i^2 / (d_i - lambda) = 0.
// For g > 0 the root interlaces as lambda_j in (d_j, d_{j+1}); for g < 0 as
// lambda_j in (d_{j-1}, d_j) with lambda_1 below d_1.  The endpoint signs
// are fixed by the poles, so bisection never evaluates at them.  Bisection
// runs to floating point exhaustion of the bracket.
double secular_root(const std::vector<double>& d, const std::vector<double>& v,
                    double g, int j, double sum_v2) {
    const int N = (int)d.size();
    auto w = [&](double lam) {
        double s = 0.0;
        for (int i = 0; i < N; ++i)
            s += v[i] * v[i] / (d[i] - lam);
        return 1.0 + g * s;
    };
    double lo, hi;
    bool lo_negative;
    if (g > 0.0) {
        lo = d[j - 1];
        hi = d[j];
        lo_negative = true;   // w -> -inf at the left pole
    } else if (j >= 2) {
        lo = d[j - 2];
        hi = d[j - 1];
        lo_negative = false;  // w -> +inf at the left pole
    } else {
        lo = d[0] + g * sum_v2 - 1.0;  // below the lowest eigenvalue
        hi = d[0];
        lo_negative = false;
    }
    return bisect(w, lo, hi, lo_negative, 0.0);
}

std::vector<double> secular_lowest(const std::vector<double>& d,
                                   const std::vector<double>& v, double g,
                                   int n_want) {
    std::vector<double> out(n_want);
    if (g == 0.0) {
        for (int j = 1; j <= n_want; ++j)
            out[j - 1] = d[j - 1];
        return out;
    }
    double sum_v2 = 0.0;
    for (double vi : v)
        sum_v2 += vi * vi;
    for (int j = 1; j <= n_want; ++j)
        out[j - 1] = secular_root(d, v, g, j, sum_v2);
    return out;
}

std::vector<double> dense_lowest(const WallState& wall, int n_max,
                                 int basis_size, const WellConfig& cfg,
                                 Eigen::MatrixXd* vectors_out) {
    Eigen::MatrixXd H = build_matrix(wall, basis_size, cfg);
    std::vector<double> values(basis_size);
    std::vector<double> vecs;
    std::vector<lapack_int> isuppz(2 * n_max);
    lapack_int found = 0;
    double* z = nullptr;
    lapack_int ldz = 1;
    char jobz = 'N';
    if (vectors_out) {
        vecs.resize((std::size_t)basis_size * n_max);
        z = vecs.data();
        ldz = basis_size;
        jobz = 'V';
    }
    lapack_int info = LAPACKE_dsyevr(
        LAPACK_COL_MAJOR, jobz, 'I', 'U', basis_size, H.data(), basis_size,
        0.0, 0.0, 1, n_max, 0.0, &found, values.data(), z, ldz, isuppz.data());
    if (info != 0)
        throw std::runtime_error("dsyevr failed with info " + std::to_string(info));
    if (found < n_max)
        throw std::runtime_error("dsyevr returned fewer eigenvalues than requested");
    values.resize(n_max);
    if (vectors_out) {
        *vectors_out = Eigen::Map<Eigen::MatrixXd>(vecs.data(), basis_size, n_max);
    }
    return values;
}

} // namespace

Eigen::MatrixXd build_matrix(const WallState& wall, int basis_size,
                             const WellConfig& cfg) {
    cfg.validate();
    validate_position(wall.position, cfg);
    if (!wall.strength.is_finite())
        throw BranchError("truncated-basis oracle requires finite strength");
    if (basis_size < 1)
        throw std::invalid_argument("basis size must be at least 1");
    std::vector<double> d, v;
    basis_data(wall.position, basis_size, cfg, d, v);
    double g = wall.strength.value();
    Eigen::MatrixXd H(basis_size, basis_size);
    for (int col = 0; col < basis_size; ++col) {
        for (int row = 0; row < basis_size; ++row)
            H(row, col) = g * v[row] * v[col];
        H(col, col) += d[col];
    }
    return H;
}

std::vector<double> oracle_spectrum(const WallState& wall, int n_max,
                                    int basis_size, const WellConfig& cfg,
                                    OracleEngine engine) {
    validate_oracle_args(wall, n_max, basis_size, cfg);
    if (engine == OracleEngine::Dense)
        return dense_lowest(wall, n_max, basis_size, cfg, nullptr);
    std::vector<double> d, v;
    basis_data(wall.position, basis_size, cfg, d, v);
    return secular_lowest(d, v, wall.strength.value(), n_max);
}

OracleEigenpairs oracle_eigenpairs(const WallState& wall, int n_max,
                                   int basis_size, const WellConfig& cfg,
                                   OracleEngine engine) {
    validate_oracle_args(wall, n_max, basis_size, cfg);
    OracleEigenpairs out;
    if (engine == OracleEngine::Dense) {
        out.values = dense_lowest(wall, n_max, basis_size, cfg, &out.vectors);
        return out;
    }
    std::vector<double> d, v;
    basis_data(wall.position, basis_size, cfg, d, v);
    out.values = secular_lowest(d, v, wall.strength.value(), n_max);
    out.vectors.resize(basis_size, n_max);
    // Rank-one eigenvector in closed form: u_i proportional to
    // v_i / (d_i - lambda).
    for (int j = 0; j < n_max; ++j) {
        double lam = out.values[j];
        Eigen::VectorXd u(basis_size);
        for (int i = 0; i < basis_size; ++i) {
            double gap = d[i] - lam;
            u(i) = (gap != 0.0) ? v[i] / gap : 0.0;
        }
        double norm = u.norm();
        if (norm == 0.0) {
            // eigenvalue pinned on a decoupled mode; eigenvector is that mode
            u.setZero();
            u(j) = 1.0;
            norm = 1.0;
        }
        out.vectors.col(j) = u / norm;
    }
    return out;
}

std::vector<double> oracle_limit(const WallState& wall, int n_max,
                                 int basis_size, const WellConfig& cfg) {
    validate_oracle_args(wall, n_max, basis_size, cfg);
    if (basis_size % 2 != 0 || basis_size / 2 <= n_max)
        throw std::invalid_argument("limit estimate needs an even basis size "
                                    "with basis_size/2 > n_max");
    auto full = oracle_spectrum(wall, n_max, basis_size, cfg);
    auto half = oracle_spectrum(wall, n_max, basis_size / 2, cfg);
    std::vector<double> out(n_max);
    for (int j = 0; j < n_max; ++j)
        out[j] = 2.0 * full[j] - half[j];
    return out;
}

} // namespace deltawall
