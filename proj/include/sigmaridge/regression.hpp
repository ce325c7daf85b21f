#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sigmaridge/bases.hpp"
#include "sigmaridge/sde_sim.hpp"

namespace sigmaridge {

/// Squared increments scaled by 1/delta, path-major, k = 0..n-1 per path.
struct ResponseVector {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

ResponseVector build_response(const PathSample& sample);

/// Least-squares problem min ||u - F a|| reduced to an m x m triangle:
/// F = Q R, qtu = (Q^T u)_{0..m-1}, and residual_sq is the part of ||u||^2
/// orthogonal to the column space of Q.
struct ReducedSystem {
    Eigen::MatrixXd r;
    Eigen::VectorXd qtu;
    double residual_sq = 0.0;
    std::size_t rows = 0;

    int dim() const noexcept { return static_cast<int>(r.cols()); }
    /// ||u - F a||^2.
    double sum_sq_residual(const Eigen::VectorXd& a) const;
    /// ||u - F a||^2 / rows.
    double contrast(const Eigen::VectorXd& a) const;
};

/// Row-by-row Givens QR. Rows of a banded design (splines) keep R banded, so
/// each update costs O(bandwidth^2) instead of O(m^2).
class LeastSquaresAccumulator {
public:
    explicit LeastSquaresAccumulator(int m);

    /// Row whose non-zero entries are values[0..count) at columns first.. .
    void add_row(int first, std::span<const double> values, double rhs);
    void add_row(const Eigen::Ref<const Eigen::VectorXd>& row, double rhs);

    ReducedSystem finish() const;

private:
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMajor r_;
    Eigen::VectorXd qtu_;
    std::vector<int> row_end_;
    std::vector<double> work_;
    double residual_sq_ = 0.0;
    std::size_t rows_ = 0;
};

ReducedSystem reduce(const Eigen::MatrixXd& F, const ResponseVector& u);
/// Streams the design of `basis` over `sample` without materializing it.
ReducedSystem reduce(const Basis& basis, const PathSample& sample, const ResponseVector& u);

/// Coefficients of the l2-ball constrained least-squares fit.
struct RidgeFit {
    Eigen::VectorXd coeffs;
    double L = 0.0;
    double radius_sq = 0.0;   // m * L
    double lagrange = 0.0;    // 0 when the constraint is inactive
    bool active = false;
};

/// Relative threshold below which singular values count as zero.
constexpr double kRankTolerance = 1e-12;

/// argmin ||u - F a||^2 over ||a||^2 <= m L. Minimum-norm least squares when
/// that lies in the ball; otherwise the boundary point with multiplier
/// lambda > 0 solving the secular equation ||a(lambda)||^2 = m L.
RidgeFit solve_ridge(const ReducedSystem& system, double L);

RidgeFit fit_ridge(const Eigen::MatrixXd& F, const ResponseVector& u, int m, double L);

/// (1/len) * sum (u_i - h_i)^2.
double contrast(std::span<const double> h_values, const ResponseVector& u);

/// Fitted function sum a_l phi_l, optionally capped above at sqrt(L).
class EstimatorFn {
public:
    EstimatorFn(BasisSpec spec, RidgeFit fit, bool truncated = true);

    double raw(double x) const;
    double operator()(double x) const;

    const BasisSpec& basis() const noexcept { return basis_.spec(); }
    const RidgeFit& fit() const noexcept { return fit_; }
    std::optional<double> cap() const noexcept { return cap_; }

private:
    Basis basis_;
    RidgeFit fit_;
    std::optional<double> cap_;
};

double evaluate(const EstimatorFn& est, double x);

/// {family, interval, m, K, M, L, coeffs[], lagrange, active}
nlohmann::json to_json(const EstimatorFn& est);
EstimatorFn estimator_from_json(const nlohmann::json& j);

}  // namespace sigmaridge
