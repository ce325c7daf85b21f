#pragma once

#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "sigmaridge/bases.hpp"
#include "sigmaridge/regression.hpp"
#include "sigmaridge/sde_sim.hpp"

namespace sigmaridge {

using RealFn = std::function<double(double)>;

/// The function an estimator is compared against: the true sigma^2,
/// optionally restricted (set to zero) outside a compact support.
struct Target {
    RealFn fn;
    std::optional<Interval> support;

    double operator()(double x) const {
        if (support && !support->contains(x)) return 0.0;
        return fn(x);
    }
};

Target squared_diffusion(const ModelSpec& model, std::optional<Interval> support = std::nullopt);

/// (1/(N n)) sum_j sum_{k<n} h(X^j_k)^2.
double empirical_sq_norm(const RealFn& h, const PathSample& sample);

/// ||est - target||^2_{n,N} over the states of `sample`.
double empirical_sq_distance(const EstimatorFn& est, const Target& target, const PathSample& sample);
double empirical_sq_distance(const RealFn& est, const Target& target, const PathSample& sample);

/// Empirical Gram matrix (1/(N n)) sum phi(X) phi(X)^T.
Eigen::MatrixXd gram_matrix(const BasisSpec& spec, const PathSample& sample);

struct GramDiagnostics {
    int m = 0;
    double min_eigenvalue = 0.0;
    double op_norm_inverse = 0.0;   // 1 / min_eigenvalue, +inf unless min_eigenvalue > 0
    double L_of_m = 0.0;            // sup over a 10 m point grid of sum phi_l^2
    double condition13_lhs = 0.0;   // L(m) * max(op_norm_inverse, 1)
    double condition13_bound = 0.0; // N / log^2(N)
    bool singular = false;          // min_eigenvalue <= 1e-14
    bool condition13_holds = false;
};

/// Diagnostics of an already-formed Gram matrix; `N` sets the bound.
GramDiagnostics gram_diagnostics(const BasisSpec& spec, const Eigen::MatrixXd& gram, std::size_t N);
GramDiagnostics gram_diagnostics(const BasisSpec& spec, const PathSample& sample);

/// sup of sum_l phi_l(x)^2 over `points` equispaced points of the interval
/// (for the real line, of [-(sqrt(2m+1)+3), sqrt(2m+1)+3]).
double sup_sum_squares(const BasisSpec& spec, int points);

}  // namespace sigmaridge
