#include "sigmaridge/norms.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "sigmaridge/error.hpp"

namespace sigmaridge {

Target squared_diffusion(const ModelSpec& model, std::optional<Interval> support) {
    return Target{[model](double x) { return model.sigma_sq(x); }, support};
}

double empirical_sq_norm(const RealFn& h, const PathSample& sample) {
    if (sample.observations() == 0) return 0.0;
    double acc = 0.0;
    for (const auto& path : sample.paths) {
        for (std::size_t k = 0; k < path.steps(); ++k) {
            const double v = h(path[k]);
            acc += v * v;
        }
    }
    return acc / static_cast<double>(sample.observations());
}

double empirical_sq_distance(const EstimatorFn& est, const Target& target, const PathSample& sample) {
    if (sample.observations() == 0) return 0.0;
    double acc = 0.0;
    for (const auto& path : sample.paths) {
        for (std::size_t k = 0; k < path.steps(); ++k) {
            const double x = path[k];
            const double r = est(x) - target(x);
            acc += r * r;
        }
    }
    return acc / static_cast<double>(sample.observations());
}

double empirical_sq_distance(const RealFn& est, const Target& target, const PathSample& sample) {
    if (sample.observations() == 0) return 0.0;
    double acc = 0.0;
    for (const auto& path : sample.paths) {
        for (std::size_t k = 0; k < path.steps(); ++k) {
            const double x = path[k];
            const double r = est(x) - target(x);
            acc += r * r;
        }
    }
    return acc / static_cast<double>(sample.observations());
}

Eigen::MatrixXd gram_matrix(const BasisSpec& spec, const PathSample& sample) {
    const Basis basis(spec);
    const int m = basis.dim();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
    std::vector<double> buffer(static_cast<std::size_t>(basis.max_nonzeros()));
    for (const auto& path : sample.paths) {
        for (std::size_t k = 0; k < path.steps(); ++k) {
            const NonzeroBlock b = basis.eval_nonzero(path[k], buffer);
            for (int i = 0; i < b.count; ++i) {
                for (int j = 0; j <= i; ++j) {
                    gram(b.first + i, b.first + j) +=
                        buffer[static_cast<std::size_t>(i)] * buffer[static_cast<std::size_t>(j)];
                }
            }
        }
    }
    const double scale = sample.observations() == 0 ? 0.0 : 1.0 / static_cast<double>(sample.observations());
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j <= i; ++j) {
            gram(i, j) *= scale;
            gram(j, i) = gram(i, j);
        }
    }
    return gram;
}

double sup_sum_squares(const BasisSpec& spec, int points) {
    if (points < 2) throw Error(ErrorCode::InvalidArgument, "need at least two grid points");
    const Basis basis(spec);
    double lo = spec.interval.lower;
    double hi = spec.interval.upper;
    if (spec.interval.unbounded) {
        hi = std::sqrt(2.0 * spec.dim() + 1.0) + 3.0;
        lo = -hi;
    }
    double best = 0.0;
    for (int i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * i / (points - 1);
        best = std::max(best, basis.eval(x).squaredNorm());
    }
    return best;
}

GramDiagnostics gram_diagnostics(const BasisSpec& spec, const Eigen::MatrixXd& gram, std::size_t N) {
    GramDiagnostics g;
    g.m = spec.dim();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    g.min_eigenvalue = eig.eigenvalues()(0);
    g.singular = g.min_eigenvalue <= 1e-14;
    g.op_norm_inverse = g.singular ? std::numeric_limits<double>::infinity() : 1.0 / g.min_eigenvalue;
    g.L_of_m = sup_sum_squares(spec, 10 * g.m);
    g.condition13_lhs = g.L_of_m * std::max(g.op_norm_inverse, 1.0);
    const double log_n = std::log(static_cast<double>(N));
    g.condition13_bound = log_n > 0.0 ? static_cast<double>(N) / (log_n * log_n)
                                      : std::numeric_limits<double>::infinity();
    g.condition13_holds = !g.singular && g.condition13_lhs <= g.condition13_bound;
    return g;
}

GramDiagnostics gram_diagnostics(const BasisSpec& spec, const PathSample& sample) {
    return gram_diagnostics(spec, gram_matrix(spec, sample), sample.size());
}

}  // namespace sigmaridge
