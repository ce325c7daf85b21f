#include "sigmaridge/regression.hpp"

#include <algorithm>
#include <cmath>

#include "sigmaridge/error.hpp"

namespace sigmaridge {

ResponseVector build_response(const PathSample& sample) {
    ResponseVector u;
    u.values.reserve(sample.observations());
    for (const auto& path : sample.paths) {
        const double inv_delta = static_cast<double>(path.steps());
        for (std::size_t k = 0; k < path.steps(); ++k) {
            const double dx = path[k + 1] - path[k];
            u.values.push_back(dx * dx * inv_delta);
        }
    }
    return u;
}

double ReducedSystem::sum_sq_residual(const Eigen::VectorXd& a) const {
    return (qtu - r * a).squaredNorm() + residual_sq;
}

double ReducedSystem::contrast(const Eigen::VectorXd& a) const {
    return rows == 0 ? 0.0 : sum_sq_residual(a) / static_cast<double>(rows);
}

LeastSquaresAccumulator::LeastSquaresAccumulator(int m)
    : r_(RowMajor::Zero(m, m)),
      qtu_(Eigen::VectorXd::Zero(m)),
      row_end_(static_cast<std::size_t>(m), -1),
      work_(static_cast<std::size_t>(m), 0.0) {
    if (m < 1) throw Error(ErrorCode::InvalidArgument, "least-squares dimension must be >= 1");
}

void LeastSquaresAccumulator::add_row(int first, std::span<const double> values, double rhs) {
    const int m = static_cast<int>(r_.cols());
    const int count = static_cast<int>(values.size());
    if (first < 0 || first + count > m) {
        throw Error(ErrorCode::DimensionMismatch, "row block exceeds the least-squares dimension");
    }
    ++rows_;
    int hi = -1;
    int lo = m;
    for (int i = 0; i < count; ++i) {
        const double v = values[static_cast<std::size_t>(i)];
        if (v != 0.0) {
            work_[static_cast<std::size_t>(first + i)] = v;
            lo = std::min(lo, first + i);
            hi = first + i;
        }
    }
    double y = rhs;
    const int touched_lo = lo;
    for (int k = lo; k <= hi; ++k) {
        const double wk = work_[static_cast<std::size_t>(k)];
        if (wk == 0.0) continue;
        const double rkk = r_(k, k);
        const double rho = std::hypot(rkk, wk);
        const double c = rkk / rho;
        const double s = wk / rho;
        const int end = std::max(hi, row_end_[static_cast<std::size_t>(k)]);
        for (int j = k; j <= end; ++j) {
            const double t = r_(k, j);
            const double w = work_[static_cast<std::size_t>(j)];
            r_(k, j) = c * t + s * w;
            work_[static_cast<std::size_t>(j)] = c * w - s * t;
        }
        work_[static_cast<std::size_t>(k)] = 0.0;
        const double t = qtu_(k);
        qtu_(k) = c * t + s * y;
        y = c * y - s * t;
        row_end_[static_cast<std::size_t>(k)] = end;
        hi = end;
    }
    residual_sq_ += y * y;
    for (int j = std::max(touched_lo, 0); j <= hi && j < m; ++j) work_[static_cast<std::size_t>(j)] = 0.0;
}

void LeastSquaresAccumulator::add_row(const Eigen::Ref<const Eigen::VectorXd>& row, double rhs) {
    if (row.size() != r_.cols()) throw Error(ErrorCode::DimensionMismatch, "row length differs from m");
    add_row(0, std::span<const double>(row.data(), static_cast<std::size_t>(row.size())), rhs);
}

ReducedSystem LeastSquaresAccumulator::finish() const {
    ReducedSystem sys;
    sys.r = r_;
    sys.qtu = qtu_;
    sys.residual_sq = residual_sq_;
    sys.rows = rows_;
    return sys;
}

namespace {

void require_finite(const ResponseVector& u) {
    for (double v : u.values) {
        if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "response contains non-finite values");
    }
}

}  // namespace

ReducedSystem reduce(const Eigen::MatrixXd& F, const ResponseVector& u) {
    if (static_cast<std::size_t>(F.rows()) != u.size()) {
        throw Error(ErrorCode::DimensionMismatch, "design rows differ from response length");
    }
    if (!F.allFinite()) throw Error(ErrorCode::NonFiniteInput, "design matrix contains non-finite values");
    require_finite(u);
    LeastSquaresAccumulator acc(static_cast<int>(F.cols()));
    Eigen::VectorXd row(F.cols());
    for (Eigen::Index i = 0; i < F.rows(); ++i) {
        row = F.row(i).transpose();
        acc.add_row(row, u[static_cast<std::size_t>(i)]);
    }
    return acc.finish();
}

ReducedSystem reduce(const Basis& basis, const PathSample& sample, const ResponseVector& u) {
    if (sample.observations() != u.size()) {
        throw Error(ErrorCode::DimensionMismatch, "sample size differs from response length");
    }
    require_finite(u);
    LeastSquaresAccumulator acc(basis.dim());
    std::vector<double> buffer(static_cast<std::size_t>(basis.max_nonzeros()));
    std::size_t i = 0;
    for (const auto& path : sample.paths) {
        for (std::size_t k = 0; k < path.steps(); ++k, ++i) {
            const NonzeroBlock block = basis.eval_nonzero(path[k], buffer);
            acc.add_row(block.first, std::span<const double>(buffer.data(), static_cast<std::size_t>(block.count)),
                        u[i]);
        }
    }
    return acc.finish();
}

RidgeFit solve_ridge(const ReducedSystem& system, double L) {
    if (!(L > 0.0) || !std::isfinite(L)) throw Error(ErrorCode::InvalidArgument, "constraint level L must be > 0");
    const int m = system.dim();
    RidgeFit fit;
    fit.L = L;
    fit.radius_sq = m * L;

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(system.r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& d = svd.singularValues();
    const Eigen::VectorXd beta = svd.matrixU().transpose() * system.qtu;
    const Eigen::MatrixXd& V = svd.matrixV();

    const double d_max = d.size() > 0 ? d(0) : 0.0;
    int rank = 0;
    while (rank < d.size() && d(rank) > d_max * kRankTolerance && d(rank) > 0.0) ++rank;

    // Squared norm of a(lambda) = sum_i d_i beta_i / (d_i^2 + lambda) v_i.
    const auto norm_sq = [&](double lambda) {
        double acc = 0.0;
        for (int i = 0; i < rank; ++i) {
            const double t = d(i) * beta(i) / (d(i) * d(i) + lambda);
            acc += t * t;
        }
        return acc;
    };
    const auto coefficients = [&](double lambda) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
        for (int i = 0; i < rank; ++i) a += (d(i) * beta(i) / (d(i) * d(i) + lambda)) * V.col(i);
        return a;
    };

    const double target = fit.radius_sq;
    if (norm_sq(0.0) <= target) {
        fit.coeffs = coefficients(0.0);
        return fit;
    }

    // phi(lambda) = ||a(lambda)||^2 decreases strictly from phi(0) > target to 0.
    // Newton on psi = 1/sqrt(phi) - 1/sqrt(target), which is nearly linear,
    // safeguarded by the bracket [lo, hi].
    double sum_g2 = 0.0;
    for (int i = 0; i < rank; ++i) sum_g2 += d(i) * d(i) * beta(i) * beta(i);
    double lo = 0.0;
    double hi = std::sqrt(sum_g2 / target);
    double lambda = 0.0;
    const double inv_radius = 1.0 / std::sqrt(target);
    for (int iter = 0; iter < 500; ++iter) {
        double phi = 0.0;
        double dphi = 0.0;
        for (int i = 0; i < rank; ++i) {
            const double denom = d(i) * d(i) + lambda;
            const double g2 = d(i) * d(i) * beta(i) * beta(i);
            phi += g2 / (denom * denom);
            dphi -= 2.0 * g2 / (denom * denom * denom);
        }
        if (std::abs(phi - target) <= 1e-12 * target) break;
        if (phi > target) {
            lo = lambda;
        } else {
            hi = lambda;
        }
        if (hi - lo <= 1e-15 * hi) break;
        const double psi = 1.0 / std::sqrt(phi) - inv_radius;
        const double dpsi = -0.5 * dphi / (phi * std::sqrt(phi));
        double next = lambda - psi / dpsi;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        lambda = next;
    }
    fit.coeffs = coefficients(lambda);
    fit.lagrange = lambda;
    fit.active = lambda > 0.0;
    const double final_sq = fit.coeffs.squaredNorm();
    if (final_sq > target) fit.coeffs *= std::sqrt(target / final_sq);
    return fit;
}

RidgeFit fit_ridge(const Eigen::MatrixXd& F, const ResponseVector& u, int m, double L) {
    if (F.cols() != m) throw Error(ErrorCode::DimensionMismatch, "design columns differ from m");
    return solve_ridge(reduce(F, u), L);
}

double contrast(std::span<const double> h_values, const ResponseVector& u) {
    if (h_values.size() != u.size()) throw Error(ErrorCode::DimensionMismatch, "contrast inputs differ in length");
    if (u.size() == 0) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = u[i] - h_values[i];
        acc += r * r;
    }
    return acc / static_cast<double>(u.size());
}

EstimatorFn::EstimatorFn(BasisSpec spec, RidgeFit fit, bool truncated) : basis_(std::move(spec)), fit_(std::move(fit)) {
    if (fit_.coeffs.size() != basis_.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "coefficient count differs from basis dimension");
    }
    if (truncated) cap_ = std::sqrt(fit_.L);
}

double EstimatorFn::raw(double x) const {
    double buffer[64];
    std::vector<double> heap;
    std::span<double> buf(buffer, 64);
    if (basis_.max_nonzeros() > 64) {
        heap.resize(static_cast<std::size_t>(basis_.max_nonzeros()));
        buf = heap;
    }
    const NonzeroBlock block = basis_.eval_nonzero(x, buf);
    double acc = 0.0;
    for (int i = 0; i < block.count; ++i) acc += fit_.coeffs(block.first + i) * buf[static_cast<std::size_t>(i)];
    return acc;
}

double EstimatorFn::operator()(double x) const {
    const double v = raw(x);
    return cap_ && v > *cap_ ? *cap_ : v;
}

double evaluate(const EstimatorFn& est, double x) { return est(x); }

nlohmann::json to_json(const EstimatorFn& est) {
    const BasisSpec& b = est.basis();
    const RidgeFit& f = est.fit();
    nlohmann::json j;
    j["family"] = to_string(b.family);
    if (b.interval.unbounded) {
        j["interval"] = "R";
    } else {
        j["interval"] = {b.interval.lower, b.interval.upper};
    }
    j["m"] = b.dim();
    j["K"] = b.family == Family::BSpline ? b.K : 0;
    j["M"] = b.family == Family::BSpline ? b.M : 0;
    if (b.family == Family::Fourier) {
        j["fourier_scaling"] = b.scaling == FourierScaling::Orthonormal ? "orthonormal" : "literal";
    }
    j["L"] = f.L;
    j["coeffs"] = std::vector<double>(f.coeffs.data(), f.coeffs.data() + f.coeffs.size());
    j["lagrange"] = f.lagrange;
    j["active"] = f.active;
    j["truncated"] = est.cap().has_value();
    return j;
}

EstimatorFn estimator_from_json(const nlohmann::json& j) {
    try {
        const auto family = j.at("family").get<std::string>();
        Interval interval = Interval::real_line();
        if (!j.at("interval").is_string()) {
            interval = Interval::compact(j.at("interval").at(0).get<double>(), j.at("interval").at(1).get<double>());
        }
        BasisSpec spec;
        if (family == "bspline") {
            spec = BasisSpec::bspline(interval, j.at("K").get<int>(), j.at("M").get<int>());
        } else if (family == "fourier") {
            const auto scaling = j.value("fourier_scaling", std::string("orthonormal")) == "literal"
                                     ? FourierScaling::Literal
                                     : FourierScaling::Orthonormal;
            spec = BasisSpec::fourier(interval, j.at("m").get<int>(), scaling);
        } else if (family == "hermite") {
            spec = BasisSpec::hermite(j.at("m").get<int>());
        } else {
            throw Error(ErrorCode::InvalidBasis, "unknown family '" + family + "'");
        }
        RidgeFit fit;
        const auto coeffs = j.at("coeffs").get<std::vector<double>>();
        fit.coeffs = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
        fit.L = j.at("L").get<double>();
        fit.radius_sq = spec.dim() * fit.L;
        fit.lagrange = j.at("lagrange").get<double>();
        fit.active = j.at("active").get<bool>();
        return EstimatorFn(spec, fit, j.value("truncated", true));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed estimator JSON: ") + e.what());
    }
}

}  // namespace sigmaridge
