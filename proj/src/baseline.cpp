#include "sigmaridge/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "sigmaridge/error.hpp"

namespace sigmaridge {

namespace {

constexpr double kUnderflow = 1e-300;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

}  // namespace

double scott_bandwidth(const DiffusionPath& path) {
    const auto& v = path.values();
    if (path.steps() < 2) throw Error(ErrorCode::InvalidArgument, "Scott bandwidth needs n >= 2");
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (*lo == *hi) throw Error(ErrorCode::DegeneratePath, "path has zero spread; bandwidth undefined");
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    if (!(sd > 0.0)) throw Error(ErrorCode::DegeneratePath, "path has zero spread; bandwidth undefined");
    return sd * std::pow(static_cast<double>(path.steps()), -0.2);
}

NwEstimator::NwEstimator(const DiffusionPath& path, const KernelSpec& spec) : spec_(spec) {
    h_ = spec.bandwidth ? *spec.bandwidth : scott_bandwidth(path);
    if (!(h_ > 0.0) || !std::isfinite(h_)) throw Error(ErrorCode::InvalidArgument, "bandwidth must be positive");
    if (!(spec.cutoff > 0.0)) throw Error(ErrorCode::InvalidArgument, "kernel cutoff must be positive");

    const std::size_t n = path.steps();
    const double nd = static_cast<double>(n);
    if (spec.mode == NwMode::Literal) {
        for (std::size_t k = 1; k + 1 <= n; ++k) {
            const double d = path[k + 1] - path[k];
            numerator_.push_back({path[k], d * d / nd});
        }
        for (std::size_t k = 1; k <= n; ++k) denominator_.push_back({path[k], 1.0});
    } else {
        for (std::size_t k = 0; k < n; ++k) {
            const double d = path[k + 1] - path[k];
            numerator_.push_back({path[k], d * d * nd});
            denominator_.push_back({path[k], 1.0});
        }
    }
    const auto by_state = [](const Term& a, const Term& b) { return a.state < b.state; };
    std::stable_sort(numerator_.begin(), numerator_.end(), by_state);
    std::stable_sort(denominator_.begin(), denominator_.end(), by_state);
}

double NwEstimator::window_sum(const std::vector<Term>& terms, double x) const {
    const double lo = x - spec_.cutoff * h_;
    const double hi = x + spec_.cutoff * h_;
    auto it = std::lower_bound(terms.begin(), terms.end(), lo, [](const Term& t, double v) { return t.state < v; });
    const double scale = spec_.normalized ? kInvSqrt2Pi : 1.0;
    double acc = 0.0;
    for (; it != terms.end() && it->state <= hi; ++it) {
        const double u = (it->state - x) / h_;
        acc += it->weight * scale * std::exp(-0.5 * u * u);
    }
    return acc;
}

NwValue NwEstimator::eval(double x) const {
    const double den = window_sum(denominator_, x);
    if (!(den >= kUnderflow)) return {0.0, true};
    return {window_sum(numerator_, x) / den, false};
}

NwValue nw_estimate(const DiffusionPath& path, double x, const KernelSpec& spec) {
    return NwEstimator(path, spec).eval(x);
}

}  // namespace sigmaridge
