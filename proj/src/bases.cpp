#include "sigmaridge/bases.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sigmaridge/error.hpp"

namespace sigmaridge {

namespace {
constexpr int kMaxSplineDegree = 15;
}

Interval Interval::compact(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
        throw Error(ErrorCode::InvalidInterval, "compact interval needs finite a < b");
    }
    return Interval{a, b, false};
}

std::string Interval::describe() const {
    if (unbounded) return "R";
    std::ostringstream os;
    os.precision(10);
    os << "[" << lower << "," << upper << "]";
    return os.str();
}

std::string to_string(Family family) {
    switch (family) {
    case Family::BSpline: return "bspline";
    case Family::Fourier: return "fourier";
    case Family::Hermite: return "hermite";
    }
    return "?";
}

BasisSpec BasisSpec::bspline(Interval interval, int K, int M) {
    if (interval.unbounded) throw Error(ErrorCode::InvalidInterval, "splines need a compact interval");
    if (!(interval.lower < interval.upper)) throw Error(ErrorCode::InvalidInterval, "splines need a < b");
    if (K < 1 || M < 1) throw Error(ErrorCode::InvalidBasis, "splines need K >= 1 and M >= 1");
    if (M > kMaxSplineDegree) throw Error(ErrorCode::InvalidBasis, "spline degree M above supported maximum");
    BasisSpec s;
    s.family = Family::BSpline;
    s.interval = interval;
    s.K = K;
    s.M = M;
    return s;
}

BasisSpec BasisSpec::fourier(Interval interval, int m, FourierScaling scaling) {
    if (interval.unbounded) throw Error(ErrorCode::InvalidInterval, "the Fourier family needs a compact interval");
    if (!(interval.lower < interval.upper)) throw Error(ErrorCode::InvalidInterval, "the Fourier family needs a < b");
    if (m < 1 || m % 2 == 0) throw Error(ErrorCode::InvalidBasis, "the Fourier family needs odd m = 2d + 1");
    BasisSpec s;
    s.family = Family::Fourier;
    s.interval = interval;
    s.M = 0;
    s.m = m;
    s.scaling = scaling;
    return s;
}

BasisSpec BasisSpec::hermite(int m) {
    if (m < 1) throw Error(ErrorCode::InvalidBasis, "the Hermite family needs m >= 1");
    BasisSpec s;
    s.family = Family::Hermite;
    s.interval = Interval::real_line();
    s.M = 0;
    s.m = m;
    return s;
}

BasisSpec BasisSpec::with_size(int size) const {
    return BasisFamily{family, interval, M, scaling}.with_size(size);
}

BasisSpec BasisFamily::with_size(int size) const {
    switch (family) {
    case Family::BSpline: return BasisSpec::bspline(interval, size, M);
    case Family::Fourier: return BasisSpec::fourier(interval, size, scaling);
    case Family::Hermite: return BasisSpec::hermite(size);
    }
    throw Error(ErrorCode::InvalidBasis, "unknown family");
}

KnotVector make_knots(double a, double b, int K, int M) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
        throw Error(ErrorCode::InvalidInterval, "knot vector needs finite a < b");
    }
    if (K < 1 || M < 1) throw Error(ErrorCode::InvalidBasis, "knot vector needs K >= 1 and M >= 1");
    KnotVector kv;
    kv.K = K;
    kv.M = M;
    kv.u.resize(static_cast<std::size_t>(K + 2 * M + 1));
    const double h = (b - a) / K;
    for (int i = -M; i <= K + M; ++i) {
        double value;
        if (i <= 0) {
            value = a;
        } else if (i >= K) {
            value = b;
        } else {
            value = a + i * h;
        }
        kv.u[static_cast<std::size_t>(i + M)] = value;
    }
    return kv;
}

Basis::Basis(BasisSpec spec) : spec_(std::move(spec)) {
    if (spec_.family == Family::BSpline) {
        knots_ = make_knots(spec_.interval.lower, spec_.interval.upper, spec_.K, spec_.M);
    }
}

int Basis::max_nonzeros() const noexcept {
    return spec_.family == Family::BSpline ? spec_.M + 1 : spec_.m;
}

NonzeroBlock Basis::eval_spline(double x, std::span<double> N) const {
    const double a = spec_.interval.lower;
    const double b = spec_.interval.upper;
    if (!(x >= a && x <= b)) return {0, 0};

    const int K = spec_.K;
    const int p = spec_.M;
    // Knot interval [u_idx, u_{idx+1}); x = b falls in the last interval.
    int idx = static_cast<int>(std::floor((x - a) / (b - a) * K));
    idx = std::clamp(idx, 0, K - 1);
    while (idx > 0 && x < knots_.at(idx)) --idx;
    while (idx < K - 1 && x >= knots_.at(idx + 1)) ++idx;

    // Cox-de Boor triangle for the p + 1 functions that are non-zero on the
    // interval; B_{idx-M}, ..., B_{idx} in the -M-based indexing.
    double left[16];
    double right[16];
    N[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - knots_.at(idx + 1 - j);
        right[j] = knots_.at(idx + j) - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double temp = N[static_cast<std::size_t>(r)] / (right[r + 1] + left[j - r]);
            N[static_cast<std::size_t>(r)] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        N[static_cast<std::size_t>(j)] = saved;
    }
    return {idx, p + 1};
}

void Basis::eval_fourier(double x, std::span<double> out) const {
    const double a = spec_.interval.lower;
    const double width = spec_.interval.width();
    if (!(x >= a && x <= spec_.interval.upper)) {
        std::fill(out.begin(), out.begin() + spec_.m, 0.0);
        return;
    }
    const double scale =
        spec_.scaling == FourierScaling::Orthonormal ? 1.0 / std::sqrt(width) : 1.0 / width;
    const double t = (x - a) / width;
    out[0] = scale;
    const int d = (spec_.m - 1) / 2;
    for (int j = 1; j <= d; ++j) {
        const double angle = 2.0 * std::numbers::pi * j * t;
        out[static_cast<std::size_t>(2 * j - 1)] = scale * std::numbers::sqrt2 * std::cos(angle);
        out[static_cast<std::size_t>(2 * j)] = scale * std::numbers::sqrt2 * std::sin(angle);
    }
}

void Basis::eval_hermite(double x, std::span<double> out) const {
    // Orthonormal recurrence; never forms H_j or j! explicitly.
    const double h0 = std::exp(-0.5 * x * x) / std::sqrt(std::sqrt(std::numbers::pi));
    out[0] = h0;
    if (spec_.m == 1) return;
    out[1] = std::numbers::sqrt2 * x * h0;
    for (int j = 1; j + 1 < spec_.m; ++j) {
        const auto jj = static_cast<double>(j);
        out[static_cast<std::size_t>(j + 1)] = x * std::sqrt(2.0 / (jj + 1.0)) * out[static_cast<std::size_t>(j)] -
                                               std::sqrt(jj / (jj + 1.0)) * out[static_cast<std::size_t>(j - 1)];
    }
}

NonzeroBlock Basis::eval_nonzero(double x, std::span<double> buffer) const {
    switch (spec_.family) {
    case Family::BSpline:
        return eval_spline(x, buffer);
    case Family::Fourier:
        eval_fourier(x, buffer);
        return {0, spec_.m};
    case Family::Hermite:
        eval_hermite(x, buffer);
        return {0, spec_.m};
    }
    return {0, 0};
}

void Basis::eval(double x, std::span<double> out) const {
    if (spec_.family != Family::BSpline) {
        eval_nonzero(x, out);
        return;
    }
    std::fill(out.begin(), out.begin() + dim(), 0.0);
    double buffer[16];
    const NonzeroBlock block = eval_spline(x, std::span<double>(buffer, 16));
    for (int i = 0; i < block.count; ++i) out[static_cast<std::size_t>(block.first + i)] = buffer[i];
}

Eigen::VectorXd Basis::eval(double x) const {
    Eigen::VectorXd out(dim());
    eval(x, std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
    return out;
}

Eigen::VectorXd eval_basis(const BasisSpec& spec, double x) { return Basis(spec).eval(x); }

Eigen::MatrixXd design_matrix(const BasisSpec& spec, const PathSample& sample) {
    const Basis basis(spec);
    const auto n = sample.steps();
    Eigen::MatrixXd F(static_cast<Eigen::Index>(sample.observations()), basis.dim());
    Eigen::VectorXd row(basis.dim());
    Eigen::Index r = 0;
    for (const auto& path : sample.paths) {
        for (std::size_t k = 0; k < n; ++k, ++r) {
            basis.eval(path[k], std::span<double>(row.data(), static_cast<std::size_t>(row.size())));
            F.row(r) = row.transpose();
        }
    }
    return F;
}

std::vector<int> dyadic_grid(int q_max) {
    if (q_max < 0 || q_max > 20) throw Error(ErrorCode::InvalidArgument, "q_max must lie in [0, 20]");
    std::vector<int> grid;
    for (int q = 0; q <= q_max; ++q) grid.push_back(1 << q);
    return grid;
}

std::vector<int> consecutive_grid(int m_max) {
    if (m_max < 1) throw Error(ErrorCode::InvalidArgument, "m_max must be >= 1");
    std::vector<int> grid;
    for (int m = 1; m <= m_max; ++m) grid.push_back(m);
    return grid;
}

std::vector<int> odd_grid(int m_max) {
    if (m_max < 1) throw Error(ErrorCode::InvalidArgument, "m_max must be >= 1");
    std::vector<int> grid;
    for (int m = 1; m <= m_max; m += 2) grid.push_back(m);
    return grid;
}

std::vector<int> theory_strict_grid(const std::vector<int>& grid, int N, int n, int M) {
    const double bound = std::sqrt(static_cast<double>(std::min(n, N))) / std::log(static_cast<double>(N) * n);
    std::vector<int> kept;
    for (int K : grid) {
        if (K + M <= bound) kept.push_back(K);
    }
    return kept;
}

}  // namespace sigmaridge
