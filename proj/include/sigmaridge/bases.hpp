#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sigmaridge/sde_sim.hpp"

namespace sigmaridge {

/// Estimation interval: a compact [lower, upper] or the whole real line.
struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    bool unbounded = false;

    static Interval compact(double a, double b);
    static Interval real_line() { return Interval{0.0, 0.0, true}; }

    bool contains(double x) const noexcept { return unbounded || (x >= lower && x <= upper); }
    double width() const noexcept { return upper - lower; }
    std::string describe() const;
};

enum class Family { BSpline, Fourier, Hermite };

std::string to_string(Family family);

/// How the unit-interval Fourier system is carried to [a, b]:
/// Orthonormal multiplies by (b - a)^{-1/2}, Literal by (b - a)^{-1}.
enum class FourierScaling { Orthonormal, Literal };

/// Family, interval and size of an approximation space.
/// For splines the size parameter is the number of knot intervals K and the
/// dimension is K + M; for the other families the size parameter is m itself.
struct BasisSpec {
    Family family = Family::BSpline;
    Interval interval;
    int K = 0;
    int M = 3;
    int m = 0;
    FourierScaling scaling = FourierScaling::Orthonormal;

    static BasisSpec bspline(Interval interval, int K, int M = 3);
    static BasisSpec fourier(Interval interval, int m, FourierScaling scaling = FourierScaling::Orthonormal);
    static BasisSpec hermite(int m);

    int dim() const noexcept { return family == Family::BSpline ? K + M : m; }
    int size_parameter() const noexcept { return family == Family::BSpline ? K : m; }
    /// Same family and interval with a different size parameter (validated).
    BasisSpec with_size(int size) const;
};

/// A family on a fixed interval, without a size: the object a dimension
/// grid is searched over.
struct BasisFamily {
    Family family = Family::BSpline;
    Interval interval;
    int M = 3;
    FourierScaling scaling = FourierScaling::Orthonormal;

    BasisSpec with_size(int size) const;
};

/// Clamped knot vector u_{-M}, ..., u_{K+M} with M + 1 copies of each
/// endpoint and K equal interior intervals.
struct KnotVector {
    std::vector<double> u;
    int K = 0;
    int M = 0;

    /// Knot u_i for i in [-M, K + M].
    double at(int i) const { return u[static_cast<std::size_t>(i + M)]; }
};

KnotVector make_knots(double a, double b, int K, int M);

/// Position of a basis row's non-zero block: values for indices
/// first, ..., first + count - 1 are in the caller's buffer.
struct NonzeroBlock {
    int first = 0;
    int count = 0;
};

/// Evaluator for a BasisSpec. Immutable after construction and safe to share
/// across threads.
class Basis {
public:
    explicit Basis(BasisSpec spec);

    const BasisSpec& spec() const noexcept { return spec_; }
    int dim() const noexcept { return spec_.dim(); }
    /// Buffer size needed by eval_nonzero: M + 1 for splines, m otherwise.
    int max_nonzeros() const noexcept;
    const KnotVector& knots() const noexcept { return knots_; }

    NonzeroBlock eval_nonzero(double x, std::span<double> buffer) const;
    void eval(double x, std::span<double> out) const;
    Eigen::VectorXd eval(double x) const;

private:
    NonzeroBlock eval_spline(double x, std::span<double> buffer) const;
    void eval_fourier(double x, std::span<double> out) const;
    void eval_hermite(double x, std::span<double> out) const;

    BasisSpec spec_;
    KnotVector knots_;
};

Eigen::VectorXd eval_basis(const BasisSpec& spec, double x);

/// Rows ordered path-major: row j*n + k holds phi(X^j_k) for k = 0..n-1.
Eigen::MatrixXd design_matrix(const BasisSpec& spec, const PathSample& sample);

/// Nested spline sizes {2^q : q = 0..q_max}.
std::vector<int> dyadic_grid(int q_max);

/// Sizes 1..m_max, for the Hermite family (nested by construction).
std::vector<int> consecutive_grid(int m_max);

/// Sizes 1, 3, ..., m_max (odd), for the Fourier family.
std::vector<int> odd_grid(int m_max);

/// Sizes allowed by the repeated-path risk bound: K + M <= sqrt(min(n, N)) / log(N n).
std::vector<int> theory_strict_grid(const std::vector<int>& grid, int N, int n, int M);

}  // namespace sigmaridge
