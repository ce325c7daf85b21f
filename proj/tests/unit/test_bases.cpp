#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sigmaridge/bases.hpp"
#include "sigmaridge/error.hpp"

using namespace sigmaridge;

TEST(Knots, OneInteriorKnot) {
    const KnotVector k = make_knots(-1.0, 1.0, 2, 3);
    const std::vector<double> expected{-1, -1, -1, -1, 0, 1, 1, 1, 1};
    EXPECT_EQ(k.u, expected);
    EXPECT_EQ(k.at(-3), -1.0);
    EXPECT_EQ(k.at(5), 1.0);
}

TEST(Knots, NoInteriorKnots) {
    const std::vector<double> expected{-1, -1, 1, 1};
    EXPECT_EQ(make_knots(-1.0, 1.0, 1, 1).u, expected);
}

TEST(Knots, EqualSpacing) {
    const KnotVector k = make_knots(0.0, 4.0, 4, 2);
    ASSERT_EQ(k.u.size(), 4u + 2 * 2 + 1);
    EXPECT_DOUBLE_EQ(k.at(1), 1.0);
    EXPECT_DOUBLE_EQ(k.at(2), 2.0);
    EXPECT_DOUBLE_EQ(k.at(3), 3.0);
    for (std::size_t i = 1; i < k.u.size(); ++i) EXPECT_LE(k.u[i - 1], k.u[i]);
}

TEST(Knots, RejectsBadInterval) {
    try {
        make_knots(1.0, 1.0, 2, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidInterval);
    }
    EXPECT_THROW(make_knots(-1.0, 1.0, 0, 3), Error);
}

TEST(BasisSpec, Validation) {
    EXPECT_THROW(BasisSpec::bspline(Interval::real_line(), 4), Error);
    EXPECT_THROW(BasisSpec::fourier(Interval::compact(0, 1), 4), Error);
    EXPECT_THROW(BasisSpec::fourier(Interval::real_line(), 3), Error);
    EXPECT_THROW(BasisSpec::hermite(0), Error);
    EXPECT_THROW(Interval::compact(2.0, 1.0), Error);
    EXPECT_EQ(BasisSpec::bspline(Interval::compact(-1, 1), 4).dim(), 7);
    EXPECT_EQ(BasisSpec::fourier(Interval::compact(-1, 1), 5).dim(), 5);
}

TEST(BSpline, PartitionOfUnityAtZero) {
    const Eigen::VectorXd v = eval_basis(BasisSpec::bspline(Interval::compact(-1, 1), 4, 3), 0.0);
    EXPECT_NEAR(v.sum(), 1.0, 1e-15);
    for (double e : v) {
        EXPECT_GE(e, 0.0);
        EXPECT_LE(e, 1.0);
    }
}

TEST(BSpline, MatchesCoxDeBoorDefinition) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const int K = 1 + static_cast<int>(rng() % 9);
        const int M = 1 + static_cast<int>(rng() % 5);
        const double a = std::uniform_real_distribution<>(-3, 0)(rng);
        const double b = a + std::uniform_real_distribution<>(0.5, 4)(rng);
        const BasisSpec spec = BasisSpec::bspline(Interval::compact(a, b), K, M);
        const KnotVector knots = make_knots(a, b, K, M);
        for (double x : {a, b, std::uniform_real_distribution<>(a, b)(rng)}) {
            const Eigen::VectorXd v = eval_basis(spec, x);
            for (int l = 0; l < spec.dim(); ++l) {
                EXPECT_NEAR(v(l), oracle::bspline_naive(knots.u, l, M, x, b), 1e-12)
                    << "K=" << K << " M=" << M << " l=" << l << " x=" << x;
            }
        }
    }
}

TEST(BSpline, PartitionOfUnityProperty) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10000; ++trial) {
        const int K = 1 + static_cast<int>(rng() % 32);
        const int M = 1 + static_cast<int>(rng() % 6);
        const BasisSpec spec = BasisSpec::bspline(Interval::compact(-1.5, 2.0), K, M);
        const double x = std::uniform_real_distribution<>(-1.5, 2.0)(rng);
        EXPECT_LT(std::abs(eval_basis(spec, x).sum() - 1.0), 1e-12);
    }
}

TEST(BSpline, RightEndpointIncluded) {
    const BasisSpec spec = BasisSpec::bspline(Interval::compact(-1, 1), 8, 3);
    const Eigen::VectorXd v = eval_basis(spec, 1.0);
    EXPECT_NEAR(v.sum(), 1.0, 1e-15);
    EXPECT_NEAR(v(spec.dim() - 1), 1.0, 1e-15);
}

TEST(BSpline, ZeroOutsideInterval) {
    const BasisSpec spec = BasisSpec::bspline(Interval::compact(-1, 1), 4, 3);
    EXPECT_EQ(eval_basis(spec, 1.0 + 1e-12).squaredNorm(), 0.0);
    EXPECT_EQ(eval_basis(spec, -7.0).squaredNorm(), 0.0);
}

TEST(BSpline, SupportAndSparsity) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 2000; ++trial) {
        const int K = 1 + static_cast<int>(rng() % 16);
        const int M = 1 + static_cast<int>(rng() % 6);
        const BasisSpec spec = BasisSpec::bspline(Interval::compact(0, 1), K, M);
        const Basis basis(spec);
        const double x = std::uniform_real_distribution<>(0, 1)(rng);
        const Eigen::VectorXd v = basis.eval(x);
        int nonzero = 0;
        for (int l = 0; l < spec.dim(); ++l) {
            if (v(l) != 0.0) {
                ++nonzero;
                EXPECT_GE(x, basis.knots().u[static_cast<std::size_t>(l)]);
                EXPECT_LE(x, basis.knots().u[static_cast<std::size_t>(l + M + 1)]);
            }
        }
        EXPECT_LE(nonzero, M + 1);
        std::vector<double> buf(static_cast<std::size_t>(basis.max_nonzeros()));
        const NonzeroBlock blk = basis.eval_nonzero(x, buf);
        EXPECT_LE(blk.count, M + 1);
        for (int i = 0; i < blk.count; ++i) EXPECT_EQ(buf[static_cast<std::size_t>(i)], v(blk.first + i));
    }
}

TEST(BSpline, NestedSpaces) {
    // Every element of the K space is a combination of the 2K space.
    for (int K : {1, 2, 4, 8}) {
        const BasisSpec coarse = BasisSpec::bspline(Interval::compact(-1, 1), K, 3);
        const BasisSpec fine = BasisSpec::bspline(Interval::compact(-1, 1), 2 * K, 3);
        const int pts = 400;
        Eigen::MatrixXd A(pts, fine.dim());
        Eigen::MatrixXd B(pts, coarse.dim());
        for (int i = 0; i < pts; ++i) {
            const double x = -1.0 + 2.0 * i / (pts - 1);
            A.row(i) = eval_basis(fine, x).transpose();
            B.row(i) = eval_basis(coarse, x).transpose();
        }
        const Eigen::MatrixXd C = A.colPivHouseholderQr().solve(B);
        EXPECT_LT((A * C - B).cwiseAbs().maxCoeff(), 1e-10) << "K=" << K;
    }
}

TEST(Fourier, UnitIntervalAtZero) {
    const Eigen::VectorXd v = eval_basis(BasisSpec::fourier(Interval::compact(0, 1), 3), 0.0);
    EXPECT_NEAR(v(0), 1.0, 1e-15);
    EXPECT_NEAR(v(1), std::numbers::sqrt2, 1e-15);
    EXPECT_NEAR(v(2), 0.0, 1e-15);
}

TEST(Fourier, LiteralScaling) {
    const BasisSpec spec = BasisSpec::fourier(Interval::compact(-1, 1), 3, FourierScaling::Literal);
    EXPECT_NEAR(eval_basis(spec, -1.0)(0), 0.5, 1e-15);
    const BasisSpec ortho = BasisSpec::fourier(Interval::compact(-1, 1), 3);
    EXPECT_NEAR(eval_basis(ortho, -1.0)(0), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Fourier, QuadratureOrthonormality) {
    for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{-1.0, 1.0}, std::pair{-3.0, 7.5}}) {
        const BasisSpec spec = BasisSpec::fourier(Interval::compact(a, b), 21);
        const int pts = 256;
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(spec.dim(), spec.dim());
        for (int i = 0; i < pts; ++i) {
            const Eigen::VectorXd v = eval_basis(spec, a + (b - a) * i / pts);
            G += v * v.transpose() * (b - a) / pts;
        }
        EXPECT_LT((G - Eigen::MatrixXd::Identity(spec.dim(), spec.dim())).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(Fourier, ZeroOutsideInterval) {
    EXPECT_EQ(eval_basis(BasisSpec::fourier(Interval::compact(0, 1), 5), 1.5).squaredNorm(), 0.0);
}

TEST(Hermite, FirstFunctionAtZero) {
    EXPECT_NEAR(eval_basis(BasisSpec::hermite(1), 0.0)(0), std::pow(std::numbers::pi, -0.25), 1e-15);
    EXPECT_NEAR(std::pow(std::numbers::pi, -0.25), 0.75112554, 1e-8);
}

TEST(Hermite, MatchesRawPolynomialForm) {
    const BasisSpec spec = BasisSpec::hermite(30);
    for (double x : {-6.0, -2.5, -0.3, 0.0, 0.7, 1.9, 4.4, 8.0}) {
        const Eigen::VectorXd v = eval_basis(spec, x);
        for (int j = 0; j < 30; ++j) {
            const double ref = oracle::hermite_function(j, x);
            EXPECT_NEAR(v(j), ref, 1e-12 * std::max(1.0, std::abs(ref))) << "j=" << j << " x=" << x;
        }
    }
}

TEST(Hermite, GaussHermiteOrthonormality) {
    const oracle::Quadrature q = oracle::gauss_hermite(128);
    const BasisSpec spec = BasisSpec::hermite(20);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(20, 20);
    for (std::size_t k = 0; k < q.nodes.size(); ++k) {
        const double x = q.nodes[k];
        // h_i h_j = e^{-x^2} * polynomial; the rule integrates polynomial * e^{-x^2}.
        const Eigen::VectorXd v = eval_basis(spec, x) * std::exp(0.5 * x * x);
        G += q.weights[k] * std::exp(-x * x) * (v * v.transpose());
    }
    EXPECT_LT((G - Eigen::MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Hermite, DecayBeyondTurningRegion) {
    // Bound of the form c|x|exp(-c0 x^2) for x^2 >= (3/2)(4j+3), with c = 1, c0 = 1/5.
    for (int j = 0; j < 40; ++j) {
        const BasisSpec spec = BasisSpec::hermite(j + 1);
        const double x0 = std::sqrt(1.5 * (4 * j + 3));
        for (double x = x0; x < x0 + 30.0; x += 0.05) {
            for (double s : {-1.0, 1.0}) {
                const double h = std::abs(eval_basis(spec, s * x)(j));
                EXPECT_LE(h, x * std::exp(-0.2 * x * x)) << "j=" << j << " x=" << s * x;
            }
        }
    }
}

TEST(Hermite, TinyAtDoubledThreshold) {
    // Below 1e-10 from x^2 >= 3(4j+3) once j >= 5; for smaller j the value at
    // the threshold is larger (h_0(3) ~ 8e-3).
    EXPECT_GT(std::abs(eval_basis(BasisSpec::hermite(1), 3.0)(0)), 1e-3);
    for (int j = 5; j < 40; ++j) {
        const BasisSpec spec = BasisSpec::hermite(j + 1);
        const double x0 = std::sqrt(3.0 * (4 * j + 3));
        for (double x = x0; x < x0 + 20.0; x += 0.1) EXPECT_LT(std::abs(eval_basis(spec, x)(j)), 1e-10);
    }
}

TEST(Hermite, NoOverflowFarOut) {
    const Eigen::VectorXd v = eval_basis(BasisSpec::hermite(60), 60.0);
    EXPECT_TRUE(v.allFinite());
    EXPECT_EQ(v.cwiseAbs().maxCoeff(), 0.0);
}

TEST(DesignMatrix, ShapeAndRows) {
    std::vector<DiffusionPath> paths;
    for (int j = 0; j < 10; ++j) {
        std::vector<double> v(101);
        for (int k = 0; k <= 100; ++k) v[k] = std::sin(0.1 * k + j) * 0.9;
        paths.emplace_back(v);
    }
    const PathSample s(paths, 0);
    const BasisSpec spec = BasisSpec::bspline(Interval::compact(-1, 1), 4);
    const Eigen::MatrixXd F = design_matrix(spec, s);
    ASSERT_EQ(F.rows(), 1000);
    ASSERT_EQ(F.cols(), 7);
    for (int r = 0; r < F.rows(); ++r) EXPECT_NEAR(F.row(r).sum(), 1.0, 1e-12);
    EXPECT_EQ(F.row(3 * 100 + 7).transpose(), eval_basis(spec, s.paths[3][7]));
}

TEST(DesignMatrix, SinglePointSingleRow) {
    const PathSample s({DiffusionPath({0.25, 9.0})}, 0);
    const BasisSpec spec = BasisSpec::fourier(Interval::compact(-1, 1), 5);
    const Eigen::MatrixXd F = design_matrix(spec, s);
    ASSERT_EQ(F.rows(), 1);
    EXPECT_EQ(F.row(0).transpose(), eval_basis(spec, 0.25));
}

TEST(Grids, Shapes) {
    EXPECT_EQ(dyadic_grid(5), (std::vector<int>{1, 2, 4, 8, 16, 32}));
    EXPECT_EQ(consecutive_grid(3), (std::vector<int>{1, 2, 3}));
    EXPECT_EQ(odd_grid(7), (std::vector<int>{1, 3, 5, 7}));
}

TEST(Grids, TheoryStrictBound) {
    // K + 3 <= sqrt(min(n, N)) / log(N n).
    const std::vector<int> g = theory_strict_grid(dyadic_grid(10), 100000, 100000, 3);
    const double bound = std::sqrt(1e5) / std::log(1e10);
    for (int K : g) EXPECT_LE(K + 3, bound);
    EXPECT_FALSE(g.empty());
}
