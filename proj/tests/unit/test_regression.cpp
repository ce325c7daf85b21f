#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "sigmaridge/error.hpp"
#include "sigmaridge/regression.hpp"
#include "sigmaridge/rng.hpp"

using namespace sigmaridge;

namespace {

ResponseVector response_of(std::vector<double> v) { return ResponseVector{std::move(v)}; }

double objective(const Eigen::MatrixXd& F, const Eigen::VectorXd& u, const Eigen::VectorXd& a) {
    return (u - F * a).squaredNorm();
}

Eigen::VectorXd to_vec(const ResponseVector& u) {
    return Eigen::Map<const Eigen::VectorXd>(u.values.data(), static_cast<Eigen::Index>(u.size()));
}

}  // namespace

TEST(Response, ConstantPathGivesZeros) {
    const PathSample s({DiffusionPath(std::vector<double>(11, 0.0))}, 0);
    const ResponseVector u = build_response(s);
    ASSERT_EQ(u.size(), 10u);
    for (double v : u.values) EXPECT_EQ(v, 0.0);
}

TEST(Response, SingleStep) {
    const PathSample s({DiffusionPath({0.0, 0.1})}, 0);
    const ResponseVector u = build_response(s);
    ASSERT_EQ(u.size(), 1u);
    EXPECT_NEAR(u[0], 0.01, 1e-17);
}

TEST(Response, ScaledByStepAndOrderedPathMajor) {
    const PathSample s({DiffusionPath({0.0, 1.0, 3.0}), DiffusionPath({0.0, -1.0, -1.5})}, 0);
    const ResponseVector u = build_response(s);
    const std::vector<double> expected{2.0, 8.0, 2.0, 0.5};
    EXPECT_EQ(u.values, expected);
}

TEST(Response, OrnsteinUhlenbeckMean) {
    const PathSample s = simulate_sample(builtin_model(ModelId::M1), 100, 100, 10, 9);
    const ResponseVector u = build_response(s);
    EXPECT_NEAR(std::accumulate(u.values.begin(), u.values.end(), 0.0) / static_cast<double>(u.size()), 1.0, 0.05);
    for (double v : u.values) EXPECT_GE(v, 0.0);
}

TEST(FitRidge, InteriorSolution) {
    const RidgeFit f = fit_ridge(Eigen::MatrixXd::Identity(2, 2), response_of({0.5, 0.5}), 2, 2.0);
    EXPECT_NEAR(f.coeffs(0), 0.5, 1e-14);
    EXPECT_NEAR(f.coeffs(1), 0.5, 1e-14);
    EXPECT_EQ(f.lagrange, 0.0);
    EXPECT_FALSE(f.active);
    EXPECT_DOUBLE_EQ(f.radius_sq, 4.0);
}

TEST(FitRidge, RadialProjection) {
    // Orthonormal design: the solution is the projection of u onto the ball.
    const RidgeFit f = fit_ridge(Eigen::MatrixXd::Identity(2, 2), response_of({3.0, 4.0}), 2, 2.0);
    EXPECT_NEAR(f.coeffs(0), 1.2, 1e-9);
    EXPECT_NEAR(f.coeffs(1), 1.6, 1e-9);
    EXPECT_TRUE(f.active);
    EXPECT_GT(f.lagrange, 0.0);
    EXPECT_NEAR(f.lagrange, 1.5, 1e-8);  // a = u / (1 + lambda), |u| = 5, radius 2
}

TEST(FitRidge, RankDeficientMatchesPseudoInverse) {
    std::mt19937_64 rng(4);
    std::normal_distribution<> z;
    Eigen::MatrixXd F(30, 4);
    for (int i = 0; i < 30; ++i) {
        F(i, 0) = z(rng);
        F(i, 1) = z(rng);
        F(i, 2) = F(i, 1);
        F(i, 3) = z(rng);
    }
    std::vector<double> uv(30);
    for (double& v : uv) v = z(rng);
    const ResponseVector u = response_of(uv);
    const RidgeFit f = fit_ridge(F, u, 4, 1e6);
    EXPECT_FALSE(f.active);
    const Eigen::VectorXd pinv = F.completeOrthogonalDecomposition().solve(to_vec(u));
    EXPECT_NEAR(objective(F, to_vec(u), f.coeffs), objective(F, to_vec(u), pinv), 1e-10);
    EXPECT_LT((f.coeffs - pinv).norm(), 1e-10);
    EXPECT_NEAR(f.coeffs(1), f.coeffs(2), 1e-12);
}

TEST(FitRidge, DimensionAndFiniteness) {
    try {
        fit_ridge(Eigen::MatrixXd::Identity(3, 2), response_of({1, 2}), 2, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
    EXPECT_THROW(fit_ridge(Eigen::MatrixXd::Identity(2, 2), response_of({1, 2}), 3, 1.0), Error);
    try {
        fit_ridge(Eigen::MatrixXd::Identity(2, 2), response_of({1, NAN}), 2, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonFiniteInput);
    }
    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
    bad(0, 1) = INFINITY;
    EXPECT_THROW(fit_ridge(bad, response_of({1, 2}), 2, 1.0), Error);
    EXPECT_THROW(fit_ridge(Eigen::MatrixXd::Identity(2, 2), response_of({1, 2}), 2, 0.0), Error);
}

TEST(FitRidge, KktInvariantsRandom) {
    std::mt19937_64 rng(123);
    std::normal_distribution<> z;
    for (int trial = 0; trial < 2000; ++trial) {
        const int m = 1 + static_cast<int>(rng() % 8);
        const int rows = 1 + static_cast<int>(rng() % 40);
        Eigen::MatrixXd F(rows, m);
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < m; ++j) F(i, j) = z(rng);
        }
        if (trial % 5 == 0 && m > 1) F.col(m - 1) = F.col(0);
        std::vector<double> uv(static_cast<std::size_t>(rows));
        for (double& v : uv) v = 3.0 * z(rng);
        const double L = std::exp(std::uniform_real_distribution<>(-6, 3)(rng));
        const RidgeFit f = fit_ridge(F, response_of(uv), m, L);
        const double norm_sq = f.coeffs.squaredNorm();
        ASSERT_LE(norm_sq, m * L * (1 + 1e-8));
        ASSERT_EQ(f.active, f.lagrange > 0.0);
        if (f.active) {
            ASSERT_LE(std::abs(norm_sq - m * L), 1e-6 * m * L);
        } else {
            const Eigen::VectorXd g = F.transpose() * (F * f.coeffs - to_vec(response_of(uv)));
            const double scale = (F.transpose() * to_vec(response_of(uv))).norm() + 1e-300;
            ASSERT_LT(g.norm() / scale, 1e-8);
        }
    }
}

TEST(FitRidge, BeatsRandomFeasiblePoints) {
    std::mt19937_64 rng(99);
    std::normal_distribution<> z;
    Eigen::MatrixXd F(50, 5);
    for (int i = 0; i < 50; ++i) {
        for (int j = 0; j < 5; ++j) F(i, j) = z(rng);
    }
    std::vector<double> uv(50);
    for (double& v : uv) v = 2.0 + z(rng);
    const ResponseVector u = response_of(uv);
    const double L = 0.05;
    const RidgeFit f = fit_ridge(F, u, 5, L);
    const Eigen::VectorXd h = F * f.coeffs;
    const double best = contrast(std::span<const double>(h.data(), 50), u);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd a(5);
        for (int j = 0; j < 5; ++j) a(j) = z(rng);
        a *= std::sqrt(5 * L) * std::pow(std::uniform_real_distribution<>(0, 1)(rng), 0.2) / a.norm();
        const Eigen::VectorXd ha = F * a;
        EXPECT_LE(best, contrast(std::span<const double>(ha.data(), 50), u) + 1e-12);
    }
}

TEST(FitRidge, BruteForceOverTheBall) {
    std::mt19937_64 rng(2718);
    std::normal_distribution<> z;
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 1 + trial % 3;
        const int rows = m + static_cast<int>(rng() % (21 - m));
        Eigen::MatrixXd F(rows, m);
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < m; ++j) F(i, j) = z(rng);
        }
        std::vector<double> uv(static_cast<std::size_t>(rows));
        for (double& v : uv) v = 1.0 + z(rng);
        const double L = std::uniform_real_distribution<>(0.05, 0.4)(rng);
        const RidgeFit f = fit_ridge(F, response_of(uv), m, L);
        const Eigen::VectorXd u = to_vec(response_of(uv));
        const double solver = objective(F, u, f.coeffs);

        const Eigen::MatrixXd G = F.transpose() * F;
        const Eigen::VectorXd c = F.transpose() * u;
        const double uu = u.squaredNorm();
        const double r2 = m * L;
        const int steps = static_cast<int>(std::floor(std::sqrt(r2) / 0.01));
        double best = INFINITY;
        Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
        const int s1 = m > 1 ? steps : 0;
        const int s2 = m > 2 ? steps : 0;
        for (int i = -steps; i <= steps; ++i) {
            for (int j = -s1; j <= s1; ++j) {
                for (int k = -s2; k <= s2; ++k) {
                    a(0) = 0.01 * i;
                    if (m > 1) a(1) = 0.01 * j;
                    if (m > 2) a(2) = 0.01 * k;
                    if (a.squaredNorm() > r2) continue;
                    best = std::min(best, uu - 2.0 * c.dot(a) + a.dot(G * a));
                }
            }
        }
        EXPECT_LE(solver, best + 1e-6) << "trial " << trial;
    }
}

TEST(FitRidge, NormDecreasesAlongLambda) {
    std::mt19937_64 rng(8);
    std::normal_distribution<> z;
    Eigen::MatrixXd F(25, 6);
    for (int i = 0; i < 25; ++i) {
        for (int j = 0; j < 6; ++j) F(i, j) = z(rng);
    }
    Eigen::VectorXd u(25);
    for (int i = 0; i < 25; ++i) u(i) = z(rng);
    const Eigen::MatrixXd G = F.transpose() * F;
    double prev = INFINITY;
    for (double lambda = 1e-4; lambda < 1e4; lambda *= 1.5) {
        const Eigen::VectorXd a = (G + lambda * Eigen::MatrixXd::Identity(6, 6)).ldlt().solve(F.transpose() * u);
        EXPECT_LT(a.squaredNorm(), prev);
        prev = a.squaredNorm();
    }
}

TEST(Reduce, StreamingMatchesDense) {
    const PathSample s = simulate_sample(builtin_model(ModelId::M3), 7, 60, 10, 31);
    const ResponseVector u = build_response(s);
    for (const BasisSpec& spec : {BasisSpec::bspline(Interval::compact(-1, 1), 8),
                                  BasisSpec::fourier(Interval::compact(-1.5, 2), 7), BasisSpec::hermite(6)}) {
        const Eigen::MatrixXd F = design_matrix(spec, s);
        const RidgeFit dense = solve_ridge(reduce(F, u), 10.0);
        const ReducedSystem sys = reduce(Basis(spec), s, u);
        const RidgeFit stream = solve_ridge(sys, 10.0);
        EXPECT_LT((dense.coeffs - stream.coeffs).norm(), 1e-9 * (1.0 + dense.coeffs.norm()));
        const Eigen::VectorXd h = F * stream.coeffs;
        EXPECT_NEAR(sys.contrast(stream.coeffs), contrast(std::span<const double>(h.data(), h.size()), u), 1e-10);
    }
}

TEST(Contrast, Examples) {
    const ResponseVector u = response_of({1.0, 1.0});
    const std::vector<double> zero{0.0, 0.0};
    EXPECT_DOUBLE_EQ(contrast(zero, u), 1.0);
    EXPECT_DOUBLE_EQ(contrast(u.values, u), 0.0);
    const std::vector<double> shorter{0.0};
    EXPECT_THROW(contrast(shorter, u), Error);
}

TEST(Estimator, TruncationCap) {
    // K = 1, M = 3: constant coefficients reproduce the constant.
    const BasisSpec spec = BasisSpec::bspline(Interval::compact(-1, 1), 1, 3);
    RidgeFit f;
    f.L = 4.0;
    f.coeffs = Eigen::VectorXd::Constant(4, 10.0);
    const EstimatorFn capped(spec, f);
    EXPECT_DOUBLE_EQ(evaluate(capped, 0.3), 2.0);
    EXPECT_NEAR(capped.raw(0.3), 10.0, 1e-12);
    f.coeffs = Eigen::VectorXd::Constant(4, 1.5);
    EXPECT_NEAR(evaluate(EstimatorFn(spec, f), 0.3), 1.5, 1e-14);
    f.coeffs = Eigen::VectorXd::Constant(4, 10.0);
    EXPECT_NEAR(evaluate(EstimatorFn(spec, f, false), 0.3), 10.0, 1e-12);
}

TEST(Estimator, ConstantCoefficientsReproduceConstant) {
    const BasisSpec spec = BasisSpec::bspline(Interval::compact(-2, 3), 8, 3);
    RidgeFit f;
    f.L = 100.0;
    f.coeffs = Eigen::VectorXd::Constant(spec.dim(), -0.7);
    const EstimatorFn est(spec, f);
    for (double x = -2.0; x <= 3.0; x += 0.01) EXPECT_NEAR(est(x), -0.7, 1e-13);
}

TEST(Estimator, NoLowerTruncation) {
    const BasisSpec spec = BasisSpec::bspline(Interval::compact(-1, 1), 1, 3);
    RidgeFit f;
    f.L = 1.0;
    f.coeffs = Eigen::VectorXd::Constant(4, -0.5);
    EXPECT_NEAR(EstimatorFn(spec, f)(0.0), -0.5, 1e-14);
}

TEST(Estimator, JsonRoundTrip) {
    const PathSample s = simulate_sample(builtin_model(ModelId::M1), 5, 50, 10, 2);
    const ResponseVector u = build_response(s);
    for (const BasisSpec& spec : {BasisSpec::bspline(Interval::compact(-1, 1), 4),
                                  BasisSpec::fourier(Interval::compact(-1, 2), 5, FourierScaling::Literal),
                                  BasisSpec::hermite(5)}) {
        const EstimatorFn est(spec, solve_ridge(reduce(Basis(spec), s, u), 2.0));
        const nlohmann::json j = to_json(est);
        for (const char* key : {"family", "interval", "m", "K", "M", "L", "coeffs", "lagrange", "active"}) {
            EXPECT_TRUE(j.contains(key)) << key;
        }
        const EstimatorFn back = estimator_from_json(nlohmann::json::parse(j.dump()));
        for (double x : {-0.9, 0.0, 0.4, 1.0}) EXPECT_EQ(back(x), est(x));
    }
    EXPECT_THROW(estimator_from_json(nlohmann::json{{"family", "bspline"}}), Error);
}

TEST(Estimator, ConstantRecoveryOrnsteinUhlenbeck) {
    // N n = 1e6. At N n = 1e5 the fit near x = -1, where OU paths rarely go,
    // misses the 0.1 band on about a third of seeds.
    const BasisSpec spec = BasisSpec::bspline(Interval::compact(-1, 1), 4);
    int good = 0;
    const int seeds = 20;
    for (int seed = 0; seed < seeds; ++seed) {
        const PathSample s = simulate_sample(builtin_model(ModelId::M1), 1000, 1000, 10, derive_seed(55, seed));
        const ResponseVector u = build_response(s);
        const EstimatorFn est(spec, solve_ridge(reduce(Basis(spec), s, u), std::log(1e6)));
        double worst = 0.0;
        for (int i = 0; i <= 100; ++i) worst = std::max(worst, std::abs(est(-1.0 + 0.02 * i) - 1.0));
        good += worst < 0.1 ? 1 : 0;
    }
    EXPECT_GE(good, 19);
}
