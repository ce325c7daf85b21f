#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "sigmaridge/error.hpp"
#include "sigmaridge/experiment.hpp"

using namespace sigmaridge;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.model = ModelId::M1;
    c.N = 20;
    c.n = 50;
    c.N_prime = 20;
    c.reps = 6;
    c.seed = 11;
    return c;
}

}  // namespace

TEST(Intervals, Presets) {
    EXPECT_EQ(resolve_interval(IntervalPreset::Compact, Family::BSpline, 10, 10).upper, 1.0);
    EXPECT_NEAR(resolve_interval(IntervalPreset::LogN, Family::BSpline, 100, 10).upper, std::log(100.0), 1e-15);
    EXPECT_NEAR(resolve_interval(IntervalPreset::LogSmallN, Family::BSpline, 1, 250).lower, -std::log(250.0), 1e-15);
    EXPECT_NEAR(resolve_interval(IntervalPreset::Growing, Family::BSpline, 1000, 10).upper,
                std::pow(std::log(1000.0), 0.4), 1e-15);
    EXPECT_EQ(resolve_interval(IntervalPreset::RealLine, Family::BSpline, 1, 1000).upper, 1e6);
    EXPECT_TRUE(resolve_interval(IntervalPreset::RealLine, Family::Hermite, 10, 100).unbounded);
    EXPECT_THROW(resolve_interval(IntervalPreset::Compact, Family::Hermite, 10, 100), Error);
    EXPECT_THROW(resolve_interval(IntervalPreset::LogN, Family::BSpline, 1, 100), Error);
    for (auto p : {IntervalPreset::Compact, IntervalPreset::LogSmallN, IntervalPreset::LogN, IntervalPreset::Growing,
                   IntervalPreset::SqrtLogN, IntervalPreset::RealLine}) {
        EXPECT_EQ(parse_interval_preset(to_string(p)), p);
    }
}

TEST(Defaults, ConstraintLevelPerRegime) {
    ExperimentConfig c = small_config();
    EXPECT_NEAR(default_L(c), std::log(20.0), 1e-15);
    c.family = Family::Hermite;
    c.interval = IntervalPreset::RealLine;
    EXPECT_NEAR(default_L(c), std::pow(std::log(20.0), 2), 1e-15);
    c = small_config();
    c.N = 1;
    EXPECT_NEAR(default_L(c), std::log(50.0), 1e-15);
    c.interval = IntervalPreset::RealLine;
    EXPECT_NEAR(default_L(c), std::pow(std::log(50.0), 2), 1e-15);
    c.L = 3.0;
    EXPECT_EQ(default_L(c), 3.0);
}

TEST(Defaults, Penalty) {
    ExperimentConfig c = small_config();
    EXPECT_EQ(resolve_penalty(c).kappa, 4.0);
    EXPECT_EQ(resolve_penalty(c).form, PenaltyForm::MultiPath);
    c.interval = IntervalPreset::LogN;
    EXPECT_EQ(resolve_penalty(c).kappa, 5.0);
    c.N = 1;
    c.interval = IntervalPreset::RealLine;
    EXPECT_EQ(resolve_penalty(c).kappa, 4.0);
    EXPECT_EQ(resolve_penalty(c).form, PenaltyForm::SinglePath);
}

TEST(Mise, ReportConsistency) {
    const auto reports = mise_experiment(small_config(), {EstimatorKind::Adaptive, EstimatorKind::Oracle});
    ASSERT_EQ(reports.size(), 2u);
    for (const auto& r : reports) {
        ASSERT_EQ(r.reps, 6);
        ASSERT_EQ(r.per_rep.size(), 6u);
        double mean = 0.0;
        for (double v : r.per_rep) mean += v;
        mean /= 6.0;
        double ss = 0.0;
        for (double v : r.per_rep) ss += (v - mean) * (v - mean);
        EXPECT_NEAR(r.mean, mean, 1e-12);
        EXPECT_NEAR(r.sd, std::sqrt(ss / 5.0), 1e-12);
        EXPECT_FALSE(r.sd_flag);
    }
    for (int i = 0; i < 6; ++i) EXPECT_LE(reports[1].per_rep[i], reports[0].per_rep[i] + 1e-20);
}

TEST(Mise, Deterministic) {
    const auto a = mise_experiment(small_config(), EstimatorKind::Adaptive);
    const auto b = mise_experiment(small_config(), EstimatorKind::Adaptive);
    EXPECT_EQ(a.per_rep, b.per_rep);
}

TEST(Mise, SingleRepFlagsSd) {
    ExperimentConfig c = small_config();
    c.reps = 1;
    const auto r = mise_experiment(c, EstimatorKind::Fixed);
    EXPECT_EQ(r.sd, 0.0);
    EXPECT_TRUE(r.sd_flag);
}

TEST(Mise, PrefixOfRepsIsStable) {
    // Repetition r depends only on (seed, r).
    ExperimentConfig c = small_config();
    const auto a = mise_experiment(c, EstimatorKind::Adaptive);
    c.reps = 12;
    const auto b = mise_experiment(c, EstimatorKind::Adaptive);
    for (int i = 0; i < 6; ++i) EXPECT_EQ(a.per_rep[i], b.per_rep[i]);
    EXPECT_LE(std::abs(a.mean - b.mean), 2.0 * b.sd / std::sqrt(6.0) + 2.0 * a.sd / std::sqrt(6.0));
}

TEST(Mise, KernelBaselineNeedsSinglePath) {
    EXPECT_THROW(mise_experiment(small_config(), EstimatorKind::NW), Error);
    ExperimentConfig c = small_config();
    c.N = 1;
    c.n = 300;
    c.reps = 2;
    const auto r = mise_experiment(c, EstimatorKind::NW);
    EXPECT_GT(r.mean, 0.5);  // literal formula under-scales by 1/n^2
}

TEST(Mise, ErrorCarriesRepIndex) {
    ExperimentConfig c = small_config();
    c.grid = {1, -1};
    try {
        mise_experiment(c, EstimatorKind::Adaptive);
        FAIL();
    } catch (const Error& e) {
        ASSERT_TRUE(e.index().has_value());
        EXPECT_EQ(*e.index(), 0u);
    }
}

TEST(Tables, Definitions) {
    const auto t2 = table_definition("2", 5, 1);
    EXPECT_EQ(t2.cells.size(), 3u * 2 * 3);
    for (const auto& c : t2.cells) EXPECT_EQ(c.cfg.n, 100);
    // Interval variants of one (model, N) share their data seed.
    EXPECT_EQ(t2.cells[0].cfg.seed, t2.cells[3].cfg.seed);
    EXPECT_NE(t2.cells[0].cfg.seed, t2.cells[1].cfg.seed);
    const auto t4 = table_definition("4", 5, 1);
    for (const auto& c : t4.cells) {
        EXPECT_EQ(c.cfg.family, Family::Hermite);
        ASSERT_EQ(c.kinds.size(), 1u);
        EXPECT_EQ(c.kinds[0], EstimatorKind::Oracle);
    }
    const auto t5 = table_definition("5", 5, 1);
    for (const auto& c : t5.cells) {
        EXPECT_EQ(c.cfg.N, 1);
        EXPECT_EQ(c.cfg.n, 1000);
    }
    EXPECT_THROW(table_definition("9", 5, 1), Error);
}

TEST(Tables, CsvLayout) {
    MiseReport r;
    r.model = "M1";
    r.interval = "compact";
    r.N = 10;
    r.n = 100;
    r.per_rep = {0.5};
    r.per_rep_size = {2};
    summarize(r);
    std::ostringstream os;
    write_mise_csv(os, {r});
    EXPECT_EQ(os.str(), "model,interval,estimator,N,n,mean,sd,reps,sd_flag\nM1,compact,adaptive,10,100,0.5,0,1,1\n");
    std::ostringstream raw;
    write_per_rep_csv(raw, {r});
    EXPECT_EQ(raw.str(), "model,interval,estimator,N,n,rep,loss,size\nM1,compact,adaptive,10,100,0,0.5,2\n");
}

TEST(Bundle, Model2Curves) {
    ExperimentConfig c;
    c.model = ModelId::M2;
    c.N = 50;
    c.n = 100;
    c.seed = 3;
    const BundleResult b = bundle_curves(c, 10);
    ASSERT_EQ(b.grid.size(), 201u);
    ASSERT_EQ(b.estimates.size(), 10u);
    EXPECT_DOUBLE_EQ(b.truth[100], 1.0);
    EXPECT_EQ(b.grid[100], 0.0);
    for (const auto& curve : b.estimates) {
        for (double v : curve) {
            EXPECT_TRUE(std::isfinite(v));
            EXPECT_LE(v, b.cap);
        }
    }
    std::ostringstream os;
    write_bundle_csv(os, b);
    std::string header;
    std::getline(std::istringstream(os.str()) >> std::ws, header);
    EXPECT_EQ(std::count(header.begin(), header.end(), ','), 11);
}
