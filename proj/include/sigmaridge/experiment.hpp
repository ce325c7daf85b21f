#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sigmaridge/baseline.hpp"
#include "sigmaridge/bases.hpp"
#include "sigmaridge/norms.hpp"
#include "sigmaridge/sde_sim.hpp"
#include "sigmaridge/selection.hpp"

namespace sigmaridge {

enum class IntervalPreset {
    Compact,    // [-1, 1]
    LogSmallN,  // [-log n, log n]
    LogN,       // [-log N, log N]
    Growing,    // [-A_N, A_N], A_N = (log N)^0.4
    SqrtLogN,   // [-sqrt(log N), sqrt(log N)]
    RealLine,   // Hermite: the real line; other families: [-1e6, 1e6]
};

std::string to_string(IntervalPreset preset);
std::optional<IntervalPreset> parse_interval_preset(std::string_view text);

/// Whether the comparison target is sigma^2 restricted to the interval
/// (compact presets) or sigma^2 itself (presets standing in for the real line).
bool restricts_target(IntervalPreset preset);

Interval resolve_interval(IntervalPreset preset, Family family, int N, int n);

enum class EstimatorKind { Adaptive, Oracle, Fixed, NW };

std::string to_string(EstimatorKind kind);

struct ExperimentConfig {
    ModelId model = ModelId::M1;
    IntervalPreset interval = IntervalPreset::Compact;
    Family family = Family::BSpline;
    int M = 3;
    FourierScaling scaling = FourierScaling::Orthonormal;
    int N = 100;
    int n = 100;
    int N_prime = 100;
    int reps = 100;
    int substeps = kDefaultSubsteps;
    std::uint64_t seed = 0;
    std::vector<int> grid;            // empty: family default
    std::optional<double> kappa;      // unset: 4, or 5 for real-line presets with N >= 2
    std::optional<PenaltyForm> form;  // unset: single path for N = 1, else repeated paths
    std::optional<double> L;          // unset: regime default, see default_L
    int fixed_size = 4;               // for EstimatorKind::Fixed
    KernelSpec kernel;                // for EstimatorKind::NW
};

std::vector<int> default_grid(Family family);
double default_L(const ExperimentConfig& cfg);
PenaltySpec resolve_penalty(const ExperimentConfig& cfg);

struct MiseReport {
    std::string model;
    std::string interval;
    EstimatorKind kind = EstimatorKind::Adaptive;
    int N = 0;
    int n = 0;
    int reps = 0;
    double mean = 0.0;
    double sd = 0.0;            // sample sd; 0 when reps = 1
    bool sd_flag = false;       // set when reps = 1
    std::vector<double> per_rep;
    std::vector<int> per_rep_size;  // selected size per rep; 0 for NW
    int nw_underflows = 0;
};

/// Runs the Monte-Carlo protocol once per repetition and reports every
/// requested estimator on the same data: fresh learning sample (N paths) and
/// evaluation sample (N_prime paths) per repetition, losses measured as the
/// empirical squared distance on the evaluation sample.
std::vector<MiseReport> mise_experiment(const ExperimentConfig& cfg, const std::vector<EstimatorKind>& kinds);
MiseReport mise_experiment(const ExperimentConfig& cfg, EstimatorKind kind);

/// Fills mean/sd/sd_flag from per_rep.
void summarize(MiseReport& report);

struct TableCell {
    ExperimentConfig cfg;
    std::vector<EstimatorKind> kinds;
};

struct TableDefinition {
    std::string id;
    std::string title;
    std::vector<TableCell> cells;
};

/// Tables "2", "3" (spline, adaptive and oracle, [-1,1] and [-log N, log N]),
/// "4" (Hermite oracle on the real line), "5" (single path, ridge on the
/// real line against Nadaraya-Watson) and "single" (single path on [-1,1]).
/// Cells that differ only in the interval share their simulated data.
TableDefinition table_definition(const std::string& id, int reps, std::uint64_t seed);
std::vector<std::string> table_ids();

std::vector<MiseReport> run_table(const TableDefinition& table);

/// model,interval,estimator,N,n,mean,sd,reps,sd_flag
void write_mise_csv(std::ostream& os, const std::vector<MiseReport>& reports);
/// model,interval,estimator,N,n,rep,loss,size
void write_per_rep_csv(std::ostream& os, const std::vector<MiseReport>& reports);

struct BundleResult {
    std::vector<double> grid;
    std::vector<std::vector<double>> estimates;  // one curve per repetition
    std::vector<double> truth;
    std::vector<int> sizes;
    double cap = 0.0;
};

/// `count` adaptive spline estimates on [-1, 1], each from a fresh sample,
/// evaluated on a 201-point grid, plus the true sigma^2.
BundleResult bundle_curves(const ExperimentConfig& cfg, int count);

/// x,est_1,...,est_count,truth
void write_bundle_csv(std::ostream& os, const BundleResult& bundle);

}  // namespace sigmaridge
