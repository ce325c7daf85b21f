#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sigmaridge/bases.hpp"
#include "sigmaridge/norms.hpp"
#include "sigmaridge/regression.hpp"
#include "sigmaridge/sde_sim.hpp"

namespace sigmaridge {

enum class PenaltyForm {
    MultiPath,   // kappa * m * log(N) / (N n)
    SinglePath,  // kappa * m * log(n) / n
    Appendix,    // kappa * m * log(N)^2 / N^2
};

std::string to_string(PenaltyForm form);

/// pen as a function of the space dimension m (= K + M for splines).
struct PenaltySpec {
    double kappa = 4.0;
    PenaltyForm form = PenaltyForm::MultiPath;

    /// Throws InvalidArgument when the form degenerates (kappa <= 0, or N = 1
    /// for the forms driven by log N).
    double operator()(int dim, std::size_t N, std::size_t n) const;
};

/// Every size of a grid fitted on one sample, sharing the response.
struct DimensionPath {
    std::vector<int> sizes;
    std::vector<EstimatorFn> estimators;
    std::vector<double> contrasts;
};

DimensionPath fit_dimension_path(const PathSample& sample, const ResponseVector& response, const BasisFamily& family,
                                 const std::vector<int>& grid, double L);

struct DimensionRow {
    int size = 0;  // K for splines, m otherwise
    int dim = 0;
    double contrast = 0.0;
    double penalty = 0.0;
    double objective = 0.0;
};

struct SelectionResult {
    int chosen_size = 0;
    std::size_t chosen_index = 0;
    std::vector<DimensionRow> per_size;
    DimensionPath path;

    const EstimatorFn& chosen() const { return path.estimators[chosen_index]; }
};

/// Index of argmin contrast + pen; ties go to the smaller size.
std::size_t penalized_argmin(const DimensionPath& path, const PenaltySpec& pen, std::size_t N, std::size_t n);

SelectionResult select_dimension(const PathSample& sample, const std::vector<int>& grid, const BasisFamily& family,
                                 double L, const PenaltySpec& pen);
SelectionResult select_dimension(DimensionPath path, const PenaltySpec& pen, std::size_t N, std::size_t n);

/// Per-size CSV with header K,m,contrast,penalty,objective,chosen.
void write_selection_csv(std::ostream& os, const SelectionResult& result);

struct OracleResult {
    int size = 0;
    std::size_t index = 0;
    std::vector<double> losses;  // per grid size, on the evaluation sample
};

/// Index of argmin over the path of ||est - target||^2 on `eval_sample`;
/// ties go to the smaller size.
OracleResult oracle_from_path(const DimensionPath& path, const Target& target, const PathSample& eval_sample);

OracleResult oracle_dimension(const PathSample& sample, const Target& target, const PathSample& eval_sample,
                              const std::vector<int>& grid, const BasisFamily& family, double L);

struct CalibrationOptions {
    int N = 100;
    int n = 100;
    int N_prime = 100;
    int reps = 100;
    int substeps = kDefaultSubsteps;
    std::uint64_t seed = 0;
    BasisFamily family{Family::BSpline, Interval::compact(-1.0, 1.0), 3, FourierScaling::Orthonormal};
    std::vector<int> grid = dyadic_grid(5);
    PenaltyForm form = PenaltyForm::MultiPath;
    double L = 0.0;  // <= 0 selects log(N)
    /// Restrict the comparison target to the estimation interval.
    bool restrict_target = true;
};

struct CalibrationResult {
    double kappa_star = 0.0;
    std::vector<double> kappas;
    std::vector<ModelId> models;
    /// mean_loss[i][j]: mean held-out loss for kappas[i] and models[j].
    std::vector<std::vector<double>> mean_loss;
    std::vector<double> worst_case;  // max over models, per kappa
};

/// Grid search of the penalty constant: for each repetition and model,
/// simulate a learning and an evaluation sample, select a size for every
/// kappa, record the held-out loss, then pick the kappa whose worst mean
/// loss over models is smallest (first in `kappas` on ties).
CalibrationResult calibrate_kappa(const std::vector<ModelId>& models, const std::vector<double>& kappas,
                                  const CalibrationOptions& options);

std::vector<double> default_kappa_set();

}  // namespace sigmaridge
