#include "sigmaridge/selection.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "sigmaridge/error.hpp"
#include "sigmaridge/rng.hpp"

namespace sigmaridge {

std::string to_string(PenaltyForm form) {
    switch (form) {
    case PenaltyForm::MultiPath: return "multi";
    case PenaltyForm::SinglePath: return "single";
    case PenaltyForm::Appendix: return "appendix";
    }
    return "?";
}

double PenaltySpec::operator()(int dim, std::size_t N, std::size_t n) const {
    if (!(kappa > 0.0)) throw Error(ErrorCode::InvalidArgument, "penalty constant kappa must be > 0");
    const auto Nd = static_cast<double>(N);
    const auto nd = static_cast<double>(n);
    switch (form) {
    case PenaltyForm::MultiPath:
        if (N < 2) throw Error(ErrorCode::InvalidArgument, "the repeated-path penalty needs N >= 2");
        return kappa * dim * std::log(Nd) / (Nd * nd);
    case PenaltyForm::SinglePath:
        if (n < 2) throw Error(ErrorCode::InvalidArgument, "the single-path penalty needs n >= 2");
        return kappa * dim * std::log(nd) / nd;
    case PenaltyForm::Appendix: {
        if (N < 2) throw Error(ErrorCode::InvalidArgument, "the log^2 penalty needs N >= 2");
        const double l = std::log(Nd);
        return kappa * dim * l * l / (Nd * Nd);
    }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown penalty form");
}

DimensionPath fit_dimension_path(const PathSample& sample, const ResponseVector& response, const BasisFamily& family,
                                 const std::vector<int>& grid, double L) {
    if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "dimension grid is empty");
    DimensionPath path;
    path.sizes = grid;
    path.estimators.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
            const BasisSpec spec = family.with_size(grid[i]);
            const Basis basis(spec);
            const ReducedSystem system = reduce(basis, sample, response);
            RidgeFit fit = solve_ridge(system, L);
            path.contrasts.push_back(system.contrast(fit.coeffs));
            path.estimators.emplace_back(spec, std::move(fit), true);
        } catch (const Error& e) {
            e.rethrow_with("size " + std::to_string(grid[i]), i);
        }
    }
    return path;
}

namespace {

// Values closer than this (relative) are treated as tied; rounding in the
// contrast is orders of magnitude smaller than any meaningful gap.
constexpr double kTieRelative = 1e-14;
// Absolute floor for losses, which can be ~1e-32 for exactly representable truths.
constexpr double kTieAbsoluteLoss = 1e-24;

/// argmin with ties resolved to the smaller size.
std::size_t argmin_smaller_size(const std::vector<double>& values, const std::vector<int>& sizes, double abs_tol) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double tol = kTieRelative * std::abs(values[best]) + abs_tol;
        if (values[i] < values[best] - tol || (values[i] <= values[best] + tol && sizes[i] < sizes[best])) best = i;
    }
    return best;
}

}  // namespace

std::size_t penalized_argmin(const DimensionPath& path, const PenaltySpec& pen, std::size_t N, std::size_t n) {
    std::vector<double> objective(path.sizes.size());
    for (std::size_t i = 0; i < objective.size(); ++i) {
        objective[i] = path.contrasts[i] + pen(path.estimators[i].basis().dim(), N, n);
    }
    return argmin_smaller_size(objective, path.sizes, 0.0);
}

SelectionResult select_dimension(DimensionPath path, const PenaltySpec& pen, std::size_t N, std::size_t n) {
    SelectionResult result;
    for (std::size_t i = 0; i < path.sizes.size(); ++i) {
        DimensionRow row;
        row.size = path.sizes[i];
        row.dim = path.estimators[i].basis().dim();
        row.contrast = path.contrasts[i];
        row.penalty = pen(row.dim, N, n);
        row.objective = row.contrast + row.penalty;
        result.per_size.push_back(row);
    }
    result.chosen_index = penalized_argmin(path, pen, N, n);
    result.chosen_size = path.sizes[result.chosen_index];
    result.path = std::move(path);
    return result;
}

SelectionResult select_dimension(const PathSample& sample, const std::vector<int>& grid, const BasisFamily& family,
                                 double L, const PenaltySpec& pen) {
    const ResponseVector u = build_response(sample);
    return select_dimension(fit_dimension_path(sample, u, family, grid, L), pen, sample.size(), sample.steps());
}

void write_selection_csv(std::ostream& os, const SelectionResult& result) {
    os << "K,m,contrast,penalty,objective,chosen\n";
    os.precision(17);
    for (std::size_t i = 0; i < result.per_size.size(); ++i) {
        const auto& r = result.per_size[i];
        os << r.size << ',' << r.dim << ',' << r.contrast << ',' << r.penalty << ',' << r.objective << ','
           << (i == result.chosen_index ? 1 : 0) << '\n';
    }
}

OracleResult oracle_from_path(const DimensionPath& path, const Target& target, const PathSample& eval_sample) {
    OracleResult result;
    result.losses.reserve(path.estimators.size());
    for (const auto& est : path.estimators) result.losses.push_back(empirical_sq_distance(est, target, eval_sample));
    result.index = argmin_smaller_size(result.losses, path.sizes, kTieAbsoluteLoss);
    result.size = path.sizes[result.index];
    return result;
}

OracleResult oracle_dimension(const PathSample& sample, const Target& target, const PathSample& eval_sample,
                              const std::vector<int>& grid, const BasisFamily& family, double L) {
    const ResponseVector u = build_response(sample);
    return oracle_from_path(fit_dimension_path(sample, u, family, grid, L), target, eval_sample);
}

std::vector<double> default_kappa_set() { return {0.1, 0.5, 1.0, 2.0, 4.0, 5.0, 7.0, 10.0}; }

CalibrationResult calibrate_kappa(const std::vector<ModelId>& models, const std::vector<double>& kappas,
                                  const CalibrationOptions& opt) {
    if (models.empty()) throw Error(ErrorCode::InvalidArgument, "calibration needs at least one model");
    if (kappas.empty()) throw Error(ErrorCode::InvalidArgument, "calibration needs a non-empty kappa set");
    if (opt.reps < 1) throw Error(ErrorCode::InvalidArgument, "calibration needs reps >= 1");
    const double L = opt.L > 0.0 ? opt.L : std::log(static_cast<double>(opt.N));
    if (!(L > 0.0)) throw Error(ErrorCode::InvalidArgument, "calibration needs N >= 2 for L = log(N)");

    CalibrationResult result;
    result.kappas = kappas;
    result.models = models;
    result.mean_loss.assign(kappas.size(), std::vector<double>(models.size(), 0.0));

    for (std::size_t j = 0; j < models.size(); ++j) {
        const ModelSpec model = builtin_model(models[j]);
        const std::optional<Interval> support =
            opt.restrict_target && !opt.family.interval.unbounded ? std::optional(opt.family.interval) : std::nullopt;
        const Target target = squared_diffusion(model, support);
        for (int rep = 0; rep < opt.reps; ++rep) {
            try {
                const auto key = static_cast<std::uint64_t>(models[j]);
                const PathSample learn =
                    simulate_sample(model, opt.N, opt.n, opt.substeps, derive_seed(opt.seed, key, rep, 0));
                const PathSample held_out =
                    simulate_sample(model, opt.N_prime, opt.n, opt.substeps, derive_seed(opt.seed, key, rep, 1));
                const DimensionPath path =
                    fit_dimension_path(learn, build_response(learn), opt.family, opt.grid, L);
                std::vector<double> losses(path.estimators.size(), -1.0);
                for (std::size_t i = 0; i < kappas.size(); ++i) {
                    const std::size_t k =
                        penalized_argmin(path, PenaltySpec{kappas[i], opt.form}, learn.size(), learn.steps());
                    if (losses[k] < 0.0) losses[k] = empirical_sq_distance(path.estimators[k], target, held_out);
                    result.mean_loss[i][j] += losses[k];
                }
            } catch (const Error& e) {
                e.rethrow_with("calibration repetition " + std::to_string(rep), static_cast<std::size_t>(rep));
            }
        }
    }
    for (auto& row : result.mean_loss) {
        for (double& v : row) v /= opt.reps;
    }
    std::size_t best = 0;
    for (std::size_t i = 0; i < kappas.size(); ++i) {
        result.worst_case.push_back(*std::max_element(result.mean_loss[i].begin(), result.mean_loss[i].end()));
        if (result.worst_case[i] < result.worst_case[best]) best = i;
    }
    result.kappa_star = kappas[best];
    return result;
}

}  // namespace sigmaridge
