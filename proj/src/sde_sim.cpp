#include "sigmaridge/sde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sigmaridge/error.hpp"
#include "sigmaridge/rng.hpp"

namespace sigmaridge {

namespace {

constexpr double kPi = std::numbers::pi;

double builtin_diffusion(ModelId id, double x) {
    switch (id) {
    case ModelId::M1:
    case ModelId::C1:
        return 1.0;
    case ModelId::M2:
        return 1.0 - x * x;
    case ModelId::M3: {
        const double c = std::cos(0.5 * kPi * x);
        return 1.0 / (3.0 + std::sin(2.0 * kPi * x)) + c * c;
    }
    case ModelId::C2:
        return 0.1 + 0.9 / std::sqrt(1.0 + x * x);
    case ModelId::C3: {
        const double s = std::sin(2.0 * kPi * x);
        return 1.0 / 3.0 + s * s / kPi + 1.0 / (kPi + x * x);
    }
    }
    return 0.0;
}

double interpolate(const TabulatedCoefficient& t, double x) {
    if (x <= t.grid.front()) return t.values.front();
    if (x >= t.grid.back()) return t.values.back();
    const auto it = std::upper_bound(t.grid.begin(), t.grid.end(), x);
    const auto hi = static_cast<std::size_t>(it - t.grid.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - t.grid[lo]) / (t.grid[hi] - t.grid[lo]);
    return (1.0 - w) * t.values[lo] + w * t.values[hi];
}

}  // namespace

std::string_view to_string(ModelId id) noexcept {
    switch (id) {
    case ModelId::M1: return "M1";
    case ModelId::M2: return "M2";
    case ModelId::M3: return "M3";
    case ModelId::C1: return "C1";
    case ModelId::C2: return "C2";
    case ModelId::C3: return "C3";
    }
    return "?";
}

std::optional<ModelId> parse_model_id(std::string_view text) noexcept {
    for (ModelId id : {ModelId::M1, ModelId::M2, ModelId::M3, ModelId::C1, ModelId::C2, ModelId::C3}) {
        if (text == to_string(id)) return id;
    }
    return std::nullopt;
}

CoefficientFn::CoefficientFn(Kind kind) : kind_(std::move(kind)) {
    if (const auto* t = std::get_if<TabulatedCoefficient>(&kind_)) {
        if (t->grid.empty() || t->grid.size() != t->values.size()) {
            throw Error(ErrorCode::InvalidArgument, "tabulated coefficient needs equal-length, non-empty grid and values");
        }
        if (!std::is_sorted(t->grid.begin(), t->grid.end()) ||
            std::adjacent_find(t->grid.begin(), t->grid.end()) != t->grid.end()) {
            throw Error(ErrorCode::InvalidArgument, "tabulated coefficient grid must be strictly increasing");
        }
        for (std::size_t i = 0; i < t->grid.size(); ++i) {
            if (!std::isfinite(t->grid[i]) || !std::isfinite(t->values[i])) {
                throw Error(ErrorCode::NonFiniteInput, "tabulated coefficient contains non-finite entries");
            }
        }
    }
}

CoefficientFn CoefficientFn::tabulated(std::vector<double> grid, std::vector<double> values) {
    return CoefficientFn(TabulatedCoefficient{std::move(grid), std::move(values)});
}

double CoefficientFn::operator()(double x) const {
    switch (kind_.index()) {
    case 0: {
        const auto& b = std::get<BuiltinCoefficient>(kind_);
        return b.role == CoefficientRole::Drift ? 1.0 - x : builtin_diffusion(b.model, x);
    }
    case 1:
        return std::get<ConstantCoefficient>(kind_).value;
    default:
        return interpolate(std::get<TabulatedCoefficient>(kind_), x);
    }
}

double ModelSpec::sigma(double x) const {
    const double s = diffusion(x);
    if (bounds) {
        const double slack = 1e-12 * std::max(1.0, bounds->upper);
        if (s < bounds->lower - slack || s > bounds->upper + slack) {
            throw Error(ErrorCode::AssumptionViolation,
                        label + ": diffusion value " + std::to_string(s) + " outside declared bounds at x=" +
                            std::to_string(x));
        }
    }
    return s;
}

ModelSpec builtin_model(ModelId id) {
    const auto drift = CoefficientFn(BuiltinCoefficient{id, CoefficientRole::Drift});
    const auto diffusion = CoefficientFn(BuiltinCoefficient{id, CoefficientRole::Diffusion});
    switch (id) {
    case ModelId::M1:
        return {drift, diffusion, 0.0, "Model 1 Ornstein-Uhlenbeck", DiffusionBounds{1.0, 1.0}};
    case ModelId::M2:
        // sigma vanishes at +-1: no ellipticity bounds.
        return {drift, diffusion, 0.0, "Model 2", std::nullopt};
    case ModelId::M3:
        return {drift, diffusion, 0.0, "Model 3", DiffusionBounds{0.25, 1.5}};
    case ModelId::C1:
        return {drift, diffusion, 0.0, "Calibration model 1", DiffusionBounds{1.0, 1.0}};
    case ModelId::C2:
        return {drift, diffusion, 0.0, "Calibration model 2", DiffusionBounds{0.1, 1.0}};
    case ModelId::C3:
        return {drift, diffusion, 0.0, "Calibration model 3", DiffusionBounds{1.0 / 3.0, 1.0 / 3.0 + 2.0 / kPi}};
    }
    throw Error(ErrorCode::InvalidArgument, "unknown model id");
}

DiffusionPath::DiffusionPath(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "a path needs at least one step (n >= 1)");
    }
}

PathSample::PathSample(std::vector<DiffusionPath> p, std::uint64_t s) : paths(std::move(p)), seed(s) {
    if (paths.empty()) throw Error(ErrorCode::InvalidArgument, "a sample needs at least one path");
    const std::size_t n = paths.front().steps();
    for (const auto& path : paths) {
        if (path.steps() != n) throw Error(ErrorCode::DimensionMismatch, "all paths of a sample must share n");
    }
}

DiffusionPath simulate_path(const ModelSpec& model, int n, int substeps, std::uint64_t stream_seed) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
    if (substeps < 1) throw Error(ErrorCode::InvalidArgument, "substeps must be >= 1");

    Engine engine(stream_seed);
    StandardNormal normal;
    const double dt = 1.0 / (static_cast<double>(n) * substeps);
    const double sqrt_dt = std::sqrt(dt);

    std::vector<double> values(static_cast<std::size_t>(n) + 1);
    double x = model.x0;
    values[0] = x;
    for (int k = 1; k <= n; ++k) {
        for (int s = 0; s < substeps; ++s) {
            x += model.drift(x) * dt + model.sigma(x) * sqrt_dt * normal(engine);
            if (!std::isfinite(x)) {
                throw Error(ErrorCode::NonFiniteState,
                            model.label + ": state became non-finite at step " + std::to_string(k));
            }
        }
        values[static_cast<std::size_t>(k)] = x;
    }
    return DiffusionPath(std::move(values));
}

PathSample simulate_sample(const ModelSpec& model, int N, int n, int substeps, std::uint64_t master_seed) {
    if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be >= 1");
    std::vector<DiffusionPath> paths;
    paths.reserve(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) {
        try {
            paths.push_back(simulate_path(model, n, substeps, derive_seed(master_seed, static_cast<std::uint64_t>(j))));
        } catch (const Error& e) {
            e.rethrow_with("path " + std::to_string(j), static_cast<std::size_t>(j));
        }
    }
    return PathSample(std::move(paths), master_seed);
}

}  // namespace sigmaridge
