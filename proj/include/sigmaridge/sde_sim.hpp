#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sigmaridge {

/// Built-in models. M1-M3 are the simulation-study models, C1-C3 the models
/// used to calibrate the penalty constant. All share the drift b(x) = 1 - x.
enum class ModelId { M1, M2, M3, C1, C2, C3 };

std::string_view to_string(ModelId id) noexcept;
std::optional<ModelId> parse_model_id(std::string_view text) noexcept;

enum class CoefficientRole { Drift, Diffusion };

struct BuiltinCoefficient {
    ModelId model;
    CoefficientRole role;
};

struct ConstantCoefficient {
    double value;
};

/// Piecewise-linear interpolation through (grid, values), held constant
/// beyond the first and last grid points.
struct TabulatedCoefficient {
    std::vector<double> grid;
    std::vector<double> values;
};

class CoefficientFn {
public:
    using Kind = std::variant<BuiltinCoefficient, ConstantCoefficient, TabulatedCoefficient>;

    CoefficientFn(Kind kind);  // NOLINT(google-explicit-constructor)

    static CoefficientFn constant(double c) { return CoefficientFn(ConstantCoefficient{c}); }
    static CoefficientFn tabulated(std::vector<double> grid, std::vector<double> values);

    double operator()(double x) const;
    const Kind& kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Lower and upper bounds of sigma for models that satisfy the uniform
/// ellipticity assumption. Checked at every diffusion evaluation.
struct DiffusionBounds {
    double lower;
    double upper;
};

struct ModelSpec {
    CoefficientFn drift;
    CoefficientFn diffusion;
    double x0 = 0.0;
    std::string label;
    std::optional<DiffusionBounds> bounds;

    /// sigma(x); throws AssumptionViolation when `bounds` is set and violated.
    double sigma(double x) const;
    double sigma_sq(double x) const {
        const double s = sigma(x);
        return s * s;
    }
};

ModelSpec builtin_model(ModelId id);

/// One observed trajectory x_0, ..., x_n on [0, 1] with step 1/n.
class DiffusionPath {
public:
    DiffusionPath() = default;
    explicit DiffusionPath(std::vector<double> values);

    std::size_t steps() const noexcept { return values_.size() - 1; }
    double delta() const noexcept { return 1.0 / static_cast<double>(steps()); }
    const std::vector<double>& values() const noexcept { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }

private:
    std::vector<double> values_;
};

/// N independent paths of common length n.
struct PathSample {
    std::vector<DiffusionPath> paths;
    std::uint64_t seed = 0;

    PathSample() = default;
    PathSample(std::vector<DiffusionPath> paths, std::uint64_t seed);

    std::size_t size() const noexcept { return paths.size(); }
    std::size_t steps() const noexcept { return paths.empty() ? 0 : paths.front().steps(); }
    /// N * n, the number of (state, increment) pairs used by the estimators.
    std::size_t observations() const noexcept { return size() * steps(); }
};

constexpr int kDefaultSubsteps = 10;

/// Euler-Maruyama on the grid of n * substeps steps, recorded every
/// `substeps` steps. Deterministic in (model, n, substeps, stream_seed).
DiffusionPath simulate_path(const ModelSpec& model, int n, int substeps, std::uint64_t stream_seed);

/// Path j uses sub-stream derive_seed(master_seed, j).
PathSample simulate_sample(const ModelSpec& model, int N, int n, int substeps, std::uint64_t master_seed);

}  // namespace sigmaridge
