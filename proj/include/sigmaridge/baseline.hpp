#pragma once

#include <optional>
#include <vector>

#include "sigmaridge/sde_sim.hpp"

namespace sigmaridge {

enum class KernelType { Gaussian };

/// Literal: numerator over k = 1..n-1 with the extra 1/n factor, denominator
/// over k = 1..n. Corrected: both sums over k = 0..n-1, increments scaled by n.
enum class NwMode { Literal, Corrected };

struct KernelSpec {
    KernelType kernel = KernelType::Gaussian;
    std::optional<double> bandwidth;  // unset: Scott's rule
    NwMode mode = NwMode::Literal;
    bool normalized = true;           // include the 1/sqrt(2 pi) factor
    double cutoff = 8.0;              // kernel is zero for |u| > cutoff
};

/// sd(values) * n^(-1/5), sd the sample standard deviation of all stored states.
double scott_bandwidth(const DiffusionPath& path);

struct NwValue {
    double value = 0.0;
    bool underflow = false;  // denominator < 1e-300; value is then 0
};

/// Nadaraya-Watson estimator of sigma^2 from one path. Terms are sorted by
/// state once so that each evaluation only visits the kernel window.
class NwEstimator {
public:
    NwEstimator(const DiffusionPath& path, const KernelSpec& spec);

    NwValue eval(double x) const;
    double operator()(double x) const { return eval(x).value; }
    double bandwidth() const noexcept { return h_; }

private:
    struct Term {
        double state;
        double weight;
    };
    double window_sum(const std::vector<Term>& terms, double x) const;

    KernelSpec spec_;
    double h_ = 0.0;
    std::vector<Term> numerator_;
    std::vector<Term> denominator_;
};

NwValue nw_estimate(const DiffusionPath& path, double x, const KernelSpec& spec);

}  // namespace sigmaridge
