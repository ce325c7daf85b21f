#include "sigmaridge/experiment.hpp"

#include <cmath>
#include <ostream>

#include "sigmaridge/error.hpp"
#include "sigmaridge/regression.hpp"
#include "sigmaridge/rng.hpp"

namespace sigmaridge {

namespace {

constexpr double kRealLineSurrogate = 1e6;
constexpr int kBundlePoints = 201;

double log_checked(int v, const char* what) {
    if (v < 2) throw Error(ErrorCode::InvalidArgument, std::string("this setting needs ") + what + " >= 2");
    return std::log(static_cast<double>(v));
}

}  // namespace

std::string to_string(IntervalPreset preset) {
    switch (preset) {
    case IntervalPreset::Compact: return "compact";
    case IntervalPreset::LogSmallN: return "logn";
    case IntervalPreset::LogN: return "logN";
    case IntervalPreset::Growing: return "growing";
    case IntervalPreset::SqrtLogN: return "sqrtlogN";
    case IntervalPreset::RealLine: return "realline";
    }
    return "?";
}

std::optional<IntervalPreset> parse_interval_preset(std::string_view text) {
    for (auto p : {IntervalPreset::Compact, IntervalPreset::LogSmallN, IntervalPreset::LogN, IntervalPreset::Growing,
                   IntervalPreset::SqrtLogN, IntervalPreset::RealLine}) {
        if (text == to_string(p)) return p;
    }
    return std::nullopt;
}

bool restricts_target(IntervalPreset preset) {
    return preset == IntervalPreset::Compact || preset == IntervalPreset::Growing ||
           preset == IntervalPreset::SqrtLogN;
}

Interval resolve_interval(IntervalPreset preset, Family family, int N, int n) {
    if (family == Family::Hermite) {
        if (preset != IntervalPreset::RealLine) {
            throw Error(ErrorCode::InvalidInterval, "the Hermite family is defined on the real line only");
        }
        return Interval::real_line();
    }
    switch (preset) {
    case IntervalPreset::Compact: return Interval::compact(-1.0, 1.0);
    case IntervalPreset::LogSmallN: {
        const double a = log_checked(n, "n");
        return Interval::compact(-a, a);
    }
    case IntervalPreset::LogN: {
        const double a = log_checked(N, "N");
        return Interval::compact(-a, a);
    }
    case IntervalPreset::Growing: {
        const double a = std::pow(log_checked(N, "N"), 0.4);
        return Interval::compact(-a, a);
    }
    case IntervalPreset::SqrtLogN: {
        const double a = std::sqrt(log_checked(N, "N"));
        return Interval::compact(-a, a);
    }
    case IntervalPreset::RealLine: return Interval::compact(-kRealLineSurrogate, kRealLineSurrogate);
    }
    throw Error(ErrorCode::InvalidInterval, "unknown interval preset");
}

std::string to_string(EstimatorKind kind) {
    switch (kind) {
    case EstimatorKind::Adaptive: return "adaptive";
    case EstimatorKind::Oracle: return "oracle";
    case EstimatorKind::Fixed: return "fixed";
    case EstimatorKind::NW: return "nw";
    }
    return "?";
}

std::vector<int> default_grid(Family family) {
    switch (family) {
    case Family::BSpline: return dyadic_grid(5);
    case Family::Fourier: return odd_grid(21);
    case Family::Hermite: return consecutive_grid(20);
    }
    return {};
}

double default_L(const ExperimentConfig& cfg) {
    if (cfg.L) return *cfg.L;
    const bool line = cfg.interval == IntervalPreset::RealLine || cfg.interval == IntervalPreset::LogSmallN ||
                      cfg.interval == IntervalPreset::LogN;
    if (cfg.N == 1) {
        const double l = log_checked(cfg.n, "n");
        return line ? l * l : l;
    }
    const double l = log_checked(cfg.N, "N");
    if (cfg.family == Family::Hermite) return l * l;
    return l;
}

PenaltySpec resolve_penalty(const ExperimentConfig& cfg) {
    PenaltySpec pen;
    pen.form = cfg.form ? *cfg.form : (cfg.N == 1 ? PenaltyForm::SinglePath : PenaltyForm::MultiPath);
    if (cfg.kappa) {
        pen.kappa = *cfg.kappa;
    } else {
        const bool line = cfg.interval == IntervalPreset::RealLine || cfg.interval == IntervalPreset::LogSmallN ||
                          cfg.interval == IntervalPreset::LogN;
        pen.kappa = (line && cfg.N > 1) ? 5.0 : 4.0;
    }
    return pen;
}

void summarize(MiseReport& r) {
    r.reps = static_cast<int>(r.per_rep.size());
    if (r.per_rep.empty()) return;
    double mean = 0.0;
    for (double v : r.per_rep) mean += v;
    mean /= static_cast<double>(r.per_rep.size());
    r.mean = mean;
    if (r.per_rep.size() < 2) {
        r.sd = 0.0;
        r.sd_flag = true;
        return;
    }
    double ss = 0.0;
    for (double v : r.per_rep) ss += (v - mean) * (v - mean);
    r.sd = std::sqrt(ss / static_cast<double>(r.per_rep.size() - 1));
    r.sd_flag = false;
}

std::vector<MiseReport> mise_experiment(const ExperimentConfig& cfg, const std::vector<EstimatorKind>& kinds) {
    if (cfg.reps < 1) throw Error(ErrorCode::InvalidArgument, "reps must be >= 1");
    if (cfg.N < 1 || cfg.n < 1 || cfg.N_prime < 1) throw Error(ErrorCode::InvalidArgument, "N, n, N' must be >= 1");
    if (kinds.empty()) throw Error(ErrorCode::InvalidArgument, "no estimator kinds requested");

    const ModelSpec model = builtin_model(cfg.model);
    const Interval interval = resolve_interval(cfg.interval, cfg.family, cfg.N, cfg.n);
    const BasisFamily family{cfg.family, interval, cfg.M, cfg.scaling};
    const Target target =
        squared_diffusion(model, restricts_target(cfg.interval) ? std::optional(interval) : std::nullopt);
    const std::vector<int> grid = cfg.grid.empty() ? default_grid(cfg.family) : cfg.grid;

    bool need_path = false;
    bool need_fixed = false;
    for (auto k : kinds) {
        need_path |= k == EstimatorKind::Adaptive || k == EstimatorKind::Oracle;
        need_fixed |= k == EstimatorKind::Fixed;
    }
    const double L = need_path || need_fixed ? default_L(cfg) : 0.0;
    const PenaltySpec pen = resolve_penalty(cfg);

    std::vector<MiseReport> reports(kinds.size());
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        reports[i].model = std::string(to_string(cfg.model));
        reports[i].interval = to_string(cfg.interval);
        reports[i].kind = kinds[i];
        reports[i].N = cfg.N;
        reports[i].n = cfg.n;
    }

    for (int rep = 0; rep < cfg.reps; ++rep) {
        try {
            const PathSample learn = simulate_sample(model, cfg.N, cfg.n, cfg.substeps, derive_seed(cfg.seed, rep, 0));
            const PathSample held_out =
                simulate_sample(model, cfg.N_prime, cfg.n, cfg.substeps, derive_seed(cfg.seed, rep, 1));
            const ResponseVector u = need_path || need_fixed ? build_response(learn) : ResponseVector{};

            std::optional<DimensionPath> path;
            std::optional<OracleResult> oracle;
            if (need_path) path = fit_dimension_path(learn, u, family, grid, L);

            for (std::size_t i = 0; i < kinds.size(); ++i) {
                MiseReport& r = reports[i];
                switch (kinds[i]) {
                case EstimatorKind::Adaptive: {
                    const std::size_t k = penalized_argmin(*path, pen, learn.size(), learn.steps());
                    r.per_rep.push_back(empirical_sq_distance(path->estimators[k], target, held_out));
                    r.per_rep_size.push_back(path->sizes[k]);
                    break;
                }
                case EstimatorKind::Oracle: {
                    if (!oracle) oracle = oracle_from_path(*path, target, held_out);
                    r.per_rep.push_back(oracle->losses[oracle->index]);
                    r.per_rep_size.push_back(oracle->size);
                    break;
                }
                case EstimatorKind::Fixed: {
                    const DimensionPath one = fit_dimension_path(learn, u, family, {cfg.fixed_size}, L);
                    r.per_rep.push_back(empirical_sq_distance(one.estimators[0], target, held_out));
                    r.per_rep_size.push_back(cfg.fixed_size);
                    break;
                }
                case EstimatorKind::NW: {
                    if (learn.size() != 1) {
                        throw Error(ErrorCode::InvalidArgument, "the kernel baseline uses a single path (N = 1)");
                    }
                    const NwEstimator nw(learn.paths[0], cfg.kernel);
                    int underflows = 0;
                    const RealFn fn = [&](double x) {
                        const NwValue v = nw.eval(x);
                        underflows += v.underflow ? 1 : 0;
                        return v.value;
                    };
                    r.per_rep.push_back(empirical_sq_distance(fn, target, held_out));
                    r.per_rep_size.push_back(0);
                    r.nw_underflows += underflows;
                    break;
                }
                }
            }
        } catch (const Error& e) {
            e.rethrow_with("repetition " + std::to_string(rep), static_cast<std::size_t>(rep));
        }
    }
    for (auto& r : reports) summarize(r);
    return reports;
}

MiseReport mise_experiment(const ExperimentConfig& cfg, EstimatorKind kind) {
    return mise_experiment(cfg, std::vector<EstimatorKind>{kind}).front();
}

std::vector<std::string> table_ids() { return {"2", "3", "4", "5", "single"}; }

TableDefinition table_definition(const std::string& id, int reps, std::uint64_t seed) {
    TableDefinition t;
    t.id = id;
    const std::vector<ModelId> models{ModelId::M1, ModelId::M2, ModelId::M3};
    const auto cell_seed = [&](ModelId m, int N, int n) {
        return derive_seed(seed, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(N),
                           static_cast<std::uint64_t>(n));
    };
    const auto base = [&](ModelId m, int N, int n) {
        ExperimentConfig c;
        c.model = m;
        c.N = N;
        c.n = n;
        c.reps = reps;
        c.seed = cell_seed(m, N, n);
        return c;
    };

    if (id == "2" || id == "3") {
        const int n = id == "2" ? 100 : 250;
        t.title = "adaptive and oracle spline estimators, n = " + std::to_string(n);
        for (auto m : models) {
            for (auto preset : {IntervalPreset::Compact, IntervalPreset::LogN}) {
                for (int N : {10, 100, 1000}) {
                    ExperimentConfig c = base(m, N, n);
                    c.interval = preset;
                    t.cells.push_back({c, {EstimatorKind::Adaptive, EstimatorKind::Oracle}});
                }
            }
        }
    } else if (id == "4") {
        t.title = "Hermite oracle estimator on the real line";
        for (auto m : models) {
            for (auto [N, n] : {std::pair{10, 100}, std::pair{100, 100}, std::pair{100, 250}}) {
                ExperimentConfig c = base(m, N, n);
                c.family = Family::Hermite;
                c.interval = IntervalPreset::RealLine;
                t.cells.push_back({c, {EstimatorKind::Oracle}});
            }
        }
    } else if (id == "5") {
        t.title = "single path, n = 1000: ridge on the real line against Nadaraya-Watson";
        for (auto m : models) {
            ExperimentConfig c = base(m, 1, 1000);
            c.interval = IntervalPreset::RealLine;
            t.cells.push_back({c, {EstimatorKind::Adaptive, EstimatorKind::NW}});
        }
    } else if (id == "single") {
        t.title = "single path on [-1, 1]";
        for (auto m : models) {
            for (int n : {100, 1000}) {
                ExperimentConfig c = base(m, 1, n);
                t.cells.push_back({c, {EstimatorKind::Adaptive, EstimatorKind::Oracle}});
            }
        }
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown table id '" + id + "'");
    }
    return t;
}

std::vector<MiseReport> run_table(const TableDefinition& table) {
    std::vector<MiseReport> out;
    for (const auto& cell : table.cells) {
        auto reports = mise_experiment(cell.cfg, cell.kinds);
        if (table.id == "5") {
            // Both kernel variants are reported.
            ExperimentConfig corrected = cell.cfg;
            corrected.kernel.mode = NwMode::Corrected;
            MiseReport r = mise_experiment(corrected, EstimatorKind::NW);
            r.interval = "realline-corrected";
            reports.push_back(std::move(r));
        }
        for (auto& r : reports) out.push_back(std::move(r));
    }
    return out;
}

void write_mise_csv(std::ostream& os, const std::vector<MiseReport>& reports) {
    os << "model,interval,estimator,N,n,mean,sd,reps,sd_flag\n";
    os.precision(10);
    for (const auto& r : reports) {
        os << r.model << ',' << r.interval << ',' << to_string(r.kind) << ',' << r.N << ',' << r.n << ',' << r.mean
           << ',' << r.sd << ',' << r.reps << ',' << (r.sd_flag ? 1 : 0) << '\n';
    }
}

void write_per_rep_csv(std::ostream& os, const std::vector<MiseReport>& reports) {
    os << "model,interval,estimator,N,n,rep,loss,size\n";
    os.precision(17);
    for (const auto& r : reports) {
        for (std::size_t i = 0; i < r.per_rep.size(); ++i) {
            os << r.model << ',' << r.interval << ',' << to_string(r.kind) << ',' << r.N << ',' << r.n << ',' << i
               << ',' << r.per_rep[i] << ',' << r.per_rep_size[i] << '\n';
        }
    }
}

BundleResult bundle_curves(const ExperimentConfig& cfg, int count) {
    if (count < 1) throw Error(ErrorCode::InvalidArgument, "bundle count must be >= 1");
    const ModelSpec model = builtin_model(cfg.model);
    const Interval interval = resolve_interval(cfg.interval, cfg.family, cfg.N, cfg.n);
    const BasisFamily family{cfg.family, interval, cfg.M, cfg.scaling};
    const std::vector<int> grid = cfg.grid.empty() ? default_grid(cfg.family) : cfg.grid;
    const double L = default_L(cfg);
    const PenaltySpec pen = resolve_penalty(cfg);

    BundleResult b;
    b.cap = std::sqrt(L);
    for (int i = 0; i < kBundlePoints; ++i) b.grid.push_back(-1.0 + 2.0 * i / (kBundlePoints - 1));
    for (double x : b.grid) b.truth.push_back(model.sigma_sq(x));
    for (int c = 0; c < count; ++c) {
        try {
            const PathSample learn = simulate_sample(model, cfg.N, cfg.n, cfg.substeps, derive_seed(cfg.seed, c));
            const SelectionResult sel = select_dimension(learn, grid, family, L, pen);
            std::vector<double> curve;
            for (double x : b.grid) curve.push_back(sel.chosen()(x));
            b.estimates.push_back(std::move(curve));
            b.sizes.push_back(sel.chosen_size);
        } catch (const Error& e) {
            e.rethrow_with("bundle curve " + std::to_string(c), static_cast<std::size_t>(c));
        }
    }
    return b;
}

void write_bundle_csv(std::ostream& os, const BundleResult& b) {
    os << 'x';
    for (std::size_t c = 0; c < b.estimates.size(); ++c) os << ",est_" << c + 1;
    os << ",truth\n";
    os.precision(17);
    for (std::size_t i = 0; i < b.grid.size(); ++i) {
        os << b.grid[i];
        for (const auto& curve : b.estimates) os << ',' << curve[i];
        os << ',' << b.truth[i] << '\n';
    }
}

}  // namespace sigmaridge
