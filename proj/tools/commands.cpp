#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "sigmaridge/error.hpp"
#include "sigmaridge/experiment.hpp"
#include "sigmaridge/regression.hpp"

namespace sigmaridge::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- argument access -------------------------------------------------------

template <typename T>
T get_or(const json& args, const char* key, T fallback) {
    if (!args.contains(key) || args[key].is_null()) return fallback;
    try {
        return args[key].get<T>();
    } catch (const json::exception&) {
        throw UsageError(std::string("bad value for '") + key + "': " + args[key].dump());
    }
}

int positive_int(const json& args, const char* key, int fallback) {
    const int v = get_or<int>(args, key, fallback);
    if (v < 1) throw UsageError(std::string("'") + key + "' must be >= 1");
    return v;
}

ModelId model_arg(const json& args, const char* fallback) {
    const std::string s = get_or<std::string>(args, "model", fallback);
    const auto id = parse_model_id(s);
    if (!id) throw UsageError("unknown model '" + s + "' (expected M1, M2, M3, C1, C2 or C3)");
    return *id;
}

Family family_arg(const json& args) {
    const std::string s = get_or<std::string>(args, "basis", "bspline");
    if (s == "bspline") return Family::BSpline;
    if (s == "fourier") return Family::Fourier;
    if (s == "hermite") return Family::Hermite;
    throw UsageError("unknown basis '" + s + "'");
}

PenaltyForm penalty_arg(const std::string& s) {
    if (s == "multi") return PenaltyForm::MultiPath;
    if (s == "single") return PenaltyForm::SinglePath;
    if (s == "appendix") return PenaltyForm::Appendix;
    throw UsageError("unknown penalty '" + s + "' (expected multi, single or appendix)");
}

std::optional<double> L_arg(const json& args) {
    if (!args.contains("L") || args["L"].is_null()) return std::nullopt;
    const json& v = args["L"];
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "auto") return std::nullopt;
        try {
            std::size_t used = 0;
            const double L = std::stod(s, &used);
            if (used == s.size()) return L;
        } catch (const std::exception&) {
        }
    }
    throw UsageError("bad value for 'L': " + v.dump() + " (expected auto or a number)");
}

ExperimentConfig experiment_config(const json& args, const char* default_model) {
    ExperimentConfig cfg;
    cfg.model = model_arg(args, default_model);
    cfg.family = family_arg(args);
    const std::string interval =
        get_or<std::string>(args, "interval", cfg.family == Family::Hermite ? "realline" : "compact");
    const auto preset = parse_interval_preset(interval);
    if (!preset) throw UsageError("unknown interval '" + interval + "'");
    cfg.interval = *preset;
    cfg.M = get_or<int>(args, "M", 3);
    const std::string scaling = get_or<std::string>(args, "fourier_scaling", "orthonormal");
    if (scaling == "literal") cfg.scaling = FourierScaling::Literal;
    else if (scaling != "orthonormal") throw UsageError("unknown fourier_scaling '" + scaling + "'");
    cfg.N = positive_int(args, "N", 100);
    cfg.n = positive_int(args, "n", 100);
    cfg.N_prime = positive_int(args, "N_prime", 100);
    cfg.reps = positive_int(args, "reps", 100);
    cfg.substeps = positive_int(args, "substeps", kDefaultSubsteps);
    cfg.seed = get_or<std::uint64_t>(args, "seed", 0);
    cfg.grid = get_or<std::vector<int>>(args, "grid", {});
    if (args.contains("kappa") && !args["kappa"].is_null()) cfg.kappa = get_or<double>(args, "kappa", 4.0);
    if (args.contains("penalty") && !args["penalty"].is_null())
        cfg.form = penalty_arg(get_or<std::string>(args, "penalty", "multi"));
    cfg.L = L_arg(args);
    cfg.fixed_size = positive_int(args, "K", 4);
    const std::string mode = get_or<std::string>(args, "nw_mode", "literal");
    if (mode == "corrected") cfg.kernel.mode = NwMode::Corrected;
    else if (mode != "literal") throw UsageError("unknown nw_mode '" + mode + "'");
    if (args.contains("bandwidth") && !args["bandwidth"].is_null())
        cfg.kernel.bandwidth = get_or<double>(args, "bandwidth", 0.0);
    return cfg;
}

// ---- files -----------------------------------------------------------------

std::string fnv1a_hex(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + file.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

class OutputDir {
public:
    explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw Error(ErrorCode::Io, "cannot create " + dir_.string() + ": " + ec.message());
    }

    std::ofstream open(const std::string& name) {
        std::ofstream os(dir_ / name, std::ios::binary);
        if (!os) throw Error(ErrorCode::Io, "cannot write " + (dir_ / name).string());
        os.precision(17);
        names_.push_back(name);
        return os;
    }

    json hashes() const {
        json h = json::object();
        for (const auto& n : names_) h[n] = fnv1a_hex(dir_ / n);
        return h;
    }

    const fs::path& path() const { return dir_; }

private:
    fs::path dir_;
    std::vector<std::string> names_;
};

void write_sample_csv(std::ostream& os, const PathSample& sample) {
    for (const auto& p : sample.paths) {
        for (std::size_t k = 0; k < p.values().size(); ++k) os << (k ? "," : "") << p[k];
        os << '\n';
    }
}

PathSample read_sample_csv(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + file.string());
    std::vector<DiffusionPath> paths;
    std::string line;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> v;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            try {
                v.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw Error(ErrorCode::Io, file.string() + ": bad number '" + cell + "'", paths.size());
            }
        }
        if (width == 0) width = v.size();
        if (v.size() != width || width < 2)
            throw Error(ErrorCode::DimensionMismatch, file.string() + ": ragged row", paths.size());
        paths.emplace_back(std::move(v));
    }
    if (paths.empty()) throw Error(ErrorCode::Io, file.string() + ": no paths");
    return PathSample(std::move(paths), 0);
}

struct SampleSource {
    PathSample sample;
    json inputs = json::object();
};

SampleSource load_or_simulate(const json& args, const ExperimentConfig& cfg) {
    if (args.contains("input") && !args["input"].is_null()) {
        const fs::path file = get_or<std::string>(args, "input", "");
        SampleSource s{read_sample_csv(file)};
        s.inputs[file.string()] = fnv1a_hex(file);
        return s;
    }
    return {simulate_sample(builtin_model(cfg.model), cfg.N, cfg.n, cfg.substeps, cfg.seed)};
}

void write_curve_csv(std::ostream& os, const EstimatorFn& est, const Interval& interval) {
    const double lo = std::max(interval.lower, -5.0);
    const double hi = std::min(interval.upper, 5.0);
    os << "x,estimate\n";
    for (int i = 0; i <= 200; ++i) {
        const double x = lo + (hi - lo) * i / 200.0;
        os << x << ',' << est(x) << '\n';
    }
}

void print_reports(const std::vector<MiseReport>& reports) {
    for (const auto& r : reports) {
        std::printf("%-3s %-20s %-9s N=%-5d n=%-5d %.6g (%.6g)%s\n", r.model.c_str(), r.interval.c_str(),
                    to_string(r.kind).c_str(), r.N, r.n, r.mean, r.sd, r.sd_flag ? " [reps=1]" : "");
    }
}

// ---- commands ----------------------------------------------------------------

using Inputs = json;

Inputs cmd_simulate(const json& args, OutputDir& out) {
    const ExperimentConfig cfg = experiment_config(args, "M1");
    const PathSample s = simulate_sample(builtin_model(cfg.model), cfg.N, cfg.n, cfg.substeps, cfg.seed);
    auto os = out.open("sample.csv");
    write_sample_csv(os, s);
    return json::object();
}

Inputs cmd_fit(const json& args, OutputDir& out) {
    ExperimentConfig cfg = experiment_config(args, "M1");
    SampleSource src = load_or_simulate(args, cfg);
    cfg.N = static_cast<int>(src.sample.size());
    cfg.n = static_cast<int>(src.sample.steps());
    const Interval interval = resolve_interval(cfg.interval, cfg.family, cfg.N, cfg.n);
    const BasisFamily family{cfg.family, interval, cfg.M, cfg.scaling};
    const BasisSpec spec = family.with_size(cfg.fixed_size);
    const ResponseVector u = build_response(src.sample);
    const EstimatorFn est(spec, solve_ridge(reduce(Basis(spec), src.sample, u), default_L(cfg)));
    {
        auto os = out.open("estimator.json");
        os << to_json(est).dump(2) << '\n';
    }
    auto os = out.open("curve.csv");
    write_curve_csv(os, est, interval);
    std::printf("fitted %s K=%d (m=%d), L=%.6g, constraint %s\n", to_string(cfg.family).c_str(), cfg.fixed_size,
                spec.dim(), est.fit().L, est.fit().active ? "active" : "inactive");
    return src.inputs;
}

Inputs cmd_select(const json& args, OutputDir& out) {
    ExperimentConfig cfg = experiment_config(args, "M1");
    SampleSource src = load_or_simulate(args, cfg);
    cfg.N = static_cast<int>(src.sample.size());
    cfg.n = static_cast<int>(src.sample.steps());
    const Interval interval = resolve_interval(cfg.interval, cfg.family, cfg.N, cfg.n);
    const BasisFamily family{cfg.family, interval, cfg.M, cfg.scaling};
    const std::vector<int> grid = cfg.grid.empty() ? default_grid(cfg.family) : cfg.grid;
    const SelectionResult r = select_dimension(src.sample, grid, family, default_L(cfg), resolve_penalty(cfg));
    {
        auto os = out.open("selection.csv");
        write_selection_csv(os, r);
    }
    {
        auto os = out.open("estimator.json");
        os << to_json(r.chosen()).dump(2) << '\n';
    }
    std::printf("selected size %d (m=%d)\n", r.chosen_size, r.per_size[r.chosen_index].dim);
    return src.inputs;
}

Inputs cmd_table(const json& args, OutputDir& out) {
    const std::string id = get_or<std::string>(args, "table", "");
    const auto ids = table_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
        std::string all;
        for (const auto& i : ids) all += (all.empty() ? "" : ", ") + i;
        throw UsageError("unknown table '" + id + "' (expected one of " + all + ")");
    }
    const int reps = positive_int(args, "reps", 100);
    const auto seed = get_or<std::uint64_t>(args, "seed", 0);
    const TableDefinition table = table_definition(id, reps, seed);
    const auto reports = run_table(table);
    {
        auto os = out.open("table_" + id + ".csv");
        write_mise_csv(os, reports);
    }
    {
        auto os = out.open("table_" + id + "_reps.csv");
        write_per_rep_csv(os, reports);
    }
    std::printf("%s\n", table.title.c_str());
    print_reports(reports);
    return json::object();
}

Inputs cmd_calibrate(const json& args, OutputDir& out) {
    CalibrationOptions opt;
    opt.N = positive_int(args, "N", 100);
    opt.n = positive_int(args, "n", 100);
    opt.N_prime = positive_int(args, "N_prime", 100);
    opt.reps = positive_int(args, "reps", 100);
    opt.substeps = positive_int(args, "substeps", kDefaultSubsteps);
    opt.seed = get_or<std::uint64_t>(args, "seed", 0);
    opt.form = penalty_arg(get_or<std::string>(args, "penalty", "multi"));
    if (auto L = L_arg(args)) opt.L = *L;
    if (args.contains("grid")) opt.grid = get_or<std::vector<int>>(args, "grid", {});
    const auto kappas = get_or<std::vector<double>>(args, "kappas", default_kappa_set());
    std::vector<ModelId> models;
    for (const auto& s : get_or<std::vector<std::string>>(args, "models", {"C1", "C2", "C3"})) {
        const auto id = parse_model_id(s);
        if (!id) throw UsageError("unknown model '" + s + "'");
        models.push_back(*id);
    }
    const CalibrationResult r = calibrate_kappa(models, kappas, opt);
    {
        auto os = out.open("calibration.csv");
        os << "kappa";
        for (ModelId m : r.models) os << ',' << to_string(m);
        os << ",worst\n";
        for (std::size_t i = 0; i < r.kappas.size(); ++i) {
            os << r.kappas[i];
            for (double v : r.mean_loss[i]) os << ',' << v;
            os << ',' << r.worst_case[i] << '\n';
        }
    }
    {
        auto os = out.open("kappa.json");
        os << json{{"kappa_star", r.kappa_star}}.dump(2) << '\n';
    }
    std::printf("kappa* = %g\n", r.kappa_star);
    return json::object();
}

Inputs cmd_bundle(const json& args, OutputDir& out) {
    const ExperimentConfig cfg = experiment_config(args, "M2");
    const int count = positive_int(args, "count", 10);
    const BundleResult b = bundle_curves(cfg, count);
    auto os = out.open("bundle.csv");
    write_bundle_csv(os, b);
    return json::object();
}

Inputs cmd_compare(const json& args, OutputDir& out) {
    json a = args;
    if (!a.contains("N")) a["N"] = 1;
    if (!a.contains("n")) a["n"] = 1000;
    if (!a.contains("interval")) a["interval"] = "realline";
    ExperimentConfig cfg = experiment_config(a, "M1");
    auto reports = mise_experiment(cfg, {EstimatorKind::Adaptive, EstimatorKind::NW});
    ExperimentConfig corrected = cfg;
    corrected.kernel.mode = cfg.kernel.mode == NwMode::Literal ? NwMode::Corrected : NwMode::Literal;
    MiseReport other = mise_experiment(corrected, EstimatorKind::NW);
    other.interval += corrected.kernel.mode == NwMode::Corrected ? "-corrected" : "-literal";
    reports.push_back(std::move(other));
    {
        auto os = out.open("compare.csv");
        write_mise_csv(os, reports);
    }
    {
        auto os = out.open("compare_reps.csv");
        write_per_rep_csv(os, reports);
    }
    print_reports(reports);
    return json::object();
}

using Handler = Inputs (*)(const json&, OutputDir&);

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> h{
        {"simulate", cmd_simulate}, {"fit", cmd_fit},       {"select", cmd_select},   {"table", cmd_table},
        {"calibrate", cmd_calibrate}, {"bundle", cmd_bundle}, {"compare", cmd_compare},
    };
    return h;
}

json execute(const std::string& command, const json& args, const fs::path& dir) {
    const auto it = handlers().find(command);
    if (it == handlers().end()) throw UsageError("unknown command '" + command + "'");
    if (!args.is_object()) throw UsageError("arguments must be a JSON object");
    json resolved = args;
    if (resolved.contains("input") && resolved["input"].is_string())
        resolved["input"] = fs::absolute(resolved["input"].get<std::string>()).lexically_normal().string();
    OutputDir out(dir);
    const json inputs = it->second(resolved, out);
    json manifest{
        {"command", command},
        {"args", resolved},
        {"seed", get_or<std::uint64_t>(args, "seed", 0)},
        {"version", SIGMARIDGE_VERSION},
        {"outputs", out.hashes()},
    };
    if (!inputs.empty()) manifest["inputs"] = inputs;
    std::ofstream os(dir / "manifest.json", std::ios::binary);
    if (!os) throw Error(ErrorCode::Io, "cannot write manifest in " + dir.string());
    os << manifest.dump(2) << '\n';
    return manifest;
}

}  // namespace

std::vector<std::string> command_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : handlers()) names.push_back(k);
    return names;
}

void run_command(const std::string& command, const json& args, const fs::path& out) {
    execute(command, args, out);
}

void rerun(const fs::path& manifest_path, const fs::path& out) {
    std::ifstream in(manifest_path);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + manifest_path.string());
    json m;
    try {
        m = json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError(manifest_path.string() + ": " + e.what());
    }
    if (!m.contains("command") || !m.contains("args")) throw UsageError("manifest lacks command or args");
    if (m.value("version", "") != SIGMARIDGE_VERSION)
        std::fprintf(stderr, "warning: manifest written by version %s\n", m.value("version", "?").c_str());
    if (m.contains("inputs")) {
        for (const auto& [file, hash] : m["inputs"].items()) {
            if (fnv1a_hex(file) != hash.get<std::string>())
                throw Error(ErrorCode::Io, "input " + file + " changed since the manifest was written");
        }
    }
    const json fresh = execute(m["command"].get<std::string>(), m["args"], out);
    if (m.contains("outputs") && fresh["outputs"] != m["outputs"]) {
        for (const auto& [file, hash] : m["outputs"].items()) {
            if (!fresh["outputs"].contains(file) || fresh["outputs"][file] != hash)
                throw Error(ErrorCode::Io, "output " + file + " differs from the manifest");
        }
    }
    std::printf("reproduced %zu output(s)\n", fresh["outputs"].size());
}

}  // namespace sigmaridge::cli
