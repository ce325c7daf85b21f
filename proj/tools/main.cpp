// sigmaridge command-line front end.
//
// Exit codes: 0 success, 1 runtime or model failure, 2 usage or config error.

#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "sigmaridge/error.hpp"

namespace {

using nlohmann::json;
namespace cli = sigmaridge::cli;

enum class Kind { Int, UInt, Real, Text, IntList, RealList, TextList };

struct Flag {
    const char* name;
    const char* key;
    Kind kind;
    const char* help;
    const char* commands;  // space-separated, "*" for every command
};

// clang-format off
const Flag kFlags[] = {
    {"--model",     "model",     Kind::Text,     "M1, M2, M3, C1, C2 or C3", "simulate fit select bundle compare"},
    {"--models",    "models",    Kind::TextList, "comma-separated model ids", "calibrate"},
    {"--interval",  "interval",  Kind::Text,     "compact, logn, logN, growing, sqrtlogN or realline", "fit select bundle compare"},
    {"--basis",     "basis",     Kind::Text,     "bspline, fourier or hermite", "fit select bundle compare"},
    {"--M",         "M",         Kind::Int,      "spline degree", "fit select bundle compare"},
    {"--N",         "N",         Kind::Int,      "number of paths", "simulate fit select calibrate bundle compare"},
    {"--n",         "n",         Kind::Int,      "steps per path", "simulate fit select calibrate bundle compare"},
    {"--N-prime",   "N_prime",   Kind::Int,      "paths in each evaluation sample", "calibrate compare"},
    {"--reps",      "reps",      Kind::Int,      "Monte Carlo repetitions", "table calibrate compare"},
    {"--seed",      "seed",      Kind::UInt,     "master seed", "simulate fit select table calibrate bundle compare"},
    {"--substeps",  "substeps",  Kind::Int,      "Euler substeps per observation", "simulate fit select calibrate bundle compare"},
    {"--kappa",     "kappa",     Kind::Real,     "penalty constant", "select bundle compare"},
    {"--kappas",    "kappas",    Kind::RealList, "comma-separated candidate constants", "calibrate"},
    {"--penalty",   "penalty",   Kind::Text,     "multi, single or appendix", "select calibrate bundle compare"},
    {"--L",         "L",         Kind::Text,     "auto or a constraint level", "fit select calibrate bundle compare"},
    {"--K",         "K",         Kind::Int,      "basis size for a fixed fit", "fit"},
    {"--grid",      "grid",      Kind::IntList,  "comma-separated candidate sizes", "select calibrate bundle compare"},
    {"--input",     "input",     Kind::Text,     "path-sample CSV instead of simulating", "fit select"},
    {"--table",     "table",     Kind::Text,     "table id: 2, 3, 4, 5 or single", "table"},
    {"--count",     "count",     Kind::Int,      "number of curves", "bundle"},
    {"--fourier-scaling", "fourier_scaling", Kind::Text, "orthonormal or literal", "fit select bundle"},
    {"--nw-mode",   "nw_mode",   Kind::Text,     "literal or corrected", "compare"},
    {"--bandwidth", "bandwidth", Kind::Real,     "kernel bandwidth (default: Scott's rule)", "compare"},
};
// clang-format on

bool applies(const Flag& f, const std::string& command) {
    const std::string list = std::string(" ") + f.commands + " ";
    return list == " * " || list.find(" " + command + " ") != std::string::npos;
}

json convert(const Flag& f, const std::vector<std::string>& raw) {
    const auto one = [&](const std::string& s, Kind k) -> json {
        std::size_t used = 0;
        try {
            switch (k) {
                case Kind::Int: {
                    const int v = std::stoi(s, &used);
                    if (used == s.size()) return v;
                    break;
                }
                case Kind::UInt: {
                    if (!s.empty() && s[0] == '-') break;
                    const unsigned long long v = std::stoull(s, &used);
                    if (used == s.size()) return v;
                    break;
                }
                case Kind::Real: {
                    const double v = std::stod(s, &used);
                    if (used == s.size()) return v;
                    break;
                }
                default:
                    return s;
            }
        } catch (const std::exception&) {
        }
        throw cli::UsageError(std::string("bad value for ") + f.name + ": '" + s + "'");
    };
    switch (f.kind) {
        case Kind::IntList:
        case Kind::RealList:
        case Kind::TextList: {
            const Kind elem = f.kind == Kind::IntList ? Kind::Int : f.kind == Kind::RealList ? Kind::Real : Kind::Text;
            json arr = json::array();
            for (const auto& s : raw) arr.push_back(one(s, elem));
            return arr;
        }
        default:
            return one(raw.back(), f.kind);
    }
}

json load_config(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw cli::UsageError("cannot read config " + file);
    try {
        json j = json::parse(in);
        if (!j.is_object()) throw cli::UsageError("config must be a JSON object");
        return j;
    } catch (const json::exception& e) {
        throw cli::UsageError("config " + file + ": " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ridge projection estimation of the diffusion coefficient"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(SIGMARIDGE_VERSION));

    struct Bound {
        CLI::App* sub;
        std::string config;
        std::string out = "out";
        std::map<std::string, std::vector<std::string>> raw;
        std::map<std::string, CLI::Option*> opts;
    };
    std::map<std::string, Bound> bound;

    const std::map<std::string, std::string> about{
        {"simulate", "simulate a path sample (CSV, one row per path)"},
        {"fit", "fit the constrained estimator at a fixed size"},
        {"select", "select the size by penalized contrast"},
        {"table", "run a Monte Carlo MISE table"},
        {"calibrate", "choose the penalty constant by grid search"},
        {"bundle", "evaluate repeated adaptive estimates on [-1, 1]"},
        {"compare", "single-path comparison against the kernel estimator"},
    };
    for (const auto& name : cli::command_names()) {
        Bound& b = bound[name];
        b.sub = app.add_subcommand(name, about.at(name));
        b.sub->add_option("--config", b.config, "JSON file with the same keys as the flags");
        b.sub->add_option("--out", b.out, "output directory")->capture_default_str();
        for (const Flag& f : kFlags) {
            if (!applies(f, name)) continue;
            auto* opt = b.sub->add_option(f.name, b.raw[f.key], f.help);
            if (f.kind == Kind::IntList || f.kind == Kind::RealList || f.kind == Kind::TextList) {
                opt->delimiter(',');
            } else {
                opt->expected(1);
            }
            b.opts[f.key] = opt;
        }
    }

    std::string manifest;
    std::string rerun_out = "out";
    CLI::App* rerun = app.add_subcommand("rerun", "replay a manifest and check its output hashes");
    rerun->add_option("manifest", manifest, "manifest.json from an earlier run")->required();
    rerun->add_option("--out", rerun_out, "output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (rerun->parsed()) {
            cli::rerun(manifest, rerun_out);
            return 0;
        }
        for (auto& [name, b] : bound) {
            if (!b.sub->parsed()) continue;
            json args = b.config.empty() ? json::object() : load_config(b.config);
            for (const Flag& f : kFlags) {
                const auto it = b.opts.find(f.key);
                if (it != b.opts.end() && it->second->count() > 0) args[f.key] = convert(f, b.raw[f.key]);
            }
            cli::run_command(name, args, b.out);
        }
        return 0;
    } catch (const cli::UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const sigmaridge::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
