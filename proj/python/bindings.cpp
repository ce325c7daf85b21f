#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sigmaridge/baseline.hpp"
#include "sigmaridge/error.hpp"
#include "sigmaridge/experiment.hpp"
#include "sigmaridge/norms.hpp"
#include "sigmaridge/regression.hpp"
#include "sigmaridge/selection.hpp"

namespace py = pybind11;
using namespace sigmaridge;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ModelId model_id(const std::string& name) {
    const auto id = parse_model_id(name);
    if (!id) throw Error(ErrorCode::InvalidArgument, "unknown model '" + name + "'");
    return *id;
}

Family family_of(const std::string& name) {
    if (name == "bspline") return Family::BSpline;
    if (name == "fourier") return Family::Fourier;
    if (name == "hermite") return Family::Hermite;
    throw Error(ErrorCode::InvalidBasis, "unknown basis '" + name + "'");
}

PenaltyForm penalty_of(const std::string& name) {
    if (name == "multi") return PenaltyForm::MultiPath;
    if (name == "single") return PenaltyForm::SinglePath;
    if (name == "appendix") return PenaltyForm::Appendix;
    throw Error(ErrorCode::InvalidArgument, "unknown penalty '" + name + "'");
}

EstimatorKind kind_of(const std::string& name) {
    for (auto k : {EstimatorKind::Adaptive, EstimatorKind::Oracle, EstimatorKind::Fixed, EstimatorKind::NW}) {
        if (to_string(k) == name) return k;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown estimator '" + name + "'");
}

// None: [-1, 1] for splines and Fourier, the real line for Hermite.
Interval interval_of(const std::optional<std::pair<double, double>>& ab, Family family) {
    if (ab) return Interval::compact(ab->first, ab->second);
    return family == Family::Hermite ? Interval::real_line() : Interval::compact(-1.0, 1.0);
}

PathSample to_sample(const Array& paths) {
    if (paths.ndim() != 2) throw Error(ErrorCode::DimensionMismatch, "paths must be a 2-d array (N, n + 1)");
    const auto r = paths.unchecked<2>();
    std::vector<DiffusionPath> out;
    out.reserve(static_cast<std::size_t>(r.shape(0)));
    for (py::ssize_t j = 0; j < r.shape(0); ++j) {
        std::vector<double> v(static_cast<std::size_t>(r.shape(1)));
        for (py::ssize_t k = 0; k < r.shape(1); ++k) v[static_cast<std::size_t>(k)] = r(j, k);
        out.emplace_back(std::move(v));
    }
    return PathSample(std::move(out), 0);
}

Array to_array(const PathSample& s) {
    Array a({static_cast<py::ssize_t>(s.size()), static_cast<py::ssize_t>(s.steps() + 1)});
    auto w = a.mutable_unchecked<2>();
    for (std::size_t j = 0; j < s.size(); ++j) {
        for (std::size_t k = 0; k <= s.steps(); ++k) w(j, k) = s.paths[j][k];
    }
    return a;
}

template <typename F>
py::object map_scalar_or_array(const py::object& x, F&& f) {
    if (py::isinstance<py::float_>(x) || py::isinstance<py::int_>(x)) return py::float_(f(x.cast<double>()));
    const Array in = x.cast<Array>();
    Array out(std::vector<py::ssize_t>(in.shape(), in.shape() + in.ndim()));
    const double* src = in.data();
    double* dst = out.mutable_data();
    for (py::ssize_t i = 0; i < in.size(); ++i) dst[i] = f(src[i]);
    return out;
}

double L_or_default(std::optional<double> L, std::size_t N) {
    return L ? *L : std::log(static_cast<double>(std::max<std::size_t>(N, 2)));
}

py::dict report_dict(const MiseReport& r) {
    py::dict d;
    d["model"] = r.model;
    d["interval"] = r.interval;
    d["estimator"] = to_string(r.kind);
    d["N"] = r.N;
    d["n"] = r.n;
    d["reps"] = r.reps;
    d["mean"] = r.mean;
    d["sd"] = r.sd;
    d["sd_flag"] = r.sd_flag;
    d["per_rep"] = r.per_rep;
    d["per_rep_size"] = r.per_rep_size;
    d["nw_underflows"] = r.nw_underflows;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Ridge projection estimators of the squared diffusion coefficient";
    m.attr("__version__") = SIGMARIDGE_VERSION;

    py::register_exception<Error>(m, "Error", PyExc_ValueError);

    m.def(
        "simulate",
        [](const std::string& model, int N, int n, std::uint64_t seed, int substeps) {
            return to_array(simulate_sample(builtin_model(model_id(model)), N, n, substeps, seed));
        },
        py::arg("model"), py::arg("N"), py::arg("n"), py::arg("seed") = 0, py::arg("substeps") = kDefaultSubsteps,
        "Simulate N paths of n steps on [0, 1]. Returns an (N, n + 1) array.");

    m.def(
        "sigma_sq",
        [](const std::string& model, const py::object& x) {
            const ModelSpec spec = builtin_model(model_id(model));
            return map_scalar_or_array(x, [&](double v) { return spec.sigma_sq(v); });
        },
        py::arg("model"), py::arg("x"));

    py::class_<EstimatorFn>(m, "Estimator")
        .def("__call__", [](const EstimatorFn& e, const py::object& x) {
            return map_scalar_or_array(x, [&](double v) { return e(v); });
        })
        .def("raw", [](const EstimatorFn& e, const py::object& x) {
            return map_scalar_or_array(x, [&](double v) { return e.raw(v); });
        })
        .def_property_readonly("coeffs", [](const EstimatorFn& e) { return e.fit().coeffs; })
        .def_property_readonly("dim", [](const EstimatorFn& e) { return e.basis().dim(); })
        .def_property_readonly("size", [](const EstimatorFn& e) { return e.basis().size_parameter(); })
        .def_property_readonly("L", [](const EstimatorFn& e) { return e.fit().L; })
        .def_property_readonly("lagrange", [](const EstimatorFn& e) { return e.fit().lagrange; })
        .def_property_readonly("active", [](const EstimatorFn& e) { return e.fit().active; })
        .def_property_readonly("cap", [](const EstimatorFn& e) { return e.cap(); })
        .def("to_json", [](const EstimatorFn& e) { return to_json(e).dump(); })
        .def_static("from_json", [](const std::string& s) { return estimator_from_json(nlohmann::json::parse(s)); });

    m.def(
        "fit",
        [](const Array& paths, const std::string& basis, int size, std::optional<std::pair<double, double>> interval,
           int M, std::optional<double> L) {
            const PathSample s = to_sample(paths);
            const Family f = family_of(basis);
            const BasisSpec spec = BasisFamily{f, interval_of(interval, f), M, FourierScaling::Orthonormal}.with_size(size);
            return EstimatorFn(spec, solve_ridge(reduce(Basis(spec), s, build_response(s)), L_or_default(L, s.size())));
        },
        py::arg("paths"), py::arg("basis") = "bspline", py::arg("size") = 4, py::arg("interval") = py::none(),
        py::arg("M") = 3, py::arg("L") = py::none(),
        "Constrained least-squares fit at a fixed size. L defaults to log N.");

    m.def(
        "select",
        [](const Array& paths, const std::string& basis, std::optional<std::vector<int>> grid,
           std::optional<std::pair<double, double>> interval, double kappa, const std::string& penalty, int M,
           std::optional<double> L) {
            const PathSample s = to_sample(paths);
            const Family f = family_of(basis);
            const BasisFamily family{f, interval_of(interval, f), M, FourierScaling::Orthonormal};
            const SelectionResult r = select_dimension(s, grid ? *grid : default_grid(f), family,
                                                       L_or_default(L, s.size()), PenaltySpec{kappa, penalty_of(penalty)});
            py::list rows;
            for (const auto& row : r.per_size) {
                py::dict d;
                d["size"] = row.size;
                d["dim"] = row.dim;
                d["contrast"] = row.contrast;
                d["penalty"] = row.penalty;
                d["objective"] = row.objective;
                rows.append(d);
            }
            py::dict out;
            out["size"] = r.chosen_size;
            out["rows"] = rows;
            out["estimator"] = r.chosen();
            return out;
        },
        py::arg("paths"), py::arg("basis") = "bspline", py::arg("grid") = py::none(), py::arg("interval") = py::none(),
        py::arg("kappa") = 4.0, py::arg("penalty") = "multi", py::arg("M") = 3, py::arg("L") = py::none());

    m.def(
        "mise",
        [](const std::string& model, const std::string& interval, const std::string& basis, int N, int n, int reps,
           std::uint64_t seed, const std::vector<std::string>& estimators, int N_prime) {
            ExperimentConfig cfg;
            cfg.model = model_id(model);
            const auto preset = parse_interval_preset(interval);
            if (!preset) throw Error(ErrorCode::InvalidInterval, "unknown interval '" + interval + "'");
            cfg.interval = *preset;
            cfg.family = family_of(basis);
            cfg.N = N;
            cfg.n = n;
            cfg.reps = reps;
            cfg.seed = seed;
            cfg.N_prime = N_prime;
            std::vector<EstimatorKind> kinds;
            for (const auto& e : estimators) kinds.push_back(kind_of(e));
            py::list out;
            for (const auto& r : mise_experiment(cfg, kinds)) out.append(report_dict(r));
            return out;
        },
        py::arg("model"), py::arg("interval") = "compact", py::arg("basis") = "bspline", py::arg("N") = 100,
        py::arg("n") = 100, py::arg("reps") = 100, py::arg("seed") = 0,
        py::arg("estimators") = std::vector<std::string>{"adaptive", "oracle"}, py::arg("N_prime") = 100,
        "Monte Carlo MISE of the listed estimators over `reps` independent repetitions.");

    m.def(
        "table",
        [](const std::string& id, int reps, std::uint64_t seed) {
            py::list out;
            for (const auto& r : run_table(table_definition(id, reps, seed))) out.append(report_dict(r));
            return out;
        },
        py::arg("id"), py::arg("reps") = 100, py::arg("seed") = 0);

    m.def("table_ids", &table_ids);

    m.def(
        "nw",
        [](const Array& path, const py::object& x, std::optional<double> bandwidth, const std::string& mode) {
            if (path.ndim() != 1) throw Error(ErrorCode::DimensionMismatch, "path must be 1-d");
            KernelSpec spec;
            spec.bandwidth = bandwidth;
            if (mode == "corrected") spec.mode = NwMode::Corrected;
            else if (mode != "literal") throw Error(ErrorCode::InvalidArgument, "unknown mode '" + mode + "'");
            const NwEstimator nw(DiffusionPath(std::vector<double>(path.data(), path.data() + path.size())), spec);
            return map_scalar_or_array(x, [&](double v) { return nw(v); });
        },
        py::arg("path"), py::arg("x"), py::arg("bandwidth") = py::none(), py::arg("mode") = "literal",
        "Kernel ratio estimate from one path. Points with no kernel mass evaluate to 0.");

    m.def(
        "scott_bandwidth",
        [](const Array& path) {
            return scott_bandwidth(DiffusionPath(std::vector<double>(path.data(), path.data() + path.size())));
        },
        py::arg("path"));

    m.def(
        "gram_diagnostics",
        [](const Array& paths, const std::string& basis, int size, std::optional<std::pair<double, double>> interval,
           int M) {
            const Family f = family_of(basis);
            const BasisSpec spec = BasisFamily{f, interval_of(interval, f), M, FourierScaling::Orthonormal}.with_size(size);
            const GramDiagnostics g = gram_diagnostics(spec, to_sample(paths));
            py::dict d;
            d["m"] = g.m;
            d["min_eigenvalue"] = g.min_eigenvalue;
            d["op_norm_inverse"] = g.op_norm_inverse;
            d["L_of_m"] = g.L_of_m;
            d["condition13_lhs"] = g.condition13_lhs;
            d["condition13_bound"] = g.condition13_bound;
            d["singular"] = g.singular;
            d["condition13_holds"] = g.condition13_holds;
            return d;
        },
        py::arg("paths"), py::arg("basis") = "bspline", py::arg("size") = 4, py::arg("interval") = py::none(),
        py::arg("M") = 3);

    m.def(
        "calibrate",
        [](const std::vector<std::string>& models, std::optional<std::vector<double>> kappas, int N, int n, int reps,
           std::uint64_t seed) {
            CalibrationOptions opt;
            opt.N = N;
            opt.n = n;
            opt.N_prime = N;
            opt.reps = reps;
            opt.seed = seed;
            std::vector<ModelId> ids;
            for (const auto& s : models) ids.push_back(model_id(s));
            const CalibrationResult r = calibrate_kappa(ids, kappas ? *kappas : default_kappa_set(), opt);
            py::dict d;
            d["kappa_star"] = r.kappa_star;
            d["kappas"] = r.kappas;
            d["mean_loss"] = r.mean_loss;
            d["worst_case"] = r.worst_case;
            return d;
        },
        py::arg("models") = std::vector<std::string>{"C1", "C2", "C3"}, py::arg("kappas") = py::none(),
        py::arg("N") = 100, py::arg("n") = 100, py::arg("reps") = 100, py::arg("seed") = 0);
}
