#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "selmut/dynamics.hpp"
#include "selmut/fitness.hpp"
#include "selmut/limits.hpp"
#include "selmut/measure.hpp"
#include "selmut/scenario.hpp"
#include "selmut/serialize.hpp"
#include "selmut/verify.hpp"

namespace py = pybind11;
using namespace selmut;

namespace {

using Pairs = std::vector<std::pair<double, double>>;

Measure from_pairs(const Pairs& pairs, double bound) {
    std::vector<Atom> atoms;
    atoms.reserve(pairs.size());
    for (auto [x, m] : pairs) atoms.push_back({x, m});
    return make_measure(std::move(atoms), bound);
}

Pairs to_pairs(const Measure& u) {
    Pairs out;
    for (const auto& a : u.atoms()) out.emplace_back(a.x, a.m);
    return out;
}

py::dict diagnostics_dict(const StepDiagnostics& d) {
    py::dict out;
    out["iteration"] = d.iteration;
    out["tv_delta"] = d.tv_delta;
    out["mean_fitness"] = d.mean_fitness;
    out["atom_mass_at_M"] = d.atom_mass_at_M;
    out["cycle_time"] = d.cycle_time;
    out["degenerate"] = d.degenerate;
    return out;
}

}  // namespace

PYBIND11_MODULE(_selmut, m) {
    m.doc() = "Measure-valued selection-mutation recursions, limits and checks";

    py::register_exception<NoRootError>(m, "NoRootError", PyExc_ValueError);
    py::register_exception<DegeneratePopulation>(m, "DegeneratePopulation", PyExc_ValueError);
    py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);

    py::class_<Interval>(m, "Interval")
        .def_static("closed", &Interval::closed)
        .def_static("right_open", &Interval::right_open)
        .def_static("left_open", &Interval::left_open)
        .def("contains", &Interval::contains)
        .def_readonly("lo", &Interval::lo)
        .def_readonly("hi", &Interval::hi);

    py::class_<Measure>(m, "Measure")
        .def(py::init(&from_pairs), py::arg("atoms"), py::arg("bound") = kInf,
             "Build from (location, mass) pairs; nearby locations merge.")
        .def_static("dirac", &Measure::dirac, py::arg("x"), py::arg("mass") = 1.0)
        .def_property_readonly("atoms", &to_pairs)
        .def_property_readonly("total_mass", &Measure::total_mass)
        .def("mass_at", &Measure::mass_at)
        .def("is_probability", &Measure::is_probability, py::arg("tol") = kProbabilityTolerance)
        .def("normalized", &Measure::normalized)
        .def("to_json", [](const Measure& u) { return measure_to_json(u).dump(); })
        .def_static("from_json", [](const std::string& s) { return measure_from_json(json::parse(s)); })
        .def("__len__", &Measure::size)
        .def(py::self == py::self)
        .def("__repr__", [](const Measure& u) {
            std::string s = "Measure([";
            for (const auto& a : u.atoms()) s += "(" + format_double(a.x) + ", " + format_double(a.m) + "), ";
            if (!u.empty()) s.resize(s.size() - 2);
            return s + "])";
        });

    m.def("cdf", &cdf);
    m.def("upper_support", &upper_support);
    m.def("restrict", &restrict);
    m.def("is_component", &is_component, py::arg("u"), py::arg("v"), py::arg("set"), py::arg("slack") = 1e-12);
    m.def("stoch_dominated", &stoch_dominated, py::arg("u"), py::arg("v"), py::arg("slack") = 1e-12);
    m.def("truncate_at", &truncate_at);
    m.def("total_variation", &total_variation);
    m.def("kolmogorov_distance", py::overload_cast<const Measure&, const Measure&>(&kolmogorov_distance));
    m.def("kolmogorov_distance",
          py::overload_cast<const Measure&, const Measure&, const Interval&>(&kolmogorov_distance));
    m.def("levy_distance", &levy_distance);
    m.def("mean", &mean);
    m.def("exp_moment", &exp_moment);
    m.def(
        "discretize_uniform",
        [](double lo, double hi, int n, double bound) { return discretize_family(Uniform{lo, hi}, n, bound); },
        py::arg("lo"), py::arg("hi"), py::arg("n"), py::arg("bound") = kInf);
    m.def(
        "discretize_power",
        [](double k, double lo, double hi, int n, double bound) {
            return discretize_family(Power{k, lo, hi}, n, bound);
        },
        py::arg("k"), py::arg("lo"), py::arg("hi"), py::arg("n"), py::arg("bound") = kInf);
    m.def(
        "discretize_truncated_exponential",
        [](double rate, double lo, double hi, int n, double bound) {
            return discretize_family(TruncatedExponential{rate, lo, hi}, n, bound);
        },
        py::arg("rate"), py::arg("lo"), py::arg("hi"), py::arg("n"), py::arg("bound") = kInf);

    py::class_<FitnessModel>(m, "FitnessModel")
        .def_static("kingman", &FitnessModel::kingman)
        .def_static("lenski", &FitnessModel::lenski, py::arg("gamma"))
        .def_static("custom", &FitnessModel::custom, py::arg("name"), py::arg("weight"),
                    "weight(x, u) -> float; runs under the GIL")
        .def_property_readonly("name", &FitnessModel::name)
        .def_property_readonly("gamma", &FitnessModel::gamma);

    m.def("lenski_time", &lenski_time);
    m.def("fitness_weight", &fitness_weight);
    m.def("mean_fitness", &mean_fitness);
    m.def("selective_advantage", &selective_advantage);

    py::class_<StoppingRule>(m, "StoppingRule")
        .def(py::init([](long max_iterations, double tv_tolerance) { return StoppingRule{max_iterations, tv_tolerance}; }),
             py::arg("max_iterations") = 100000, py::arg("tv_tolerance") = 1e-12)
        .def_readwrite("max_iterations", &StoppingRule::max_iterations)
        .def_readwrite("tv_tolerance", &StoppingRule::tv_tolerance);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("bound", &Trajectory::bound)
        .def_readonly("initial", &Trajectory::initial)
        .def_readonly("history", &Trajectory::history)
        .def_readonly("final_state", &Trajectory::final_state)
        .def_property_readonly("iterations", &Trajectory::iterations)
        .def_property_readonly("stop_reason", [](const Trajectory& t) { return to_string(t.stop_reason); })
        .def_property_readonly("diagnostics", [](const Trajectory& t) {
            py::list out;
            for (const auto& d : t.diagnostics) out.append(diagnostics_dict(d));
            return out;
        });

    m.def("step", &step, py::arg("model"), py::arg("p"), py::arg("q"), py::arg("beta"));
    m.def(
        "apply_convention_star",
        [](const Measure& p0, const Measure& q, const FitnessModel& model, double beta) {
            const auto c = apply_convention_star(p0, q, model, beta);
            return py::make_tuple(c.p0, c.q, c.bound, c.applied);
        },
        py::arg("p0"), py::arg("q"), py::arg("model"), py::arg("beta"));
    m.def(
        "iterate",
        [](const FitnessModel& model, const Measure& p0, const Measure& q, double beta, const StoppingRule& stop,
           std::optional<double> bound, bool keep_history) {
            IterateOptions opts;
            opts.bound = bound;
            opts.keep_history = keep_history;
            // Custom weights call back into Python and keep the GIL.
            if (model.kind() == FitnessModel::Kind::custom) return iterate(model, p0, q, beta, stop, opts);
            py::gil_scoped_release release;
            return iterate(model, p0, q, beta, stop, opts);
        },
        py::arg("model"), py::arg("p0"), py::arg("q"), py::arg("beta"), py::arg("stop") = StoppingRule{},
        py::arg("bound") = py::none(), py::arg("keep_history") = false);

    py::class_<LimitResult>(m, "LimitResult")
        .def_readonly("ac_part", &LimitResult::ac_part)
        .def_readonly("atom_at_a", &LimitResult::atom_at_a)
        .def_readonly("a", &LimitResult::a)
        .def_readonly("root", &LimitResult::root)
        .def_readonly("criterion", &LimitResult::criterion)
        .def_property_readonly("case", [](const LimitResult& l) { return to_string(l.case_tag); })
        .def_property_readonly("residual",
                               [](const LimitResult& l) { return l.solve ? std::optional(l.solve->residual) : std::nullopt; })
        .def("distribution", &LimitResult::distribution)
        .def("to_json", [](const LimitResult& l) { return limit_to_json(l).dump(); });

    m.def("kingman_criterion", &kingman_criterion);
    m.def("solve_kingman_s", [](const Measure& q, double beta, double a) { return solve_kingman_s(q, beta, a).root; });
    m.def("kingman_limit", &kingman_limit);
    m.def("lenski_criterion", &lenski_criterion);
    m.def("solve_lenski_s", [](const Measure& q, double beta, double gamma, double a) {
        return solve_lenski_s(q, beta, gamma, a).root;
    });
    m.def("lenski_limit", &lenski_limit);
    m.def("limit_for", &limit_for, py::arg("model"), py::arg("q"), py::arg("beta"), py::arg("a"));
    m.def("condensation_report", [](const LimitResult& l, const Trajectory& t) {
        const auto r = condensation_report(l, t);
        py::dict out;
        out["limit_atom"] = r.limit_atom;
        out["terminal_atom_mass_at_M"] = r.terminal_atom_mass_at_M;
        out["max_trajectory_atom_mass_at_M"] = r.max_trajectory_atom_mass_at_M;
        out["condensation"] = r.condensation;
        return out;
    });

    py::class_<CheckReport>(m, "CheckReport")
        .def_readonly("check", &CheckReport::check)
        .def_readonly("passed", &CheckReport::passed)
        .def_readonly("worst_violation", &CheckReport::worst_violation)
        .def_readonly("tolerance", &CheckReport::tolerance)
        .def_readonly("witness", &CheckReport::witness)
        .def_readonly("cases", &CheckReport::cases)
        .def_readonly("skipped", &CheckReport::skipped)
        .def_readonly("metrics", &CheckReport::metrics)
        .def_readonly("series", &CheckReport::series)
        .def("to_json", [](const CheckReport& r) { return report_to_json(r).dump(); });

    m.def("kingman_c", &kingman_c);
    m.def("check_coupling", &check_coupling, py::arg("model"), py::arg("h0"), py::arg("hhat0"), py::arg("q"),
          py::arg("beta"), py::arg("n"), py::arg("bound"));
    m.def("atom_mass_series", [](const FitnessModel& model, const Measure& p0, const Measure& q, double beta, int n,
                                 double bound) {
        const auto s = atom_mass_series(model, p0, q, beta, n, bound);
        return py::make_tuple(s.recursion, s.direct);
    });
    m.def(
        "assumption3_diagnostic",
        [](const FitnessModel& model, const Measure& q, double beta, const std::vector<double>& a_values,
           double bound, double final_bound) {
            return assumption3_diagnostic(model, q, beta, a_values, bound, final_bound);
        },
        py::arg("model"), py::arg("q"), py::arg("beta"), py::arg("a_values"), py::arg("bound"),
        py::arg("final_bound") = 0.002);
    m.def("assumption1_suite", &assumption1_suite, py::arg("model"), py::arg("seed"), py::arg("pairs"),
          py::arg("bound") = 1.0, py::call_guard<py::gil_scoped_release>());
    m.def("assumption2_suite", &assumption2_suite, py::arg("model"), py::arg("seed"), py::arg("pairs"),
          py::call_guard<py::gil_scoped_release>());
    m.def("coupling_suite", &coupling_suite, py::arg("model"), py::arg("seed"), py::arg("pairs"), py::arg("steps"),
          py::arg("bound") = 1.0, py::call_guard<py::gil_scoped_release>());
    m.def("recursion_suite", &recursion_suite, py::arg("model"), py::arg("seed"), py::arg("scenarios"),
          py::arg("steps"), py::call_guard<py::gil_scoped_release>());

    m.def(
        "run_scenario",
        [](const std::filesystem::path& path, const std::string& command, const std::filesystem::path& out_dir) {
            const auto config = parse_scenario(path);
            return run_scenario(config, parse_command(command), out_dir).written;
        },
        py::arg("path"), py::arg("command"), py::arg("out_dir"));
    m.def("scenario_schema", [] { return scenario_schema().dump(2); });
}
