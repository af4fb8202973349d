#include "selmut/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "selmut/limits.hpp"
#include "selmut/verify.hpp"

namespace selmut {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ScenarioError(path + ": " + message);
}

void reject_unknown_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; })) {
            fail(path + "." + key, "unknown field");
        }
    }
}

const json& require(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) fail(path + "." + key, "missing required field");
    return obj.at(key);
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
}

long integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<long>();
}

FitnessModel parse_model(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    reject_unknown_keys(j, path, {"kind", "gamma"});
    const json& kind = require(j, "kind", path);
    if (!kind.is_string()) fail(path + ".kind", "expected a string");
    const auto k = kind.get<std::string>();
    if (k == "kingman") {
        if (j.contains("gamma")) fail(path + ".gamma", "only the lenski model takes gamma");
        return FitnessModel::kingman();
    }
    if (k == "lenski") {
        const double gamma = number(require(j, "gamma", path), path + ".gamma");
        if (!(gamma > 1.0)) fail(path + ".gamma", "gamma must exceed 1");
        return FitnessModel::lenski(gamma);
    }
    fail(path + ".kind", "expected \"kingman\" or \"lenski\", got \"" + k + "\"");
}

Measure parse_measure(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    Measure m;
    try {
        if (j.contains("atoms")) {
            reject_unknown_keys(j, path, {"atoms"});
            m = measure_from_json(j);
        } else if (j.contains("family")) {
            const json& fam = j.at("family");
            if (!fam.is_string()) fail(path + ".family", "expected a string");
            const auto name = fam.get<std::string>();
            const long n = integer(require(j, "n", path), path + ".n");
            if (n < 1 || n > 10'000'000) fail(path + ".n", "n must lie in [1, 1e7]");
            const double lo = number(require(j, "lo", path), path + ".lo");
            const double hi = number(require(j, "hi", path), path + ".hi");
            FamilySpec spec;
            if (name == "uniform") {
                reject_unknown_keys(j, path, {"family", "lo", "hi", "n"});
                spec = Uniform{lo, hi};
            } else if (name == "power") {
                reject_unknown_keys(j, path, {"family", "k", "lo", "hi", "n"});
                spec = Power{number(require(j, "k", path), path + ".k"), lo, hi};
            } else if (name == "truncated_exponential") {
                reject_unknown_keys(j, path, {"family", "rate", "lo", "hi", "n"});
                spec = TruncatedExponential{number(require(j, "rate", path), path + ".rate"), lo, hi};
            } else {
                fail(path + ".family", "unknown family \"" + name + "\"");
            }
            m = discretize_family(spec, static_cast<int>(n));
        } else {
            fail(path, "expected \"atoms\" or \"family\"");
        }
    } catch (const MeasureError& e) {
        fail(path, e.what());
    }
    if (m.empty() || !m.is_probability()) fail(path, "measure must be a probability measure (total mass 1)");
    return m;
}

OutputKind parse_output(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    const auto s = v.get<std::string>();
    for (auto k : {OutputKind::trajectory_csv, OutputKind::limit_json, OutputKind::diagnostics_csv,
                   OutputKind::checks_json}) {
        if (s == to_string(k)) return k;
    }
    fail(path, "unknown output \"" + s + "\"");
}

VerifySettings parse_verify(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    reject_unknown_keys(j, path,
                        {"pairs", "coupling_pairs", "coupling_steps", "recursion_scenarios", "recursion_steps",
                         "a_fractions", "assumption3_bound"});
    VerifySettings v;
    auto count = [&](const char* key, int& field) {
        if (!j.contains(key)) return;
        const long n = integer(j.at(key), path + "." + key);
        if (n < 0 || n > 1'000'000) fail(path + "." + key, "must lie in [0, 1e6]");
        field = static_cast<int>(n);
    };
    count("pairs", v.pairs);
    count("coupling_pairs", v.coupling_pairs);
    count("coupling_steps", v.coupling_steps);
    count("recursion_scenarios", v.recursion_scenarios);
    count("recursion_steps", v.recursion_steps);
    if (j.contains("a_fractions")) {
        const json& arr = j.at("a_fractions");
        if (!arr.is_array()) fail(path + ".a_fractions", "expected an array");
        v.a_fractions.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto p = path + ".a_fractions[" + std::to_string(i) + "]";
            const double f = number(arr[i], p);
            if (!(f > 0.0 && f <= 1.0)) fail(p, "must lie in (0, 1]");
            if (!v.a_fractions.empty() && f <= v.a_fractions.back()) fail(p, "must be increasing");
            v.a_fractions.push_back(f);
        }
    }
    if (j.contains("assumption3_bound")) {
        v.assumption3_bound = number(j.at("assumption3_bound"), path + ".assumption3_bound");
    }
    return v;
}

}  // namespace

const char* to_string(OutputKind kind) {
    switch (kind) {
        case OutputKind::trajectory_csv: return "trajectory_csv";
        case OutputKind::limit_json: return "limit_json";
        case OutputKind::diagnostics_csv: return "diagnostics_csv";
        case OutputKind::checks_json: return "checks_json";
    }
    return "";
}

ScenarioConfig parse_scenario_json(const json& j, std::string name) {
    const std::string root = "scenario";
    if (!j.is_object()) fail(root, "expected a JSON object");
    reject_unknown_keys(j, root, {"model", "beta", "p0", "q", "stop", "seed", "outputs", "verify", "name"});

    ScenarioConfig c;
    c.name = std::move(name);
    if (j.contains("name")) {
        if (!j.at("name").is_string()) fail(root + ".name", "expected a string");
        c.name = j.at("name").get<std::string>();
    }
    c.model = parse_model(require(j, "model", root), root + ".model");
    c.beta = number(require(j, "beta", root), root + ".beta");
    if (!(c.beta > 0.0 && c.beta < 1.0)) fail(root + ".beta", "beta must lie in (0,1)");
    c.p0 = parse_measure(require(j, "p0", root), root + ".p0");
    c.q = parse_measure(require(j, "q", root), root + ".q");

    if (j.contains("stop")) {
        const json& s = j.at("stop");
        const std::string path = root + ".stop";
        if (!s.is_object()) fail(path, "expected an object");
        reject_unknown_keys(s, path, {"max_iterations", "tv_tolerance"});
        if (s.contains("max_iterations")) {
            c.stop.max_iterations = integer(s.at("max_iterations"), path + ".max_iterations");
            if (c.stop.max_iterations < 1) fail(path + ".max_iterations", "must be >= 1");
        }
        if (s.contains("tv_tolerance")) {
            c.stop.tv_tolerance = number(s.at("tv_tolerance"), path + ".tv_tolerance");
            if (!(c.stop.tv_tolerance > 0.0)) fail(path + ".tv_tolerance", "must be > 0");
        }
    }
    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_unsigned()) fail(root + ".seed", "expected a nonnegative integer");
        c.seed = s.get<std::uint64_t>();
    }
    if (j.contains("outputs")) {
        const json& outs = j.at("outputs");
        if (!outs.is_array()) fail(root + ".outputs", "expected an array");
        for (std::size_t i = 0; i < outs.size(); ++i) {
            const auto kind = parse_output(outs[i], root + ".outputs[" + std::to_string(i) + "]");
            if (std::find(c.outputs.begin(), c.outputs.end(), kind) == c.outputs.end()) c.outputs.push_back(kind);
        }
    }
    if (j.contains("verify")) c.verify = parse_verify(j.at("verify"), root + ".verify");
    return c;
}

ScenarioConfig parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError(path.string() + ": cannot open scenario file");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError(path.string() + ": invalid JSON: " + e.what());
    }
    return parse_scenario_json(j, path.stem().string());
}

Command parse_command(const std::string& text) {
    if (text == "iterate") return Command::iterate;
    if (text == "limit") return Command::limit;
    if (text == "verify") return Command::verify;
    if (text == "compare") return Command::compare;
    throw ScenarioError("unknown command \"" + text + "\"");
}

namespace {

std::vector<OutputKind> default_outputs(Command command) {
    switch (command) {
        case Command::iterate: return {OutputKind::trajectory_csv, OutputKind::diagnostics_csv};
        case Command::limit: return {OutputKind::limit_json};
        case Command::verify: return {OutputKind::checks_json};
        case Command::compare: return {OutputKind::trajectory_csv, OutputKind::limit_json};
    }
    return {};
}

bool wants(const std::vector<OutputKind>& outs, OutputKind k) {
    return std::find(outs.begin(), outs.end(), k) != outs.end();
}

void write_text(const std::filesystem::path& path, const std::string& text, RunResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
    result.written.push_back(path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<CheckReport> run_checks(const ScenarioConfig& c, const ConventionStar& cs) {
    const auto& v = c.verify;
    const double M = cs.bound;
    std::vector<CheckReport> reports;
    reports.push_back(assumption1_suite(c.model, c.seed, v.pairs, M));
    reports.push_back(assumption2_suite(c.model, c.seed + 1, v.pairs));
    reports.push_back(coupling_suite(c.model, c.seed + 2, v.coupling_pairs, v.coupling_steps, M));
    reports.push_back(recursion_suite(c.model, c.seed + 3, v.recursion_scenarios, v.recursion_steps));

    // Scenario-specific: coupling against delta_M and the atom-mass oracle on p0, q.
    CheckReport own_coupling =
        check_coupling(c.model, cs.p0, Measure::dirac(M), cs.q, c.beta, v.coupling_steps, M);
    own_coupling.check = "coupling_scenario_vs_delta_M";
    reports.push_back(own_coupling);

    const auto series = atom_mass_series(c.model, cs.p0, cs.q, c.beta, v.recursion_steps, M);
    CheckReport own_recursion;
    own_recursion.check = "atom_mass_recursion_scenario";
    for (std::size_t i = 0; i < series.direct.size(); ++i) {
        own_recursion.worst_violation =
            std::max(own_recursion.worst_violation, std::abs(series.recursion[i] - series.direct[i]));
    }
    own_recursion.cases = series.direct.size();
    own_recursion.passed = own_recursion.worst_violation <= own_recursion.tolerance;
    reports.push_back(own_recursion);

    std::vector<double> a_values;
    for (double f : v.a_fractions) a_values.push_back(f * M);
    reports.push_back(assumption3_diagnostic(c.model, cs.q, c.beta, a_values, M, v.assumption3_bound));
    for (auto& r : reports) {
        if (r.seeds.empty()) r.seeds = {c.seed};
    }
    return reports;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& c, Command command, const std::filesystem::path& out_dir) {
    std::vector<OutputKind> outputs = default_outputs(command);
    for (auto k : c.outputs) {
        if (!wants(outputs, k)) outputs.push_back(k);
    }
    const bool need_trajectory = command == Command::iterate || command == Command::compare ||
                                 wants(outputs, OutputKind::trajectory_csv) ||
                                 wants(outputs, OutputKind::diagnostics_csv);
    const bool need_limit = command == Command::limit || command == Command::compare ||
                            wants(outputs, OutputKind::limit_json);
    const bool need_checks = command == Command::verify || wants(outputs, OutputKind::checks_json);

    std::filesystem::create_directories(out_dir);
    RunResult result;

    const ConventionStar cs = apply_convention_star(c.p0, c.q, c.model, c.beta);
    const double M = cs.bound;

    std::optional<Trajectory> traj;
    if (need_trajectory) {
        IterateOptions opts;
        opts.bound = M;
        traj = iterate(c.model, cs.p0, cs.q, c.beta, c.stop, opts);
        result.summary.push_back("trajectory: " + std::to_string(traj->iterations()) + " iterations, " +
                                 to_string(traj->stop_reason));
    }
    std::optional<LimitResult> limit;
    if (need_limit) {
        limit = limit_for(c.model, cs.q, c.beta, M);
        result.summary.push_back(std::string("limit: ") + to_string(limit->case_tag) +
                                 ", atom at M = " + format_double(limit->atom_at_a));
    }

    if (wants(outputs, OutputKind::trajectory_csv)) {
        std::ostringstream diag, fin;
        write_diagnostics_csv(diag, *traj);
        write_measure_csv(fin, traj->final_state);
        write_text(out_dir / "trajectory.csv", diag.str(), result);
        write_text(out_dir / "final_state.csv", fin.str(), result);
    }
    if (wants(outputs, OutputKind::diagnostics_csv)) {
        std::ostringstream os;
        os << "key,value\n";
        os << "model," << c.model.name() << "\n";
        if (c.model.kind() == FitnessModel::Kind::lenski) os << "gamma," << format_double(c.model.gamma()) << "\n";
        os << "beta," << format_double(c.beta) << "\n";
        os << "M," << format_double(M) << "\n";
        os << "convention_star_applied," << (cs.applied ? "true" : "false") << "\n";
        if (cs.applied) os << "convention_star_note,p0 replaced by one step because m_q > m_p0\n";
        os << "iterations," << traj->iterations() << "\n";
        os << "stop_reason," << to_string(traj->stop_reason) << "\n";
        os << "final_tv_delta,"
           << (traj->diagnostics.empty() ? "" : format_double(traj->diagnostics.back().tv_delta)) << "\n";
        os << "terminal_atom_mass_at_M," << format_double(traj->final_state.mass_at(M)) << "\n";
        if (limit) {
            const auto rep = condensation_report(*limit, *traj);
            os << "limit_case," << to_string(limit->case_tag) << "\n";
            os << "limit_atom_at_M," << format_double(rep.limit_atom) << "\n";
            os << "condensation," << (rep.condensation ? "true" : "false") << "\n";
        }
        write_text(out_dir / "diagnostics.csv", os.str(), result);
    }
    if (wants(outputs, OutputKind::limit_json)) {
        write_text(out_dir / "limit.json", dump(limit_to_json(*limit)), result);
    }
    if (command == Command::compare) {
        const Measure p_star = limit->distribution();
        const auto rep = condensation_report(*limit, *traj);
        json j;
        j["iterations"] = traj->iterations();
        j["stop_reason"] = to_string(traj->stop_reason);
        j["total_variation"] = total_variation(traj->final_state, p_star);
        j["levy"] = levy_distance(traj->final_state, p_star);
        j["kolmogorov"] = kolmogorov_distance(traj->final_state, p_star);
        j["limit_atom_at_M"] = rep.limit_atom;
        j["terminal_atom_mass_at_M"] = rep.terminal_atom_mass_at_M;
        j["condensation"] = rep.condensation;
        write_text(out_dir / "compare.json", dump(j), result);
        result.summary.push_back("compare: TV gap " + format_double(j["total_variation"].get<double>()));
    }
    if (need_checks) {
        const auto reports = run_checks(c, cs);
        json arr = json::array();
        std::size_t failed = 0;
        for (const auto& r : reports) {
            arr.push_back(report_to_json(r));
            if (!r.passed) ++failed;
        }
        write_text(out_dir / "checks.json", dump({{"checks", arr}, {"passed", failed == 0}}), result);
        result.summary.push_back("checks: " + std::to_string(reports.size() - failed) + " passed, " +
                                 std::to_string(failed) + " failed");
    }
    return result;
}

json scenario_schema() {
    const json measure = {
        {"oneOf",
         json::array({
             {{"type", "object"},
              {"required", {"atoms"}},
              {"properties",
               {{"atoms",
                 {{"type", "array"},
                  {"items",
                   {{"type", "object"},
                    {"required", {"x", "m"}},
                    {"properties", {{"x", {{"type", "number"}, {"minimum", 0}}},
                                    {"m", {{"type", "number"}, {"minimum", 0}}}}}}}}}}}},
             {{"type", "object"},
              {"required", {"family", "lo", "hi", "n"}},
              {"properties",
               {{"family", {{"enum", {"uniform", "power", "truncated_exponential"}}}},
                {"lo", {{"type", "number"}}},
                {"hi", {{"type", "number"}}},
                {"k", {{"type", "number"}, {"description", "power family: density proportional to x^k"}}},
                {"rate", {{"type", "number"}, {"description", "truncated_exponential: density e^{-rate x}"}}},
                {"n", {{"type", "integer"}, {"minimum", 1}}}}}},
         })}};
    return {
        {"$schema", "https://json-schema.org/draft/2020-12/schema"},
        {"title", "selmut scenario"},
        {"type", "object"},
        {"required", {"model", "beta", "p0", "q"}},
        {"additionalProperties", false},
        {"properties",
         {{"name", {{"type", "string"}}},
          {"model",
           {{"type", "object"},
            {"required", {"kind"}},
            {"properties", {{"kind", {{"enum", {"kingman", "lenski"}}}},
                            {"gamma", {{"type", "number"}, {"exclusiveMinimum", 1}}}}}}},
          {"beta", {{"type", "number"}, {"exclusiveMinimum", 0}, {"exclusiveMaximum", 1}}},
          {"p0", measure},
          {"q", measure},
          {"stop",
           {{"type", "object"},
            {"properties", {{"max_iterations", {{"type", "integer"}, {"minimum", 1}, {"default", 100000}}},
                            {"tv_tolerance", {{"type", "number"}, {"exclusiveMinimum", 0}, {"default", 1e-12}}}}}}},
          {"seed", {{"type", "integer"}, {"minimum", 0}, {"default", 0}}},
          {"outputs",
           {{"type", "array"},
            {"items", {{"enum", {"trajectory_csv", "limit_json", "diagnostics_csv", "checks_json"}}}}}},
          {"verify",
           {{"type", "object"},
            {"properties",
             {{"pairs", {{"type", "integer"}, {"default", 1000}}},
              {"coupling_pairs", {{"type", "integer"}, {"default", 100}}},
              {"coupling_steps", {{"type", "integer"}, {"default", 200}}},
              {"recursion_scenarios", {{"type", "integer"}, {"default", 50}}},
              {"recursion_steps", {{"type", "integer"}, {"default", 200}}},
              {"a_fractions", {{"type", "array"}, {"items", {{"type", "number"}}}}},
              {"assumption3_bound", {{"type", "number"}, {"default", 0.002}}}}}}}}}};
}

}  // namespace selmut
