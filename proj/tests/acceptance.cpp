// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "selmut/dynamics.hpp"
#include "selmut/limits.hpp"
#include "selmut/verify.hpp"

using namespace selmut;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Solver residuals gathered from criteria 2, 4 and 5 for criterion 11.
struct SolverLog {
    double worst_residual = 0.0;
    int worst_iterations = 0;
    int invocations = 0;
    void add(double residual, int iterations) {
        worst_residual = std::max(worst_residual, residual);
        worst_iterations = std::max(worst_iterations, iterations);
        ++invocations;
    }
    void add(const Trajectory& t) {
        for (const auto& d : t.diagnostics) {
            if (d.cycle_time_residual) add(*d.cycle_time_residual, *d.cycle_time_iterations);
        }
    }
} solver_log;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

const auto kingman = FitnessModel::kingman();
const auto lenski = FitnessModel::lenski(100.0);

Outcome criterion1() {
    const auto q = Measure::dirac(0);
    IterateOptions opts;
    opts.keep_history = true;
    const auto t = iterate(kingman, Measure::dirac(1), q, 0.5, {}, opts);
    const auto target = make_measure({{0, 0.5}, {1, 0.5}});
    const auto limit = kingman_limit(q, 0.5, 1).distribution();
    const bool exact = t.history.size() > 2 && t.history[2] == target;
    const double gap = total_variation(t.history.at(2), limit);
    return {exact && gap <= 1e-12, "p_2 exact=" + std::string(exact ? "yes" : "no") + " TV(p_2,limit)=" + fmt(gap)};
}

Outcome criterion2() {
    const auto q = make_measure({{0.2, 0.5}, {0.4, 0.5}});
    const double crit = kingman_criterion(q, 0.8, 1);
    const auto limit = kingman_limit(q, 0.8, 1);
    if (limit.solve) solver_log.add(limit.solve->residual, limit.solve->iterations);
    const auto t = iterate(kingman, Measure::dirac(1), q, 0.8, {10000, 1e-14});
    const double gap = total_variation(t.final_state, limit.distribution());
    const double atom = t.final_state.mass_at(1);
    const bool ok = crit > 1 && limit.case_tag == LimitCase::case1 && gap <= 1e-8 && atom < 1e-8;
    return {ok, "criterion=" + fmt(crit) + " TV=" + fmt(gap) + " atom(1)=" + fmt(atom) +
                    " iters=" + std::to_string(t.iterations())};
}

Outcome criterion3() {
    const auto q = discretize_family(Uniform{0, 0.5}, 256, 1.0);
    const double crit = kingman_criterion(q, 0.5, 1);
    const auto limit = kingman_limit(q, 0.5, 1);
    const double self = std::abs(limit.atom_at_a - (1 - crit));
    const auto t = iterate(kingman, Measure::dirac(1), q, 0.5, {100000, 1e-300});
    const double atom_gap = std::abs(t.final_state.mass_at(1) - limit.atom_at_a);
    const double ks = kolmogorov_distance(t.final_state, limit.distribution(), Interval::closed(0, 0.5));
    const bool ok = limit.case_tag == LimitCase::case2 && self <= 1e-9 && atom_gap <= 1e-4 && ks <= 1e-6;
    return {ok, "atom=" + fmt(limit.atom_at_a) + " |atom-(1-crit)|=" + fmt(self) + " atom gap=" + fmt(atom_gap) +
                    " KS[0,0.5]=" + fmt(ks) + " iters=" + std::to_string(t.iterations())};
}

Outcome criterion4() {
    const double beta = 0.5, gamma = 100;
    const double m0 = beta * gamma / (gamma - 1 + beta);
    const auto limit = lenski_limit(Measure::dirac(0), beta, gamma, 1);
    const double hand = std::max(std::abs(limit.ac_part.mass_at(0) - m0), std::abs(limit.atom_at_a - (1 - m0)));
    const auto t = iterate(lenski, Measure::dirac(1), Measure::dirac(0), beta, {10000, 1e-14});
    solver_log.add(t);
    const double gap = total_variation(t.final_state, limit.distribution());
    return {hand <= 1e-12 && gap <= 1e-10,
            "m0=" + fmt(limit.ac_part.mass_at(0)) + " hand diff=" + fmt(hand) + " TV=" + fmt(gap)};
}

Outcome criterion5() {
    const auto q = make_measure({{0.5, 0.5}, {0.9, 0.5}});
    const double crit = lenski_criterion(q, 0.8, 100, 1);
    const auto limit = lenski_limit(q, 0.8, 100, 1);
    const double residual = limit.solve ? limit.solve->residual : 1.0;
    if (limit.solve) solver_log.add(limit.solve->residual, limit.solve->iterations);
    const auto t = iterate(lenski, Measure::dirac(1), q, 0.8, {10000, 1e-14});
    solver_log.add(t);
    const double gap = total_variation(t.final_state, limit.distribution());
    const bool ok = crit > 1 && limit.case_tag == LimitCase::case1 && residual <= 1e-12 && gap <= 1e-6;
    return {ok, "criterion=" + fmt(crit) + " residual=" + fmt(residual) + " TV=" + fmt(gap)};
}

Outcome criterion6() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0, 1);
    double worst = 0;
    int case1 = 0, case2 = 0;
    for (int i = 0; i < 20; ++i) {
        const bool use_lenski = i % 2 == 1;
        std::vector<Atom> atoms;
        const int n = 1 + static_cast<int>(unit(rng) * 5);
        for (int k = 0; k < n; ++k) atoms.push_back({unit(rng), 0.05 + unit(rng)});
        // Every fourth combination puts mutant mass at M so Case1 is forced.
        if (i % 4 == 0) atoms.push_back({1.0, 0.3});
        const auto q = make_measure(atoms, 1.0).normalized();
        const double beta = 0.05 + 0.9 * unit(rng);
        const auto& model = use_lenski ? lenski : kingman;
        const auto limit = limit_for(model, q, beta, 1.0);
        (limit.case_tag == LimitCase::case1 ? case1 : case2)++;
        const auto p = limit.distribution();
        worst = std::max(worst, total_variation(step(model, p, q, beta), p));
    }
    return {worst <= 1e-10 && case1 > 0 && case2 > 0,
            "worst TV(step(p*),p*)=" + fmt(worst) + " case1=" + std::to_string(case1) +
                " case2=" + std::to_string(case2)};
}

Outcome criterion7() {
    std::string detail;
    bool ok = true;
    for (const auto* model : {&kingman, &lenski}) {
        const auto a1 = assumption1_suite(*model, 7, 1000, 1.0);
        const auto cp = coupling_suite(*model, 8, 100, 200, 1.0);
        ok = ok && a1.passed && a1.cases == 1000 && cp.passed;
        detail += model->name() + ": A1 worst=" + fmt(a1.worst_violation) + " coupling worst=" +
                  fmt(cp.worst_violation) + "; ";
    }
    const auto a2 = assumption2_suite(kingman, 9, 1000);
    ok = ok && a2.passed && a2.cases > a2.skipped;
    detail += "A2 kingman checked=" + std::to_string(a2.cases - a2.skipped) + " worst=" + fmt(a2.worst_violation);
    return {ok, detail};
}

Outcome criterion8() {
    double worst = 0;
    bool ok = true;
    for (const auto* model : {&kingman, &lenski}) {
        const auto r = recursion_suite(*model, 10, 50, 200);
        ok = ok && r.passed && r.cases == 50;
        worst = std::max(worst, r.worst_violation);
    }
    return {ok, "worst |recursion - direct|=" + fmt(worst)};
}

Outcome criterion9() {
    const auto below = Interval::right_open(0, 1);
    const Measure qs[] = {discretize_family(Uniform{0, 1}, 64, 1.0), make_measure({{0.2, 0.5}, {0.4, 0.5}}),
                          make_measure({{0.0, 0.3}, {0.7, 0.4}, {1.0, 0.3}})};
    long pairs = 0;
    bool ok = true;
    IterateOptions opts;
    opts.keep_history = true;
    for (const auto* model : {&kingman, &lenski}) {
        for (const auto& q : qs) {
            const auto t = iterate(*model, Measure::dirac(1), q, 0.5, {1000, 1e-300}, opts);
            for (std::size_t i = 0; i + 1 < t.history.size(); ++i) {
                const auto& p = t.history[i];
                const auto& n = t.history[i + 1];
                ok = ok && is_component(restrict(p, below), restrict(n, below), below, 1e-12) &&
                     n.mass_at(1) <= p.mass_at(1) + 1e-12;
                ++pairs;
            }
        }
    }
    return {ok, std::to_string(pairs) + " consecutive pairs checked"};
}

Outcome criterion10() {
    const double as[] = {0.9, 0.99, 0.999};
    const auto k = assumption3_diagnostic(kingman, Measure::dirac(0), 0.5, as, 1.0, 0.002);
    const auto l = assumption3_diagnostic(lenski, Measure::dirac(0), 0.5, as, 1.0, 0.002);
    auto series = [](const CheckReport& r) {
        std::string s;
        for (double v : r.series) s += fmt(v) + " ";
        return s;
    };
    return {k.passed && l.passed, "kingman " + series(k) + "lenski " + series(l)};
}

Outcome criterion11() {
    const bool ok = solver_log.invocations > 0 && solver_log.worst_residual <= 1e-12 &&
                    solver_log.worst_iterations <= 200;
    return {ok, std::to_string(solver_log.invocations) + " solves, worst residual=" +
                    fmt(solver_log.worst_residual) + " worst iterations=" +
                    std::to_string(solver_log.worst_iterations)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome criterion12() {
    const fs::path base = fs::temp_directory_path() / "selmut_acceptance";
    fs::remove_all(base);
    const std::string scenario = std::string(SELMUT_SCENARIO_DIR) + "/kingman_case1.json";
    for (const char* run : {"a", "b"}) {
        const std::string cmd = std::string("\"") + SELMUT_CLI + "\" compare --scenario \"" + scenario +
                                "\" --out-dir \"" + (base / run).string() + "\" > /dev/null";
        if (std::system(cmd.c_str()) != 0) return {false, "CLI run failed: " + cmd};
    }
    int files = 0;
    for (const auto& entry : fs::directory_iterator(base / "a")) {
        const auto other = base / "b" / entry.path().filename();
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
            return {false, entry.path().filename().string() + " differs"};
        }
        ++files;
    }
    return {files >= 4, std::to_string(files) + " files byte-identical"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
        double budget_ms;  // 0: no runtime bound
    };
    const std::vector<Criterion> criteria = {
        {1, "kingman two-atom fixed point", criterion1, 1},
        {2, "kingman case 1 convergence", criterion2, 1000},
        {3, "kingman case 2 with discretized q", criterion3, 10000},
        {4, "lenski two-atom fixed point", criterion4, 1000},
        {5, "lenski case 1 convergence", criterion5, 1000},
        {6, "fixed-point residual suite", criterion6, 0},
        {7, "assumption property suites", criterion7, 30000},
        {8, "atom-mass recursion oracle", criterion8, 0},
        {9, "monotonicity from delta_M", criterion9, 0},
        {10, "assumption 3 diagnostic", criterion10, 0},
        {11, "root-finder contract", criterion11, 0},
        {12, "CLI determinism", criterion12, 0},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_ms > 0 && ms >= c.budget_ms) {
            o.pass = false;
            o.detail += " (over budget " + fmt(c.budget_ms) + " ms)";
        }
        if (!o.pass) ++failures;
        std::printf("[%s] criterion %2d: %s | %s | %.1f ms\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), ms);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
