#include "selmut/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "selmut/dynamics.hpp"
#include "selmut/limits.hpp"
#include "selmut/random.hpp"

namespace selmut {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool below_top(double x, double bound) { return x < bound - merge_tolerance(bound); }

void finish(CheckReport& r) {
    if (r.worst_violation == kNegInf) r.worst_violation = 0.0;
    r.passed = r.worst_violation <= r.tolerance;
}

// Folds a sub-report into an aggregate, keeping the first failing witness.
void absorb(CheckReport& total, const CheckReport& part, const std::string& label) {
    total.cases += part.cases;
    total.skipped += part.skipped;
    if (part.cases > 0 && part.worst_violation > total.worst_violation) {
        total.worst_violation = part.worst_violation;
    }
    if (!part.passed && !total.witness) {
        total.witness = label + (part.witness ? ": " + *part.witness : std::string());
    }
}

std::string describe(const Measure& u) {
    std::ostringstream os;
    os.precision(17);
    os << "{";
    bool first = true;
    for (const auto& a : u.atoms()) {
        os << (first ? "" : ", ") << a.x << ": " << a.m;
        first = false;
    }
    os << "}";
    return os.str();
}

}  // namespace

DominatedPair make_dominated_pair(const Measure& base, double bound, std::span<const double> fractions) {
    if (!base.is_probability()) throw MeasureError("dominated pair: base must be a probability measure");
    if (!base.empty() && upper_support(base) > bound + merge_tolerance(bound)) {
        throw MeasureError("dominated pair: base extends beyond the bound M");
    }
    DominatedPair pair;
    pair.u = base;
    pair.bound = bound;
    std::vector<Atom> v_atoms;
    std::size_t k = 0;
    for (const auto& a : base.atoms()) {
        if (below_top(a.x, bound)) {
            const double f = k < fractions.size() ? std::clamp(fractions[k], 0.0, 1.0) : 0.0;
            ++k;
            const double moved = f * a.m;
            pair.moved_mass += moved;
            v_atoms.push_back({a.x, a.m - moved});
        } else {
            v_atoms.push_back(a);
        }
    }
    v_atoms.push_back({bound, pair.moved_mass});
    pair.v = Measure::from_atoms(std::move(v_atoms));
    return pair;
}

DominatedPair generate_dominated_pair(std::uint64_t seed, const Measure& base, double bound) {
    SplitMix64 rng(seed);
    std::vector<double> fractions(base.size());
    for (auto& f : fractions) f = rng.uniform();
    return make_dominated_pair(base, bound, fractions);
}

Measure random_probability_measure(std::uint64_t seed, double bound, int max_atoms) {
    SplitMix64 rng(seed);
    const int n = rng.between(1, std::max(1, max_atoms));
    std::vector<Atom> atoms;
    for (int j = 0; j < n; ++j) {
        const double roll = rng.uniform();
        double x;
        if (roll < 0.1) {
            x = 0.0;
        } else if (roll < 0.3) {
            x = bound;
        } else if (roll < 0.5) {
            x = bound * rng.between(1, 9) / 10.0;  // coarse grid, shared across draws
        } else {
            x = bound * rng.uniform();
        }
        atoms.push_back({x, 0.05 + 0.95 * rng.uniform()});
    }
    if (std::all_of(atoms.begin(), atoms.end(), [](const Atom& a) { return a.x == 0.0; })) {
        atoms.push_back({bound * (0.5 + 0.5 * rng.uniform()), 0.05 + 0.95 * rng.uniform()});
    }
    return Measure::from_atoms(std::move(atoms), bound).normalized();
}

CheckReport check_assumption1(const FitnessModel& model, std::span<const DominatedPair> pairs,
                              std::span<const double> grid) {
    CheckReport r;
    r.check = "assumption1";
    r.worst_violation = kNegInf;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto& pair = pairs[k];
        const SelectionContext su(model, pair.u);
        const SelectionContext sv(model, pair.v);
        if (su.degenerate() || sv.degenerate()) {
            ++r.skipped;
            continue;
        }
        ++r.cases;
        for (double x : grid) {
            const double violation = sv.advantage(x) - su.advantage(x);
            if (violation > r.worst_violation) {
                r.worst_violation = violation;
                if (violation > r.tolerance) {
                    r.witness = "pair " + std::to_string(k) + " at x=" + std::to_string(x) +
                                ": u=" + describe(pair.u) + " v=" + describe(pair.v);
                }
            }
        }
    }
    finish(r);
    return r;
}

double kingman_c(double a, double eps) { return 1.0 / (1.0 - eps * (1.0 - a)); }

namespace {

// Shared hypothesis check for Assumption 2; returns a reason when unmet.
std::optional<std::string> assumption2_hypothesis(const DominatedPair& pair, double a, double eps) {
    if (!(a >= 0.0 && a < pair.bound)) return "a must lie in [0, M)";
    if (!(eps >= 0.0 && eps <= 1.0)) return "eps must lie in [0, 1]";
    const Interval below = Interval::right_open(0.0, pair.bound);
    if (!is_component(restrict(pair.v, below), restrict(pair.u, below), below, 0.0)) {
        return "v_[0,M) is not a component of u_[0,M)";
    }
    if (!(cdf(pair.u, a) >= cdf(pair.v, a) + eps)) return "hypothesis unmet: D_u(a) < D_v(a) + eps";
    return std::nullopt;
}

}  // namespace

CheckReport check_assumption2_kingman(const DominatedPair& pair, double a, double eps) {
    if (std::abs(pair.bound - 1.0) > 1e-12) {
        throw std::invalid_argument("assumption 2 (kingman) is checked on [0, 1]; normalize M to 1");
    }
    CheckReport r;
    r.check = "assumption2_kingman";
    const double c = kingman_c(a, eps);
    r.metrics["c"] = c;
    if (auto unmet = assumption2_hypothesis(pair, a, eps)) {
        r.skipped = 1;
        r.witness = *unmet;
        return r;
    }
    const FitnessModel model = FitnessModel::kingman();
    const SelectionContext su(model, pair.u);
    const SelectionContext sv(model, pair.v);
    if (su.degenerate() || sv.degenerate()) {
        r.skipped = 1;
        r.witness = "zero mean fitness: degenerate branch excluded from the hypothesis";
        return r;
    }
    r.cases = 1;
    const double lhs = su.advantage(1.0);
    const double rhs = c * sv.advantage(1.0);
    r.metrics["s_M_u"] = lhs;
    r.metrics["c_s_M_v"] = rhs;
    r.worst_violation = rhs - lhs;
    finish(r);
    if (!r.passed) r.witness = "u=" + describe(pair.u) + " v=" + describe(pair.v);
    return r;
}

CheckReport check_assumption2_lenski(const DominatedPair& pair, double a, double eps, double gamma) {
    CheckReport r;
    r.check = "assumption2_lenski";
    r.tolerance = 0.0;
    if (auto unmet = assumption2_hypothesis(pair, a, eps)) {
        r.skipped = 1;
        r.witness = *unmet;
        return r;
    }
    const FitnessModel model = FitnessModel::lenski(gamma);
    const SelectionContext su(model, pair.u);
    const SelectionContext sv(model, pair.v);
    if (su.degenerate() || sv.degenerate()) {
        r.skipped = 1;
        r.witness = "degenerate population excluded from the hypothesis";
        return r;
    }
    r.cases = 1;
    const double lhs = su.advantage(pair.bound);
    const double rhs = sv.advantage(pair.bound);
    r.metrics["margin"] = lhs / rhs - 1.0;
    r.worst_violation = rhs - lhs;
    // strict inequality
    r.passed = r.worst_violation < 0.0;
    if (!r.passed) r.witness = "u=" + describe(pair.u) + " v=" + describe(pair.v);
    return r;
}

CheckReport check_coupling(const FitnessModel& model, const Measure& h0, const Measure& hhat0,
                           const Measure& q, double beta, int n, double bound) {
    const Interval below = Interval::right_open(0.0, bound);
    if (!is_component(restrict(hhat0, below), restrict(h0, below), below, 0.0)) {
        throw std::invalid_argument("check_coupling: hhat0_[0,M) must be a component of h0_[0,M)");
    }
    CheckReport r;
    r.check = "coupling";
    r.worst_violation = kNegInf;

    Measure h = h0, hhat = hhat0;
    for (int i = 0; i <= n; ++i) {
        double worst = kNegInf;
        for (const auto& e : align(hhat, h)) {
            // below M: hhat <= h; at M: h <= hhat
            const double gap = below_top(e.x, bound) ? e.mu - e.mv : e.mv - e.mu;
            worst = std::max(worst, gap);
        }
        ++r.cases;
        if (worst > r.worst_violation) {
            r.worst_violation = worst;
            if (worst > r.tolerance) r.witness = "step " + std::to_string(i);
        }
        if (i == n) break;
        h = step(model, h, q, beta);
        hhat = step(model, hhat, q, beta);
    }
    finish(r);
    return r;
}

AtomMassSeries atom_mass_series(const FitnessModel& model, const Measure& p0, const Measure& q,
                                double beta, int n, double bound) {
    if (n < 0) throw std::invalid_argument("atom_mass_recursion: n must be >= 0");
    std::vector<Measure> states{p0};
    for (int i = 0; i < n; ++i) states.push_back(step(model, states.back(), q, beta));

    // s(M, p_k); the degenerate branch multiplies p_k({M}) by 1 - beta only.
    std::vector<double> s(states.size());
    for (std::size_t k = 0; k < states.size(); ++k) {
        const SelectionContext ctx(model, states[k]);
        s[k] = ctx.degenerate() ? 1.0 : ctx.advantage(bound);
    }

    const double p0_top = p0.mass_at(bound);
    const double q_top = q.mass_at(bound);
    AtomMassSeries out;
    for (int i = 0; i <= n; ++i) {
        double r1 = std::pow(1.0 - beta, i);
        for (int k = 0; k < i; ++k) r1 *= s[static_cast<std::size_t>(k)];

        // R_{i,2} = beta sum_k (1-beta)^k prod_{j=1..k} s(M, p_{i-j})
        double r2 = 0.0;
        double prod = 1.0;
        for (int k = 0; k < i; ++k) {
            if (k > 0) prod *= s[static_cast<std::size_t>(i - k)];
            r2 += std::pow(1.0 - beta, k) * prod;
        }
        r2 *= beta;

        out.recursion.push_back(r1 * p0_top + r2 * q_top);
        out.direct.push_back(states[static_cast<std::size_t>(i)].mass_at(bound));
    }
    return out;
}

std::vector<double> atom_mass_recursion(const FitnessModel& model, const Measure& p0, const Measure& q,
                                        double beta, int n, double bound) {
    return atom_mass_series(model, p0, q, beta, n, bound).recursion;
}

CheckReport assumption3_diagnostic(const FitnessModel& model, const Measure& q, double beta,
                                   std::span<const double> a_values, double bound, double final_bound) {
    CheckReport r;
    r.check = "assumption3";
    r.tolerance = 1e-3;
    const Measure reference = limit_for(model, q, beta, bound).distribution();
    double worst_increase = 0.0;
    for (double a : a_values) {
        const Measure pa = limit_for(model, q, beta, a).distribution();
        const double d = levy_distance(pa, reference);
        if (!r.series.empty()) worst_increase = std::max(worst_increase, d - r.series.back());
        r.series.push_back(d);
        ++r.cases;
    }
    r.worst_violation = worst_increase;
    r.metrics["final_distance"] = r.series.empty() ? 0.0 : r.series.back();
    r.metrics["final_bound"] = final_bound;
    const bool monotone = worst_increase <= r.tolerance;
    const bool close = r.series.empty() || r.series.back() <= final_bound;
    r.passed = monotone && close;
    if (!monotone) {
        r.witness = "levy distance increased along a";
    } else if (!close) {
        r.witness = "final levy distance " + std::to_string(r.series.back()) + " exceeds bound";
    }
    return r;
}

CheckReport assumption1_suite(const FitnessModel& model, std::uint64_t seed, int pairs, double bound) {
    std::vector<DominatedPair> generated;
    SplitMix64 seeds(seed);
    for (int k = 0; k < pairs; ++k) {
        const Measure base = random_probability_measure(seeds.next(), bound);
        generated.push_back(generate_dominated_pair(seeds.next(), base, bound));
    }
    std::vector<double> grid;
    for (int j = 0; j <= 20; ++j) grid.push_back(bound * j / 20.0);
    CheckReport r = check_assumption1(model, generated, grid);
    r.check = "assumption1_" + model.name();
    r.seeds = {seed};
    return r;
}

CheckReport assumption2_suite(const FitnessModel& model, std::uint64_t seed, int pairs) {
    CheckReport total;
    total.check = "assumption2_" + model.name();
    total.seeds = {seed};
    total.worst_violation = kNegInf;
    if (model.kind() == FitnessModel::Kind::lenski) total.tolerance = 0.0;
    SplitMix64 rng(seed);
    double min_margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < pairs; ++k) {
        const Measure base = random_probability_measure(rng.next(), 1.0);
        const DominatedPair pair = generate_dominated_pair(rng.next(), base, 1.0);
        const double a = rng.uniform();
        const double gap = cdf(pair.u, a) - cdf(pair.v, a);
        const double eps = gap * (0.1 + 0.9 * rng.uniform());
        if (!(eps >= 1e-3)) {
            ++total.skipped;
            continue;
        }
        CheckReport part;
        if (model.kind() == FitnessModel::Kind::kingman) {
            part = check_assumption2_kingman(pair, a, eps);
        } else if (model.kind() == FitnessModel::Kind::lenski) {
            part = check_assumption2_lenski(pair, a, eps, model.gamma());
            if (part.cases > 0) min_margin = std::min(min_margin, part.metrics["margin"]);
        } else {
            throw std::invalid_argument("assumption 2 has no check for custom models");
        }
        absorb(total, part, "pair " + std::to_string(k));
    }
    if (model.kind() == FitnessModel::Kind::lenski && total.cases > 0) {
        total.metrics["min_margin"] = min_margin;
    }
    if (total.worst_violation == kNegInf) total.worst_violation = 0.0;
    total.passed = model.kind() == FitnessModel::Kind::lenski ? total.worst_violation < 0.0 || total.cases == 0
                                                            : total.worst_violation <= total.tolerance;
    return total;
}

CheckReport coupling_suite(const FitnessModel& model, std::uint64_t seed, int pairs, int steps,
                           double bound) {
    CheckReport total;
    total.check = "coupling_" + model.name();
    total.seeds = {seed};
    total.worst_violation = kNegInf;
    SplitMix64 rng(seed);
    for (int k = 0; k < pairs; ++k) {
        const Measure h0 = random_probability_measure(rng.next(), bound);
        const Measure q = random_probability_measure(rng.next(), bound);
        const double beta = 0.05 + 0.9 * rng.uniform();
        const std::uint64_t pair_seed = rng.next();
        // Every fourth case couples against delta_M, the bound behind p_i({M}) <= p^_i({M}).
        const Measure hhat0 = (k % 4 == 0) ? Measure::dirac(bound)
                                           : generate_dominated_pair(pair_seed, h0, bound).v;
        const CheckReport part = check_coupling(model, h0, hhat0, q, beta, steps, bound);
        absorb(total, part, "pair " + std::to_string(k));
    }
    finish(total);
    return total;
}

CheckReport recursion_suite(const FitnessModel& model, std::uint64_t seed, int scenarios, int steps) {
    CheckReport total;
    total.check = "atom_mass_recursion_" + model.name();
    total.seeds = {seed};
    total.worst_violation = kNegInf;
    SplitMix64 rng(seed);
    for (int k = 0; k < scenarios; ++k) {
        const double bound = 1.0;
        Measure p0 = random_probability_measure(rng.next(), bound);
        if (p0.mass_at(bound) == 0.0) {
            p0 = p0.combine(0.5, Measure::dirac(bound), 0.5);
        }
        const Measure q = random_probability_measure(rng.next(), bound);
        const double beta = 0.05 + 0.9 * rng.uniform();
        const auto series = atom_mass_series(model, p0, q, beta, steps, bound);
        double worst = 0.0;
        for (std::size_t i = 0; i < series.direct.size(); ++i) {
            worst = std::max(worst, std::abs(series.recursion[i] - series.direct[i]));
        }
        ++total.cases;
        if (worst > total.worst_violation) {
            total.worst_violation = worst;
            if (worst > total.tolerance) total.witness = "scenario " + std::to_string(k);
        }
    }
    finish(total);
    return total;
}

}  // namespace selmut
