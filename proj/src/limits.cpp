#include "selmut/limits.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace selmut {

namespace {

constexpr double kRootTolerance = 1e-12;
constexpr int kMaxRootIterations = 200;
// Denominators at or below this are treated as the singular side of the bracket.
constexpr double kSingularDenominator = 1e-15;

void check_inputs(double beta, double a) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
    if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("truncation point a must be > 0");
}

bool atom_at_truncation(const Measure& qa, double a) { return qa.mass_at(a) > 0.0; }

// Bisection for sum(s) = 1 on a bracket where sum(lo) and sum(hi) straddle 1.
// `increasing` gives the monotone direction of the sum.
RootSolve bisect(const std::function<double(double)>& sum, double lo, double hi, bool increasing,
                 int iterations_used) {
    const double at_lo = sum(lo) - 1.0;
    const double at_hi = sum(hi) - 1.0;
    if (at_lo * at_hi > 0.0) {
        throw std::logic_error("root bracket does not straddle the solution");
    }
    RootSolve out;
    out.iterations = iterations_used;
    double mid = 0.5 * (lo + hi);
    double r = sum(mid) - 1.0;
    while (std::abs(r) > kRootTolerance && out.iterations < kMaxRootIterations) {
        // Root lies above mid when the sum is still on the "below 1" side.
        const bool root_above = increasing ? r < 0.0 : r > 0.0;
        if (root_above) {
            lo = mid;
        } else {
            hi = mid;
        }
        const double next = 0.5 * (lo + hi);
        if (next == lo || next == hi) break;
        mid = next;
        r = sum(mid) - 1.0;
        ++out.iterations;
    }
    out.root = mid;
    out.residual = std::abs(r);
    return out;
}

}  // namespace

Measure LimitResult::distribution() const {
    std::vector<Atom> atoms(ac_part.atoms().begin(), ac_part.atoms().end());
    if (atom_at_a > 0.0) atoms.push_back({a, atom_at_a});
    return Measure::from_atoms(std::move(atoms));
}

double kingman_criterion(const Measure& q, double beta, double a) {
    check_inputs(beta, a);
    const Measure qa = truncate_at(q, a);
    if (atom_at_truncation(qa, a)) return kInf;
    double acc = 0.0;
    for (const auto& at : qa.atoms()) acc += beta * at.m / (1.0 - at.x / a);
    return acc;
}

RootSolve solve_kingman_s(const Measure& q, double beta, double a) {
    const double criterion = kingman_criterion(q, beta, a);
    if (!(criterion > 1.0)) {
        throw NoRootError("kingman: criterion " + std::to_string(criterion) +
                          " <= 1, no root s_a (condensed case)");
    }
    const Measure qa = truncate_at(q, a);
    const double shift = 1.0 - beta;

    // Decreasing in s on ((1 - beta) a, inf), from the criterion down to beta.
    auto sum = [&](double s) {
        double acc = 0.0;
        for (const auto& at : qa.atoms()) {
            const double denom = s - shift * at.x;
            if (denom <= kSingularDenominator) return kInf;
            acc += beta * s * at.m / denom;
        }
        return acc;
    };

    const double lo = shift * a;
    double hi = 2.0 * lo;
    int used = 0;
    while (sum(hi) >= 1.0 && used < kMaxRootIterations) {
        hi *= 2.0;
        ++used;
    }
    return bisect(sum, lo, hi, /*increasing=*/false, used);
}

LimitResult kingman_limit(const Measure& q, double beta, double a) {
    LimitResult out;
    out.a = a;
    out.criterion = kingman_criterion(q, beta, a);
    const Measure qa = truncate_at(q, a);
    std::vector<Atom> atoms;

    if (out.criterion > 1.0) {
        out.case_tag = LimitCase::case1;
        out.solve = solve_kingman_s(q, beta, a);
        const double s = out.solve->root;
        out.root = s;
        for (const auto& at : qa.atoms()) {
            atoms.push_back({at.x, beta * s * at.m / (s - (1.0 - beta) * at.x)});
        }
        out.ac_part = Measure::from_atoms(std::move(atoms));
    } else {
        out.case_tag = LimitCase::case2;
        out.root = (1.0 - beta) * a;
        double sum = 0.0;
        for (const auto& at : qa.atoms()) {
            const double m = beta * at.m / (1.0 - at.x / a);
            atoms.push_back({at.x, m});
            sum += m;
        }
        out.ac_part = Measure::from_atoms(std::move(atoms));
        out.atom_at_a = std::max(0.0, 1.0 - sum);
    }
    return out;
}

namespace {

// 1 - r^{1 - x/a}
double lenski_case2_denominator(double log_r, double x, double a) {
    return -std::expm1((1.0 - x / a) * log_r);
}

}  // namespace

double lenski_criterion(const Measure& q, double beta, double gamma, double a) {
    check_inputs(beta, a);
    if (!(gamma > 1.0)) throw std::invalid_argument("gamma must exceed 1");
    const Measure qa = truncate_at(q, a);
    if (atom_at_truncation(qa, a)) return kInf;
    const double log_r = std::log((1.0 - beta) / gamma);
    double acc = 0.0;
    for (const auto& at : qa.atoms()) acc += beta * at.m / lenski_case2_denominator(log_r, at.x, a);
    return acc;
}

RootSolve solve_lenski_s(const Measure& q, double beta, double gamma, double a) {
    const double criterion = lenski_criterion(q, beta, gamma, a);
    if (!(criterion > 1.0)) {
        throw NoRootError("lenski: criterion " + std::to_string(criterion) +
                          " <= 1, no root s_a (condensed case)");
    }
    const Measure qa = truncate_at(q, a);
    const double r = (1.0 - beta) / gamma;

    // Increasing in s up to s_star, where the sum equals the criterion.
    auto sum = [&](double s) {
        double acc = 0.0;
        for (const auto& at : qa.atoms()) {
            const double denom = 1.0 - r * std::exp(s * at.x);
            if (denom <= kSingularDenominator) return kInf;
            acc += beta * at.m / denom;
        }
        return acc;
    };

    const double s_star = std::log(gamma / (1.0 - beta)) / a;
    double width = std::max(1.0, std::abs(s_star));
    double lo = s_star - width;
    int used = 0;
    while (sum(lo) >= 1.0 && used < kMaxRootIterations) {
        width *= 2.0;
        lo = s_star - width;
        ++used;
    }
    return bisect(sum, lo, s_star, /*increasing=*/true, used);
}

LimitResult lenski_limit(const Measure& q, double beta, double gamma, double a) {
    LimitResult out;
    out.a = a;
    out.criterion = lenski_criterion(q, beta, gamma, a);
    const Measure qa = truncate_at(q, a);
    const double r = (1.0 - beta) / gamma;
    std::vector<Atom> atoms;

    if (out.criterion > 1.0) {
        out.case_tag = LimitCase::case1;
        out.solve = solve_lenski_s(q, beta, gamma, a);
        const double s = out.solve->root;
        out.root = s;
        for (const auto& at : qa.atoms()) {
            atoms.push_back({at.x, beta * at.m / (1.0 - r * std::exp(s * at.x))});
        }
        out.ac_part = Measure::from_atoms(std::move(atoms));
    } else {
        out.case_tag = LimitCase::case2;
        out.root = std::log(gamma / (1.0 - beta)) / a;
        const double log_r = std::log(r);
        double sum = 0.0;
        for (const auto& at : qa.atoms()) {
            const double m = beta * at.m / lenski_case2_denominator(log_r, at.x, a);
            atoms.push_back({at.x, m});
            sum += m;
        }
        out.ac_part = Measure::from_atoms(std::move(atoms));
        out.atom_at_a = std::max(0.0, 1.0 - sum);
    }
    return out;
}

LimitResult limit_for(const FitnessModel& model, const Measure& q, double beta, double a) {
    switch (model.kind()) {
        case FitnessModel::Kind::kingman:
            return kingman_limit(q, beta, a);
        case FitnessModel::Kind::lenski:
            return lenski_limit(q, beta, model.gamma(), a);
        case FitnessModel::Kind::custom:
            break;
    }
    throw std::invalid_argument("no closed-form limit for custom fitness model '" + model.name() + "'");
}

CondensationReport condensation_report(const LimitResult& limit, const Trajectory& trajectory) {
    CondensationReport out;
    out.limit_atom = limit.atom_at_a;
    out.terminal_atom_mass_at_M = trajectory.final_state.mass_at(trajectory.bound);
    double peak = trajectory.initial_atom_mass_at_M;
    for (const auto& d : trajectory.diagnostics) peak = std::max(peak, d.atom_mass_at_M);
    out.max_trajectory_atom_mass_at_M = peak;
    out.condensation = peak == 0.0 && limit.atom_at_a > 0.0;
    return out;
}

}  // namespace selmut
