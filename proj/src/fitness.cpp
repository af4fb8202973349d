#include "selmut/fitness.hpp"

#include <cmath>

namespace selmut {

FitnessModel FitnessModel::lenski(double gamma) {
    if (!std::isfinite(gamma) || !(gamma > 1.0)) {
        throw std::invalid_argument("lenski model needs gamma > 1");
    }
    return FitnessModel(Kind::lenski, gamma, {}, "lenski");
}

FitnessModel FitnessModel::custom(std::string name, WeightFunction weight) {
    if (!weight) throw std::invalid_argument("custom fitness model needs a weight function");
    return FitnessModel(Kind::custom, 0.0, std::move(weight), std::move(name));
}

CycleTime solve_lenski_time(const Measure& u, double gamma) {
    if (!(gamma > 1.0)) throw std::invalid_argument("lenski_time: gamma must exceed 1");
    if (!u.is_probability()) throw MeasureError("lenski_time: expected a probability measure");
    if (u.empty() || upper_support(u) <= 0.0) {
        throw DegeneratePopulation("degenerate population: all mass at type 0, no cycle time");
    }

    auto residual = [&](double t) { return (exp_moment(u, t) - gamma) / gamma; };

    CycleTime out;
    double lo = 0.0, hi = 1.0;
    while (residual(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        ++out.iterations;
    }

    // exp_moment is strictly increasing in t, so the bracket holds the root.
    double mid = 0.5 * (lo + hi);
    double r = residual(mid);
    while (std::abs(r) > 1e-12 && out.iterations < 200) {
        if (r > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
        const double next = 0.5 * (lo + hi);
        if (next == lo || next == hi) break;
        mid = next;
        r = residual(mid);
        ++out.iterations;
    }
    out.t = mid;
    out.residual = std::abs(r);
    return out;
}

double lenski_time(const Measure& u, double gamma) { return solve_lenski_time(u, gamma).t; }

SelectionContext::SelectionContext(const FitnessModel& model, const Measure& u)
    : model_(&model), population_(&u) {
    if (model.kind() == FitnessModel::Kind::lenski) {
        try {
            cycle_ = solve_lenski_time(u, model.gamma());
        } catch (const DegeneratePopulation&) {
            degenerate_ = true;
            return;
        }
    }
    double acc = 0.0;
    for (const auto& a : u.atoms()) acc += weight(a.x) * a.m;
    mean_ = acc;
    degenerate_ = !(mean_ > kDegenerateMeanFitness);
}

double SelectionContext::weight(double x) const {
    switch (model_->kind()) {
        case FitnessModel::Kind::kingman:
            return x;
        case FitnessModel::Kind::lenski:
            if (!cycle_) throw DegeneratePopulation("degenerate population: no cycle time");
            return std::exp(cycle_->t * x);
        case FitnessModel::Kind::custom:
            return model_->weight_function()(x, *population_);
    }
    return 0.0;
}

double SelectionContext::advantage(double x) const {
    if (degenerate_) throw DegeneratePopulation("zero mean fitness: take the degenerate branch");
    return weight(x) / mean_;
}

double fitness_weight(const FitnessModel& model, double x, const Measure& u) {
    return SelectionContext(model, u).weight(x);
}

double mean_fitness(const FitnessModel& model, const Measure& u) {
    SelectionContext ctx(model, u);
    if (model.kind() == FitnessModel::Kind::lenski && !ctx.cycle_time()) {
        throw DegeneratePopulation("degenerate population: all mass at type 0, no cycle time");
    }
    return ctx.mean_fitness();
}

double selective_advantage(const FitnessModel& model, double x, const Measure& u) {
    return SelectionContext(model, u).advantage(x);
}

}  // namespace selmut
