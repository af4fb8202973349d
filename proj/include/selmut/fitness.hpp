#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "selmut/measure.hpp"

namespace selmut {

/// Mean fitness at or below this value is treated as exactly zero.
inline constexpr double kDegenerateMeanFitness = 1e-300;

/// The population admits no selection step: zero mean fitness, or (Lenski)
/// no cycle time because all mass sits at type 0.
class DegeneratePopulation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// w(x, u) for user-defined models.
using WeightFunction = std::function<double(double x, const Measure& u)>;

/// Fitness model w(x, u).
///
/// Kingman: w(x, u) = x. Lenski: w(x, u) = e^{t_u x} where t_u is the time a
/// population with type distribution u needs to grow by the factor gamma.
/// Custom models wrap an arbitrary nonnegative weight function.
class FitnessModel {
public:
    enum class Kind { kingman, lenski, custom };

    static FitnessModel kingman() { return FitnessModel(Kind::kingman, 0.0, {}, "kingman"); }
    static FitnessModel lenski(double gamma);
    static FitnessModel custom(std::string name, WeightFunction weight);

    Kind kind() const { return kind_; }
    /// Daily growth capacity; only meaningful for Lenski.
    double gamma() const { return gamma_; }
    const std::string& name() const { return name_; }
    const WeightFunction& weight_function() const { return weight_; }

private:
    FitnessModel(Kind kind, double gamma, WeightFunction weight, std::string name)
        : kind_(kind), gamma_(gamma), weight_(std::move(weight)), name_(std::move(name)) {}

    Kind kind_;
    double gamma_;
    WeightFunction weight_;
    std::string name_;
};

struct CycleTime {
    double t = 0.0;
    /// |exp_moment(u, t) - gamma| / gamma
    double residual = 0.0;
    int iterations = 0;
};

/// Solves exp_moment(u, t) = gamma by doubling then bisection.
/// Throws DegeneratePopulation when all mass of u is at 0.
CycleTime solve_lenski_time(const Measure& u, double gamma);

double lenski_time(const Measure& u, double gamma);

/// Fitness of a fixed population. Solves the Lenski cycle time once on
/// construction; a degenerate population is recorded rather than thrown.
class SelectionContext {
public:
    SelectionContext(const FitnessModel& model, const Measure& u);

    double weight(double x) const;
    double mean_fitness() const { return mean_; }
    bool degenerate() const { return degenerate_; }
    std::optional<CycleTime> cycle_time() const { return cycle_; }

    /// w(x, u) / mean fitness. Throws DegeneratePopulation when degenerate.
    double advantage(double x) const;

private:
    const FitnessModel* model_;
    const Measure* population_;
    std::optional<CycleTime> cycle_;
    double mean_ = 0.0;
    bool degenerate_ = false;
};

double fitness_weight(const FitnessModel& model, double x, const Measure& u);

double mean_fitness(const FitnessModel& model, const Measure& u);

/// s(x, u) = w(x, u) / integral of w(., u) du.
double selective_advantage(const FitnessModel& model, double x, const Measure& u);

}  // namespace selmut
