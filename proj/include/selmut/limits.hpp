#pragma once

#include <optional>
#include <stdexcept>

#include "selmut/dynamics.hpp"
#include "selmut/measure.hpp"

namespace selmut {

/// The criterion integral does not exceed 1, so the requested root does
/// not exist (the limit condenses instead).
class NoRootError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class LimitCase { case1, case2 };

/// Outcome of a monotone bracketed bisection on a defining equation.
struct RootSolve {
    double root = 0.0;
    /// |equation sum - 1| at the returned root
    double residual = 0.0;
    int iterations = 0;
};

/// Limit type distribution p^{a,*}: a part proportional to q^a atom by atom
/// plus a condensed atom at the truncation point a.
struct LimitResult {
    Measure ac_part;
    double atom_at_a = 0.0;
    double a = 0.0;
    LimitCase case_tag = LimitCase::case1;
    /// Case1: the solved s_a. Case2: the boundary value at which the
    /// defining sum equals the criterion.
    std::optional<double> root;
    double criterion = 0.0;  // may be +inf
    std::optional<RootSolve> solve;

    /// ac_part + atom_at_a * delta_a
    Measure distribution() const;
};

/// Sum of beta q^a({x}) / (1 - x/a); +inf if q^a has an atom at a.
double kingman_criterion(const Measure& q, double beta, double a);

/// Root s_a > (1 - beta) a of sum beta s q^a({x}) / (s - (1 - beta) x) = 1.
/// Throws NoRootError when the criterion is <= 1.
RootSolve solve_kingman_s(const Measure& q, double beta, double a);

LimitResult kingman_limit(const Measure& q, double beta, double a);

/// Sum of beta q^a({x}) / (1 - ((1 - beta)/gamma)^{1 - x/a}); +inf if q^a
/// has an atom at a.
double lenski_criterion(const Measure& q, double beta, double gamma, double a);

/// Root s_a < ln(gamma/(1 - beta))/a of
/// sum beta q^a({x}) / (1 - (1 - beta)/gamma e^{s x}) = 1.
/// Throws NoRootError when the criterion is <= 1.
RootSolve solve_lenski_s(const Measure& q, double beta, double gamma, double a);

LimitResult lenski_limit(const Measure& q, double beta, double gamma, double a);

/// Dispatches on the model kind; custom models have no closed form.
LimitResult limit_for(const FitnessModel& model, const Measure& q, double beta, double a);

struct CondensationReport {
    double limit_atom = 0.0;
    double terminal_atom_mass_at_M = 0.0;
    double max_trajectory_atom_mass_at_M = 0.0;
    bool condensation = false;
};

/// Condensation: every trajectory state has zero mass at M while the limit
/// carries a positive atom there.
CondensationReport condensation_report(const LimitResult& limit, const Trajectory& trajectory);

}  // namespace selmut
