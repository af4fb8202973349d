#include "selmut/dynamics.hpp"

#include <stdexcept>

namespace selmut {

namespace {

void check_beta(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
}

}  // namespace

StepResult step_raw(const FitnessModel& model, const Measure& p, const Measure& q, double beta) {
    check_beta(beta);
    const SelectionContext ctx(model, p);

    StepResult out;
    out.degenerate = ctx.degenerate();
    out.mean_fitness = ctx.degenerate() ? 0.0 : ctx.mean_fitness();
    out.cycle_time = ctx.cycle_time();

    std::vector<Atom> atoms;
    atoms.reserve(p.size() + q.size());
    for (const auto& a : p.atoms()) {
        const double factor = ctx.degenerate() ? 1.0 : ctx.advantage(a.x);
        atoms.push_back({a.x, (1.0 - beta) * factor * a.m});
    }
    for (const auto& a : q.atoms()) atoms.push_back({a.x, beta * a.m});
    out.raw = Measure::from_atoms(std::move(atoms));
    return out;
}

Measure step(const FitnessModel& model, const Measure& p, const Measure& q, double beta) {
    return step_raw(model, p, q, beta).raw.normalized();
}

ConventionStar apply_convention_star(const Measure& p0, const Measure& q, const FitnessModel& model,
                                     double beta) {
    check_beta(beta);
    ConventionStar out{p0, q, 0.0, false};
    if (upper_support(q) > upper_support(p0)) {
        out.p0 = step(model, p0, q, beta);
        out.applied = true;
    }
    out.bound = upper_support(out.p0);
    return out;
}

Trajectory iterate(const FitnessModel& model, const Measure& p0, const Measure& q, double beta,
                   const StoppingRule& stop, const IterateOptions& options) {
    check_beta(beta);
    if (stop.max_iterations < 1 || !(stop.tv_tolerance > 0.0)) {
        throw std::invalid_argument("stopping rule needs max_iterations >= 1 and tv_tolerance > 0");
    }
    if (!p0.is_probability() || !q.is_probability()) {
        throw MeasureError("iterate: p0 and q must be probability measures");
    }

    Trajectory traj;
    traj.bound = options.bound.value_or(upper_support(p0));
    const double slack = merge_tolerance(traj.bound);
    if (upper_support(p0) > traj.bound + slack || upper_support(q) > traj.bound + slack) {
        throw std::invalid_argument("iterate: supports of p0 and q must lie in [0, M] (m_q <= m_p0)");
    }

    traj.initial = p0;
    traj.initial_atom_mass_at_M = p0.mass_at(traj.bound);
    if (options.keep_history) traj.history.push_back(p0);

    Measure current = p0;
    Measure previous = p0;
    for (long i = 1; i <= stop.max_iterations; ++i) {
        const StepResult res = step_raw(model, current, q, beta);

        StepDiagnostics d;
        d.iteration = i;
        d.tv_delta = total_variation(current, res.raw);
        d.mean_fitness = res.mean_fitness;
        d.atom_mass_at_M = res.raw.mass_at(traj.bound);
        d.degenerate = res.degenerate;
        if (res.cycle_time) {
            d.cycle_time = res.cycle_time->t;
            d.cycle_time_residual = res.cycle_time->residual;
            d.cycle_time_iterations = res.cycle_time->iterations;
        }
        traj.diagnostics.push_back(d);

        previous = std::move(current);
        current = res.raw.normalized();
        if (options.keep_history) traj.history.push_back(current);

        if (d.tv_delta < stop.tv_tolerance) {
            traj.stop_reason = StopReason::converged;
            break;
        }
    }
    traj.previous = std::move(previous);
    traj.final_state = std::move(current);
    return traj;
}

}  // namespace selmut
