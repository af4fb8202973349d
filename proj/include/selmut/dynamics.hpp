#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "selmut/fitness.hpp"
#include "selmut/measure.hpp"

namespace selmut {

struct StoppingRule {
    long max_iterations = 100000;
    /// Stop once total_variation(p_i, p_{i+1}) < tv_tolerance.
    double tv_tolerance = 1e-12;
};

enum class StopReason { converged, max_iterations };

/// Diagnostics of the step producing p_i from p_{i-1}, taken before the
/// renormalization of p_i.
struct StepDiagnostics {
    long iteration = 0;
    double tv_delta = 0.0;
    /// Mean fitness of p_{i-1}; 0 on the degenerate branch.
    double mean_fitness = 0.0;
    double atom_mass_at_M = 0.0;
    /// Lenski cycle time of p_{i-1}.
    std::optional<double> cycle_time;
    std::optional<double> cycle_time_residual;
    std::optional<int> cycle_time_iterations;
    bool degenerate = false;
};

struct Trajectory {
    double bound = 0.0;  // M
    Measure initial;
    /// p_0 ... p_n when history was requested, otherwise empty.
    std::vector<Measure> history;
    Measure previous;  // p_{n-1}
    Measure final_state;  // p_n
    double initial_atom_mass_at_M = 0.0;
    std::vector<StepDiagnostics> diagnostics;
    StopReason stop_reason = StopReason::max_iterations;

    long iterations() const { return static_cast<long>(diagnostics.size()); }
};

struct IterateOptions {
    /// Type-space bound M; defaults to m_{p0}.
    std::optional<double> bound;
    bool keep_history = false;
};

struct StepResult {
    /// (1 - beta) s(x, p) p(dx) + beta q(dx) before renormalization, or
    /// (1 - beta) p + beta q on the degenerate branch.
    Measure raw;
    double mean_fitness = 0.0;
    bool degenerate = false;
    std::optional<CycleTime> cycle_time;
};

StepResult step_raw(const FitnessModel& model, const Measure& p, const Measure& q, double beta);

/// One generation of selection and house-of-cards mutation, renormalized to
/// total mass 1. Throws std::invalid_argument unless 0 < beta < 1.
Measure step(const FitnessModel& model, const Measure& p, const Measure& q, double beta);

struct ConventionStar {
    Measure p0;
    Measure q;
    double bound = 0.0;  // M = m_{p0}
    bool applied = false;
};

/// Ensures m_q <= m_{p0} by replacing p0 with one step when needed.
ConventionStar apply_convention_star(const Measure& p0, const Measure& q, const FitnessModel& model,
                                     double beta);

Trajectory iterate(const FitnessModel& model, const Measure& p0, const Measure& q, double beta,
                   const StoppingRule& stop, const IterateOptions& options = {});

}  // namespace selmut
