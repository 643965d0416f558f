#pragma once

#include "bilp/reduction.hpp"
#include "bilp/solver.hpp"

namespace bilp {

/**
 * End-to-end solve configuration: dimensionality reduction threshold,
 * optional objective projection, presolve restarts and the anytime loop
 * parameters. One seed drives all randomness.
 */
struct PipelineConfig {
    double epsilon0 = 1e-4;
    std::size_t max_iterations = 200;
    PivotMethod method = PivotMethod::linear_bound;
    std::size_t presolve = 0;
    double reduce_epsilon = 1e-4;
    bool project = false;
    std::uint64_t seed = 0;
};

struct PipelineResult {
    double value = 0.0;       // input objective at the returned assignment
    double upper_bound = 0.0; // certified upper bound on the input optimum
    double bound = 0.0;       // upper_bound - value (certified gap)
    std::size_t iterations = 0;
    std::size_t kept_dims = 0;
    double reduction_error = 0.0;
    bool projected = false;
    Assignment assignment; // input program's variable space
    std::vector<TraceRow> trace;
};

/**
 * Reduce-then-solve pipeline: optional objective projection (applied only
 * when the program has no uncoupled variables), dimensionality reduction,
 * semi-compact conversion and the successive-approximation solve, with the
 * result mapped back to the input program's variables and certified against
 * the input objective.
 */
inline PipelineResult run_pipeline(const BilinearProgram& input, const PipelineConfig& config) {
    validate(input);
    PipelineResult out;

    BilinearProgram stage = input;
    double objective_shift = 0.0; // input optimum minus staged optimum
    if (config.project && input.num_w() == 0 && input.num_z() == 0 && input.is_equality_form()) {
        ProjectionResult projected = project_objective(stage);
        stage = std::move(projected.program);
        objective_shift = projected.shift_total;
        out.projected = true;
    }

    ReductionResult red = reduce(stage, config.reduce_epsilon, ReductionScaling::automatic);
    out.kept_dims = red.kept_dims;
    out.reduction_error = red.error_bound;

    SolverConfig solver_config;
    solver_config.epsilon0 = config.epsilon0;
    solver_config.max_iterations = config.max_iterations;
    solver_config.method = config.method;
    solver_config.presolve_restarts = config.presolve;
    solver_config.seed = config.seed;
    SolveResult solved = solve(red.reduced_program, solver_config);
    out.iterations = solved.iterations;
    out.trace = solved.trace;

    // back to the input space: undo the reduction rewrite, then drop the
    // slack tails the normal-form rewrite appended inside reduce()
    Assignment restored =
        restore_reduced_assignment(red, to_normal_form(stage).num_y(), solved.assignment);
    restored.w.resize(input.num_w());
    restored.z.resize(input.num_z());
    restored.x.resize(input.num_x());
    restored.y.resize(input.num_y());
    out.assignment = std::move(restored);

    out.value = evaluate_objective(input, out.assignment);
    // certified chain: staged optimum <= solver incumbent + gap + reduction loss
    out.upper_bound = solved.value + solved.bound + red.error_bound + objective_shift;
    out.bound = std::max(0.0, out.upper_bound - out.value);
    return out;
}

} // namespace bilp
