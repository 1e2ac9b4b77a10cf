#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mdens {

struct OptimizerConfig {
    int max_iterations = 2000;  // per simplex run
    double tolerance = 1e-8;    // simplex diameter (max-norm distance to the best vertex)
    int restarts = 3;
    double initial_step = 0.1;

    /// Throws InvalidParameter.
    void validate() const;
};

struct OptimizeResult {
    std::vector<double> argmin;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Best objective value after every iteration, across restarts (non-increasing).
    std::vector<double> best_trace;
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead simplex minimization with restarts from the incumbent.
///
/// Non-finite objective values are treated as +inf, so constraint violations can be
/// signalled by returning NaN or inf. `steps` optionally scales the initial simplex
/// per coordinate (defaults to config.initial_step for every coordinate).
/// Throws InvalidStart if the objective is not finite at `init`.
OptimizeResult optimize(const Objective& objective, std::span<const double> init,
                        const OptimizerConfig& config, std::span<const double> steps = {});

}  // namespace mdens
