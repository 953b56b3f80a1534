#ifndef GSR_LDSE_HPP
#define GSR_LDSE_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace gsr {

struct OptimizerConfig {
    std::size_t population = 0;   // 0 selects 10 + 10 d
    double lower = -50.0;
    double upper = 50.0;
    double target = 1e-6;         // stop once the best value is this small
    int max_generations = 0;      // 0 selects 500 d
    int stagnation = 0;           // 0 selects 50 d
    double stagnation_delta = 1e-12;
    std::uint64_t seed = 1;

    std::size_t population_for(std::size_t d) const noexcept { return population ? population : 10 + 10 * d; }
    int generations_for(std::size_t d) const noexcept
    {
        return max_generations ? max_generations : 500 * static_cast<int>(d);
    }
    int stagnation_for(std::size_t d) const noexcept { return stagnation ? stagnation : 50 * static_cast<int>(d); }
};

using Objective = std::function<double(std::span<const double>)>;

struct OptimizeResult {
    std::vector<double> x;
    double value {0.0};
    int generations {0};
    std::uint64_t evaluations {0};
    std::vector<double> best_history; // best value after each generation
};

/// Low-dimensional simplex evolution over the box [lower, upper]^d.
///
/// Every generation each agent draws m + 1 = min(d, 3) + 1 distinct agents
/// as a simplex, reflects its worst vertex through the centroid of the rest
/// (expanding on a new best, contracting on failure), and takes the trial
/// point if it beats the agent. Invalid objective values count as +inf.
/// Deterministic for a given seed.
OptimizeResult ldse_minimize(const Objective& objective, std::size_t d, const OptimizerConfig& config);

/// Bounded Nelder-Mead refinement from `start`, used to polish an LDSE result.
OptimizeResult nelder_mead(const Objective& objective, std::span<const double> start, double lower, double upper,
                           int max_iterations, double initial_step = 0.05);

} // namespace gsr

#endif
