#include "gsr/ldse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gsr/random.hpp"

namespace gsr {

namespace {

    constexpr double infinity = std::numeric_limits<double>::infinity();

    double sanitize(double v) { return std::isfinite(v) ? v : infinity; }

    // Pulls out-of-range coordinates halfway back from the violated bound
    // towards the centroid.
    void repair(std::vector<double>& p, const std::vector<double>& centroid, double lower, double upper)
    {
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (p[j] < lower) {
                p[j] = 0.5 * (lower + centroid[j]);
            } else if (p[j] > upper) {
                p[j] = 0.5 * (upper + centroid[j]);
            }
        }
    }

    std::vector<double> toward(const std::vector<double>& from, const std::vector<double>& to, double step)
    {
        std::vector<double> p(from.size());
        for (std::size_t j = 0; j < p.size(); ++j) {
            p[j] = from[j] + step * (to[j] - from[j]);
        }
        return p;
    }

} // namespace

OptimizeResult ldse_minimize(const Objective& objective, std::size_t d, const OptimizerConfig& config)
{
    if (d < 1) {
        throw std::invalid_argument("ldse_minimize needs at least one dimension");
    }
    if (!(config.lower < config.upper)) {
        throw std::invalid_argument("optimizer bounds must satisfy lower < upper");
    }
    const std::size_t np = config.population_for(d);
    if (np < 4) {
        throw std::invalid_argument("population must hold at least 4 agents");
    }
    const std::size_t m = std::min<std::size_t>(d, 3);
    if (np < m + 1) {
        throw std::invalid_argument("population smaller than the simplex");
    }

    Rng rng(config.seed);
    OptimizeResult result;
    auto eval = [&](const std::vector<double>& x) {
        ++result.evaluations;
        return sanitize(objective(x));
    };

    std::vector<std::vector<double>> agents(np, std::vector<double>(d));
    std::vector<double> values(np);
    for (std::size_t i = 0; i < np; ++i) {
        for (auto& x : agents[i]) {
            x = uniform(rng, config.lower, config.upper);
        }
        values[i] = eval(agents[i]);
    }
    auto best_index = [&] {
        return static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    };
    std::size_t best = best_index();

    const int max_gen = config.generations_for(d);
    const int window = config.stagnation_for(d);
    double reference = values[best];
    int last_improvement = 0;
    std::vector<std::size_t> order(np);
    std::vector<std::size_t> simplex(m + 1);
    std::vector<double> centroid(d);

    int gen = 0;
    while (values[best] > config.target && gen < max_gen) {
        ++gen;
        for (std::size_t i = 0; i < np; ++i) {
            std::iota(order.begin(), order.end(), std::size_t {0});
            for (std::size_t k = 0; k <= m; ++k) {
                const std::size_t r = k + uniform_index(rng, np - k);
                std::swap(order[k], order[r]);
                simplex[k] = order[k];
            }
            std::sort(simplex.begin(), simplex.end(), [&](std::size_t a, std::size_t b) {
                return values[a] < values[b] || (values[a] == values[b] && a < b);
            });
            const auto& worst = agents[simplex[m]];
            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t k = 0; k < m; ++k) {
                for (std::size_t j = 0; j < d; ++j) {
                    centroid[j] += agents[simplex[k]][j];
                }
            }
            for (auto& x : centroid) {
                x /= static_cast<double>(m);
            }

            auto trial = toward(worst, centroid, 2.0);
            repair(trial, centroid, config.lower, config.upper);
            double trial_value = eval(trial);
            if (trial_value < values[simplex[0]]) {
                auto expanded = toward(worst, centroid, 3.0);
                repair(expanded, centroid, config.lower, config.upper);
                const double expanded_value = eval(expanded);
                if (expanded_value < trial_value) {
                    trial = std::move(expanded);
                    trial_value = expanded_value;
                }
            } else if (trial_value >= values[simplex[m]]) {
                auto contracted = toward(worst, centroid, 0.5);
                const double contracted_value = eval(contracted);
                if (contracted_value < trial_value) {
                    trial = std::move(contracted);
                    trial_value = contracted_value;
                }
            }
            if (trial_value < values[i]) {
                agents[i] = std::move(trial);
                values[i] = trial_value;
                if (trial_value < values[best]) {
                    best = i;
                }
            }
        }
        result.best_history.push_back(values[best]);
        if (reference - values[best] > config.stagnation_delta) {
            reference = values[best];
            last_improvement = gen;
        } else if (gen - last_improvement >= window) {
            break;
        }
    }
    result.x = agents[best];
    result.value = values[best];
    result.generations = gen;
    return result;
}

OptimizeResult nelder_mead(const Objective& objective, std::span<const double> start, double lower, double upper,
                           int max_iterations, double initial_step)
{
    const std::size_t d = start.size();
    if (d < 1) {
        throw std::invalid_argument("nelder_mead needs at least one dimension");
    }
    OptimizeResult result;
    auto clamp = [&](std::vector<double>& p) {
        for (auto& x : p) {
            x = std::clamp(x, lower, upper);
        }
    };
    auto eval = [&](std::vector<double>& x) {
        clamp(x);
        ++result.evaluations;
        return sanitize(objective(x));
    };

    std::vector<std::vector<double>> pts(d + 1, std::vector<double>(start.begin(), start.end()));
    std::vector<double> vals(d + 1);
    for (std::size_t k = 1; k <= d; ++k) {
        const double x = pts[k][k - 1];
        const double step = initial_step * std::max(1.0, std::fabs(x));
        pts[k][k - 1] = x + step <= upper ? x + step : x - step;
    }
    for (std::size_t k = 0; k <= d; ++k) {
        vals[k] = eval(pts[k]);
    }
    std::vector<std::size_t> idx(d + 1);
    std::vector<double> centroid(d);
    int it = 0;
    for (; it < max_iterations; ++it) {
        std::iota(idx.begin(), idx.end(), std::size_t {0});
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return vals[a] < vals[b] || (vals[a] == vals[b] && a < b);
        });
        const std::size_t lo = idx[0];
        const std::size_t hi = idx[d];
        const std::size_t second = idx[d - (d > 0 ? 1 : 0)];
        if (vals[lo] == 0.0) {
            break;
        }
        double diameter = 0.0;
        for (std::size_t k = 0; k <= d; ++k) {
            for (std::size_t j = 0; j < d; ++j) {
                diameter = std::max(diameter, std::fabs(pts[k][j] - pts[lo][j]) / std::max(1.0, std::fabs(pts[lo][j])));
            }
        }
        if (diameter < 1e-15) {
            break;
        }
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k <= d; ++k) {
            if (k == hi) {
                continue;
            }
            for (std::size_t j = 0; j < d; ++j) {
                centroid[j] += pts[k][j] / static_cast<double>(d);
            }
        }
        auto reflected = toward(pts[hi], centroid, 2.0);
        const double fr = eval(reflected);
        if (fr < vals[lo]) {
            auto expanded = toward(pts[hi], centroid, 3.0);
            const double fe = eval(expanded);
            if (fe < fr) {
                pts[hi] = std::move(expanded);
                vals[hi] = fe;
            } else {
                pts[hi] = std::move(reflected);
                vals[hi] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[hi] = std::move(reflected);
            vals[hi] = fr;
            continue;
        }
        const bool outside = fr < vals[hi];
        auto contracted = outside ? toward(pts[hi], centroid, 1.5) : toward(pts[hi], centroid, 0.5);
        const double fc = eval(contracted);
        if (fc < std::min(fr, vals[hi])) {
            pts[hi] = std::move(contracted);
            vals[hi] = fc;
            continue;
        }
        for (std::size_t k = 0; k <= d; ++k) {
            if (k == lo) {
                continue;
            }
            pts[k] = toward(pts[lo], pts[k], 0.5);
            vals[k] = eval(pts[k]);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    result.x = pts[best];
    result.value = vals[best];
    result.generations = it;
    return result;
}

} // namespace gsr
