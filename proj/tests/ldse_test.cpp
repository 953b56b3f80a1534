#include <doctest.h>

#include <cmath>

#include "gsr/ldse.hpp"
#include "support/properties.hpp"

using namespace gsr;

namespace {

double sphere(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) {
        s += v * v;
    }
    return s;
}

double rosenbrock(std::span<const double> x)
{
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
}

} // namespace

TEST_SUITE("ldse")
{
    TEST_CASE("population and budget defaults")
    {
        OptimizerConfig c;
        CHECK(c.population_for(4) == 50);
        CHECK(c.population_for(1) == 20);
        CHECK(c.generations_for(3) == 1500);
        CHECK(c.stagnation_for(2) == 100);
        CHECK(c.lower == -50.0);
        CHECK(c.upper == 50.0);
        CHECK(c.target == 1e-6);
    }

    TEST_CASE("sphere in three dimensions")
    {
        OptimizerConfig c;
        c.target = 1e-10;
        const auto r = ldse_minimize(sphere, 3, c);
        CHECK(r.value <= 1e-8);
        for (double v : r.x) {
            CHECK(std::fabs(v) <= 1e-3);
        }
    }

    TEST_CASE("sphere up to five dimensions, every seed")
    {
        const auto r = testing::sphere_property(5, 20);
        INFO(r.first_failure);
        CHECK(r.passed == 100);
    }

    TEST_CASE("rosenbrock")
    {
        OptimizerConfig c;
        c.target = 1e-10;
        c.seed = 4;
        const auto r = ldse_minimize(rosenbrock, 2, c);
        CHECK(r.value <= 1e-4);
        CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-2));
        CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-2));
    }

    TEST_CASE("results stay in bounds and the best value never rises")
    {
        // Minimum outside the box: the optimizer must press against the bound.
        const Objective shifted = [](std::span<const double> x) {
            double s = 0.0;
            for (double v : x) {
                s += (v - 80.0) * (v - 80.0);
            }
            return s;
        };
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            OptimizerConfig c;
            c.seed = seed;
            c.max_generations = 200;
            const auto r = ldse_minimize(shifted, 3, c);
            for (double v : r.x) {
                CHECK(v >= c.lower);
                CHECK(v <= c.upper);
            }
            REQUIRE_FALSE(r.best_history.empty());
            for (std::size_t g = 1; g < r.best_history.size(); ++g) {
                CHECK(r.best_history[g] <= r.best_history[g - 1]);
            }
            CHECK(r.best_history.back() == r.value);
        }
    }

    TEST_CASE("invalid values are treated as +inf")
    {
        const Objective holes = [](std::span<const double> x) {
            return x[0] < 0.0 ? std::nan("") : (x[0] - 2.0) * (x[0] - 2.0);
        };
        OptimizerConfig c;
        c.target = 1e-12;
        const auto r = ldse_minimize(holes, 1, c);
        CHECK(r.x[0] == doctest::Approx(2.0).epsilon(1e-4));
    }

    TEST_CASE("determinism")
    {
        OptimizerConfig c;
        c.seed = 99;
        const auto a = ldse_minimize(rosenbrock, 2, c);
        const auto b = ldse_minimize(rosenbrock, 2, c);
        CHECK(a.x == b.x);
        CHECK(a.value == b.value);
        CHECK(a.evaluations == b.evaluations);
    }

    TEST_CASE("configuration errors")
    {
        OptimizerConfig c;
        CHECK_THROWS_AS(ldse_minimize(sphere, 0, c), std::invalid_argument);
        c.population = 3;
        CHECK_THROWS_AS(ldse_minimize(sphere, 2, c), std::invalid_argument);
        c.population = 0;
        c.lower = 1.0;
        c.upper = 1.0;
        CHECK_THROWS_AS(ldse_minimize(sphere, 2, c), std::invalid_argument);
    }

    TEST_CASE("nelder-mead polish")
    {
        const std::vector<double> start {0.9, 1.2};
        const auto r = nelder_mead(rosenbrock, start, -50, 50, 2000, 0.05);
        CHECK(r.value <= 1e-10);
        CHECK(r.value <= rosenbrock(start));
    }
}
