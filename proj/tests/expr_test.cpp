#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gsr/bench.hpp"
#include "gsr/expr.hpp"
#include "gsr/program.hpp"
#include "support/properties.hpp"
#include "support/table1_values.hpp"

using namespace gsr;

TEST_SUITE("expr")
{
    TEST_CASE("parse builds the expected tree")
    {
        const Expr e = parse("0.5*exp(x1)*sin(2*x2)", 2);
        CHECK(evaluate(e, std::vector<double> {0.0, std::numbers::pi / 4}) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(evaluate(e, std::vector<double> {1.0, 0.3}) == doctest::Approx(0.5 * std::exp(1.0) * std::sin(0.6)));

        const Expr x = parse("x1", 1);
        CHECK(x.op() == Op::Variable);
        CHECK(x.index() == 1);
        CHECK(x.size() == 1);
    }

    TEST_CASE("whitespace, unary minus and precedence")
    {
        const std::vector<double> p {2.0, 3.0};
        CHECK(evaluate(parse(" x1 + x2 * 2 ", 2), p) == 8.0);
        // Unary minus sits inside the base, so it binds tighter than '^'.
        CHECK(evaluate(parse("-x1^2", 2), p) == 4.0);
        CHECK(evaluate(parse("-(x1^2)", 2), p) == -4.0);
        CHECK(evaluate(parse("x1^-1", 2), p) == 0.5);
        CHECK(evaluate(parse("x1 - x2 - 1", 2), p) == -2.0);
        CHECK(evaluate(parse("x2 / x1 / 2", 2), p) == 0.75);
        CHECK(evaluate(parse("1.5e1 + .5", 2), p) == 15.5);
        CHECK(evaluate(parse("sqrt(x1*8)", 2), p) == 4.0);
        CHECK(evaluate(parse("ln(exp(x2))", 2), p) == doctest::Approx(3.0));
    }

    TEST_CASE("syntax errors carry the offset")
    {
        try {
            parse("sin(", 1);
            FAIL("no error");
        } catch (const ParseError& e) {
            CHECK(e.offset() == 4);
        }
        CHECK_THROWS_AS(parse("x1+", 1), ParseError);
        CHECK_THROWS_AS(parse("x1 x2", 2), ParseError);
        CHECK_THROWS_AS(parse("tan(x1)", 1), ParseError);
        CHECK_THROWS_AS(parse("(x1", 1), ParseError);
        CHECK_THROWS_AS(parse("", 1), ParseError);
        CHECK_THROWS_AS(parse("x0", 1), ParseError);
    }

    TEST_CASE("variables beyond the arity are rejected")
    {
        CHECK_THROWS_AS(parse("x1 + x3", 2), ParseError);
        CHECK_NOTHROW(parse("x1 + x3", 3));
    }

    TEST_CASE("domain violations give the invalid value")
    {
        CHECK(is_invalid(evaluate(parse("ln(x1)", 1), std::vector<double> {-1.0})));
        CHECK(is_invalid(evaluate(parse("ln(x1)", 1), std::vector<double> {0.0})));
        CHECK(is_invalid(evaluate(parse("1/x1", 1), std::vector<double> {0.0})));
        CHECK(is_invalid(evaluate(parse("x1^(-1)", 1), std::vector<double> {0.0})));
        CHECK(is_invalid(evaluate(parse("sqrt(x1)", 1), std::vector<double> {-1e-300})));
        CHECK(is_invalid(evaluate(parse("exp(x1)", 1), std::vector<double> {1000.0})));
        // Invalidity propagates to the root.
        CHECK(is_invalid(evaluate(parse("0*ln(x1) + 1", 1), std::vector<double> {-1.0})));
    }

    TEST_CASE("evaluation checks the point length")
    {
        const Expr e = parse("x1 + x2", 2);
        CHECK_THROWS_AS(evaluate(e, std::vector<double> {1.0}), std::invalid_argument);
    }

    TEST_CASE("complexity counts nodes")
    {
        CHECK(complexity(parse("x1", 1)) == 1);
        CHECK(complexity(parse("sin(2*x2)", 2)) == 4);
        CHECK(complexity(parse("0.5*exp(x1)*sin(2*x2)", 2)) == 9);
    }

    TEST_CASE("evaluation is bit-reproducible and matches compiled programs")
    {
        Rng rng(11);
        for (int t = 0; t < 200; ++t) {
            const Expr e = testing::random_tree(rng, 3, 5);
            const Program program(e);
            for (int k = 0; k < 8; ++k) {
                const std::vector<double> p {uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3, 3)};
                const double a = evaluate(e, p);
                const double b = evaluate(e, p);
                const double c = program(p);
                if (is_invalid(a)) {
                    CHECK(is_invalid(b));
                    CHECK(is_invalid(c));
                } else {
                    CHECK(a == b);
                    CHECK(a == c);
                }
            }
        }
    }

    TEST_CASE("parameters bind and variables remap")
    {
        const Expr e = Expr::parameter(1) * sin(Expr::parameter(2) * Expr::variable(1));
        CHECK(e.max_parameter() == 2);
        const std::vector<double> theta {3.0, 2.0};
        const Expr bound = bind_parameters(e, theta);
        CHECK(bound.max_parameter() == 0);
        CHECK(evaluate(bound, std::vector<double> {0.5}) == doctest::Approx(3.0 * std::sin(1.0)));
        CHECK(evaluate(e, std::vector<double> {0.5}, theta) == evaluate(bound, std::vector<double> {0.5}));

        const std::vector<int> mapping {4};
        const Expr moved = remap_variables(bound, mapping);
        CHECK(moved.max_variable() == 4);
        CHECK(evaluate(moved, std::vector<double> {9, 9, 9, 0.5}) == evaluate(bound, std::vector<double> {0.5}));
    }

    TEST_CASE("printing round-trips on random trees")
    {
        const auto r = testing::round_trip_property(1000, 20240917);
        INFO(r.first_failure);
        CHECK(r.passed == 1000);
    }

    TEST_CASE("case six at (2,2,2,2,2) matches the independent value")
    {
        const auto& spec = benchmark_case(6);
        const Expr e = parse(spec.target, spec.dim);
        CHECK(evaluate(e, std::vector<double>(5, 2.0)) == doctest::Approx(testing::case6_at_twos).epsilon(1e-12));
    }

    TEST_CASE("table targets match the independent values")
    {
        for (int k = 1; k <= 10; ++k) {
            CAPTURE(k);
            const auto& spec = benchmark_case(k);
            const Expr e = parse(spec.target, spec.dim);
            const double mid = evaluate(e, spec.box.midpoint());
            const double want = testing::midpoint_values[static_cast<std::size_t>(k - 1)];
            if (std::isnan(want)) {
                CHECK(is_invalid(mid));
            } else {
                CHECK(std::fabs(mid - want) <= 1e-12 * std::max(1.0, std::fabs(want)));
            }
            for (int j = 0; j < 5; ++j) {
                CAPTURE(j);
                std::vector<double> p(static_cast<std::size_t>(spec.dim));
                for (int i = 0; i < spec.dim; ++i) {
                    p[static_cast<std::size_t>(i)] = testing::grid_coordinate(i, j, spec.box[0].lo, spec.box[0].hi);
                }
                const double got = evaluate(e, p);
                const double ref = testing::grid_values[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j)];
                CHECK(std::fabs(got - ref) <= 1e-12 * std::fabs(ref));
            }
        }
    }
}
