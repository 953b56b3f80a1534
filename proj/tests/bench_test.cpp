#include <doctest.h>

#include <algorithm>
#include <random>

#include "gsr/bench.hpp"
#include "gsr/serialize.hpp"

using namespace gsr;

TEST_SUITE("bench")
{
    TEST_CASE("case table")
    {
        const auto& cases = benchmark_cases();
        REQUIRE(cases.size() == 11);
        const std::vector<std::tuple<int, VarSet, std::size_t, std::size_t>> table {
            {2, {}, 1, 2},  {3, {}, 2, 2},  {3, {}, 2, 3},     {3, {3}, 2, 4},  {4, {4}, 2, 5},
            {5, {5}, 4, 6}, {5, {4, 5}, 3, 7}, {5, {4}, 3, 6}, {6, {}, 1, 4},   {7, {7}, 2, 6},
        };
        for (std::size_t k = 0; k < table.size(); ++k) {
            const auto& c = cases[k];
            CAPTURE(c.number);
            CHECK(c.number == static_cast<int>(k + 1));
            CHECK(c.in_table);
            CHECK(c.dim == std::get<0>(table[k]));
            CHECK(c.expected_repeated == std::get<1>(table[k]));
            CHECK(c.expected_blocks == std::get<2>(table[k]));
            CHECK(c.expected_factors == std::get<3>(table[k]));
            const double lo = c.number == 6 ? 1.0 : -3.0;
            const double hi = c.number == 6 ? 3.0 : 3.0;
            for (int i = 0; i < c.dim; ++i) {
                CHECK(c.box[static_cast<std::size_t>(i)].lo == lo);
                CHECK(c.box[static_cast<std::size_t>(i)].hi == hi);
            }
            CHECK_NOTHROW(parse(c.target, c.dim));
        }
        CHECK_FALSE(cases[10].in_table);
        CHECK_FALSE(cases[10].expected_factors.has_value());
        CHECK_THROWS_AS(benchmark_case(12), std::out_of_range);
    }

    TEST_CASE("single runs")
    {
        const auto r2 = run_case(2, 1);
        CHECK(r2.completed);
        CHECK(r2.structure.repeated.empty());
        CHECK(r2.structure.blocks.size() == 2);
        CHECK(r2.structure.factor_count() == 2);
        CHECK(r2.val_mse <= 1e-6);
        CHECK(r2.samples == 600);

        const auto r10 = run_case(10, 1);
        CHECK(r10.structure.repeated == VarSet {7});
        CHECK(r10.structure.blocks.size() == 2);
        CHECK(r10.structure.factor_count() == 6);
        CHECK(r10.structure_match());

        const auto r6 = run_case(6, 1);
        CHECK(r6.structure.repeated == VarSet {5});
        CHECK(r6.structure.blocks.size() == 4);
        CHECK(r6.structure.factor_count() == 6);
        CHECK(r6.samples == 1000);
    }

    TEST_CASE("match flags follow from the detected structure")
    {
        for (int k : {1, 4, 7, 11}) {
            const auto r = run_case(k, 3);
            const auto& spec = benchmark_case(k);
            CHECK(r.match_repeated == (r.structure.repeated == spec.expected_repeated));
            CHECK(r.match_blocks == (r.structure.blocks.size() == spec.expected_blocks));
            CHECK(r.match_factors
                  == (!spec.expected_factors || r.structure.factor_count() == *spec.expected_factors));
        }
    }

    TEST_CASE("suites are reproducible and independent of scheduling")
    {
        const std::vector<int> cases {1, 4};
        const auto a = run_suite(cases, 2, 10, false);
        const auto b = run_suite(cases, 2, 10, false);
        const auto c = run_suite(cases, 2, 10, true);
        CHECK(to_json(a, false).dump() == to_json(b, false).dump());
        CHECK(to_json(a, false).dump() == to_json(c, false).dump());
        REQUIRE(a.cases.size() == 2);
        CHECK(a.runs.size() == 4);
        CHECK(a.runs[1].seed == 11);
        CHECK(a.cases[0].runs == 2);
        CHECK(a.cases[1].repeated == VarSet {3});
    }

    TEST_CASE("aggregation does not depend on run order")
    {
        auto runs = run_suite({1, 2}, 3, 1, false).runs;
        const auto reference = to_json(summarize(runs), false).dump();
        std::mt19937 shuffle(3);
        for (int t = 0; t < 5; ++t) {
            std::shuffle(runs.begin(), runs.end(), shuffle);
            CHECK(to_json(summarize(runs), false).dump() == reference);
        }
    }

    TEST_CASE("suite json and table")
    {
        const auto s = run_suite({3}, 1, 1, false);
        const Json j = to_json(s, true);
        const auto& c = j["cases"][0];
        for (const char* key : {"no", "dim", "samples", "repeated", "blocks", "factors", "match", "mse_max",
                                "success_rate", "median_wall_ms", "median_evals"}) {
            CHECK(c.contains(key));
        }
        CHECK_FALSE(to_json(s, false)["cases"][0].contains("median_wall_ms"));
        const std::string table = format_table(s, true);
        CHECK(table.find("case") == 0);
        CHECK(table.find("median_ms") != std::string::npos);
    }

    TEST_CASE("case lists")
    {
        CHECK(parse_case_list("1-10").size() == 10);
        CHECK(parse_case_list("4") == std::vector<int> {4});
        CHECK(parse_case_list("1,3,5-7") == std::vector<int> {1, 3, 5, 6, 7});
        CHECK_THROWS(parse_case_list("0"));
        CHECK_THROWS(parse_case_list("3-1"));
        CHECK_THROWS(parse_case_list("a"));
        CHECK_THROWS(parse_case_list("12"));
    }
}
