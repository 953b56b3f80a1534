#include <doctest.h>

#include <stdexcept>

#include "gsr/graph.hpp"

using namespace gsr;

TEST_SUITE("graph")
{
    TEST_CASE("edges follow the tolerance")
    {
        InteractionGraph g(3, 0.1);
        g.set_score(1, 2, 0.5);
        g.set_score(2, 3, 0.05);
        CHECK(g.has_edge(1, 2));
        CHECK(g.has_edge(2, 1));
        CHECK_FALSE(g.has_edge(2, 3));
        CHECK_FALSE(g.has_edge(1, 1));
        CHECK(g.edges().size() == 1);
        CHECK_THROWS(g.set_score(1, 1, 1.0));
    }

    TEST_CASE("connected components")
    {
        const auto g = InteractionGraph::from_edges(5, {{1, 2}, {4, 5}});
        const auto c = connected_components(g, all_vertices(5));
        CHECK(c == std::vector<VarSet> {{1, 2}, {3}, {4, 5}});
        CHECK(connected_components(g, {2, 3}) == std::vector<VarSet> {{2}, {3}});
    }

    TEST_CASE("repeated variables of the table graphs")
    {
        const auto case4 = InteractionGraph::from_edges(3, {{1, 3}, {2, 3}});
        CHECK(repeated_vars(case4) == VarSet {3});

        const auto case7 = InteractionGraph::from_edges(5, {{1, 4}, {1, 5}, {4, 5}, {2, 5}, {3, 4}});
        CHECK(repeated_vars(case7) == VarSet {4, 5});

        const auto k3 = InteractionGraph::from_edges(3, {{1, 2}, {1, 3}, {2, 3}});
        CHECK(repeated_vars(k3).empty());

        CHECK(repeated_vars(InteractionGraph::from_edges(3, {})).empty());
    }

    TEST_CASE("a size-two cut")
    {
        // Two triangles glued along the pair {3, 4}.
        const auto g = InteractionGraph::from_edges(6, {{1, 3}, {1, 4}, {3, 4}, {2, 3}, {2, 4}, {5, 3}, {5, 4}, {6, 3},
                                                        {6, 4}, {1, 2}, {5, 6}});
        CHECK(repeated_vars(g) == VarSet {3, 4});
        CHECK(repeated_vars(g, 1).empty());
    }

    TEST_CASE("a cut must also split the full graph")
    {
        // Path 1-2-3: x2 separates; nothing is left to split afterwards.
        const auto path = InteractionGraph::from_edges(3, {{1, 2}, {2, 3}});
        CHECK(repeated_vars(path) == VarSet {2});
        CHECK_THROWS_AS(repeated_vars(path, 0), std::invalid_argument);
    }

    TEST_CASE("set helpers")
    {
        CHECK(set_union({1, 3}, {2, 3}) == VarSet {1, 2, 3});
        CHECK(set_difference({1, 2, 3}, {2}) == VarSet {1, 3});
        CHECK(all_vertices(3) == VarSet {1, 2, 3});
    }
}
