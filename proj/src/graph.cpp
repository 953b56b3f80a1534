#include "gsr/graph.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace gsr {

InteractionGraph::InteractionGraph(int vertices, double tolerance)
    : n_(vertices)
    , tolerance_(tolerance)
    , scores_(static_cast<std::size_t>(vertices) * static_cast<std::size_t>(vertices), 0.0)
{
    if (vertices < 0) {
        throw std::invalid_argument("negative vertex count");
    }
}

InteractionGraph InteractionGraph::from_edges(int vertices, const std::vector<std::pair<int, int>>& edges,
                                              double tolerance)
{
    InteractionGraph g(vertices, tolerance);
    for (auto [a, b] : edges) {
        g.set_score(a, b, 1.0);
    }
    return g;
}

double InteractionGraph::score(int i, int j) const
{
    if (i < 1 || j < 1 || i > n_ || j > n_) {
        throw std::out_of_range("vertex index out of range");
    }
    return scores_[static_cast<std::size_t>((i - 1) * n_ + (j - 1))];
}

void InteractionGraph::set_score(int i, int j, double score)
{
    if (i == j) {
        throw std::invalid_argument("self-loops are not allowed");
    }
    if (i < 1 || j < 1 || i > n_ || j > n_) {
        throw std::out_of_range("vertex index out of range");
    }
    scores_[static_cast<std::size_t>((i - 1) * n_ + (j - 1))] = score;
    scores_[static_cast<std::size_t>((j - 1) * n_ + (i - 1))] = score;
}

std::vector<Edge> InteractionGraph::edges() const
{
    std::vector<Edge> out;
    for (int i = 1; i <= n_; ++i) {
        for (int j = i + 1; j <= n_; ++j) {
            if (has_edge(i, j)) {
                out.push_back({i, j, score(i, j)});
            }
        }
    }
    return out;
}

VarSet all_vertices(int n)
{
    VarSet v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] = i + 1;
    }
    return v;
}

std::vector<VarSet> connected_components(const InteractionGraph& g, const VarSet& vertices)
{
    std::vector<char> present(static_cast<std::size_t>(g.vertices()) + 1, 0);
    for (int v : vertices) {
        present[static_cast<std::size_t>(v)] = 1;
    }
    std::vector<char> seen(present.size(), 0);
    std::vector<VarSet> components;
    VarSet sorted = vertices;
    std::sort(sorted.begin(), sorted.end());
    for (int start : sorted) {
        if (seen[static_cast<std::size_t>(start)]) {
            continue;
        }
        VarSet comp;
        std::vector<int> stack {start};
        seen[static_cast<std::size_t>(start)] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            comp.push_back(v);
            for (int w = 1; w <= g.vertices(); ++w) {
                if (present[static_cast<std::size_t>(w)] && !seen[static_cast<std::size_t>(w)] && g.has_edge(v, w)) {
                    seen[static_cast<std::size_t>(w)] = 1;
                    stack.push_back(w);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
    }
    return components;
}

VarSet set_union(const VarSet& a, const VarSet& b)
{
    VarSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

VarSet set_difference(const VarSet& a, const VarSet& b)
{
    VarSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

namespace {

    // Calls visit(subset) for every k-subset of `pool` in lexicographic order.
    void for_each_subset(const VarSet& pool, std::size_t k, const std::function<void(const VarSet&)>& visit)
    {
        if (k > pool.size()) {
            return;
        }
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) {
            idx[i] = i;
        }
        VarSet subset(k);
        for (;;) {
            for (std::size_t i = 0; i < k; ++i) {
                subset[i] = pool[idx[i]];
            }
            visit(subset);
            std::size_t i = k;
            while (i > 0 && idx[i - 1] == pool.size() - k + (i - 1)) {
                --i;
            }
            if (i == 0) {
                return;
            }
            ++idx[i - 1];
            for (std::size_t j = i; j < k; ++j) {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }

} // namespace

VarSet repeated_vars(const InteractionGraph& g, int k_max)
{
    if (k_max < 1) {
        throw std::invalid_argument("k_max must be >= 1");
    }
    const VarSet all = all_vertices(g.vertices());
    const std::size_t base_components = connected_components(g, all).size();

    VarSet repeated;
    VarSet remaining = all;
    for (;;) {
        const std::size_t current = connected_components(g, remaining).size();
        VarSet best;
        std::size_t best_gain = 0;
        for (std::size_t size = 1; size <= static_cast<std::size_t>(k_max) && best.empty(); ++size) {
            // Leave at least two vertices so that a split is meaningful.
            if (remaining.size() < size + 2) {
                break;
            }
            for_each_subset(remaining, size, [&](const VarSet& s) {
                const VarSet rest = set_difference(remaining, s);
                const std::size_t after = connected_components(g, rest).size();
                if (after <= current) {
                    return;
                }
                // A repeated variable must separate the full graph as well;
                // otherwise it only splits a block that is already a valid product.
                const std::size_t original_after = connected_components(g, set_difference(all, s)).size();
                if (original_after <= base_components) {
                    return;
                }
                const std::size_t gain = after - current;
                if (gain > best_gain) { // strict: earlier subsets win ties
                    best_gain = gain;
                    best = s;
                }
            });
        }
        if (best.empty()) {
            return repeated;
        }
        repeated = set_union(repeated, best);
        remaining = set_difference(remaining, best);
    }
}

} // namespace gsr
