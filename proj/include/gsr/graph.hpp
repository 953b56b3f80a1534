#ifndef GSR_GRAPH_HPP
#define GSR_GRAPH_HPP

#include <vector>

namespace gsr {

/// Sorted set of 1-based variable indices.
using VarSet = std::vector<int>;

struct Edge {
    int a;
    int b;
    double score;
};

/// Undirected graph over variables x1..xn weighted by additive-interaction
/// scores; (i, j) is an edge iff score(i, j) > tolerance.
class InteractionGraph {
public:
    InteractionGraph() = default;
    InteractionGraph(int vertices, double tolerance);

    /// Graph whose listed pairs score 1 and all others 0 (for tests and tools).
    static InteractionGraph from_edges(int vertices, const std::vector<std::pair<int, int>>& edges,
                                       double tolerance = 0.5);

    int vertices() const noexcept { return n_; }
    double tolerance() const noexcept { return tolerance_; }

    double score(int i, int j) const;
    void set_score(int i, int j, double score);
    bool has_edge(int i, int j) const { return i != j && score(i, j) > tolerance_; }
    std::vector<Edge> edges() const;

private:
    int n_ {0};
    double tolerance_ {0.0};
    std::vector<double> scores_;
};

/// Connected components of the subgraph induced by `vertices`, each sorted,
/// ordered by smallest member.
std::vector<VarSet> connected_components(const InteractionGraph& g, const VarSet& vertices);

/// All vertices 1..n.
VarSet all_vertices(int n);

/// Repeated variables as iteratively peeled minimal vertex separators of size
/// at most k_max. Each round picks the smallest subset S whose removal splits
/// the current graph into more components (largest increase, then
/// lexicographically smallest); S must also separate the original graph.
VarSet repeated_vars(const InteractionGraph& g, int k_max = 3);

VarSet set_union(const VarSet& a, const VarSet& b);
VarSet set_difference(const VarSet& a, const VarSet& b);

} // namespace gsr

#endif
