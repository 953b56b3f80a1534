#ifndef GSR_TESTS_PROPERTIES_HPP
#define GSR_TESTS_PROPERTIES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gsr/detect.hpp"
#include "gsr/expr.hpp"
#include "gsr/random.hpp"

namespace gsr::testing {

struct PropertyResult {
    std::string name;
    int passed {0};
    int total {0};
    std::string first_failure;

    bool ok() const noexcept { return total > 0 && passed == total; }
    void record(bool pass, const std::string& what);
};

/// Random tree over x1..arity using every operator; may be invalid in places.
Expr random_tree(Rng& rng, int arity, int depth);

/// Random tree that stays finite and moderate on [-3, 3]^arity.
Expr random_smooth(Rng& rng, const VarSet& vars, int depth);

/// Same sets and partitions, anchors and probe counts ignored.
bool same_structure(const GsStructure& a, const GsStructure& b);

/// Finest additive partition of f's variables by brute force over all set
/// partitions, each checked with direct mixed differences between parts.
std::vector<VarSet> finest_additive_partition(const Expr& f, const DomainBox& box, std::uint64_t seed);

PropertyResult round_trip_property(int trees, std::uint64_t seed);
PropertyResult affine_invariance_property(double a, double b, std::uint64_t seed);
PropertyResult partition_oracle_property(int instances, std::uint64_t seed);
PropertyResult additive_mixed_diff_property(int pairs, std::uint64_t seed);
PropertyResult orthogonality_property(int problems, std::uint64_t seed);
PropertyResult sphere_property(int max_dim, int seeds);

} // namespace gsr::testing

#endif
