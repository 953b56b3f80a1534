#ifndef GSR_DETECT_HPP
#define GSR_DETECT_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsr/graph.hpp"
#include "gsr/oracle.hpp"

namespace gsr {

struct DetectConfig {
    double tolerance = 1e-8;           // relative detection tolerance
    int probes = 8;                    // probe pairs per interaction test
    int k_max = 3;                     // largest repeated-variable cut
    std::size_t points_per_var = 50;   // tabulated factor data per free variable
    int reconstruction_points = 32;
    int anchor_attempts = 3;
    std::uint64_t seed = 1;
};

class DetectionError : public std::runtime_error {
public:
    enum class Kind {
        DegenerateDomain,
        StructureUnstable,
        EmptyBlock,
        DegenerateBlock,
        UnresolvableOmega,
        InsufficientProbes,
        NotGsSystem,
    };

    DetectionError(Kind kind, const std::string& message, double residual = 0.0)
        : std::runtime_error(message)
        , kind_(kind)
        , residual_(residual)
    {
    }

    Kind kind() const noexcept { return kind_; }
    double residual() const noexcept { return residual_; }

private:
    Kind kind_;
    double residual_;
};

struct Block {
    VarSet vars;                       // non-repeated variables (never empty)
    VarSet repeated;                   // repeated variables this block depends on
    std::vector<VarSet> psi_factors;   // partition of vars
    std::vector<VarSet> omega_factors; // partition of repeated

    // Values of `vars` used to isolate the repeated-variable factor by differencing.
    std::vector<double> omega_probe_high;
    std::vector<double> omega_probe_low;

    std::size_t factor_count() const noexcept { return psi_factors.size() + omega_factors.size(); }
};

/// Detected generalized separable structure:
///   f = c0 + sum_i c_i * prod_j omega_ij(X^r_ij) * prod_k psi_ik(Xbar_ik)
struct GsStructure {
    int arity {0};
    VarSet repeated;
    std::vector<Block> blocks;
    VarSet inactive; // variables f does not depend on
    std::vector<double> anchor;
    std::uint64_t probes_used {0};

    std::size_t factor_count() const noexcept;

    /// Throws std::logic_error if the partition conditions are violated:
    /// disjoint non-empty non-repeated sets covering all variables together
    /// with the repeated and inactive ones, and true factor partitions.
    void check_invariants() const;
};

enum class FactorRole { Psi, Omega };

/// Tabulated samples of one isolated factor, known only up to an affine map
/// (psi) or a scale (omega). `response` evaluates the same slice at arbitrary
/// coordinates of `vars`.
struct FactorData {
    VarSet vars;
    FactorRole role {FactorRole::Psi};
    std::size_t block {0};
    Points points;                 // coordinates of `vars`, in order
    std::vector<double> values;
    std::vector<double> anchor;    // anchor restricted to `vars`
    std::vector<Interval> bounds;  // box restricted to `vars`
    std::function<double(std::span<const double>)> response;
};

/// Normalized mixed second difference between x_i and x_j with all other
/// coordinates at `anchor`. Zero iff the two lie in additively separated parts.
double mixed_diff(const Oracle& oracle, int i, int j, std::span<const double> anchor, int probes, std::uint64_t seed);

/// Anchor drawn from the central half of the box.
std::vector<double> draw_anchor(const DomainBox& box, std::uint64_t seed);

/// Pairwise additive-interaction graph at `anchor`; probe streams are derived
/// per pair from config.seed, so the result does not depend on scheduling.
InteractionGraph interaction_graph(const Oracle& oracle, std::span<const double> anchor, const DetectConfig& config);

/// Minimal blocks with the repeated variables pinned at the anchor, their
/// repeated-variable membership, and a stability check at a second anchor.
/// Factor partitions are left empty.
GsStructure minimal_blocks(const Oracle& oracle, const VarSet& repeated, std::span<const double> anchor,
                           const DetectConfig& config);

/// Slice of the function along `vars` (a subset of block `block`'s
/// non-repeated variables) with everything else at the anchor, minus f(anchor).
FactorData isolate_psi_data(const Oracle& oracle, const GsStructure& s, std::size_t block, const VarSet& vars,
                            std::size_t n_points, std::uint64_t seed);

/// Difference of two slices that only differ in block `block`'s non-repeated
/// variables, swept along `vars` (a subset of the block's repeated variables).
FactorData isolate_omega_data(const Oracle& oracle, const GsStructure& s, std::size_t block, const VarSet& vars,
                              std::size_t n_points, std::uint64_t seed);

/// Result of the rank-1 tests between two variable groups. The data passes
/// as multiplicative iff it has the form s * u(a) * v(b) + t.
struct SeparabilityVerdict {
    bool additive {false};       // mixed differences vanish
    bool multiplicative {false}; // cross-ratio identity holds and not additive
    double residual {0.0};        // largest normalized cross-ratio violation
    double row_residual {0.0};    // same for differences along group a
    double column_residual {0.0}; // same for differences along group b
};

/// Groups are positions into d.vars.
SeparabilityVerdict cross_ratio_test(const FactorData& d, const std::vector<std::size_t>& group_a,
                                     const std::vector<std::size_t>& group_b, const DetectConfig& config,
                                     std::uint64_t seed);

/// Splits d's variables into multiplicatively separable factor groups.
std::vector<VarSet> factor_partition(const FactorData& d, const DetectConfig& config);

/// Full structure detection: interaction graph, repeated variables, minimal
/// blocks, factor partitions, then a reconstruction check.
GsStructure detect_structure(const Oracle& oracle, const DetectConfig& config);

} // namespace gsr

#endif
