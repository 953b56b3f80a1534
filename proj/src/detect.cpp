#include "gsr/detect.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "gsr/random.hpp"

namespace gsr {

namespace {

    // Stream tags for derive_seed.
    enum : std::uint64_t {
        TagAnchor = 1,
        TagGraph,
        TagBlocks,
        TagStability,
        TagOmegaProbe,
        TagMembership,
        TagInactive,
        TagPsiData,
        TagOmegaData,
        TagPartition,
        TagBlockCheck,
        TagReconstruct,
    };

    constexpr int max_redraws = 10;

    std::size_t pos(int var) { return static_cast<std::size_t>(var - 1); }

    double scale_of(double max_abs) { return std::max(1.0, max_abs); }

    void assign(std::vector<double>& point, const VarSet& vars, std::span<const double> values)
    {
        for (std::size_t k = 0; k < vars.size(); ++k) {
            point[pos(vars[k])] = values[k];
        }
    }

    std::vector<double> draw_in(Rng& rng, const DomainBox& box, const VarSet& vars)
    {
        std::vector<double> v(vars.size());
        for (std::size_t k = 0; k < vars.size(); ++k) {
            const auto& iv = box[pos(vars[k])];
            v[k] = uniform(rng, iv.lo, iv.hi);
        }
        return v;
    }

    std::vector<double> restrict_to(std::span<const double> point, const VarSet& vars)
    {
        std::vector<double> v(vars.size());
        for (std::size_t k = 0; k < vars.size(); ++k) {
            v[k] = point[pos(vars[k])];
        }
        return v;
    }

    std::vector<Interval> bounds_of(const DomainBox& box, const VarSet& vars)
    {
        std::vector<Interval> b;
        b.reserve(vars.size());
        for (int v : vars) {
            b.push_back(box[pos(v)]);
        }
        return b;
    }

    // Additive-interaction graph over `vars` only; other vertices stay isolated.
    InteractionGraph interaction_subgraph(const Oracle& oracle, const VarSet& vars, std::span<const double> anchor,
                                          const DetectConfig& config, std::uint64_t seed)
    {
        InteractionGraph g(oracle.arity(), config.tolerance);
        for (std::size_t a = 0; a < vars.size(); ++a) {
            for (std::size_t b = a + 1; b < vars.size(); ++b) {
                const int i = vars[a];
                const int j = vars[b];
                const auto pair_seed
                    = derive_seed(seed, {static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)});
                g.set_score(i, j, mixed_diff(oracle, i, j, anchor, config.probes, pair_seed));
            }
        }
        return g;
    }

    // Picks the probe pair for the block's variables that maximizes
    // |f(a, b1) - f(a, b2)| among eight seeded candidates.
    void choose_omega_probe(const Oracle& oracle, Block& block, std::span<const double> anchor,
                            const DetectConfig& config, std::uint64_t seed)
    {
        Rng rng(seed);
        std::vector<double> p(anchor.begin(), anchor.end());
        double best = -1.0;
        double max_abs = 0.0;
        for (int c = 0; c < 8; ++c) {
            auto b1 = draw_in(rng, oracle.box(), block.vars);
            auto b2 = draw_in(rng, oracle.box(), block.vars);
            assign(p, block.vars, b1);
            const double f1 = oracle(p);
            assign(p, block.vars, b2);
            const double f2 = oracle(p);
            if (is_invalid(f1) || is_invalid(f2)) {
                continue;
            }
            max_abs = std::max({max_abs, std::fabs(f1), std::fabs(f2)});
            const double spread = std::fabs(f1 - f2);
            if (spread > best) {
                best = spread;
                block.omega_probe_high = std::move(b1);
                block.omega_probe_low = std::move(b2);
            }
        }
        if (best < 0.0 || best <= config.tolerance * scale_of(max_abs)) {
            throw DetectionError(DetectionError::Kind::UnresolvableOmega,
                                 "unresolvable omega: block response is constant at every probe pair");
        }
    }

    // max |Delta(z) - Delta(a)| / scale, with Delta the block-isolating
    // difference and z moving only the repeated variable v.
    double membership_score(const Oracle& oracle, const Block& block, int v, std::span<const double> anchor,
                            int probes, std::uint64_t seed)
    {
        Rng rng(seed);
        std::vector<double> p(anchor.begin(), anchor.end());
        assign(p, block.vars, block.omega_probe_high);
        const double fa1 = oracle(p);
        assign(p, block.vars, block.omega_probe_low);
        const double fa2 = oracle(p);
        double max_abs = std::max(std::fabs(fa1), std::fabs(fa2));
        double max_diff = 0.0;
        int valid = 0;
        int redraws = 0;
        const auto& iv = oracle.box()[pos(v)];
        while (valid < probes) {
            p[pos(v)] = uniform(rng, iv.lo, iv.hi);
            assign(p, block.vars, block.omega_probe_high);
            const double f1 = oracle(p);
            assign(p, block.vars, block.omega_probe_low);
            const double f2 = oracle(p);
            if (is_invalid(f1) || is_invalid(f2)) {
                if (++redraws > max_redraws) {
                    throw DetectionError(DetectionError::Kind::DegenerateDomain, "degenerate domain");
                }
                continue;
            }
            max_abs = std::max({max_abs, std::fabs(f1), std::fabs(f2)});
            max_diff = std::max(max_diff, std::fabs((f1 - f2) - (fa1 - fa2)));
            ++valid;
        }
        return max_diff / scale_of(max_abs);
    }

    bool is_inactive(const Oracle& oracle, int v, std::span<const double> anchor, const DetectConfig& config,
                     std::uint64_t seed)
    {
        Rng rng(seed);
        std::vector<double> p(anchor.begin(), anchor.end());
        const double f0 = oracle(p);
        double max_abs = std::fabs(f0);
        double max_diff = 0.0;
        const auto& iv = oracle.box()[pos(v)];
        for (int k = 0; k < config.probes; ++k) {
            p[pos(v)] = uniform(rng, iv.lo, iv.hi);
            const double f = oracle(p);
            if (is_invalid(f)) {
                return false;
            }
            max_abs = std::max(max_abs, std::fabs(f));
            max_diff = std::max(max_diff, std::fabs(f - f0));
        }
        return max_diff <= config.tolerance * scale_of(max_abs);
    }

    // Draws n_points valid points of d.response inside d.bounds. `reference`
    // is a typical |f| used to judge whether the response is constant.
    void tabulate(FactorData& d, std::size_t n_points, std::uint64_t seed, double reference, double tolerance,
                  DetectionError::Kind degenerate_kind, const char* degenerate_message)
    {
        Rng rng(seed);
        const std::size_t dim = d.vars.size();
        d.points = Points(0, dim);
        d.values.clear();
        d.values.reserve(n_points);
        std::vector<double> coords(dim);
        std::size_t failures = 0;
        double max_abs = std::fabs(reference);
        while (d.values.size() < n_points) {
            for (std::size_t k = 0; k < dim; ++k) {
                coords[k] = uniform(rng, d.bounds[k].lo, d.bounds[k].hi);
            }
            const double y = d.response(coords);
            if (is_invalid(y)) {
                if (++failures > static_cast<std::size_t>(max_redraws) * n_points) {
                    throw DetectionError(DetectionError::Kind::DegenerateDomain, "degenerate domain");
                }
                continue;
            }
            d.points.append(coords);
            d.values.push_back(y);
            max_abs = std::max(max_abs, std::fabs(y));
        }
        const auto [lo, hi] = std::minmax_element(d.values.begin(), d.values.end());
        if (*hi - *lo <= tolerance * scale_of(max_abs)) {
            throw DetectionError(degenerate_kind, degenerate_message);
        }
    }

    std::vector<std::size_t> positions_of(const VarSet& subset, const VarSet& in)
    {
        std::vector<std::size_t> p;
        for (int v : subset) {
            p.push_back(static_cast<std::size_t>(std::find(in.begin(), in.end(), v) - in.begin()));
        }
        return p;
    }

    // Slice of f along `vars` with everything else at the anchor.
    FactorData raw_slice(const Oracle& oracle, const VarSet& vars, std::span<const double> anchor)
    {
        FactorData d;
        d.vars = vars;
        d.anchor = restrict_to(anchor, vars);
        d.bounds = bounds_of(oracle.box(), vars);
        std::vector<double> base(anchor.begin(), anchor.end());
        d.response = [&oracle, base, vars](std::span<const double> coords) {
            std::vector<double> p = base;
            assign(p, vars, coords);
            return oracle(p);
        };
        return d;
    }

    // f(x) - f(a) - sum_i h_i(x restricted to block i), with the repeated and
    // inactive variables at the anchor.
    void check_reconstruction(const Oracle& oracle, const GsStructure& s, const DetectConfig& config,
                              std::uint64_t seed)
    {
        Rng rng(seed);
        const double f0 = oracle(s.anchor);
        double max_abs = std::fabs(f0);
        double worst = 0.0;
        int redraws = 0;
        for (int k = 0; k < config.reconstruction_points;) {
            std::vector<double> x = s.anchor;
            double sum = 0.0;
            bool ok = true;
            for (const auto& block : s.blocks) {
                auto b = draw_in(rng, oracle.box(), block.vars);
                assign(x, block.vars, b);
                std::vector<double> slice = s.anchor;
                assign(slice, block.vars, b);
                const double h = oracle(slice);
                ok = ok && !is_invalid(h);
                max_abs = std::max(max_abs, std::fabs(h));
                sum += h - f0;
            }
            const double fx = oracle(x);
            if (!ok || is_invalid(fx)) {
                if (++redraws > max_redraws * config.reconstruction_points) {
                    throw DetectionError(DetectionError::Kind::DegenerateDomain, "degenerate domain");
                }
                continue;
            }
            max_abs = std::max(max_abs, std::fabs(fx));
            worst = std::max(worst, std::fabs(fx - f0 - sum));
            ++k;
        }
        const double residual = worst / scale_of(max_abs);
        if (residual > config.tolerance) {
            throw DetectionError(DetectionError::Kind::NotGsSystem,
                                 "not a GS system under current tolerances (reconstruction residual "
                                     + std::to_string(residual) + ")",
                                 residual);
        }
    }

    // Each block must be a product omega(X_i^r) * psi(Xbar_i) up to terms
    // that do not mix the two groups.
    void check_block_products(const Oracle& oracle, const GsStructure& s, const DetectConfig& config,
                              std::uint64_t seed)
    {
        for (std::size_t i = 0; i < s.blocks.size(); ++i) {
            const auto& block = s.blocks[i];
            if (block.repeated.empty()) {
                continue;
            }
            const VarSet joint = set_union(block.repeated, block.vars);
            FactorData d = raw_slice(oracle, joint, s.anchor);
            const auto verdict = cross_ratio_test(d, positions_of(block.repeated, joint),
                                                  positions_of(block.vars, joint), config,
                                                  derive_seed(seed, {static_cast<std::uint64_t>(i)}));
            // Other blocks contribute terms in the repeated group only, which
            // cancel in differences along the block's own variables.
            const bool product = !verdict.additive && verdict.residual <= config.tolerance
                && verdict.column_residual <= config.tolerance;
            if (!product) {
                throw DetectionError(DetectionError::Kind::NotGsSystem,
                                     "not a GS system under current tolerances (block "
                                         + std::to_string(i + 1) + " is not a product of its repeated and "
                                         "non-repeated parts)",
                                     verdict.residual);
            }
        }
    }

} // namespace

std::size_t GsStructure::factor_count() const noexcept
{
    std::size_t n = 0;
    for (const auto& b : blocks) {
        n += b.factor_count();
    }
    return n;
}

void GsStructure::check_invariants() const
{
    auto fail = [](const std::string& what) { throw std::logic_error("GS structure invariant violated: " + what); };
    auto is_partition = [](const std::vector<VarSet>& parts, const VarSet& whole) {
        VarSet joined;
        std::size_t total = 0;
        for (const auto& p : parts) {
            if (p.empty() || !std::is_sorted(p.begin(), p.end())) {
                return false;
            }
            total += p.size();
            joined = set_union(joined, p);
        }
        return total == whole.size() && joined == whole;
    };

    std::vector<int> seen(static_cast<std::size_t>(arity) + 1, 0);
    for (int v : repeated) {
        ++seen[pos(v) + 1];
    }
    for (int v : inactive) {
        ++seen[pos(v) + 1];
    }
    for (const auto& b : blocks) {
        if (b.vars.empty()) {
            fail("empty non-repeated set");
        }
        for (int v : b.vars) {
            ++seen[pos(v) + 1];
        }
        if (set_difference(b.repeated, repeated).size() != 0) {
            fail("block depends on a variable outside the repeated set");
        }
        if (!is_partition(b.psi_factors, b.vars)) {
            fail("psi factors do not partition the block variables");
        }
        if (!is_partition(b.omega_factors, b.repeated)) {
            fail("omega factors do not partition the block's repeated variables");
        }
    }
    for (int v = 1; v <= arity; ++v) {
        if (seen[static_cast<std::size_t>(v)] != 1) {
            fail("variable x" + std::to_string(v) + " is not covered exactly once");
        }
    }
}

double mixed_diff(const Oracle& oracle, int i, int j, std::span<const double> anchor, int probes, std::uint64_t seed)
{
    if (i == j) {
        throw std::invalid_argument("mixed_diff needs two distinct variables");
    }
    if (!oracle.box().contains(anchor)) {
        throw std::invalid_argument("anchor outside the domain box");
    }
    // Draw the lower index first so that (i, j) and (j, i) see the same probes.
    const int lo = std::min(i, j);
    const int hi = std::max(i, j);
    const auto& ilo = oracle.box()[pos(lo)];
    const auto& ihi = oracle.box()[pos(hi)];
    Rng rng(seed);
    std::vector<double> p(anchor.begin(), anchor.end());
    auto f_at = [&](double u, double v) {
        p[pos(lo)] = u;
        p[pos(hi)] = v;
        return oracle(p);
    };
    double max_d = 0.0;
    double max_abs = 0.0;
    int valid = 0;
    int redraws = 0;
    while (valid < probes) {
        const double u = uniform(rng, ilo.lo, ilo.hi);
        const double u2 = uniform(rng, ilo.lo, ilo.hi);
        const double v = uniform(rng, ihi.lo, ihi.hi);
        const double v2 = uniform(rng, ihi.lo, ihi.hi);
        const double f11 = f_at(u, v);
        const double f12 = f_at(u, v2);
        const double f21 = f_at(u2, v);
        const double f22 = f_at(u2, v2);
        if (is_invalid(f11) || is_invalid(f12) || is_invalid(f21) || is_invalid(f22)) {
            if (++redraws > max_redraws) {
                throw DetectionError(DetectionError::Kind::DegenerateDomain, "degenerate domain");
            }
            continue;
        }
        max_abs = std::max({max_abs, std::fabs(f11), std::fabs(f12), std::fabs(f21), std::fabs(f22)});
        max_d = std::max(max_d, std::fabs((f11 + f22) - (f12 + f21)));
        ++valid;
    }
    return max_d / scale_of(max_abs);
}

std::vector<double> draw_anchor(const DomainBox& box, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<double> a(static_cast<std::size_t>(box.arity()));
    for (std::size_t k = 0; k < a.size(); ++k) {
        const auto& iv = box[k];
        a[k] = iv.lo + iv.width() * uniform(rng, 0.25, 0.75);
    }
    return a;
}

InteractionGraph interaction_graph(const Oracle& oracle, std::span<const double> anchor, const DetectConfig& config)
{
    return interaction_subgraph(oracle, all_vertices(oracle.arity()), anchor, config,
                                derive_seed(config.seed, {TagGraph}));
}

GsStructure minimal_blocks(const Oracle& oracle, const VarSet& repeated, std::span<const double> anchor,
                           const DetectConfig& config)
{
    GsStructure s;
    s.arity = oracle.arity();
    s.repeated = repeated;
    s.anchor.assign(anchor.begin(), anchor.end());

    const VarSet free_vars = set_difference(all_vertices(s.arity), repeated);
    const auto graph = interaction_subgraph(oracle, free_vars, anchor, config, derive_seed(config.seed, {TagBlocks}));
    const auto components = connected_components(graph, free_vars);

    bool stable = false;
    for (std::uint64_t attempt = 0; attempt < 2 && !stable; ++attempt) {
        const auto second = draw_anchor(oracle.box(), derive_seed(config.seed, {TagStability, attempt}));
        const auto g2 = interaction_subgraph(oracle, free_vars, second, config,
                                             derive_seed(config.seed, {TagStability, attempt, 1}));
        stable = connected_components(g2, free_vars) == components;
    }
    if (!stable) {
        throw DetectionError(DetectionError::Kind::StructureUnstable,
                             "structure unstable: block partition differs between anchors");
    }

    for (const auto& comp : components) {
        if (comp.empty()) {
            throw DetectionError(DetectionError::Kind::EmptyBlock, "empty block");
        }
        if (comp.size() == 1
            && is_inactive(oracle, comp.front(), anchor, config,
                           derive_seed(config.seed, {TagInactive, static_cast<std::uint64_t>(comp.front())}))) {
            s.inactive.push_back(comp.front());
            continue;
        }
        Block b;
        b.vars = comp;
        s.blocks.push_back(std::move(b));
    }

    if (!repeated.empty()) {
        std::vector<int> used(static_cast<std::size_t>(s.arity) + 1, 0);
        for (std::size_t i = 0; i < s.blocks.size(); ++i) {
            auto& block = s.blocks[i];
            choose_omega_probe(oracle, block, anchor, config,
                               derive_seed(config.seed, {TagOmegaProbe, static_cast<std::uint64_t>(i)}));
            for (int v : repeated) {
                const double score = membership_score(
                    oracle, block, v, anchor, config.probes,
                    derive_seed(config.seed, {TagMembership, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(v)}));
                if (score > config.tolerance) {
                    block.repeated.push_back(v);
                    used[static_cast<std::size_t>(v)] = 1;
                }
            }
        }
        for (int v : repeated) {
            if (!used[static_cast<std::size_t>(v)]) {
                throw DetectionError(DetectionError::Kind::EmptyBlock,
                                     "empty block: repeated variable x" + std::to_string(v)
                                         + " has no non-repeated partner");
            }
        }
    }
    return s;
}

FactorData isolate_psi_data(const Oracle& oracle, const GsStructure& s, std::size_t block, const VarSet& vars,
                            std::size_t n_points, std::uint64_t seed)
{
    if (block >= s.blocks.size() || vars.empty() || !std::includes(s.blocks[block].vars.begin(), s.blocks[block].vars.end(), vars.begin(), vars.end())) {
        throw std::invalid_argument("psi data must cover a non-empty subset of the block's variables");
    }
    const double f0 = oracle(s.anchor);
    if (is_invalid(f0)) {
        throw DetectionError(DetectionError::Kind::DegenerateDomain, "invalid value at the anchor");
    }
    FactorData d = raw_slice(oracle, vars, s.anchor);
    d.role = FactorRole::Psi;
    d.block = block;
    d.response = [raw = d.response, f0](std::span<const double> coords) { return raw(coords) - f0; };
    tabulate(d, n_points, seed, f0, 1e-8, DetectionError::Kind::DegenerateBlock,
             "degenerate block: sliced responses are constant");
    return d;
}

FactorData isolate_omega_data(const Oracle& oracle, const GsStructure& s, std::size_t block, const VarSet& vars,
                              std::size_t n_points, std::uint64_t seed)
{
    if (block >= s.blocks.size()) {
        throw std::invalid_argument("block index out of range");
    }
    const auto& b = s.blocks[block];
    if (vars.empty() || !std::includes(b.repeated.begin(), b.repeated.end(), vars.begin(), vars.end())) {
        throw std::invalid_argument("omega data must cover a non-empty subset of the block's repeated variables");
    }
    if (b.omega_probe_high.size() != b.vars.size() || b.omega_probe_low.size() != b.vars.size()) {
        throw std::invalid_argument("block has no omega probe pair");
    }
    FactorData d;
    d.vars = vars;
    d.role = FactorRole::Omega;
    d.block = block;
    d.anchor = restrict_to(s.anchor, vars);
    d.bounds = bounds_of(oracle.box(), vars);
    std::vector<double> high = s.anchor;
    assign(high, b.vars, b.omega_probe_high);
    std::vector<double> low = s.anchor;
    assign(low, b.vars, b.omega_probe_low);
    const double reference = std::max(std::fabs(oracle(high)), std::fabs(oracle(low)));
    d.response = [&oracle, high, low, vars](std::span<const double> z) {
        std::vector<double> p1 = high;
        std::vector<double> p2 = low;
        assign(p1, vars, z);
        assign(p2, vars, z);
        return oracle(p1) - oracle(p2);
    };
    tabulate(d, n_points, seed, reference, 1e-8, DetectionError::Kind::UnresolvableOmega,
             "unresolvable omega: differenced responses are constant");
    return d;
}

SeparabilityVerdict cross_ratio_test(const FactorData& d, const std::vector<std::size_t>& group_a,
                                     const std::vector<std::size_t>& group_b, const DetectConfig& config,
                                     std::uint64_t seed)
{
    Rng rng(seed);
    auto draw = [&](const std::vector<std::size_t>& group) {
        std::vector<double> v(group.size());
        for (std::size_t k = 0; k < group.size(); ++k) {
            v[k] = uniform(rng, d.bounds[group[k]].lo, d.bounds[group[k]].hi);
        }
        return v;
    };
    std::vector<double> a0(group_a.size());
    std::vector<double> b0(group_b.size());
    for (std::size_t k = 0; k < group_a.size(); ++k) {
        a0[k] = d.anchor[group_a[k]];
    }
    for (std::size_t k = 0; k < group_b.size(); ++k) {
        b0[k] = d.anchor[group_b[k]];
    }
    std::vector<double> point(d.anchor);
    auto h = [&](const std::vector<double>& a, const std::vector<double>& b) {
        for (std::size_t k = 0; k < group_a.size(); ++k) {
            point[group_a[k]] = a[k];
        }
        for (std::size_t k = 0; k < group_b.size(); ++k) {
            point[group_b[k]] = b[k];
        }
        return d.response(point);
    };

    const double h00 = h(a0, b0);
    double max_abs = std::fabs(h00);
    double max_mixed = 0.0;
    double max_violation = 0.0;
    double max_row = 0.0;
    double max_column = 0.0;
    int valid = 0;
    int attempts = 0;
    while (valid < config.probes && attempts < config.probes * (1 + max_redraws)) {
        ++attempts;
        const auto a1 = draw(group_a);
        const auto a2 = draw(group_a);
        const auto b1 = draw(group_b);
        const auto b2 = draw(group_b);
        const double v11 = h(a1, b1), v12 = h(a1, b2), v21 = h(a2, b1), v22 = h(a2, b2);
        const double v10 = h(a1, b0), v20 = h(a2, b0), v01 = h(a0, b1), v02 = h(a0, b2);
        const double all[] = {v11, v12, v21, v22, v10, v20, v01, v02, h00};
        if (std::any_of(std::begin(all), std::end(all), [](double x) { return is_invalid(x); })) {
            continue;
        }
        for (double x : all) {
            max_abs = std::max(max_abs, std::fabs(x));
        }
        const double m11 = (v11 + h00) - (v10 + v01);
        const double m12 = (v12 + h00) - (v10 + v02);
        const double m21 = (v21 + h00) - (v20 + v01);
        const double m22 = (v22 + h00) - (v20 + v02);
        max_mixed = std::max({max_mixed, std::fabs(m11), std::fabs(m12), std::fabs(m21), std::fabs(m22)});
        max_violation = std::max(max_violation, std::fabs(m11 * m22 - m12 * m21));
        // Differences along one group must be rank 1 as well; this rejects
        // products mixed with one-sided terms such as u(a) + u(a) * v(b).
        const double r11 = v11 - v01, r12 = v12 - v02, r21 = v21 - v01, r22 = v22 - v02;
        const double c11 = v11 - v10, c12 = v12 - v10, c21 = v21 - v20, c22 = v22 - v20;
        max_row = std::max(max_row, std::fabs(r11 * r22 - r12 * r21));
        max_column = std::max(max_column, std::fabs(c11 * c22 - c12 * c21));
        ++valid;
    }
    if (valid < 4) {
        throw DetectionError(DetectionError::Kind::InsufficientProbes, "insufficient probes");
    }
    SeparabilityVerdict verdict;
    if (max_abs == 0.0) {
        verdict.additive = true;
        return verdict;
    }
    verdict.additive = max_mixed <= config.tolerance * max_abs;
    const double scale2 = max_abs * max_abs;
    verdict.residual = max_violation / scale2;
    verdict.row_residual = max_row / scale2;
    verdict.column_residual = max_column / scale2;
    verdict.multiplicative = !verdict.additive && verdict.residual <= config.tolerance
        && verdict.row_residual <= config.tolerance && verdict.column_residual <= config.tolerance;
    return verdict;
}

std::vector<VarSet> factor_partition(const FactorData& d, const DetectConfig& config)
{
    const std::size_t n = d.vars.size();
    if (n < 2) {
        return {d.vars};
    }
    // Vertices are positions 1..n; an edge marks a multiplicatively inseparable pair.
    InteractionGraph inseparable(static_cast<int>(n), 0.5);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            const auto verdict = cross_ratio_test(
                d, {p}, {q}, config,
                derive_seed(config.seed, {TagPartition, static_cast<std::uint64_t>(d.vars[p]),
                                          static_cast<std::uint64_t>(d.vars[q])}));
            if (!verdict.multiplicative) {
                inseparable.set_score(static_cast<int>(p + 1), static_cast<int>(q + 1), 1.0);
            }
        }
    }
    std::vector<VarSet> groups;
    for (const auto& comp : connected_components(inseparable, all_vertices(static_cast<int>(n)))) {
        VarSet g;
        for (int position : comp) {
            g.push_back(d.vars[static_cast<std::size_t>(position - 1)]);
        }
        std::sort(g.begin(), g.end());
        groups.push_back(std::move(g));
    }
    return groups;
}

GsStructure detect_structure(const Oracle& oracle, const DetectConfig& config)
{
    const std::uint64_t before = oracle.evaluations();
    std::string last_error = "detection failed";
    std::optional<DetectionError> failure;
    for (int attempt = 0; attempt < std::max(1, config.anchor_attempts); ++attempt) {
        DetectConfig cfg = config;
        cfg.seed = derive_seed(config.seed, {TagAnchor, static_cast<std::uint64_t>(attempt)});
        try {
            const auto anchor = draw_anchor(oracle.box(), derive_seed(cfg.seed, {TagAnchor}));
            const auto graph = interaction_graph(oracle, anchor, cfg);
            const auto repeated = repeated_vars(graph, cfg.k_max);
            GsStructure s = minimal_blocks(oracle, repeated, anchor, cfg);

            for (std::size_t i = 0; i < s.blocks.size(); ++i) {
                auto& block = s.blocks[i];
                const auto tag = static_cast<std::uint64_t>(i);
                if (block.vars.size() >= 2) {
                    const auto data = isolate_psi_data(oracle, s, i, block.vars,
                                                       cfg.points_per_var * block.vars.size(),
                                                       derive_seed(cfg.seed, {TagPsiData, tag}));
                    block.psi_factors = factor_partition(data, cfg);
                } else {
                    block.psi_factors = {block.vars};
                }
                if (block.repeated.size() >= 2) {
                    const auto data = isolate_omega_data(oracle, s, i, block.repeated,
                                                         cfg.points_per_var * block.repeated.size(),
                                                         derive_seed(cfg.seed, {TagOmegaData, tag}));
                    block.omega_factors = factor_partition(data, cfg);
                } else if (!block.repeated.empty()) {
                    block.omega_factors = {block.repeated};
                }
            }
            check_reconstruction(oracle, s, cfg, derive_seed(cfg.seed, {TagReconstruct}));
            check_block_products(oracle, s, cfg, derive_seed(cfg.seed, {TagBlockCheck}));
            s.check_invariants();
            s.probes_used = oracle.evaluations() - before;
            return s;
        } catch (const DetectionError& e) {
            failure = e;
        }
    }
    throw *failure;
}

} // namespace gsr
