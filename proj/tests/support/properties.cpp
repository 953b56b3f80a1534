#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gsr/assemble.hpp"
#include "gsr/bench.hpp"
#include "gsr/ldse.hpp"
#include "gsr/oracle.hpp"

namespace gsr::testing {

namespace {

    int pick(Rng& rng, int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }

    std::vector<double> draw_point(Rng& rng, const DomainBox& box)
    {
        std::vector<double> p(static_cast<std::size_t>(box.arity()));
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = uniform(rng, box[i].lo, box[i].hi);
        }
        return p;
    }

    bool close(double a, double b, double rel)
    {
        if (is_invalid(a) || is_invalid(b)) {
            return is_invalid(a) && is_invalid(b);
        }
        return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
    }

    std::vector<std::vector<VarSet>> set_partitions(int n)
    {
        std::vector<std::vector<VarSet>> out;
        std::vector<int> label(static_cast<std::size_t>(n), 0);
        // Restricted growth strings.
        auto rec = [&](auto&& self, int i, int used) -> void {
            if (i == n) {
                std::vector<VarSet> parts(static_cast<std::size_t>(used));
                for (int v = 0; v < n; ++v) {
                    parts[static_cast<std::size_t>(label[static_cast<std::size_t>(v)])].push_back(v + 1);
                }
                out.push_back(std::move(parts));
                return;
            }
            for (int l = 0; l <= used && l < n; ++l) {
                label[static_cast<std::size_t>(i)] = l;
                self(self, i + 1, std::max(used, l + 1));
            }
        };
        rec(rec, 0, 0);
        return out;
    }

    bool additive_between(const Program& f, const DomainBox& box, const VarSet& a, const VarSet& b, Rng& rng)
    {
        for (int trial = 0; trial < 16; ++trial) {
            const auto p = draw_point(rng, box);
            const auto q = draw_point(rng, box);
            auto pa = p;
            auto pb = p;
            auto pab = p;
            for (int v : a) {
                const auto k = static_cast<std::size_t>(v - 1);
                pa[k] = q[k];
                pab[k] = q[k];
            }
            for (int v : b) {
                const auto k = static_cast<std::size_t>(v - 1);
                pb[k] = q[k];
                pab[k] = q[k];
            }
            const double f0 = f(p);
            const double fa = f(pa);
            const double fb = f(pb);
            const double fab = f(pab);
            const double scale = std::max({1.0, std::fabs(f0), std::fabs(fa), std::fabs(fb), std::fabs(fab)});
            if (std::fabs(f0 - fa - fb + fab) > 1e-9 * scale) {
                return false;
            }
        }
        return true;
    }

    Expr random_univariate(Rng& rng, int v)
    {
        const Expr x = Expr::variable(v);
        const Expr a = Expr::constant(uniform(rng, 0.5, 1.5));
        const Expr c = Expr::constant(uniform(rng, -1.0, 1.0));
        switch (pick(rng, 5)) {
        case 0: return sin(a * x + c);
        case 1: return cos(a * x + c);
        case 2: return exp(a * x);
        case 3: return x + Expr::constant(uniform(rng, 2.5, 4.0));
        default: return square(x) + Expr::constant(uniform(rng, 0.5, 2.0));
        }
    }

    std::string describe(const std::vector<VarSet>& parts)
    {
        std::string s;
        for (const auto& p : parts) {
            s += "{";
            for (std::size_t k = 0; k < p.size(); ++k) {
                s += (k ? "," : "") + std::to_string(p[k]);
            }
            s += "}";
        }
        return s;
    }

} // namespace

void PropertyResult::record(bool pass, const std::string& what)
{
    ++total;
    if (pass) {
        ++passed;
    } else if (first_failure.empty()) {
        first_failure = what;
    }
}

Expr random_tree(Rng& rng, int arity, int depth)
{
    if (depth <= 0 || pick(rng, 4) == 0) {
        if (pick(rng, 2) == 0) {
            return Expr::variable(1 + pick(rng, arity));
        }
        switch (pick(rng, 3)) {
        case 0: return Expr::constant(static_cast<double>(pick(rng, 10)));
        case 1: return Expr::constant(uniform(rng, -5.0, 5.0));
        default: return Expr::constant(std::ldexp(uniform(rng, 1.0, 2.0), pick(rng, 40) - 20));
        }
    }
    static constexpr Op unary[] = {Op::Neg, Op::Sin, Op::Cos, Op::Exp, Op::Ln, Op::Sqrt, Op::Square};
    static constexpr Op binary[] = {Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Pow};
    if (pick(rng, 3) == 0) {
        return Expr::unary(unary[pick(rng, 7)], random_tree(rng, arity, depth - 1));
    }
    const Op op = binary[pick(rng, 5)];
    return Expr::binary(op, random_tree(rng, arity, depth - 1), random_tree(rng, arity, depth - 1));
}

Expr random_smooth(Rng& rng, const VarSet& vars, int depth)
{
    if (depth <= 0 || pick(rng, 3) == 0) {
        if (pick(rng, 3) == 0) {
            return Expr::constant(uniform(rng, -2.0, 2.0));
        }
        return Expr::variable(vars[static_cast<std::size_t>(pick(rng, static_cast<int>(vars.size())))]);
    }
    switch (pick(rng, 7)) {
    case 0: return sin(random_smooth(rng, vars, depth - 1));
    case 1: return cos(random_smooth(rng, vars, depth - 1));
    case 2: return exp(Expr::constant(0.5) * sin(random_smooth(rng, vars, depth - 1)));
    case 3: return -random_smooth(rng, vars, depth - 1);
    case 4: return random_smooth(rng, vars, depth - 1) + random_smooth(rng, vars, depth - 1);
    case 5: return random_smooth(rng, vars, depth - 1) - random_smooth(rng, vars, depth - 1);
    default: return random_smooth(rng, vars, depth - 1) * random_smooth(rng, vars, depth - 1);
    }
}

bool same_structure(const GsStructure& a, const GsStructure& b)
{
    if (a.arity != b.arity || a.repeated != b.repeated || a.inactive != b.inactive
        || a.blocks.size() != b.blocks.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        const auto& x = a.blocks[i];
        const auto& y = b.blocks[i];
        if (x.vars != y.vars || x.repeated != y.repeated || x.psi_factors != y.psi_factors
            || x.omega_factors != y.omega_factors) {
            return false;
        }
    }
    return true;
}

std::vector<VarSet> finest_additive_partition(const Expr& f, const DomainBox& box, std::uint64_t seed)
{
    const Program program(f);
    Rng rng(seed);
    std::vector<VarSet> best {all_vertices(box.arity())};
    for (const auto& parts : set_partitions(box.arity())) {
        if (parts.size() <= best.size()) {
            continue;
        }
        bool ok = true;
        for (std::size_t i = 0; ok && i < parts.size(); ++i) {
            for (std::size_t j = i + 1; ok && j < parts.size(); ++j) {
                ok = additive_between(program, box, parts[i], parts[j], rng);
            }
        }
        if (ok) {
            best = parts;
        }
    }
    std::sort(best.begin(), best.end());
    return best;
}

PropertyResult round_trip_property(int trees, std::uint64_t seed)
{
    PropertyResult r {"parse/print round trip"};
    Rng rng(seed);
    constexpr int arity = 3;
    for (int t = 0; t < trees; ++t) {
        const Expr tree = random_tree(rng, arity, 5);
        const std::string text = to_string(tree);
        bool ok = true;
        try {
            const Expr back = parse(text, arity);
            for (int k = 0; ok && k < 16; ++k) {
                std::vector<double> p(arity);
                for (auto& v : p) {
                    v = uniform(rng, -3.0, 3.0);
                }
                ok = close(evaluate(tree, p), evaluate(back, p), 1e-12);
            }
        } catch (const std::exception& e) {
            ok = false;
        }
        r.record(ok, text);
    }
    return r;
}

PropertyResult affine_invariance_property(double a, double b, std::uint64_t seed)
{
    char label[96];
    std::snprintf(label, sizeof label, "affine invariance of detection (a = %g, b = %g)", a, b);
    PropertyResult r {label};
    for (const auto& spec : benchmark_cases()) {
        if (!spec.in_table) {
            continue;
        }
        const Expr f = parse(spec.target, spec.dim);
        const Expr g = Expr::constant(a) * f + Expr::constant(b);
        for (std::uint64_t s = seed; s < seed + 2; ++s) {
            DetectConfig config;
            config.seed = s;
            bool ok = false;
            try {
                const Oracle of(f, spec.box);
                const Oracle og(g, spec.box);
                ok = same_structure(detect_structure(of, config), detect_structure(og, config));
            } catch (const std::exception&) {
                ok = false;
            }
            r.record(ok, "case " + std::to_string(spec.number) + " seed " + std::to_string(s));
        }
    }
    return r;
}

PropertyResult partition_oracle_property(int instances, std::uint64_t seed)
{
    PropertyResult r {"block partition agrees with brute-force partition oracle"};
    Rng rng(seed);
    for (int t = 0; t < instances; ++t) {
        const int n = 2 + pick(rng, 3);
        std::vector<int> label(static_cast<std::size_t>(n));
        for (auto& l : label) {
            l = pick(rng, n);
        }
        Expr f = Expr::constant(uniform(rng, -2.0, 2.0));
        for (int part = 0; part < n; ++part) {
            Expr term = Expr::constant(uniform(rng, 0.5, 2.0) * (pick(rng, 2) ? 1.0 : -1.0));
            bool any = false;
            for (int v = 1; v <= n; ++v) {
                if (label[static_cast<std::size_t>(v - 1)] == part) {
                    term = term * random_univariate(rng, v);
                    any = true;
                }
            }
            if (any) {
                f = f + term;
            }
        }
        const DomainBox box = DomainBox::cube(n, -2.0, 2.0);
        const auto expected = finest_additive_partition(f, box, derive_seed(seed, {1, static_cast<std::uint64_t>(t)}));
        std::vector<VarSet> got;
        try {
            DetectConfig config;
            config.seed = derive_seed(seed, {2, static_cast<std::uint64_t>(t)});
            const auto s = detect_structure(Oracle(f, box), config);
            if (s.repeated.empty()) {
                for (const auto& b : s.blocks) {
                    got.push_back(b.vars);
                }
                for (int v : s.inactive) {
                    got.push_back({v});
                }
            }
        } catch (const std::exception&) {
            got.clear();
        }
        std::sort(got.begin(), got.end());
        r.record(got == expected,
                 to_string(f) + ": expected " + describe(expected) + ", detected " + describe(got));
    }
    return r;
}

PropertyResult additive_mixed_diff_property(int pairs, std::uint64_t seed)
{
    PropertyResult r {"mixed second difference vanishes on additive pairs"};
    Rng rng(seed);
    for (int t = 0; t < pairs; ++t) {
        const int n = 2 + pick(rng, 3);
        // x1 goes to the left part, x2 to the right, the rest at random.
        VarSet left {1};
        VarSet right {2};
        for (int v = 3; v <= n; ++v) {
            (pick(rng, 2) ? left : right).push_back(v);
        }
        const int i = left[static_cast<std::size_t>(pick(rng, static_cast<int>(left.size())))];
        const int j = right[static_cast<std::size_t>(pick(rng, static_cast<int>(right.size())))];
        const Expr u = random_smooth(rng, left, 3) + sin(Expr::variable(i) + Expr::constant(0.3));
        const Expr v = random_smooth(rng, right, 3) * cos(Expr::variable(j));
        const Expr f = u + v;
        const DomainBox box = DomainBox::cube(n, -3.0, 3.0);
        const Oracle oracle(f, box);
        const auto anchor = draw_anchor(box, derive_seed(seed, {1, static_cast<std::uint64_t>(t)}));
        double score = 1.0;
        try {
            score = mixed_diff(oracle, i, j, anchor, 8, derive_seed(seed, {2, static_cast<std::uint64_t>(t)}));
        } catch (const std::exception&) {
            score = 1.0;
        }
        char what[64];
        std::snprintf(what, sizeof what, " (x%d, x%d): %.3g", i, j, score);
        r.record(score <= 1e-12, to_string(f) + what);
    }
    return r;
}

PropertyResult orthogonality_property(int problems, std::uint64_t seed)
{
    PropertyResult r {"least-squares residual orthogonal to basis"};
    Rng rng(seed);
    const VarSet vars {1, 2, 3};
    const DomainBox box = DomainBox::cube(3, -3.0, 3.0);
    for (int t = 0; t < problems; ++t) {
        std::vector<BasisTerm> basis;
        const int m = 2 + pick(rng, 5);
        while (static_cast<int>(basis.size()) < m) {
            const Expr e = random_smooth(rng, vars, 3);
            const bool fresh = std::none_of(basis.begin(), basis.end(),
                                            [&](const BasisTerm& b) { return to_string(b.expr) == to_string(e); });
            if (e.max_variable() > 0 && fresh) {
                basis.push_back({0, {}, e});
            }
        }
        const Oracle oracle(random_smooth(rng, vars, 4), box);
        const auto train = sample_uniform(oracle, 300, derive_seed(seed, {static_cast<std::uint64_t>(t)}));
        const auto fit = least_squares(basis, train, false);
        if (fit.rank_deficient) {
            // The property is stated for full-rank designs only.
            continue;
        }
        const std::size_t n = train.size();
        std::vector<std::vector<double>> columns(1, std::vector<double>(n, 1.0));
        for (const auto& term : basis) {
            const Program p(term.expr);
            std::vector<double> col(n);
            for (std::size_t i = 0; i < n; ++i) {
                col[i] = p(train.points.row(i));
            }
            columns.push_back(std::move(col));
        }
        std::vector<double> residual(n);
        double y_norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double pred = fit.c0;
            for (std::size_t k = 0; k < basis.size(); ++k) {
                pred += fit.coefficients[k] * columns[k + 1][i];
            }
            residual[i] = train.values[i] - pred;
            y_norm += train.values[i] * train.values[i];
        }
        y_norm = std::sqrt(y_norm);
        double worst = 0.0;
        for (const auto& col : columns) {
            double dot = 0.0;
            double norm = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                dot += col[i] * residual[i];
                norm += col[i] * col[i];
            }
            const double denom = std::sqrt(norm) * y_norm;
            worst = std::max(worst, denom > 0.0 ? std::fabs(dot) / denom : 0.0);
        }
        char what[96];
        std::snprintf(what, sizeof what, "problem %d: relative inner product %.3g", t, worst);
        r.record(worst <= 1e-9, what);
    }
    return r;
}

PropertyResult sphere_property(int max_dim, int seeds)
{
    PropertyResult r {"LDSE reaches 1e-8 on the sphere"};
    const Objective sphere = [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) {
            s += v * v;
        }
        return s;
    };
    for (int d = 1; d <= max_dim; ++d) {
        for (int s = 1; s <= seeds; ++s) {
            OptimizerConfig config;
            config.target = 1e-10;
            config.seed = static_cast<std::uint64_t>(s);
            const auto res = ldse_minimize(sphere, static_cast<std::size_t>(d), config);
            char what[96];
            std::snprintf(what, sizeof what, "d = %d seed %d: %.3g", d, s, res.value);
            r.record(res.value <= 1e-8, what);
        }
    }
    return r;
}

} // namespace gsr::testing
