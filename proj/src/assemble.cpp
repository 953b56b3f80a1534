#include "gsr/assemble.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <Eigen/Dense>

#include "gsr/random.hpp"

namespace gsr {

namespace {

    constexpr std::size_t max_block_factors = 6;
    constexpr double max_dropped_fraction = 0.2;
    constexpr double constant_column = 1e-12;

    std::vector<std::size_t> factors_of_group(const std::vector<FactorModel>& factors, std::size_t block,
                                              FactorRole role, const VarSet& vars)
    {
        std::vector<std::size_t> hits;
        for (std::size_t k = 0; k < factors.size(); ++k) {
            if (factors[k].block == block && factors[k].role == role && factors[k].vars == vars) {
                hits.push_back(k);
            }
        }
        return hits;
    }

} // namespace

std::vector<BasisTerm> build_basis(const GsStructure& s, const std::vector<FactorModel>& factors)
{
    std::vector<BasisTerm> terms;
    for (std::size_t i = 0; i < s.blocks.size(); ++i) {
        const auto& block = s.blocks[i];
        std::vector<std::size_t> members;
        auto collect = [&](const std::vector<VarSet>& groups, FactorRole role) {
            for (const auto& g : groups) {
                const auto hits = factors_of_group(factors, i, role, g);
                if (hits.size() != 1) {
                    throw std::invalid_argument("build_basis: factor group without exactly one fitted model");
                }
                members.push_back(hits.front());
            }
        };
        collect(block.psi_factors, FactorRole::Psi);
        collect(block.omega_factors, FactorRole::Omega);
        if (members.size() > max_block_factors) {
            throw AssemblyError("basis explosion: block " + std::to_string(i + 1) + " has "
                                + std::to_string(members.size()) + " factors");
        }
        const unsigned count = 1u << members.size();
        std::vector<unsigned> masks;
        for (unsigned mask = 1; mask < count; ++mask) {
            masks.push_back(mask);
        }
        // By size, then lexicographically by member position.
        auto positions = [&](unsigned mask) {
            std::vector<std::size_t> p;
            for (std::size_t k = 0; k < members.size(); ++k) {
                if (mask & (1u << k)) {
                    p.push_back(k);
                }
            }
            return p;
        };
        std::sort(masks.begin(), masks.end(), [&](unsigned a, unsigned b) {
            if (std::popcount(a) != std::popcount(b)) {
                return std::popcount(a) < std::popcount(b);
            }
            return positions(a) < positions(b);
        });
        for (unsigned mask : masks) {
            BasisTerm t;
            t.block = i;
            bool first = true;
            for (std::size_t k : positions(mask)) {
                t.factor_subset.push_back(members[k]);
                t.expr = first ? factors[members[k]].expr : t.expr * factors[members[k]].expr;
                first = false;
            }
            terms.push_back(std::move(t));
        }
    }
    return terms;
}

LeastSquaresFit least_squares(const std::vector<BasisTerm>& basis, const SampleSet& train, bool parallel)
{
    const std::size_t n = train.size();
    const std::size_t m = basis.size();
    if (n < 2 * (m + 1)) {
        throw std::invalid_argument("least_squares: need at least twice as many samples as unknowns");
    }
    std::vector<Program> programs;
    programs.reserve(m);
    for (const auto& t : basis) {
        programs.emplace_back(t.expr);
    }
    std::vector<double> columns(n * m);
    if (parallel) {
        kernels::design_matrix_parallel(programs, train.points, columns);
    } else {
        kernels::design_matrix_serial(programs, train.points, columns);
    }

    std::vector<std::size_t> rows;
    rows.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        bool ok = !is_invalid(train.values[r]);
        for (std::size_t j = 0; ok && j < m; ++j) {
            ok = !is_invalid(columns[j * n + r]);
        }
        if (ok) {
            rows.push_back(r);
        }
    }
    LeastSquaresFit fit;
    fit.used_rows = rows.size();
    fit.dropped_rows = n - rows.size();
    if (static_cast<double>(fit.dropped_rows) > max_dropped_fraction * static_cast<double>(n)) {
        throw AssemblyError("too many invalid training points: " + std::to_string(fit.dropped_rows) + " of "
                            + std::to_string(n));
    }

    // Centered columns leave the intercept out of the factorization; it is
    // recovered from the means afterwards.
    const auto rn = static_cast<Eigen::Index>(rows.size());
    const auto cols = static_cast<Eigen::Index>(m);
    Eigen::MatrixXd a(rn, cols);
    Eigen::VectorXd y(rn);
    for (Eigen::Index r = 0; r < rn; ++r) {
        const std::size_t src = rows[static_cast<std::size_t>(r)];
        for (std::size_t j = 0; j < m; ++j) {
            a(r, static_cast<Eigen::Index>(j)) = columns[j * n + src];
        }
        y[r] = train.values[src];
    }
    const double y_mean = rn > 0 ? y.mean() : 0.0;
    y.array() -= y_mean;
    std::vector<double> mean(m, 0.0);
    std::vector<double> scale(m, 1.0);
    for (Eigen::Index j = 0; j < cols; ++j) {
        auto col = a.col(j);
        const double raw = rn > 0 ? col.cwiseAbs().maxCoeff() : 0.0;
        mean[static_cast<std::size_t>(j)] = rn > 0 ? col.mean() : 0.0;
        col.array() -= mean[static_cast<std::size_t>(j)];
        const double s = rn > 0 ? col.cwiseAbs().maxCoeff() : 0.0;
        if (s <= constant_column * raw) {
            // Constant up to rounding: the intercept already covers it.
            col.setZero();
            continue;
        }
        scale[static_cast<std::size_t>(j)] = s;
        col /= s;
    }
    fit.c0 = y_mean;
    fit.coefficients.assign(m, 0.0);
    if (m > 0) {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
        const Eigen::VectorXd z = cod.solve(y);
        fit.rank_deficient = cod.rank() < cols;
        for (std::size_t j = 0; j < m; ++j) {
            fit.coefficients[j] = z[static_cast<Eigen::Index>(j)] / scale[j];
            fit.c0 -= fit.coefficients[j] * mean[j];
        }
    }
    double sse = 0.0;
    for (Eigen::Index r = 0; r < rn; ++r) {
        const std::size_t src = rows[static_cast<std::size_t>(r)];
        double pred = fit.c0;
        for (std::size_t j = 0; j < m; ++j) {
            pred += fit.coefficients[j] * columns[j * n + src];
        }
        const double e = train.values[src] - pred;
        sse += e * e;
    }
    fit.train_mse = rn > 0 ? sse / static_cast<double>(rn) : 0.0;
    return fit;
}

double model_mse(const Expr& model, const SampleSet& samples, std::size_t* dropped, bool parallel)
{
    const Program program(model);
    std::vector<double> predicted(samples.size());
    if (parallel) {
        kernels::evaluate_parallel(program, samples.points, {}, predicted);
    } else {
        kernels::evaluate_serial(program, samples.points, {}, predicted);
    }
    std::vector<double> p;
    std::vector<double> t;
    p.reserve(samples.size());
    t.reserve(samples.size());
    for (std::size_t r = 0; r < samples.size(); ++r) {
        if (!is_invalid(predicted[r]) && !is_invalid(samples.values[r])) {
            p.push_back(predicted[r]);
            t.push_back(samples.values[r]);
        }
    }
    if (dropped) {
        *dropped = samples.size() - p.size();
    }
    if (p.empty()) {
        return invalid_value;
    }
    return parallel ? kernels::mse_parallel(p, t) : kernels::mse_serial(p, t);
}

AssembledModel assemble_and_validate(const GsStructure& s, const std::vector<FactorModel>& factors,
                                     const Oracle& oracle, std::uint64_t seed, const AssembleConfig& config)
{
    const std::size_t count = config.samples_per_var * static_cast<std::size_t>(oracle.arity());
    const auto train = sample_uniform(oracle, count, derive_seed(seed, {1}));
    const auto val = sample_uniform(oracle, count, derive_seed(seed, {2}));

    AssembledModel model;
    model.terms = build_basis(s, factors);
    const auto ls = least_squares(model.terms, train, config.parallel);
    model.c0 = ls.c0;
    model.coefficients = ls.coefficients;
    model.train_mse = ls.train_mse;
    model.rank_deficient = ls.rank_deficient;
    model.train_samples = train.size();
    model.val_samples = val.size();

    model.expr = Expr::constant(model.c0);
    for (std::size_t t = 0; t < model.terms.size(); ++t) {
        model.expr = model.expr + Expr::constant(model.coefficients[t]) * model.terms[t].expr;
    }
    std::size_t dropped = 0;
    model.val_mse = model_mse(model.expr, val, &dropped, config.parallel);
    model.dropped_rows = ls.dropped_rows + dropped;
    if (static_cast<double>(dropped) > max_dropped_fraction * static_cast<double>(val.size())) {
        model.val_mse = invalid_value;
    }
    model.success = !is_invalid(model.val_mse) && model.val_mse <= config.tolerance;
    return model;
}

} // namespace gsr
