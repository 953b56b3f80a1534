#include "gsr/pipeline.hpp"

#include <exception>
#include <optional>

#include "gsr/random.hpp"

namespace gsr {

namespace {
    bool better(const AssembledModel& a, const AssembledModel& b)
    {
        if (is_invalid(b.val_mse)) {
            return !is_invalid(a.val_mse);
        }
        return !is_invalid(a.val_mse) && a.val_mse < b.val_mse;
    }
} // namespace

std::vector<FactorModel> fit_factors(const Oracle& oracle, const GsStructure& s, const DetectConfig& detect,
                                     const FitConfig& fit, std::uint64_t seed)
{
    std::vector<FactorModel> models;
    std::uint64_t task = 0;
    for (std::size_t i = 0; i < s.blocks.size(); ++i) {
        const auto& block = s.blocks[i];
        auto run = [&](const VarSet& group, FactorRole role) {
            const std::size_t n = detect.points_per_var * group.size();
            const auto data_seed = derive_seed(seed, {1, task});
            const auto data = role == FactorRole::Psi ? isolate_psi_data(oracle, s, i, group, n, data_seed)
                                                      : isolate_omega_data(oracle, s, i, group, n, data_seed);
            FitConfig fc = fit;
            fc.optimizer.seed = derive_seed(seed, {2, task});
            models.push_back(fit_factor(data, fc));
            ++task;
        };
        for (const auto& g : block.psi_factors) {
            run(g, FactorRole::Psi);
        }
        for (const auto& g : block.omega_factors) {
            run(g, FactorRole::Omega);
        }
    }
    return models;
}

PipelineResult run_pipeline(const Oracle& oracle, const PipelineConfig& config)
{
    const std::uint64_t start = oracle.evaluations();
    std::optional<PipelineResult> best;
    std::exception_ptr failure;
    const int attempts = 1 + std::max(0, config.retries);
    int made = 0;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        ++made;
        // The first attempt uses the seed as given so that detection alone
        // reproduces the pipeline's structure.
        const std::uint64_t seed
            = attempt == 0 ? config.seed : derive_seed(config.seed, {static_cast<std::uint64_t>(attempt)});
        PipelineResult r;
        DetectConfig dc = config.detect;
        dc.seed = seed;
        const std::uint64_t before = oracle.evaluations();
        try {
            r.structure = detect_structure(oracle, dc);
            r.detection_evals = oracle.evaluations() - before;
            r.factors = fit_factors(oracle, r.structure, dc, config.fit, derive_seed(seed, {3}));
            r.model = assemble_and_validate(r.structure, r.factors, oracle, derive_seed(seed, {4}), config.assemble);
        } catch (const DetectionError&) {
            failure = std::current_exception();
            continue;
        } catch (const AssemblyError&) {
            failure = std::current_exception();
            continue;
        }
        const bool done = r.model.success;
        if (!best || better(r.model, best->model)) {
            best = std::move(r);
        }
        if (done) {
            break;
        }
    }
    if (!best) {
        std::rethrow_exception(failure);
    }
    best->attempts = made;
    best->total_evals = oracle.evaluations() - start;
    return std::move(*best);
}

} // namespace gsr
