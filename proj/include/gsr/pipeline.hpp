#ifndef GSR_PIPELINE_HPP
#define GSR_PIPELINE_HPP

#include <cstdint>
#include <vector>

#include "gsr/assemble.hpp"
#include "gsr/detect.hpp"
#include "gsr/fit.hpp"

namespace gsr {

struct PipelineConfig {
    DetectConfig detect;
    FitConfig fit;
    AssembleConfig assemble;
    int retries = 3; // extra full attempts with fresh seeds after a failed validation
    std::uint64_t seed = 1;
};

struct PipelineResult {
    GsStructure structure;
    std::vector<FactorModel> factors; // per block: psi groups, then omega groups
    AssembledModel model;
    int attempts {0};
    std::uint64_t detection_evals {0};
    std::uint64_t total_evals {0};
};

/// Tabulates and fits every factor group of `s`.
std::vector<FactorModel> fit_factors(const Oracle& oracle, const GsStructure& s, const DetectConfig& detect,
                                     const FitConfig& fit, std::uint64_t seed);

/// Detection, factor fitting and assembly. A failed validation triggers up to
/// config.retries further attempts from new seeds; the attempt with the
/// lowest validation MSE is returned. If every attempt fails, rethrows the
/// last DetectionError or AssemblyError.
PipelineResult run_pipeline(const Oracle& oracle, const PipelineConfig& config);

} // namespace gsr

#endif
