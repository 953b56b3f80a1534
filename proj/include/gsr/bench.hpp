#ifndef GSR_BENCH_HPP
#define GSR_BENCH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gsr/pipeline.hpp"

namespace gsr {

struct CaseSpec {
    int number {0};
    std::string target;
    int dim {0};
    DomainBox box;
    VarSet expected_repeated;
    std::size_t expected_blocks {0};
    std::optional<std::size_t> expected_factors;
    bool in_table {true}; // part of the asserted ten-case table
};

/// Cases 1-10 of the benchmark table, then the cylinder stream function as
/// demo case 11 with variables (V, theta, R, r, Gamma) as x1..x5.
const std::vector<CaseSpec>& benchmark_cases();
const CaseSpec& benchmark_case(int number);

struct CaseReport {
    int number {0};
    std::uint64_t seed {0};
    bool completed {false}; // pipeline ran to the end
    std::string error;
    GsStructure structure;
    bool detected {false};
    bool match_repeated {false};
    bool match_blocks {false};
    bool match_factors {false};
    double val_mse {0.0};
    bool success {false};
    int attempts {0};
    std::size_t samples {0}; // validation points
    std::uint64_t evaluations {0};
    std::uint64_t detection_evals {0};
    double wall_ms {0.0};
    std::string model;

    bool structure_match() const noexcept { return match_repeated && match_blocks && match_factors; }
};

/// Full pipeline on one case; errors are captured in the report.
CaseReport run_case(int number, std::uint64_t seed, const PipelineConfig& base = {});

struct CaseSummary {
    int number {0};
    int dim {0};
    std::size_t samples {0};
    VarSet repeated;  // as detected in the first run
    std::size_t blocks {0};
    std::size_t factors {0};
    int runs {0};
    int match_repeated {0};
    int match_blocks {0};
    int match_factors {0};
    int structure_matches {0}; // runs matching on all three counts
    int successes {0};
    double mse_max {0.0};
    double median_wall_ms {0.0};
    double median_evals {0.0};

    double success_rate() const noexcept { return runs ? static_cast<double>(successes) / runs : 0.0; }
    bool all_match() const noexcept { return match_repeated == runs && match_blocks == runs && match_factors == runs; }
};

struct SuiteReport {
    std::vector<CaseSummary> cases;
    std::vector<CaseReport> runs; // case-major, then by repeat
};

/// Repeat r of a case runs with seed base_seed + r. With `parallel`, runs
/// are spread over OpenMP threads; the report does not depend on scheduling.
SuiteReport run_suite(const std::vector<int>& cases, int repeats, std::uint64_t base_seed, bool parallel,
                      const PipelineConfig& base = {});

SuiteReport summarize(std::vector<CaseReport> runs);

/// "1-10", "4", "1,3,5-7".
std::vector<int> parse_case_list(const std::string& text);

} // namespace gsr

#endif
