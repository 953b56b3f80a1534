#ifndef GSR_CLI_HPP
#define GSR_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gsr/pipeline.hpp"
#include "gsr/serialize.hpp"

namespace gsr {

struct RunConfig {
    std::string target;
    int dims = 0; // 0: highest variable index in the target
    std::vector<double> lo {-3.0};
    std::vector<double> hi {3.0};
    std::uint64_t seed = 1;
    double tol_detect = 1e-8;
    double tol_target = 1e-6;
    std::size_t samples_per_var = 200;
    std::size_t max_nodes = 12;
    int kmax = 3;
    std::string out;

    // bench only
    std::string cases = "1-10";
    int repeats = 20;
    bool parallel = false;
    bool timing = true;

    PipelineConfig pipeline() const;
    DomainBox box(int arity) const;
};

Json to_json(const RunConfig& c);

enum ExitCode : int {
    ExitSuccess = 0,
    ExitUsage = 1,
    ExitDetection = 2,
    ExitFit = 3,
};

/// Entry point of the command-line tool: `detect`, `fit` and `bench`
/// subcommands. JSON goes to --out or `out`; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace gsr

#endif
