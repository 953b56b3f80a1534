#ifndef GSR_ASSEMBLE_HPP
#define GSR_ASSEMBLE_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gsr/detect.hpp"
#include "gsr/fit.hpp"
#include "gsr/oracle.hpp"

namespace gsr {

class AssemblyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Product of a nonempty subset of one block's fitted factors.
struct BasisTerm {
    std::size_t block {0};
    std::vector<std::size_t> factor_subset; // indices into the factor list passed to build_basis
    Expr expr;
};

/// One term per nonempty subset of each block's factors, blocks in order and
/// subsets by size then lexicographically. Throws AssemblyError ("basis
/// explosion") for a block with more than six factors, and
/// std::invalid_argument if a factor group of `s` has no fitted model.
std::vector<BasisTerm> build_basis(const GsStructure& s, const std::vector<FactorModel>& factors);

struct LeastSquaresFit {
    double c0 {0.0};
    std::vector<double> coefficients;
    double train_mse {0.0};
    bool rank_deficient {false};
    std::size_t dropped_rows {0};
    std::size_t used_rows {0};
};

/// min sum (f - c0 - sum_t c_t term_t)^2 through a rank-revealing complete
/// orthogonal decomposition of the column-scaled design matrix. Rows where
/// the target or any term is invalid are dropped; more than 20% dropped is
/// an AssemblyError.
LeastSquaresFit least_squares(const std::vector<BasisTerm>& basis, const SampleSet& train, bool parallel = true);

struct AssembledModel {
    double c0 {0.0};
    std::vector<BasisTerm> terms;
    std::vector<double> coefficients;
    Expr expr; // c0 + sum_t c_t * term_t
    double train_mse {0.0};
    double val_mse {0.0};
    bool success {false};
    bool rank_deficient {false};
    std::size_t train_samples {0};
    std::size_t val_samples {0};
    std::size_t dropped_rows {0}; // train and validation together
};

struct AssembleConfig {
    std::size_t samples_per_var = 200;
    double tolerance = 1e-6; // validation MSE for success
    bool parallel = true;
};

/// Trains on one fresh samples_per_var * n set and validates on another.
AssembledModel assemble_and_validate(const GsStructure& s, const std::vector<FactorModel>& factors,
                                     const Oracle& oracle, std::uint64_t seed, const AssembleConfig& config = {});

/// Mean squared error of `model` against the oracle values in `samples`,
/// skipping rows where either side is invalid. `dropped` receives the count.
double model_mse(const Expr& model, const SampleSet& samples, std::size_t* dropped = nullptr, bool parallel = true);

} // namespace gsr

#endif
