#ifndef GSR_FIT_HPP
#define GSR_FIT_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "gsr/detect.hpp"
#include "gsr/ldse.hpp"
#include "gsr/skeleton.hpp"

namespace gsr {

struct FitConfig {
    OptimizerConfig optimizer;
    std::size_t max_nodes = 12;
    int restarts = 3;
    // A skeleton is accepted once its polished fit reaches this MSE relative
    // to the data variance. The optimizer's own target is only the entry
    // point for the polish.
    double accept_tolerance = 1e-12;
    int polish_iterations = 300; // per nonlinear parameter
};

struct FactorModel {
    VarSet vars;
    FactorRole role {FactorRole::Psi};
    std::size_t block {0};

    Skeleton skeleton;
    std::vector<double> theta;        // nonlinear parameters
    std::vector<double> coefficients; // c0 then one per basis term
    Expr local;                       // over x1..xk, k = vars.size()
    Expr expr;                        // over the original variable indices

    double train_mse {0.0};      // on the tabulated data, in data units
    double normalized_mse {0.0}; // train_mse / variance of the data
    bool below_tolerance {false};
    std::size_t skeletons_tried {0};
    std::uint64_t evaluations {0}; // objective evaluations spent
};

struct SkeletonFit {
    std::vector<double> theta;
    double normalized_mse {0.0};
    std::uint64_t evaluations {0};
};

/// Fits one skeleton to (points, values) by searching its nonlinear
/// parameters with LDSE plus a Nelder-Mead polish, up to config.restarts
/// seeded restarts. The linear coefficients are projected out.
SkeletonFit fit_skeleton(const Skeleton& skeleton, const Points& points, std::span<const double> values,
                         const FitConfig& config, std::uint64_t seed);

/// Least-squares linear coefficients (c0, a_1..a_m) for fixed theta.
std::vector<double> skeleton_coefficients(const Skeleton& skeleton, const Points& points,
                                          std::span<const double> values, std::span<const double> theta);

/// Walks the skeleton stream and returns the first accepted model, or the
/// best one seen with below_tolerance = false.
FactorModel fit_factor(const FactorData& data, const FitConfig& config);

} // namespace gsr

#endif
