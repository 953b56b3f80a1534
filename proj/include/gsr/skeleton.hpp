#ifndef GSR_SKELETON_HPP
#define GSR_SKELETON_HPP

#include <span>
#include <string>
#include <vector>

#include "gsr/expr.hpp"

namespace gsr {

/// Model template for one factor over local variables x1..xk:
///
///   c0 + a_1 * basis_1(x; theta) + ... + a_m * basis_m(x; theta)
///
/// The linear coefficients c0, a_k are solved in closed form; only the d
/// nonlinear parameters theta_1..theta_d inside the basis are searched.
struct Skeleton {
    Expr core;               // representative shape; sets complexity and order
    std::vector<Expr> basis; // may reference theta_1..theta_d
    int nonlinear {0};       // d
    int variables {1};       // k

    std::size_t complexity() const noexcept { return core.size(); }
    std::string name() const { return to_string(core); }

    /// Whole template with every coefficient as a placeholder: nonlinear
    /// parameters first, then c0 as theta_{d+1} and a_k as theta_{d+1+k}.
    Expr form() const;

    /// Concrete expression over x1..xk. `coefficients` holds c0 then a_1..a_m.
    Expr instantiate(std::span<const double> theta, std::span<const double> coefficients) const;
};

/// Skeletons for var_count variables with complexity at most max_nodes, in
/// increasing complexity and then by name. Counts above 3 only get the
/// constant and linear skeletons.
std::vector<Skeleton> skeleton_stream(int var_count, std::size_t max_nodes = 12);

} // namespace gsr

#endif
