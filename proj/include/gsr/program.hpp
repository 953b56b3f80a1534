#ifndef GSR_PROGRAM_HPP
#define GSR_PROGRAM_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "gsr/expr.hpp"

namespace gsr {

/// Row-major table of points: rows are points, columns are coordinates.
class Points {
public:
    Points() = default;
    Points(std::size_t rows, std::size_t cols) : cols_(cols), data_(rows * cols) {}

    std::size_t rows() const noexcept { return cols_ == 0 ? 0 : data_.size() / cols_; }
    std::size_t cols() const noexcept { return cols_; }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    void append(std::span<const double> point);

    const std::vector<double>& data() const noexcept { return data_; }

private:
    std::size_t cols_ {0};
    std::vector<double> data_;
};

struct EvalOptions {
    // Divisions whose |denominator| is not above this value are invalid.
    double min_denominator = 0.0;
};

/// Expression flattened to postfix form for repeated evaluation. Produces
/// exactly the same values as the tree evaluator `evaluate`.
class Program {
public:
    Program() = default;
    explicit Program(const Expr& e, EvalOptions options = {});

    int variables() const noexcept { return max_variable_; }
    int parameters() const noexcept { return max_parameter_; }

    double operator()(std::span<const double> point, std::span<const double> params = {}) const;

    /// Evaluates rows [first, first + count) of `points` into out[0..count).
    /// Works column-wise over blocks of rows; `scratch` is resized as needed.
    void evaluate_rows(const Points& points, std::size_t first, std::size_t count, std::span<const double> params,
                       double* out, std::vector<double>& scratch) const;

private:
    struct Instruction {
        Op op;
        int index;
        double value;
    };

    void emit(const Expr& e, std::size_t depth);

    std::vector<Instruction> code_;
    std::size_t stack_depth_ {0};
    int max_variable_ {0};
    int max_parameter_ {0};
    double min_denominator_ {0.0};
};

/// Data-parallel evaluation kernels. Each `_parallel` kernel has a serial
/// reference that it must match bit for bit; reductions use fixed-size
/// chunks so that the summation order does not depend on the thread count.
namespace kernels {

    inline constexpr std::size_t chunk_rows = 256;

    void evaluate_serial(const Program& program, const Points& points, std::span<const double> params,
                         std::span<double> out);
    void evaluate_parallel(const Program& program, const Points& points, std::span<const double> params,
                           std::span<double> out);

    /// Mean squared difference; NaN if any entry is invalid.
    double mse_serial(std::span<const double> predicted, std::span<const double> target);
    double mse_parallel(std::span<const double> predicted, std::span<const double> target);

    /// Evaluates every program into one column of a column-major
    /// points.rows() x programs.size() matrix.
    void design_matrix_serial(std::span<const Program> programs, const Points& points, std::span<double> out);
    void design_matrix_parallel(std::span<const Program> programs, const Points& points, std::span<double> out);

} // namespace kernels

} // namespace gsr

#endif
