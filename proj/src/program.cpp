#include "gsr/program.hpp"

#include <algorithm>
#include <stdexcept>

#include <omp.h>

namespace gsr {

void Points::append(std::span<const double> point)
{
    if (cols_ == 0 && data_.empty()) {
        cols_ = point.size();
    }
    if (point.size() != cols_) {
        throw std::invalid_argument("point dimension mismatch");
    }
    data_.insert(data_.end(), point.begin(), point.end());
}

Program::Program(const Expr& e, EvalOptions options)
    : max_variable_(e.max_variable())
    , max_parameter_(e.max_parameter())
    , min_denominator_(options.min_denominator)
{
    code_.reserve(e.size());
    emit(e, 1);
}

void Program::emit(const Expr& e, std::size_t depth)
{
    stack_depth_ = std::max(stack_depth_, depth);
    switch (e.op()) {
    case Op::Constant: code_.push_back({e.op(), 0, e.value()}); return;
    case Op::Variable:
    case Op::Parameter: code_.push_back({e.op(), e.index() - 1, 0.0}); return;
    default: break;
    }
    if (is_unary(e.op())) {
        emit(e.child(), depth);
    } else {
        emit(e.lhs(), depth);
        emit(e.rhs(), depth + 1);
    }
    code_.push_back({e.op(), 0, 0.0});
}

double Program::operator()(std::span<const double> point, std::span<const double> params) const
{
    if (static_cast<std::size_t>(max_variable_) > point.size()
        || static_cast<std::size_t>(max_parameter_) > params.size()) {
        throw std::invalid_argument("program evaluated with too few coordinates or parameters");
    }
    thread_local std::vector<double> stack;
    stack.resize(stack_depth_);
    std::size_t sp = 0;
    for (const auto& ins : code_) {
        switch (ins.op) {
        case Op::Constant: stack[sp++] = ins.value; break;
        case Op::Variable: stack[sp++] = point[static_cast<std::size_t>(ins.index)]; break;
        case Op::Parameter: stack[sp++] = params[static_cast<std::size_t>(ins.index)]; break;
        default:
            if (is_unary(ins.op)) {
                stack[sp - 1] = detail::apply_unary(ins.op, stack[sp - 1]);
            } else {
                stack[sp - 2] = detail::apply_binary(ins.op, stack[sp - 2], stack[sp - 1], min_denominator_);
                --sp;
            }
        }
    }
    return stack[0];
}

void Program::evaluate_rows(const Points& points, std::size_t first, std::size_t count, std::span<const double> params,
                            double* out, std::vector<double>& scratch) const
{
    constexpr std::size_t block = 64;
    if (static_cast<std::size_t>(max_variable_) > points.cols()
        || static_cast<std::size_t>(max_parameter_) > params.size()) {
        throw std::invalid_argument("program evaluated with too few coordinates or parameters");
    }
    scratch.resize(stack_depth_ * block);
    for (std::size_t b0 = 0; b0 < count; b0 += block) {
        const std::size_t nb = std::min(block, count - b0);
        std::size_t sp = 0;
        for (const auto& ins : code_) {
            double* top = scratch.data() + sp * block;
            switch (ins.op) {
            case Op::Constant:
                std::fill_n(top, nb, ins.value);
                ++sp;
                break;
            case Op::Variable: {
                const auto col = static_cast<std::size_t>(ins.index);
                for (std::size_t r = 0; r < nb; ++r) {
                    top[r] = points(first + b0 + r, col);
                }
                ++sp;
                break;
            }
            case Op::Parameter:
                std::fill_n(top, nb, params[static_cast<std::size_t>(ins.index)]);
                ++sp;
                break;
            default:
                if (is_unary(ins.op)) {
                    double* a = top - block;
                    for (std::size_t r = 0; r < nb; ++r) {
                        a[r] = detail::apply_unary(ins.op, a[r]);
                    }
                } else {
                    double* a = top - 2 * block;
                    const double* b = top - block;
                    for (std::size_t r = 0; r < nb; ++r) {
                        a[r] = detail::apply_binary(ins.op, a[r], b[r], min_denominator_);
                    }
                    --sp;
                }
            }
        }
        std::copy_n(scratch.data(), nb, out + b0);
    }
}

namespace kernels {

    void evaluate_serial(const Program& program, const Points& points, std::span<const double> params,
                         std::span<double> out)
    {
        if (out.size() != points.rows()) {
            throw std::invalid_argument("output size mismatch");
        }
        std::vector<double> scratch;
        program.evaluate_rows(points, 0, points.rows(), params, out.data(), scratch);
    }

    void evaluate_parallel(const Program& program, const Points& points, std::span<const double> params,
                           std::span<double> out)
    {
        if (out.size() != points.rows()) {
            throw std::invalid_argument("output size mismatch");
        }
        const auto rows = static_cast<std::ptrdiff_t>(points.rows());
        const auto chunk = static_cast<std::ptrdiff_t>(chunk_rows);
#pragma omp parallel
        {
            std::vector<double> scratch;
#pragma omp for schedule(static)
            for (std::ptrdiff_t start = 0; start < rows; start += chunk) {
                const auto count = static_cast<std::size_t>(std::min(chunk, rows - start));
                program.evaluate_rows(points, static_cast<std::size_t>(start), count, params,
                                      out.data() + start, scratch);
            }
        }
    }

    namespace {
        double chunk_sum_squares(const double* p, const double* t, std::size_t n)
        {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = p[i] - t[i];
                s += d * d;
            }
            return s;
        }
    } // namespace

    double mse_serial(std::span<const double> predicted, std::span<const double> target)
    {
        if (predicted.size() != target.size() || predicted.empty()) {
            throw std::invalid_argument("mse: size mismatch or empty input");
        }
        const std::size_t n = predicted.size();
        double total = 0.0;
        for (std::size_t start = 0; start < n; start += chunk_rows) {
            total += chunk_sum_squares(predicted.data() + start, target.data() + start,
                                       std::min(chunk_rows, n - start));
        }
        return is_invalid(total) ? invalid_value : total / static_cast<double>(n);
    }

    double mse_parallel(std::span<const double> predicted, std::span<const double> target)
    {
        if (predicted.size() != target.size() || predicted.empty()) {
            throw std::invalid_argument("mse: size mismatch or empty input");
        }
        const std::size_t n = predicted.size();
        const std::size_t chunks = (n + chunk_rows - 1) / chunk_rows;
        std::vector<double> partial(chunks);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
            const std::size_t start = static_cast<std::size_t>(c) * chunk_rows;
            partial[static_cast<std::size_t>(c)] = chunk_sum_squares(predicted.data() + start, target.data() + start,
                                                                     std::min(chunk_rows, n - start));
        }
        double total = 0.0;
        for (double s : partial) {
            total += s;
        }
        return is_invalid(total) ? invalid_value : total / static_cast<double>(n);
    }

    void design_matrix_serial(std::span<const Program> programs, const Points& points, std::span<double> out)
    {
        const std::size_t rows = points.rows();
        if (out.size() != rows * programs.size()) {
            throw std::invalid_argument("design matrix size mismatch");
        }
        for (std::size_t j = 0; j < programs.size(); ++j) {
            evaluate_serial(programs[j], points, {}, out.subspan(j * rows, rows));
        }
    }

    void design_matrix_parallel(std::span<const Program> programs, const Points& points, std::span<double> out)
    {
        const std::size_t rows = points.rows();
        if (out.size() != rows * programs.size()) {
            throw std::invalid_argument("design matrix size mismatch");
        }
        const auto chunks = static_cast<std::ptrdiff_t>((rows + chunk_rows - 1) / chunk_rows);
        const auto cols = static_cast<std::ptrdiff_t>(programs.size());
#pragma omp parallel
        {
            std::vector<double> scratch;
#pragma omp for collapse(2) schedule(static)
            for (std::ptrdiff_t j = 0; j < cols; ++j) {
                for (std::ptrdiff_t c = 0; c < chunks; ++c) {
                    const std::size_t start = static_cast<std::size_t>(c) * chunk_rows;
                    const std::size_t count = std::min(chunk_rows, rows - start);
                    programs[static_cast<std::size_t>(j)].evaluate_rows(
                        points, start, count, {}, out.data() + static_cast<std::size_t>(j) * rows + start, scratch);
                }
            }
        }
    }

} // namespace kernels

} // namespace gsr
