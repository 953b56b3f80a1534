#ifndef GSR_EXPR_HPP
#define GSR_EXPR_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gsr {

enum class Op : unsigned char {
    Constant,
    Variable,
    Parameter, // placeholder theta_k inside skeletons
    Neg,
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Square,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
};

constexpr bool is_leaf(Op op) noexcept { return op <= Op::Parameter; }
constexpr bool is_unary(Op op) noexcept { return op >= Op::Neg && op <= Op::Square; }
constexpr bool is_binary(Op op) noexcept { return op >= Op::Add; }

// Invalid evaluations are represented by a quiet NaN; every operator maps a
// non-finite result to NaN so that invalidity propagates to the root.
inline constexpr double invalid_value = std::numeric_limits<double>::quiet_NaN();
inline bool is_invalid(double v) noexcept { return !std::isfinite(v); }

/// Immutable expression tree. Copies share nodes, so trees are cheap to pass
/// around and safe to evaluate from several threads at once.
class Expr {
public:
    /// The constant 0.
    Expr();

    static Expr constant(double value);
    /// Variable x_index, 1-based.
    static Expr variable(int index);
    /// Skeleton placeholder theta_index, 1-based.
    static Expr parameter(int index);
    static Expr unary(Op op, Expr child);
    static Expr binary(Op op, Expr lhs, Expr rhs);

    Op op() const noexcept;
    double value() const noexcept;
    int index() const noexcept;
    const Expr& lhs() const noexcept;
    const Expr& rhs() const noexcept;
    const Expr& child() const noexcept;

    /// Node count; constants, variables and parameters count one each.
    std::size_t size() const noexcept;
    /// Largest variable index referenced (0 if none).
    int max_variable() const noexcept;
    /// Largest parameter index referenced (0 if none).
    int max_parameter() const noexcept;

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct Expr::Node {
    Op op {};
    double value {};
    int index {};
    std::size_t size {1};
    int max_variable {};
    int max_parameter {};
    Expr children[2] {Expr(nullptr), Expr(nullptr)};
};

inline Op Expr::op() const noexcept { return node_->op; }
inline double Expr::value() const noexcept { return node_->value; }
inline int Expr::index() const noexcept { return node_->index; }
inline const Expr& Expr::lhs() const noexcept { return node_->children[0]; }
inline const Expr& Expr::rhs() const noexcept { return node_->children[1]; }
inline const Expr& Expr::child() const noexcept { return node_->children[0]; }
inline std::size_t Expr::size() const noexcept { return node_->size; }
inline int Expr::max_variable() const noexcept { return node_->max_variable; }
inline int Expr::max_parameter() const noexcept { return node_->max_parameter; }

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr sqrt(const Expr& e);
Expr square(const Expr& e);

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t offset);
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Parses `text` as an expression over x1..x_arity.
/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' base)?
///   base   := number | 'x' digits | func '(' expr ')' | '(' expr ')' | '-' base
///   func   := sin | cos | exp | ln | sqrt
Expr parse(std::string_view text, int arity);

/// Minimal-parenthesis text form that `parse` reads back; constants carry 17
/// significant digits. Parameters print as θk and do not re-parse.
std::string to_string(const Expr& e);

/// Reference tree-walking evaluator. Returns NaN on any domain violation.
/// Throws std::invalid_argument if the point (or parameter vector) is too
/// short for the variables (parameters) the tree references.
double evaluate(const Expr& e, std::span<const double> point, std::span<const double> params = {});

/// Node count (same as e.size()).
inline std::size_t complexity(const Expr& e) noexcept { return e.size(); }

/// Replaces every theta_k by the constant params[k-1].
Expr bind_parameters(const Expr& e, std::span<const double> params);

/// Renames variables: x_i becomes x_{mapping[i-1]}.
Expr remap_variables(const Expr& e, std::span<const int> mapping);

namespace detail {
    // Scalar operator kernels shared by the tree evaluator and compiled programs.
    inline double finite_or_invalid(double v) noexcept { return std::isfinite(v) ? v : invalid_value; }

    inline double apply_unary(Op op, double a) noexcept
    {
        switch (op) {
        case Op::Neg: return -a;
        case Op::Sin: return finite_or_invalid(std::sin(a));
        case Op::Cos: return finite_or_invalid(std::cos(a));
        case Op::Exp: return finite_or_invalid(std::exp(a));
        case Op::Ln: return a > 0.0 ? finite_or_invalid(std::log(a)) : invalid_value;
        case Op::Sqrt: return a >= 0.0 ? std::sqrt(a) : invalid_value;
        case Op::Square: return finite_or_invalid(a * a);
        default: return invalid_value;
        }
    }

    inline double apply_binary(Op op, double a, double b, double min_denominator = 0.0) noexcept
    {
        switch (op) {
        case Op::Add: return finite_or_invalid(a + b);
        case Op::Sub: return finite_or_invalid(a - b);
        case Op::Mul: return finite_or_invalid(a * b);
        case Op::Div: return std::fabs(b) > min_denominator ? finite_or_invalid(a / b) : invalid_value;
        case Op::Pow:
            if (a == 0.0 && b < 0.0) {
                return invalid_value;
            }
            return finite_or_invalid(std::pow(a, b));
        default: return invalid_value;
        }
    }
} // namespace detail

} // namespace gsr

#endif
