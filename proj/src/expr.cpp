#include "gsr/expr.hpp"

#include <algorithm>
#include <cstdio>

namespace gsr {

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double value)
{
    auto node = std::make_shared<Node>();
    node->op = Op::Constant;
    node->value = value;
    return Expr(std::move(node));
}

Expr Expr::variable(int index)
{
    if (index < 1) {
        throw std::invalid_argument("variable index must be >= 1");
    }
    auto node = std::make_shared<Node>();
    node->op = Op::Variable;
    node->index = index;
    node->max_variable = index;
    return Expr(std::move(node));
}

Expr Expr::parameter(int index)
{
    if (index < 1) {
        throw std::invalid_argument("parameter index must be >= 1");
    }
    auto node = std::make_shared<Node>();
    node->op = Op::Parameter;
    node->index = index;
    node->max_parameter = index;
    return Expr(std::move(node));
}

Expr Expr::unary(Op op, Expr child)
{
    if (!is_unary(op)) {
        throw std::invalid_argument("not a unary operator");
    }
    auto node = std::make_shared<Node>();
    node->op = op;
    node->size = 1 + child.size();
    node->max_variable = child.max_variable();
    node->max_parameter = child.max_parameter();
    node->children[0] = std::move(child);
    return Expr(std::move(node));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs)
{
    if (!is_binary(op)) {
        throw std::invalid_argument("not a binary operator");
    }
    auto node = std::make_shared<Node>();
    node->op = op;
    node->size = 1 + lhs.size() + rhs.size();
    node->max_variable = std::max(lhs.max_variable(), rhs.max_variable());
    node->max_parameter = std::max(lhs.max_parameter(), rhs.max_parameter());
    node->children[0] = std::move(lhs);
    node->children[1] = std::move(rhs);
    return Expr(std::move(node));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Op::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Op::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Op::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Op::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(Op::Neg, a); }
Expr pow(const Expr& base, const Expr& exponent) { return Expr::binary(Op::Pow, base, exponent); }
Expr sin(const Expr& e) { return Expr::unary(Op::Sin, e); }
Expr cos(const Expr& e) { return Expr::unary(Op::Cos, e); }
Expr exp(const Expr& e) { return Expr::unary(Op::Exp, e); }
Expr log(const Expr& e) { return Expr::unary(Op::Ln, e); }
Expr sqrt(const Expr& e) { return Expr::unary(Op::Sqrt, e); }
Expr square(const Expr& e) { return Expr::unary(Op::Square, e); }

namespace {

    std::string format_number(double v)
    {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    const char* function_name(Op op)
    {
        switch (op) {
        case Op::Sin: return "sin";
        case Op::Cos: return "cos";
        case Op::Exp: return "exp";
        case Op::Ln: return "ln";
        case Op::Sqrt: return "sqrt";
        default: return nullptr;
        }
    }

    // Precedence levels mirror the grammar: expr < term < factor < base.
    enum Level { ExprLevel = 0, TermLevel = 1, FactorLevel = 2, BaseLevel = 3 };

    Level level_of(const Expr& e)
    {
        switch (e.op()) {
        case Op::Add:
        case Op::Sub: return ExprLevel;
        case Op::Mul:
        case Op::Div: return TermLevel;
        case Op::Pow:
        case Op::Square: return FactorLevel;
        default: return BaseLevel;
        }
    }

    void print(const Expr& e, std::string& out);

    void print_at(const Expr& e, Level required, std::string& out)
    {
        if (level_of(e) < required) {
            out += '(';
            print(e, out);
            out += ')';
        } else {
            print(e, out);
        }
    }

    void print(const Expr& e, std::string& out)
    {
        switch (e.op()) {
        case Op::Constant:
            if (std::signbit(e.value())) {
                out += '-';
                out += format_number(-e.value());
            } else {
                out += format_number(e.value());
            }
            return;
        case Op::Variable:
            out += 'x';
            out += std::to_string(e.index());
            return;
        case Op::Parameter:
            out += "θ";
            out += std::to_string(e.index());
            return;
        case Op::Neg:
            out += '-';
            print_at(e.child(), BaseLevel, out);
            return;
        case Op::Square:
            print_at(e.child(), BaseLevel, out);
            out += "^2";
            return;
        case Op::Sin:
        case Op::Cos:
        case Op::Exp:
        case Op::Ln:
        case Op::Sqrt:
            out += function_name(e.op());
            out += '(';
            print(e.child(), out);
            out += ')';
            return;
        case Op::Add:
        case Op::Sub:
            print_at(e.lhs(), ExprLevel, out);
            out += e.op() == Op::Add ? '+' : '-';
            print_at(e.rhs(), TermLevel, out);
            return;
        case Op::Mul:
        case Op::Div:
            print_at(e.lhs(), TermLevel, out);
            out += e.op() == Op::Mul ? '*' : '/';
            print_at(e.rhs(), FactorLevel, out);
            return;
        case Op::Pow:
            print_at(e.lhs(), BaseLevel, out);
            out += '^';
            print_at(e.rhs(), BaseLevel, out);
            return;
        }
    }

} // namespace

std::string to_string(const Expr& e)
{
    std::string out;
    print(e, out);
    return out;
}

namespace {

    double eval_node(const Expr& e, std::span<const double> point, std::span<const double> params)
    {
        switch (e.op()) {
        case Op::Constant: return e.value();
        case Op::Variable: return point[static_cast<std::size_t>(e.index() - 1)];
        case Op::Parameter: return params[static_cast<std::size_t>(e.index() - 1)];
        default: break;
        }
        if (is_unary(e.op())) {
            return detail::apply_unary(e.op(), eval_node(e.child(), point, params));
        }
        double a = eval_node(e.lhs(), point, params);
        double b = eval_node(e.rhs(), point, params);
        return detail::apply_binary(e.op(), a, b);
    }

} // namespace

double evaluate(const Expr& e, std::span<const double> point, std::span<const double> params)
{
    if (static_cast<std::size_t>(e.max_variable()) > point.size()) {
        throw std::invalid_argument("point has " + std::to_string(point.size()) + " coordinates, expression references x"
                                    + std::to_string(e.max_variable()));
    }
    if (static_cast<std::size_t>(e.max_parameter()) > params.size()) {
        throw std::invalid_argument("missing parameter values");
    }
    return eval_node(e, point, params);
}

Expr bind_parameters(const Expr& e, std::span<const double> params)
{
    if (e.max_parameter() == 0) {
        return e;
    }
    switch (e.op()) {
    case Op::Parameter: return Expr::constant(params[static_cast<std::size_t>(e.index() - 1)]);
    case Op::Constant:
    case Op::Variable: return e;
    default: break;
    }
    if (is_unary(e.op())) {
        return Expr::unary(e.op(), bind_parameters(e.child(), params));
    }
    return Expr::binary(e.op(), bind_parameters(e.lhs(), params), bind_parameters(e.rhs(), params));
}

Expr remap_variables(const Expr& e, std::span<const int> mapping)
{
    switch (e.op()) {
    case Op::Variable: return Expr::variable(mapping[static_cast<std::size_t>(e.index() - 1)]);
    case Op::Constant:
    case Op::Parameter: return e;
    default: break;
    }
    if (is_unary(e.op())) {
        return Expr::unary(e.op(), remap_variables(e.child(), mapping));
    }
    return Expr::binary(e.op(), remap_variables(e.lhs(), mapping), remap_variables(e.rhs(), mapping));
}

} // namespace gsr
