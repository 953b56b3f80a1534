#include "gsr/skeleton.hpp"

#include <algorithm>
#include <stdexcept>

namespace gsr {

namespace {

    Expr v(int i) { return Expr::variable(i); }
    Expr t(int i) { return Expr::parameter(i); }
    Expr c(double x) { return Expr::constant(x); }

    Skeleton make(Expr core, std::vector<Expr> basis, int nonlinear, int variables)
    {
        return Skeleton {std::move(core), std::move(basis), nonlinear, variables};
    }

    Skeleton harmonic(Expr core_arg, Expr arg, int nonlinear, int variables)
    {
        return make(sin(core_arg), {sin(arg), cos(arg)}, nonlinear, variables);
    }

    void univariate(std::vector<Skeleton>& out)
    {
        const Expr x = v(1);
        out.push_back(make(x, {x}, 0, 1));
        out.push_back(make(square(x), {square(x)}, 0, 1));
        out.push_back(make(x + square(x), {x, square(x)}, 0, 1));
        out.push_back(make(c(1) / x, {c(1) / x}, 0, 1));
        out.push_back(make(pow(x, c(3)), {pow(x, c(3))}, 0, 1));
        out.push_back(make(c(1) / square(x), {c(1) / square(x)}, 0, 1));
        out.push_back(make(exp(t(1) * x), {exp(t(1) * x)}, 1, 1));
        out.push_back(make(log(x + t(1)), {log(x + t(1))}, 1, 1));
        out.push_back(make(log(t(1) - x), {log(t(1) - x)}, 1, 1));
        out.push_back(make(sqrt(x + t(1)), {sqrt(x + t(1))}, 1, 1));
        out.push_back(make(sqrt(t(1) - x), {sqrt(t(1) - x)}, 1, 1));
        out.push_back(harmonic(t(1) * x, t(1) * x, 1, 1));
        out.push_back(make(c(1) / (x + t(1)), {c(1) / (x + t(1))}, 1, 1));
        out.push_back(make(exp(t(1) * square(x)), {exp(t(1) * square(x))}, 1, 1));
        out.push_back(harmonic(t(1) * square(x), t(1) * square(x), 1, 1));
        out.push_back(make(x * exp(t(1) * x), {x * exp(t(1) * x)}, 1, 1));
        out.push_back(make(exp(t(1) * x) / x, {exp(t(1) * x) / x}, 1, 1));
        out.push_back(make(x * sin(t(1) * x), {x * sin(t(1) * x), x * cos(t(1) * x)}, 1, 1));
        out.push_back(make(sin(t(1) * x) / x, {sin(t(1) * x) / x, cos(t(1) * x) / x}, 1, 1));
        out.push_back(make(exp(t(1) * x) * sin(t(2) * x),
                           {exp(t(1) * x) * sin(t(2) * x), exp(t(1) * x) * cos(t(2) * x)}, 2, 1));
    }

    void bivariate(std::vector<Skeleton>& out)
    {
        const Expr x = v(1);
        const Expr y = v(2);
        out.push_back(make(x + y, {x, y}, 0, 2));
        out.push_back(make(x * y, {x * y}, 0, 2));
        out.push_back(make(x / y, {x / y}, 0, 2));
        out.push_back(make(y / x, {y / x}, 0, 2));
        out.push_back(make(square(x) + square(y), {square(x), square(y)}, 0, 2));
        out.push_back(make(log(x) + log(y), {log(x), log(y)}, 0, 2));
        out.push_back(make(sqrt(square(x) + square(y)), {sqrt(square(x) + square(y))}, 0, 2));
        out.push_back(make(x - square(y) / x, {x, square(y) / x}, 0, 2));
        out.push_back(make(y - square(x) / y, {y, square(x) / y}, 0, 2));
        out.push_back(harmonic(t(1) * x * y, t(1) * (x * y), 1, 2));
        out.push_back(make(exp(t(1) * x * y), {exp(t(1) * (x * y))}, 1, 2));
        out.push_back(make(c(1) / (x + t(1) * y), {c(1) / (x + t(1) * y)}, 1, 2));
        out.push_back(make(c(1) / (y + t(1) * x), {c(1) / (y + t(1) * x)}, 1, 2));
        out.push_back(harmonic(t(1) * x + t(2) * y, t(1) * x + t(2) * y, 2, 2));
        out.push_back(make(exp(t(1) * x + t(2) * y), {exp(t(1) * x + t(2) * y)}, 2, 2));
        out.push_back(make(log(x + t(1) * y + t(2)), {log(x + t(1) * y + t(2))}, 2, 2));
        out.push_back(make(log(t(1) * y + t(2) - x), {log(t(1) * y + t(2) - x)}, 2, 2));
    }

    void trivariate(std::vector<Skeleton>& out)
    {
        const Expr x = v(1);
        const Expr y = v(2);
        const Expr z = v(3);
        out.push_back(make(x + y + z, {x, y, z}, 0, 3));
        out.push_back(make(x * y * z, {x * y * z}, 0, 3));
        out.push_back(make((x + y) / z, {x / z, y / z}, 0, 3));
        out.push_back(make((x + z) / y, {x / y, z / y}, 0, 3));
        out.push_back(make((y + z) / x, {y / x, z / x}, 0, 3));
        out.push_back(harmonic(t(1) * x * y * z, t(1) * (x * y * z), 1, 3));
        out.push_back(make(exp(t(1) * x * y * z), {exp(t(1) * (x * y * z))}, 1, 3));
        out.push_back(harmonic(t(1) * x + t(2) * y + t(3) * z, t(1) * x + t(2) * y + t(3) * z, 3, 3));
        out.push_back(make(exp(t(1) * x + t(2) * y + t(3) * z), {exp(t(1) * x + t(2) * y + t(3) * z)}, 3, 3));
    }

} // namespace

Expr Skeleton::form() const
{
    Expr result = t(nonlinear + 1);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        result = result + t(nonlinear + 2 + static_cast<int>(k)) * basis[k];
    }
    return result;
}

Expr Skeleton::instantiate(std::span<const double> theta, std::span<const double> coefficients) const
{
    if (theta.size() != static_cast<std::size_t>(nonlinear) || coefficients.size() != basis.size() + 1) {
        throw std::invalid_argument("skeleton instantiated with the wrong number of parameters");
    }
    Expr result = c(coefficients[0]);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        result = result + c(coefficients[k + 1]) * bind_parameters(basis[k], theta);
    }
    return result;
}

std::vector<Skeleton> skeleton_stream(int var_count, std::size_t max_nodes)
{
    if (var_count < 1) {
        throw std::invalid_argument("skeleton_stream needs at least one variable");
    }
    if (max_nodes < 3) {
        throw std::invalid_argument("max_nodes must be at least 3");
    }
    std::vector<Skeleton> all;
    all.push_back(make(c(1), {}, 0, var_count));
    switch (var_count) {
    case 1: univariate(all); break;
    case 2: bivariate(all); break;
    case 3: trivariate(all); break;
    default: {
        Expr sum = v(1);
        std::vector<Expr> basis {v(1)};
        for (int i = 2; i <= var_count; ++i) {
            sum = sum + v(i);
            basis.push_back(v(i));
        }
        all.push_back(make(sum, basis, 0, var_count));
    }
    }
    std::erase_if(all, [&](const Skeleton& s) { return s.complexity() > max_nodes; });
    std::stable_sort(all.begin(), all.end(), [](const Skeleton& a, const Skeleton& b) {
        if (a.complexity() != b.complexity()) {
            return a.complexity() < b.complexity();
        }
        return a.name() < b.name();
    });
    return all;
}

} // namespace gsr
