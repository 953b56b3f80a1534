#include "gsr/fit.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "gsr/random.hpp"

namespace gsr {

namespace {

    constexpr double infinity = std::numeric_limits<double>::infinity();
    constexpr double min_denominator = 1e-12;

    double mean_of(std::span<const double> v)
    {
        return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    }

    // Basis matrix for fixed theta, with columns centered. Returns false if
    // any entry is invalid.
    class BasisMatrix {
    public:
        BasisMatrix(const Skeleton& skeleton, const Points& points)
            : points_(points)
            , matrix_(static_cast<Eigen::Index>(points.rows()), static_cast<Eigen::Index>(skeleton.basis.size()))
            , means_(skeleton.basis.size())
        {
            programs_.reserve(skeleton.basis.size());
            for (const auto& b : skeleton.basis) {
                programs_.emplace_back(b, EvalOptions {min_denominator});
            }
        }

        bool fill(std::span<const double> theta)
        {
            const std::size_t n = points_.rows();
            for (std::size_t k = 0; k < programs_.size(); ++k) {
                double* col = matrix_.col(static_cast<Eigen::Index>(k)).data();
                programs_[k].evaluate_rows(points_, 0, n, theta, col, scratch_);
                double sum = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    sum += col[r];
                }
                if (is_invalid(sum)) {
                    return false;
                }
                means_[k] = sum / static_cast<double>(n);
                for (std::size_t r = 0; r < n; ++r) {
                    col[r] -= means_[k];
                }
            }
            return true;
        }

        Eigen::MatrixXd& matrix() noexcept { return matrix_; }
        const std::vector<double>& means() const noexcept { return means_; }

    private:
        const Points& points_;
        std::vector<Program> programs_;
        Eigen::MatrixXd matrix_;
        std::vector<double> means_;
        std::vector<double> scratch_;
    };

    // Mean squared residual of the best linear combination, as a function of
    // the nonlinear parameters only.
    class ProjectedObjective {
    public:
        ProjectedObjective(const Skeleton& skeleton, const Points& points, std::span<const double> values)
            : basis_(skeleton, points)
            , target_(static_cast<Eigen::Index>(values.size()))
        {
            const double mu = mean_of(values);
            double var = 0.0;
            for (double y : values) {
                var += (y - mu) * (y - mu);
            }
            var /= static_cast<double>(values.size());
            const double sd = var > 0.0 ? std::sqrt(var) : 1.0;
            for (std::size_t r = 0; r < values.size(); ++r) {
                target_[static_cast<Eigen::Index>(r)] = (values[r] - mu) / sd;
            }
        }

        double operator()(std::span<const double> theta)
        {
            const auto n = static_cast<double>(target_.size());
            if (basis_.matrix().cols() == 0) {
                return target_.squaredNorm() / n;
            }
            if (!basis_.fill(theta)) {
                return infinity;
            }
            qr_.compute(basis_.matrix());
            const Eigen::VectorXd a = qr_.solve(target_);
            const double mse = (target_ - basis_.matrix() * a).squaredNorm() / n;
            return std::isfinite(mse) ? mse : infinity;
        }

    private:
        BasisMatrix basis_;
        Eigen::VectorXd target_;
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
    };

    double raw_mse(const Expr& local, const Points& points, std::span<const double> values)
    {
        const Program program(local, EvalOptions {min_denominator});
        std::vector<double> predicted(values.size());
        kernels::evaluate_serial(program, points, {}, predicted);
        return kernels::mse_serial(predicted, values);
    }

} // namespace

std::vector<double> skeleton_coefficients(const Skeleton& skeleton, const Points& points,
                                          std::span<const double> values, std::span<const double> theta)
{
    const double mu = mean_of(values);
    std::vector<double> coefficients(skeleton.basis.size() + 1, 0.0);
    coefficients[0] = mu;
    if (skeleton.basis.empty()) {
        return coefficients;
    }
    BasisMatrix basis(skeleton, points);
    if (!basis.fill(theta)) {
        throw std::domain_error("skeleton is invalid on the data at the given parameters");
    }
    Eigen::VectorXd y(static_cast<Eigen::Index>(values.size()));
    for (std::size_t r = 0; r < values.size(); ++r) {
        y[static_cast<Eigen::Index>(r)] = values[r] - mu;
    }
    const Eigen::VectorXd a = basis.matrix().colPivHouseholderQr().solve(y);
    for (std::size_t k = 0; k < skeleton.basis.size(); ++k) {
        coefficients[k + 1] = a[static_cast<Eigen::Index>(k)];
        coefficients[0] -= a[static_cast<Eigen::Index>(k)] * basis.means()[k];
    }
    return coefficients;
}

SkeletonFit fit_skeleton(const Skeleton& skeleton, const Points& points, std::span<const double> values,
                         const FitConfig& config, std::uint64_t seed)
{
    if (values.empty() || points.rows() != values.size()) {
        throw std::invalid_argument("fit_skeleton: data is empty or inconsistent");
    }
    if (points.cols() < static_cast<std::size_t>(skeleton.variables)) {
        throw std::invalid_argument("fit_skeleton: data has fewer columns than the skeleton has variables");
    }
    ProjectedObjective objective(skeleton, points, values);
    SkeletonFit fit;
    const auto d = static_cast<std::size_t>(skeleton.nonlinear);
    if (d == 0) {
        fit.normalized_mse = objective({});
        fit.evaluations = 1;
        return fit;
    }
    const Objective fn = [&objective](std::span<const double> theta) { return objective(theta); };
    fit.normalized_mse = infinity;
    for (int r = 0; r < std::max(1, config.restarts); ++r) {
        OptimizerConfig oc = config.optimizer;
        oc.seed = derive_seed(seed, {static_cast<std::uint64_t>(r)});
        const auto global = ldse_minimize(fn, d, oc);
        fit.evaluations += global.evaluations;
        OptimizeResult best = global;
        // Two polishing passes; the second restarts the simplex at the first
        // pass's optimum, which helps when the first one collapsed early.
        for (int pass = 0; pass < 2 && std::isfinite(best.value); ++pass) {
            auto polished = nelder_mead(fn, best.x, oc.lower, oc.upper,
                                        config.polish_iterations * static_cast<int>(d), pass == 0 ? 0.05 : 1e-4);
            fit.evaluations += polished.evaluations;
            if (polished.value <= best.value) {
                best.x = std::move(polished.x);
                best.value = polished.value;
            }
        }
        if (best.value < fit.normalized_mse) {
            fit.normalized_mse = best.value;
            fit.theta = best.x;
        }
        if (fit.normalized_mse <= config.accept_tolerance) {
            break;
        }
    }
    return fit;
}

FactorModel fit_factor(const FactorData& data, const FitConfig& config)
{
    if (data.values.empty() || data.points.rows() != data.values.size() || data.vars.empty()
        || data.points.cols() != data.vars.size()) {
        throw std::invalid_argument("fit_factor: factor data is empty or inconsistent");
    }
    const auto skeletons = skeleton_stream(static_cast<int>(data.vars.size()), config.max_nodes);

    FactorModel model;
    model.vars = data.vars;
    model.role = data.role;
    model.block = data.block;

    double best = infinity;
    std::size_t best_index = 0;
    SkeletonFit best_fit;
    for (std::size_t i = 0; i < skeletons.size(); ++i) {
        auto fit = fit_skeleton(skeletons[i], data.points, data.values, config,
                                derive_seed(config.optimizer.seed, {static_cast<std::uint64_t>(i)}));
        ++model.skeletons_tried;
        model.evaluations += fit.evaluations;
        if (fit.normalized_mse < best) {
            best = fit.normalized_mse;
            best_index = i;
            best_fit = std::move(fit);
        }
        if (best <= config.accept_tolerance) {
            break;
        }
    }

    model.skeleton = skeletons[best_index];
    model.theta = best_fit.theta;
    model.coefficients = skeleton_coefficients(model.skeleton, data.points, data.values, model.theta);
    model.local = model.skeleton.instantiate(model.theta, model.coefficients);
    model.expr = remap_variables(model.local, data.vars);
    model.train_mse = raw_mse(model.local, data.points, data.values);

    const double mu = mean_of(data.values);
    double var = 0.0;
    for (double y : data.values) {
        var += (y - mu) * (y - mu);
    }
    var /= static_cast<double>(data.values.size());
    model.normalized_mse = var > 0.0 ? model.train_mse / var : (model.train_mse == 0.0 ? 0.0 : infinity);
    model.below_tolerance = model.normalized_mse <= config.accept_tolerance;
    return model;
}

} // namespace gsr
