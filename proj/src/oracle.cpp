#include "gsr/oracle.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "gsr/random.hpp"

namespace gsr {

DomainBox::DomainBox(std::vector<Interval> intervals) : intervals_(std::move(intervals))
{
    if (intervals_.empty()) {
        throw std::invalid_argument("domain box needs at least one interval");
    }
    for (const auto& iv : intervals_) {
        if (!(iv.lo < iv.hi)) {
            throw std::invalid_argument("domain interval requires lo < hi");
        }
    }
}

DomainBox DomainBox::cube(int arity, double lo, double hi)
{
    if (arity < 1) {
        throw std::invalid_argument("arity must be >= 1");
    }
    return DomainBox(std::vector<Interval>(static_cast<std::size_t>(arity), Interval {lo, hi}));
}

std::vector<double> DomainBox::midpoint() const
{
    std::vector<double> mid;
    mid.reserve(intervals_.size());
    for (const auto& iv : intervals_) {
        mid.push_back(iv.mid());
    }
    return mid;
}

bool DomainBox::contains(std::span<const double> point) const noexcept
{
    if (point.size() != intervals_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < point.size(); ++i) {
        if (!(point[i] >= intervals_[i].lo && point[i] <= intervals_[i].hi)) {
            return false;
        }
    }
    return true;
}

Oracle::Oracle(Expr target, DomainBox box) : target_(std::move(target)), program_(target_), box_(std::move(box))
{
    if (target_.max_variable() > box_.arity()) {
        throw std::invalid_argument("target references x" + std::to_string(target_.max_variable())
                                    + " but the domain has arity " + std::to_string(box_.arity()));
    }
}

Oracle::Oracle(Oracle&& other) noexcept
    : target_(std::move(other.target_))
    , program_(std::move(other.program_))
    , box_(std::move(other.box_))
    , count_(other.count_.load())
{
}

double Oracle::operator()(std::span<const double> point) const
{
    if (point.size() != static_cast<std::size_t>(arity())) {
        throw std::invalid_argument("oracle called with wrong point dimension");
    }
    count_.fetch_add(1, std::memory_order_relaxed);
    return program_(point);
}

void Oracle::evaluate(const Points& points, std::span<double> out, bool parallel) const
{
    if (points.cols() != static_cast<std::size_t>(arity())) {
        throw std::invalid_argument("oracle called with wrong point dimension");
    }
    if (parallel) {
        kernels::evaluate_parallel(program_, points, {}, out);
    } else {
        kernels::evaluate_serial(program_, points, {}, out);
    }
    count_.fetch_add(points.rows(), std::memory_order_relaxed);
}

Oracle make_oracle(Expr target, DomainBox box) { return Oracle(std::move(target), std::move(box)); }

Points uniform_points(const DomainBox& box, std::size_t count, std::uint64_t seed)
{
    if (count == 0) {
        throw std::invalid_argument("sample count must be >= 1");
    }
    Rng rng(seed);
    const auto n = static_cast<std::size_t>(box.arity());
    Points points(count, n);
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            points(i, j) = uniform(rng, box[j].lo, box[j].hi);
        }
    }
    return points;
}

SampleSet sample_uniform(const Oracle& oracle, std::size_t count, std::uint64_t seed)
{
    SampleSet s;
    s.points = uniform_points(oracle.box(), count, seed);
    s.values.resize(count);
    s.seed = seed;
    oracle.evaluate(s.points, s.values);
    return s;
}

void write_csv(const SampleSet& samples, std::ostream& os)
{
    const std::size_t n = samples.points.cols();
    for (std::size_t j = 0; j < n; ++j) {
        os << 'x' << (j + 1) << ',';
    }
    os << "f\n";
    char buf[40];
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,", samples.points(i, j));
            os << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g\n", samples.values[i]);
        os << buf;
    }
}

} // namespace gsr
