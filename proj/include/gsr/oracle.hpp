#ifndef GSR_ORACLE_HPP
#define GSR_ORACLE_HPP

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "gsr/expr.hpp"
#include "gsr/program.hpp"

namespace gsr {

struct Interval {
    double lo;
    double hi;

    double width() const noexcept { return hi - lo; }
    double mid() const noexcept { return 0.5 * (lo + hi); }
};

/// Closed box [a_1,b_1] x ... x [a_n,b_n] with a_i < b_i.
class DomainBox {
public:
    DomainBox() = default;
    explicit DomainBox(std::vector<Interval> intervals);
    static DomainBox cube(int arity, double lo, double hi);

    int arity() const noexcept { return static_cast<int>(intervals_.size()); }
    /// 0-based access.
    const Interval& operator[](std::size_t i) const noexcept { return intervals_[i]; }
    const std::vector<Interval>& intervals() const noexcept { return intervals_; }

    std::vector<double> midpoint() const;
    bool contains(std::span<const double> point) const noexcept;

private:
    std::vector<Interval> intervals_;
};

/// Black-box access to a target function with an evaluation counter. All
/// detection probes go through this type; evaluation itself is pure.
class Oracle {
public:
    Oracle(Expr target, DomainBox box);
    Oracle(Oracle&& other) noexcept;
    Oracle(const Oracle&) = delete;
    Oracle& operator=(const Oracle&) = delete;
    Oracle& operator=(Oracle&&) = delete;

    int arity() const noexcept { return box_.arity(); }
    const DomainBox& box() const noexcept { return box_; }
    const Expr& target() const noexcept { return target_; }

    /// One evaluation; NaN when the target is invalid at `point`.
    double operator()(std::span<const double> point) const;

    /// Evaluates every row; counts one evaluation per row.
    void evaluate(const Points& points, std::span<double> out, bool parallel = true) const;

    std::uint64_t evaluations() const noexcept { return count_.load(std::memory_order_relaxed); }

private:
    Expr target_;
    Program program_;
    DomainBox box_;
    mutable std::atomic<std::uint64_t> count_ {0};
};

Oracle make_oracle(Expr target, DomainBox box);

struct SampleSet {
    Points points;
    std::vector<double> values;
    std::uint64_t seed {0};

    std::size_t size() const noexcept { return values.size(); }
};

/// `count` i.i.d. uniform points from the box, reproducible from `seed`.
Points uniform_points(const DomainBox& box, std::size_t count, std::uint64_t seed);

/// Uniform points from the oracle's box together with the oracle's values.
SampleSet sample_uniform(const Oracle& oracle, std::size_t count, std::uint64_t seed);

/// CSV with header x1,...,xn,f and 17 significant digits.
void write_csv(const SampleSet& samples, std::ostream& os);

} // namespace gsr

#endif
