#include "gsr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <map>
#include <stdexcept>

namespace gsr {

namespace {

    CaseSpec make_case(int number, const char* target, int dim, double lo, double hi, VarSet repeated,
                       std::size_t blocks, std::optional<std::size_t> factors, bool in_table = true)
    {
        return CaseSpec {number, target, dim, DomainBox::cube(dim, lo, hi), std::move(repeated), blocks, factors, in_table};
    }

    double median(std::vector<double> v)
    {
        if (v.empty()) {
            return 0.0;
        }
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }

} // namespace

const std::vector<CaseSpec>& benchmark_cases()
{
    static const std::vector<CaseSpec> cases {
        make_case(1, "0.5*exp(x1)*sin(2*x2)", 2, -3, 3, {}, 1, 2),
        make_case(2, "2*cos(x1) + sin(3*x2 - x3)", 3, -3, 3, {}, 2, 2),
        make_case(3, "1.2 + 10*sin(2*x1) - 3*x2^2*cos(x3)", 3, -3, 3, {}, 2, 3),
        make_case(4, "x3*sin(x1) - 2*x3*cos(x2)", 3, -3, 3, {3}, 2, 4),
        make_case(5, "2*x1*sin(x2)*cos(x4) - 0.5*x4*cos(x3)", 4, -3, 3, {4}, 2, 5),
        make_case(6, "10 + 0.2*x1 - 0.2*x5^2*sin(x2) + cos(x5)*ln(3*x3 + 1.2) - 1.2*exp(0.5*x4)", 5, 1, 3, {5}, 4, 6),
        make_case(7, "2*x4*x5*sin(x1) - x5*x2 + 0.5*exp(x3)*cos(x4)", 5, -3, 3, {4, 5}, 3, 7),
        make_case(8, "1.2 + 2*x4*cos(x2) + 0.5*exp(1.2*x3)*sin(3*x1)*cos(x4) - 2*cos(1.5*x5 + 5)", 5, -3, 3, {4}, 3,
                  6),
        make_case(9, "0.5*cos(x3*x4)/(exp(x1)*x2^2)*sin(1.5*x5 - 2*x6)", 6, -3, 3, {}, 1, 4),
        make_case(10, "1.2 - 2*(x1 + x2)/x3*cos(x7) + 0.5*exp(x7)*x4*sin(x5*x6)", 7, -3, 3, {7}, 2, 6),
        make_case(11, "x1*x4*sin(x2)*(1 - x3^2/x4^2) + x5/6.283185307179586*ln(x4/x3)", 5, 1, 3, {3, 4}, 2,
                  std::nullopt, false),
    };
    return cases;
}

const CaseSpec& benchmark_case(int number)
{
    const auto& cases = benchmark_cases();
    if (number < 1 || number > static_cast<int>(cases.size())) {
        throw std::out_of_range("no benchmark case " + std::to_string(number));
    }
    return cases[static_cast<std::size_t>(number - 1)];
}

CaseReport run_case(int number, std::uint64_t seed, const PipelineConfig& base)
{
    CaseReport report;
    report.number = number;
    report.seed = seed;
    const auto start = std::chrono::steady_clock::now();
    try {
        const auto& spec = benchmark_case(number);
        const Oracle oracle(parse(spec.target, spec.dim), spec.box);
        PipelineConfig config = base;
        config.seed = seed;
        try {
            const auto result = run_pipeline(oracle, config);
            report.structure = result.structure;
            report.detected = true;
            report.completed = true;
            report.val_mse = result.model.val_mse;
            report.success = result.model.success;
            report.attempts = result.attempts;
            report.samples = result.model.val_samples;
            report.detection_evals = result.detection_evals;
            report.model = to_string(result.model.expr);
        } catch (const DetectionError& e) {
            report.error = e.what();
        } catch (const AssemblyError& e) {
            report.error = e.what();
        }
        report.evaluations = oracle.evaluations();
        if (report.detected) {
            report.match_repeated = report.structure.repeated == spec.expected_repeated;
            report.match_blocks = report.structure.blocks.size() == spec.expected_blocks;
            report.match_factors = !spec.expected_factors || report.structure.factor_count() == *spec.expected_factors;
        }
    } catch (const std::exception& e) {
        report.error = e.what();
    }
    report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

SuiteReport summarize(std::vector<CaseReport> runs)
{
    std::stable_sort(runs.begin(), runs.end(), [](const CaseReport& a, const CaseReport& b) {
        return a.number < b.number || (a.number == b.number && a.seed < b.seed);
    });
    SuiteReport suite;
    std::map<int, std::vector<const CaseReport*>> by_case;
    for (const auto& r : runs) {
        by_case[r.number].push_back(&r);
    }
    for (const auto& [number, reports] : by_case) {
        CaseSummary s;
        s.number = number;
        s.dim = benchmark_case(number).dim;
        std::vector<double> walls;
        std::vector<double> evals;
        bool first = true;
        for (const auto* r : reports) {
            ++s.runs;
            s.match_repeated += r->match_repeated;
            s.match_blocks += r->match_blocks;
            s.match_factors += r->match_factors;
            s.structure_matches += r->structure_match();
            s.successes += r->success;
            // Any incomplete or invalid run makes the maximum invalid.
            if (!r->completed || is_invalid(r->val_mse) || is_invalid(s.mse_max)) {
                s.mse_max = invalid_value;
            } else {
                s.mse_max = std::max(s.mse_max, r->val_mse);
            }
            s.samples = std::max(s.samples, r->samples);
            if (r->detected && first) {
                s.repeated = r->structure.repeated;
                s.blocks = r->structure.blocks.size();
                s.factors = r->structure.factor_count();
                first = false;
            }
            walls.push_back(r->wall_ms);
            evals.push_back(static_cast<double>(r->evaluations));
        }
        s.median_wall_ms = median(walls);
        s.median_evals = median(evals);
        suite.cases.push_back(std::move(s));
    }
    suite.runs = std::move(runs);
    return suite;
}

SuiteReport run_suite(const std::vector<int>& cases, int repeats, std::uint64_t base_seed, bool parallel,
                      const PipelineConfig& base)
{
    if (repeats < 1) {
        throw std::invalid_argument("repeats must be at least 1");
    }
    for (int k : cases) {
        benchmark_case(k);
    }
    const auto total = static_cast<std::ptrdiff_t>(cases.size() * static_cast<std::size_t>(repeats));
    std::vector<CaseReport> runs(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t job = 0; job < total; ++job) {
        const auto c = static_cast<std::size_t>(job / repeats);
        const auto r = static_cast<std::uint64_t>(job % repeats);
        runs[static_cast<std::size_t>(job)] = run_case(cases[c], base_seed + r, base);
    }
    return summarize(std::move(runs));
}

std::vector<int> parse_case_list(const std::string& text)
{
    std::vector<int> out;
    std::size_t pos = 0;
    auto fail = [&] { throw std::invalid_argument("invalid case list '" + text + "'"); };
    auto number = [&]() {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(text.substr(pos), &used);
        } catch (const std::exception&) {
            fail();
        }
        if (used == 0) {
            fail();
        }
        pos += used;
        return v;
    };
    while (pos < text.size()) {
        const int a = number();
        int b = a;
        if (pos < text.size() && text[pos] == '-') {
            ++pos;
            b = number();
        }
        if (b < a) {
            fail();
        }
        for (int k = a; k <= b; ++k) {
            benchmark_case(k);
            if (std::find(out.begin(), out.end(), k) == out.end()) {
                out.push_back(k);
            }
        }
        if (pos < text.size()) {
            if (text[pos] != ',') {
                fail();
            }
            ++pos;
        }
    }
    if (out.empty()) {
        fail();
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace gsr
