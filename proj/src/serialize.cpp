#include "gsr/serialize.hpp"

#include <cmath>
#include <cstdio>

namespace gsr {

namespace {

    Json real(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

    Json sets(const std::vector<VarSet>& groups)
    {
        Json a = Json::array();
        for (const auto& g : groups) {
            a.push_back(g);
        }
        return a;
    }

    Json reals(const std::vector<double>& v)
    {
        Json a = Json::array();
        for (double x : v) {
            a.push_back(real(x));
        }
        return a;
    }

} // namespace

Json to_json(const GsStructure& s)
{
    Json blocks = Json::array();
    for (const auto& b : s.blocks) {
        blocks.push_back({
            {"vars", b.vars},
            {"repeated", b.repeated},
            {"psi_factors", sets(b.psi_factors)},
            {"omega_factors", sets(b.omega_factors)},
        });
    }
    return {
        {"repeated", s.repeated},
        {"blocks", blocks},
        {"inactive", s.inactive},
        {"factors", s.factor_count()},
        {"anchor", reals(s.anchor)},
        {"probes_used", s.probes_used},
    };
}

Json to_json(const FactorModel& m)
{
    return {
        {"vars", m.vars},
        {"role", m.role == FactorRole::Psi ? "psi" : "omega"},
        {"block", m.block + 1},
        {"skeleton", m.skeleton.name()},
        {"theta", reals(m.theta)},
        {"coefficients", reals(m.coefficients)},
        {"expr", to_string(m.expr)},
        {"train_mse", real(m.train_mse)},
        {"normalized_mse", real(m.normalized_mse)},
        {"below_tolerance", m.below_tolerance},
        {"skeletons_tried", m.skeletons_tried},
        {"evaluations", m.evaluations},
    };
}

Json to_json(const AssembledModel& m)
{
    Json terms = Json::array();
    for (std::size_t t = 0; t < m.terms.size(); ++t) {
        Json subset = Json::array();
        for (auto k : m.terms[t].factor_subset) {
            subset.push_back(k + 1);
        }
        terms.push_back({
            {"block", m.terms[t].block + 1},
            {"factor_subset", subset},
            {"expr", to_string(m.terms[t].expr)},
            {"coeff", real(m.coefficients[t])},
        });
    }
    return {
        {"c0", real(m.c0)},
        {"terms", terms},
        {"expr", to_string(m.expr)},
        {"train_mse", real(m.train_mse)},
        {"val_mse", real(m.val_mse)},
        {"success", m.success},
        {"rank_deficient", m.rank_deficient},
        {"train_samples", m.train_samples},
        {"val_samples", m.val_samples},
        {"dropped_rows", m.dropped_rows},
    };
}

Json to_json(const CaseReport& r, bool timing)
{
    Json j = {
        {"no", r.number},
        {"seed", r.seed},
        {"completed", r.completed},
        {"error", r.error},
        {"structure", r.detected ? to_json(r.structure) : Json(nullptr)},
        {"match", {{"repeated", r.match_repeated}, {"blocks", r.match_blocks}, {"factors", r.match_factors}}},
        {"val_mse", r.completed ? real(r.val_mse) : Json(nullptr)},
        {"success", r.success},
        {"attempts", r.attempts},
        {"samples", r.samples},
        {"evaluations", r.evaluations},
        {"detection_evals", r.detection_evals},
        {"model", r.model},
    };
    if (timing) {
        j["wall_ms"] = r.wall_ms;
    }
    return j;
}

Json to_json(const SuiteReport& s, bool timing)
{
    Json cases = Json::array();
    for (const auto& c : s.cases) {
        Json j = {
            {"no", c.number},
            {"dim", c.dim},
            {"samples", c.samples},
            {"repeated", c.repeated},
            {"blocks", c.blocks},
            {"factors", c.factors},
            {"match", {{"repeated", c.match_repeated == c.runs}, {"blocks", c.match_blocks == c.runs},
                       {"factors", c.match_factors == c.runs}}},
            {"match_counts", {{"repeated", c.match_repeated}, {"blocks", c.match_blocks}, {"factors", c.match_factors},
                              {"all", c.structure_matches}}},
            {"runs", c.runs},
            {"mse_max", real(c.mse_max)},
            {"success_rate", c.success_rate()},
        };
        if (timing) {
            j["median_wall_ms"] = c.median_wall_ms;
        }
        j["median_evals"] = c.median_evals;
        cases.push_back(std::move(j));
    }
    Json runs = Json::array();
    for (const auto& r : s.runs) {
        runs.push_back(to_json(r, timing));
    }
    return {{"cases", cases}, {"runs", runs}};
}

std::string format_table(const SuiteReport& s, bool timing)
{
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-4s %-4s %-8s %-12s %-6s %-7s %-9s %-11s %-8s%s\n", "case", "dim", "samples",
                  "repeated", "blocks", "factors", "match", "mse_max", "success", timing ? " median_ms" : "");
    out += line;
    for (const auto& c : s.cases) {
        std::string rep = "{";
        for (std::size_t k = 0; k < c.repeated.size(); ++k) {
            rep += (k ? ",x" : "x") + std::to_string(c.repeated[k]);
        }
        rep += "}";
        char match[32];
        std::snprintf(match, sizeof match, "%d/%d", c.structure_matches, c.runs);
        char success[32];
        std::snprintf(success, sizeof success, "%d/%d", c.successes, c.runs);
        std::snprintf(line, sizeof line, "%-4d %-4d %-8zu %-12s %-6zu %-7zu %-9s %-11.3g %-8s", c.number, c.dim,
                      c.samples, rep.c_str(), c.blocks, c.factors, match, c.mse_max, success);
        out += line;
        if (timing) {
            std::snprintf(line, sizeof line, " %.0f", c.median_wall_ms);
            out += line;
        }
        out += "\n";
    }
    return out;
}

} // namespace gsr
