#include "gsr/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "gsr/bench.hpp"

namespace gsr {

namespace {

    std::vector<double> parse_bounds(const std::string& text, const char* flag)
    {
        std::vector<double> v;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::size_t used = 0;
            double x = 0.0;
            try {
                x = std::stod(item, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != item.size()) {
                throw std::invalid_argument(std::string("invalid value for ") + flag + ": '" + text + "'");
            }
            v.push_back(x);
        }
        if (v.empty()) {
            throw std::invalid_argument(std::string("empty value for ") + flag);
        }
        return v;
    }

    void add_common(CLI::App& sub, RunConfig& c)
    {
        sub.add_option("--seed", c.seed, "random seed");
        sub.add_option("--tol-detect", c.tol_detect, "relative detection tolerance");
        sub.add_option("--tol-target", c.tol_target, "target validation MSE");
        sub.add_option("--samples-per-var", c.samples_per_var, "training/validation points per variable");
        sub.add_option("--max-nodes", c.max_nodes, "largest skeleton core size");
        sub.add_option("--kmax", c.kmax, "largest repeated-variable cut");
        sub.add_option("--out", c.out, "write JSON here instead of standard output");
    }

    void add_target(CLI::App& sub, RunConfig& c, std::string& lo, std::string& hi)
    {
        sub.add_option("--target", c.target, "target expression over x1..xn")->required();
        sub.add_option("--dims", c.dims, "number of variables (default: highest index used)");
        sub.add_option("--lo", lo, "lower bound, scalar or comma list")->allow_extra_args(false);
        sub.add_option("--hi", hi, "upper bound, scalar or comma list")->allow_extra_args(false);
    }

    Expr parse_target(RunConfig& c)
    {
        if (c.dims < 0) {
            throw std::invalid_argument("--dims must be positive");
        }
        if (c.dims == 0) {
            const Expr e = parse(c.target, 1 << 20);
            c.dims = std::max(1, e.max_variable());
            return e;
        }
        return parse(c.target, c.dims);
    }

    void emit(const Json& j, const RunConfig& c, std::ostream& out)
    {
        const std::string text = j.dump(2) + "\n";
        if (c.out.empty()) {
            out << text;
            return;
        }
        std::ofstream f(c.out);
        if (!f || !(f << text)) {
            throw std::runtime_error("cannot write " + c.out);
        }
    }

    Json error_json(const DetectionError& e)
    {
        return {{"message", e.what()}, {"residual", e.residual()}};
    }

    int cmd_detect(RunConfig& c, std::ostream& out, std::ostream& err)
    {
        const Expr target = parse_target(c);
        const Oracle oracle(target, c.box(c.dims));
        Json j = {{"config", to_json(c)}};
        try {
            auto pc = c.pipeline();
            pc.detect.seed = c.seed;
            j["structure"] = to_json(detect_structure(oracle, pc.detect));
        } catch (const DetectionError& e) {
            err << "detection failed: " << e.what() << "\n";
            j["error"] = error_json(e);
            emit(j, c, out);
            return ExitDetection;
        }
        emit(j, c, out);
        return ExitSuccess;
    }

    int cmd_fit(RunConfig& c, std::ostream& out, std::ostream& err)
    {
        const Expr target = parse_target(c);
        const Oracle oracle(target, c.box(c.dims));
        Json j = {{"config", to_json(c)}};
        PipelineResult r;
        try {
            r = run_pipeline(oracle, c.pipeline());
        } catch (const DetectionError& e) {
            err << "detection failed: " << e.what() << "\n";
            j["error"] = error_json(e);
            emit(j, c, out);
            return ExitDetection;
        } catch (const AssemblyError& e) {
            err << "assembly failed: " << e.what() << "\n";
            j["error"] = {{"message", e.what()}};
            emit(j, c, out);
            return ExitFit;
        }
        j["structure"] = to_json(r.structure);
        Json factors = Json::array();
        for (const auto& f : r.factors) {
            factors.push_back(to_json(f));
        }
        j["factors"] = factors;
        j["model"] = to_json(r.model);
        j["attempts"] = r.attempts;
        j["evaluations"] = r.total_evals;
        emit(j, c, out);
        if (!r.model.success) {
            err << "validation MSE above tolerance\n";
            return ExitFit;
        }
        return ExitSuccess;
    }

    int cmd_bench(RunConfig& c, std::ostream& out, std::ostream& err)
    {
        const auto cases = parse_case_list(c.cases);
        if (c.repeats < 1) {
            throw std::invalid_argument("--repeats must be at least 1");
        }
        const auto suite = run_suite(cases, c.repeats, c.seed, c.parallel, c.pipeline());
        Json j = {{"config", to_json(c)}};
        const Json report = to_json(suite, c.timing);
        for (const auto& [key, value] : report.items()) {
            j[key] = value;
        }
        emit(j, c, out);
        (c.out.empty() ? err : out) << format_table(suite, c.timing);
        bool ok = true;
        for (const auto& s : suite.cases) {
            ok = ok && s.all_match();
        }
        return ok ? ExitSuccess : ExitDetection;
    }

} // namespace

PipelineConfig RunConfig::pipeline() const
{
    PipelineConfig p;
    p.detect.tolerance = tol_detect;
    p.detect.k_max = kmax;
    p.fit.optimizer.target = tol_target;
    p.fit.max_nodes = max_nodes;
    p.assemble.samples_per_var = samples_per_var;
    p.assemble.tolerance = tol_target;
    p.seed = seed;
    return p;
}

DomainBox RunConfig::box(int arity) const
{
    auto pick = [&](const std::vector<double>& v, int i, const char* flag) {
        if (v.size() == 1) {
            return v.front();
        }
        if (v.size() != static_cast<std::size_t>(arity)) {
            throw std::invalid_argument(std::string(flag) + " needs 1 or " + std::to_string(arity) + " values");
        }
        return v[static_cast<std::size_t>(i)];
    };
    std::vector<Interval> iv;
    for (int i = 0; i < arity; ++i) {
        iv.push_back({pick(lo, i, "--lo"), pick(hi, i, "--hi")});
    }
    return DomainBox(std::move(iv));
}

Json to_json(const RunConfig& c)
{
    return {
        {"target", c.target},
        {"dims", c.dims},
        {"lo", c.lo},
        {"hi", c.hi},
        {"seed", c.seed},
        {"tol_detect", c.tol_detect},
        {"tol_target", c.tol_target},
        {"samples_per_var", c.samples_per_var},
        {"max_nodes", c.max_nodes},
        {"kmax", c.kmax},
        {"param_bounds", {-50.0, 50.0}},
        {"out", c.out},
        {"cases", c.cases},
        {"repeats", c.repeats},
        {"parallel", c.parallel},
        {"timing", c.timing},
    };
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app {"Structure detection and symbolic fitting of generalized separable functions", "gsr"};
    app.require_subcommand(1);
    RunConfig c;
    std::string lo = "-3";
    std::string hi = "3";

    auto* detect = app.add_subcommand("detect", "detect repeated variables, blocks and factors; print JSON");
    add_target(*detect, c, lo, hi);
    add_common(*detect, c);

    auto* fit = app.add_subcommand("fit", "detect, fit every factor and assemble the model; print JSON");
    add_target(*fit, c, lo, hi);
    add_common(*fit, c);

    auto* bench = app.add_subcommand("bench", "run the benchmark cases; print a JSON suite report");
    bench->add_option("--cases", c.cases, "case list such as 1-10 or 1,4,6");
    bench->add_option("--repeats", c.repeats, "runs per case; repeat r uses seed + r");
    bench->add_flag("--parallel", c.parallel, "run cases concurrently");
    bench->add_flag("!--no-timing", c.timing, "leave wall times out of the report");
    add_common(*bench, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ExitSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ExitSuccess;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return ExitUsage;
    }

    try {
        c.lo = parse_bounds(lo, "--lo");
        c.hi = parse_bounds(hi, "--hi");
        if (detect->parsed()) {
            return cmd_detect(c, out, err);
        }
        if (fit->parsed()) {
            return cmd_fit(c, out, err);
        }
        return cmd_bench(c, out, err);
    } catch (const ParseError& e) {
        err << e.what() << "\n";
        return ExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return ExitUsage;
    }
}

} // namespace gsr
