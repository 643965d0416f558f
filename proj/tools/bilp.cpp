// bilp: solve, reduce and benchmark separable bilinear programs and the
// planning/game models that compile into them.

#include "bilp/io.hpp"
#include "bilp/pipeline.hpp"
#include "bilp/rover.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace {

using namespace bilp;

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitTooLarge = 3;
constexpr int kExitCheckFailed = 4;

struct CommonFlags {
    std::string input, output, trace;
    double epsilon = 1e-4;
    std::size_t max_iter = 200;
    std::string pivot = "linear-bound";
    std::size_t presolve = 0;
    double reduce_epsilon = 1e-4;
    bool project = false;
    std::uint64_t seed = 0;
};

PivotMethod parse_pivot(const std::string& name) {
    if (name == "basic") return PivotMethod::basic;
    if (name == "feasible") return PivotMethod::feasible;
    if (name == "linear-bound") return PivotMethod::linear_bound;
    if (name == "cutting-plane") return PivotMethod::cutting_plane;
    throw CLI::ValidationError("--pivot", "unknown pivot method '" + name + "'");
}

PipelineConfig pipeline_config(const CommonFlags& flags) {
    PipelineConfig config;
    config.epsilon0 = flags.epsilon;
    config.max_iterations = flags.max_iter;
    config.method = parse_pivot(flags.pivot);
    config.presolve = flags.presolve;
    config.reduce_epsilon = flags.reduce_epsilon;
    config.project = flags.project;
    config.seed = flags.seed;
    return config;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

nlohmann::json assignment_to_json(const Assignment& a) {
    return nlohmann::json{{"w", a.w}, {"x", a.x}, {"y", a.y}, {"z", a.z}};
}

int cmd_solve(const CommonFlags& flags) {
    ProblemDocument doc = read_problem_file(flags.input);

    BilinearProgram program;
    const DecMdp* model = nullptr;
    if (const DecMdp* m = std::get_if<DecMdp>(&doc)) {
        program = compile_decmdp(*m);
        model = m;
    } else if (const GameSpec* g = std::get_if<GameSpec>(&doc)) {
        program = compile_game(*g);
    } else {
        program = std::get<BilinearProgram>(doc);
    }

    PipelineResult result = run_pipeline(program, pipeline_config(flags));

    nlohmann::json j;
    j["kind"] = "solution";
    j["value"] = result.value;
    j["bound"] = result.bound;
    j["upper_bound"] = result.upper_bound;
    j["iterations"] = result.iterations;
    j["kept_dims"] = result.kept_dims;
    j["reduction_error"] = result.reduction_error;
    j["projected"] = result.projected;
    j["assignment"] = assignment_to_json(result.assignment);
    if (model) {
        Policy policy = extract_policy(*model, result.assignment);
        j["policy"] = {{"agent1", policy.action1}, {"agent2", policy.action2}};
    }
    emit(flags.output, j.dump(2) + "\n");
    if (!flags.trace.empty()) emit(flags.trace, trace_to_csv(result.trace));
    return kExitOk;
}

int cmd_reduce(const CommonFlags& flags) {
    ProblemDocument doc = read_problem_file(flags.input);
    BilinearProgram program;
    if (const DecMdp* m = std::get_if<DecMdp>(&doc))
        program = compile_decmdp(*m);
    else if (const GameSpec* g = std::get_if<GameSpec>(&doc))
        program = compile_game(*g);
    else
        program = std::get<BilinearProgram>(doc);

    bool projected = false;
    if (flags.project && program.num_w() == 0 && program.num_z() == 0 &&
        program.is_equality_form()) {
        program = project_objective(program).program;
        projected = true;
    }
    ReductionResult red = reduce(program, flags.reduce_epsilon, ReductionScaling::automatic);
    if (!flags.output.empty()) write_problem_file(flags.output, red.reduced_program);
    nlohmann::json report;
    report["kind"] = "reduction_report";
    report["kept_dims"] = red.kept_dims;
    report["error_bound"] = red.error_bound;
    report["projected"] = projected;
    std::cout << report.dump(2) << "\n";
    return kExitOk;
}

int cmd_oracle(const CommonFlags& flags, const std::string& check_path) {
    ProblemDocument doc = read_problem_file(flags.input);
    const DecMdp* model = std::get_if<DecMdp>(&doc);
    if (!model) throw ParseError("oracle: input must be a decmdp document");

    auto [value, policy] = oracle_enumerate(*model);
    nlohmann::json j;
    j["kind"] = "oracle";
    j["value"] = value;
    j["policy"] = {{"agent1", policy.action1}, {"agent2", policy.action2}};
    emit(flags.output, j.dump(2) + "\n");

    if (!check_path.empty()) {
        std::ifstream in(check_path, std::ios::binary);
        if (!in) throw ParseError("cannot open " + check_path);
        nlohmann::json solution = nlohmann::json::parse(in, nullptr, false);
        if (solution.is_discarded() || !solution.contains("value") || !solution.contains("bound"))
            throw ParseError("check: not a solution document");
        double solver_value = solution["value"].get<double>();
        double solver_bound = solution["bound"].get<double>();
        if (std::abs(value - solver_value) > 1e-6 + solver_bound) {
            std::cerr << "check failed: oracle " << format_double(value) << " vs solver "
                      << format_double(solver_value) << " with bound "
                      << format_double(solver_bound) << "\n";
            return kExitCheckFailed;
        }
    }
    return kExitOk;
}

int cmd_benchmark(const CommonFlags& flags, const std::string& family, std::size_t count,
                  std::size_t sites, std::size_t horizon, std::size_t shared, bool solve_them) {
    if (family != "rover") throw CLI::ValidationError("benchmark", "unknown family '" + family + "'");
    if (shared > sites) throw CLI::ValidationError("--shared", "more shared sites than sites");
    std::filesystem::path dir = flags.output.empty() ? "." : flags.output;
    std::filesystem::create_directories(dir);

    std::string summary = "instance,value,bound,iterations,ms\n";
    SplitMix64 root(flags.seed);
    for (std::size_t i = 0; i < count; ++i) {
        RoverConfig config;
        config.sites = sites;
        config.horizon = horizon;
        for (std::size_t k = 1; k <= shared; ++k)
            config.shared_sites.insert(k);
        config.seed = root.split(i).next_u64();
        DecMdp model = generate_rover(config);

        char name[32];
        std::snprintf(name, sizeof(name), "rover_%03zu.json", i);
        std::filesystem::path file = dir / name;
        write_problem_file(file.string(), model);

        if (solve_them) {
            PipelineConfig pc = pipeline_config(flags);
            pc.seed = flags.seed;
            PipelineResult r = run_pipeline(compile_decmdp(model), pc);
            std::uint64_t work = r.trace.empty() ? 0 : r.trace.back().elapsed_ms;
            summary += std::string(name) + "," + format_double(r.value) + "," +
                       format_double(r.bound) + "," + std::to_string(r.iterations) + "," +
                       std::to_string(work) + "\n";
        }
    }
    if (solve_them) emit((dir / "summary.csv").string(), summary);
    return kExitOk;
}

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_input) {
    if (with_input)
        cmd->add_option("--input", flags.input, "problem document (JSON)")->required();
    cmd->add_option("--output", flags.output, "output path (stdout when omitted)");
    cmd->add_option("--epsilon", flags.epsilon, "target certified gap")->capture_default_str();
    cmd->add_option("--max-iter", flags.max_iter, "iteration budget")->capture_default_str();
    cmd->add_option("--pivot", flags.pivot,
                    "pivot method: basic|feasible|linear-bound|cutting-plane")
        ->capture_default_str();
    cmd->add_option("--presolve", flags.presolve, "alternating best-response restarts")
        ->capture_default_str();
    cmd->add_option("--reduce-epsilon", flags.reduce_epsilon,
                    "dimensionality reduction threshold (0 keeps all nonzero directions)")
        ->capture_default_str();
    cmd->add_flag("--project", flags.project, "project the objective when no w/z variables");
    cmd->add_option("--seed", flags.seed, "seed for all randomness")->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"separable bilinear program solver"};
    app.require_subcommand(1);

    CommonFlags solve_flags;
    CLI::App* solve_cmd = app.add_subcommand("solve", "solve a problem document");
    add_common(solve_cmd, solve_flags, true);
    solve_cmd->add_option("--trace", solve_flags.trace, "write per-iteration CSV trace");

    CommonFlags reduce_flags;
    CLI::App* reduce_cmd = app.add_subcommand("reduce", "reduce coupling dimensionality");
    add_common(reduce_cmd, reduce_flags, true);

    CommonFlags oracle_flags;
    std::string check_path;
    CLI::App* oracle_cmd = app.add_subcommand("oracle", "exhaustive policy enumeration");
    oracle_cmd->add_option("--input", oracle_flags.input, "decmdp document")->required();
    oracle_cmd->add_option("--output", oracle_flags.output, "output path (stdout when omitted)");
    oracle_cmd->add_option("--check", check_path, "solution document to verify");

    CommonFlags bench_flags;
    std::string family;
    std::size_t count = 10, sites = 6, horizon = 15, shared = 5;
    bool solve_them = false;
    CLI::App* bench_cmd = app.add_subcommand("benchmark", "generate (and solve) instances");
    bench_cmd->add_option("family", family, "instance family (rover)")->required();
    add_common(bench_cmd, bench_flags, false);
    bench_cmd->add_option("--count", count, "number of instances")->capture_default_str();
    bench_cmd->add_option("--sites", sites, "sites per rover")->capture_default_str();
    bench_cmd->add_option("--horizon", horizon, "time budget")->capture_default_str();
    bench_cmd->add_option("--shared", shared, "number of shared sites")->capture_default_str();
    bench_cmd->add_flag("--solve", solve_them, "solve each instance and write summary.csv");

    try {
        app.parse(argc, argv);
        if (solve_cmd->parsed()) return cmd_solve(solve_flags);
        if (reduce_cmd->parsed()) return cmd_reduce(reduce_flags);
        if (oracle_cmd->parsed()) return cmd_oracle(oracle_flags, check_path);
        if (bench_cmd->parsed())
            return cmd_benchmark(bench_flags, family, count, sites, horizon, shared, solve_them);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitParse;
    } catch (const bilp::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const bilp::TooLarge& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTooLarge;
    } catch (const bilp::XInfeasible& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const bilp::YInfeasible& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const bilp::XUnbounded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const bilp::YUnbounded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const bilp::InvalidModel& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return kExitOk;
}
