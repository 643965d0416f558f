// Acceptance suite: end-to-end checks of the solver's correctness and bound
// guarantees at desk scale. Each criterion prints one PASS/FAIL line; the
// exit code is the number of failures. Criterion 11 drives the CLI binary.

#include "bilp/io.hpp"
#include "bilp/pipeline.hpp"
#include "bilp/rover.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>

#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace bilp;

namespace {

struct Context {
    std::string cli;
    std::string fixtures;
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

std::string fmt(double v) { return format_double(v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

DecMdp random_small_model(SplitMix64& rng) {
    auto make_agent = [&](SplitMix64& r) {
        AgentModel m;
        std::size_t layers = 3 + r.next_below(3); // 3..5 non-terminal states
        for (std::size_t s = 0; s < layers; ++s)
            m.states.push_back("s" + std::to_string(s));
        m.states.push_back("done");
        m.actions = {"a0", "a1"};
        const std::size_t ns = layers + 1;
        m.terminal.assign(ns, false);
        m.terminal[ns - 1] = true;
        m.initial.assign(ns, 0.0);
        m.initial[0] = 1.0;
        m.transition.assign(2, DenseMatrix(ns, ns));
        m.local_reward = DenseMatrix(ns, 2);
        for (std::size_t s = 0; s < layers; ++s)
            for (std::size_t a = 0; a < 2; ++a) {
                m.local_reward(s, a) = r.uniform(-0.2, 1.0);
                std::size_t lo = s + 1;
                std::size_t t1 = lo + r.next_below(ns - lo);
                std::size_t t2 = lo + r.next_below(ns - lo);
                double split = 0.25 + 0.5 * r.next_double();
                m.transition[a](s, t1) += split;
                m.transition[a](s, t2) += 1.0 - split;
            }
        return m;
    };
    DecMdp m;
    m.agent1 = make_agent(rng);
    m.agent2 = make_agent(rng);
    m.joint_reward =
        DenseMatrix(m.agent1.num_states() * 2, m.agent2.num_states() * 2);
    for (std::size_t i = 0; i < m.joint_reward.rows(); ++i)
        for (std::size_t j = 0; j < m.joint_reward.cols(); ++j)
            if (rng.next_double() < 0.15) m.joint_reward(i, j) = rng.uniform(-0.5, 1.5);
    return m;
}

// ---------------------------------------------------------------------------
// 1. solver value matches the enumeration oracle on random planning models
// ---------------------------------------------------------------------------
void criterion_1(const Context&) {
    SplitMix64 root(2026);
    for (int inst = 0; inst < 50; ++inst) {
        SplitMix64 rng = root.split(inst);
        DecMdp m = random_small_model(rng);
        auto [reference, policy] = oracle_enumerate(m);
        (void)policy;
        BilinearProgram p = compile_decmdp(m);
        SolverConfig config;
        config.epsilon0 = 1e-6;
        config.max_iterations = 200;
        config.method = PivotMethod::linear_bound;
        config.seed = std::uint64_t(inst);
        auto t0 = std::chrono::steady_clock::now();
        SolveResult r = solve(p, config);
        double elapsed = seconds_since(t0);
        expect(elapsed < 2.0, "instance " + std::to_string(inst) + " took " + fmt(elapsed) + " s");
        expect(r.value <= reference + 1e-6,
               "instance " + std::to_string(inst) + " exceeds the oracle: " + fmt(r.value) +
                   " vs " + fmt(reference));
        expect(std::abs(r.value - reference) <= 1e-6 + r.bound,
               "instance " + std::to_string(inst) + " off by " + fmt(std::abs(r.value - reference)) +
                   " with bound " + fmt(r.bound));
    }
}

// ---------------------------------------------------------------------------
// 2. tree fixture: compiled rows match the hand-written balance equations
// ---------------------------------------------------------------------------
void criterion_2(const Context& ctx) {
    ProblemDocument doc = read_problem_file(ctx.fixtures + "/example4.json");
    const DecMdp& m = std::get<DecMdp>(doc);
    BilinearProgram p = compile_decmdp(m);

    auto expect_row = [&](const DenseMatrix& mat, std::size_t row, const dvec& want) {
        expect(mat.row(row) == want, "constraint row " + std::to_string(row) + " mismatch");
    };
    expect(p.num_x() == 5 && p.rhs1.size() == 4, "agent-1 layout");
    expect_row(p.a1, 0, {1, 0, 0, 0, 0});
    expect_row(p.a1, 1, {-1, 1, 1, 0, 0});
    expect_row(p.a1, 2, {0, -1, 0, 1, 0});
    expect_row(p.a1, 3, {0, 0, -1, 0, 1});
    expect(p.rhs1 == dvec{1, 0, 0, 0}, "agent-1 right-hand side");

    expect(p.num_y() == 6 && p.rhs2.size() == 5, "agent-2 layout");
    expect_row(p.a2, 0, {1, 1, 0, 0, 0, 0});
    expect_row(p.a2, 1, {-1, 0, 1, 0, 0, 0});
    expect_row(p.a2, 2, {0, 0, -1, 1, 0, 0});
    expect_row(p.a2, 3, {0, -1, 0, 0, 1, 0});
    expect_row(p.a2, 4, {0, 0, 0, -1, 0, 1});
    expect(p.rhs2 == dvec{1, 0, 0, 0, 0}, "agent-2 right-hand side");

    auto [reference, best] = oracle_enumerate(m);
    (void)best;
    SolverConfig config;
    config.epsilon0 = 1e-8;
    SolveResult r = solve(p, config);
    expect(std::abs(r.value - reference) <= 1e-6 + r.bound,
           "solver " + fmt(r.value) + " vs oracle " + fmt(reference));
    expect(r.bound <= 1e-6, "fixture bound not closed: " + fmt(r.bound));
}

// ---------------------------------------------------------------------------
// 3. rover dimensionality: 180 naive, |shared| after reduction, +1 rewrite
// ---------------------------------------------------------------------------
void criterion_3(const Context&) {
    for (std::size_t shared = 1; shared <= 5; ++shared) {
        RoverConfig config;
        config.sites = 6;
        config.horizon = 15;
        for (std::size_t k = 1; k <= shared; ++k)
            config.shared_sites.insert(k);
        config.seed = 100 + shared;
        BilinearProgram p = compile_decmdp(generate_rover(config));
        expect(p.num_y() == 180,
               "naive dimensionality " + std::to_string(p.num_y()) + " instead of 180");
        ReductionResult red = reduce(p, 1e-4);
        expect(red.kept_dims == shared, "shared=" + std::to_string(shared) + " kept " +
                                            std::to_string(red.kept_dims) + " dimensions");
        BilinearProgram sc = to_semi_compact(red.reduced_program);
        expect(sc.num_y() == shared + 1, "semi-compact rewrite changed the dimensionality to " +
                                             std::to_string(sc.num_y()));
    }
}

// ---------------------------------------------------------------------------
// 4. anytime certificate on rover instances
// ---------------------------------------------------------------------------
void criterion_4(const Context&) {
    for (int inst = 0; inst < 20; ++inst) {
        RoverConfig rc;
        rc.sites = 6;
        rc.horizon = 10;
        rc.shared_sites = {1, 2, 3};
        rc.seed = 4000 + std::uint64_t(inst);
        BilinearProgram p = compile_decmdp(generate_rover(rc));
        PipelineConfig pc;
        pc.epsilon0 = 2e-5;
        pc.max_iterations = 200;
        pc.method = PivotMethod::linear_bound;
        pc.reduce_epsilon = 1e-4;
        pc.seed = std::uint64_t(inst);
        auto t0 = std::chrono::steady_clock::now();
        PipelineResult r = run_pipeline(p, pc);
        double elapsed = seconds_since(t0);
        std::string tag = "instance " + std::to_string(inst);
        expect(elapsed < 60.0, tag + " took " + fmt(elapsed) + " s");
        expect(r.iterations <= 200, tag + " exceeded the iteration budget");
        expect(r.bound < 1e-4, tag + " ended with bound " + fmt(r.bound));
        double final_value = r.trace.back().incumbent_value;
        double previous_bound = std::numeric_limits<double>::infinity();
        for (const TraceRow& row : r.trace) {
            expect(row.incumbent_value <= row.upper_bound + 1e-9, tag + " incumbent above the bound");
            expect(row.incumbent_value + row.error_bound >= final_value - 1e-9,
                   tag + " anytime certificate broken");
            expect(row.error_bound <= previous_bound + 1e-12, tag + " bound column increased");
            previous_bound = row.error_bound;
        }
    }
}

// ---------------------------------------------------------------------------
// 5. convexity of the response function, and its failure before the rewrite
// ---------------------------------------------------------------------------
void criterion_5(const Context& ctx) {
    SplitMix64 rng(515);
    for (int trial = 0; trial < 20; ++trial) {
        BilinearProgram p = testsupport::random_program(rng, 2 + trial % 3, 2, 1, 1, true);
        for (int probe = 0; probe < 50; ++probe) {
            dvec y1(p.num_y()), y2(p.num_y()), mid(p.num_y());
            for (std::size_t j = 0; j < p.num_y(); ++j) {
                y1[j] = rng.uniform(-1.0, 1.0);
                y2[j] = rng.uniform(-1.0, 1.0);
            }
            double theta = rng.next_double();
            for (std::size_t j = 0; j < p.num_y(); ++j)
                mid[j] = theta * y1[j] + (1.0 - theta) * y2[j];
            double lhs = best_response(p, mid).second;
            double rhs = theta * best_response(p, y1).second +
                         (1.0 - theta) * best_response(p, y2).second;
            expect(lhs <= rhs + 1e-7, "midpoint violation " + fmt(lhs - rhs));
        }
    }

    ProblemDocument doc = read_problem_file(ctx.fixtures + "/example23.json");
    BilinearProgram witness = to_normal_form(std::get<BilinearProgram>(doc));
    auto analytic = [](double y) { return std::abs(y - 1.0) - 2.0 * std::max(0.0, y - 2.0); };
    for (double y : {1.0, 2.0, 3.0}) {
        double g = exact_response_value(witness, {y});
        expect(std::abs(g - analytic(y)) <= 1e-9,
               "witness response at " + fmt(y) + " is " + fmt(g));
    }
    double margin = exact_response_value(witness, {2.0}) -
                    0.5 * (exact_response_value(witness, {1.0}) +
                           exact_response_value(witness, {3.0}));
    expect(std::abs(margin - 1.0) <= 1e-9, "witness margin " + fmt(margin));
}

// ---------------------------------------------------------------------------
// 6. refinement tiles its region: full coverage, no interior overlap
// ---------------------------------------------------------------------------
void criterion_6(const Context&) {
    SplitMix64 rng(616);
    for (std::size_t dim = 1; dim <= 4; ++dim) {
        SimplexRegion parent;
        parent.vertices = DenseMatrix(dim, dim + 1);
        for (std::size_t j = 0; j <= dim; ++j)
            for (std::size_t i = 0; i < dim; ++i)
                parent.vertices(i, j) = rng.uniform(-1.0, 1.0);
        for (std::size_t i = 0; i < dim; ++i)
            parent.vertices(i, i + 1) += 2.0;
        parent.plane_ids.assign(dim + 1, 0);
        parent.vertex_g.assign(dim + 1, 0.0);

        dvec weights(dim + 1);
        double total = 0.0;
        for (auto& w : weights) {
            w = 0.05 + rng.next_double();
            total += w;
        }
        dvec pivot(dim, 0.0);
        for (std::size_t j = 0; j <= dim; ++j)
            for (std::size_t i = 0; i < dim; ++i)
                pivot[i] += parent.vertices(i, j) * weights[j] / total;
        auto children = split_region(parent, pivot);
        expect(children.size() == dim + 1, "child count");

        for (int probe = 0; probe < 10000; ++probe) {
            dvec bc(dim + 1);
            double s = 0.0;
            for (auto& b : bc) {
                b = -std::log(1.0 - rng.next_double());
                s += b;
            }
            dvec point(dim, 0.0);
            for (std::size_t j = 0; j <= dim; ++j)
                for (std::size_t i = 0; i < dim; ++i)
                    point[i] += parent.vertices(i, j) * bc[j] / s;
            std::size_t covering = 0, strictly_inside = 0;
            for (const auto& child : children) {
                dvec c = detail::barycentric(child.vertices, point);
                double lowest = *std::min_element(c.begin(), c.end());
                if (lowest >= -1e-9) ++covering;
                if (lowest > 1e-7) ++strictly_inside;
            }
            expect(covering >= 1, "uncovered point in dimension " + std::to_string(dim));
            expect(strictly_inside <= 1, "overlapping children in dimension " + std::to_string(dim));
        }
    }
}

// ---------------------------------------------------------------------------
// 7. reduction error bound against the exhaustive oracle
// ---------------------------------------------------------------------------
void criterion_7(const Context&) {
    SplitMix64 rng(717);
    for (int trial = 0; trial < 30; ++trial) {
        BilinearProgram p = testsupport::random_program(rng, 3, 3, 1, 1, true);
        // plant couplings with a spread of singular values
        p.coupling = DenseMatrix(3, 3);
        for (int rank = 0; rank < 3; ++rank) {
            dvec u(3), v(3);
            for (auto& e : u)
                e = rng.uniform(-1.0, 1.0);
            for (auto& e : v)
                e = rng.uniform(-1.0, 1.0);
            double w = std::pow(0.3, double(rank)) * rng.uniform(0.3, 1.0);
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j)
                    p.coupling(i, j) += w * u[i] * v[j];
        }
        double eps = std::pow(10.0, rng.uniform(-3.0, 0.3));
        double full = testsupport::oracle_bilinear_optimum(p);
        ReductionResult red = reduce(p, eps, ReductionScaling::automatic);
        double reduced = testsupport::oracle_bilinear_optimum(red.reduced_program);
        expect(std::abs(full - reduced) <= red.error_bound + 1e-7,
               "trial " + std::to_string(trial) + ": gap " + fmt(std::abs(full - reduced)) +
                   " exceeds bound " + fmt(red.error_bound));
    }
}

// ---------------------------------------------------------------------------
// 8. objective projection: exact LP shift, zero-sum decoupling
// ---------------------------------------------------------------------------
void criterion_8(const Context& ctx) {
    SplitMix64 rng(818);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 4 + rng.next_below(3);
        DenseMatrix a(2, n);
        dvec x0(n);
        for (auto& v : x0)
            v = rng.uniform(0.1, 1.0);
        for (std::size_t j = 0; j < n; ++j) {
            a(0, j) = 1.0;
            a(1, j) = rng.uniform(-1.0, 1.0);
        }
        dvec b = matvec(a, x0);
        dvec c(n);
        for (auto& v : c)
            v = rng.uniform(-1.0, 1.0);
        LpProjection proj = project_lp_objective(c, a, b);
        LpProblem lp;
        lp.c = c;
        lp.a = a;
        lp.b = b;
        LpProblem projected = lp;
        projected.c = proj.projected_c;
        LpSolution s1 = solve_lp(lp);
        LpSolution s2 = solve_lp(projected);
        expect(s1.status == LpStatus::optimal && s2.status == LpStatus::optimal, "LP not optimal");
        expect(std::abs((s1.objective - s2.objective) - proj.shift) <= 1e-7,
               "shift mismatch " + fmt(s1.objective - s2.objective) + " vs " + fmt(proj.shift));
        expect(linf_diff(s1.x, s2.x) <= 1e-7, "projected argmax moved");
    }

    ProblemDocument doc = read_problem_file(ctx.fixtures + "/matching_pennies.json");
    const GameSpec& g = std::get<GameSpec>(doc);
    BilinearProgram p = compile_game(g);
    PipelineConfig pc;
    pc.project = true; // skipped for programs with uncoupled variables
    pc.reduce_epsilon = 1e-4;
    PipelineResult r = run_pipeline(p, pc);
    expect(r.kept_dims == 0, "zero-sum game kept " + std::to_string(r.kept_dims) + " dimensions");
    expect(std::abs(r.value) <= 1e-7, "equilibrium residual " + fmt(r.value));
    auto [v1, v2] = game_values(g, r.assignment.x, r.assignment.y);
    expect(std::abs(v1) <= 1e-7 && std::abs(v2) <= 1e-7,
           "minimax value " + fmt(v1) + ", " + fmt(v2));
    for (double coordinate : {r.assignment.x[0], r.assignment.x[1], r.assignment.y[0],
                              r.assignment.y[1]})
        expect(std::abs(coordinate - 0.5) <= 1e-7, "minimax strategy " + fmt(coordinate));
}

// ---------------------------------------------------------------------------
// 9. pivot-method dominance in iterations-to-threshold
// ---------------------------------------------------------------------------
void criterion_9(const Context&) {
    int chain_holds = 0;
    for (int inst = 0; inst < 10; ++inst) {
        // five shared sites: the regime where the pruning methods separate
        RoverConfig rc;
        rc.sites = 6;
        rc.horizon = 10;
        rc.shared_sites = {1, 2, 3, 4, 5};
        rc.seed = 9000 + std::uint64_t(inst);
        BilinearProgram p = compile_decmdp(generate_rover(rc));
        auto iterations_to_threshold = [&](PivotMethod method) -> std::size_t {
            PipelineConfig pc;
            pc.epsilon0 = 1e-3;
            pc.max_iterations = 400;
            pc.method = method;
            pc.reduce_epsilon = 1e-4;
            pc.seed = 42;
            PipelineResult r = run_pipeline(p, pc);
            return r.bound < 1e-3 ? r.iterations : 401;
        };
        std::size_t cut = iterations_to_threshold(PivotMethod::cutting_plane);
        std::size_t lb = iterations_to_threshold(PivotMethod::linear_bound);
        std::size_t feas = iterations_to_threshold(PivotMethod::feasible);
        std::size_t basic = iterations_to_threshold(PivotMethod::basic);
        if (cut <= lb && lb <= feas && feas <= basic) ++chain_holds;
    }
    expect(chain_holds >= 8, "dominance chain held on only " + std::to_string(chain_holds) +
                                 "/10 instances");
}

// ---------------------------------------------------------------------------
// 10. offline grid bound
// ---------------------------------------------------------------------------
void criterion_10(const Context&) {
    DenseMatrix unit(1, 1, {1.0});
    expect(offline_bound(unit, 1, 0.1) == 10, "grid size for the 1-D case");
    expect(offline_bound(unit, 2, 0.5) == 2, "grid size for the 2-D case");

    // 1-D program with diameter-one X: evaluating the response on the k-point
    // grid must leave at most ‖C‖ δ of error, δ the covering radius
    SplitMix64 rng(1010);
    for (int trial = 0; trial < 5; ++trial) {
        BilinearProgram p;
        double side = 1.0 / std::sqrt(2.0);
        p.a1 = DenseMatrix(1, 2, {1.0, 1.0});
        p.rhs1 = {side};
        p.r1 = {rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)};
        p.a2 = DenseMatrix(1, 1, {1.0});
        p.b2 = DenseMatrix(1, 1, {1.0});
        p.rhs2 = {1.0};
        p.r2 = {0.0};
        p.s2 = {0.0};
        double angle = rng.uniform(0.0, 6.28318530717958647692);
        p.coupling = DenseMatrix(2, 1, {std::cos(angle), std::sin(angle)}); // spectral norm 1
        double norm = spectral_norm(p.coupling);
        expect(std::abs(norm - 1.0) <= 1e-9, "coupling normalization");

        std::size_t k = offline_bound(p.coupling, 1, 0.1);
        expect(k == 10, "grid resolution " + std::to_string(k));
        std::vector<ResponsePlane> planes;
        for (std::size_t i = 0; i < k; ++i) {
            dvec y = {double(i) / double(k - 1)};
            planes.push_back(best_response(p, y).first);
        }
        double delta = 0.5 / double(k - 1); // covering radius of the grid on [0,1]
        double worst = 0.0;
        for (int probe = 0; probe <= 2000; ++probe) {
            dvec y = {double(probe) / 2000.0};
            double g = best_response(p, y).second;
            double approx = -std::numeric_limits<double>::infinity();
            for (const ResponsePlane& plane : planes)
                approx = std::max(approx, plane.value(y));
            worst = std::max(worst, g - approx);
        }
        expect(worst <= norm * delta + 1e-9,
               "grid error " + fmt(worst) + " above " + fmt(norm * delta));
    }
}

// ---------------------------------------------------------------------------
// 11. byte-identical outputs under equal flags and seed
// ---------------------------------------------------------------------------
void criterion_11(const Context& ctx) {
    expect(!ctx.cli.empty(), "cli path not provided");
    namespace fs = std::filesystem;
    fs::path scratch = fs::path("acceptance_scratch");
    fs::remove_all(scratch);

    auto slurp = [](const fs::path& path) {
        std::ifstream in(path, std::ios::binary);
        expect(in.good(), "missing output file " + path.string());
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    auto run = [&](const fs::path& dir, const std::string& args, const std::string& stdout_name) {
        fs::create_directories(dir);
        std::string command = ctx.cli + " " + args + " > " + (dir / stdout_name).string();
        int rc = std::system(command.c_str());
        expect(rc == 0, "command failed: " + command);
    };

    struct Step {
        std::string args;
        std::vector<std::string> outputs;
    };
    std::string fx = ctx.fixtures;
    std::vector<Step> steps = {
        {"solve --input " + fx + "/example4.json --epsilon 1e-6 --max-iter 100 --pivot "
         "cutting-plane --presolve 3 --seed 17 --output {dir}/solution.json --trace {dir}/trace.csv",
         {"solution.json", "trace.csv", "stdout.txt"}},
        {"solve --input " + fx + "/coordination.json --seed 5 --output {dir}/game.json",
         {"game.json", "stdout.txt"}},
        {"reduce --input " + fx + "/example4.json --output {dir}/reduced.json",
         {"reduced.json", "stdout.txt"}},
        {"oracle --input " + fx + "/example4.json --output {dir}/oracle.json",
         {"oracle.json", "stdout.txt"}},
        {"benchmark rover --count 3 --sites 4 --horizon 6 --shared 2 --seed 9 --solve "
         "--output {dir}/bench",
         {"bench/rover_000.json", "bench/rover_001.json", "bench/rover_002.json",
          "bench/summary.csv", "stdout.txt"}},
    };

    for (std::size_t s = 0; s < steps.size(); ++s) {
        fs::path dir_a = scratch / ("step" + std::to_string(s) + "_a");
        fs::path dir_b = scratch / ("step" + std::to_string(s) + "_b");
        for (const fs::path& dir : {dir_a, dir_b}) {
            std::string args = steps[s].args;
            std::string marker = "{dir}";
            for (std::size_t at = args.find(marker); at != std::string::npos;
                 at = args.find(marker))
                args.replace(at, marker.size(), dir.string());
            run(dir, args, "stdout.txt");
        }
        for (const std::string& name : steps[s].outputs)
            expect(slurp(dir_a / name) == slurp(dir_b / name),
                   "step " + std::to_string(s) + ": output '" + name + "' differs between runs");
    }
    fs::remove_all(scratch);
}

} // namespace

int main(int argc, char** argv) {
    Context ctx;
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--cli" && i + 1 < argc)
            ctx.cli = argv[++i];
        else if (arg == "--fixtures" && i + 1 < argc)
            ctx.fixtures = argv[++i];
        else
            selected.push_back(std::atoi(arg.c_str()));
    }
    if (ctx.fixtures.empty()) ctx.fixtures = "tests/fixtures";
    if (selected.empty())
        for (int c = 1; c <= 11; ++c)
            selected.push_back(c);

    using CriterionFn = std::function<void(const Context&)>;
    struct Entry {
        const char* label;
        CriterionFn fn;
    };
    const Entry criteria[] = {
        {"oracle equivalence on random planning models", criterion_1},
        {"tree fixture constraints and optimum", criterion_2},
        {"rover dimensionality through the reduction chain", criterion_3},
        {"anytime certificate on rover instances", criterion_4},
        {"response-function convexity and its witness", criterion_5},
        {"triangulation coverage without overlap", criterion_6},
        {"reduction error bound", criterion_7},
        {"objective projection and zero-sum decoupling", criterion_8},
        {"pivot-method dominance", criterion_9},
        {"offline grid bound", criterion_10},
        {"deterministic outputs", criterion_11},
    };

    int failures = 0;
    for (int c : selected) {
        if (c < 1 || c > 11) {
            std::cout << "FAIL " << c << " unknown criterion\n";
            ++failures;
            continue;
        }
        const Entry& entry = criteria[c - 1];
        try {
            entry.fn(ctx);
            std::cout << "PASS " << c << " " << entry.label << "\n";
        } catch (const std::exception& e) {
            std::cout << "FAIL " << c << " " << entry.label << ": " << e.what() << "\n";
            ++failures;
        }
        std::cout.flush();
    }
    return failures;
}
