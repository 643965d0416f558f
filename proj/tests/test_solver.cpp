#include "bilp/solver.hpp"
#include "bilp/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "support/oracle.hpp"

using namespace bilp;
using testsupport::oracle_bilinear_optimum;
using testsupport::random_program;

namespace {

// x in [-1,1] (split) against 1-D y: response value is exactly |y - 1|
BilinearProgram kink_program() {
    BilinearProgram p;
    p.a1 = DenseMatrix(2, 2, {1.0, 0.0, 0.0, 1.0});
    p.rhs1 = {1.0, 1.0};
    p.sense1 = ConstraintSense::inequality;
    p.r1 = {-1.0, 1.0};
    p.a2 = DenseMatrix(1, 1, {1.0});
    p.b2 = DenseMatrix(1, 1, {1.0}); // y + z = 2, so y in [0, 2]
    p.rhs2 = {2.0};
    p.r2 = {0.0};
    p.s2 = {0.0};
    p.coupling = DenseMatrix(2, 1, {1.0, -1.0});
    return to_normal_form(p);
}

// response function max(y1, y2) over the unit box
BilinearProgram corner_program() {
    BilinearProgram p;
    p.a1 = DenseMatrix(1, 2, {1.0, 1.0});
    p.rhs1 = {1.0};
    p.r1 = {0.0, 0.0};
    p.coupling = DenseMatrix::identity(2);
    p.a2 = DenseMatrix(2, 2, {1.0, 0.0, 0.0, 1.0});
    p.b2 = DenseMatrix::identity(2);
    p.rhs2 = {1.0, 1.0};
    p.r2 = {0.0, 0.0};
    p.s2 = {0.0, 0.0};
    return p;
}

SimplexRegion region_with_responses(const BilinearProgram& p, const DenseMatrix& vertices,
                                    std::vector<ResponsePlane>& planes) {
    SimplexRegion region;
    region.vertices = vertices;
    for (std::size_t v = 0; v < vertices.cols(); ++v) {
        auto [plane, g] = best_response(p, vertices.col(v));
        planes.push_back(plane);
        region.plane_ids.push_back(planes.size() - 1);
        region.vertex_g.push_back(g);
    }
    return region;
}

} // namespace

TEST_CASE("offline_bound", "[solver]") {
    DenseMatrix unit(1, 1, {1.0});
    CHECK(offline_bound(unit, 1, 0.1) == 10);
    CHECK(offline_bound(unit, 2, 0.5) == 2);
    // eps at least the norm times sqrt(n^n): a single point suffices
    CHECK(offline_bound(unit, 2, 2.0) == 1);
    CHECK(offline_bound(DenseMatrix(2, 2), 2, 1e-6) == 1);
    CHECK_THROWS_AS(offline_bound(unit, 1, 0.0), std::invalid_argument);
}

TEST_CASE("initial_simplex contains the feasible set", "[solver]") {
    SplitMix64 rng(13);
    SECTION("random programs") {
        for (int trial = 0; trial < 6; ++trial) {
            BilinearProgram p = random_program(rng, 2, 2 + trial % 2, 1, 1, true);
            SimplexRegion region = initial_simplex(p);
            CHECK(region.vertices.cols() == p.num_y() + 1);
            // sample feasible points via random-objective LPs
            for (int probe = 0; probe < 12; ++probe) {
                dvec cy(p.num_y());
                for (auto& v : cy)
                    v = rng.uniform(-1.0, 1.0);
                LpSolution s = detail::solve_side2(p, cy, dvec(p.num_z(), 0.0));
                REQUIRE(s.status == LpStatus::optimal);
                dvec y(s.x.begin(), s.x.begin() + static_cast<std::ptrdiff_t>(p.num_y()));
                dvec coords = detail::barycentric(region.vertices, y);
                for (double c : coords)
                    CHECK(c >= -1e-9);
            }
        }
    }
    SECTION("single-point Y") {
        BilinearProgram p;
        p.r1 = {1.0};
        p.a1 = DenseMatrix(1, 1, {1.0});
        p.rhs1 = {1.0};
        p.r2 = {0.0};
        p.a2 = DenseMatrix(1, 1, {1.0});
        p.rhs2 = {1.0};
        p.coupling = DenseMatrix(1, 1, {1.0});
        SimplexRegion region = initial_simplex(p);
        dvec coords = detail::barycentric(region.vertices, {1.0});
        for (double c : coords)
            CHECK(c >= -1e-9);
    }
    SECTION("empty Y") {
        BilinearProgram p;
        p.r1 = {1.0};
        p.a1 = DenseMatrix(1, 1, {1.0});
        p.rhs1 = {1.0};
        p.r2 = {0.0};
        p.a2 = DenseMatrix(1, 1, {1.0});
        p.rhs2 = {-1.0};
        p.coupling = DenseMatrix(1, 1, {1.0});
        CHECK_THROWS_AS(initial_simplex(p), YInfeasible);
    }
    SECTION("unbounded Y") {
        BilinearProgram p;
        p.r1 = {1.0};
        p.a1 = DenseMatrix(1, 1, {1.0});
        p.rhs1 = {1.0};
        p.a2 = DenseMatrix(1, 2, {1.0, -1.0});
        p.rhs2 = {0.0};
        p.r2 = {0.0, 0.0};
        p.coupling = DenseMatrix(1, 2);
        CHECK_THROWS_AS(initial_simplex(p), YUnbounded);
    }
}

TEST_CASE("split of the unit triangle at its centroid", "[solver]") {
    SimplexRegion parent;
    parent.vertices = DenseMatrix(2, 3, {0.0, 1.0, 0.0, 0.0, 0.0, 1.0});
    parent.plane_ids = {0, 1, 2};
    parent.vertex_g = {0.0, 0.0, 0.0};
    dvec pivot = {1.0 / 3.0, 1.0 / 3.0};
    auto children = split_region(parent, pivot);
    REQUIRE(children.size() == 3);
    // child k replaces corner k by the pivot
    auto corner = [&](std::size_t child, std::size_t j) {
        return std::make_pair(children[child].vertices(0, j), children[child].vertices(1, j));
    };
    CHECK(corner(0, 0) == std::make_pair(1.0 / 3.0, 1.0 / 3.0));
    CHECK(corner(0, 1) == std::make_pair(1.0, 0.0));
    CHECK(corner(0, 2) == std::make_pair(0.0, 1.0));
    CHECK(corner(1, 0) == std::make_pair(0.0, 0.0));
    CHECK(corner(1, 1) == std::make_pair(1.0 / 3.0, 1.0 / 3.0));
    CHECK(corner(1, 2) == std::make_pair(0.0, 1.0));
    CHECK(corner(2, 0) == std::make_pair(0.0, 0.0));
    CHECK(corner(2, 1) == std::make_pair(1.0, 0.0));
    CHECK(corner(2, 2) == std::make_pair(1.0 / 3.0, 1.0 / 3.0));
}

TEST_CASE("pruning against the incumbent never cuts off the optimum", "[solver]") {
    // the incumbent-based restrictions may only discard regions that cannot
    // improve on it; checked against the exhaustive oracle over many seeds
    SplitMix64 rng(59);
    for (int trial = 0; trial < 100; ++trial) {
        BilinearProgram p = random_program(rng, 2, 2, 1, 0, trial % 2 == 0);
        double reference = oracle_bilinear_optimum(p);
        SolverConfig config;
        config.epsilon0 = 1e-7;
        config.max_iterations = 300;
        config.method = trial % 2 == 0 ? PivotMethod::linear_bound : PivotMethod::cutting_plane;
        config.presolve_restarts = trial % 3;
        config.seed = std::uint64_t(trial);
        SolveResult r = solve(p, config);
        CHECK(r.value + r.bound >= reference - 1e-7);
        CHECK(r.value <= reference + 1e-7);
    }
}

TEST_CASE("split_region tiles the parent", "[solver]") {
    SplitMix64 rng(17);
    for (std::size_t dim = 1; dim <= 4; ++dim) {
        SimplexRegion parent;
        parent.vertices = DenseMatrix(dim, dim + 1);
        for (std::size_t j = 0; j <= dim; ++j)
            for (std::size_t i = 0; i < dim; ++i)
                parent.vertices(i, j) = rng.uniform(-1.0, 1.0);
        // keep the corners affinely independent
        for (std::size_t i = 0; i < dim; ++i)
            parent.vertices(i, i + 1) += 2.0;
        parent.plane_ids.assign(dim + 1, 0);
        parent.vertex_g.assign(dim + 1, 0.0);

        // interior pivot from random barycentric weights
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
        REQUIRE(children.size() == dim + 1);

        int interior_misses = 0;
        for (int probe = 0; probe < 2000; ++probe) {
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
            CHECK(covering >= 1);
            CHECK(strictly_inside <= 1);
            if (strictly_inside == 0) ++interior_misses; // on a child boundary
        }
        // boundaries have measure zero: nearly all samples are interior to one child
        CHECK(interior_misses < 50);
    }
}

TEST_CASE("polyhedron_error", "[solver]") {
    SECTION("identical corner planes mean zero error") {
        SplitMix64 rng(23);
        BilinearProgram p = random_program(rng, 2, 2, 1, 1, true);
        p.coupling = DenseMatrix(2, 2); // response independent of y
        std::vector<ResponsePlane> planes;
        SimplexRegion region = region_with_responses(
            p, DenseMatrix(2, 3, {0.0, 2.0, 0.0, 0.0, 0.0, 2.0}), planes);
        auto [eps, phi] = polyhedron_error(p, planes, region, PivotMethod::basic,
                                           -std::numeric_limits<double>::infinity());
        (void)phi;
        CHECK(eps <= 1e-9);
    }
    SECTION("1-D kink gives the hand-computed gap and pivot") {
        BilinearProgram p = kink_program();
        std::vector<ResponsePlane> planes;
        SimplexRegion region = region_with_responses(p, DenseMatrix(1, 2, {0.0, 2.0}), planes);
        CHECK(region.vertex_g[0] == Catch::Approx(1.0));
        CHECK(region.vertex_g[1] == Catch::Approx(1.0));
        auto [eps, phi] = polyhedron_error(p, planes, region, PivotMethod::basic,
                                           -std::numeric_limits<double>::infinity());
        CHECK(eps == Catch::Approx(1.0).margin(1e-8)); // u = 1 everywhere, l dips to 0 at y = 1
        CHECK(phi[0] == Catch::Approx(1.0).margin(1e-8));
    }
    SECTION("feasibility restriction can only shrink the error") {
        BilinearProgram p = kink_program();
        std::vector<ResponsePlane> planes;
        // region reaching far outside Y = [0, 2]
        SimplexRegion region = region_with_responses(p, DenseMatrix(1, 2, {1.5, 6.0}), planes);
        auto basic = polyhedron_error(p, planes, region, PivotMethod::basic,
                                      -std::numeric_limits<double>::infinity());
        auto feas = polyhedron_error(p, planes, region, PivotMethod::feasible,
                                     -std::numeric_limits<double>::infinity());
        CHECK(feas.first <= basic.first + 1e-9);
        CHECK(feas.second[0] <= 2.0 + 1e-7); // pivot stays feasible
    }
    SECTION("cumulative method dominance on random regions") {
        SplitMix64 rng(29);
        for (int trial = 0; trial < 6; ++trial) {
            BilinearProgram p = random_program(rng, 3, 2, 1, 1, true);
            std::vector<ResponsePlane> planes;
            DenseMatrix vertices(2, 3);
            for (std::size_t j = 0; j < 3; ++j)
                for (std::size_t i = 0; i < 2; ++i)
                    vertices(i, j) = rng.uniform(-0.5, 1.5);
            vertices(0, 1) += 2.0;
            vertices(1, 2) += 2.0;
            SimplexRegion region = region_with_responses(p, vertices, planes);
            double h = *std::max_element(region.vertex_g.begin(), region.vertex_g.end());
            double e_basic = polyhedron_error(p, planes, region, PivotMethod::basic, h).first;
            double e_feas = polyhedron_error(p, planes, region, PivotMethod::feasible, h).first;
            double e_lb = polyhedron_error(p, planes, region, PivotMethod::linear_bound, h).first;
            double e_cut = polyhedron_error(p, planes, region, PivotMethod::cutting_plane, h).first;
            CHECK(e_feas <= e_basic + 1e-9);
            CHECK(e_lb <= e_feas + 1e-9);
            CHECK(e_cut <= e_lb + 1e-9);
        }
    }
}

TEST_CASE("polyhedron_cut", "[solver]") {
    BilinearProgram p = corner_program();
    std::vector<ResponsePlane> planes;
    SimplexRegion region = region_with_responses(
        p, DenseMatrix(2, 3, {0.0, 1.0, 0.0, 0.0, 0.0, 1.0}), planes);

    SECTION("no cut when nothing is dominated") {
        CHECK(!polyhedron_cut(p, region, -1e9).has_value());
    }
    SECTION("no cut when everything is dominated") {
        CHECK(!polyhedron_cut(p, region, 1e9).has_value());
    }
    SECTION("separates the dominated corner") {
        auto cut = polyhedron_cut(p, region, 0.5);
        REQUIRE(cut.has_value());
        auto [sigma, tau] = *cut;
        // the two corners with response value 1 stay feasible
        CHECK(dot(sigma, {1.0, 0.0}) <= tau + 1e-9);
        CHECK(dot(sigma, {0.0, 1.0}) <= tau + 1e-9);
        // the origin (response value 0 < h) is cut away
        CHECK(dot(sigma, {0.0, 0.0}) > tau + 1e-6);
        // the boundary points of the dominated set lie on the plane
        CHECK(dot(sigma, {0.5, 0.0}) == Catch::Approx(tau).margin(1e-6));
        CHECK(dot(sigma, {0.0, 0.5}) == Catch::Approx(tau).margin(1e-6));
    }
}

TEST_CASE("iterative_best_response", "[solver]") {
    SECTION("decoupled program converges to the two LP optima") {
        SplitMix64 rng(31);
        BilinearProgram p = random_program(rng, 2, 2, 1, 1, true);
        p.coupling = DenseMatrix(2, 2);
        SplitMix64 stream(7);
        auto [a, value] = iterative_best_response(p, stream);
        LpSolution s1 = detail::solve_side1(p, p.r1, p.s1);
        LpSolution s2 = detail::solve_side2(p, p.r2, p.s2);
        CHECK(value == Catch::Approx(s1.objective + s2.objective).margin(1e-8));
        CHECK(evaluate_objective(p, a) == Catch::Approx(value));
    }
    SECTION("deterministic under a fixed seed") {
        SplitMix64 rng(33);
        BilinearProgram p = random_program(rng, 3, 3, 1, 1, true);
        SplitMix64 s1(99), s2(99);
        auto r1 = iterative_best_response(p, s1);
        auto r2 = iterative_best_response(p, s2);
        CHECK(r1.second == r2.second);
        CHECK(r1.first.x == r2.first.x);
        CHECK(r1.first.y == r2.first.y);
    }
    SECTION("value is a lower bound on the optimum") {
        SplitMix64 rng(35);
        for (int trial = 0; trial < 8; ++trial) {
            BilinearProgram p = random_program(rng, 2, 2, 1, 1, true);
            double reference = oracle_bilinear_optimum(p);
            SplitMix64 stream(trial);
            auto [a, value] = iterative_best_response(p, stream);
            (void)a;
            CHECK(value <= reference + 1e-7);
        }
    }
}

TEST_CASE("solve certifies the optimum on small programs", "[solver]") {
    SplitMix64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        bool semi = trial % 2 == 0;
        BilinearProgram p = random_program(rng, 2, 2, 1, 1, semi);
        double reference = oracle_bilinear_optimum(p);
        SolverConfig config;
        config.epsilon0 = 1e-6;
        config.max_iterations = 600;
        config.method = trial % 4 < 2 ? PivotMethod::linear_bound : PivotMethod::cutting_plane;
        config.seed = 5 + trial;
        SolveResult r = solve(p, config);
        // anytime soundness: the incumbent is feasible, the bound certified
        CHECK(r.value <= reference + 1e-7);
        CHECK(r.value + r.bound >= reference - 1e-7);
        CHECK(evaluate_objective(p, r.assignment) == Catch::Approx(r.value).margin(1e-7));
        // monotone trace
        for (std::size_t i = 1; i < r.trace.size(); ++i) {
            CHECK(r.trace[i].incumbent_value >= r.trace[i - 1].incumbent_value - 1e-12);
            CHECK(r.trace[i].error_bound <= r.trace[i - 1].error_bound + 1e-12);
            CHECK(r.trace[i].incumbent_value <= r.trace[i].upper_bound + 1e-12);
        }
        // the optimum is certified on these tiny instances
        CHECK(r.bound < 1e-4);
    }
}

TEST_CASE("solve handles degenerate couplings", "[solver]") {
    SplitMix64 rng(43);
    SECTION("zero coupling certifies immediately") {
        BilinearProgram p = random_program(rng, 2, 2, 1, 1, true);
        p.coupling = DenseMatrix(2, 2);
        SolveResult r = solve(p, {});
        CHECK(r.iterations == 0);
        CHECK(r.bound <= 1e-9);
        LpSolution s1 = detail::solve_side1(p, p.r1, p.s1);
        LpSolution s2 = detail::solve_side2(p, p.r2, p.s2);
        CHECK(r.value == Catch::Approx(s1.objective + s2.objective).margin(1e-8));
    }
    SECTION("program without y variables splits into LPs") {
        BilinearProgram p;
        p.r1 = {1.0, 0.5};
        p.a1 = DenseMatrix(1, 2, {1.0, 1.0});
        p.rhs1 = {1.0};
        p.coupling = DenseMatrix(2, 0);
        p.a2 = DenseMatrix(0, 0);
        SolveResult r = solve(p, {});
        CHECK(r.value == Catch::Approx(1.0));
        CHECK(r.bound == 0.0);
    }
}

TEST_CASE("solve is deterministic", "[solver]") {
    SplitMix64 rng(47);
    BilinearProgram p = random_program(rng, 3, 2, 1, 1, false);
    SolverConfig config;
    config.epsilon0 = 1e-6;
    config.max_iterations = 80;
    config.presolve_restarts = 3;
    config.seed = 123;
    SolveResult a = solve(p, config);
    SolveResult b = solve(p, config);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].incumbent_value == b.trace[i].incumbent_value);
        CHECK(a.trace[i].error_bound == b.trace[i].error_bound);
        CHECK(a.trace[i].elapsed_ms == b.trace[i].elapsed_ms);
    }
    CHECK(a.assignment.x == b.assignment.x);
    CHECK(a.assignment.y == b.assignment.y);
    CHECK(a.value == b.value);
}

TEST_CASE("presolve never hurts the incumbent", "[solver]") {
    SplitMix64 rng(53);
    for (int trial = 0; trial < 4; ++trial) {
        BilinearProgram p = random_program(rng, 2, 2, 1, 1, true);
        SolverConfig plain;
        plain.epsilon0 = 1e-6;
        plain.max_iterations = 1; // stop right after initialization
        SolverConfig warm = plain;
        warm.presolve_restarts = 5;
        warm.seed = trial;
        SolveResult cold_run = solve(p, plain);
        SolveResult warm_run = solve(p, warm);
        CHECK(warm_run.trace.front().incumbent_value >=
              cold_run.trace.front().incumbent_value - 1e-9);
    }
}
