#pragma once

#include "bilp/bilinear.hpp"
#include "bilp/linalg.hpp"
#include "bilp/rng.hpp"

#include <optional>
#include <queue>

namespace bilp {

/**
 * Pivot-selection variants for the region error computation. Levels are
 * cumulative: each adds constraints on top of the previous one, so the
 * computed error bounds can only shrink along the list.
 *
 *   basic          max of u - l over the region simplex
 *   feasible       additionally restricts the pivot to the feasible set Y
 *   linear_bound   additionally requires u(y) >= h (h = incumbent value)
 *   cutting_plane  additionally applies a cut separating the dominated part
 */
enum class PivotMethod { basic, feasible, linear_bound, cutting_plane };

struct SolverConfig {
    double epsilon0 = 1e-4;
    std::size_t max_iterations = 200;
    PivotMethod method = PivotMethod::linear_bound;
    std::size_t presolve_restarts = 0;
    std::uint64_t seed = 0;
};

struct TraceRow {
    std::size_t iteration = 0;
    double incumbent_value = 0.0;
    double upper_bound = 0.0;
    double error_bound = 0.0;
    std::size_t region_count = 0;
    std::size_t planes_count = 0;
    /// deterministic work proxy: cumulative simplex pivots, not wall clock
    std::uint64_t elapsed_ms = 0;
};

struct SolveResult {
    Assignment assignment;
    double value = 0.0;
    double bound = 0.0;
    std::size_t iterations = 0;
    std::vector<TraceRow> trace;
};

/// One simplex of the triangulation of Y.
struct SimplexRegion {
    DenseMatrix vertices;               // n × (n+1), corners as columns
    std::vector<std::size_t> plane_ids; // best-response plane per corner
    dvec vertex_g;                      // cached g at the corners
    double error_bound = 0.0;
    dvec pivot;
    bool active = true;
    std::uint64_t id = 0;
};

namespace detail {

inline dvec region_centroid(const SimplexRegion& s) {
    const std::size_t n = s.vertices.rows(), m = s.vertices.cols();
    dvec c(n, 0.0);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i)
            c[i] += s.vertices(i, j) / double(m);
    return c;
}

// barycentric coordinates of y: solve [T; 1ᵀ] t = [y; 1]. The system is
// centered on the simplex mean and row-equilibrated first, so conditioning
// reflects the simplex shape rather than its size or position; throws
// SingularMatrix only for genuinely degenerate (sliver) simplices.
inline dvec barycentric(const DenseMatrix& vertices, const dvec& y) {
    const std::size_t n = vertices.rows();
    dvec center(n, 0.0);
    for (std::size_t j = 0; j <= n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            center[i] += vertices(i, j) / double(n + 1);
    DenseMatrix t_hat(n + 1, n + 1);
    dvec rhs(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double scale = 0.0;
        for (std::size_t j = 0; j <= n; ++j)
            scale = std::max(scale, std::abs(vertices(i, j) - center[i]));
        if (scale <= 0.0) throw SingularMatrix("barycentric: flat simplex");
        for (std::size_t j = 0; j <= n; ++j)
            t_hat(i, j) = (vertices(i, j) - center[i]) / scale;
        rhs[i] = (y[i] - center[i]) / scale;
    }
    for (std::size_t j = 0; j <= n; ++j)
        t_hat(n, j) = 1.0;
    rhs[n] = 1.0;
    return solve_linear(t_hat, rhs);
}

} // namespace detail

/**
 * Children of a region refined at an interior pivot: child k replaces the
 * k-th corner by the pivot. Children whose barycentric weight vanishes are
 * dropped (the pivot lies on that face, so the remaining children still
 * cover the parent). Together the children tile the parent without overlap.
 */
inline std::vector<SimplexRegion> split_region(const SimplexRegion& parent, const dvec& pivot) {
    dvec coords = detail::barycentric(parent.vertices, pivot);
    std::vector<SimplexRegion> children;
    for (std::size_t k = 0; k < coords.size(); ++k) {
        if (std::abs(coords[k]) <= 1e-12) continue;
        SimplexRegion child;
        child.vertices = parent.vertices;
        child.vertices.set_col(k, pivot);
        child.plane_ids = parent.plane_ids;
        child.vertex_g = parent.vertex_g;
        children.push_back(std::move(child));
    }
    return children;
}

/**
 * Initial simplex containing all feasible y: per-coordinate ranges of Y are
 * measured by 2n LPs, the box is inflated by one percent and enclosed in the
 * simplex spanned by its low corner and the n scaled axis corners. Every
 * barycentric functional is then certified nonnegative over Y by one more LP
 * per corner. Throws YInfeasible / YUnbounded.
 */
inline SimplexRegion initial_simplex(const BilinearProgram& p) {
    const std::size_t n = p.dimensionality();
    if (n == 0) throw std::invalid_argument("initial_simplex: program has no y variables");
    const std::size_t nz = p.num_z();

    dvec lo(n), hi(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (double dir : {1.0, -1.0}) {
            dvec cy(n, 0.0);
            cy[j] = dir;
            LpSolution s = detail::solve_side2(p, cy, dvec(nz, 0.0));
            if (s.status == LpStatus::infeasible) throw YInfeasible("initial_simplex: Y is empty");
            if (s.status == LpStatus::unbounded)
                throw YUnbounded("initial_simplex: Y is unbounded in a coupled direction");
            (dir > 0 ? hi : lo)[j] = dir * s.objective;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        double mid = 0.5 * (hi[j] + lo[j]);
        double half = 0.5 * (hi[j] - lo[j]);
        half = std::max(half * 1.01, 1e-6 * (1.0 + std::abs(mid)));
        lo[j] = mid - half;
        hi[j] = mid + half;
    }

    SimplexRegion region;
    region.vertices = DenseMatrix(n, n + 1);
    for (std::size_t j = 0; j <= n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            region.vertices(i, j) = lo[i];
    for (std::size_t j = 1; j <= n; ++j)
        region.vertices(j - 1, j) = lo[j - 1] + double(n) * (hi[j - 1] - lo[j - 1]);

    // certify containment: each barycentric functional stays nonnegative on Y.
    // t_j(y) = (y_j - lo_j) / (n (hi_j - lo_j)) for j >= 1, t_0 = 1 - sum.
    for (std::size_t corner = 0; corner <= n; ++corner) {
        dvec cy(n, 0.0);
        double threshold;
        if (corner >= 1) {
            // t_corner(y) = k (y_j - lo_j) >= 0  <=>  max of -k y_j <= -k lo_j
            std::size_t j = corner - 1;
            cy[j] = -1.0 / (double(n) * (hi[j] - lo[j]));
            threshold = lo[j] * cy[j];
        } else {
            // t_0(y) = 1 - sum_j k_j (y_j - lo_j) >= 0
            threshold = 1.0;
            for (std::size_t j = 0; j < n; ++j) {
                cy[j] = 1.0 / (double(n) * (hi[j] - lo[j]));
                threshold += lo[j] * cy[j];
            }
        }
        LpSolution s = detail::solve_side2(p, cy, dvec(nz, 0.0));
        if (s.status != LpStatus::optimal || s.objective > threshold + 1e-7)
            throw std::runtime_error("initial_simplex: containment certificate failed");
    }
    return region;
}

/// Cutting plane σᵀy ≤ τ that keeps every point of the region that can still
/// improve on the incumbent h (returns nothing when no informative cut exists).
inline std::optional<std::pair<dvec, double>> polyhedron_cut(const BilinearProgram& p,
                                                             const SimplexRegion& region,
                                                             double h) {
    if (!p.is_semi_compact())
        throw std::invalid_argument("polyhedron_cut: semi-compact form required");
    if (!std::isfinite(h)) return std::nullopt;
    const std::size_t n = p.dimensionality();
    const std::size_t m1 = p.rhs1.size();
    const std::size_t nx = p.num_x(), nw = p.num_w();

    // Dominated set membership via the dual system over λ (free):
    //   A1ᵀλ ≥ r1 + C y,  B1ᵀλ ≥ s1,  b1ᵀλ ≤ h - r2ᵀy
    auto dominated = [&](const dvec& y) {
        LpProblem lp;
        lp.c.assign(m1, 0.0);
        DenseMatrix rows(nx + nw + 1, m1);
        dvec rhs(nx + nw + 1, 0.0);
        dvec cy = nx > 0 ? matvec(p.coupling, y) : dvec();
        for (std::size_t i = 0; i < nx; ++i) {
            for (std::size_t k = 0; k < m1; ++k)
                rows(i, k) = -p.a1(k, i);
            rhs[i] = -(p.r1[i] + cy[i]);
        }
        for (std::size_t i = 0; i < nw; ++i) {
            for (std::size_t k = 0; k < m1; ++k)
                rows(nx + i, k) = -p.b1(k, i);
            rhs[nx + i] = -p.s1[i];
        }
        for (std::size_t k = 0; k < m1; ++k)
            rows(nx + nw, k) = p.rhs1[k];
        rhs[nx + nw] = h - dot(p.r2, y);
        lp.g = rows;
        lp.h = rhs;
        index_list all_free(m1);
        for (std::size_t k = 0; k < m1; ++k)
            all_free[k] = k;
        return solve_lp_with_free_vars(lp, all_free).status == LpStatus::optimal;
    };

    std::vector<std::size_t> inside, outside; // inside the dominated set / outside it
    for (std::size_t v = 0; v <= n; ++v) {
        if (dominated(region.vertices.col(v)))
            inside.push_back(v);
        else
            outside.push_back(v);
    }
    if (inside.empty() || outside.empty()) return std::nullopt;

    // intersection points of region edges with the dominated-set boundary:
    // maximize β with y_j + β (y_i - y_j) still dominated, β ∈ [0, 1]
    std::vector<dvec> points;
    for (std::size_t i : outside) {
        for (std::size_t j : inside) {
            dvec yj = region.vertices.col(j);
            dvec yi = region.vertices.col(i);
            dvec d(n);
            for (std::size_t q = 0; q < n; ++q)
                d[q] = yi[q] - yj[q];

            // variables: (β, λ)
            LpProblem lp;
            lp.c.assign(1 + m1, 0.0);
            lp.c[0] = 1.0;
            std::size_t rows_count = nx + nw + 2;
            DenseMatrix rows(rows_count, 1 + m1);
            dvec rhs(rows_count, 0.0);
            dvec cyj = nx > 0 ? matvec(p.coupling, yj) : dvec();
            dvec cd = nx > 0 ? matvec(p.coupling, d) : dvec();
            for (std::size_t q = 0; q < nx; ++q) {
                rows(q, 0) = cd[q];
                for (std::size_t k = 0; k < m1; ++k)
                    rows(q, 1 + k) = -p.a1(k, q);
                rhs[q] = -(p.r1[q] + cyj[q]);
            }
            for (std::size_t q = 0; q < nw; ++q) {
                for (std::size_t k = 0; k < m1; ++k)
                    rows(nx + q, 1 + k) = -p.b1(k, q);
                rhs[nx + q] = -p.s1[q];
            }
            rows(nx + nw, 0) = dot(p.r2, d);
            for (std::size_t k = 0; k < m1; ++k)
                rows(nx + nw, 1 + k) = p.rhs1[k];
            rhs[nx + nw] = h - dot(p.r2, yj);
            rows(nx + nw + 1, 0) = 1.0; // β ≤ 1
            rhs[nx + nw + 1] = 1.0;
            lp.g = rows;
            lp.h = rhs;
            index_list lam_free(m1);
            for (std::size_t k = 0; k < m1; ++k)
                lam_free[k] = 1 + k;
            LpSolution s = solve_lp_with_free_vars(lp, lam_free);
            if (s.status != LpStatus::optimal) continue;
            dvec f(n);
            for (std::size_t q = 0; q < n; ++q)
                f[q] = yj[q] + s.x[0] * d[q];
            points.push_back(std::move(f));
            if (points.size() >= n) break;
        }
        if (points.size() >= n) break;
    }
    if (points.size() < n) return std::nullopt;

    // hyperplane through the n points: σᵀ f_k = τ with 1ᵀσ = 1, falling back
    // to a unit-norm normal from the nullspace when that system is singular
    dvec sigma(n, 0.0);
    double tau = 0.0;
    bool solved = false;
    {
        DenseMatrix sys(n + 1, n + 1);
        dvec rhs(n + 1, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t q = 0; q < n; ++q)
                sys(k, q) = points[k][q];
            sys(k, n) = -1.0;
        }
        for (std::size_t q = 0; q < n; ++q)
            sys(n, q) = 1.0;
        rhs[n] = 1.0;
        try {
            dvec sol = solve_linear(sys, rhs);
            sigma.assign(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(n));
            tau = sol[n];
            solved = true;
        } catch (const SingularMatrix&) {
        }
    }
    if (!solved) {
        // unit-norm normal from the nullspace of [F, -1]
        DenseMatrix a(n, n + 1);
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t q = 0; q < n; ++q)
                a(k, q) = points[k][q];
            a(k, n) = -1.0;
        }
        EigenDecomposition gram = symmetric_eig(multiply(a.transpose(), a));
        double largest = std::max(1.0, gram.eigenvalues[0]);
        // a well-defined hyperplane needs a one-dimensional nullspace
        if (gram.eigenvalues[n - 1] <= 1e-9 * largest) return std::nullopt;
        dvec normal = gram.eigenvectors.col(n);
        sigma.assign(normal.begin(), normal.begin() + static_cast<std::ptrdiff_t>(n));
        tau = -normal[n];
        double norm = l2_norm(sigma);
        if (norm <= 1e-12) return std::nullopt;
        for (double& v : sigma)
            v /= norm;
        tau /= norm;
    }

    // orient so that every vertex outside the dominated set stays feasible
    double slack = 1e-9 * (1.0 + std::abs(tau));
    bool violated = false;
    for (std::size_t i : outside)
        if (dot(sigma, region.vertices.col(i)) > tau + slack) violated = true;
    if (violated) {
        for (double& v : sigma)
            v = -v;
        tau = -tau;
        slack = 1e-9 * (1.0 + std::abs(tau));
        for (std::size_t i : outside)
            if (dot(sigma, region.vertices.col(i)) > tau + slack) return std::nullopt;
    }
    return std::make_pair(sigma, tau + slack);
}

/**
 * Error bound and pivot point of one region (the PolyhedronError step): an LP
 * over the barycentric coordinates maximizing u(y) - l(y), where u comes from
 * the cached corner values and l from the corner response planes. Depending
 * on the method the search is further restricted to feasible y, to u(y) ≥ h,
 * and to the side of a separating cut. An infeasible restriction means the
 * region cannot contain an improving optimum: (0, centroid) is returned.
 */
inline std::pair<double, dvec> polyhedron_error(const BilinearProgram& p,
                                                const std::vector<ResponsePlane>& planes,
                                                const SimplexRegion& region, PivotMethod method,
                                                double h) {
    const std::size_t n = p.dimensionality();
    const std::size_t corners = n + 1;
    const std::size_t nz = p.num_z();
    const bool with_feasibility = method != PivotMethod::basic;
    const bool with_bound = (method == PivotMethod::linear_bound ||
                             method == PivotMethod::cutting_plane) &&
                            std::isfinite(h);

    std::optional<std::pair<dvec, double>> cut;
    if (method == PivotMethod::cutting_plane) cut = polyhedron_cut(p, region, h);

    // variables: [t (corners), ε, z (when feasibility rows are present)]
    const std::size_t num_z_vars = with_feasibility ? nz : 0;
    const std::size_t eps_col = corners;
    const std::size_t z_base = corners + 1;
    const std::size_t nvars = corners + 1 + num_z_vars;

    index_list plane_set;
    for (std::size_t id : region.plane_ids)
        if (std::find(plane_set.begin(), plane_set.end(), id) == plane_set.end())
            plane_set.push_back(id);

    // sign constraints on y = Tt for the feasibility-restricted variants
    index_list signed_y;
    if (with_feasibility) {
        std::vector<bool> is_free(n, false);
        for (std::size_t i : p.free_y)
            is_free[i] = true;
        for (std::size_t q = 0; q < n; ++q)
            if (!is_free[q]) signed_y.push_back(q);
    }

    std::size_t n_ineq =
        plane_set.size() + signed_y.size() + (with_bound ? 1 : 0) + (cut ? 1 : 0);
    DenseMatrix gmat(n_ineq, nvars);
    dvec gh(n_ineq, 0.0);
    std::size_t row = 0;
    for (std::size_t id : plane_set) {
        const ResponsePlane& plane = planes[id];
        gmat(row, eps_col) = 1.0;
        for (std::size_t j = 0; j < corners; ++j) {
            double slope_t = dot(plane.slope, region.vertices.col(j));
            gmat(row, j) = -(region.vertex_g[j] - slope_t);
        }
        gh[row] = -plane.offset;
        ++row;
    }
    for (std::size_t q : signed_y) {
        // -(Tt)_q <= 0
        for (std::size_t j = 0; j < corners; ++j)
            gmat(row, j) = -region.vertices(q, j);
        gh[row] = 0.0;
        ++row;
    }
    if (with_bound) {
        for (std::size_t j = 0; j < corners; ++j)
            gmat(row, j) = -region.vertex_g[j];
        gh[row] = -h;
        ++row;
    }
    if (cut) {
        for (std::size_t j = 0; j < corners; ++j)
            gmat(row, j) = dot(cut->first, region.vertices.col(j));
        gh[row] = cut->second;
        ++row;
    }

    std::size_t n_eq = 1 + (with_feasibility ? p.rhs2.size() : 0);
    DenseMatrix amat(n_eq, nvars);
    dvec ab(n_eq, 0.0);
    for (std::size_t j = 0; j < corners; ++j)
        amat(0, j) = 1.0;
    ab[0] = 1.0;
    if (with_feasibility) {
        for (std::size_t r = 0; r < p.rhs2.size(); ++r) {
            for (std::size_t j = 0; j < corners; ++j) {
                double s = 0.0;
                for (std::size_t q = 0; q < n; ++q)
                    s += p.a2(r, q) * region.vertices(q, j);
                amat(1 + r, j) = s;
            }
            for (std::size_t zq = 0; zq < nz; ++zq)
                amat(1 + r, z_base + zq) = p.b2(r, zq);
            ab[1 + r] = p.rhs2[r];
        }
    }

    LpProblem lp;
    lp.c.assign(nvars, 0.0);
    lp.c[eps_col] = 1.0;
    lp.a = amat;
    lp.b = ab;
    lp.g = gmat;
    lp.h = gh;
    index_list free_vars = {eps_col};
    if (with_feasibility)
        for (std::size_t i : p.free_z)
            free_vars.push_back(z_base + i);

    LpSolution s = solve_lp_with_free_vars(lp, free_vars);
    if (s.status == LpStatus::infeasible)
        return {0.0, detail::region_centroid(region)};
    if (s.status == LpStatus::unbounded)
        throw std::runtime_error("polyhedron_error: unexpected unbounded pivot program");

    dvec phi(n, 0.0);
    for (std::size_t j = 0; j < corners; ++j)
        for (std::size_t q = 0; q < n; ++q)
            phi[q] += region.vertices(q, j) * s.x[j];
    return {std::max(0.0, s.objective), phi};
}

/**
 * Alternating best responses from a random feasible starting point until
 * neither side moves. The returned value is a valid lower bound on the
 * optimum. Deterministic for a fixed generator state.
 */
inline std::pair<Assignment, double> iterative_best_response(const BilinearProgram& p,
                                                             SplitMix64& rng) {
    validate(p);
    if (!p.is_equality_form())
        throw std::invalid_argument("iterative_best_response: equality form required");
    const std::size_t nx = p.num_x(), nw = p.num_w(), ny = p.num_y(), nz = p.num_z();

    dvec cx(nx), cw(nw);
    for (auto& v : cx)
        v = rng.uniform(-1.0, 1.0);
    for (auto& v : cw)
        v = rng.uniform(-1.0, 1.0);
    LpSolution start = detail::solve_side1(p, cx, cw);
    if (start.status == LpStatus::infeasible) throw XInfeasible("iterative_best_response: X empty");
    if (start.status == LpStatus::unbounded)
        throw XUnbounded("iterative_best_response: X unbounded");

    Assignment a;
    a.x.assign(start.x.begin(), start.x.begin() + static_cast<std::ptrdiff_t>(nx));
    a.w.assign(start.x.begin() + static_cast<std::ptrdiff_t>(nx), start.x.end());
    a.y.assign(ny, 0.0);
    a.z.assign(nz, 0.0);

    double previous_value = -std::numeric_limits<double>::infinity();
    for (int round = 0; round < 500; ++round) {
        // side 2 responds to (x, w)
        dvec cy = p.r2;
        if (nx > 0 && ny > 0) {
            dvec t = tmatvec(p.coupling, a.x);
            for (std::size_t j = 0; j < ny; ++j)
                cy[j] += t[j];
        }
        LpSolution sy = detail::solve_side2(p, cy, p.s2);
        if (sy.status == LpStatus::infeasible) throw YInfeasible("iterative_best_response: Y empty");
        if (sy.status == LpStatus::unbounded)
            throw YUnbounded("iterative_best_response: Y unbounded");
        dvec new_y(sy.x.begin(), sy.x.begin() + static_cast<std::ptrdiff_t>(ny));
        dvec new_z(sy.x.begin() + static_cast<std::ptrdiff_t>(ny), sy.x.end());

        // side 1 responds to (y, z)
        dvec cx2 = p.r1;
        if (nx > 0 && ny > 0) {
            dvec t = matvec(p.coupling, new_y);
            for (std::size_t i = 0; i < nx; ++i)
                cx2[i] += t[i];
        }
        LpSolution sx = detail::solve_side1(p, cx2, p.s1);
        if (sx.status != LpStatus::optimal)
            throw std::runtime_error("iterative_best_response: side-1 response failed");
        dvec new_x(sx.x.begin(), sx.x.begin() + static_cast<std::ptrdiff_t>(nx));
        dvec new_w(sx.x.begin() + static_cast<std::ptrdiff_t>(nx), sx.x.end());

        double moved = std::max(std::max(linf_diff(new_x, a.x), linf_diff(new_w, a.w)),
                                std::max(linf_diff(new_y, a.y), linf_diff(new_z, a.z)));
        a.x = std::move(new_x);
        a.w = std::move(new_w);
        a.y = std::move(new_y);
        a.z = std::move(new_z);
        double value = evaluate_objective(p, a);
        if (moved < 1e-9 || value <= previous_value + 1e-12 * (1.0 + std::abs(value))) break;
        previous_value = value;
    }
    return {a, evaluate_objective(p, a)};
}

/**
 * State of the successive-approximation loop on a semi-compact program: the
 * stored best responses, the triangulation with per-region bounds, and the
 * incumbent. Single-owner; mutated only through initialize() and step().
 */
class SolverState {
  public:
    SolverState(BilinearProgram program, SolverConfig config)
        : p_(std::move(program)), config_(config), rng_(config.seed) {
        if (!p_.is_semi_compact())
            throw std::invalid_argument("SolverState: semi-compact program required");
    }

    const BilinearProgram& program() const { return p_; }
    const std::vector<ResponsePlane>& planes() const { return planes_; }
    const std::vector<SimplexRegion>& regions() const { return regions_; }
    double incumbent_value() const { return h_; }
    const Assignment& incumbent() const { return incumbent_; }
    std::size_t iterations() const { return iterations_; }
    const std::vector<TraceRow>& trace() const { return trace_; }

    void initialize() {
        pivot_base_ = simplex_pivot_count;
        for (std::size_t r = 0; r < config_.presolve_restarts; ++r) {
            SplitMix64 stream = rng_.split(r + 1);
            auto [a, value] = iterative_best_response(p_, stream);
            (void)value;
            add_response_plane(make_plane(a.x, a.w, a.y));
        }
        SimplexRegion region = initial_simplex(p_);
        region.plane_ids.resize(region.vertices.cols());
        region.vertex_g.resize(region.vertices.cols());
        for (std::size_t v = 0; v < region.vertices.cols(); ++v) {
            auto [plane, g] = best_response(p_, region.vertices.col(v));
            region.plane_ids[v] = add_response_plane(plane);
            region.vertex_g[v] = g;
        }
        auto [eps, phi] = polyhedron_error(p_, planes_, region, config_.method, h_);
        region.error_bound = eps;
        region.pivot = phi;
        push_region(std::move(region));
        record_trace();
    }

    /// Global certified gap: the largest error bound among active regions.
    double global_bound() {
        prune_heap();
        return heap_.empty() ? 0.0 : heap_.top().first;
    }

    bool done() {
        return global_bound() < config_.epsilon0 || iterations_ >= config_.max_iterations;
    }

    /// One iteration: refine the region with the largest error bound.
    bool step() {
        prune_heap();
        if (done() || heap_.empty()) return false;
        std::size_t worst = heap_.top().second;
        refine(worst);
        ++iterations_;
        record_trace();
        return !done();
    }

    /**
     * Refinement of a region: pushes the pivot to the interior if necessary,
     * adds its best response, splits the region into children (error bounds
     * clamped by the parent's) and retires the parent.
     */
    void refine(std::size_t index) {
        SimplexRegion& parent = regions_[index];
        const std::size_t n = p_.dimensionality();
        dvec pivot = parent.pivot;
        const dvec centroid = detail::region_centroid(parent);

        // Splitting needs the pivot well inside the face spanned by the
        // positive barycentric weights: weights below snap_tol are zeroed
        // (the pivot is snapped onto that face and the matching children are
        // skipped; the remaining ones still tile the parent), and a pivot
        // that collapses onto a single vertex is replaced by the centroid.
        // Near-vertex pivots otherwise breed flat child simplices on which
        // the interpolated upper bound never tightens.
        const double snap_tol = 1e-4;
        const double interior_floor = 0.01 / double(n + 1);
        dvec coords;
        bool usable = true;
        try {
            coords = detail::barycentric(parent.vertices, pivot);
        } catch (const SingularMatrix&) {
            usable = false;
        }
        if (usable) {
            double surviving_total = 0.0;
            std::size_t surviving = 0;
            for (double& c : coords) {
                if (c < snap_tol) {
                    c = 0.0;
                } else {
                    surviving_total += c;
                    ++surviving;
                }
            }
            if (surviving <= 1) {
                usable = false;
            } else {
                for (double& c : coords)
                    c /= surviving_total;
                double lowest = 1.0;
                for (double c : coords)
                    if (c > 0.0) lowest = std::min(lowest, c);
                if (lowest < interior_floor) {
                    double uniform = 1.0 / double(surviving);
                    for (double& c : coords)
                        if (c > 0.0) c = 0.9 * c + 0.1 * uniform;
                }
                pivot.assign(n, 0.0);
                for (std::size_t j = 0; j <= n; ++j)
                    for (std::size_t q = 0; q < n; ++q)
                        pivot[q] += parent.vertices(q, j) * coords[j];
            }
        }
        if (!usable) {
            pivot = centroid;
            coords.assign(n + 1, 1.0 / double(n + 1));
        }

        auto [plane, g_pivot] = best_response(p_, pivot);
        std::size_t plane_id = add_response_plane(plane);

        double parent_eps = parent.error_bound;
        std::vector<SimplexRegion> children;
        for (std::size_t k = 0; k <= n; ++k) {
            if (coords[k] <= 0.0) continue; // pivot sits on this child's face
            SimplexRegion child;
            child.vertices = parent.vertices;
            child.vertices.set_col(k, pivot);
            child.plane_ids = parent.plane_ids;
            child.plane_ids[k] = plane_id;
            child.vertex_g = parent.vertex_g;
            child.vertex_g[k] = g_pivot;
            auto [eps, phi] = polyhedron_error(p_, planes_, child, config_.method, h_);
            child.error_bound = std::min(eps, parent_eps);
            child.pivot = phi;
            children.push_back(std::move(child));
        }
        regions_[index].error_bound = 0.0;
        regions_[index].active = false;
        for (auto& child : children)
            push_region(std::move(child));
    }

    std::uint64_t work_proxy() const { return simplex_pivot_count - pivot_base_; }

  private:
    ResponsePlane make_plane(const dvec& x, const dvec& w, const dvec& source) const {
        ResponsePlane plane;
        plane.x = x;
        plane.w = w;
        plane.offset = dot(p_.s1, w) + dot(p_.r1, x);
        plane.slope = p_.r2;
        if (p_.num_x() > 0 && p_.num_y() > 0) {
            dvec t = tmatvec(p_.coupling, x);
            for (std::size_t j = 0; j < plane.slope.size(); ++j)
                plane.slope[j] += t[j];
        }
        plane.source_pivot = source;
        return plane;
    }

    // Stores the plane (deduplicated) and refreshes the incumbent with its
    // best achievable value over Y. One LP per distinct plane.
    std::size_t add_response_plane(const ResponsePlane& plane) {
        for (std::size_t i = 0; i < planes_.size(); ++i)
            if (planes_[i].x == plane.x && planes_[i].w == plane.w) return i;
        planes_.push_back(plane);

        LpSolution s = detail::solve_side2(p_, plane.slope, dvec(p_.num_z(), 0.0));
        if (s.status == LpStatus::infeasible) throw YInfeasible("solver: Y is empty");
        if (s.status == LpStatus::unbounded)
            throw YUnbounded("solver: plane value unbounded over Y");
        double value = plane.offset + s.objective;
        if (value > h_) {
            h_ = value;
            incumbent_.x = plane.x;
            incumbent_.w = plane.w;
            incumbent_.y.assign(s.x.begin(), s.x.begin() + static_cast<std::ptrdiff_t>(p_.num_y()));
            incumbent_.z.assign(s.x.begin() + static_cast<std::ptrdiff_t>(p_.num_y()), s.x.end());
        }
        return planes_.size() - 1;
    }

    void push_region(SimplexRegion&& region) {
        region.id = next_region_id_++;
        region.active = true;
        heap_.push({region.error_bound, region.id});
        if (region.id != regions_.size())
            throw std::logic_error("solver: region id bookkeeping broke");
        regions_.push_back(std::move(region));
    }

    void prune_heap() {
        while (!heap_.empty()) {
            auto [eps, id] = heap_.top();
            const SimplexRegion& r = regions_[id];
            if (r.active && r.error_bound == eps) break;
            heap_.pop();
        }
    }

    void record_trace() {
        TraceRow row;
        row.iteration = iterations_;
        row.incumbent_value = h_;
        row.error_bound = global_bound();
        row.upper_bound = h_ + row.error_bound;
        std::size_t active = 0;
        for (const auto& r : regions_)
            if (r.active) ++active;
        row.region_count = active;
        row.planes_count = planes_.size();
        row.elapsed_ms = work_proxy();
        trace_.push_back(row);
    }

    struct HeapOrder {
        bool operator()(const std::pair<double, std::size_t>& a,
                        const std::pair<double, std::size_t>& b) const {
            if (a.first != b.first) return a.first < b.first;
            return a.second > b.second; // older region first on ties
        }
    };

    BilinearProgram p_;
    SolverConfig config_;
    SplitMix64 rng_;
    std::vector<ResponsePlane> planes_;
    std::vector<SimplexRegion> regions_;
    std::priority_queue<std::pair<double, std::size_t>,
                        std::vector<std::pair<double, std::size_t>>, HeapOrder>
        heap_;
    double h_ = -std::numeric_limits<double>::infinity();
    Assignment incumbent_;
    std::size_t iterations_ = 0;
    std::uint64_t next_region_id_ = 0;
    std::uint64_t pivot_base_ = 0;
    std::vector<TraceRow> trace_;
};

/**
 * Smallest grid resolution k such that evaluating the response function on a
 * regular grid with k points per dimension guarantees an approximation error
 * of at most eps: the least k with kⁿ ≥ ‖C‖₂ √(nⁿ) / eps.
 */
inline std::size_t offline_bound(const DenseMatrix& coupling, std::size_t n, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("offline_bound: eps must be positive");
    if (n == 0) throw std::invalid_argument("offline_bound: dimension must be at least 1");
    double target = spectral_norm(coupling) * std::sqrt(std::pow(double(n), double(n))) / eps;
    if (target <= 1.0) return 1;
    double relaxed = target * (1.0 - 1e-9);
    std::size_t k = static_cast<std::size_t>(std::ceil(std::pow(target, 1.0 / double(n)) - 1e-9));
    if (k < 1) k = 1;
    while (k > 1 && std::pow(double(k - 1), double(n)) >= relaxed)
        --k;
    while (std::pow(double(k), double(n)) < relaxed)
        ++k;
    return k;
}

/**
 * Full anytime solve of a (convertible) bilinear program: normal-form and
 * semi-compact conversions, optional presolve by alternating best responses,
 * then the successive approximation loop until the certified gap drops below
 * epsilon0 or the iteration budget runs out. The returned assignment is
 * expressed in the input program's variables; value is a lower bound on the
 * optimum and value + bound an upper one.
 */
inline SolveResult solve(const BilinearProgram& input, const SolverConfig& config = {}) {
    validate(input);
    BilinearProgram normal = to_normal_form(input);
    BilinearProgram sc = to_semi_compact(normal);
    const bool grew = sc.num_y() == normal.num_y() + 1;

    SolveResult result;
    if (sc.dimensionality() == 0) {
        // no coupled variables left: the program splits into two LPs
        LpSolution s1 = detail::solve_side1(sc, sc.r1, sc.s1);
        if (s1.status == LpStatus::infeasible) throw XInfeasible("solve: X is empty");
        if (s1.status == LpStatus::unbounded) throw XUnbounded("solve: X is unbounded");
        LpSolution s2 = detail::solve_side2(sc, sc.r2, sc.s2);
        if (s2.status == LpStatus::infeasible) throw YInfeasible("solve: Y is empty");
        if (s2.status == LpStatus::unbounded) throw YUnbounded("solve: Y is unbounded");
        Assignment a;
        a.x.assign(s1.x.begin(), s1.x.begin() + static_cast<std::ptrdiff_t>(sc.num_x()));
        a.w.assign(s1.x.begin() + static_cast<std::ptrdiff_t>(sc.num_x()), s1.x.end());
        a.y.assign(s2.x.begin(), s2.x.begin() + static_cast<std::ptrdiff_t>(sc.num_y()));
        a.z.assign(s2.x.begin() + static_cast<std::ptrdiff_t>(sc.num_y()), s2.x.end());
        result.value = evaluate_objective(sc, a);
        result.bound = 0.0;
        result.iterations = 0;
        TraceRow row;
        row.incumbent_value = result.value;
        row.upper_bound = result.value;
        result.trace.push_back(row);
        result.assignment = std::move(a);
    } else {
        SolverState state(sc, config);
        state.initialize();
        while (state.step()) {
        }
        result.value = state.incumbent_value();
        result.bound = state.global_bound();
        result.iterations = state.iterations();
        result.trace = state.trace();
        result.assignment = state.incumbent();
    }

    // map back to the input program's variable space: drop the pinned x̂ and
    // linked ŷ, then the slack tails appended by the normal-form rewrite
    Assignment& a = result.assignment;
    if (grew) {
        a.x.resize(normal.num_x());
        a.y.resize(normal.num_y());
    }
    a.w.resize(input.num_w());
    a.z.resize(input.num_z());
    return result;
}

} // namespace bilp
