#pragma once

#include "bilp/bilinear.hpp"
#include "bilp/linalg.hpp"

namespace bilp {

struct RankDeficientRows : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ReductionScaling { automatic, none };

struct ReductionResult {
    BilinearProgram reduced_program;
    std::size_t kept_dims = 0;
    /// Worst-case objective loss of the discarded directions (largest
    /// discarded singular value, after scaling when scaling is automatic).
    double error_bound = 0.0;
    DenseMatrix basis; // |y| × kept_dims, orthonormal columns
    double scale = 1.0;
};

namespace detail {

// per-coordinate max |v_i| over one side's polyhedron, via 1-2 LPs each
inline dvec coordinate_radii(const DenseMatrix& coupled_mat, const DenseMatrix& uncoupled_mat,
                             const dvec& rhs, ConstraintSense sense, const index_list& free_coupled,
                             const index_list& free_uncoupled, bool side_one) {
    const std::size_t nc = coupled_mat.cols();
    const std::size_t nu = uncoupled_mat.cols();
    dvec radii(nc, 0.0);
    std::vector<bool> is_free(nc, false);
    for (std::size_t i : free_coupled)
        is_free[i] = true;
    for (std::size_t j = 0; j < nc; ++j) {
        for (double dir : {1.0, -1.0}) {
            if (dir < 0 && !is_free[j]) continue;
            dvec cc(nc, 0.0);
            cc[j] = dir;
            LpProblem lp = side_lp(coupled_mat, uncoupled_mat, rhs, sense, cc, dvec(nu, 0.0));
            LpSolution s = solve_lp_with_free_vars(lp, side_free(free_coupled, free_uncoupled, nc));
            if (s.status == LpStatus::infeasible) {
                if (side_one) throw XInfeasible("reduce: side-1 set is empty");
                throw YInfeasible("reduce: side-2 set is empty");
            }
            if (s.status == LpStatus::unbounded) {
                if (side_one) throw XUnbounded("reduce: side-1 set is unbounded");
                throw YUnbounded("reduce: side-2 set is unbounded");
            }
            radii[j] = std::max(radii[j], std::abs(s.objective));
        }
    }
    return radii;
}

} // namespace detail

/**
 * Automatic dimensionality reduction of the coupling matrix.
 *
 * Singular directions of C whose (scaled) singular value is at most eps are
 * dropped: the program is rewritten with new sign-free variables ȳ linked to
 * the original y by the rows ȳ = T1ᵀy, coupling C·T1, while y itself moves to
 * the uncoupled block. Feasible points map one-to-one and the optimal value
 * changes by at most error_bound.
 *
 * With automatic scaling, per-coordinate boxes of X and Y are measured by
 * LPs and the singular values are weighted by the product of the box norms
 * before thresholding, so the reported bound is valid for the actual feasible
 * sets rather than assuming they fit the unit ball.
 */
inline ReductionResult reduce(const BilinearProgram& p_in, double eps,
                              ReductionScaling scaling = ReductionScaling::automatic) {
    if (eps < 0.0) throw std::invalid_argument("reduce: eps must be nonnegative");
    BilinearProgram p = to_normal_form(p_in);
    validate(p);

    const std::size_t nx = p.num_x(), ny = p.num_y(), nz = p.num_z();

    ReductionResult out;
    out.scale = 1.0;
    if (scaling == ReductionScaling::automatic && nx > 0 && ny > 0) {
        dvec rx = detail::coordinate_radii(p.a1, p.b1, p.rhs1, p.sense1, p.free_x, p.free_w, true);
        dvec ry = detail::coordinate_radii(p.a2, p.b2, p.rhs2, p.sense2, p.free_y, p.free_z, false);
        out.scale = l2_norm(rx) * l2_norm(ry);
    }

    SvdResult decomposition;
    std::size_t kept = 0;
    double worst_discarded = 0.0;
    if (nx > 0 && ny > 0) {
        decomposition = svd(p.coupling);
        double sigma_floor = 1e-12 * std::max(1.0, decomposition.singular_values.empty()
                                                        ? 0.0
                                                        : decomposition.singular_values[0]);
        for (std::size_t i = 0; i < decomposition.singular_values.size(); ++i) {
            double sigma = decomposition.singular_values[i];
            if (sigma > sigma_floor && sigma * out.scale > eps) {
                kept = i + 1; // singular values are sorted descending
            } else {
                worst_discarded = std::max(worst_discarded, sigma * out.scale);
            }
        }
    }
    out.kept_dims = kept;
    out.error_bound = worst_discarded;

    if (kept == ny) {
        // nothing to drop; the rewrite would only add variables
        out.reduced_program = p;
        out.basis = DenseMatrix::identity(ny);
        out.error_bound = 0.0;
        return out;
    }

    DenseMatrix t1(ny, kept);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < kept; ++i)
            t1(j, i) = decomposition.vt(i, j);
    out.basis = t1;

    BilinearProgram q;
    q.a1 = p.a1;
    q.b1 = p.b1;
    q.rhs1 = p.rhs1;
    q.r1 = p.r1;
    q.s1 = p.s1;
    q.free_x = p.free_x;
    q.free_w = p.free_w;

    // coupled block becomes ȳ (all sign-free); y and z become uncoupled
    q.r2.assign(kept, 0.0);
    q.free_y.resize(kept);
    for (std::size_t i = 0; i < kept; ++i)
        q.free_y[i] = i;
    q.s2 = concat(p.r2, p.s2);
    q.free_z = p.free_y;
    for (std::size_t i : p.free_z)
        q.free_z.push_back(ny + i);

    // rows: ȳ - T1ᵀ y = 0, then the original side-2 constraints
    DenseMatrix link_coupled = DenseMatrix::identity(kept);
    DenseMatrix link_rest(kept, ny + nz);
    for (std::size_t i = 0; i < kept; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            link_rest(i, j) = -t1(j, i);
    DenseMatrix orig_rest = hstack(p.a2, p.b2);
    q.a2 = vstack(link_coupled, DenseMatrix(p.rhs2.size(), kept));
    q.b2 = vstack(link_rest, orig_rest);
    q.rhs2 = concat(dvec(kept, 0.0), p.rhs2);

    q.coupling = DenseMatrix(nx, kept);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t c = 0; c < kept; ++c) {
            double s = 0.0;
            for (std::size_t j = 0; j < ny; ++j)
                s += p.coupling(i, j) * t1(j, c);
            q.coupling(i, c) = s;
        }

    out.reduced_program = std::move(q);
    return out;
}

/// Maps an assignment of the reduced program back to the original space.
inline Assignment restore_reduced_assignment(const ReductionResult& r, std::size_t original_ny,
                                             const Assignment& reduced) {
    Assignment a;
    a.x = reduced.x;
    a.w = reduced.w;
    if (r.kept_dims == r.basis.rows() && r.basis.rows() == original_ny &&
        reduced.y.size() == original_ny) {
        // identity reduction
        a.y = reduced.y;
        a.z = reduced.z;
        return a;
    }
    a.y.assign(reduced.z.begin(), reduced.z.begin() + static_cast<std::ptrdiff_t>(original_ny));
    a.z.assign(reduced.z.begin() + static_cast<std::ptrdiff_t>(original_ny), reduced.z.end());
    return a;
}

struct LpProjection {
    dvec projected_c;
    double shift = 0.0; // cᵀAᵀ(AAᵀ)⁻¹b
};

/// Replaces an LP objective c by its projection onto the null space of A;
/// the optimum moves by exactly `shift` while the argmax set is unchanged.
inline LpProjection project_lp_objective(const dvec& c, const DenseMatrix& a, const dvec& b) {
    const std::size_t m = a.rows(), n = a.cols();
    if (c.size() != n || b.size() != m) throw DimensionMismatch("project_lp_objective: shapes");
    DenseMatrix gram = multiply(a, a.transpose());
    dvec ac = matvec(a, c);
    dvec u;
    dvec ub;
    try {
        u = solve_linear(gram, ac);
        ub = solve_linear(gram, b);
    } catch (const SingularMatrix&) {
        throw RankDeficientRows("project_lp_objective: constraint rows are linearly dependent");
    }
    LpProjection out;
    out.projected_c = c;
    dvec atu = tmatvec(a, u);
    for (std::size_t j = 0; j < n; ++j)
        out.projected_c[j] -= atu[j];
    out.shift = dot(c, tmatvec(a, ub));
    return out;
}

struct ProjectionResult {
    BilinearProgram program;
    double shift1 = 0.0;      // r1ᵀ x_p
    double shift2 = 0.0;      // r2ᵀ y_p
    double shift_cross = 0.0; // x_pᵀ C y_p
    double shift_total = 0.0;

    /// min-norm particular solutions of the two equality systems
    dvec x_particular, y_particular;
};

namespace detail {

// P = Aᵀ(AAᵀ)⁻¹A, the orthogonal projector onto the row space of A
inline DenseMatrix row_space_projector(const DenseMatrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    DenseMatrix gram = multiply(a, a.transpose());
    DenseMatrix z(m, n);
    try {
        for (std::size_t j = 0; j < n; ++j) {
            dvec col = solve_linear(gram, a.col(j));
            for (std::size_t i = 0; i < m; ++i)
                z(i, j) = col[i];
        }
    } catch (const SingularMatrix&) {
        throw RankDeficientRows("project_objective: constraint rows are linearly dependent");
    }
    return multiply(a.transpose(), z);
}

} // namespace detail

/**
 * Objective projection for programs without w and z variables: the coupling
 * becomes Q1·C·Q2 with Qi = I − Aiᵀ(AiAiᵀ)⁻¹Ai, and the linear costs absorb
 * the parts of C acting on the particular solutions, so the transformed
 * program has identical optimal solutions and an objective that differs from
 * the original by the recorded constant shift on the whole feasible set.
 * No eigenvalue of the projected coupling can exceed the original ones.
 */
inline ProjectionResult project_objective(const BilinearProgram& p) {
    validate(p);
    if (p.num_w() > 0 || p.num_z() > 0)
        throw std::invalid_argument("project_objective: program must have no w or z variables");
    if (!p.is_equality_form())
        throw std::invalid_argument("project_objective: equality form required");

    const std::size_t nx = p.num_x(), ny = p.num_y();
    DenseMatrix p1 = detail::row_space_projector(p.a1);
    DenseMatrix p2 = detail::row_space_projector(p.a2);

    DenseMatrix gram1 = multiply(p.a1, p.a1.transpose());
    DenseMatrix gram2 = multiply(p.a2, p.a2.transpose());
    dvec xp = tmatvec(p.a1, solve_linear(gram1, p.rhs1));
    dvec yp = tmatvec(p.a2, solve_linear(gram2, p.rhs2));

    // C̃ = (I - P1) C (I - P2)
    DenseMatrix cp2 = subtract(p.coupling, multiply(p.coupling, p2));
    DenseMatrix ct = subtract(cp2, multiply(p1, cp2));

    dvec r1_adj = p.r1;
    dvec cyp = matvec(p.coupling, yp);
    for (std::size_t i = 0; i < nx; ++i)
        r1_adj[i] += cyp[i];
    dvec p1r = matvec(p1, r1_adj);
    for (std::size_t i = 0; i < nx; ++i)
        r1_adj[i] -= p1r[i];

    dvec r2_adj = p.r2;
    dvec cxp = tmatvec(p.coupling, xp);
    for (std::size_t j = 0; j < ny; ++j)
        r2_adj[j] += cxp[j];
    dvec p2r = matvec(p2, r2_adj);
    for (std::size_t j = 0; j < ny; ++j)
        r2_adj[j] -= p2r[j];

    ProjectionResult out;
    out.program = p;
    out.program.coupling = ct;
    out.program.r1 = r1_adj;
    out.program.r2 = r2_adj;
    out.shift1 = dot(p.r1, xp);
    out.shift2 = dot(p.r2, yp);
    out.shift_cross = dot(xp, matvec(p.coupling, yp));
    out.shift_total = out.shift1 + out.shift2 + out.shift_cross;
    out.x_particular = xp;
    out.y_particular = yp;
    return out;
}

} // namespace bilp
