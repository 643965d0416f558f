#pragma once

#include "bilp/lp.hpp"

#include <optional>

namespace bilp {

struct XInfeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct XUnbounded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct YInfeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct YUnbounded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ConstraintSense { equality, inequality };
enum class ProgramForm { normal, semi_compact, compact };

/**
 * Separable bilinear program
 *
 *   max  s1ᵀw + r1ᵀx + xᵀ C y + r2ᵀy + s2ᵀz
 *   s.t. A1 x + B1 w = b1   (side 1; '≤' when sense1 is inequality)
 *        A2 y + B2 z = b2   (side 2)
 *        w, x, y, z ≥ 0 except the indices listed as free.
 *
 * x and y are the coupled blocks; w and z never enter the bilinear term.
 * The number of y variables is the dimensionality of the program. Blocks may
 * be empty (matching matrices have zero columns).
 */
struct BilinearProgram {
    DenseMatrix a1; // rows1 × |x|
    DenseMatrix b1; // rows1 × |w|
    dvec rhs1;

    DenseMatrix a2; // rows2 × |y|
    DenseMatrix b2; // rows2 × |z|
    dvec rhs2;

    dvec r1, s1; // costs of x and w
    dvec r2, s2; // costs of y and z
    DenseMatrix coupling; // |x| × |y|

    ConstraintSense sense1 = ConstraintSense::equality;
    ConstraintSense sense2 = ConstraintSense::equality;

    index_list free_x, free_w, free_y, free_z;

    std::size_t num_x() const { return r1.size(); }
    std::size_t num_w() const { return s1.size(); }
    std::size_t num_y() const { return r2.size(); }
    std::size_t num_z() const { return s2.size(); }

    /// Dimensionality for the successive-approximation machinery.
    std::size_t dimensionality() const { return num_y(); }

    ProgramForm form() const {
        bool s1_zero = linf_norm(s1) == 0.0;
        bool s2_zero = linf_norm(s2) == 0.0;
        if (s1_zero && s2_zero) return ProgramForm::compact;
        if (s2_zero) return ProgramForm::semi_compact;
        return ProgramForm::normal;
    }

    bool is_equality_form() const {
        return sense1 == ConstraintSense::equality && sense2 == ConstraintSense::equality;
    }

    bool is_semi_compact() const { return is_equality_form() && form() != ProgramForm::normal; }
};

struct Assignment {
    dvec w, x, y, z;
};

/// One stored best response of side 1: an affine value function over y.
struct ResponsePlane {
    dvec x, w;
    double offset = 0.0; // s1ᵀw + r1ᵀx
    dvec slope;          // Cᵀx + r2
    dvec source_pivot;   // the y this plane was computed for

    double value(const dvec& y) const { return offset + dot(slope, y); }
};

inline void validate(const BilinearProgram& p) {
    auto check_block = [](const DenseMatrix& m, std::size_t rows, std::size_t cols, const char* what) {
        if (cols == 0) {
            if (m.cols() != 0 && m.rows() != 0 && m.rows() != rows)
                throw DimensionMismatch(std::string("program block shape: ") + what);
            return;
        }
        if (m.rows() != rows || m.cols() != cols)
            throw DimensionMismatch(std::string("program block shape: ") + what);
    };
    check_block(p.a1, p.rhs1.size(), p.num_x(), "A1");
    check_block(p.b1, p.rhs1.size(), p.num_w(), "B1");
    check_block(p.a2, p.rhs2.size(), p.num_y(), "A2");
    check_block(p.b2, p.rhs2.size(), p.num_z(), "B2");
    if (p.num_x() > 0 || p.num_y() > 0) {
        if (p.coupling.rows() != p.num_x() || p.coupling.cols() != p.num_y())
            throw DimensionMismatch("program block shape: C");
    }
    for (std::size_t i : p.free_x)
        if (i >= p.num_x()) throw DimensionMismatch("free_x index out of range");
    for (std::size_t i : p.free_w)
        if (i >= p.num_w()) throw DimensionMismatch("free_w index out of range");
    for (std::size_t i : p.free_y)
        if (i >= p.num_y()) throw DimensionMismatch("free_y index out of range");
    for (std::size_t i : p.free_z)
        if (i >= p.num_z()) throw DimensionMismatch("free_z index out of range");
}

inline double evaluate_objective(const BilinearProgram& p, const Assignment& a) {
    if (a.x.size() != p.num_x() || a.w.size() != p.num_w() || a.y.size() != p.num_y() ||
        a.z.size() != p.num_z())
        throw DimensionMismatch("evaluate_objective: assignment shape");
    double v = dot(p.s1, a.w) + dot(p.r1, a.x) + dot(p.r2, a.y) + dot(p.s2, a.z);
    if (p.num_x() > 0 && p.num_y() > 0)
        v += dot(a.x, matvec(p.coupling, a.y));
    return v;
}

namespace detail {

// LP over one side's feasible polyhedron with the given block objectives.
// Variables are ordered [coupled block, uncoupled block].
inline LpProblem side_lp(const DenseMatrix& coupled_mat, const DenseMatrix& uncoupled_mat,
                         const dvec& rhs, ConstraintSense sense, const dvec& c_coupled,
                         const dvec& c_uncoupled) {
    LpProblem lp;
    lp.c = concat(c_coupled, c_uncoupled);
    DenseMatrix rows = hstack(coupled_mat, uncoupled_mat);
    if (sense == ConstraintSense::equality) {
        lp.a = rows;
        lp.b = rhs;
    } else {
        lp.g = rows;
        lp.h = rhs;
    }
    return lp;
}

inline index_list side_free(const index_list& free_coupled, const index_list& free_uncoupled,
                            std::size_t coupled_count) {
    index_list f = free_coupled;
    for (std::size_t i : free_uncoupled)
        f.push_back(coupled_count + i);
    return f;
}

inline LpSolution solve_side1(const BilinearProgram& p, const dvec& cx, const dvec& cw) {
    LpProblem lp = side_lp(p.a1, p.b1, p.rhs1, p.sense1, cx, cw);
    return solve_lp_with_free_vars(lp, side_free(p.free_x, p.free_w, p.num_x()));
}

inline LpSolution solve_side2(const BilinearProgram& p, const dvec& cy, const dvec& cz) {
    LpProblem lp = side_lp(p.a2, p.b2, p.rhs2, p.sense2, cy, cz);
    return solve_lp_with_free_vars(lp, side_free(p.free_y, p.free_z, p.num_y()));
}

} // namespace detail

/**
 * Converts an inequality-form program to the equality normal form by
 * appending slack variables (to w on side 1, to z on side 2). Already
 * equality-form programs are returned unchanged. Feasible points map to
 * feasible points with equal objective.
 */
inline BilinearProgram to_normal_form(const BilinearProgram& p) {
    validate(p);
    if (p.is_equality_form()) return p;
    BilinearProgram q = p;
    if (p.sense1 == ConstraintSense::inequality) {
        std::size_t m = p.rhs1.size();
        q.b1 = hstack(p.b1.rows() == 0 && p.num_w() == 0 ? DenseMatrix(m, 0) : p.b1,
                      DenseMatrix::identity(m));
        q.s1 = concat(p.s1, dvec(m, 0.0));
        q.sense1 = ConstraintSense::equality;
    }
    if (p.sense2 == ConstraintSense::inequality) {
        std::size_t m = p.rhs2.size();
        q.b2 = hstack(p.b2.rows() == 0 && p.num_z() == 0 ? DenseMatrix(m, 0) : p.b2,
                      DenseMatrix::identity(m));
        q.s2 = concat(p.s2, dvec(m, 0.0));
        q.sense2 = ConstraintSense::equality;
    }
    return q;
}

/**
 * Semi-compact rewrite: moves the s2ᵀz objective mass into the bilinear term
 * by adding one pinned variable x̂ = 1 on side 1 and one linked variable
 * ŷ = s2ᵀz (sign-free) on side 2, with block coupling [C 0; 0 1]. Grows the
 * dimensionality by exactly one. Returns the input unchanged when s2 is
 * already zero. Optimal values are preserved.
 */
inline BilinearProgram to_semi_compact(const BilinearProgram& p) {
    validate(p);
    if (!p.is_equality_form())
        throw std::invalid_argument("to_semi_compact: program must be in normal (equality) form");
    if (p.form() != ProgramForm::normal) return p;

    BilinearProgram q = p;
    const std::size_t nx = p.num_x(), ny = p.num_y(), nz = p.num_z();

    // side 1: new column x̂ and row x̂ = 1
    q.a1 = hstack(p.a1, DenseMatrix(p.rhs1.size(), 1));
    DenseMatrix pin(1, nx + 1);
    pin(0, nx) = 1.0;
    q.a1 = vstack(q.a1, pin);
    if (p.num_w() > 0) q.b1 = vstack(p.b1, DenseMatrix(1, p.num_w()));
    q.rhs1 = concat(p.rhs1, {1.0});
    q.r1 = concat(p.r1, {0.0});

    // side 2: new column ŷ (free) and row ŷ - s2ᵀz = 0
    q.a2 = hstack(p.a2, DenseMatrix(p.rhs2.size(), 1));
    DenseMatrix link_y(1, ny + 1);
    link_y(0, ny) = 1.0;
    q.a2 = vstack(q.a2, link_y);
    DenseMatrix link_z(1, nz);
    for (std::size_t j = 0; j < nz; ++j)
        link_z(0, j) = -p.s2[j];
    q.b2 = nz > 0 ? vstack(p.b2, link_z) : DenseMatrix(p.rhs2.size() + 1, 0);
    q.rhs2 = concat(p.rhs2, {0.0});
    q.r2 = concat(p.r2, {0.0});
    q.s2.assign(nz, 0.0);
    q.free_y.push_back(ny);

    // coupling becomes the [C 0; 0 1] block
    DenseMatrix c(nx + 1, ny + 1);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            c(i, j) = p.coupling(i, j);
    c(nx, ny) = 1.0;
    q.coupling = c;
    return q;
}

/// Swaps the two sides (C transposed). Never applied automatically.
inline BilinearProgram transpose_program(const BilinearProgram& p) {
    BilinearProgram q;
    q.a1 = p.a2;
    q.b1 = p.b2;
    q.rhs1 = p.rhs2;
    q.a2 = p.a1;
    q.b2 = p.b1;
    q.rhs2 = p.rhs1;
    q.r1 = p.r2;
    q.s1 = p.s2;
    q.r2 = p.r1;
    q.s2 = p.s1;
    q.coupling = p.coupling.transpose();
    q.sense1 = p.sense2;
    q.sense2 = p.sense1;
    q.free_x = p.free_y;
    q.free_w = p.free_z;
    q.free_y = p.free_x;
    q.free_z = p.free_w;
    return q;
}

/**
 * Best response of side 1 to a fixed y: solves max over (x,w) ∈ X of
 * s1ᵀw + r1ᵀx + (Cy)ᵀx and returns the resulting value plane together with
 * g(y) = plane.value(y). Defined for any y of matching dimension, feasible
 * or not. Requires a semi-compact program so the plane bounds the full
 * objective. Throws XInfeasible / XUnbounded.
 */
inline std::pair<ResponsePlane, double> best_response(const BilinearProgram& p, const dvec& y) {
    if (!p.is_semi_compact() && !(p.is_equality_form() && p.form() == ProgramForm::compact))
        throw std::invalid_argument("best_response: program must be semi-compact");
    if (y.size() != p.num_y()) throw DimensionMismatch("best_response: y size");

    dvec cx = p.r1;
    if (p.num_x() > 0 && p.num_y() > 0) {
        dvec cy = matvec(p.coupling, y);
        for (std::size_t i = 0; i < cx.size(); ++i)
            cx[i] += cy[i];
    }
    LpSolution s = detail::solve_side1(p, cx, p.s1);
    if (s.status == LpStatus::infeasible) throw XInfeasible("best_response: X is empty");
    if (s.status == LpStatus::unbounded)
        throw XUnbounded("best_response: side-1 objective unbounded over X");

    ResponsePlane plane;
    plane.x.assign(s.x.begin(), s.x.begin() + static_cast<std::ptrdiff_t>(p.num_x()));
    plane.w.assign(s.x.begin() + static_cast<std::ptrdiff_t>(p.num_x()), s.x.end());
    plane.offset = dot(p.s1, plane.w) + dot(p.r1, plane.x);
    plane.slope = p.r2;
    if (p.num_x() > 0 && p.num_y() > 0) {
        dvec ct = tmatvec(p.coupling, plane.x);
        for (std::size_t j = 0; j < plane.slope.size(); ++j)
            plane.slope[j] += ct[j];
    }
    plane.source_pivot = y;
    return {plane, plane.value(y)};
}

/**
 * Exact best-response value g(y) for a program in any equality form,
 * following the convex + concave decomposition: the side-1 maximization plus
 * r2ᵀy plus the value of max s2ᵀz over feasible z at this y. Used mainly for
 * analysis and tests; throws YInfeasible when no z completes the given y.
 */
inline double exact_response_value(const BilinearProgram& p, const dvec& y) {
    if (!p.is_equality_form())
        throw std::invalid_argument("exact_response_value: equality form required");
    if (y.size() != p.num_y()) throw DimensionMismatch("exact_response_value: y size");

    dvec cx = p.r1;
    if (p.num_x() > 0 && p.num_y() > 0) {
        dvec cy = matvec(p.coupling, y);
        for (std::size_t i = 0; i < cx.size(); ++i)
            cx[i] += cy[i];
    }
    LpSolution side1 = detail::solve_side1(p, cx, p.s1);
    if (side1.status == LpStatus::infeasible) throw XInfeasible("exact_response_value: X empty");
    if (side1.status == LpStatus::unbounded) throw XUnbounded("exact_response_value: X unbounded");

    double v = side1.objective + dot(p.r2, y);
    if (p.form() == ProgramForm::normal) {
        // t(y) = max s2ᵀz subject to B2 z = b2 - A2 y, z in its sign pattern
        dvec rhs = p.rhs2;
        if (p.num_y() > 0) {
            dvec ay = matvec(p.a2, y);
            for (std::size_t i = 0; i < rhs.size(); ++i)
                rhs[i] -= ay[i];
        }
        LpProblem zlp;
        zlp.c = p.s2;
        zlp.a = p.b2;
        zlp.b = rhs;
        LpSolution zs = solve_lp_with_free_vars(zlp, p.free_z);
        if (zs.status == LpStatus::infeasible)
            throw YInfeasible("exact_response_value: no feasible z for this y");
        if (zs.status == LpStatus::unbounded)
            throw YUnbounded("exact_response_value: s2ᵀz unbounded");
        v += zs.objective;
    }
    return v;
}

/**
 * Best approximate solution over a set of stored response planes: for each
 * plane solves max over (y,z) ∈ Y of its value and returns the best plane's
 * assignment together with max_y g̃(y).
 */
inline std::pair<Assignment, double> extract_incumbent(const BilinearProgram& p,
                                                       const std::vector<ResponsePlane>& planes) {
    if (planes.empty()) throw std::invalid_argument("extract_incumbent: no planes");
    double best = -std::numeric_limits<double>::infinity();
    Assignment a;
    for (const ResponsePlane& plane : planes) {
        LpSolution s = detail::solve_side2(p, plane.slope, dvec(p.num_z(), 0.0));
        if (s.status == LpStatus::infeasible) throw YInfeasible("extract_incumbent: Y empty");
        if (s.status == LpStatus::unbounded)
            throw YUnbounded("extract_incumbent: plane value unbounded over Y");
        double v = plane.offset + s.objective;
        if (v > best) {
            best = v;
            a.x = plane.x;
            a.w = plane.w;
            a.y.assign(s.x.begin(), s.x.begin() + static_cast<std::ptrdiff_t>(p.num_y()));
            a.z.assign(s.x.begin() + static_cast<std::ptrdiff_t>(p.num_y()), s.x.end());
        }
    }
    return {a, best};
}

} // namespace bilp
