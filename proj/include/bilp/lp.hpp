#pragma once

#include "bilp/matrix.hpp"

#include <cstdint>
#include <limits>

namespace bilp {

enum class LpStatus { optimal, infeasible, unbounded };

/**
 * Linear program over nonnegative variables:
 *
 *   max (or min)  cᵀx
 *   subject to    A x = b          (equality rows)
 *                 G x ≤ h          (optional inequality rows)
 *                 x ≥ 0            (except variables listed as free)
 *
 * Either row block may be empty.
 */
struct LpProblem {
    dvec c;
    bool maximize = true;
    DenseMatrix a; // equality rows
    dvec b;
    DenseMatrix g; // inequality rows, G x <= h
    dvec h;
};

/**
 * Solution with dual values, one per row (equality rows first, then
 * inequality rows). Duals follow the maximization convention: for an optimal
 * solution, cᵀx = bᵀλ_eq + hᵀλ_ineq and Aᵀλ + Gᵀλ ≥ c holds componentwise on
 * the nonnegative variables. For sense=min the reported duals are negated
 * internally so the same identities hold.
 */
struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    dvec x;
    dvec duals;
    double objective = 0.0;
};

namespace lp_tol {
inline constexpr double feasibility = 1e-9; // zero threshold for entries and ratios
inline constexpr double phase1 = 1e-7;      // residual above this means infeasible
inline constexpr double reduced_cost = 1e-9;
} // namespace lp_tol

// Deterministic work counter: total simplex pivots executed in this thread.
// Serves as the machine-independent time proxy reported in traces.
inline thread_local std::uint64_t simplex_pivot_count = 0;

namespace detail {

class SimplexTableau {
  public:
    // columns: [structural (incl. splits) | slacks | artificials | rhs]
    SimplexTableau(const DenseMatrix& rows, const dvec& rhs, std::size_t n_struct,
                   std::size_t n_slack)
        : m_(rows.rows()), n_struct_(n_struct), n_slack_(n_slack),
          n_total_(n_struct + n_slack + rows.rows()), tab_(rows.rows(), n_struct + n_slack + rows.rows() + 1),
          basis_(rows.rows()), row_sign_(rows.rows(), 1.0) {
        for (std::size_t i = 0; i < m_; ++i) {
            double sign = rhs[i] < 0.0 ? -1.0 : 1.0;
            row_sign_[i] = sign;
            for (std::size_t j = 0; j < n_struct_ + n_slack_; ++j)
                tab_(i, j) = sign * rows(i, j);
            tab_(i, art_col(i)) = 1.0;
            // deterministic lexicographic perturbation: breaks the ratio-test
            // ties that make heavily degenerate programs stall; the residual
            // it leaves is far below every solution tolerance
            tab_(i, rhs_col()) =
                sign * rhs[i] + double(i + 1) * 1e-10 * (1.0 + std::abs(rhs[i]));
            basis_[i] = art_col(i);
        }
    }

    std::size_t art_col(std::size_t i) const { return n_struct_ + n_slack_ + i; }
    std::size_t rhs_col() const { return n_total_; }

    // Phase 1: drive the artificial variables to zero. Returns the residual.
    double phase1() {
        dvec cost(n_total_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            cost[art_col(i)] = -1.0;
        set_objective(cost);
        run(/*allow_artificial=*/true);
        double residual = 0.0;
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] >= n_struct_ + n_slack_)
                residual += std::max(0.0, tab_(i, rhs_col()));
        return residual;
    }

    // Pivot remaining basic artificials out wherever a structural pivot exists.
    void drive_out_artificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_struct_ + n_slack_) continue;
            std::size_t enter = n_total_;
            for (std::size_t j = 0; j < n_struct_ + n_slack_; ++j) {
                if (std::abs(tab_(i, j)) > lp_tol::feasibility) {
                    enter = j;
                    break;
                }
            }
            if (enter < n_total_) pivot(i, enter);
            // all-zero row: redundant constraint, artificial stays basic at 0
        }
    }

    // Phase 2 with the given structural costs. Returns false when unbounded.
    bool phase2(const dvec& cost_struct) {
        dvec cost(n_total_, 0.0);
        for (std::size_t j = 0; j < cost_struct.size(); ++j)
            cost[j] = cost_struct[j];
        set_objective(cost);
        return run(/*allow_artificial=*/false);
    }

    dvec basic_solution() const {
        dvec x(n_total_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            x[basis_[i]] = tab_(i, rhs_col());
        return x;
    }

    /// Dual value of original row i, read off the reduced cost of its artificial.
    double dual(std::size_t i) const { return row_sign_[i] * obj_[art_col(i)]; }

  private:
    void set_objective(const dvec& cost) {
        cost_ = cost;
        obj_.assign(n_total_ + 1, 0.0);
        // reduced costs z_j - c_j from the current basis
        for (std::size_t j = 0; j <= n_total_; ++j) {
            double z = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                double cb = cost_[basis_[i]];
                if (cb != 0.0) z += cb * tab_(i, j);
            }
            obj_[j] = z - (j < n_total_ ? cost_[j] : 0.0);
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        double p = tab_(row, col);
        for (std::size_t j = 0; j <= n_total_; ++j)
            tab_(row, j) /= p;
        tab_(row, col) = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == row) continue;
            double f = tab_(i, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= n_total_; ++j)
                tab_(i, j) -= f * tab_(row, j);
            tab_(i, col) = 0.0;
        }
        double fo = obj_[col];
        if (fo != 0.0) {
            for (std::size_t j = 0; j <= n_total_; ++j)
                obj_[j] -= fo * tab_(row, j);
            obj_[col] = 0.0;
        }
        basis_[row] = col;
        ++simplex_pivot_count;
    }

    // Dantzig pricing, switching to Bland's rule once the degeneracy counter
    // exceeds 2*(rows+cols) pivots; guarantees termination.
    bool run(bool allow_artificial) {
        const std::size_t n_eligible = allow_artificial ? n_total_ : n_struct_ + n_slack_;
        const std::size_t degen_limit = 2 * (m_ + n_total_);
        std::size_t degenerate_pivots = 0;
        bool bland = false;
        const std::size_t max_pivots = 50000 + 400 * (m_ + n_total_);
        for (std::size_t it = 0; it < max_pivots; ++it) {
            std::size_t enter = n_total_;
            if (!bland) {
                double best = -lp_tol::reduced_cost;
                for (std::size_t j = 0; j < n_eligible; ++j)
                    if (obj_[j] < best) {
                        best = obj_[j];
                        enter = j;
                    }
            } else {
                for (std::size_t j = 0; j < n_eligible; ++j)
                    if (obj_[j] < -lp_tol::reduced_cost) {
                        enter = j;
                        break;
                    }
            }
            if (enter == n_total_) return true; // optimal

            std::size_t leave = m_;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                double a = tab_(i, enter);
                if (a <= lp_tol::feasibility) continue;
                double ratio = tab_(i, rhs_col()) / a;
                if (ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 &&
                     (leave == m_ || (bland ? basis_[i] < basis_[leave] : i < leave)))) {
                    if (ratio < best_ratio) best_ratio = ratio;
                    leave = i;
                }
            }
            if (leave == m_) return false; // unbounded direction

            if (best_ratio <= lp_tol::feasibility) {
                if (++degenerate_pivots > degen_limit) bland = true;
            } else {
                degenerate_pivots = 0;
            }
            pivot(leave, enter);
        }
        throw std::runtime_error("simplex: pivot limit exceeded");
    }

    std::size_t m_, n_struct_, n_slack_, n_total_;
    DenseMatrix tab_;
    std::vector<std::size_t> basis_;
    dvec row_sign_;
    dvec cost_;
    dvec obj_; // reduced costs z_j - c_j plus objective value in the rhs slot
};

} // namespace detail

/**
 * Two-phase primal simplex on a dense tableau. Variables listed in free_vars
 * are unrestricted in sign (split internally). Infeasibility and
 * unboundedness are reported through the status, never thrown. Deterministic:
 * identical inputs produce identical outputs bit for bit.
 */
inline LpSolution solve_lp_with_free_vars(const LpProblem& p, const index_list& free_vars) {
    const std::size_t n = p.c.size();
    const std::size_t m_eq = p.a.rows();
    const std::size_t m_in = p.g.rows();
    if ((m_eq > 0 && p.a.cols() != n) || p.b.size() != m_eq)
        throw DimensionMismatch("solve_lp: equality block mismatch");
    if ((m_in > 0 && p.g.cols() != n) || p.h.size() != m_in)
        throw DimensionMismatch("solve_lp: inequality block mismatch");

    std::vector<bool> is_free(n, false);
    for (std::size_t idx : free_vars) {
        if (idx >= n) throw DimensionMismatch("solve_lp: free index out of range");
        is_free[idx] = true;
    }
    // split columns for free variables appended after the originals
    std::vector<std::size_t> neg_col(n, 0);
    std::size_t n_struct = n;
    for (std::size_t j = 0; j < n; ++j)
        if (is_free[j]) neg_col[j] = n_struct++;

    const std::size_t m = m_eq + m_in;
    DenseMatrix rows(m, n_struct + m_in);
    dvec rhs(m, 0.0);
    for (std::size_t i = 0; i < m_eq; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            rows(i, j) = p.a(i, j);
            if (is_free[j]) rows(i, neg_col[j]) = -p.a(i, j);
        }
        rhs[i] = p.b[i];
    }
    for (std::size_t i = 0; i < m_in; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            rows(m_eq + i, j) = p.g(i, j);
            if (is_free[j]) rows(m_eq + i, neg_col[j]) = -p.g(i, j);
        }
        rows(m_eq + i, n_struct + i) = 1.0; // slack
        rhs[m_eq + i] = p.h[i];
    }

    dvec cost(n_struct + m_in, 0.0);
    const double sense = p.maximize ? 1.0 : -1.0;
    for (std::size_t j = 0; j < n; ++j) {
        cost[j] = sense * p.c[j];
        if (is_free[j]) cost[neg_col[j]] = -sense * p.c[j];
    }

    detail::SimplexTableau tab(rows, rhs, n_struct, m_in);
    LpSolution sol;
    if (m > 0) {
        double residual = tab.phase1();
        if (residual > lp_tol::phase1) {
            sol.status = LpStatus::infeasible;
            return sol;
        }
        tab.drive_out_artificials();
    }
    if (!tab.phase2(cost)) {
        sol.status = LpStatus::unbounded;
        return sol;
    }

    dvec full = tab.basic_solution();
    sol.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        sol.x[j] = full[j];
        if (is_free[j]) sol.x[j] -= full[neg_col[j]];
    }
    sol.duals.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        sol.duals[i] = sense * tab.dual(i);
    sol.objective = dot(p.c, sol.x);
    sol.status = LpStatus::optimal;
    return sol;
}

inline LpSolution solve_lp(const LpProblem& p) { return solve_lp_with_free_vars(p, {}); }

} // namespace bilp
