#pragma once

#include "bilp/bilinear.hpp"

namespace bilp {

/**
 * Two-player game where each player solves a linear program against the
 * other's strategy:
 *
 *   player 1:  max r1ᵀx + xᵀC1·y   s.t.  A1 x = b1, x ≥ 0
 *   player 2:  max r2ᵀy + xᵀC2·y   s.t.  A2 y = b2, y ≥ 0
 */
struct GameSpec {
    dvec r1, r2;
    DenseMatrix c1, c2;
    DenseMatrix a1;
    dvec b1;
    DenseMatrix a2;
    dvec b2;
};

/// Normal-form game from payoff matrices: mixed strategies on the simplex.
inline GameSpec normal_form_game(const DenseMatrix& payoff1, const DenseMatrix& payoff2) {
    if (payoff1.rows() != payoff2.rows() || payoff1.cols() != payoff2.cols())
        throw DimensionMismatch("normal_form_game: payoff shapes differ");
    GameSpec g;
    g.c1 = payoff1;
    g.c2 = payoff2;
    g.r1.assign(payoff1.rows(), 0.0);
    g.r2.assign(payoff1.cols(), 0.0);
    g.a1 = DenseMatrix(1, payoff1.rows(), dvec(payoff1.rows(), 1.0));
    g.b1 = {1.0};
    g.a2 = DenseMatrix(1, payoff1.cols(), dvec(payoff1.cols(), 1.0));
    g.b2 = {1.0};
    return g;
}

inline void validate_game(const GameSpec& g) {
    std::size_t nx = g.r1.size(), ny = g.r2.size();
    if (g.c1.rows() != nx || g.c1.cols() != ny || g.c2.rows() != nx || g.c2.cols() != ny)
        throw DimensionMismatch("game: payoff matrix shape");
    if (g.a1.cols() != nx || g.b1.size() != g.a1.rows())
        throw DimensionMismatch("game: player-1 constraint shape");
    if (g.a2.cols() != ny || g.b2.size() != g.a2.rows())
        throw DimensionMismatch("game: player-2 constraint shape");
}

/// Payoffs the two players receive at a strategy profile.
inline std::pair<double, double> game_values(const GameSpec& g, const dvec& x, const dvec& y) {
    return {dot(g.r1, x) + dot(x, matvec(g.c1, y)), dot(g.r2, y) + dot(x, matvec(g.c2, y))};
}

/**
 * Equilibrium search as a separable bilinear program over primal strategies
 * and the opponents' dual variables. The compiled program maximizes
 *
 *   r1ᵀx + r2ᵀy + xᵀ(C1+C2)y − b1ᵀλ1 − b2ᵀλ2
 *
 * subject to primal feasibility, the dual-feasibility rows
 * r1 + C1·y − A1ᵀλ1 ≤ 0 and r2 + C2ᵀx − A2ᵀλ2 ≤ 0, and a data-derived box on
 * the duals. Every feasible point has objective ≤ 0 by weak duality, and the
 * value 0 is attained exactly at Nash equilibria, so a solver result of 0
 * certifies one. The dual box keeps both feasible sets bounded; it provably
 * contains an equilibrium's duals for normal-form (row-of-ones) constraints.
 */
inline BilinearProgram compile_game(const GameSpec& g) {
    validate_game(g);
    const std::size_t nx = g.r1.size(), ny = g.r2.size();
    const std::size_t m1 = g.a1.rows(), m2 = g.a2.rows();

    auto box_bound = [](const dvec& r, const DenseMatrix& c, const dvec& b_other) {
        double b_mass = 1.0;
        for (double v : b_other)
            b_mass += std::abs(v);
        return 1.0 + linf_norm(r) + c.max_abs() * b_mass;
    };
    const double box1 = box_bound(g.r1, g.c1, g.b2); // bound for λ1
    const double box2 = box_bound(g.r2, g.c2, g.b1); // bound for λ2

    // side 1 variables: x | λ2 (free), slack of the player-2 dual rows,
    // slacks of the λ2 box rows
    BilinearProgram p;
    const std::size_t w_count = m2 + ny + 2 * m2;
    const std::size_t rows1 = m1 + ny + 2 * m2;
    p.a1 = DenseMatrix(rows1, nx);
    p.b1 = DenseMatrix(rows1, w_count);
    p.rhs1.assign(rows1, 0.0);
    for (std::size_t i = 0; i < m1; ++i) {
        for (std::size_t j = 0; j < nx; ++j)
            p.a1(i, j) = g.a1(i, j);
        p.rhs1[i] = g.b1[i];
    }
    for (std::size_t i = 0; i < ny; ++i) {
        std::size_t row = m1 + i;
        for (std::size_t j = 0; j < nx; ++j)
            p.a1(row, j) = g.c2(j, i); // (C2ᵀ x)_i
        for (std::size_t k = 0; k < m2; ++k)
            p.b1(row, k) = -g.a2(k, i); // -(A2ᵀ λ2)_i
        p.b1(row, m2 + i) = 1.0;        // slack
        p.rhs1[row] = -g.r2[i];
    }
    for (std::size_t k = 0; k < m2; ++k) {
        std::size_t up = m1 + ny + k, down = m1 + ny + m2 + k;
        p.b1(up, k) = 1.0;
        p.b1(up, m2 + ny + k) = 1.0;
        p.rhs1[up] = box2;
        p.b1(down, k) = -1.0;
        p.b1(down, m2 + ny + m2 + k) = 1.0;
        p.rhs1[down] = box2;
    }
    p.r1 = g.r1;
    p.s1.assign(w_count, 0.0);
    for (std::size_t k = 0; k < m2; ++k)
        p.s1[k] = -g.b2[k];
    for (std::size_t k = 0; k < m2; ++k)
        p.free_w.push_back(k);

    // side 2 variables: y | λ1 (free), slack of the player-1 dual rows,
    // slacks of the λ1 box rows
    const std::size_t z_count = m1 + nx + 2 * m1;
    const std::size_t rows2 = m2 + nx + 2 * m1;
    p.a2 = DenseMatrix(rows2, ny);
    p.b2 = DenseMatrix(rows2, z_count);
    p.rhs2.assign(rows2, 0.0);
    for (std::size_t i = 0; i < m2; ++i) {
        for (std::size_t j = 0; j < ny; ++j)
            p.a2(i, j) = g.a2(i, j);
        p.rhs2[i] = g.b2[i];
    }
    for (std::size_t i = 0; i < nx; ++i) {
        std::size_t row = m2 + i;
        for (std::size_t j = 0; j < ny; ++j)
            p.a2(row, j) = g.c1(i, j); // (C1 y)_i
        for (std::size_t k = 0; k < m1; ++k)
            p.b2(row, k) = -g.a1(k, i); // -(A1ᵀ λ1)_i
        p.b2(row, m1 + i) = 1.0;
        p.rhs2[row] = -g.r1[i];
    }
    for (std::size_t k = 0; k < m1; ++k) {
        std::size_t up = m2 + nx + k, down = m2 + nx + m1 + k;
        p.b2(up, k) = 1.0;
        p.b2(up, m1 + nx + k) = 1.0;
        p.rhs2[up] = box1;
        p.b2(down, k) = -1.0;
        p.b2(down, m1 + nx + m1 + k) = 1.0;
        p.rhs2[down] = box1;
    }
    p.r2 = g.r2;
    p.s2.assign(z_count, 0.0);
    for (std::size_t k = 0; k < m1; ++k)
        p.s2[k] = -g.b1[k];
    for (std::size_t k = 0; k < m1; ++k)
        p.free_z.push_back(k);

    p.coupling = DenseMatrix(nx, ny);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j)
            p.coupling(i, j) = g.c1(i, j) + g.c2(i, j);
    return p;
}

} // namespace bilp
