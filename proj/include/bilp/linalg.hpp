#pragma once

#include "bilp/matrix.hpp"

#include <algorithm>
#include <numeric>

namespace bilp {

struct SingularMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotSymmetric : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace tol {
// centralized numeric tolerances for the linear algebra kernels
inline constexpr double pivot = 1e-12;       // elimination pivot floor
inline constexpr double reconstruct = 1e-8;  // factorization residual target
inline constexpr double symmetry = 1e-10;    // symmetric_eig input check
} // namespace tol

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Throws SingularMatrix when a pivot falls below tol::pivot.
inline dvec solve_linear(const DenseMatrix& a, const dvec& b) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DimensionMismatch("solve_linear: matrix not square");
    if (b.size() != n) throw DimensionMismatch("solve_linear: rhs size mismatch");

    DenseMatrix m = a;
    dvec rhs = b;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(m(r, k)) > std::abs(m(piv, k))) piv = r;
        if (std::abs(m(piv, k)) < tol::pivot)
            throw SingularMatrix("solve_linear: pivot below tolerance");
        if (piv != k) {
            for (std::size_t c = k; c < n; ++c)
                std::swap(m(k, c), m(piv, c));
            std::swap(rhs[k], rhs[piv]);
        }
        for (std::size_t r = k + 1; r < n; ++r) {
            double f = m(r, k) / m(k, k);
            if (f == 0.0) continue;
            m(r, k) = 0.0;
            for (std::size_t c = k + 1; c < n; ++c)
                m(r, c) -= f * m(k, c);
            rhs[r] -= f * rhs[k];
        }
    }
    dvec x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t c = i + 1; c < n; ++c)
            s -= m(i, c) * x[c];
        x[i] = s / m(i, i);
    }
    return x;
}

struct EigenDecomposition {
    dvec eigenvalues;          // descending
    DenseMatrix eigenvectors;  // unit-norm columns, same order
};

/**
 * Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
 * Robust and accurate for the small dense matrices this library deals with.
 * Eigenvalues are returned in descending order with matching eigenvector
 * columns. Throws NotSymmetric when max|M - Mᵀ| exceeds the symmetry tolerance.
 */
inline EigenDecomposition symmetric_eig(const DenseMatrix& m_in) {
    const std::size_t n = m_in.rows();
    if (m_in.cols() != n) throw DimensionMismatch("symmetric_eig: matrix not square");
    double scale = 1.0 + m_in.max_abs();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(m_in(i, j) - m_in(j, i)) > tol::symmetry * scale)
                throw NotSymmetric("symmetric_eig: input not symmetric");

    DenseMatrix a = m_in;
    // symmetrize exactly so rotations preserve symmetry bit-for-bit
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = v;
            a(j, i) = v;
        }
    DenseMatrix v = DenseMatrix::identity(n);

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                s += a(i, j) * a(i, j);
        return std::sqrt(2.0 * s);
    };

    const double stop = 1e-14 * scale * static_cast<double>(n);
    for (int sweep = 0; sweep < 64 && off_norm() > stop; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                double tau = s / (1.0 + c);
                double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r != p && r != q) {
                        double arp = a(r, p), arq = a(r, q);
                        a(r, p) = arp - s * (arq + tau * arp);
                        a(p, r) = a(r, p);
                        a(r, q) = arq + s * (arp - tau * arq);
                        a(q, r) = a(r, q);
                    }
                    double vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = vrp - s * (vrq + tau * vrp);
                    v(r, q) = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = DenseMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]);
        for (std::size_t r = 0; r < n; ++r)
            out.eigenvectors(r, k) = v(r, order[k]);
    }
    return out;
}

struct SvdResult {
    DenseMatrix u;        // m × k
    dvec singular_values; // k = min(m, n), descending, nonnegative
    DenseMatrix vt;       // k × n
};

namespace detail {

// Appends orthonormal columns to fill `mat` (m × k, first `filled` columns
// orthonormal) using canonical basis vectors, deterministically.
inline void complete_orthonormal(DenseMatrix& mat, std::size_t filled) {
    const std::size_t m = mat.rows(), k = mat.cols();
    std::size_t next_canonical = 0;
    for (std::size_t c = filled; c < k; ++c) {
        dvec cand;
        double nrm = 0.0;
        while (next_canonical < m) {
            cand.assign(m, 0.0);
            cand[next_canonical++] = 1.0;
            for (std::size_t j = 0; j < c; ++j) {
                double proj = 0.0;
                for (std::size_t r = 0; r < m; ++r)
                    proj += cand[r] * mat(r, j);
                for (std::size_t r = 0; r < m; ++r)
                    cand[r] -= proj * mat(r, j);
            }
            nrm = l2_norm(cand);
            if (nrm > 0.5) break;
        }
        if (nrm <= 0.5)
            throw SingularMatrix("complete_orthonormal: no independent direction left");
        for (std::size_t r = 0; r < m; ++r)
            mat(r, c) = cand[r] / nrm;
    }
}

} // namespace detail

/**
 * Singular value decomposition M = U diag(σ) Vᵀ via the eigendecomposition of
 * the smaller of MᵀM and MMᵀ, with the second factor recovered from M itself
 * so the signs stay consistent. Columns for numerically zero singular values
 * are completed to an orthonormal set.
 */
inline SvdResult svd(const DenseMatrix& m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    const std::size_t k = std::min(rows, cols);
    SvdResult out;
    out.singular_values.assign(k, 0.0);
    out.u = DenseMatrix(rows, k);
    out.vt = DenseMatrix(k, cols);
    if (k == 0) return out;

    const bool use_right = cols <= rows; // eigendecompose the smaller Gram matrix
    const DenseMatrix gram = use_right ? multiply(m.transpose(), m) : multiply(m, m.transpose());
    EigenDecomposition eig = symmetric_eig(gram);

    double sigma_max = std::sqrt(std::max(0.0, eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues[0]));
    double floor_sigma = 1e-13 * std::max(1.0, sigma_max);

    DenseMatrix v(cols, k), u(rows, k);
    std::size_t filled = 0;
    for (std::size_t i = 0; i < k; ++i) {
        double sigma = std::sqrt(std::max(0.0, eig.eigenvalues[i]));
        out.singular_values[i] = sigma;
        dvec w = eig.eigenvectors.col(i);
        if (sigma > floor_sigma) {
            if (use_right) {
                v.set_col(i, w);
                dvec uw = matvec(m, w);
                for (double& x : uw) x /= sigma;
                u.set_col(i, uw);
            } else {
                u.set_col(i, w);
                dvec vw = tmatvec(m, w);
                for (double& x : vw) x /= sigma;
                v.set_col(i, vw);
            }
            filled = i + 1;
        } else {
            out.singular_values[i] = std::max(0.0, sigma);
        }
    }
    if (use_right) {
        for (std::size_t i = filled; i < k; ++i)
            v.set_col(i, eig.eigenvectors.col(i));
        detail::complete_orthonormal(u, filled);
    } else {
        for (std::size_t i = filled; i < k; ++i)
            u.set_col(i, eig.eigenvectors.col(i));
        detail::complete_orthonormal(v, filled);
    }
    out.u = u;
    out.vt = v.transpose();
    return out;
}

/// Largest singular value of M (0 for an all-zero or empty matrix).
inline double spectral_norm(const DenseMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    const bool use_right = m.cols() <= m.rows();
    const DenseMatrix gram = use_right ? multiply(m.transpose(), m) : multiply(m, m.transpose());
    EigenDecomposition eig = symmetric_eig(gram);
    double lmax = eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues[0];
    return std::sqrt(std::max(0.0, lmax));
}

} // namespace bilp
