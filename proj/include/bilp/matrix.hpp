#pragma once

#include "bilp/definitions.hpp"

#include <algorithm>
#include <cassert>

namespace bilp {

/// Dense row-major real matrix. Small and value-semantic; everything in this
/// library is desk scale, so no sparsity or expression templates.
class DenseMatrix {
  public:
    DenseMatrix() = default;

    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    DenseMatrix(std::size_t rows, std::size_t cols, dvec entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != rows_ * cols_)
            throw DimensionMismatch("DenseMatrix: entries length != rows*cols");
    }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t r, std::size_t c) {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }
    double operator()(std::size_t r, std::size_t c) const {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }

    const dvec& data() const { return data_; }
    dvec& data() { return data_; }

    dvec row(std::size_t r) const {
        return dvec(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                    data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
    }

    dvec col(std::size_t c) const {
        dvec v(rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            v[r] = (*this)(r, c);
        return v;
    }

    void set_col(std::size_t c, const dvec& v) {
        if (v.size() != rows_) throw DimensionMismatch("set_col: size mismatch");
        for (std::size_t r = 0; r < rows_; ++r)
            (*this)(r, c) = v[r];
    }

    DenseMatrix transpose() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                t(c, r) = (*this)(r, c);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : data_)
            m = std::max(m, std::abs(x));
        return m;
    }

    bool operator==(const DenseMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    dvec data_;
};

inline dvec matvec(const DenseMatrix& a, const dvec& x) {
    if (a.cols() != x.size()) throw DimensionMismatch("matvec: size mismatch");
    dvec y(a.rows(), 0.0);
    for (std::size_t r = 0; r < a.rows(); ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < a.cols(); ++c)
            s += a(r, c) * x[c];
        y[r] = s;
    }
    return y;
}

/// Computes Aᵀx without forming the transpose.
inline dvec tmatvec(const DenseMatrix& a, const dvec& x) {
    if (a.rows() != x.size()) throw DimensionMismatch("tmatvec: size mismatch");
    dvec y(a.cols(), 0.0);
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c)
            y[c] += a(r, c) * x[r];
    return y;
}

inline DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("multiply: size mismatch");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += aik * b(k, j);
        }
    return c;
}

inline DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) { return multiply(a, b); }

inline DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("subtract: size mismatch");
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.data().size(); ++i)
        c.data()[i] -= b.data()[i];
    return c;
}

/// Stacks [top; bottom] vertically; column counts must match (empty blocks allowed).
inline DenseMatrix vstack(const DenseMatrix& top, const DenseMatrix& bottom) {
    if (top.rows() == 0) return bottom;
    if (bottom.rows() == 0) return top;
    if (top.cols() != bottom.cols()) throw DimensionMismatch("vstack: cols mismatch");
    DenseMatrix r(top.rows() + bottom.rows(), top.cols());
    for (std::size_t i = 0; i < top.rows(); ++i)
        for (std::size_t j = 0; j < top.cols(); ++j)
            r(i, j) = top(i, j);
    for (std::size_t i = 0; i < bottom.rows(); ++i)
        for (std::size_t j = 0; j < bottom.cols(); ++j)
            r(top.rows() + i, j) = bottom(i, j);
    return r;
}

/// Stacks [left, right] horizontally; row counts must match (empty blocks allowed).
inline DenseMatrix hstack(const DenseMatrix& left, const DenseMatrix& right) {
    if (left.cols() == 0 && left.rows() == 0) return right;
    if (right.cols() == 0 && right.rows() == 0) return left;
    std::size_t rows = std::max(left.rows(), right.rows());
    if ((left.rows() != rows && left.cols() > 0) || (right.rows() != rows && right.cols() > 0))
        throw DimensionMismatch("hstack: rows mismatch");
    DenseMatrix r(rows, left.cols() + right.cols());
    for (std::size_t i = 0; i < left.rows(); ++i)
        for (std::size_t j = 0; j < left.cols(); ++j)
            r(i, j) = left(i, j);
    for (std::size_t i = 0; i < right.rows(); ++i)
        for (std::size_t j = 0; j < right.cols(); ++j)
            r(i, left.cols() + j) = right(i, j);
    return r;
}

} // namespace bilp
