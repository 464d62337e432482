#pragma once

#include "tor/real.hpp"

#include <algorithm>
#include <cassert>
#include <vector>

namespace tor {

/* Dense row-major matrix. */
template <class T>
struct Matrix {
    int rows = 0, cols = 0;
    std::vector<T> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, T(0)) {}

    T &operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const T &operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static Matrix identity(int n)
    {
        Matrix m(n, n);
        for (int i = 0; i < n; i++)
            m(i, i) = T(1);
        return m;
    }

    Matrix operator*(const Matrix &o) const
    {
        assert(cols == o.rows);
        Matrix r(rows, o.cols);
        for (int i = 0; i < rows; i++)
            for (int k = 0; k < cols; k++) {
                const T &x = (*this)(i, k);
                if (x == 0)
                    continue;
                for (int j = 0; j < o.cols; j++)
                    r(i, j) += x * o(k, j);
            }
        return r;
    }
    std::vector<T> operator*(const std::vector<T> &v) const
    {
        assert(static_cast<int>(v.size()) == cols);
        std::vector<T> r(rows, T(0));
        for (int i = 0; i < rows; i++)
            for (int j = 0; j < cols; j++)
                r[i] += (*this)(i, j) * v[j];
        return r;
    }
    Matrix operator+(const Matrix &o) const
    {
        Matrix r = *this;
        for (size_t i = 0; i < a.size(); i++)
            r.a[i] += o.a[i];
        return r;
    }
    Matrix operator-(const Matrix &o) const
    {
        Matrix r = *this;
        for (size_t i = 0; i < a.size(); i++)
            r.a[i] -= o.a[i];
        return r;
    }
    Matrix scaled(const T &s) const
    {
        Matrix r = *this;
        for (auto &x : r.a)
            x *= s;
        return r;
    }
    Matrix transpose() const
    {
        Matrix r(cols, rows);
        for (int i = 0; i < rows; i++)
            for (int j = 0; j < cols; j++)
                r(j, i) = (*this)(i, j);
        return r;
    }
    bool operator==(const Matrix &o) const
    {
        return rows == o.rows && cols == o.cols && a == o.a;
    }
    std::vector<T> col(int j) const
    {
        std::vector<T> v(rows);
        for (int i = 0; i < rows; i++)
            v[i] = (*this)(i, j);
        return v;
    }
};

using IMat = Matrix<Int>;
using QMat = Matrix<Rat>;
using RMat = Matrix<Real>;
using DMat = Matrix<double>;

template <class T, class U>
Matrix<U> convert(const Matrix<T> &m)
{
    Matrix<U> r(m.rows, m.cols);
    for (size_t i = 0; i < m.a.size(); i++)
        r.a[i] = U(m.a[i]);
    return r;
}

RMat to_real(const QMat &m);
RMat to_real(const IMat &m);
DMat to_double(const RMat &m);

IMat ipow(const IMat &g, long e); /* e >= 0 */
Int det(const IMat &m);           /* Bareiss */
Rat det(const QMat &m);
Real det(const RMat &m);
QMat inverse(const QMat &m);      /* throws Singular */
RMat inverse(const RMat &m);
IMat inverse_unimodular(const IMat &m);

/* Characteristic polynomial, ascending coefficients, monic. */
std::vector<Int> charpoly(const IMat &m);
std::vector<Rat> charpoly(const QMat &m);

/* Rank over Q. */
int rank(const QMat &m);

/* Basis of the right kernel over Q, one vector per column of the result. */
std::vector<std::vector<Rat>> kernel(const QMat &m);

/* Singular values, descending. One-sided Jacobi. */
std::vector<Real> singular_values(const RMat &m);
Real opnorm(const RMat &m);

/* Eigen-decomposition of a real symmetric matrix: values ascending, vectors as columns. */
void symmetric_eigen(const RMat &s, std::vector<Real> &vals, RMat &vecs);

/* Hermite normal form (row style, upper triangular, positive pivots) with
   unimodular U such that U * m = H. Rows of m need not be independent. */
void hnf(const IMat &m, IMat &h, IMat &u);

/* Integer LLL on the rows of b (delta = 3/4). Exact rational Gram-Schmidt. */
IMat lll(const IMat &b);

} // namespace tor
