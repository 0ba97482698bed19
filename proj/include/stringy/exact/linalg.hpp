#pragma once

#include <optional>
#include <vector>

#include "stringy/exact/rational.hpp"

namespace stringy::exact {

using Matrix = std::vector<std::vector<Rational>>;
using Vector = std::vector<Rational>;

/// Leading principal minors det(A[0..k, 0..k]) for k = 0..n-1. Elimination
/// without pivoting; once a pivot vanishes the later minors are computed by
/// full determinants.
inline std::vector<Rational> leading_minors(Matrix a) {
    std::size_t n = a.size();
    std::vector<Rational> minors;
    Rational det(1);
    for (std::size_t k = 0; k < n; ++k) {
        if (a[k][k].is_zero()) {
            // Fall back to explicit determinants for the remaining minors.
            for (std::size_t j = k; j < n; ++j) {
                Matrix sub(j + 1, Vector(j + 1));
                for (std::size_t r = 0; r <= j; ++r)
                    for (std::size_t c = 0; c <= j; ++c) sub[r][c] = a[r][c];
                // Rows were only changed by adding multiples of earlier rows, so minors are intact.
                Rational d(1);
                for (std::size_t c = 0; c <= j; ++c) {
                    std::size_t p = c;
                    while (p <= j && sub[p][c].is_zero()) ++p;
                    if (p > j) {
                        d = Rational(0);
                        break;
                    }
                    if (p != c) {
                        std::swap(sub[p], sub[c]);
                        d = -d;
                    }
                    d *= sub[c][c];
                    for (std::size_t r = c + 1; r <= j; ++r) {
                        if (sub[r][c].is_zero()) continue;
                        Rational f = sub[r][c] / sub[c][c];
                        for (std::size_t cc = c; cc <= j; ++cc) sub[r][cc] -= f * sub[c][cc];
                    }
                }
                minors.push_back(d);
            }
            return minors;
        }
        det *= a[k][k];
        minors.push_back(det);
        for (std::size_t r = k + 1; r < n; ++r) {
            if (a[r][k].is_zero()) continue;
            Rational f = a[r][k] / a[k][k];
            for (std::size_t c = k; c < n; ++c) a[r][c] -= f * a[k][c];
        }
    }
    return minors;
}

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> rref(Matrix& a, std::size_t cols) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t c = 0; c < cols && row < a.size(); ++c) {
        std::size_t p = row;
        while (p < a.size() && a[p][c].is_zero()) ++p;
        if (p == a.size()) continue;
        std::swap(a[p], a[row]);
        Rational inv = Rational(1) / a[row][c];
        for (auto& x : a[row]) x *= inv;
        for (std::size_t r = 0; r < a.size(); ++r) {
            if (r == row || a[r][c].is_zero()) continue;
            Rational f = a[r][c];
            for (std::size_t cc = 0; cc < a[r].size(); ++cc) a[r][cc] -= f * a[row][cc];
        }
        pivots.push_back(c);
        ++row;
    }
    return pivots;
}

/// Some solution of A x = b with free variables set to 0, or nullopt.
inline std::optional<Vector> solve_linear(const Matrix& a, const Vector& b, std::size_t cols) {
    Matrix m = a;
    for (std::size_t r = 0; r < m.size(); ++r) m[r].push_back(b[r]);
    auto pivots = rref(m, cols);
    for (std::size_t r = pivots.size(); r < m.size(); ++r)
        if (!m[r][cols].is_zero()) return std::nullopt;
    Vector x(cols, Rational(0));
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = m[r][cols];
    return x;
}

/// Basis of the null space of A (cols unknowns).
inline std::vector<Vector> null_space(const Matrix& a, std::size_t cols) {
    Matrix m = a;
    auto pivots = rref(m, cols);
    std::vector<bool> is_pivot(cols, false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<Vector> basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        Vector x(cols, Rational(0));
        x[f] = Rational(1);
        for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = -m[r][f];
        basis.push_back(std::move(x));
    }
    return basis;
}

} // namespace stringy::exact
