#include <algorithm>
#include <cmath>
#include <numeric>

#include "stokeslab/linalg.hpp"

namespace stokeslab {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalTolerance = 1e-12;

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

// Forward substitution L y = b for every column of b.
Matrix lower_solve(const Matrix& l, const Matrix& b) {
    const std::size_t n = l.rows();
    Matrix y = b;
    for (std::size_t c = 0; c < b.cols(); ++c)
        for (std::size_t i = 0; i < n; ++i) {
            double s = y(i, c);
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y(k, c);
            y(i, c) = s / l(i, i);
        }
    return y;
}

// Back substitution L^T x = b for every column of b.
Matrix lower_transpose_solve(const Matrix& l, const Matrix& b) {
    const std::size_t n = l.rows();
    Matrix x = b;
    for (std::size_t c = 0; c < b.cols(); ++c)
        for (std::size_t ii = n; ii-- > 0;) {
            double s = x(ii, c);
            for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x(k, c);
            x(ii, c) = s / l(ii, ii);
        }
    return x;
}

}  // namespace

EigenDecomposition eig_sym(const Matrix& input) {
    if (input.rows() != input.cols()) throw ConfigError("eig_sym: matrix is not square");
    const std::size_t n = input.rows();
    Matrix a = 0.5 * (input + input.transpose());
    Matrix v = Matrix::identity(n);

    const double target = kOffDiagonalTolerance * frobenius_norm(a);
    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a) <= target) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    EigenDecomposition out;
    out.sweeps = sweep;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

EigenDecomposition eig_sym_generalized(const Matrix& s, const Matrix& m) {
    if (s.rows() != m.rows() || s.cols() != m.cols())
        throw ConfigError("eig_sym_generalized: size mismatch");
    const Matrix l = cholesky(m);
    const Matrix sym = 0.5 * (s + s.transpose());
    // C = L^-1 S L^-T
    const Matrix x = lower_solve(l, sym);
    const Matrix c = lower_solve(l, x.transpose());
    EigenDecomposition out = eig_sym(c);
    out.vectors = lower_transpose_solve(l, out.vectors);
    return out;
}

}  // namespace stokeslab
