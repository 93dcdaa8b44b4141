#pragma once

// Self-contained linear algebra for desk-scale saddle-point problems:
// a small row-major dense matrix, compressed sparse rows assembled from
// triplets, a pivoted band LU direct solver, and a Jacobi eigensolver.

#include <cstddef>
#include <initializer_list>
#include <map>
#include <span>
#include <vector>

#include "stokeslab/error.hpp"

namespace stokeslab {

using Vector = std::vector<double>;

/// Dynamically sized row-major dense matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    /// n x 1 column matrix from a vector.
    static Matrix column(std::span<const double> v);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

    [[nodiscard]] Matrix transpose() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);

/// Largest absolute entry.
double max_abs(const Matrix& a);
double frobenius_norm(const Matrix& a);
double dot(std::span<const double> a, std::span<const double> b);
double norm_inf(std::span<const double> a);

/// Kronecker product: an (n*p) x (m*q) matrix with blocks a(i,j) * b.
Matrix kron(const Matrix& a, const Matrix& b);

/// Row-major stacking: (a11 .. a1m, a21 .. a2m, ..., an1 .. anm).
Vector vec(const Matrix& a);

/// Inverse of a small dense matrix by Gauss-Jordan with partial pivoting.
/// Throws SingularMatrixError when a pivot drops below 1e-14 times the largest entry.
Matrix dense_inverse(const Matrix& a);

/// Lower-triangular Cholesky factor L with a = L L^T. Throws SingularMatrixError
/// if a is not symmetric positive definite.
Matrix cholesky(const Matrix& a);

struct EigenDecomposition {
    Vector values;   ///< ascending
    Matrix vectors;  ///< column k pairs with values[k]
    int sweeps = 0;
};

/// Cyclic Jacobi on (a + a^T) / 2. Stops once the off-diagonal Frobenius norm
/// is below 1e-12 ||a||_F or after 100 sweeps.
EigenDecomposition eig_sym(const Matrix& a);

/// Solves s q = lambda m q for symmetric s and SPD m by Cholesky reduction.
/// Eigenvectors are m-orthonormal.
EigenDecomposition eig_sym_generalized(const Matrix& s, const Matrix& m);

// ---------------------------------------------------------------------------
// Sparse storage

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Compressed sparse row matrix. Duplicate triplets are summed after a
/// (row, col, value) sort, so the result does not depend on triplet order.
class SparseMatrix {
public:
    SparseMatrix() = default;
    static SparseMatrix from_triplets(std::size_t n_rows, std::size_t n_cols,
                                      std::vector<Triplet> triplets);

    [[nodiscard]] std::size_t rows() const noexcept { return n_rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return n_cols_; }
    [[nodiscard]] std::size_t nonzeros() const noexcept { return values_.size(); }

    /// Entry (i, j), zero if not stored.
    [[nodiscard]] double at(std::size_t i, std::size_t j) const;

    [[nodiscard]] std::span<const std::size_t> row_cols(std::size_t i) const {
        return {col_index_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
    }
    [[nodiscard]] std::span<const double> row_values(std::size_t i) const {
        return {values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
    }
    [[nodiscard]] std::span<double> row_values(std::size_t i) {
        return {values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
    }

    [[nodiscard]] Vector multiply(std::span<const double> x) const;
    [[nodiscard]] Matrix to_dense() const;
    [[nodiscard]] double max_abs() const;
    /// Max absolute row sum.
    [[nodiscard]] double norm_inf() const;

    bool operator==(const SparseMatrix&) const = default;

private:
    std::size_t n_rows_ = 0;
    std::size_t n_cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_index_;
    std::vector<double> values_;
};

/// Square system with Dirichlet-type constraints (dof -> prescribed value).
class LinearSystem {
public:
    LinearSystem() = default;
    LinearSystem(SparseMatrix matrix, Vector rhs);

    [[nodiscard]] const SparseMatrix& matrix() const noexcept { return matrix_; }
    [[nodiscard]] const Vector& rhs() const noexcept { return rhs_; }
    [[nodiscard]] Vector& rhs() noexcept { return rhs_; }
    [[nodiscard]] std::size_t size() const noexcept { return rhs_.size(); }

    /// Prescribe a dof value. A repeated dof keeps the last value.
    void constrain(std::size_t dof, double value);
    [[nodiscard]] const std::map<std::size_t, double>& constraints() const noexcept {
        return constraints_;
    }
    [[nodiscard]] bool constraints_applied() const noexcept { return applied_; }

    /// Row/column elimination: constrained rows and columns are zeroed, the
    /// diagonal set to one, and the eliminated columns moved to the right-hand side.
    void apply_constraints();

private:
    SparseMatrix matrix_;
    Vector rhs_;
    std::map<std::size_t, double> constraints_;
    bool applied_ = false;
};

enum class SingularPolicy {
    raise,           ///< throw SingularMatrixError on a tiny pivot
    free_variables,  ///< treat dependent columns as free variables set to zero
};

struct SolveOptions {
    SingularPolicy singular = SingularPolicy::raise;
    /// Pivots below this times max |a_ij| count as zero.
    double pivot_tolerance = 1e-14;
    /// Iterative refinement steps on nonsingular systems (stops early once
    /// the residual no longer decreases).
    int refinement_steps = 2;
};

struct SolveStats {
    double relative_residual = 0.0;  ///< ||Ax-b||_inf / (||A||_inf ||x||_inf + ||b||_inf)
    std::size_t lower_bandwidth = 0;
    std::size_t upper_bandwidth = 0;
    std::size_t deficient_pivots = 0;  ///< columns treated as free variables
    bool reordered = false;            ///< reverse Cuthill-McKee ordering was used
};

/// LU factorization with partial pivoting of a band matrix. Fill from row
/// interchanges stays inside kl extra super-diagonals, so this is dense
/// partial-pivoting LU restricted to the profile that can ever be nonzero.
class BandLU {
public:
    BandLU(std::size_t n, std::size_t kl, std::size_t ku);
    static BandLU from_dense(const Matrix& a);

    /// Entry of the unfactored matrix; (i, j) must lie inside the band.
    void set(std::size_t i, std::size_t j, double value);

    /// Factor in place. `scale` is the reference magnitude for the pivot test.
    void factor(double scale, const SolveOptions& options);

    [[nodiscard]] Vector solve(Vector b) const;
    [[nodiscard]] std::size_t deficient_pivots() const noexcept { return deficient_.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return n_; }

private:
    double& at(std::size_t i, std::size_t j) { return ab_[j * ldab_ + (kv_ + i - j)]; }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const {
        return ab_[j * ldab_ + (kv_ + i - j)];
    }

    std::size_t n_, kl_, ku_, kv_, ldab_;
    std::vector<double> ab_;
    std::vector<std::size_t> pivot_row_;
    std::vector<std::size_t> deficient_;
    std::vector<char> is_free_;
    bool factored_ = false;
};

/// Reverse Cuthill-McKee permutation of the symmetrized pattern;
/// perm[new_index] = old_index.
std::vector<std::size_t> reverse_cuthill_mckee(const SparseMatrix& a);

/// Direct solve of a constrained system (constraints must already be applied).
/// Uses band LU with partial pivoting, in natural or RCM order, whichever has
/// the smaller band.
Vector solve_direct(const LinearSystem& system, const SolveOptions& options = {},
                    SolveStats* stats = nullptr);

}  // namespace stokeslab
