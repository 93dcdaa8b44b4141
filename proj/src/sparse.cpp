#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <tuple>

#include "stokeslab/linalg.hpp"

namespace stokeslab {

// ---------------------------------------------------------------------------
// SparseMatrix

SparseMatrix SparseMatrix::from_triplets(std::size_t n_rows, std::size_t n_cols,
                                         std::vector<Triplet> triplets) {
    for (const auto& t : triplets)
        if (t.row >= n_rows || t.col >= n_cols)
            throw ConfigError("SparseMatrix: triplet (" + std::to_string(t.row) + ", " +
                              std::to_string(t.col) + ") out of range");

    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return std::tie(a.row, a.col, a.value) < std::tie(b.row, b.col, b.value);
    });

    SparseMatrix m;
    m.n_rows_ = n_rows;
    m.n_cols_ = n_cols;
    m.row_ptr_.assign(n_rows + 1, 0);
    for (std::size_t k = 0; k < triplets.size();) {
        const std::size_t r = triplets[k].row;
        const std::size_t c = triplets[k].col;
        double sum = 0.0;
        for (; k < triplets.size() && triplets[k].row == r && triplets[k].col == c; ++k)
            sum += triplets[k].value;
        m.col_index_.push_back(c);
        m.values_.push_back(sum);
        ++m.row_ptr_[r + 1];
    }
    std::partial_sum(m.row_ptr_.begin(), m.row_ptr_.end(), m.row_ptr_.begin());
    return m;
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
    const auto cols = row_cols(i);
    const auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return values_[row_ptr_[i] + static_cast<std::size_t>(it - cols.begin())];
}

Vector SparseMatrix::multiply(std::span<const double> x) const {
    if (x.size() != n_cols_) throw ConfigError("SparseMatrix::multiply: size mismatch");
    Vector y(n_rows_, 0.0);
    for (std::size_t i = 0; i < n_rows_; ++i) {
        double s = 0.0;
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            s += values_[k] * x[col_index_[k]];
        y[i] = s;
    }
    return y;
}

Matrix SparseMatrix::to_dense() const {
    Matrix d(n_rows_, n_cols_);
    for (std::size_t i = 0; i < n_rows_; ++i)
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            d(i, col_index_[k]) = values_[k];
    return d;
}

double SparseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double SparseMatrix::norm_inf() const {
    double m = 0.0;
    for (std::size_t i = 0; i < n_rows_; ++i) {
        double s = 0.0;
        for (double v : row_values(i)) s += std::abs(v);
        m = std::max(m, s);
    }
    return m;
}

// ---------------------------------------------------------------------------
// LinearSystem

LinearSystem::LinearSystem(SparseMatrix matrix, Vector rhs)
    : matrix_(std::move(matrix)), rhs_(std::move(rhs)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() != rhs_.size())
        throw ConfigError("LinearSystem: matrix must be square and match the rhs size");
}

void LinearSystem::constrain(std::size_t dof, double value) {
    if (dof >= size()) throw ConfigError("LinearSystem::constrain: dof out of range");
    if (applied_) throw ConfigError("LinearSystem::constrain: constraints already applied");
    constraints_[dof] = value;
}

void LinearSystem::apply_constraints() {
    if (applied_) return;
    const std::size_t n = size();
    std::vector<char> fixed(n, 0);
    Vector value(n, 0.0);
    for (const auto& [dof, v] : constraints_) {
        fixed[dof] = 1;
        value[dof] = v;
    }

    std::vector<Triplet> kept;
    kept.reserve(matrix_.nonzeros() + constraints_.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto cols = matrix_.row_cols(i);
        const auto vals = matrix_.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const std::size_t j = cols[k];
            if (fixed[i]) continue;
            if (fixed[j]) {
                rhs_[i] -= vals[k] * value[j];
                continue;
            }
            kept.push_back({i, j, vals[k]});
        }
    }
    for (const auto& [dof, v] : constraints_) {
        kept.push_back({dof, dof, 1.0});
        rhs_[dof] = v;
    }
    matrix_ = SparseMatrix::from_triplets(n, n, std::move(kept));
    applied_ = true;
}

// ---------------------------------------------------------------------------
// BandLU

BandLU::BandLU(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), kv_(kl + ku), ldab_(2 * kl + ku + 1),
      ab_(n * (2 * kl + ku + 1), 0.0), pivot_row_(n), is_free_(n, 0) {}

BandLU BandLU::from_dense(const Matrix& a) {
    if (a.rows() != a.cols()) throw ConfigError("BandLU: matrix is not square");
    const std::size_t n = a.rows();
    const std::size_t band = n == 0 ? 0 : n - 1;
    BandLU lu(n, band, band);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) lu.set(i, j, a(i, j));
    return lu;
}

void BandLU::set(std::size_t i, std::size_t j, double value) {
    if (i > j + kl_ || j > i + ku_) throw ConfigError("BandLU::set: entry outside the band");
    at(i, j) = value;
}

void BandLU::factor(double scale, const SolveOptions& options) {
    const double tol = options.pivot_tolerance * scale;
    std::size_t ju = 0;
    for (std::size_t j = 0; j < n_; ++j) {
        const std::size_t km = std::min(kl_, n_ - 1 - j);
        std::size_t jp = 0;
        double best = std::abs(at(j, j));
        for (std::size_t r = 1; r <= km; ++r) {
            const double v = std::abs(at(j + r, j));
            if (v > best) {
                best = v;
                jp = r;
            }
        }
        pivot_row_[j] = j + jp;

        if (best <= tol) {
            if (options.singular == SingularPolicy::raise)
                throw SingularMatrixError("solve_direct: singular matrix, pivot " +
                                          std::to_string(best) + " at column " +
                                          std::to_string(j) + " (tolerance " +
                                          std::to_string(tol) + ")");
            // Dependent column: its unknown becomes a free variable fixed at zero.
            pivot_row_[j] = j;
            is_free_[j] = 1;
            deficient_.push_back(j);
            for (std::size_t r = 0; r <= km; ++r) at(j + r, j) = 0.0;
            continue;
        }

        ju = std::max(ju, std::min(j + ku_ + jp, n_ - 1));
        if (jp != 0)
            for (std::size_t c = j; c <= ju; ++c) std::swap(at(j, c), at(j + jp, c));

        const double inv_pivot = 1.0 / at(j, j);
        for (std::size_t r = 1; r <= km; ++r) at(j + r, j) *= inv_pivot;

        for (std::size_t c = j + 1; c <= ju; ++c) {
            const double u = at(j, c);
            if (u == 0.0) continue;
            double* col = &ab_[c * ldab_ + (kv_ + j - c)];
            const double* mult = &ab_[j * ldab_ + kv_];
            for (std::size_t r = 1; r <= km; ++r) col[r] -= mult[r] * u;
        }
    }
    factored_ = true;
}

Vector BandLU::solve(Vector b) const {
    if (!factored_) throw ConfigError("BandLU::solve: factor() has not been called");
    if (b.size() != n_) throw ConfigError("BandLU::solve: size mismatch");
    for (std::size_t j = 0; j < n_; ++j) {
        if (pivot_row_[j] != j) std::swap(b[j], b[pivot_row_[j]]);
        const std::size_t km = std::min(kl_, n_ - 1 - j);
        const double bj = b[j];
        if (bj == 0.0) continue;
        for (std::size_t r = 1; r <= km; ++r) b[j + r] -= at(j + r, j) * bj;
    }
    for (std::size_t jj = n_; jj-- > 0;) {
        if (is_free_[jj]) {
            b[jj] = 0.0;
            continue;
        }
        const std::size_t last = std::min(n_ - 1, jj + kv_);
        double s = b[jj];
        for (std::size_t c = jj + 1; c <= last; ++c) s -= at(jj, c) * b[c];
        b[jj] = s / at(jj, jj);
    }
    return b;
}

// ---------------------------------------------------------------------------
// Ordering

namespace {

std::vector<std::vector<std::size_t>> symmetric_adjacency(const SparseMatrix& a) {
    const std::size_t n = a.rows();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j : a.row_cols(i))
            if (i != j) {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return adj;
}

// Breadth-first levels from `root`, restricted to unvisited nodes.
std::vector<std::vector<std::size_t>> level_structure(
    const std::vector<std::vector<std::size_t>>& adj, std::size_t root,
    const std::vector<char>& visited) {
    std::vector<std::vector<std::size_t>> levels{{root}};
    std::vector<char> seen = visited;
    seen[root] = 1;
    while (true) {
        std::vector<std::size_t> next;
        for (std::size_t u : levels.back())
            for (std::size_t w : adj[u])
                if (!seen[w]) {
                    seen[w] = 1;
                    next.push_back(w);
                }
        if (next.empty()) break;
        levels.push_back(std::move(next));
    }
    return levels;
}

struct Bandwidth {
    std::size_t lower = 0;
    std::size_t upper = 0;
    [[nodiscard]] double cost() const {
        return static_cast<double>(lower + 1) * static_cast<double>(2 * lower + upper + 1);
    }
};

Bandwidth bandwidth(const SparseMatrix& a, const std::vector<std::size_t>& new_of_old) {
    Bandwidth b;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j : a.row_cols(i)) {
            const std::size_t ni = new_of_old[i];
            const std::size_t nj = new_of_old[j];
            if (ni > nj) b.lower = std::max(b.lower, ni - nj);
            if (nj > ni) b.upper = std::max(b.upper, nj - ni);
        }
    return b;
}

}  // namespace

std::vector<std::size_t> reverse_cuthill_mckee(const SparseMatrix& a) {
    const std::size_t n = a.rows();
    const auto adj = symmetric_adjacency(a);
    auto degree = [&](std::size_t v) { return adj[v].size(); };

    std::vector<char> visited(n, 0);
    std::vector<std::size_t> order;
    order.reserve(n);
    while (order.size() < n) {
        std::size_t root = n;
        for (std::size_t v = 0; v < n; ++v)
            if (!visited[v] && (root == n || degree(v) < degree(root))) root = v;

        // Pseudo-peripheral root: walk to a minimum-degree node of the last level
        // while the eccentricity keeps growing.
        auto levels = level_structure(adj, root, visited);
        for (int iter = 0; iter < 8; ++iter) {
            const auto& last = levels.back();
            const std::size_t candidate = *std::min_element(
                last.begin(), last.end(),
                [&](std::size_t x, std::size_t y) { return degree(x) < degree(y); });
            auto trial = level_structure(adj, candidate, visited);
            if (trial.size() <= levels.size()) break;
            root = candidate;
            levels = std::move(trial);
        }

        std::deque<std::size_t> queue{root};
        visited[root] = 1;
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop_front();
            order.push_back(u);
            std::vector<std::size_t> next;
            for (std::size_t w : adj[u])
                if (!visited[w]) {
                    visited[w] = 1;
                    next.push_back(w);
                }
            std::stable_sort(next.begin(), next.end(), [&](std::size_t x, std::size_t y) {
                return degree(x) < degree(y);
            });
            queue.insert(queue.end(), next.begin(), next.end());
        }
    }
    std::reverse(order.begin(), order.end());
    return order;
}

Vector solve_direct(const LinearSystem& system, const SolveOptions& options, SolveStats* stats) {
    if (!system.constraints_applied() && !system.constraints().empty())
        throw ConfigError("solve_direct: constraints have not been applied");
    const SparseMatrix& a = system.matrix();
    const std::size_t n = a.rows();
    if (n == 0) return {};

    std::vector<std::size_t> identity(n);
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    const Bandwidth natural = bandwidth(a, identity);

    const auto rcm = reverse_cuthill_mckee(a);
    std::vector<std::size_t> rcm_new_of_old(n);
    for (std::size_t k = 0; k < n; ++k) rcm_new_of_old[rcm[k]] = k;
    const Bandwidth reordered = bandwidth(a, rcm_new_of_old);

    const bool use_rcm = reordered.cost() < natural.cost();
    const auto& new_of_old = use_rcm ? rcm_new_of_old : identity;
    const Bandwidth band = use_rcm ? reordered : natural;

    BandLU lu(n, band.lower, band.upper);
    for (std::size_t i = 0; i < n; ++i) {
        const auto cols = a.row_cols(i);
        const auto vals = a.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k)
            lu.set(new_of_old[i], new_of_old[cols[k]], vals[k]);
    }
    lu.factor(a.max_abs(), options);

    auto permuted_solve = [&](const Vector& rhs) {
        Vector b(n);
        for (std::size_t i = 0; i < n; ++i) b[new_of_old[i]] = rhs[i];
        const Vector y = lu.solve(std::move(b));
        Vector out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = y[new_of_old[i]];
        return out;
    };
    auto residual = [&](const Vector& x) {
        Vector r = a.multiply(x);
        for (std::size_t i = 0; i < n; ++i) r[i] = system.rhs()[i] - r[i];
        return r;
    };

    Vector x = permuted_solve(system.rhs());
    // Iterative refinement; skipped for singular systems so the free
    // variables stay at zero.
    if (lu.deficient_pivots() == 0) {
        Vector r = residual(x);
        for (int step = 0; step < options.refinement_steps; ++step) {
            const Vector dx = permuted_solve(r);
            Vector candidate = x;
            for (std::size_t i = 0; i < n; ++i) candidate[i] += dx[i];
            Vector rc = residual(candidate);
            if (norm_inf(rc) >= norm_inf(r)) break;
            x = std::move(candidate);
            r = std::move(rc);
        }
    }

    if (stats) {
        const Vector ax = a.multiply(x);
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i) r = std::max(r, std::abs(ax[i] - system.rhs()[i]));
        const double denom = a.norm_inf() * norm_inf(x) + norm_inf(system.rhs());
        stats->relative_residual = denom > 0.0 ? r / denom : r;
        stats->lower_bandwidth = band.lower;
        stats->upper_bandwidth = band.upper;
        stats->deficient_pivots = lu.deficient_pivots();
        stats->reordered = use_rcm;
    }
    return x;
}

}  // namespace stokeslab
