#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

#include "stokeslab/element_basis.hpp"

namespace stokeslab {

std::string to_string(ElementKind kind) {
    switch (kind) {
        case ElementKind::T3: return "T3";
        case ElementKind::TET4: return "TET4";
        case ElementKind::Q4: return "Q4";
        case ElementKind::B8: return "B8";
    }
    return "?";
}

ElementKind parse_element_kind(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "T3") return ElementKind::T3;
    if (upper == "TET4") return ElementKind::TET4;
    if (upper == "Q4") return ElementKind::Q4;
    if (upper == "B8") return ElementKind::B8;
    throw ConfigError("unknown element kind '" + std::string(name) +
                      "' (valid: T3, TET4, Q4, B8)");
}

const std::vector<std::vector<int>>& local_facets(ElementKind kind) {
    static const std::vector<std::vector<int>> t3{{0, 1}, {1, 2}, {2, 0}};
    static const std::vector<std::vector<int>> q4{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    static const std::vector<std::vector<int>> tet4{{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}};
    static const std::vector<std::vector<int>> b8{{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                                  {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
    switch (kind) {
        case ElementKind::T3: return t3;
        case ElementKind::Q4: return q4;
        case ElementKind::TET4: return tet4;
        case ElementKind::B8: return b8;
    }
    return t3;
}

namespace {

constexpr std::array<std::array<double, 2>, 4> kQ4Signs{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};
constexpr std::array<std::array<double, 3>, 8> kB8Signs{{{-1, -1, -1},
                                                         {1, -1, -1},
                                                         {1, 1, -1},
                                                         {-1, 1, -1},
                                                         {-1, -1, 1},
                                                         {1, -1, 1},
                                                         {1, 1, 1},
                                                         {-1, 1, 1}}};

void simplex_basis(int dim, std::span<const double> xi, BasisEval& out) {
    const std::size_t n = static_cast<std::size_t>(dim) + 1;
    double lambda = 1.0;
    for (int k = 0; k < dim; ++k) lambda -= xi[k];
    out.N[0] = lambda;
    for (int k = 0; k < dim; ++k) {
        out.N[k + 1] = xi[k];
        out.DN(0, k) = -1.0;
        out.DN(k + 1, k) = 1.0;
    }
    (void)n;
}

template <std::size_t Dim, std::size_t Nodes>
void tensor_basis(const std::array<std::array<double, Dim>, Nodes>& signs,
                  std::span<const double> xi, BasisEval& out) {
    const double scale = 1.0 / static_cast<double>(Nodes);
    for (std::size_t a = 0; a < Nodes; ++a) {
        std::array<double, Dim> f{};
        for (std::size_t k = 0; k < Dim; ++k) f[k] = 1.0 + signs[a][k] * xi[k];

        double value = scale;
        for (std::size_t k = 0; k < Dim; ++k) value *= f[k];
        out.N[a] = value;

        for (std::size_t m = 0; m < Dim; ++m) {
            double d = scale * signs[a][m];
            for (std::size_t k = 0; k < Dim; ++k)
                if (k != m) d *= f[k];
            out.DN(a, m) = d;

            for (std::size_t s = 0; s < Dim; ++s) {
                if (s == m) continue;
                double d2 = scale * signs[a][m] * signs[a][s];
                for (std::size_t k = 0; k < Dim; ++k)
                    if (k != m && k != s) d2 *= f[k];
                out.D2N(a, m * Dim + s) = d2;
            }
        }
    }
}

// b = prod(xi) * lambda with lambda = 1 - sum(xi).
void simplex_bubble(int dim, std::span<const double> xi, BubbleEval& out) {
    double lambda = 1.0;
    double all = 1.0;
    for (int k = 0; k < dim; ++k) {
        lambda -= xi[k];
        all *= xi[k];
    }
    auto product_except = [&](int i, int j) {
        double p = 1.0;
        for (int k = 0; k < dim; ++k)
            if (k != i && k != j) p *= xi[k];
        return p;
    };
    out.b = all * lambda;
    for (int i = 0; i < dim; ++i) {
        const double pi = product_except(i, -1);
        out.grad_xi[i] = pi * lambda - all;
        out.hess_xi(i, i) = -2.0 * pi;
        for (int j = i + 1; j < dim; ++j) {
            out.hess_xi(i, j) = product_except(i, j) * lambda - pi - product_except(j, -1);
            out.hess_xi(j, i) = out.hess_xi(i, j);
        }
    }
}

// b = prod(1 - xi_k^2).
void tensor_bubble(int dim, std::span<const double> xi, BubbleEval& out) {
    std::array<double, 3> f{};
    for (int k = 0; k < dim; ++k) f[k] = 1.0 - xi[k] * xi[k];
    auto product_except = [&](int i, int j) {
        double p = 1.0;
        for (int k = 0; k < dim; ++k)
            if (k != i && k != j) p *= f[k];
        return p;
    };
    out.b = product_except(-1, -1);
    for (int m = 0; m < dim; ++m) {
        out.grad_xi[m] = -2.0 * xi[m] * product_except(m, -1);
        out.hess_xi(m, m) = -2.0 * product_except(m, -1);
        for (int s = m + 1; s < dim; ++s)
            out.hess_xi(m, s) = out.hess_xi(s, m) = 4.0 * xi[m] * xi[s] * product_except(m, s);
    }
}

double determinant(const Matrix& a) {
    if (a.rows() == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

Matrix inverse_small(const Matrix& a, double det) {
    Matrix inv(a.rows(), a.cols());
    if (a.rows() == 2) {
        inv(0, 0) = a(1, 1) / det;
        inv(0, 1) = -a(0, 1) / det;
        inv(1, 0) = -a(1, 0) / det;
        inv(1, 1) = a(0, 0) / det;
        return inv;
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const int i1 = (j + 1) % 3, i2 = (j + 2) % 3;
            const int j1 = (i + 1) % 3, j2 = (i + 2) % 3;
            inv(i, j) = (a(i1, j1) * a(i2, j2) - a(i1, j2) * a(i2, j1)) / det;
        }
    return inv;
}

double element_scale(const Matrix& x) {
    double s = 0.0;
    for (std::size_t n = 1; n < x.rows(); ++n) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < x.cols(); ++i) d2 += std::pow(x(n, i) - x(0, i), 2);
        s = std::max(s, std::sqrt(d2));
    }
    return s;
}

}  // namespace

std::vector<std::vector<double>> reference_nodes(ElementKind kind) {
    switch (kind) {
        case ElementKind::T3: return {{0, 0}, {1, 0}, {0, 1}};
        case ElementKind::TET4: return {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        case ElementKind::Q4: {
            std::vector<std::vector<double>> out;
            for (const auto& s : kQ4Signs) out.push_back({s[0], s[1]});
            return out;
        }
        case ElementKind::B8: {
            std::vector<std::vector<double>> out;
            for (const auto& s : kB8Signs) out.push_back({s[0], s[1], s[2]});
            return out;
        }
    }
    return {};
}

BasisEval eval_basis(ElementKind kind, std::span<const double> xi) {
    const auto dim = static_cast<std::size_t>(dimension(kind));
    const auto nodes = static_cast<std::size_t>(nodes_per_element(kind));
    BasisEval out{Vector(nodes, 0.0), Matrix(nodes, dim), Matrix(nodes, dim * dim),
                  Vector(xi.begin(), xi.begin() + static_cast<std::ptrdiff_t>(dim))};
    switch (kind) {
        case ElementKind::T3:
        case ElementKind::TET4: simplex_basis(static_cast<int>(dim), xi, out); break;
        case ElementKind::Q4: tensor_basis(kQ4Signs, xi, out); break;
        case ElementKind::B8: tensor_basis(kB8Signs, xi, out); break;
    }
    return out;
}

BubbleEval eval_bubble(ElementKind kind, std::span<const double> xi) {
    const auto dim = static_cast<std::size_t>(dimension(kind));
    BubbleEval out{0.0, Vector(dim, 0.0), Matrix(dim, dim)};
    if (is_simplex(kind))
        simplex_bubble(static_cast<int>(dim), xi, out);
    else
        tensor_bubble(static_cast<int>(dim), xi, out);
    return out;
}

JacobianCalc jacobian_calc(const BasisEval& basis, const Matrix& x) {
    const std::size_t dim = basis.DN.cols();
    const std::size_t nodes = basis.DN.rows();
    if (x.rows() != nodes || x.cols() != dim)
        throw ConfigError("jacobian_calc: node coordinate matrix has the wrong shape");

    JacobianCalc jac{Matrix(dim, dim), Matrix(dim, dim), 0.0, Vector(dim, 0.0)};
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t m = 0; m < dim; ++m) {
            double s = 0.0;
            for (std::size_t n = 0; n < nodes; ++n) s += x(n, i) * basis.DN(n, m);
            jac.J(i, m) = s;
        }
    jac.detJ = determinant(jac.J);
    const double scale = element_scale(x);
    if (std::abs(jac.detJ) < 1e-14 * std::pow(scale, static_cast<double>(dim)))
        throw MeshError("jacobian_calc: singular Jacobian (detJ = " + std::to_string(jac.detJ) +
                        ")");
    if (jac.detJ < 0.0)
        throw MeshError("jacobian_calc: inverted element (detJ = " + std::to_string(jac.detJ) +
                        ")");
    jac.Jinv = inverse_small(jac.J, jac.detJ);

    // g = Jinv Jinv^T; w_i = (xhat^T D2N)_(i,ms) g_ms; div Jinv = -Jinv w
    Matrix g(dim, dim);
    for (std::size_t m = 0; m < dim; ++m)
        for (std::size_t s = 0; s < dim; ++s)
            for (std::size_t k = 0; k < dim; ++k) g(m, s) += jac.Jinv(m, k) * jac.Jinv(s, k);

    Vector w(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t n = 0; n < nodes; ++n) {
            if (x(n, i) == 0.0) continue;
            double contraction = 0.0;
            for (std::size_t m = 0; m < dim; ++m)
                for (std::size_t s = 0; s < dim; ++s)
                    contraction += basis.D2N(n, m * dim + s) * g(m, s);
            w[i] += x(n, i) * contraction;
        }
    for (std::size_t p = 0; p < dim; ++p) {
        double s = 0.0;
        for (std::size_t i = 0; i < dim; ++i) s += jac.Jinv(p, i) * w[i];
        jac.divJinv[p] = -s;
    }
    return jac;
}

JacobianCalc jacobian_calc(ElementKind kind, const Matrix& node_coords,
                           std::span<const double> xi) {
    return jacobian_calc(eval_basis(kind, xi), node_coords);
}

Vector physical_gradient(std::span<const double> grad_xi, const JacobianCalc& jac) {
    const std::size_t dim = jac.Jinv.rows();
    Vector g(dim, 0.0);
    for (std::size_t k = 0; k < dim; ++k)
        for (std::size_t m = 0; m < dim; ++m) g[k] += grad_xi[m] * jac.Jinv(m, k);
    return g;
}

double laplacian_physical(std::span<const double> grad_xi, const Matrix& hess_xi,
                          const JacobianCalc& jac) {
    const std::size_t dim = jac.Jinv.rows();
    double lap = 0.0;
    for (std::size_t p = 0; p < dim; ++p)
        for (std::size_t k = 0; k < dim; ++k) {
            double g = 0.0;
            for (std::size_t i = 0; i < dim; ++i) g += jac.Jinv(p, i) * jac.Jinv(k, i);
            lap += hess_xi(p, k) * g;
        }
    for (std::size_t k = 0; k < dim; ++k) lap += grad_xi[k] * jac.divJinv[k];
    return lap;
}

Matrix shape_hessian(const BasisEval& basis, std::size_t node) {
    const std::size_t dim = basis.DN.cols();
    Matrix h(dim, dim);
    for (std::size_t m = 0; m < dim; ++m)
        for (std::size_t s = 0; s < dim; ++s) h(m, s) = basis.D2N(node, m * dim + s);
    return h;
}

Vector map_point(const BasisEval& basis, const Matrix& node_coords) {
    Vector x(node_coords.cols(), 0.0);
    for (std::size_t n = 0; n < node_coords.rows(); ++n)
        for (std::size_t i = 0; i < node_coords.cols(); ++i) x[i] += basis.N[n] * node_coords(n, i);
    return x;
}

}  // namespace stokeslab
