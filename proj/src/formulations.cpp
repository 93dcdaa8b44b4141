#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "parallel.hpp"
#include "stokeslab/element_basis.hpp"
#include "stokeslab/formulations.hpp"
#include "stokeslab/quadrature.hpp"

namespace stokeslab {

std::string to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::galerkin: return "galerkin";
        case Scheme::wvm: return "wvm";
        case Scheme::svm: return "svm";
        case Scheme::enriched: return "enriched";
    }
    return "?";
}

Scheme parse_scheme(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (Scheme s : {Scheme::galerkin, Scheme::wvm, Scheme::svm, Scheme::enriched})
        if (lower == to_string(s)) return s;
    throw ConfigError("unknown formulation '" + std::string(name) +
                      "' (valid: galerkin, wvm, svm, enriched)");
}

void FormulationConfig::validate() const {
    if (!(nu > 0.0)) throw ConfigError("viscosity nu must be positive");
    if (!(bp_epsilon >= 0.0)) throw ConfigError("bp_epsilon must be non-negative");
}

std::size_t assembly_threads() {
    if (const char* env = std::getenv("STOKESLAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------

double wvm_bubble_ratio(ElementKind kind, const Matrix& x) {
    const QuadratureRule& rule = rule_for(kind, QuadratureNeed::stabilized);
    double int_b = 0.0, int_grad2 = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const BasisEval basis = eval_basis(kind, rule.points[q]);
        const JacobianCalc jac = jacobian_calc(basis, x);
        const BubbleEval bub = eval_bubble(kind, rule.points[q]);
        const Vector g = physical_gradient(bub.grad_xi, jac);
        const double dw = rule.weights[q] * jac.detJ;
        int_b += dw * bub.b;
        int_grad2 += dw * dot(g, g);
    }
    if (!(int_grad2 > 0.0)) throw MeshError("wvm tau: zero bubble energy on a degenerate element");
    return int_b / int_grad2;
}

TauEval tau_at(Scheme scheme, ElementKind kind, const Matrix& x, std::span<const double> xi) {
    const BubbleEval bub = eval_bubble(kind, xi);
    if (scheme == Scheme::wvm) return {bub.b * wvm_bubble_ratio(kind, x), scheme};
    if (scheme == Scheme::svm) {
        const JacobianCalc jac = jacobian_calc(kind, x, xi);
        const double lap = laplacian_physical(bub.grad_xi, bub.hess_xi, jac);
        if (lap == 0.0) throw MeshError("svm tau: bubble Laplacian vanishes at a quadrature point");
        return {bub.b / lap, scheme};
    }
    throw ConfigError("tau_at: only wvm and svm define a stabilization parameter");
}

namespace {

double bp_coefficient(ElementKind kind, const Matrix& x, const FormulationConfig& config) {
    if (config.bp_epsilon == 0.0) return 0.0;
    const QuadratureRule& rule = rule_for(kind);
    double measure = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q)
        measure += rule.weights[q] * jacobian_calc(kind, x, rule.points[q]).detJ;
    const double h = std::pow(measure, 1.0 / dimension(kind));
    return config.bp_epsilon * h * h;
}

}  // namespace

ElementSystem element_system(ElementKind kind, const Matrix& x, const FormulationConfig& config) {
    if (config.scheme == Scheme::enriched)
        throw ConfigError("element_system: use enriched_blocks for the enriched formulation");
    const auto d = static_cast<std::size_t>(dimension(kind));
    const auto nn = static_cast<std::size_t>(nodes_per_element(kind));
    const std::size_t stride = d + 1;
    const double nu = config.nu;
    const bool stabilized = config.scheme != Scheme::galerkin;
    const double bp = bp_coefficient(kind, x, config);
    const double ratio = config.scheme == Scheme::wvm ? wvm_bubble_ratio(kind, x) : 0.0;

    ElementSystem out{Matrix(nn * stride, nn * stride), Vector(nn * stride, 0.0)};
    Matrix& K = out.K;
    Vector& f = out.f;

    const QuadratureRule& rule =
        rule_for(kind, stabilized ? QuadratureNeed::stabilized : QuadratureNeed::galerkin);
    Matrix grad(nn, d);
    Vector lap(nn, 0.0);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const BasisEval basis = eval_basis(kind, rule.points[q]);
        const JacobianCalc jac = jacobian_calc(basis, x);
        const double dw = rule.weights[q] * jac.detJ;
        for (std::size_t a = 0; a < nn; ++a) {
            const Vector g = physical_gradient(basis.DN.row(a), jac);
            for (std::size_t k = 0; k < d; ++k) grad(a, k) = g[k];
        }
        Vector body(d, 0.0);
        if (config.body_force) body = config.body_force(map_point(basis, x));

        for (std::size_t a = 0; a < nn; ++a) {
            const std::size_t pa = a * stride + d;
            for (std::size_t b = 0; b < nn; ++b) {
                const std::size_t pb = b * stride + d;
                double gg = 0.0;
                for (std::size_t k = 0; k < d; ++k) gg += grad(a, k) * grad(b, k);
                for (std::size_t i = 0; i < d; ++i) {
                    K(a * stride + i, b * stride + i) += dw * 2.0 * nu * gg;
                    K(a * stride + i, pb) -= dw * grad(a, i) * basis.N[b];
                    K(pa, b * stride + i) -= dw * basis.N[a] * grad(b, i);
                }
                K(pa, pb) -= dw * bp * gg;
            }
            for (std::size_t i = 0; i < d; ++i) f[a * stride + i] += dw * basis.N[a] * body[i];
        }

        if (!stabilized) continue;

        const BubbleEval bub = eval_bubble(kind, rule.points[q]);
        double tau = 0.0;
        if (config.scheme == Scheme::wvm) {
            tau = bub.b * ratio;
        } else {
            const double lap_b = laplacian_physical(bub.grad_xi, bub.hess_xi, jac);
            if (lap_b == 0.0)
                throw MeshError("svm tau: bubble Laplacian vanishes at a quadrature point");
            tau = -bub.b / lap_b;
        }
        const bool affine = is_simplex(kind);
        for (std::size_t a = 0; a < nn; ++a)
            lap[a] = affine ? 0.0
                            : laplacian_physical(basis.DN.row(a), shape_hessian(basis, a), jac);

        const double tw = tau * dw;
        for (std::size_t a = 0; a < nn; ++a) {
            const std::size_t pa = a * stride + d;
            for (std::size_t b = 0; b < nn; ++b) {
                const std::size_t pb = b * stride + d;
                double gg = 0.0;
                for (std::size_t k = 0; k < d; ++k) gg += grad(a, k) * grad(b, k);
                for (std::size_t i = 0; i < d; ++i) {
                    K(a * stride + i, b * stride + i) -= tw * 2.0 * nu * lap[a] * lap[b];
                    K(a * stride + i, pb) += tw * lap[a] * grad(b, i);
                    K(pa, b * stride + i) += tw * grad(a, i) * lap[b];
                }
                K(pa, pb) -= tw / (2.0 * nu) * gg;
            }
            double gb = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                f[a * stride + i] += tw * lap[a] * body[i];
                gb += grad(a, i) * body[i];
            }
            f[pa] -= tw / (2.0 * nu) * gb;
        }
    }
    return out;
}

LinearSystem assemble(const Mesh& mesh, const FormulationConfig& config, const DofMap& dofs) {
    config.validate();
    if (config.scheme == Scheme::enriched) return assemble_enriched(mesh, config, dofs).system;

    const std::size_t ne = mesh.num_elements();
    std::vector<ElementSystem> local(ne);
    detail::parallel_for(ne, assembly_threads(), [&](std::size_t e) {
        local[e] = element_system(mesh.kind(), mesh.element_coords(e), config);
    });

    const std::size_t d = dofs.dim();
    std::vector<Triplet> triplets;
    Vector rhs(dofs.size(), 0.0);
    for (std::size_t e = 0; e < ne; ++e) {
        const auto& el = mesh.element(e);
        std::vector<std::size_t> map;
        for (std::size_t n : el)
            for (std::size_t c = 0; c <= d; ++c) map.push_back(n * (d + 1) + c);
        const ElementSystem& s = local[e];
        for (std::size_t r = 0; r < map.size(); ++r) {
            rhs[map[r]] += s.f[r];
            for (std::size_t c = 0; c < map.size(); ++c)
                if (s.K(r, c) != 0.0) triplets.push_back({map[r], map[c], s.K(r, c)});
        }
    }
    return LinearSystem(SparseMatrix::from_triplets(dofs.size(), dofs.size(), std::move(triplets)),
                        std::move(rhs));
}

// ---------------------------------------------------------------------------

void add_traction(const Mesh& mesh, const DofMap& dofs, const std::string& tag,
                  const VectorField& traction, Vector& rhs) {
    if (rhs.size() < dofs.size()) throw ConfigError("add_traction: rhs is too short");
    const FacetKind fk = facet_kind(mesh.kind());
    const QuadratureRule& rule = facet_rule(fk);
    const std::size_t d = dofs.dim();
    for (const FaceRef& face : mesh.faces_in(tag)) {
        const auto nodes = mesh.facet_nodes(face);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vector& s = rule.points[q];
            Vector N;
            Matrix dN;  // facet nodes x (dim - 1)
            if (fk == FacetKind::Line2) {
                N = {0.5 * (1.0 - s[0]), 0.5 * (1.0 + s[0])};
                dN = Matrix{{-0.5}, {0.5}};
            } else {
                const BasisEval fb =
                    eval_basis(fk == FacetKind::Tri3 ? ElementKind::T3 : ElementKind::Q4, s);
                N = fb.N;
                dN = fb.DN;
            }
            // Tangent vectors and the surface measure sqrt(det(T^T T)).
            Matrix T(d, d - 1);
            Vector x(d, 0.0);
            for (std::size_t a = 0; a < nodes.size(); ++a)
                for (std::size_t i = 0; i < d; ++i) {
                    x[i] += N[a] * mesh.node(nodes[a])[i];
                    for (std::size_t m = 0; m + 1 < d; ++m) T(i, m) += dN(a, m) * mesh.node(nodes[a])[i];
                }
            const Matrix g = T.transpose() * T;
            const double det = d == 2 ? g(0, 0) : g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
            const double dw = rule.weights[q] * std::sqrt(det);
            const Vector t = traction(x);
            for (std::size_t a = 0; a < nodes.size(); ++a)
                for (std::size_t i = 0; i < d; ++i) rhs[dofs.velocity(nodes[a], i)] += dw * N[a] * t[i];
        }
    }
}

}  // namespace stokeslab
