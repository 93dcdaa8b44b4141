#include <cmath>

#include "parallel.hpp"
#include "stokeslab/element_basis.hpp"
#include "stokeslab/formulations.hpp"
#include "stokeslab/quadrature.hpp"

namespace stokeslab {

namespace {

// Brezzi-Pitkaranta element term, shared by the condensed and full assemblies.
Matrix bp_block(ElementKind kind, const Matrix& x, const FormulationConfig& config) {
    const auto nn = static_cast<std::size_t>(nodes_per_element(kind));
    Matrix out(nn, nn);
    if (config.bp_epsilon == 0.0) return out;
    const QuadratureRule& rule = rule_for(kind);
    const auto d = static_cast<std::size_t>(dimension(kind));
    double measure = 0.0;
    Matrix gg(nn, nn);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const BasisEval basis = eval_basis(kind, rule.points[q]);
        const JacobianCalc jac = jacobian_calc(basis, x);
        const double dw = rule.weights[q] * jac.detJ;
        measure += dw;
        Matrix g(nn, d);
        for (std::size_t a = 0; a < nn; ++a) {
            const Vector ga = physical_gradient(basis.DN.row(a), jac);
            for (std::size_t k = 0; k < d; ++k) g(a, k) = ga[k];
        }
        gg += dw * (g * g.transpose());
    }
    const double h = std::pow(measure, 1.0 / static_cast<double>(d));
    return (-config.bp_epsilon * h * h) * gg;
}

struct CondensedElement {
    Matrix K;  // interleaved local ordering
    Vector f;
    Matrix K_ff_inv, K_fc, K_fp;
    Vector f_f;
};

CondensedElement condense(ElementKind kind, const Matrix& x, const FormulationConfig& config) {
    const ElementBlocks B = enriched_blocks(kind, x, config);
    const auto d = static_cast<std::size_t>(dimension(kind));
    const auto nn = static_cast<std::size_t>(nodes_per_element(kind));
    const std::size_t stride = d + 1;

    CondensedElement out;
    out.K_ff_inv = dense_inverse(B.K_ff);
    const Matrix cf_inv = B.K_cf * out.K_ff_inv;
    const Matrix pf_inv = B.K_pf * out.K_ff_inv;
    const Matrix Kcc = B.K_cc - cf_inv * B.K_fc;
    const Matrix Kcp = B.K_cp - cf_inv * B.K_fp;
    const Matrix Kpc = B.K_pc - pf_inv * B.K_fc;
    const Matrix Kpp = -1.0 * (pf_inv * B.K_fp) + bp_block(kind, x, config);
    const Vector fc_shift = cf_inv * std::span<const double>(B.f_f);
    const Vector fp_shift = pf_inv * std::span<const double>(B.f_f);

    out.K = Matrix(nn * stride, nn * stride);
    out.f = Vector(nn * stride, 0.0);
    for (std::size_t a = 0; a < nn; ++a) {
        for (std::size_t i = 0; i < d; ++i) {
            const std::size_t r = a * d + i;
            out.f[a * stride + i] = B.f_c[r] - fc_shift[r];
            for (std::size_t b = 0; b < nn; ++b) {
                for (std::size_t j = 0; j < d; ++j)
                    out.K(a * stride + i, b * stride + j) = Kcc(r, b * d + j);
                out.K(a * stride + i, b * stride + d) = Kcp(r, b);
                out.K(b * stride + d, a * stride + i) = Kpc(b, r);
            }
        }
        out.f[a * stride + d] = B.f_p[a] - fp_shift[a];
        for (std::size_t b = 0; b < nn; ++b) out.K(a * stride + d, b * stride + d) = Kpp(a, b);
    }
    out.K_fc = B.K_fc;
    out.K_fp = B.K_fp;
    out.f_f = B.f_f;
    return out;
}

std::vector<std::size_t> element_dofs(const Mesh& mesh, const DofMap& dofs, std::size_t e) {
    std::vector<std::size_t> map;
    for (std::size_t n : mesh.element(e))
        for (std::size_t c = 0; c <= dofs.dim(); ++c) map.push_back(n * (dofs.dim() + 1) + c);
    return map;
}

}  // namespace

ElementBlocks enriched_blocks(ElementKind kind, const Matrix& x, const FormulationConfig& config) {
    const auto d = static_cast<std::size_t>(dimension(kind));
    const auto nn = static_cast<std::size_t>(nodes_per_element(kind));
    const double nu = config.nu;
    const Matrix I = Matrix::identity(d);
    const Vector vec_I = vec(I);

    ElementBlocks B{Matrix(nn * d, nn * d), Matrix(nn * d, nn), Matrix(nn * d, d),
                    Matrix(nn, nn * d),     Matrix(nn, d),      Matrix(d, nn * d),
                    Matrix(d, nn),          Matrix(d, d),       Vector(nn * d, 0.0),
                    Vector(nn, 0.0),        Vector(d, 0.0)};

    const QuadratureRule& rule = rule_for(kind, QuadratureNeed::enriched);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const BasisEval basis = eval_basis(kind, rule.points[q]);
        const JacobianCalc jac = jacobian_calc(basis, x);
        const BubbleEval bub = eval_bubble(kind, rule.points[q]);
        const double dw = rule.weights[q] * jac.detJ;

        // G = J^-T DN^T (dim x nodes), g = grad_x b (dim x 1)
        const Matrix G = jac.Jinv.transpose() * basis.DN.transpose();
        const Matrix g = Matrix::column(physical_gradient(bub.grad_xi, jac));
        const Matrix Bc = kron(G, I);  // dim^2 x nodes*dim
        const Matrix Bf = kron(g, I);  // dim^2 x dim
        const Matrix BcT = Bc.transpose();

        B.K_cc += (dw * 2.0 * nu) * (BcT * Bc);
        B.K_cf += (dw * 2.0 * nu) * (BcT * Bf);
        B.K_ff += (dw * 2.0 * nu) * (Bf.transpose() * Bf);

        // Divergence operators: B^T vec(I) picks dN_a/dx_i (node-major), and
        // g itself for the bubble.
        const Vector div_c = BcT * std::span<const double>(vec_I);
        Vector body(d, 0.0);
        if (config.body_force) body = config.body_force(map_point(basis, x));
        for (std::size_t b = 0; b < nn; ++b) {
            for (std::size_t r = 0; r < nn * d; ++r) B.K_cp(r, b) -= dw * div_c[r] * basis.N[b];
            for (std::size_t t = 0; t < d; ++t) B.K_fp(t, b) -= dw * g(t, 0) * basis.N[b];
        }
        for (std::size_t a = 0; a < nn; ++a)
            for (std::size_t i = 0; i < d; ++i) B.f_c[a * d + i] += dw * basis.N[a] * body[i];
        for (std::size_t i = 0; i < d; ++i) B.f_f[i] += dw * bub.b * body[i];
    }
    B.K_pc = B.K_cp.transpose();
    B.K_fc = B.K_cf.transpose();
    B.K_pf = B.K_fp.transpose();
    return B;
}

EnrichedSystem assemble_enriched(const Mesh& mesh, const FormulationConfig& config,
                                 const DofMap& dofs) {
    config.validate();
    const std::size_t ne = mesh.num_elements();
    std::vector<CondensedElement> local(ne);
    detail::parallel_for(ne, assembly_threads(), [&](std::size_t e) {
        local[e] = condense(mesh.kind(), mesh.element_coords(e), config);
    });

    EnrichedSystem out;
    std::vector<Triplet> triplets;
    Vector rhs(dofs.size(), 0.0);
    for (std::size_t e = 0; e < ne; ++e) {
        const auto map = element_dofs(mesh, dofs, e);
        CondensedElement& s = local[e];
        for (std::size_t r = 0; r < map.size(); ++r) {
            rhs[map[r]] += s.f[r];
            for (std::size_t c = 0; c < map.size(); ++c)
                if (s.K(r, c) != 0.0) triplets.push_back({map[r], map[c], s.K(r, c)});
        }
        out.cache.K_ff_inv.push_back(std::move(s.K_ff_inv));
        out.cache.K_fc.push_back(std::move(s.K_fc));
        out.cache.K_fp.push_back(std::move(s.K_fp));
        out.cache.f_f.push_back(std::move(s.f_f));
    }
    out.system = LinearSystem(
        SparseMatrix::from_triplets(dofs.size(), dofs.size(), std::move(triplets)), std::move(rhs));
    return out;
}

LinearSystem assemble_enriched_full(const Mesh& mesh, const FormulationConfig& config,
                                    const DofMap& dofs) {
    config.validate();
    const std::size_t ne = mesh.num_elements();
    const std::size_t d = dofs.dim();
    const std::size_t n = dofs.size() + ne * d;
    std::vector<Triplet> triplets;
    Vector rhs(n, 0.0);
    for (std::size_t e = 0; e < ne; ++e) {
        const Matrix x = mesh.element_coords(e);
        const ElementBlocks B = enriched_blocks(mesh.kind(), x, config);
        const Matrix bp = bp_block(mesh.kind(), x, config);
        const auto& el = mesh.element(e);
        const std::size_t nn = el.size();
        std::vector<std::size_t> vel, pre, fine;
        for (std::size_t a = 0; a < nn; ++a) {
            for (std::size_t i = 0; i < d; ++i) vel.push_back(dofs.velocity(el[a], i));
            pre.push_back(dofs.pressure(el[a]));
        }
        for (std::size_t t = 0; t < d; ++t) fine.push_back(dofs.size() + e * d + t);

        auto scatter = [&](const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols,
                           const Matrix& K) {
            for (std::size_t r = 0; r < rows.size(); ++r)
                for (std::size_t c = 0; c < cols.size(); ++c)
                    if (K(r, c) != 0.0) triplets.push_back({rows[r], cols[c], K(r, c)});
        };
        scatter(vel, vel, B.K_cc);
        scatter(vel, pre, B.K_cp);
        scatter(vel, fine, B.K_cf);
        scatter(pre, vel, B.K_pc);
        scatter(pre, fine, B.K_pf);
        scatter(pre, pre, bp);
        scatter(fine, vel, B.K_fc);
        scatter(fine, pre, B.K_fp);
        scatter(fine, fine, B.K_ff);
        for (std::size_t r = 0; r < vel.size(); ++r) rhs[vel[r]] += B.f_c[r];
        for (std::size_t r = 0; r < pre.size(); ++r) rhs[pre[r]] += B.f_p[r];
        for (std::size_t r = 0; r < fine.size(); ++r) rhs[fine[r]] += B.f_f[r];
    }
    return LinearSystem(SparseMatrix::from_triplets(n, n, std::move(triplets)), std::move(rhs));
}

std::vector<Vector> recover_fine(const Mesh& mesh, const DofMap& dofs,
                                 const CondensationCache& cache, std::span<const double> solution) {
    if (cache.K_ff_inv.size() != mesh.num_elements())
        throw ConfigError("recover_fine: cache does not match the mesh");
    if (solution.size() < dofs.size()) throw ConfigError("recover_fine: solution is too short");
    const std::size_t d = dofs.dim();
    std::vector<Vector> beta(mesh.num_elements());
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const auto& el = mesh.element(e);
        Vector v, p;
        for (std::size_t n : el) {
            for (std::size_t i = 0; i < d; ++i) v.push_back(solution[dofs.velocity(n, i)]);
            p.push_back(solution[dofs.pressure(n)]);
        }
        const Vector kv = cache.K_fc[e] * std::span<const double>(v);
        const Vector kp = cache.K_fp[e] * std::span<const double>(p);
        Vector r(d);
        for (std::size_t t = 0; t < d; ++t) r[t] = cache.f_f[e][t] - kv[t] - kp[t];
        beta[e] = cache.K_ff_inv[e] * std::span<const double>(r);
    }
    return beta;
}

}  // namespace stokeslab
