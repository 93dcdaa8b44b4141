#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "stokeslab/analysis.hpp"
#include "stokeslab/element_basis.hpp"
#include "stokeslab/quadrature.hpp"

namespace stokeslab {

ErrorReport error_norms(const Mesh& mesh, const Solution& solution, const TestCase& test) {
    if (!test.exact) throw ConfigError("case " + test.name + " has no exact solution");
    const ExactSolution& ex = *test.exact;
    const ElementKind kind = mesh.kind();
    const QuadratureRule& rule = rule_for(kind);
    const auto d = static_cast<std::size_t>(mesh.dim());

    double ev = 0.0, ep = 0.0;
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const Matrix x = mesh.element_coords(e);
        const auto& el = mesh.element(e);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const BasisEval basis = eval_basis(kind, rule.points[q]);
            const JacobianCalc jac = jacobian_calc(basis, x);
            const double dw = rule.weights[q] * jac.detJ;
            const Vector xq = map_point(basis, x);
            Vector vh(d, 0.0), gp(d, 0.0);
            for (std::size_t a = 0; a < el.size(); ++a) {
                const Vector ga = physical_gradient(basis.DN.row(a), jac);
                for (std::size_t i = 0; i < d; ++i) {
                    vh[i] += basis.N[a] * solution.velocity[el[a]][i];
                    gp[i] += ga[i] * solution.pressure[el[a]];
                }
            }
            const Vector v = ex.velocity(xq);
            const Vector g = ex.pressure_gradient(xq);
            for (std::size_t i = 0; i < d; ++i) {
                ev += dw * std::pow(vh[i] - v[i], 2);
                ep += dw * std::pow(gp[i] - g[i], 2);
            }
        }
    }
    return {std::sqrt(ev), std::sqrt(ep), mesh_size(mesh)};
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("fit_slope: need two or more points");
    double mx = 0.0, my = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]) / n;
        my += std::log(y[i]) / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

// Errors below this are solver round-off (the patch tests reproduce their
// fields to about 1e-9 at desk sizes).
constexpr double kRoundOff = 1e-8;

ConvergenceResult convergence_study(const TestCase& test, const FormulationConfig& config,
                                    ElementKind kind, const std::vector<int>& levels,
                                    const SolveOptions& options) {
    if (levels.size() < 3) throw ConfigError("need >= 3 levels");
    if (!test.exact) throw ConfigError("case " + test.name + " has no exact solution");
    ConvergenceResult out;
    std::vector<double> h, ev, ep;
    bool exact = true;
    for (int n : levels) {
        const Mesh mesh = generate_grid(kind, std::vector<int>(static_cast<std::size_t>(dimension(kind)), n));
        const Solution s = solve_case(mesh, test, config, options);
        const ErrorReport r = error_norms(mesh, s, test);
        out.rows.push_back({n, r});
        h.push_back(r.h);
        ev.push_back(r.velocity_l2);
        ep.push_back(r.pressure_h1semi);
        if (r.velocity_l2 > kRoundOff || r.pressure_h1semi > kRoundOff) exact = false;
    }
    out.exact = exact;
    if (exact) {
        out.velocity_slope = out.pressure_slope = std::numeric_limits<double>::quiet_NaN();
    } else {
        out.velocity_slope = fit_slope(h, ev);
        out.pressure_slope = fit_slope(h, ep);
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

Matrix pressure_mass(const Mesh& mesh) {
    const ElementKind kind = mesh.kind();
    const QuadratureRule& rule = rule_for(kind);
    Matrix M(mesh.num_nodes(), mesh.num_nodes());
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        const Matrix x = mesh.element_coords(e);
        const auto& el = mesh.element(e);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const BasisEval basis = eval_basis(kind, rule.points[q]);
            const double dw = rule.weights[q] * jacobian_calc(basis, x).detJ;
            for (std::size_t a = 0; a < el.size(); ++a)
                for (std::size_t b = 0; b < el.size(); ++b)
                    M(el[a], el[b]) += dw * basis.N[a] * basis.N[b];
        }
    }
    return M;
}

double m_dot(const Matrix& M, const Vector& a, const Vector& b) { return dot(a, M * std::span<const double>(b)); }

// Component of v M-orthogonal to constants.
Vector center(const Matrix& M, Vector v) {
    const Vector one(v.size(), 1.0);
    const double c = m_dot(M, v, one) / m_dot(M, one, one);
    for (double& x : v) x -= c;
    return v;
}

// ||P v||_M / ||v||_M, P the M-orthogonal projector onto columns [0, k) of the
// M-orthonormal eigenvector matrix.
double captured_fraction(const Matrix& M, const Matrix& Q, std::size_t k, const Vector& v) {
    const Vector Mv = M * std::span<const double>(v);
    double captured = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        double c = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) c += Q(i, j) * Mv[i];
        captured += c * c;
    }
    const double total = dot(v, Mv);
    return total > 0.0 ? std::sqrt(captured / total) : 0.0;
}

}  // namespace

SpectrumReport lbb_spectrum(const Mesh& mesh, const FormulationConfig& input) {
    FormulationConfig config = input;
    config.body_force = nullptr;
    DofMap dofs(mesh);
    const LinearSystem system = assemble(mesh, config, dofs);
    const SparseMatrix& K = system.matrix();

    std::vector<char> fixed(mesh.num_nodes(), 0);
    for (std::size_t n : mesh.nodes_in("all")) fixed[n] = 1;
    std::vector<std::size_t> V, P;
    for (std::size_t n = 0; n < mesh.num_nodes(); ++n) {
        if (!fixed[n])
            for (std::size_t i = 0; i < dofs.dim(); ++i) V.push_back(dofs.velocity(n, i));
        P.push_back(dofs.pressure(n));
    }
    if (V.empty()) throw ConfigError("no interior velocity dofs");

    auto block = [&](const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
        Matrix out(rows.size(), cols.size());
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = K.at(rows[r], cols[c]);
        return out;
    };
    const Matrix A = block(V, V);
    const Matrix Bm = block(V, P);
    const Matrix Bc = block(P, V);
    const Matrix Kpp = block(P, P);
    const Matrix S = Bc * (dense_inverse(A) * Bm) - Kpp;
    const Matrix M = pressure_mass(mesh);

    const EigenDecomposition eig = eig_sym_generalized(S, M);
    SpectrumReport out;
    out.eigenvalues = eig.values;
    const double scale = norm_inf(eig.values);
    for (double l : eig.values)
        if (std::abs(l) < 1e-10 * scale) ++out.zero_count;

    // Null vectors are the leading columns when the spectrum is >= 0.
    std::vector<std::size_t> order(eig.values.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(eig.values[a]) < std::abs(eig.values[b]);
    });
    Matrix Z(mesh.num_nodes(), out.zero_count);
    for (std::size_t j = 0; j < out.zero_count; ++j)
        for (std::size_t i = 0; i < mesh.num_nodes(); ++i) Z(i, j) = eig.vectors(i, order[j]);

    const Vector one(mesh.num_nodes(), 1.0);
    const double f1 = captured_fraction(M, Z, out.zero_count, one);
    out.hydrostatic_residual = std::sqrt(std::max(0.0, 1.0 - f1 * f1));

    if (mesh.grid()) {
        const auto& div = mesh.grid()->divisions;
        Vector pattern(mesh.num_nodes());
        for (std::size_t n = 0; n < mesh.num_nodes(); ++n) {
            std::size_t rest = n, parity = 0;
            for (int k : div) {
                parity += rest % static_cast<std::size_t>(k + 1);
                rest /= static_cast<std::size_t>(k + 1);
            }
            pattern[n] = parity % 2 == 0 ? 1.0 : -1.0;
        }
        out.checkerboard_correlation = captured_fraction(M, Z, out.zero_count, center(M, pattern));
    }
    out.checkerboard_present = out.zero_count >= 2 && out.checkerboard_correlation > 0.9;
    return out;
}

double checkerboard_amplitude(const Mesh& mesh, const Solution& solution, const TestCase& test) {
    if (!test.exact) throw ConfigError("case " + test.name + " has no exact solution");
    double amp = 0.0;
    for (std::size_t n = 0; n < mesh.num_nodes(); ++n)
        amp = std::max(amp, std::abs(solution.pressure[n] - test.exact->pressure(mesh.node(n))));
    return amp;
}

double locate_vortex(const Mesh& mesh, const std::vector<Vector>& velocity) {
    std::map<double, std::pair<double, int>> column;  // y -> (sum v_x, count)
    for (std::size_t n = 0; n < mesh.num_nodes(); ++n) {
        const Vector& x = mesh.node(n);
        if (std::abs(x[0] - 0.5) > 1e-9) continue;
        const double y = std::round(x[1] * 1e9) / 1e9;
        auto& slot = column[y];
        slot.first += velocity[n][0];
        slot.second += 1;
    }
    std::vector<std::pair<double, double>> samples;
    for (const auto& [y, acc] : column) samples.emplace_back(y, acc.first / acc.second);
    for (std::size_t k = samples.size(); k-- > 1;) {
        const auto [y0, v0] = samples[k - 1];
        const auto [y1, v1] = samples[k];
        if (v0 * v1 < 0.0) return y0 + (y1 - y0) * v0 / (v0 - v1);
    }
    throw ConfigError("locate_vortex: no sign change of v_x on the line x = 0.5");
}

}  // namespace stokeslab
