#include <algorithm>
#include <array>
#include <cmath>

#include "stokeslab/quadrature.hpp"

namespace stokeslab {

namespace {

// All distinct arrangements of `values` over barycentric slots given by a
// multiset pattern such as {0,0,1,2}; the last barycentric slot is dropped
// when forming reference coordinates.
void add_orbit(QuadratureRule& rule, std::vector<int> pattern, const std::vector<double>& values,
               double weight) {
    std::sort(pattern.begin(), pattern.end());
    do {
        Vector xi(pattern.size() - 1);
        for (std::size_t k = 0; k + 1 < pattern.size(); ++k) xi[k] = values[pattern[k + 1]];
        rule.points.push_back(std::move(xi));
        rule.weights.push_back(weight);
    } while (std::next_permutation(pattern.begin(), pattern.end()));
}

// Dunavant degree 6; weights normalised to unit area, scaled by 1/2 here.
QuadratureRule make_triangle6() {
    QuadratureRule r;
    r.exact_degree = 6;
    const double a1 = 0.24928674517091042129, w1 = 0.11678627572637936603;
    const double a2 = 0.06308901449150222834, w2 = 0.05084490637020681692;
    const double b1 = 0.05314504984481694735, b2 = 0.31035245103378440542;
    const double w3 = 0.08285107561837357519;
    add_orbit(r, {0, 0, 1}, {a1, 1.0 - 2.0 * a1}, 0.5 * w1);
    add_orbit(r, {0, 0, 1}, {a2, 1.0 - 2.0 * a2}, 0.5 * w2);
    add_orbit(r, {0, 1, 2}, {b1, b2, 1.0 - b1 - b2}, 0.5 * w3);
    return r;
}

// Keast 24-point degree 6; weights already sum to 1/6.
QuadratureRule make_tetrahedron6() {
    QuadratureRule r;
    r.exact_degree = 6;
    const std::array<std::array<double, 2>, 3> s31{{{0.214602871259151684, 0.006653791709694646},
                                                    {0.0406739585346113397, 0.00167953517588677620},
                                                    {0.322337890142275646, 0.00922619692394239843}}};
    for (const auto& [a, w] : s31) add_orbit(r, {0, 0, 0, 1}, {a, 1.0 - 3.0 * a}, w);
    const double a = 0.0636610018750175299;
    const double b = 0.269672331458315867;
    const double c = 1.0 - 2.0 * a - b;
    add_orbit(r, {0, 0, 1, 2}, {a, b, c}, 0.00803571428571428248);
    return r;
}

QuadratureRule tensor_rule(int dim, int n) {
    const QuadratureRule line = gauss_legendre(n);
    QuadratureRule r;
    r.exact_degree = 2 * n - 1;
    const std::size_t m = line.size();
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= m;
    for (std::size_t idx = 0; idx < total; ++idx) {
        Vector xi(static_cast<std::size_t>(dim));
        double w = 1.0;
        std::size_t rest = idx;
        for (int d = 0; d < dim; ++d) {
            const std::size_t k = rest % m;
            rest /= m;
            xi[static_cast<std::size_t>(d)] = line.points[k][0];
            w *= line.weights[k];
        }
        r.points.push_back(std::move(xi));
        r.weights.push_back(w);
    }
    return r;
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
    QuadratureRule r;
    r.exact_degree = 2 * n - 1;
    switch (n) {
        case 1:
            r.points = {{0.0}};
            r.weights = {2.0};
            break;
        case 2: {
            const double x = 1.0 / std::sqrt(3.0);
            r.points = {{-x}, {x}};
            r.weights = {1.0, 1.0};
            break;
        }
        case 3: {
            const double x = std::sqrt(0.6);
            r.points = {{-x}, {0.0}, {x}};
            r.weights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
            break;
        }
        case 4: {
            const double s = 2.0 * std::sqrt(6.0 / 5.0);
            const double x1 = std::sqrt((3.0 - s) / 7.0), x2 = std::sqrt((3.0 + s) / 7.0);
            const double w1 = (18.0 + std::sqrt(30.0)) / 36.0, w2 = (18.0 - std::sqrt(30.0)) / 36.0;
            r.points = {{-x2}, {-x1}, {x1}, {x2}};
            r.weights = {w2, w1, w1, w2};
            break;
        }
        default: throw ConfigError("gauss_legendre: supported point counts are 1..4");
    }
    return r;
}

const QuadratureRule& rule_for(ElementKind kind, QuadratureNeed /*need*/) {
    static const QuadratureRule t3 = make_triangle6();
    static const QuadratureRule tet4 = make_tetrahedron6();
    static const QuadratureRule q4 = tensor_rule(2, 3);
    static const QuadratureRule b8 = tensor_rule(3, 3);
    switch (kind) {
        case ElementKind::T3: return t3;
        case ElementKind::TET4: return tet4;
        case ElementKind::Q4: return q4;
        case ElementKind::B8: return b8;
    }
    return q4;
}

const QuadratureRule& facet_rule(FacetKind kind) {
    static const QuadratureRule line = gauss_legendre(3);
    static const QuadratureRule quad = tensor_rule(2, 3);
    switch (kind) {
        case FacetKind::Line2: return line;
        case FacetKind::Tri3: return rule_for(ElementKind::T3);
        case FacetKind::Quad4: return quad;
    }
    return line;
}

}  // namespace stokeslab
