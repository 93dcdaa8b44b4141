#pragma once

#include <vector>

#include "stokeslab/element_kind.hpp"
#include "stokeslab/linalg.hpp"

namespace stokeslab {

/// Points and positive weights on a reference element; all points interior.
struct QuadratureRule {
    std::vector<Vector> points;
    Vector weights;
    int exact_degree = 0;

    [[nodiscard]] std::size_t size() const noexcept { return weights.size(); }
};

enum class QuadratureNeed { galerkin, stabilized, enriched };

/// Q4 3x3 Gauss, B8 3x3x3 Gauss, T3 12-point degree 6, TET4 24-point degree 6.
/// Every need gets the same rule: the bubble integrands fix the order and the
/// Galerkin terms are cheap enough not to bother downgrading.
[[nodiscard]] const QuadratureRule& rule_for(ElementKind kind,
                                             QuadratureNeed need = QuadratureNeed::enriched);

/// Rule on a boundary facet: 3-point Gauss on [-1,1], the degree-6 triangle rule,
/// or 3x3 Gauss on [-1,1]^2.
[[nodiscard]] const QuadratureRule& facet_rule(FacetKind kind);

/// n-point Gauss-Legendre on [-1, 1] for n in 1..4.
[[nodiscard]] QuadratureRule gauss_legendre(int n);

}  // namespace stokeslab
