#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace stokeslab {

/// Linear element families. Node orderings follow VTK:
///   T3   (0,0) (1,0) (0,1)
///   TET4 (0,0,0) (1,0,0) (0,1,0) (0,0,1)
///   Q4   (-1,-1) (1,-1) (1,1) (-1,1)
///   B8   Q4 ordering at zeta = -1, then at zeta = +1
enum class ElementKind { T3, TET4, Q4, B8 };

/// Boundary facet shapes of the element families above.
enum class FacetKind { Line2, Tri3, Quad4 };

[[nodiscard]] constexpr int dimension(ElementKind kind) {
    return (kind == ElementKind::T3 || kind == ElementKind::Q4) ? 2 : 3;
}

[[nodiscard]] constexpr int nodes_per_element(ElementKind kind) {
    switch (kind) {
        case ElementKind::T3: return 3;
        case ElementKind::TET4: return 4;
        case ElementKind::Q4: return 4;
        case ElementKind::B8: return 8;
    }
    return 0;
}

[[nodiscard]] constexpr bool is_simplex(ElementKind kind) {
    return kind == ElementKind::T3 || kind == ElementKind::TET4;
}

/// Measure of the reference element: 1/2, 1/6, 4, 8.
[[nodiscard]] constexpr double reference_measure(ElementKind kind) {
    switch (kind) {
        case ElementKind::T3: return 0.5;
        case ElementKind::TET4: return 1.0 / 6.0;
        case ElementKind::Q4: return 4.0;
        case ElementKind::B8: return 8.0;
    }
    return 0.0;
}

[[nodiscard]] constexpr FacetKind facet_kind(ElementKind kind) {
    switch (kind) {
        case ElementKind::T3:
        case ElementKind::Q4: return FacetKind::Line2;
        case ElementKind::TET4: return FacetKind::Tri3;
        case ElementKind::B8: return FacetKind::Quad4;
    }
    return FacetKind::Line2;
}

/// "T3", "TET4", "Q4", "B8".
[[nodiscard]] std::string to_string(ElementKind kind);

/// Case-insensitive inverse of to_string; throws ConfigError.
[[nodiscard]] ElementKind parse_element_kind(std::string_view name);

/// Local node lists of each facet of the reference element.
[[nodiscard]] const std::vector<std::vector<int>>& local_facets(ElementKind kind);

/// Reference coordinates of the element nodes (nodes x dim, row-major).
[[nodiscard]] std::vector<std::vector<double>> reference_nodes(ElementKind kind);

}  // namespace stokeslab
