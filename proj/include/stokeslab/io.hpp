#pragma once

// VTK legacy ASCII export/import and fixed-precision number formatting.

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "stokeslab/linalg.hpp"
#include "stokeslab/mesh.hpp"

namespace stokeslab {

/// %.17g, so values round-trip exactly.
[[nodiscard]] std::string format_double(double v);

/// VTK cell type: 5 (T3), 10 (TET4), 9 (Q4), 12 (B8).
[[nodiscard]] int vtk_cell_type(ElementKind kind);

/// Legacy 3.0 ASCII UNSTRUCTURED_GRID with POINT_DATA "velocity" (VECTORS,
/// z = 0 in 2-D) and "pressure" (SCALARS).
void write_vtk(std::ostream& out, const Mesh& mesh, const std::vector<Vector>& velocity,
               const Vector& pressure, const std::string& title = "stokeslab");

/// What the parser recovers from a legacy ASCII unstructured grid.
struct VtkData {
    std::string title;
    std::vector<std::array<double, 3>> points;
    std::vector<std::vector<std::size_t>> cells;
    std::vector<int> cell_types;
    std::map<std::string, std::vector<std::array<double, 3>>> vectors;
    std::map<std::string, std::vector<double>> scalars;
};

/// Parses the subset of the legacy grammar that write_vtk emits
/// (POINTS, CELLS, CELL_TYPES, POINT_DATA with SCALARS/LOOKUP_TABLE and VECTORS).
/// Throws ParseError with a line number.
[[nodiscard]] VtkData parse_vtk(std::istream& in);

}  // namespace stokeslab
