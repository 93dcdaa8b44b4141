#pragma once

// Meshes of a single element kind with tagged boundary node and facet sets.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stokeslab/element_kind.hpp"
#include "stokeslab/linalg.hpp"

namespace stokeslab {

/// Facet `local_face` (index into local_facets(kind)) of element `element`.
struct FaceRef {
    std::size_t element = 0;
    int local_face = 0;

    bool operator==(const FaceRef&) const = default;
    auto operator<=>(const FaceRef&) const = default;
};

/// Structured-grid metadata retained by generate_grid.
struct GridInfo {
    std::vector<int> divisions;
    Vector lower;
    Vector upper;
};

class Mesh {
public:
    /// Validates indices, distinctness and a positive Jacobian at every
    /// quadrature point. Throws MeshError naming the offending element.
    Mesh(ElementKind kind, std::vector<Vector> nodes, std::vector<std::vector<std::size_t>> elements);

    [[nodiscard]] ElementKind kind() const noexcept { return kind_; }
    [[nodiscard]] int dim() const noexcept { return dimension(kind_); }
    [[nodiscard]] std::size_t num_nodes() const noexcept { return nodes_.size(); }
    [[nodiscard]] std::size_t num_elements() const noexcept { return elements_.size(); }

    [[nodiscard]] const Vector& node(std::size_t i) const { return nodes_.at(i); }
    [[nodiscard]] const std::vector<Vector>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<std::size_t>& element(std::size_t e) const {
        return elements_.at(e);
    }
    [[nodiscard]] const std::vector<std::vector<std::size_t>>& elements() const noexcept {
        return elements_;
    }
    /// Node coordinates of element e as a nodes x dim matrix.
    [[nodiscard]] Matrix element_coords(std::size_t e) const;

    /// Facets that belong to exactly one element.
    [[nodiscard]] const std::vector<FaceRef>& boundary_facets() const noexcept {
        return boundary_facets_;
    }
    /// Global node indices of a facet.
    [[nodiscard]] std::vector<std::size_t> facet_nodes(const FaceRef& face) const;

    /// Adds (or replaces) a tag. Its facet set is every boundary facet whose
    /// nodes all lie in the node set.
    void set_node_set(const std::string& name, std::vector<std::size_t> nodes);

    [[nodiscard]] bool has_tag(const std::string& name) const { return node_sets_.count(name) > 0; }
    /// Sorted node indices of a tag; throws ConfigError naming an unknown tag.
    [[nodiscard]] const std::vector<std::size_t>& nodes_in(const std::string& name) const;
    [[nodiscard]] const std::vector<FaceRef>& faces_in(const std::string& name) const;
    [[nodiscard]] const std::map<std::string, std::vector<std::size_t>>& node_sets() const noexcept {
        return node_sets_;
    }

    [[nodiscard]] const std::optional<GridInfo>& grid() const noexcept { return grid_; }
    void set_grid(GridInfo info) { grid_ = std::move(info); }

    /// Same kind, coordinates and connectivity (tags are ignored).
    [[nodiscard]] bool same_geometry(const Mesh& other, double tol = 0.0) const;

private:
    ElementKind kind_;
    std::vector<Vector> nodes_;
    std::vector<std::vector<std::size_t>> elements_;
    std::vector<FaceRef> boundary_facets_;
    std::map<std::string, std::vector<std::size_t>> node_sets_;
    std::map<std::string, std::vector<FaceRef>> face_sets_;
    std::optional<GridInfo> grid_;
};

/// Structured mesh of the box [lower, upper]. Q4/B8 cells are split into two
/// triangles or six tetrahedra for T3/TET4. Tags: left/right (x), bottom/top (y),
/// front/back (z), and "all".
[[nodiscard]] Mesh generate_grid(ElementKind kind, const std::vector<int>& divisions,
                                 const Vector& lower, const Vector& upper);
/// Unit square or cube.
[[nodiscard]] Mesh generate_grid(ElementKind kind, const std::vector<int>& divisions);

/// Line-oriented text format:
///   stokeslab-mesh v1
///   dim <d>
///   kind <T3|TET4|Q4|B8>
///   nodes <n>          followed by n coordinate lines
///   elements <m>       followed by m lines of 0-based node indices
///   nodeset <name> <k> followed by k node indices (any line breaks)
/// Blank lines and lines starting with '#' are ignored. Without an explicit
/// "all" set the topological boundary nodes are tagged "all".
[[nodiscard]] Mesh parse_mesh(std::istream& in);
[[nodiscard]] Mesh load_mesh(const std::string& path);
void write_mesh(std::ostream& out, const Mesh& mesh);

/// Volume (area) of element e by quadrature of detJ.
[[nodiscard]] double element_measure(const Mesh& mesh, std::size_t e);
/// Largest distance between two nodes of element e.
[[nodiscard]] double element_diameter(const Mesh& mesh, std::size_t e);
/// Max element diameter.
[[nodiscard]] double mesh_size(const Mesh& mesh);

/// Largest interior angle, in degrees, over all triangles of a T3 mesh.
[[nodiscard]] double max_triangle_angle(const Mesh& mesh);

/// Index of the node closest to `point` (lowest index on ties).
[[nodiscard]] std::size_t nearest_node(const Mesh& mesh, const Vector& point);

}  // namespace stokeslab
