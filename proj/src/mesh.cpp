#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "stokeslab/element_basis.hpp"
#include "stokeslab/mesh.hpp"
#include "stokeslab/quadrature.hpp"

namespace stokeslab {

Mesh::Mesh(ElementKind kind, std::vector<Vector> nodes,
           std::vector<std::vector<std::size_t>> elements)
    : kind_(kind), nodes_(std::move(nodes)), elements_(std::move(elements)) {
    const auto d = static_cast<std::size_t>(dim());
    const auto npe = static_cast<std::size_t>(nodes_per_element(kind_));
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].size() != d)
            throw MeshError("node " + std::to_string(i) + " has " +
                            std::to_string(nodes_[i].size()) + " coordinates, expected " +
                            std::to_string(d));

    const QuadratureRule& rule = rule_for(kind_);
    for (std::size_t e = 0; e < elements_.size(); ++e) {
        const auto& el = elements_[e];
        const std::string tag = "element " + std::to_string(e) + ": ";
        if (el.size() != npe)
            throw MeshError(tag + "has " + std::to_string(el.size()) + " nodes, expected " +
                            std::to_string(npe));
        for (std::size_t n : el)
            if (n >= nodes_.size())
                throw MeshError(tag + "node index " + std::to_string(n) + " out of range (" +
                                std::to_string(nodes_.size()) + " nodes)");
        std::vector<std::size_t> sorted = el;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw MeshError(tag + "repeated node index");

        const Matrix x = element_coords(e);
        for (const Vector& xi : rule.points) {
            try {
                (void)jacobian_calc(kind_, x, xi);
            } catch (const MeshError& err) {
                throw MeshError(tag + err.what());
            }
        }
    }

    // A facet is on the boundary iff exactly one element owns it.
    std::map<std::vector<std::size_t>, std::vector<FaceRef>> owners;
    const auto& facets = local_facets(kind_);
    for (std::size_t e = 0; e < elements_.size(); ++e)
        for (std::size_t f = 0; f < facets.size(); ++f) {
            FaceRef ref{e, static_cast<int>(f)};
            std::vector<std::size_t> key = facet_nodes(ref);
            std::sort(key.begin(), key.end());
            owners[key].push_back(ref);
        }
    for (const auto& [key, refs] : owners)
        if (refs.size() == 1) boundary_facets_.push_back(refs.front());
    std::sort(boundary_facets_.begin(), boundary_facets_.end());
}

Matrix Mesh::element_coords(std::size_t e) const {
    const auto& el = elements_.at(e);
    const auto d = static_cast<std::size_t>(dim());
    Matrix x(el.size(), d);
    for (std::size_t a = 0; a < el.size(); ++a)
        for (std::size_t i = 0; i < d; ++i) x(a, i) = nodes_[el[a]][i];
    return x;
}

std::vector<std::size_t> Mesh::facet_nodes(const FaceRef& face) const {
    const auto& local = local_facets(kind_).at(static_cast<std::size_t>(face.local_face));
    const auto& el = elements_.at(face.element);
    std::vector<std::size_t> out;
    out.reserve(local.size());
    for (int a : local) out.push_back(el[static_cast<std::size_t>(a)]);
    return out;
}

void Mesh::set_node_set(const std::string& name, std::vector<std::size_t> nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    for (std::size_t n : nodes)
        if (n >= nodes_.size())
            throw MeshError("nodeset " + name + ": node index " + std::to_string(n) +
                            " out of range");
    std::vector<FaceRef> faces;
    for (const FaceRef& f : boundary_facets_) {
        const auto fn = facet_nodes(f);
        if (std::all_of(fn.begin(), fn.end(), [&](std::size_t n) {
                return std::binary_search(nodes.begin(), nodes.end(), n);
            }))
            faces.push_back(f);
    }
    node_sets_[name] = std::move(nodes);
    face_sets_[name] = std::move(faces);
}

const std::vector<std::size_t>& Mesh::nodes_in(const std::string& name) const {
    auto it = node_sets_.find(name);
    if (it == node_sets_.end()) throw ConfigError("unknown boundary tag '" + name + "'");
    return it->second;
}

const std::vector<FaceRef>& Mesh::faces_in(const std::string& name) const {
    auto it = face_sets_.find(name);
    if (it == face_sets_.end()) throw ConfigError("unknown boundary tag '" + name + "'");
    return it->second;
}

bool Mesh::same_geometry(const Mesh& other, double tol) const {
    if (kind_ != other.kind_ || elements_ != other.elements_ || nodes_.size() != other.nodes_.size())
        return false;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        for (std::size_t k = 0; k < nodes_[i].size(); ++k)
            if (std::abs(nodes_[i][k] - other.nodes_[i][k]) > tol) return false;
    return true;
}

// ---------------------------------------------------------------------------

namespace {

double signed_tet_volume(const std::vector<Vector>& x, const std::vector<std::size_t>& t) {
    double a[3][3];
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a[r][c] = x[t[r + 1]][c] - x[t[0]][c];
    return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
            a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
            a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])) /
           6.0;
}

}  // namespace

Mesh generate_grid(ElementKind kind, const std::vector<int>& divisions, const Vector& lower,
                   const Vector& upper) {
    const int d = dimension(kind);
    const auto du = static_cast<std::size_t>(d);
    if (divisions.size() != du || lower.size() != du || upper.size() != du)
        throw ConfigError("generate_grid: " + to_string(kind) + " needs " + std::to_string(d) +
                          " divisions and extents");
    for (std::size_t k = 0; k < du; ++k) {
        if (divisions[k] < 1) throw ConfigError("generate_grid: divisions must be >= 1");
        if (!(upper[k] - lower[k] > 0.0))
            throw ConfigError("generate_grid: extent must have positive side lengths");
    }

    const std::size_t nx = static_cast<std::size_t>(divisions[0]);
    const std::size_t ny = static_cast<std::size_t>(divisions[1]);
    const std::size_t nz = d == 3 ? static_cast<std::size_t>(divisions[2]) : 0;
    auto id = [&](std::size_t i, std::size_t j, std::size_t k) {
        return i + (nx + 1) * (j + (ny + 1) * k);
    };

    std::vector<Vector> nodes;
    for (std::size_t k = 0; k <= nz; ++k)
        for (std::size_t j = 0; j <= ny; ++j)
            for (std::size_t i = 0; i <= nx; ++i) {
                const std::size_t ijk[3] = {i, j, k};
                Vector x(du);
                for (std::size_t a = 0; a < du; ++a)
                    x[a] = lower[a] + (upper[a] - lower[a]) * static_cast<double>(ijk[a]) /
                                          static_cast<double>(divisions[a]);
                nodes.push_back(std::move(x));
            }

    std::vector<std::vector<std::size_t>> elements;
    if (d == 2) {
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i) {
                const std::size_t n00 = id(i, j, 0), n10 = id(i + 1, j, 0);
                const std::size_t n11 = id(i + 1, j + 1, 0), n01 = id(i, j + 1, 0);
                if (kind == ElementKind::Q4) {
                    elements.push_back({n00, n10, n11, n01});
                } else {
                    elements.push_back({n00, n10, n11});
                    elements.push_back({n00, n11, n01});
                }
            }
    } else {
        for (std::size_t k = 0; k < nz; ++k)
            for (std::size_t j = 0; j < ny; ++j)
                for (std::size_t i = 0; i < nx; ++i) {
                    auto v = [&](std::size_t a, std::size_t b, std::size_t c) {
                        return id(i + a, j + b, k + c);
                    };
                    if (kind == ElementKind::B8) {
                        elements.push_back({v(0, 0, 0), v(1, 0, 0), v(1, 1, 0), v(0, 1, 0),
                                            v(0, 0, 1), v(1, 0, 1), v(1, 1, 1), v(0, 1, 1)});
                        continue;
                    }
                    // Six tetrahedra around the (0,0,0)-(1,1,1) diagonal, one per
                    // monotone path through the cell; identical in every cell, so
                    // shared faces are split the same way on both sides.
                    int axes[3] = {0, 1, 2};
                    do {
                        std::size_t step[3] = {0, 0, 0};
                        std::vector<std::size_t> tet{v(0, 0, 0)};
                        for (int s = 0; s < 2; ++s) {
                            step[axes[s]] = 1;
                            tet.push_back(v(step[0], step[1], step[2]));
                        }
                        tet.push_back(v(1, 1, 1));
                        if (signed_tet_volume(nodes, tet) < 0.0) std::swap(tet[2], tet[3]);
                        elements.push_back(std::move(tet));
                    } while (std::next_permutation(axes, axes + 3));
                }
    }

    Mesh mesh(kind, std::move(nodes), std::move(elements));

    const char* names[3][2] = {{"left", "right"}, {"bottom", "top"}, {"front", "back"}};
    const std::size_t counts[3] = {nx, ny, nz};
    std::vector<std::size_t> all;
    for (std::size_t a = 0; a < du; ++a)
        for (int side = 0; side < 2; ++side) {
            std::vector<std::size_t> set;
            const std::size_t target = side == 0 ? 0 : counts[a];
            for (std::size_t k = 0; k <= nz; ++k)
                for (std::size_t j = 0; j <= ny; ++j)
                    for (std::size_t i = 0; i <= nx; ++i) {
                        const std::size_t ijk[3] = {i, j, k};
                        if (ijk[a] == target) set.push_back(id(i, j, k));
                    }
            all.insert(all.end(), set.begin(), set.end());
            mesh.set_node_set(names[a][side], std::move(set));
        }
    mesh.set_node_set("all", std::move(all));
    mesh.set_grid(GridInfo{divisions, lower, upper});
    return mesh;
}

Mesh generate_grid(ElementKind kind, const std::vector<int>& divisions) {
    const auto d = static_cast<std::size_t>(dimension(kind));
    return generate_grid(kind, divisions, Vector(d, 0.0), Vector(d, 1.0));
}

// ---------------------------------------------------------------------------

namespace {

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    // Next non-blank, non-comment line split into tokens; false at EOF.
    bool next(std::vector<std::string>& tokens) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            std::istringstream ss(line);
            tokens.clear();
            std::string t;
            while (ss >> t) tokens.push_back(t);
            if (tokens.empty() || tokens.front()[0] == '#') continue;
            return true;
        }
        return false;
    }

    std::vector<std::string> require(const std::string& what) {
        std::vector<std::string> tokens;
        if (!next(tokens)) throw ParseError(line_ + 1, "unexpected end of file, expected " + what);
        return tokens;
    }

    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

double to_double(const std::string& s, std::size_t line, const std::string& field) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw ParseError(line, field + ": expected a number, got '" + s + "'");
}

std::size_t to_index(const std::string& s, std::size_t line, const std::string& field) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
        throw ParseError(line, field + ": expected a non-negative integer, got '" + s + "'");
    try {
        return static_cast<std::size_t>(std::stoull(s));
    } catch (const std::exception&) {
        throw ParseError(line, field + ": integer out of range '" + s + "'");
    }
}

std::size_t keyword_count(const std::vector<std::string>& t, const std::string& key,
                          std::size_t line) {
    if (t.size() != 2 || t[0] != key)
        throw ParseError(line, "expected '" + key + " <count>'");
    return to_index(t[1], line, key);
}

}  // namespace

Mesh parse_mesh(std::istream& in) {
    LineReader reader(in);
    auto t = reader.require("header");
    if (t.size() != 2 || t[0] != "stokeslab-mesh" || t[1] != "v1")
        throw ParseError(reader.line(), "expected header 'stokeslab-mesh v1'");

    t = reader.require("dim");
    const std::size_t d = keyword_count(t, "dim", reader.line());
    if (d != 2 && d != 3) throw ParseError(reader.line(), "dim must be 2 or 3");

    t = reader.require("kind");
    if (t.size() != 2 || t[0] != "kind") throw ParseError(reader.line(), "expected 'kind <K>'");
    ElementKind kind;
    try {
        kind = parse_element_kind(t[1]);
    } catch (const ConfigError& e) {
        throw ParseError(reader.line(), e.what());
    }
    if (static_cast<std::size_t>(dimension(kind)) != d)
        throw ParseError(reader.line(), "kind " + t[1] + " does not match dim " + std::to_string(d));

    t = reader.require("nodes");
    const std::size_t n_nodes = keyword_count(t, "nodes", reader.line());
    std::vector<Vector> nodes;
    nodes.reserve(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        t = reader.require("node coordinates");
        if (t.size() != d)
            throw ParseError(reader.line(), "node " + std::to_string(i) + ": expected " +
                                                std::to_string(d) + " coordinates");
        Vector x(d);
        for (std::size_t k = 0; k < d; ++k)
            x[k] = to_double(t[k], reader.line(), "node " + std::to_string(i));
        nodes.push_back(std::move(x));
    }

    t = reader.require("elements");
    const std::size_t n_elements = keyword_count(t, "elements", reader.line());
    const auto npe = static_cast<std::size_t>(nodes_per_element(kind));
    std::vector<std::vector<std::size_t>> elements;
    elements.reserve(n_elements);
    for (std::size_t e = 0; e < n_elements; ++e) {
        t = reader.require("element connectivity");
        const std::string field = "element " + std::to_string(e);
        if (t.size() != npe)
            throw ParseError(reader.line(),
                             field + ": expected " + std::to_string(npe) + " node indices");
        std::vector<std::size_t> el(npe);
        for (std::size_t a = 0; a < npe; ++a) {
            el[a] = to_index(t[a], reader.line(), field);
            if (el[a] >= n_nodes)
                throw ParseError(reader.line(), field + ": node index " + t[a] +
                                                    " out of range (" + std::to_string(n_nodes) +
                                                    " nodes)");
        }
        elements.push_back(std::move(el));
    }

    std::vector<std::pair<std::string, std::vector<std::size_t>>> sets;
    std::vector<std::string> tokens;
    while (reader.next(tokens)) {
        if (tokens.size() != 3 || tokens[0] != "nodeset")
            throw ParseError(reader.line(), "expected 'nodeset <name> <count>'");
        const std::string name = tokens[1];
        const std::size_t k = to_index(tokens[2], reader.line(), "nodeset " + name);
        std::vector<std::size_t> ids;
        while (ids.size() < k) {
            auto row = reader.require("nodeset " + name + " indices");
            for (const auto& s : row) {
                const std::size_t n = to_index(s, reader.line(), "nodeset " + name);
                if (n >= n_nodes)
                    throw ParseError(reader.line(), "nodeset " + name + ": node index " + s +
                                                        " out of range");
                ids.push_back(n);
            }
        }
        if (ids.size() != k)
            throw ParseError(reader.line(), "nodeset " + name + ": more indices than declared");
        sets.emplace_back(name, std::move(ids));
    }

    Mesh mesh(kind, std::move(nodes), std::move(elements));
    for (auto& [name, ids] : sets) mesh.set_node_set(name, std::move(ids));
    if (!mesh.has_tag("all")) {
        std::vector<std::size_t> boundary;
        for (const FaceRef& f : mesh.boundary_facets()) {
            const auto fn = mesh.facet_nodes(f);
            boundary.insert(boundary.end(), fn.begin(), fn.end());
        }
        mesh.set_node_set("all", std::move(boundary));
    }
    return mesh;
}

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open mesh file '" + path + "'");
    return parse_mesh(in);
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
    char buf[64];
    out << "stokeslab-mesh v1\n";
    out << "dim " << mesh.dim() << "\n";
    out << "kind " << to_string(mesh.kind()) << "\n";
    out << "nodes " << mesh.num_nodes() << "\n";
    for (const Vector& x : mesh.nodes()) {
        for (std::size_t k = 0; k < x.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", x[k]);
            out << (k ? " " : "") << buf;
        }
        out << "\n";
    }
    out << "elements " << mesh.num_elements() << "\n";
    for (const auto& el : mesh.elements()) {
        for (std::size_t a = 0; a < el.size(); ++a) out << (a ? " " : "") << el[a];
        out << "\n";
    }
    for (const auto& [name, ids] : mesh.node_sets()) {
        out << "nodeset " << name << " " << ids.size() << "\n";
        for (std::size_t i = 0; i < ids.size(); ++i)
            out << ids[i] << ((i + 1) % 16 == 0 || i + 1 == ids.size() ? "\n" : " ");
    }
}

// ---------------------------------------------------------------------------

double element_measure(const Mesh& mesh, std::size_t e) {
    const QuadratureRule& rule = rule_for(mesh.kind());
    const Matrix x = mesh.element_coords(e);
    double m = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q)
        m += rule.weights[q] * jacobian_calc(mesh.kind(), x, rule.points[q]).detJ;
    return m;
}

double element_diameter(const Mesh& mesh, std::size_t e) {
    const auto& el = mesh.element(e);
    double d = 0.0;
    for (std::size_t a = 0; a < el.size(); ++a)
        for (std::size_t b = a + 1; b < el.size(); ++b) {
            double s = 0.0;
            for (std::size_t k = 0; k < mesh.node(el[a]).size(); ++k)
                s += std::pow(mesh.node(el[a])[k] - mesh.node(el[b])[k], 2);
            d = std::max(d, std::sqrt(s));
        }
    return d;
}

double mesh_size(const Mesh& mesh) {
    double h = 0.0;
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) h = std::max(h, element_diameter(mesh, e));
    return h;
}

double max_triangle_angle(const Mesh& mesh) {
    if (mesh.kind() != ElementKind::T3) throw ConfigError("max_triangle_angle: T3 mesh required");
    double worst = 0.0;
    for (const auto& el : mesh.elements())
        for (std::size_t a = 0; a < 3; ++a) {
            const Vector& p = mesh.node(el[a]);
            const Vector& q = mesh.node(el[(a + 1) % 3]);
            const Vector& r = mesh.node(el[(a + 2) % 3]);
            const double ux = q[0] - p[0], uy = q[1] - p[1];
            const double vx = r[0] - p[0], vy = r[1] - p[1];
            const double angle = std::atan2(std::abs(ux * vy - uy * vx), ux * vx + uy * vy);
            worst = std::max(worst, angle * 180.0 / M_PI);
        }
    return worst;
}

std::size_t nearest_node(const Mesh& mesh, const Vector& point) {
    std::size_t best = 0;
    double best_d = INFINITY;
    for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < point.size(); ++k) s += std::pow(mesh.node(i)[k] - point[k], 2);
        if (s < best_d) {
            best_d = s;
            best = i;
        }
    }
    return best;
}

}  // namespace stokeslab
