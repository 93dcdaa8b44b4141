#include <gtest/gtest.h>

#include <cmath>

#include <set>
#include <sstream>

#include "stokeslab/mesh.hpp"

using namespace stokeslab;

namespace {
const std::string kFixture = std::string(STOKESLAB_DATA_DIR) + "/wct_unit_square.mesh";

double total_measure(const Mesh& m) {
    double s = 0.0;
    for (std::size_t e = 0; e < m.num_elements(); ++e) s += element_measure(m, e);
    return s;
}
}  // namespace

TEST(Grid, Counts) {
    const Mesh q = generate_grid(ElementKind::Q4, {10, 10});
    EXPECT_EQ(q.num_nodes(), 121u);
    EXPECT_EQ(q.num_elements(), 100u);

    const Mesh b = generate_grid(ElementKind::B8, {2, 2, 2});
    EXPECT_EQ(b.num_nodes(), 27u);
    EXPECT_EQ(b.num_elements(), 8u);

    const Mesh t = generate_grid(ElementKind::T3, {1, 1});
    EXPECT_EQ(t.num_elements(), 2u);
    for (std::size_t e = 0; e < 2; ++e) EXPECT_GT(element_measure(t, e), 0.0);

    const Mesh tet = generate_grid(ElementKind::TET4, {2, 2, 2});
    EXPECT_EQ(tet.num_elements(), 48u);
}

TEST(Grid, RejectsBadInput) {
    EXPECT_THROW((void)generate_grid(ElementKind::Q4, {0, 3}), ConfigError);
    EXPECT_THROW((void)generate_grid(ElementKind::Q4, {3, 3}, {0, 0}, {1, 0}), ConfigError);
    EXPECT_THROW((void)generate_grid(ElementKind::B8, {3, 3}), ConfigError);
}

TEST(Grid, SimplexSplitsCoverTheBox) {
    const Vector lo3{-1, 0, 0.5}, hi3{2, 1.5, 1.25};
    const double vol = 3 * 1.5 * 0.75;
    for (ElementKind kind : {ElementKind::TET4, ElementKind::B8}) {
        const Mesh m = generate_grid(kind, {3, 2, 4}, lo3, hi3);
        EXPECT_NEAR(total_measure(m), vol, 1e-12 * vol);
    }
    for (ElementKind kind : {ElementKind::T3, ElementKind::Q4}) {
        const Mesh m = generate_grid(kind, {5, 3}, {0, 0}, {2, 0.5});
        EXPECT_NEAR(total_measure(m), 1.0, 1e-12);
    }
}

TEST(Grid, TetraSplitIsConforming) {
    // Interior facets are shared by exactly two tetrahedra, so only the 12 n^2
    // triangles on the cube surface remain unpaired.
    const int n = 3;
    const Mesh m = generate_grid(ElementKind::TET4, {n, n, n});
    EXPECT_EQ(m.boundary_facets().size(), static_cast<std::size_t>(12 * n * n));
    const Mesh t = generate_grid(ElementKind::T3, {n, n});
    EXPECT_EQ(t.boundary_facets().size(), static_cast<std::size_t>(4 * n));
}

TEST(Grid, RefinementNesting) {
    for (ElementKind kind : {ElementKind::T3, ElementKind::Q4, ElementKind::TET4, ElementKind::B8}) {
        const int d = dimension(kind);
        const Mesh coarse = generate_grid(kind, std::vector<int>(static_cast<std::size_t>(d), 3));
        const Mesh fine = generate_grid(kind, std::vector<int>(static_cast<std::size_t>(d), 6));
        for (const Vector& x : coarse.nodes()) {
            const Vector& y = fine.node(nearest_node(fine, x));
            for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(x[k], y[k], 1e-12);
        }
    }
}

TEST(Grid, BoundaryTags) {
    for (ElementKind kind : {ElementKind::Q4, ElementKind::TET4}) {
        const int d = dimension(kind);
        const Mesh m = generate_grid(kind, std::vector<int>(static_cast<std::size_t>(d), 4));
        std::set<std::size_t> faces_union;
        std::vector<std::string> names = {"left", "right", "bottom", "top"};
        if (d == 3) {
            names.push_back("front");
            names.push_back("back");
        }
        for (const auto& name : names) {
            for (std::size_t n : m.nodes_in(name)) {
                faces_union.insert(n);
                const Vector& x = m.node(n);
                bool on_boundary = false;
                for (double c : x) on_boundary = on_boundary || c == 0.0 || c == 1.0;
                EXPECT_TRUE(on_boundary);
            }
            EXPECT_FALSE(m.faces_in(name).empty());
        }
        const auto& all = m.nodes_in("all");
        EXPECT_EQ(std::set<std::size_t>(all.begin(), all.end()), faces_union);
        EXPECT_EQ(m.faces_in("all").size(), m.boundary_facets().size());
    }
    const Mesh q = generate_grid(ElementKind::Q4, {10, 10});
    EXPECT_EQ(q.nodes_in("all").size(), 40u);
    EXPECT_EQ(q.faces_in("top").size(), 10u);
    EXPECT_THROW((void)q.nodes_in("lid"), ConfigError);
}

TEST(MeshFile, RoundTripEqualsGeneratedGrid) {
    const std::string text =
        "stokeslab-mesh v1\n"
        "dim 2\n"
        "kind T3\n"
        "nodes 4\n"
        "0 0\n1 0\n0 1\n1 1\n"
        "elements 2\n"
        "0 1 3\n0 3 2\n";
    std::istringstream in(text);
    const Mesh m = parse_mesh(in);
    EXPECT_TRUE(m.same_geometry(generate_grid(ElementKind::T3, {1, 1})));
    EXPECT_EQ(m.nodes_in("all").size(), 4u);

    const Mesh g = generate_grid(ElementKind::B8, {2, 1, 3});
    std::stringstream io;
    write_mesh(io, g);
    const Mesh back = parse_mesh(io);
    EXPECT_TRUE(back.same_geometry(g));
    EXPECT_EQ(back.nodes_in("front"), g.nodes_in("front"));
}

TEST(MeshFile, ErrorsCarryDiagnostics) {
    const std::string head = "stokeslab-mesh v1\ndim 2\nkind T3\nnodes 4\n0 0\n1 0\n0 1\n1 1\n";
    {
        std::istringstream in(head + "elements 1\n0 1 999\n");
        try {
            (void)parse_mesh(in);
            FAIL();
        } catch (const ParseError& e) {
            EXPECT_EQ(e.line(), 10u);
            EXPECT_NE(std::string(e.what()).find("out of range"), std::string::npos);
        }
    }
    {
        std::istringstream in(head + "elements 2\n0 1 3\n0 2 3\n");  // second is clockwise
        try {
            (void)parse_mesh(in);
            FAIL();
        } catch (const MeshError& e) {
            EXPECT_NE(std::string(e.what()).find("element 1"), std::string::npos);
            EXPECT_NE(std::string(e.what()).find("inverted"), std::string::npos);
        }
    }
    {
        std::istringstream in("stokeslab-mesh v1\ndim 2\nkind T3\nnodes 1\n0 zero\n");
        EXPECT_THROW((void)parse_mesh(in), ParseError);
    }
    {
        std::istringstream in("stokeslab-mesh v2\n");
        EXPECT_THROW((void)parse_mesh(in), ParseError);
    }
    {
        std::istringstream in("stokeslab-mesh v1\ndim 3\nkind Q4\n");
        EXPECT_THROW((void)parse_mesh(in), ParseError);
    }
    EXPECT_THROW((void)load_mesh("/nonexistent/file.mesh"), MeshError);
}

TEST(MeshFile, ConstructorValidates) {
    EXPECT_THROW(Mesh(ElementKind::T3, {{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 1}}), MeshError);
    EXPECT_THROW(Mesh(ElementKind::T3, {{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 5}}), MeshError);
    EXPECT_THROW(Mesh(ElementKind::T3, {{0, 0, 0}}, {}), MeshError);
}

TEST(Fixture, AcuteTriangulationAudit) {
    const Mesh m = load_mesh(kFixture);
    EXPECT_EQ(m.kind(), ElementKind::T3);
    EXPECT_GE(m.num_elements(), 300u);
    EXPECT_LT(max_triangle_angle(m), 90.0);
    EXPECT_NEAR(total_measure(m), 1.0, 1e-12);
    for (const char* tag : {"all", "left", "right", "bottom", "top"}) EXPECT_TRUE(m.has_tag(tag));
}

TEST(Geometry, SizesAndAngles) {
    const Mesh q = generate_grid(ElementKind::Q4, {4, 4});
    EXPECT_NEAR(mesh_size(q), std::sqrt(2.0) / 4, 1e-15);
    const Mesh t = generate_grid(ElementKind::T3, {2, 2});
    EXPECT_NEAR(max_triangle_angle(t), 90.0, 1e-12);
    EXPECT_THROW((void)max_triangle_angle(q), ConfigError);
}
