#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "stokeslab/io.hpp"

using namespace stokeslab;

TEST(FormatDouble, RoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, 10.0}) {
        const std::string s = format_double(v);
        EXPECT_EQ(std::stod(s), v) << s;
    }
    EXPECT_EQ(format_double(10.0), "10");
    EXPECT_EQ(format_double(0.5), "0.5");
}

class VtkRoundTrip : public ::testing::TestWithParam<ElementKind> {};

TEST_P(VtkRoundTrip, FieldsAndConnectivitySurvive) {
    const ElementKind kind = GetParam();
    const int d = dimension(kind);
    const Mesh m = generate_grid(kind, std::vector<int>(static_cast<std::size_t>(d), 2));
    std::vector<Vector> v(m.num_nodes());
    Vector p(m.num_nodes());
    for (std::size_t n = 0; n < m.num_nodes(); ++n) {
        v[n] = m.node(n);
        v[n][0] += 1.0 / 7.0;
        p[n] = std::exp(m.node(n)[0]) - 1.0 / 3.0;
    }
    std::stringstream ss;
    write_vtk(ss, m, v, p, "round trip");
    const VtkData data = parse_vtk(ss);

    EXPECT_EQ(data.title, "round trip");
    ASSERT_EQ(data.points.size(), m.num_nodes());
    ASSERT_EQ(data.cells.size(), m.num_elements());
    for (std::size_t e = 0; e < m.num_elements(); ++e) {
        EXPECT_EQ(data.cells[e], m.element(e));
        EXPECT_EQ(data.cell_types[e], vtk_cell_type(kind));
    }
    ASSERT_EQ(data.vectors.count("velocity"), 1u);
    ASSERT_EQ(data.scalars.count("pressure"), 1u);
    for (std::size_t n = 0; n < m.num_nodes(); ++n) {
        for (int k = 0; k < 3; ++k) {
            const double want_x = k < d ? m.node(n)[static_cast<std::size_t>(k)] : 0.0;
            const double want_v = k < d ? v[n][static_cast<std::size_t>(k)] : 0.0;
            EXPECT_EQ(data.points[n][static_cast<std::size_t>(k)], want_x);
            EXPECT_EQ(data.vectors.at("velocity")[n][static_cast<std::size_t>(k)], want_v);
        }
        EXPECT_EQ(data.scalars.at("pressure")[n], p[n]);
    }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, VtkRoundTrip,
                         ::testing::Values(ElementKind::T3, ElementKind::TET4, ElementKind::Q4,
                                           ElementKind::B8),
                         [](const auto& info) { return to_string(info.param); });

TEST(Vtk, CellTypes) {
    EXPECT_EQ(vtk_cell_type(ElementKind::T3), 5);
    EXPECT_EQ(vtk_cell_type(ElementKind::TET4), 10);
    EXPECT_EQ(vtk_cell_type(ElementKind::Q4), 9);
    EXPECT_EQ(vtk_cell_type(ElementKind::B8), 12);
}

TEST(Vtk, SizeMismatchIsRejected) {
    const Mesh m = generate_grid(ElementKind::Q4, {1, 1});
    std::stringstream ss;
    EXPECT_THROW(write_vtk(ss, m, std::vector<Vector>(3, Vector{0, 0}), Vector(4, 0.0)), ConfigError);
}

TEST(Vtk, MalformedInputReportsTheLine) {
    const Mesh m = generate_grid(ElementKind::T3, {1, 1});
    std::stringstream ss;
    write_vtk(ss, m, std::vector<Vector>(4, Vector{0, 0}), Vector(4, 0.0));
    std::string text = ss.str();
    // Corrupt the second point (line 7).
    const auto pos = text.find("1 0 0");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 5, "1 zz 0");
    std::istringstream in(text);
    try {
        (void)parse_vtk(in);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 7u);
    }

    std::istringstream not_vtk("hello\n");
    EXPECT_THROW((void)parse_vtk(not_vtk), ParseError);
}
