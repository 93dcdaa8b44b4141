#include <gtest/gtest.h>

#include <cmath>

#include "stokeslab/analysis.hpp"
#include "stokeslab/cases.hpp"
#include "stokeslab/quadrature.hpp"

using namespace stokeslab;

namespace {

Solution zero_solution(const Mesh& m) {
    Solution s;
    s.velocity.assign(m.num_nodes(), Vector(static_cast<std::size_t>(m.dim()), 0.0));
    s.pressure.assign(m.num_nodes(), 0.0);
    return s;
}

// Tensor Gauss integral of f over the unit square, independent of the mesh.
double unit_square_integral(const std::function<double(double, double)>& f) {
    const QuadratureRule g = gauss_legendre(4);
    const int cells = 40;
    double s = 0.0;
    for (int a = 0; a < cells; ++a)
        for (int b = 0; b < cells; ++b)
            for (std::size_t i = 0; i < g.weights.size(); ++i)
                for (std::size_t j = 0; j < g.weights.size(); ++j) {
                    const double x = (a + 0.5 * (g.points[i][0] + 1)) / cells;
                    const double y = (b + 0.5 * (g.points[j][0] + 1)) / cells;
                    s += g.weights[i] * g.weights[j] * f(x, y) / (4.0 * cells * cells);
                }
    return s;
}

}  // namespace

TEST(ErrorNorms, ZeroDiscreteFieldGivesExactNorms) {
    const TestCase t = body_force_cavity();
    const Mesh m = generate_grid(ElementKind::Q4, {8, 8});
    const ErrorReport r = error_norms(m, zero_solution(m), t);
    EXPECT_NEAR(r.pressure_h1semi, std::sqrt(1.0 / 3.0), 1e-13);
    const double v2 = unit_square_integral([&](double x, double y) {
        const Vector v = t.exact->velocity({x, y});
        return v[0] * v[0] + v[1] * v[1];
    });
    EXPECT_NEAR(r.velocity_l2, std::sqrt(v2), 1e-4 * std::sqrt(v2));
    EXPECT_NEAR(r.h, std::sqrt(2.0) / 8.0, 1e-15);
}

TEST(ErrorNorms, InterpolatedLinearFieldIsExact) {
    TestCase t = patch_constant(2);
    t.exact->velocity = [](const Vector& x) { return Vector{1 + 2 * x[0], 3 * x[1] - x[0]}; };
    t.exact->pressure = [](const Vector& x) { return 4 * x[0] - x[1]; };
    t.exact->pressure_gradient = [](const Vector&) { return Vector{4.0, -1.0}; };
    const Mesh m = generate_grid(ElementKind::T3, {3, 3});
    Solution s = zero_solution(m);
    for (std::size_t n = 0; n < m.num_nodes(); ++n) {
        s.velocity[n] = t.exact->velocity(m.node(n));
        s.pressure[n] = t.exact->pressure(m.node(n));
    }
    const ErrorReport r = error_norms(m, s, t);
    EXPECT_LT(r.velocity_l2, 1e-14);
    EXPECT_LT(r.pressure_h1semi, 1e-13);

    t.exact.reset();
    EXPECT_THROW((void)error_norms(m, s, t), ConfigError);
}

TEST(Convergence, SlopeFit) {
    EXPECT_NEAR(fit_slope({1, 2, 4}, {3, 12, 48}), 2.0, 1e-14);
    EXPECT_NEAR(fit_slope({0.1, 0.05}, {1.0, 0.5}), 1.0, 1e-14);
    EXPECT_THROW((void)fit_slope({1}, {1}), ConfigError);
}

TEST(Convergence, NeedsThreeLevels) {
    FormulationConfig c{.scheme = Scheme::svm};
    try {
        (void)convergence_study(body_force_cavity(), c, ElementKind::Q4, {4, 8});
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_STREQ(e.what(), "need >= 3 levels");
    }
}

TEST(Convergence, PatchIsExactAtEveryLevel) {
    FormulationConfig c{.scheme = Scheme::wvm};
    const ConvergenceResult r = convergence_study(patch_constant(2), c, ElementKind::Q4, {2, 4, 8});
    EXPECT_TRUE(r.exact);
    EXPECT_TRUE(std::isnan(r.velocity_slope));
    ASSERT_EQ(r.rows.size(), 3u);
    EXPECT_EQ(r.rows[1].divisions, 4);
}

TEST(Convergence, BodyForceVelocityIsSecondOrder) {
    FormulationConfig c{.scheme = Scheme::svm, .nu = 0.5};
    const ConvergenceResult r = convergence_study(body_force_cavity(), c, ElementKind::Q4, {4, 8, 16});
    EXPECT_FALSE(r.exact);
    EXPECT_GT(r.velocity_slope, 1.7);
    EXPECT_LT(r.rows[2].errors.velocity_l2, r.rows[0].errors.velocity_l2);
}

TEST(Spectrum, EnrichedTrianglesHaveOnlyTheHydrostaticMode) {
    const Mesh m = generate_grid(ElementKind::T3, {4, 4});
    const SpectrumReport r = lbb_spectrum(m, FormulationConfig{.scheme = Scheme::enriched});
    EXPECT_EQ(r.zero_count, 1u);
    EXPECT_FALSE(r.checkerboard_present);
    EXPECT_LT(r.hydrostatic_residual, 1e-8);
    EXPECT_EQ(r.eigenvalues.size(), m.num_nodes());
    for (std::size_t i = 1; i < r.eigenvalues.size(); ++i) EXPECT_LE(r.eigenvalues[i - 1], r.eigenvalues[i]);
}

TEST(Spectrum, EnrichedQuadsKeepTheCheckerboard) {
    const Mesh m = generate_grid(ElementKind::Q4, {4, 4});
    const SpectrumReport r = lbb_spectrum(m, FormulationConfig{.scheme = Scheme::enriched});
    EXPECT_EQ(r.zero_count, 2u);
    EXPECT_TRUE(r.checkerboard_present);
    EXPECT_GT(r.checkerboard_correlation, 0.99);
    EXPECT_LT(r.hydrostatic_residual, 1e-8);
}

TEST(Spectrum, StabilizedQuadsRemoveTheCheckerboard) {
    const Mesh m = generate_grid(ElementKind::Q4, {4, 4});
    for (Scheme s : {Scheme::svm, Scheme::wvm}) {
        const SpectrumReport r = lbb_spectrum(m, FormulationConfig{.scheme = s});
        EXPECT_EQ(r.zero_count, 1u) << to_string(s);
        EXPECT_FALSE(r.checkerboard_present);
        EXPECT_LT(r.hydrostatic_residual, 1e-8);
    }
    const SpectrumReport gal = lbb_spectrum(m, FormulationConfig{});
    EXPECT_GT(gal.zero_count, 1u);
}

TEST(Spectrum, SingleCellHasNoInteriorVelocity) {
    const Mesh m = generate_grid(ElementKind::Q4, {1, 1});
    EXPECT_THROW((void)lbb_spectrum(m, FormulationConfig{.scheme = Scheme::svm}), ConfigError);
}

TEST(Vortex, SyntheticCrossing) {
    const Mesh m = generate_grid(ElementKind::Q4, {8, 8});
    std::vector<Vector> v(m.num_nodes());
    for (std::size_t n = 0; n < m.num_nodes(); ++n) v[n] = {m.node(n)[1] - 0.7, 0.0};
    EXPECT_NEAR(locate_vortex(m, v), 0.7, 1e-14);

    // Two crossings: the topmost one is reported.
    for (std::size_t n = 0; n < m.num_nodes(); ++n) {
        const double y = m.node(n)[1];
        v[n] = {(y - 0.3) * (y - 0.8), 0.0};
    }
    const double top = locate_vortex(m, v);
    EXPECT_GT(top, 0.75);
    EXPECT_LT(top, 0.875);

    for (auto& w : v) w = {1.0, 0.0};
    EXPECT_THROW((void)locate_vortex(m, v), ConfigError);
}
