#pragma once

// Benchmark problems: boundary data, body forces and exact solutions.

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stokeslab/formulations.hpp"
#include "stokeslab/mesh.hpp"

namespace stokeslab {

/// Velocity prescribed on a tag. `components[i]` false leaves component i free.
struct DirichletCondition {
    std::string tag;
    VectorField value;
    std::vector<bool> components;
};

struct TractionCondition {
    std::string tag;
    VectorField traction;
};

/// Pressure fixed at the node nearest `location`; the node must lie within
/// `tolerance` of it.
struct PressurePin {
    Vector location;
    double value = 0.0;
    double tolerance = std::numeric_limits<double>::infinity();
};

struct ExactSolution {
    VectorField velocity;
    ScalarField pressure;
    VectorField pressure_gradient;
};

struct TestCase {
    std::string name;
    int dim = 2;
    double nu = 1.0;  ///< viscosity the exact data was built for
    /// Applied in order; a later entry overrides earlier ones on shared nodes.
    std::vector<DirichletCondition> dirichlet;
    std::vector<TractionCondition> tractions;
    VectorField body_force;
    std::optional<ExactSolution> exact;
    std::optional<PressurePin> pressure_pin;
};

/// v = (10, 0[, 0]), p = 10, b = 0; velocity fixed on "all", pressure pinned to
/// 10 at the node nearest the origin.
[[nodiscard]] TestCase patch_constant(int dim);

/// Unit square/cube driven by v = (1, 0[, 0]) on "top". The walls are applied
/// after the lid so lid corners take the wall value. In 3-D the front/back
/// faces only fix v_z, which keeps a one-element-thick box planar. Pressure
/// pinned to 0 at the origin corner.
[[nodiscard]] TestCase lid_cavity(int dim);

/// Polynomial body force on the unit square with a known smooth solution,
/// homogeneous velocity on "all", pressure pinned to 0 at (0, 0). The data
/// satisfy -lap v + grad p = b, i.e. 2 nu = 1.
[[nodiscard]] TestCase body_force_cavity();

/// Registry lookup: patch (dimension from `dim`), patch2d, patch3d, cavity,
/// body-force. Throws ConfigError listing the valid names.
[[nodiscard]] TestCase make_case(const std::string& name, int dim);
[[nodiscard]] std::vector<std::string> case_names();

/// Installs tractions into the right-hand side, then Dirichlet constraints and
/// the pressure pin. Records the pin in `dofs`.
void apply_case(const TestCase& test, const Mesh& mesh, DofMap& dofs, LinearSystem& system);

}  // namespace stokeslab
