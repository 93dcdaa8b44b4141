#include <cmath>

#include "stokeslab/cases.hpp"

namespace stokeslab {

namespace {

VectorField constant_field(Vector value) {
    return [value = std::move(value)](const Vector&) { return value; };
}

std::vector<bool> all_components(int dim) { return std::vector<bool>(static_cast<std::size_t>(dim), true); }

}  // namespace

TestCase patch_constant(int dim) {
    if (dim != 2 && dim != 3) throw ConfigError("patch_constant: dim must be 2 or 3");
    const auto d = static_cast<std::size_t>(dim);
    Vector v(d, 0.0);
    v[0] = 10.0;

    TestCase c;
    c.name = "patch";
    c.dim = dim;
    c.dirichlet.push_back({"all", constant_field(v), all_components(dim)});
    c.body_force = constant_field(Vector(d, 0.0));
    c.exact = ExactSolution{constant_field(v), [](const Vector&) { return 10.0; },
                            constant_field(Vector(d, 0.0))};
    c.pressure_pin = PressurePin{Vector(d, 0.0), 10.0};
    return c;
}

TestCase lid_cavity(int dim) {
    if (dim != 2 && dim != 3) throw ConfigError("lid_cavity: dim must be 2 or 3");
    const auto d = static_cast<std::size_t>(dim);
    Vector lid(d, 0.0);
    lid[0] = 1.0;
    const VectorField zero = constant_field(Vector(d, 0.0));

    TestCase c;
    c.name = "cavity";
    c.dim = dim;
    c.dirichlet.push_back({"top", constant_field(lid), all_components(dim)});
    if (dim == 3) {
        c.dirichlet.push_back({"front", zero, {false, false, true}});
        c.dirichlet.push_back({"back", zero, {false, false, true}});
    }
    for (const char* wall : {"left", "right", "bottom"})
        c.dirichlet.push_back({wall, zero, all_components(dim)});
    c.body_force = zero;
    c.pressure_pin = PressurePin{Vector(d, 0.0), 0.0, 1e-9};
    return c;
}

TestCase body_force_cavity() {
    TestCase c;
    c.name = "body-force";
    c.dim = 2;
    c.nu = 0.5;
    c.dirichlet.push_back({"all", constant_field({0.0, 0.0}), all_components(2)});
    c.body_force = [](const Vector& p) {
        const double x = p[0], y = p[1];
        const double y2 = y * y, y3 = y2 * y, y4 = y3 * y;
        const double x2 = x * x, x3 = x2 * x, x4 = x3 * x;
        const double b1 = (12 - 24 * y) * x4 + (-24 + 48 * y) * x3 +
                          (-48 * y + 72 * y2 - 48 * y3 + 12) * x2 +
                          (-2 + 24 * y - 72 * y2 + 48 * y3) * x + 1 - 4 * y + 12 * y2 - 8 * y3;
        const double b2 = (8 - 48 * y + 48 * y2) * x3 + (-12 + 72 * y - 72 * y2) * x2 +
                          (4 - 24 * y + 48 * y2 - 48 * y3 + 24 * y4) * x - 12 * y2 + 24 * y3 -
                          12 * y4;
        return Vector{b1, b2};
    };
    ExactSolution exact;
    exact.velocity = [](const Vector& p) {
        const double x = p[0], y = p[1];
        const double vx = x * x * (1 - x) * (1 - x) * (2 * y - 6 * y * y + 4 * y * y * y);
        const double vy = -y * y * (1 - y) * (1 - y) * (2 * x - 6 * x * x + 4 * x * x * x);
        return Vector{vx, vy};
    };
    exact.pressure = [](const Vector& p) { return p[0] * (1 - p[0]); };
    exact.pressure_gradient = [](const Vector& p) { return Vector{1 - 2 * p[0], 0.0}; };
    c.exact = std::move(exact);
    c.pressure_pin = PressurePin{{0.0, 0.0}, 0.0, 1e-9};
    return c;
}

std::vector<std::string> case_names() { return {"patch", "patch2d", "patch3d", "cavity", "body-force"}; }

TestCase make_case(const std::string& name, int dim) {
    if (name == "patch") return patch_constant(dim);
    if (name == "patch2d") return patch_constant(2);
    if (name == "patch3d") return patch_constant(3);
    if (name == "cavity") return lid_cavity(dim);
    if (name == "body-force") return body_force_cavity();
    std::string valid;
    for (const auto& n : case_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw ConfigError("unknown case '" + name + "' (valid: " + valid + ")");
}

void apply_case(const TestCase& test, const Mesh& mesh, DofMap& dofs, LinearSystem& system) {
    if (test.dim != mesh.dim())
        throw ConfigError("case " + test.name + " is " + std::to_string(test.dim) +
                          "-D but the mesh is " + std::to_string(mesh.dim()) + "-D");
    if (system.size() < dofs.size()) throw ConfigError("apply_case: system is smaller than the dof map");

    for (const auto& t : test.tractions) add_traction(mesh, dofs, t.tag, t.traction, system.rhs());

    for (const auto& bc : test.dirichlet) {
        for (std::size_t n : mesh.nodes_in(bc.tag)) {
            const Vector v = bc.value(mesh.node(n));
            for (std::size_t i = 0; i < dofs.dim(); ++i)
                if (bc.components.at(i)) system.constrain(dofs.velocity(n, i), v.at(i));
        }
    }

    if (test.pressure_pin) {
        const PressurePin& pin = *test.pressure_pin;
        const std::size_t n = nearest_node(mesh, pin.location);
        double dist2 = 0.0;
        for (std::size_t k = 0; k < pin.location.size(); ++k)
            dist2 += std::pow(mesh.node(n)[k] - pin.location[k], 2);
        if (std::sqrt(dist2) > pin.tolerance)
            throw ConfigError("case " + test.name + ": no mesh node at the pressure pin location");
        system.constrain(dofs.pressure(n), pin.value);
        dofs.pressure_pin = std::make_pair(n, pin.value);
    }
}

}  // namespace stokeslab
