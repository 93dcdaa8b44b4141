// stokeslab command-line front end: run | convergence | eigen | mesh-info.
// Exit codes: 0 success, 1 numerical failure, 2 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "stokeslab/analysis.hpp"
#include "stokeslab/cases.hpp"
#include "stokeslab/io.hpp"
#include "stokeslab/solve.hpp"

using namespace stokeslab;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string case_name;
    std::string formulation;
    std::string element;
    std::string mesh;
    std::optional<double> nu;
    double bp_epsilon = 0.0;
    std::string levels = "8,16,32";
    int n = 10;
    std::string out;
    std::string csv;
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

// grid:KIND:NxM[xL] or a mesh file path.
Mesh resolve_mesh(const std::string& spec) {
    if (spec.rfind("grid:", 0) != 0) return load_mesh(spec);
    const auto colon = spec.find(':', 5);
    if (colon == std::string::npos) throw UsageError("bad mesh spec '" + spec + "' (expected grid:KIND:NxM[xL])");
    const ElementKind kind = parse_element_kind(spec.substr(5, colon - 5));
    std::vector<int> div;
    std::stringstream ss(spec.substr(colon + 1));
    std::string part;
    while (std::getline(ss, part, 'x')) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(part, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != part.size() || v < 1) throw UsageError("bad mesh spec '" + spec + "': divisions must be positive integers");
        div.push_back(v);
    }
    if (div.size() != static_cast<std::size_t>(dimension(kind)))
        throw UsageError("bad mesh spec '" + spec + "': " + to_string(kind) + " mesh needs " +
                         std::to_string(dimension(kind)) + " divisions");
    return generate_grid(kind, div);
}

std::vector<int> parse_levels(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(part, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != part.size() || v < 1) throw UsageError("bad --levels entry '" + part + "'");
        out.push_back(v);
    }
    if (out.size() < 3) throw UsageError("need >= 3 levels");
    return out;
}

FormulationConfig make_config(const Options& o, Scheme scheme, const TestCase* test) {
    FormulationConfig c;
    c.scheme = scheme;
    c.nu = o.nu ? *o.nu : (test ? test->nu : 1.0);
    c.bp_epsilon = o.bp_epsilon;
    c.validate();
    return c;
}

void emit(const std::string& text, const std::string& path) {
    std::cout << text;
    if (path.empty()) return;
    std::ofstream f(path);
    if (!f) throw UsageError("cannot write " + path);
    f << text;
}

struct Plan {
    std::function<void()> compute;
};

Plan plan_run(const Options& o) {
    auto mesh = std::make_shared<Mesh>(resolve_mesh(o.mesh));
    if (!o.element.empty() && parse_element_kind(o.element) != mesh->kind())
        throw UsageError("--element " + o.element + " does not match the " + to_string(mesh->kind()) + " mesh");
    auto test = std::make_shared<TestCase>(make_case(o.case_name, mesh->dim()));
    if (test->dim != mesh->dim())
        throw UsageError("case " + test->name + " is " + std::to_string(test->dim) + "-D but the mesh is " +
                         std::to_string(mesh->dim()) + "-D");
    const FormulationConfig config = make_config(o, parse_scheme(o.formulation), test.get());

    return {[=] {
        const SolveOptions opts{.singular = SingularPolicy::free_variables};
        const Solution s = solve_case(*mesh, *test, config, opts);
        std::ostringstream csv;
        csv << "key,value\n"
            << "case," << test->name << "\n"
            << "formulation," << to_string(config.scheme) << "\n"
            << "element," << to_string(mesh->kind()) << "\n"
            << "nu," << format_double(config.nu) << "\n"
            << "nodes," << mesh->num_nodes() << "\n"
            << "elements," << mesh->num_elements() << "\n"
            << "dofs," << s.dofs.size() << "\n"
            << "constrained_dofs," << s.constrained << "\n"
            << "relative_residual," << format_double(s.stats.relative_residual) << "\n"
            << "singular_directions," << s.stats.deficient_pivots << "\n";
        if (test->exact) {
            csv << "checkerboard_amplitude," << format_double(checkerboard_amplitude(*mesh, s, *test)) << "\n";
            const ErrorReport e = error_norms(*mesh, s, *test);
            csv << "velocity_l2," << format_double(e.velocity_l2) << "\n"
                << "pressure_h1semi," << format_double(e.pressure_h1semi) << "\n";
        }
        if (test->name == "cavity") csv << "vortex_y," << format_double(locate_vortex(*mesh, s.velocity)) << "\n";
        if (!o.out.empty()) {
            std::ofstream f(o.out);
            if (!f) throw UsageError("cannot write " + o.out);
            write_vtk(f, *mesh, s.velocity, s.pressure, test->name + " " + to_string(config.scheme));
        }
        emit(csv.str(), o.csv);
    }};
}

Plan plan_convergence(const Options& o) {
    const ElementKind kind = parse_element_kind(o.element.empty() ? "q4" : o.element);
    auto test = std::make_shared<TestCase>(make_case(o.case_name, dimension(kind)));
    if (!test->exact) throw UsageError("case " + test->name + " has no exact solution");
    if (test->dim != dimension(kind)) throw UsageError("case " + test->name + " does not match element " + to_string(kind));
    const std::vector<int> levels = parse_levels(o.levels);
    const FormulationConfig config = make_config(o, parse_scheme(o.formulation), test.get());

    return {[=] {
        const ConvergenceResult r = convergence_study(*test, config, kind, levels);
        std::ostringstream csv;
        csv << "h,velocity_l2,pressure_h1semi\n";
        for (const auto& row : r.rows)
            csv << format_double(row.errors.h) << ',' << format_double(row.errors.velocity_l2) << ','
                << format_double(row.errors.pressure_h1semi) << '\n';
        csv << "slope," << format_double(r.velocity_slope) << ',' << format_double(r.pressure_slope) << '\n';
        emit(csv.str(), o.csv);
    }};
}

Plan plan_eigen(const Options& o) {
    std::string spec = lower(o.element.empty() ? "q4" : o.element);
    std::string scheme_name = o.formulation.empty() ? "galerkin" : o.formulation;
    if (const auto dash = spec.find('-'); dash != std::string::npos) {
        scheme_name = spec.substr(dash + 1);
        spec = spec.substr(0, dash);
    }
    const ElementKind kind = parse_element_kind(spec);
    if (o.n < 1) throw UsageError("--n must be positive");
    const FormulationConfig config = make_config(o, parse_scheme(scheme_name), nullptr);
    const int n = o.n;

    return {[=] {
        const Mesh m = generate_grid(kind, std::vector<int>(static_cast<std::size_t>(dimension(kind)), n));
        const SpectrumReport r = lbb_spectrum(m, config);
        std::ostringstream csv;
        csv << "# element=" << to_string(kind) << " formulation=" << to_string(config.scheme) << " n=" << n
            << " zero_count=" << r.zero_count << " checkerboard=" << (r.checkerboard_present ? "true" : "false")
            << " checkerboard_correlation=" << format_double(r.checkerboard_correlation) << "\n";
        csv << "index,lambda\n";
        for (std::size_t i = 0; i < r.eigenvalues.size(); ++i)
            csv << i << ',' << format_double(r.eigenvalues[i]) << '\n';
        if (o.csv.empty()) {
            std::cout << csv.str();
        } else {
            std::ofstream f(o.csv);
            if (!f) throw UsageError("cannot write " + o.csv);
            f << csv.str();
            std::cout << csv.str().substr(0, csv.str().find('\n') + 1);
        }
    }};
}

Plan plan_mesh_info(const Options& o) {
    auto mesh = std::make_shared<Mesh>(resolve_mesh(o.mesh));
    return {[=] {
        const Mesh& m = *mesh;
        double vmin = 1e300, vmax = 0.0, total = 0.0;
        for (std::size_t e = 0; e < m.num_elements(); ++e) {
            const double v = element_measure(m, e);
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
            total += v;
        }
        std::ostringstream csv;
        csv << "key,value\n"
            << "element," << to_string(m.kind()) << "\n"
            << "nodes," << m.num_nodes() << "\n"
            << "elements," << m.num_elements() << "\n"
            << "boundary_facets," << m.boundary_facets().size() << "\n"
            << "h," << format_double(mesh_size(m)) << "\n"
            << "min_measure," << format_double(vmin) << "\n"
            << "max_measure," << format_double(vmax) << "\n"
            << "total_measure," << format_double(total) << "\n";
        if (m.kind() == ElementKind::T3) csv << "max_angle_deg," << format_double(max_triangle_angle(m)) << "\n";
        std::string tags;
        for (const auto& [name, ids] : m.node_sets()) tags += (tags.empty() ? "" : " ") + name + ":" + std::to_string(ids.size());
        csv << "tags," << tags << "\n";
        emit(csv.str(), o.csv);
    }};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed finite element Stokes solver with multiscale stabilization"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_option("--formulation", o.formulation, "galerkin | wvm | svm | enriched");
        c->add_option("--element", o.element, "T3 | TET4 | Q4 | B8 (eigen: e.g. q4-enriched)");
        c->add_option("--nu", o.nu, "viscosity (default: the case's value, 1.0 unless stated)");
        c->add_option("--bp-epsilon", o.bp_epsilon, "Brezzi-Pitkaranta coefficient");
        c->add_option("--csv", o.csv, "CSV output path");
    };

    CLI::App* run = app.add_subcommand("run", "solve one case and write VTK + summary CSV");
    common(run);
    run->add_option("--case", o.case_name, "case name")->required();
    run->add_option("--mesh", o.mesh, "grid:KIND:NxM[xL] or mesh file")->required();
    run->add_option("--out", o.out, "VTK output path");
    run->get_option("--formulation")->required();

    CLI::App* conv = app.add_subcommand("convergence", "error norms and slopes over refinement levels");
    common(conv);
    conv->add_option("--case", o.case_name, "case with an exact solution")->required();
    conv->add_option("--levels", o.levels, "comma-separated divisions, at least 3");
    conv->get_option("--formulation")->required();

    CLI::App* eig = app.add_subcommand("eigen", "pressure Schur complement spectrum on an n x n grid");
    common(eig);
    eig->add_option("--n", o.n, "divisions per axis");

    CLI::App* info = app.add_subcommand("mesh-info", "mesh statistics");
    info->add_option("--mesh", o.mesh, "grid:KIND:NxM[xL] or mesh file")->required();
    info->add_option("--csv", o.csv, "CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    Plan plan;
    try {
        if (run->parsed()) plan = plan_run(o);
        else if (conv->parsed()) plan = plan_convergence(o);
        else if (eig->parsed()) plan = plan_eigen(o);
        else plan = plan_mesh_info(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        plan.compute();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
