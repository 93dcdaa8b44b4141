#pragma once

// Post-processing: error norms, convergence rates, the pressure Schur
// complement spectrum, checkerboard amplitude and cavity vortex location.

#include <vector>

#include "stokeslab/cases.hpp"
#include "stokeslab/formulations.hpp"
#include "stokeslab/mesh.hpp"
#include "stokeslab/solve.hpp"

namespace stokeslab {

struct ErrorReport {
    double velocity_l2 = 0.0;
    double pressure_h1semi = 0.0;
    double h = 0.0;  ///< max element diameter
};

/// L2 velocity error and H1-seminorm pressure error against the case's exact
/// solution, using the assembly quadrature.
[[nodiscard]] ErrorReport error_norms(const Mesh& mesh, const Solution& solution,
                                      const TestCase& test);

struct ConvergenceRow {
    int divisions = 0;
    ErrorReport errors;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    double velocity_slope = 0.0;
    double pressure_slope = 0.0;
    /// Every error is below 1e-8 (round-off); slopes are not fitted (NaN).
    bool exact = false;
};

/// Least-squares slope of log(y) against log(x).
[[nodiscard]] double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Solves `test` on unit grids of `kind` with the given divisions per axis.
/// Needs at least 3 levels.
[[nodiscard]] ConvergenceResult convergence_study(const TestCase& test,
                                                  const FormulationConfig& config,
                                                  ElementKind kind, const std::vector<int>& levels,
                                                  const SolveOptions& options = {});

struct SpectrumReport {
    Vector eigenvalues;  ///< ascending
    std::size_t zero_count = 0;
    bool checkerboard_present = false;
    /// M-norm fraction of the centred (-1)^(i+j[+k]) pattern captured by the
    /// null space; 0 without grid metadata.
    double checkerboard_correlation = 0.0;
    /// ||1 - P 1||_M / ||1||_M with P the M-orthogonal projector on the null space.
    double hydrostatic_residual = 0.0;
};

/// Generalized eigenproblem S q = lambda M_p q with S = B A^-1 B^T + C the
/// pressure Schur complement after eliminating the velocity dofs on "all",
/// C the assembled pressure stabilization, and M_p the pressure mass matrix.
[[nodiscard]] SpectrumReport lbb_spectrum(const Mesh& mesh, const FormulationConfig& config);

/// Max nodal |p_h - p_exact|.
[[nodiscard]] double checkerboard_amplitude(const Mesh& mesh, const Solution& solution,
                                            const TestCase& test);

/// Height of the v_x zero crossing on the vertical line x = 0.5, averaging
/// nodes that share a height (3-D layers). Linear interpolation between the
/// topmost pair of nodal heights with a strict sign change.
[[nodiscard]] double locate_vortex(const Mesh& mesh, const std::vector<Vector>& velocity);

}  // namespace stokeslab
