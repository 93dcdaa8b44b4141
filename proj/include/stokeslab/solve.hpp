#pragma once

#include <vector>

#include "stokeslab/cases.hpp"
#include "stokeslab/formulations.hpp"
#include "stokeslab/linalg.hpp"
#include "stokeslab/mesh.hpp"

namespace stokeslab {

struct Solution {
    Vector dofs;                    ///< interleaved nodal unknowns
    std::vector<Vector> velocity;   ///< per node
    Vector pressure;                ///< per node
    std::vector<Vector> beta;       ///< per element bubble coefficients (enriched only)
    SolveStats stats;
    std::size_t constrained = 0;
};

/// Splits an interleaved dof vector into nodal velocity and pressure.
[[nodiscard]] Solution unpack(const DofMap& dofs, Vector x);

/// Assembles `config` (with the case's body force), applies the case and solves.
[[nodiscard]] Solution solve_case(const Mesh& mesh, const TestCase& test, FormulationConfig config,
                                  const SolveOptions& options = {});

}  // namespace stokeslab
