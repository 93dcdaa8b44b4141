#include "stokeslab/solve.hpp"

namespace stokeslab {

Solution unpack(const DofMap& dofs, Vector x) {
    Solution s;
    s.velocity.resize(dofs.num_nodes(), Vector(dofs.dim(), 0.0));
    s.pressure.resize(dofs.num_nodes(), 0.0);
    for (std::size_t n = 0; n < dofs.num_nodes(); ++n) {
        for (std::size_t i = 0; i < dofs.dim(); ++i) s.velocity[n][i] = x[dofs.velocity(n, i)];
        s.pressure[n] = x[dofs.pressure(n)];
    }
    s.dofs = std::move(x);
    return s;
}

Solution solve_case(const Mesh& mesh, const TestCase& test, FormulationConfig config,
                    const SolveOptions& options) {
    config.body_force = test.body_force;
    DofMap dofs(mesh);
    LinearSystem system;
    CondensationCache cache;
    if (config.scheme == Scheme::enriched) {
        EnrichedSystem es = assemble_enriched(mesh, config, dofs);
        system = std::move(es.system);
        cache = std::move(es.cache);
    } else {
        system = assemble(mesh, config, dofs);
    }
    apply_case(test, mesh, dofs, system);
    system.apply_constraints();

    SolveStats stats;
    Vector x = solve_direct(system, options, &stats);
    Solution s = unpack(dofs, std::move(x));
    s.stats = stats;
    s.constrained = system.constraints().size();
    if (config.scheme == Scheme::enriched) s.beta = recover_fine(mesh, dofs, cache, s.dofs);
    return s;
}

}  // namespace stokeslab
