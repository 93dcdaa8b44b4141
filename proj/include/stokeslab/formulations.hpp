#pragma once

// Element and global assembly for the Galerkin, weak/strong variational
// multiscale, and bubble-enriched formulations of Stokes flow.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stokeslab/linalg.hpp"
#include "stokeslab/mesh.hpp"

namespace stokeslab {

using VectorField = std::function<Vector(const Vector&)>;
using ScalarField = std::function<double(const Vector&)>;

enum class Scheme { galerkin, wvm, svm, enriched };

[[nodiscard]] std::string to_string(Scheme scheme);
/// Accepts galerkin | wvm | svm | enriched; throws ConfigError listing them.
[[nodiscard]] Scheme parse_scheme(std::string_view name);

struct FormulationConfig {
    Scheme scheme = Scheme::galerkin;
    double nu = 1.0;
    /// Brezzi-Pitkaranta coefficient; the element term uses bp_epsilon * h_e^2
    /// with h_e = (element measure)^(1/dim). Zero disables it.
    double bp_epsilon = 0.0;
    /// Body force; empty means zero.
    VectorField body_force;

    void validate() const;
};

/// Equal-order nodal dofs interleaved per node: [v_0 .. v_{d-1}, p].
class DofMap {
public:
    explicit DofMap(const Mesh& mesh)
        : dim_(static_cast<std::size_t>(mesh.dim())), nodes_(mesh.num_nodes()) {}

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t num_nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_ * (dim_ + 1); }
    [[nodiscard]] std::size_t velocity(std::size_t node, std::size_t comp) const {
        return node * (dim_ + 1) + comp;
    }
    [[nodiscard]] std::size_t pressure(std::size_t node) const { return node * (dim_ + 1) + dim_; }

    std::optional<std::pair<std::size_t, double>> pressure_pin;

private:
    std::size_t dim_;
    std::size_t nodes_;
};

struct TauEval {
    double value = 0.0;
    Scheme scheme = Scheme::wvm;
};

/// (integral of b) / (integral of |grad_x b|^2) over the mapped element.
[[nodiscard]] double wvm_bubble_ratio(ElementKind kind, const Matrix& node_coords);

/// WVM: b(xi) * wvm_bubble_ratio, positive. SVM: b(xi) / lap_x b(xi), negative.
/// The 1/(2 nu) factor of the fine-scale model is applied by the caller.
[[nodiscard]] TauEval tau_at(Scheme scheme, ElementKind kind, const Matrix& node_coords,
                             std::span<const double> xi);

/// Dense element matrix and load in the local interleaved ordering
/// a * (dim + 1) + i (velocity), a * (dim + 1) + dim (pressure).
struct ElementSystem {
    Matrix K;
    Vector f;
};

/// Galerkin, WVM or SVM element system. The stabilized schemes model the fine
/// scales as v' = tau_eff r / (2 nu), r = 2 nu lap v - grad p + b, with
/// tau_eff = tau_WVM or -tau_SVM (both positive), and add c(w; v') to the
/// momentum rows and d(v'; q) to the continuity rows. The result is symmetric.
[[nodiscard]] ElementSystem element_system(ElementKind kind, const Matrix& node_coords,
                                           const FormulationConfig& config);

/// Per-element blocks of the enriched formulation (c coarse velocity,
/// p pressure, f bubble coefficients).
struct ElementBlocks {
    Matrix K_cc, K_cp, K_cf, K_pc, K_pf, K_fc, K_fp, K_ff;
    Vector f_c, f_p, f_f;
};

[[nodiscard]] ElementBlocks enriched_blocks(ElementKind kind, const Matrix& node_coords,
                                            const FormulationConfig& config);

/// What recover_fine needs from each element.
struct CondensationCache {
    std::vector<Matrix> K_ff_inv;
    std::vector<Matrix> K_fc;
    std::vector<Matrix> K_fp;
    std::vector<Vector> f_f;
};

struct EnrichedSystem {
    LinearSystem system;
    CondensationCache cache;
};

/// Global system for any scheme; enriched delegates to assemble_enriched.
[[nodiscard]] LinearSystem assemble(const Mesh& mesh, const FormulationConfig& config,
                                    const DofMap& dofs);

/// Statically condensed enriched system plus the per-element recovery data.
[[nodiscard]] EnrichedSystem assemble_enriched(const Mesh& mesh, const FormulationConfig& config,
                                               const DofMap& dofs);

/// Uncondensed three-field enriched system. Bubble coefficient t of element e
/// is dof dofs.size() + e * dim + t.
[[nodiscard]] LinearSystem assemble_enriched_full(const Mesh& mesh, const FormulationConfig& config,
                                                  const DofMap& dofs);

/// beta_e = K_ff^-1 (f_f - K_fc v_e - K_fp p_e) for every element.
[[nodiscard]] std::vector<Vector> recover_fine(const Mesh& mesh, const DofMap& dofs,
                                               const CondensationCache& cache,
                                               std::span<const double> solution);

/// Adds the boundary load integral of N_a t_i over the facets of `tag`.
void add_traction(const Mesh& mesh, const DofMap& dofs, const std::string& tag,
                  const VectorField& traction, Vector& rhs);

/// Worker count for element loops: STOKESLAB_THREADS if set and positive,
/// otherwise the hardware concurrency.
[[nodiscard]] std::size_t assembly_threads();

}  // namespace stokeslab
