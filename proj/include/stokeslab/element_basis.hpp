#pragma once

// Shape functions, bubble functions and the isoparametric Jacobian calculus
// needed for second derivatives on mapped elements.

#include <span>

#include "stokeslab/element_kind.hpp"
#include "stokeslab/linalg.hpp"

namespace stokeslab {

/// Shape functions and their parametric derivatives at one reference point.
struct BasisEval {
    Vector N;     ///< one value per node
    Matrix DN;    ///< nodes x dim, dN_n / dxi_m
    Matrix D2N;   ///< nodes x dim^2, column m*dim + s holds d2N_n / dxi_m dxi_s
    Vector xi;
};

/// Element bubble and its parametric derivatives.
struct BubbleEval {
    double b = 0.0;
    Vector grad_xi;  ///< db / dxi
    Matrix hess_xi;  ///< d2b / dxi dxi
};

/// Geometry of the isoparametric map x(xi) at one reference point.
struct JacobianCalc {
    Matrix J;        ///< dx_i / dxi_m
    Matrix Jinv;     ///< dxi_m / dx_k
    double detJ = 0.0;
    Vector divJinv;  ///< d(Jinv)_pk / dx_k, zero for affine maps
};

[[nodiscard]] BasisEval eval_basis(ElementKind kind, std::span<const double> xi);

/// Bubbles: T3 xi1 xi2 (1-xi1-xi2); TET4 xi1 xi2 xi3 (1-xi1-xi2-xi3);
/// Q4 (1-xi1^2)(1-xi2^2); B8 (1-xi1^2)(1-xi2^2)(1-xi3^2).
[[nodiscard]] BubbleEval eval_bubble(ElementKind kind, std::span<const double> xi);

/// J = xhat^T DN and
///   div Jinv = -Jinv xhat^T D2N : (Jinv Jinv^T),
/// i.e. d(Jinv)_pk/dx_k = -Jinv_pi xhat_ni D2N_nms Jinv_mk Jinv_sk.
/// Throws MeshError if |detJ| < 1e-14 (element scale)^dim or detJ < 0.
[[nodiscard]] JacobianCalc jacobian_calc(const BasisEval& basis, const Matrix& node_coords);
[[nodiscard]] JacobianCalc jacobian_calc(ElementKind kind, const Matrix& node_coords,
                                         std::span<const double> xi);

/// Physical gradient J^-T grad_xi.
[[nodiscard]] Vector physical_gradient(std::span<const double> grad_xi, const JacobianCalc& jac);

/// Physical Laplacian of a scalar given its parametric gradient and Hessian:
///   lap f = H : (Jinv Jinv^T) + grad_xi f . div Jinv
/// The second term carries the -grad_xi^T Jinv xhat^T D2N : Jinv Jinv^T correction.
[[nodiscard]] double laplacian_physical(std::span<const double> grad_xi, const Matrix& hess_xi,
                                        const JacobianCalc& jac);

/// Parametric Hessian of shape function `node` as a dim x dim matrix.
[[nodiscard]] Matrix shape_hessian(const BasisEval& basis, std::size_t node);

/// x(xi) = sum_n N_n xhat_n.
[[nodiscard]] Vector map_point(const BasisEval& basis, const Matrix& node_coords);

}  // namespace stokeslab
