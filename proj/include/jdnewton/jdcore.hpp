#pragma once

// Joint-diagonalization objective f(Y) = -sum_l ||diag(Y^T A_l Y)||_F^2 with its
// gradients, Hessian action, and the Hessian's representation matrix in
// (veck(B); vec(C)) coordinates.

#include "jdnewton/stiefel.hpp"

#include <vector>

namespace jdn {

/// The matrices A_1..A_N. Each input must satisfy
/// ||A - A^T||_F <= 1e-10 ||A||_F (else AsymmetricInput) and is symmetrized.
class SymmetricSet {
 public:
  explicit SymmetricSet(std::vector<Matrix> matrices);

  Index n() const { return n_; }
  std::size_t size() const { return A_.size(); }
  const Matrix& operator[](std::size_t l) const { return A_[l]; }
  const std::vector<Matrix>& matrices() const { return A_; }
  /// sum_l ||A_l||_F
  double frobenius_sum() const;
  /// sum_l ||A_l||_F^2
  double frobenius_sq_sum() const;

 private:
  std::vector<Matrix> A_;
  Index n_ = 0;
};

/// Z_l = Y^T A_l Y, Zperp_l = Y^T A_l Y_perp, Zperpperp_l = Y_perp^T A_l Y_perp
/// evaluated at one frame. Z_l and Zperpperp_l are symmetrized after the products.
struct CompressedData {
  Index n = 0;
  Index p = 0;
  std::vector<Matrix> Z;
  std::vector<Matrix> Zperp;
  std::vector<Matrix> Zperpperp;
};

CompressedData compress(const SymmetricSet& A, const Frame& frame);

struct HessianRep {
  Matrix H11;
  Matrix H12;
  Matrix H21;
  Matrix H22;
  Metric metric = Metric::Induced;

  Index dim() const { return H11.rows() + H22.rows(); }
  Matrix full() const;
  Vector apply(const Vector& x) const;
};

double objective(const SymmetricSet& A, const Matrix& Y);
inline double objective(const SymmetricSet& A, const StiefelPoint& Y) {
  return objective(A, Y.matrix());
}

/// -4 sum_l A_l Y diag(Y^T A_l Y); defined for any n x p matrix Y.
Matrix euclidean_gradient(const SymmetricSet& A, const Matrix& Y);

TangentAmbient riemannian_gradient(const SymmetricSet& A, const StiefelPoint& Y,
                                   Metric metric = Metric::Induced);

/// (Y^T grad f, Y_perp^T grad f) for the chosen metric, from compressed data.
TangentCoords gradient_coords(const CompressedData& data, Metric metric = Metric::Induced);

TangentAmbient hessian_apply(const SymmetricSet& A, const StiefelPoint& Y,
                             const TangentAmbient& xi, Metric metric = Metric::Induced);

/// (B_H, C_H) with Hess f(Y)[Y B + Y_perp C] = Y B_H + Y_perp C_H.
TangentCoords hessian_coords(const CompressedData& data, const TangentCoords& coords,
                             Metric metric = Metric::Induced);

/// Production assembly: blocks are evaluated entrywise from per-column
/// Kronecker structure; H21 comes from the block symmetry relation.
HessianRep hessian_matrix(const CompressedData& data, Metric metric = Metric::Induced);

/// Literal dense assembly with materialized T_p, Delta_p, D_p, the unsimplified
/// D_p^T (I - T_p) factor and the explicit H21 formula. For cross-checks only.
HessianRep hessian_matrix_reference(const CompressedData& data, Metric metric = Metric::Induced);

/// Single-block representation on O(n):
/// -2 D_n^T sum_l (diag(Z_l) (x) Z_l + 2 (I (x) Z_l) Delta_n (I (x) Z_l)
///                 - sym(Z_l diag(Z_l)) (x) I_n) D_n.
Matrix orthogonal_hessian_matrix(const std::vector<Matrix>& Z);

}  // namespace jdn
