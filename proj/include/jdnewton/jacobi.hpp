#pragma once

// Jacobi-like joint diagonalization by cyclic Givens sweeps with closed-form
// angles. Serves as the warm start for the Newton iteration.

#include "jdnewton/jdcore.hpp"

#include <vector>

namespace jdn {

struct JacobiConfig {
  /// A sweep in which every |sin theta| is below this ends the iteration.
  double sweep_tol = 1e-8;
  int max_sweeps = 100;

  void validate() const;
};

struct JacobiResult {
  StiefelPoint Y;
  /// sum_l ||off(Y^T A_l Y)||_F^2 before the first sweep and after each sweep.
  std::vector<double> off_norms;
  int sweeps = 0;
  bool converged = false;
};

/// sum_l ||off(Y^T A_l Y)||_F^2
double off_norm_sq(const SymmetricSet& A, const Matrix& Y);

/// Angle of the (i, j) Givens rotation R = [[c, -s], [s, c]] that maximizes
/// sum_l ((R^T A_l R)_ii^2 + (R^T A_l R)_jj^2). Result lies in (-pi/4, pi/4].
double pair_rotation(const std::vector<Matrix>& A, Index i, Index j);

JacobiResult jacobi_diagonalize(const SymmetricSet& A, const JacobiConfig& cfg = {});

/// Keeps the p columns of an orthogonal Y_J with the largest
/// sum_l (Y_J^T A_l Y_J)_ii^2, ordered by decreasing score.
StiefelPoint truncate_columns(const SymmetricSet& A, const StiefelPoint& YJ, Index p);

}  // namespace jdn
