#pragma once

// Riemannian Newton iteration for the joint-diagonalization objective on
// St(p, n), plus the specialization to the orthogonal group (p = n).

#include "jdnewton/jdcore.hpp"

#include <optional>
#include <string>
#include <vector>

namespace jdn {

struct NewtonConfig {
  int max_iters = 50;
  /// Stop once the induced-metric gradient norm is at or below this value.
  /// Unset means 1e-12 * max(1, sum_l ||A_l||_F).
  std::optional<double> grad_tol;
  /// LU pivot ratio min|u_ii| / max|u_ii| below which the Hessian is singular.
  double singular_rtol = 1e-12;
  Metric metric = Metric::Induced;
  /// Keep every iterate Y_k in the trace (used for cross-path comparisons).
  bool record_iterates = false;

  void validate() const;
  double resolved_grad_tol(const SymmetricSet& A) const;
};

enum class Termination { Converged, MaxIters, SingularHessian };

const char* to_string(Termination t);

struct IterationRecord {
  int k = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  /// ||xi_{k-1}||_F, the step that produced Y_k (0 for k = 0).
  double step_norm = 0.0;
  double orth_defect = 0.0;
};

struct SolveTrace {
  std::vector<IterationRecord> records;
  Termination termination = Termination::MaxIters;
  std::vector<Matrix> iterates;

  int iterations() const { return static_cast<int>(records.size()) - 1; }
};

struct JDResult {
  StiefelPoint Y;
  SolveTrace trace;
};

struct NewtonStep {
  StiefelPoint next;
  TangentCoords step;
  /// Induced-metric gradient norm at the input point.
  double grad_norm;
};

/// Raised by newton_step when the reduced Hessian is numerically singular.
class SingularHessianError : public Error {
 public:
  SingularHessianError(const std::string& what, double pivot_ratio)
      : Error(ErrorCode::SingularHessian, what), pivot_ratio_(pivot_ratio) {}
  double pivot_ratio() const { return pivot_ratio_; }

 private:
  double pivot_ratio_;
};

/// Solves H x = rhs by LU with partial pivoting; throws SingularHessianError
/// when the pivot ratio falls below rtol.
Vector solve_reduced_system(const Matrix& H, const Vector& rhs, double rtol);

NewtonStep newton_step(const SymmetricSet& A, const StiefelPoint& Y, const NewtonConfig& cfg);

/// Iterates newton_step. A singular Hessian ends the run with
/// Termination::SingularHessian and Y set to the offending iterate.
JDResult solve(const SymmetricSet& A, const StiefelPoint& Y0, const NewtonConfig& cfg);

/// p = n only: no complement, no C block, single-block Hessian.
JDResult solve_orthogonal(const SymmetricSet& A, const StiefelPoint& Y0, const NewtonConfig& cfg);

/// Induced-metric ||grad f(Y)||_F.
double gradient_norm(const SymmetricSet& A, const StiefelPoint& Y);

}  // namespace jdn
