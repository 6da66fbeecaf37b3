#pragma once

// JADE-style independent component analysis: whitening, fourth-order
// cumulant matrices, and separation by joint diagonalization (Jacobi sweeps
// followed by Newton on O(n)).

#include "jdnewton/jacobi.hpp"
#include "jdnewton/newton.hpp"
#include "jdnewton/random.hpp"

#include <string>
#include <utility>
#include <vector>

namespace jdn {

struct WhiteningTransform {
  Vector mean;
  /// Lambda^{-1/2} U^T from the eigendecomposition U Lambda U^T of the
  /// sample covariance.
  Matrix W;
  Matrix W_inv;
};

struct Whitened {
  WhiteningTransform transform;
  /// W (X - mean), zero-mean with identity sample covariance.
  Matrix Z0;
};

/// X is channels x samples. Throws SingularCovariance when the smallest
/// covariance eigenvalue is <= 1e-12 times the largest.
Whitened center_whiten(const Matrix& X);

/// Sample fourth-order cumulant of rows i, j, k, l (0-based) of Z.
double cumulant(const Matrix& Z, Index i, Index j, Index k, Index l);

/// M_kl for 0-based k <= l: E_kk, or (E_kl + E_lk) / sqrt(2).
Matrix basis_matrix(Index k, Index l, Index n);

/// E[(z^T M z) z z^T] - tr(M) I - M - M^T; valid for whitened Z.
Matrix cumulant_matrix(const Matrix& Z, const Matrix& M);

/// sum_{k,l} C_ijkl m_kl with every cumulant evaluated from sample moments.
Matrix cumulant_matrix_literal(const Matrix& Z, const Matrix& M);

struct CumulantSet {
  SymmetricSet A;
  /// 0-based (k, l) of each matrix, ordered (0,0), (0,1), (1,1), (0,2), ...
  std::vector<std::pair<Index, Index>> index;
};

/// The n(n+1)/2 matrices Q(M_kl), k <= l, of whitened data.
CumulantSet build_jd_problem(const Matrix& Z0);

struct SeparationConfig {
  JacobiConfig jacobi;
  NewtonConfig newton = default_newton();

  static NewtonConfig default_newton() {
    NewtonConfig c;
    c.max_iters = 20;
    return c;
  }
};

struct SeparationResult {
  /// Y^T W; recovered signals are Z = B_sep (X - mean).
  Matrix B_sep;
  Matrix Z;
  WhiteningTransform whitening;
  Matrix Y_jacobi;
  Matrix Y_newton;
  SolveTrace newton_trace;
  int jacobi_sweeps = 0;
  double grad_jacobi = 0.0;
  double grad_newton = 0.0;
  double f_jacobi = 0.0;
  double f_newton = 0.0;
  /// Set when Newton failed or did not improve on Jacobi and the Jacobi
  /// rotation was kept.
  bool fell_back_to_jacobi = false;
  std::vector<std::string> warnings;
};

SeparationResult separate(const Matrix& X, const SeparationConfig& cfg = {});

struct Alignment {
  /// permutation[i] is the recovered channel matched to source i.
  std::vector<Index> permutation;
  /// Least-squares scale mapping the matched channel onto source i.
  Vector scales;
  /// Pearson correlation between source i and its matched channel.
  Vector correlations;
};

/// Greedy matching by largest |correlation|. Diagnostic only.
Alignment align(const Matrix& Z, const Matrix& S_true);

/// Pearson correlation of two equally long rows.
double correlation(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                   const Eigen::Ref<const Eigen::RowVectorXd>& b);

/// Excess kurtosis E[z^4] / E[z^2]^2 - 3 of a centered copy of each row.
Vector excess_kurtosis(const Matrix& Z);

/// Unit-variance, zero-mean sources (channels x T). Channel i cycles through
/// uniform, Laplace, symmetric binary and centered exponential laws; with
/// gaussian set every channel is standard normal instead.
Matrix synthetic_sources(Index channels, Index T, Rng& rng, bool gaussian = false);

/// The 3 x 3 row-stochastic mixing matrix used for the image experiment.
Matrix image_mixing_matrix();

}  // namespace jdn
