#include "jdnewton/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace jdn {

void JacobiConfig::validate() const {
  if (!(sweep_tol > 0)) throw Error(ErrorCode::InvalidArgument, "sweep_tol must be positive");
  if (max_sweeps < 1) throw Error(ErrorCode::InvalidArgument, "max_sweeps must be >= 1");
}

double off_norm_sq(const SymmetricSet& A, const Matrix& Y) {
  double s = 0.0;
  for (const auto& Al : A.matrices()) s += off_part(Y.transpose() * Al * Y).squaredNorm();
  return s;
}

double pair_rotation(const std::vector<Matrix>& A, Index i, Index j) {
  if (A.empty() || !(0 <= i && i < j && j < A.front().rows())) {
    throw Error(ErrorCode::IndexOutOfRange, "pair_rotation: need 0 <= i < j < n");
  }
  // G = sum_l h_l h_l^T with h_l = (a_ii - a_jj, a_ij + a_ji)
  double g11 = 0.0, g12 = 0.0, g22 = 0.0;
  for (const auto& M : A) {
    const double h1 = M(i, i) - M(j, j);
    const double h2 = M(i, j) + M(j, i);
    g11 += h1 * h1;
    g12 += h1 * h2;
    g22 += h2 * h2;
  }
  // The principal eigenvector of G is (cos 2theta, sin 2theta).
  return 0.25 * std::atan2(2.0 * g12, g11 - g22);
}

namespace {

void rotate(Matrix& M, Index i, Index j, double c, double s) {
  const Vector ci = M.col(i);
  const Vector cj = M.col(j);
  M.col(i) = c * ci + s * cj;
  M.col(j) = -s * ci + c * cj;
  const Eigen::RowVectorXd ri = M.row(i);
  const Eigen::RowVectorXd rj = M.row(j);
  M.row(i) = c * ri + s * rj;
  M.row(j) = -s * ri + c * rj;
}

}  // namespace

JacobiResult jacobi_diagonalize(const SymmetricSet& A, const JacobiConfig& cfg) {
  cfg.validate();
  const Index n = A.n();
  std::vector<Matrix> work = A.matrices();
  Matrix Y = Matrix::Identity(n, n);

  auto total_off = [&] {
    double s = 0.0;
    for (const auto& M : work) s += off_part(M).squaredNorm();
    return s;
  };

  JacobiResult result{StiefelPoint::identity(n, n), {total_off()}, 0, false};
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    // Rotations with |sin theta| below the threshold are skipped, as in the
    // reference JADE loop; a sweep with none above it ends the iteration.
    bool large = false;
    for (Index i = 0; i < n - 1; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        const double theta = pair_rotation(work, i, j);
        const double s = std::sin(theta);
        if (std::abs(s) < cfg.sweep_tol) continue;
        const double c = std::cos(theta);
        large = true;
        for (auto& M : work) rotate(M, i, j, c, s);
        const Vector yi = Y.col(i);
        const Vector yj = Y.col(j);
        Y.col(i) = c * yi + s * yj;
        Y.col(j) = -s * yi + c * yj;
      }
    }
    result.sweeps = sweep;
    if (sweep % 30 == 0) {
      Y = qf(Y);
      for (std::size_t l = 0; l < work.size(); ++l) work[l] = sym(Y.transpose() * A[l] * Y);
    }
    result.off_norms.push_back(total_off());
    if (!large) {
      result.converged = true;
      break;
    }
  }
  result.Y = StiefelPoint(std::move(Y));
  return result;
}

StiefelPoint truncate_columns(const SymmetricSet& A, const StiefelPoint& YJ, Index p) {
  const Matrix& Y = YJ.matrix();
  if (p < 1 || p > Y.cols()) throw Error(ErrorCode::InvalidArgument, "truncate_columns: bad p");
  Vector score = Vector::Zero(Y.cols());
  for (const auto& Al : A.matrices()) {
    score += (Y.transpose() * Al * Y).diagonal().array().square().matrix();
  }
  std::vector<Index> order(static_cast<std::size_t>(Y.cols()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return score(a) > score(b); });
  Matrix out(Y.rows(), p);
  for (Index k = 0; k < p; ++k) out.col(k) = Y.col(order[static_cast<std::size_t>(k)]);
  return StiefelPoint(std::move(out));
}

}  // namespace jdn
