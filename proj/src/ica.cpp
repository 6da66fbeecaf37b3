#include "jdnewton/ica.hpp"

#include <cmath>
#include <numbers>

namespace jdn {

Whitened center_whiten(const Matrix& X) {
  const Index n = X.rows();
  const Index T = X.cols();
  if (n < 1 || T < n) throw Error(ErrorCode::ShapeMismatch, "center_whiten: need T >= n >= 1");
  if (!X.allFinite()) throw Error(ErrorCode::InvalidArgument, "center_whiten: non-finite samples");
  WhiteningTransform tr;
  tr.mean = X.rowwise().mean();
  const Matrix Xc = X.colwise() - tr.mean;
  const Matrix cov = sym(Xc * Xc.transpose() / static_cast<double>(T));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const Vector lambda = eig.eigenvalues();
  const double largest = lambda.maxCoeff();
  if (!(largest > 0) || !(lambda.minCoeff() > 1e-12 * largest)) {
    throw Error(ErrorCode::SingularCovariance, "center_whiten: sample covariance is singular");
  }
  const Matrix& U = eig.eigenvectors();
  tr.W = lambda.cwiseSqrt().cwiseInverse().asDiagonal() * U.transpose();
  tr.W_inv = U * lambda.cwiseSqrt().asDiagonal();
  Matrix Z0 = tr.W * Xc;
  return {std::move(tr), std::move(Z0)};
}

namespace {

void check_index(const Matrix& Z, Index i) {
  if (i < 0 || i >= Z.rows()) throw Error(ErrorCode::IndexOutOfRange, "channel index out of range");
}

double sample_mean(const Eigen::ArrayXd& a) { return a.mean(); }

}  // namespace

double cumulant(const Matrix& Z, Index i, Index j, Index k, Index l) {
  for (Index idx : {i, j, k, l}) check_index(Z, idx);
  const Eigen::ArrayXd zi = Z.row(i).transpose().array();
  const Eigen::ArrayXd zj = Z.row(j).transpose().array();
  const Eigen::ArrayXd zk = Z.row(k).transpose().array();
  const Eigen::ArrayXd zl = Z.row(l).transpose().array();
  return sample_mean(zi * zj * zk * zl) - sample_mean(zi * zj) * sample_mean(zk * zl) -
         sample_mean(zi * zk) * sample_mean(zj * zl) - sample_mean(zi * zl) * sample_mean(zj * zk);
}

Matrix basis_matrix(Index k, Index l, Index n) {
  if (!(0 <= k && k <= l && l < n)) throw Error(ErrorCode::IndexOutOfRange, "basis_matrix: need k <= l < n");
  Matrix M = Matrix::Zero(n, n);
  if (k == l) {
    M(k, k) = 1.0;
  } else {
    M(k, l) = M(l, k) = 1.0 / std::numbers::sqrt2;
  }
  return M;
}

Matrix cumulant_matrix(const Matrix& Z, const Matrix& M) {
  const Index n = Z.rows();
  if (M.rows() != n || M.cols() != n) throw Error(ErrorCode::ShapeMismatch, "cumulant_matrix: M must be n x n");
  const Index T = Z.cols();
  // One pass over the samples; long double accumulators, fixed order.
  std::vector<long double> acc(static_cast<std::size_t>(n * n), 0.0L);
  Vector Mz(n);
  for (Index t = 0; t < T; ++t) {
    const auto z = Z.col(t);
    Mz.noalias() = M * z;
    const long double w = z.dot(Mz);
    for (Index j = 0; j < n; ++j)
      for (Index i = j; i < n; ++i) acc[static_cast<std::size_t>(i + n * j)] += w * z(i) * z(j);
  }
  Matrix Q(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = j; i < n; ++i)
      Q(i, j) = Q(j, i) = static_cast<double>(acc[static_cast<std::size_t>(i + n * j)] / T);
  Q -= M.trace() * Matrix::Identity(n, n) + M + M.transpose();
  return Q;
}

Matrix cumulant_matrix_literal(const Matrix& Z, const Matrix& M) {
  const Index n = Z.rows();
  if (M.rows() != n || M.cols() != n) throw Error(ErrorCode::ShapeMismatch, "cumulant_matrix: M must be n x n");
  Matrix Q = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k)
        for (Index l = 0; l < n; ++l) {
          if (M(k, l) != 0.0) Q(i, j) += cumulant(Z, i, j, k, l) * M(k, l);
        }
  return Q;
}

CumulantSet build_jd_problem(const Matrix& Z0) {
  const Index n = Z0.rows();
  std::vector<Matrix> mats;
  std::vector<std::pair<Index, Index>> index;
  for (Index l = 0; l < n; ++l) {
    for (Index k = 0; k <= l; ++k) {
      mats.push_back(cumulant_matrix(Z0, basis_matrix(k, l, n)));
      index.emplace_back(k, l);
    }
  }
  return {SymmetricSet(std::move(mats)), std::move(index)};
}

double correlation(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                   const Eigen::Ref<const Eigen::RowVectorXd>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::ShapeMismatch, "correlation: length mismatch");
  const Eigen::RowVectorXd ac = a.array() - a.mean();
  const Eigen::RowVectorXd bc = b.array() - b.mean();
  const double denom = ac.norm() * bc.norm();
  return denom > 0 ? ac.dot(bc) / denom : 0.0;
}

Vector excess_kurtosis(const Matrix& Z) {
  Vector k(Z.rows());
  for (Index i = 0; i < Z.rows(); ++i) {
    const Eigen::ArrayXd c = Z.row(i).transpose().array() - Z.row(i).mean();
    const double m2 = c.square().mean();
    k(i) = m2 > 0 ? c.square().square().mean() / (m2 * m2) - 3.0 : 0.0;
  }
  return k;
}

SeparationResult separate(const Matrix& X, const SeparationConfig& cfg) {
  if (X.rows() < 2) throw Error(ErrorCode::ShapeMismatch, "separate: need at least two channels");
  Whitened white = center_whiten(X);
  const CumulantSet problem = build_jd_problem(white.Z0);
  const SymmetricSet& A = problem.A;

  const JacobiResult jac = jacobi_diagonalize(A, cfg.jacobi);
  const JDResult newton = solve_orthogonal(A, jac.Y, cfg.newton);

  SeparationResult r;
  r.whitening = std::move(white.transform);
  r.Y_jacobi = jac.Y.matrix();
  r.Y_newton = newton.Y.matrix();
  r.newton_trace = newton.trace;
  r.jacobi_sweeps = jac.sweeps;
  r.grad_jacobi = gradient_norm(A, jac.Y);
  r.grad_newton = gradient_norm(A, newton.Y);
  r.f_jacobi = objective(A, jac.Y);
  r.f_newton = objective(A, newton.Y);

  const Matrix* chosen = &r.Y_newton;
  if (newton.trace.termination == Termination::SingularHessian) {
    r.fell_back_to_jacobi = true;
    r.warnings.push_back("Newton stopped on a singular Hessian; keeping the Jacobi solution");
  } else if (r.grad_newton > r.grad_jacobi) {
    r.fell_back_to_jacobi = true;
    r.warnings.push_back("Newton did not reduce the gradient norm; keeping the Jacobi solution");
  }
  if (r.fell_back_to_jacobi) chosen = &r.Y_jacobi;

  r.B_sep = chosen->transpose() * r.whitening.W;
  r.Z = r.B_sep * (X.colwise() - r.whitening.mean);

  // Sample excess kurtosis of a Gaussian has standard deviation sqrt(24 / T).
  const double gauss_band = 5.0 * std::sqrt(24.0 / static_cast<double>(X.cols()));
  const Vector kurt = excess_kurtosis(r.Z);
  const Index gaussian_like = (kurt.array().abs() < gauss_band).count();
  if (gaussian_like >= 2) {
    r.warnings.push_back(std::to_string(gaussian_like) +
                         " recovered channels are indistinguishable from Gaussian; "
                         "fourth-order separation cannot identify them");
  }
  return r;
}

Alignment align(const Matrix& Z, const Matrix& S_true) {
  if (Z.rows() != S_true.rows() || Z.cols() != S_true.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "align: recovered and true signals differ in shape");
  }
  const Index n = Z.rows();
  Matrix corr(n, n);  // corr(source i, recovered j)
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) corr(i, j) = correlation(S_true.row(i), Z.row(j));

  Alignment out{std::vector<Index>(static_cast<std::size_t>(n), -1), Vector::Zero(n), Vector::Zero(n)};
  std::vector<bool> source_used(static_cast<std::size_t>(n), false);
  std::vector<bool> channel_used(static_cast<std::size_t>(n), false);
  for (Index round = 0; round < n; ++round) {
    Index best_i = -1, best_j = -1;
    double best = -1.0;
    for (Index i = 0; i < n; ++i) {
      if (source_used[static_cast<std::size_t>(i)]) continue;
      for (Index j = 0; j < n; ++j) {
        if (channel_used[static_cast<std::size_t>(j)]) continue;
        if (std::abs(corr(i, j)) > best) {
          best = std::abs(corr(i, j));
          best_i = i;
          best_j = j;
        }
      }
    }
    source_used[static_cast<std::size_t>(best_i)] = true;
    channel_used[static_cast<std::size_t>(best_j)] = true;
    out.permutation[static_cast<std::size_t>(best_i)] = best_j;
    out.correlations(best_i) = corr(best_i, best_j);
    const Eigen::RowVectorXd zc = Z.row(best_j).array() - Z.row(best_j).mean();
    const Eigen::RowVectorXd sc = S_true.row(best_i).array() - S_true.row(best_i).mean();
    const double zz = zc.squaredNorm();
    out.scales(best_i) = zz > 0 ? zc.dot(sc) / zz : 0.0;
  }
  return out;
}

Matrix synthetic_sources(Index channels, Index T, Rng& rng, bool gaussian) {
  if (channels < 1 || T < 1) throw Error(ErrorCode::InvalidArgument, "synthetic_sources: empty shape");
  Matrix S(channels, T);
  for (Index i = 0; i < channels; ++i) {
    for (Index t = 0; t < T; ++t) {
      double v = 0.0;
      if (gaussian) {
        v = rng.normal();
      } else {
        switch (i % 4) {
          case 0:
            v = std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0);
            break;
          case 1: {
            const double u = rng.uniform() - 0.5;
            v = (u < 0 ? 1.0 : -1.0) * std::log1p(-2.0 * std::abs(u)) / std::sqrt(2.0);
            break;
          }
          case 2:
            v = rng.uniform() < 0.5 ? -1.0 : 1.0;
            break;
          default:
            v = -std::log1p(-rng.uniform()) - 1.0;
        }
      }
      S(i, t) = v;
    }
  }
  return S;
}

Matrix image_mixing_matrix() {
  Matrix M(3, 3);
  M << 0.3494, 0.3953, 0.2553,  //
      0.2535, 0.6137, 0.1328,   //
      0.5311, 0.3195, 0.1494;
  return M;
}

}  // namespace jdn
