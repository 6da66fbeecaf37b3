#include "jdnewton/diagnostics.hpp"

#include "jdnewton/newton.hpp"
#include "jdnewton/random.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace jdn {

Matrix stiefel_geodesic(const Matrix& Y, const Matrix& xi, double t, Metric metric) {
  const Index p = Y.cols();
  const Matrix A = Y.transpose() * xi;
  if (metric == Metric::Induced) {
    // [Y, xi] exp(t [[A, -S], [I, A]]) I_{2p,p} exp(-t A), S = xi^T xi
    Matrix blk(2 * p, 2 * p);
    blk << A, -(xi.transpose() * xi), Matrix::Identity(p, p), A;
    Matrix YX(Y.rows(), 2 * p);
    YX << Y, xi;
    const Matrix E = (t * blk).exp();
    return YX * E.leftCols(p) * (-t * A).exp();
  }
  // Y M(t) + Q N(t) with Q R = (I - Y Y^T) xi
  const Matrix H = xi - Y * A;
  Eigen::HouseholderQR<Matrix> qr(H);
  const Matrix Q = qr.householderQ() * Matrix::Identity(Y.rows(), p);
  const Matrix R = Q.transpose() * H;
  Matrix blk(2 * p, 2 * p);
  blk << A, -R.transpose(), R, Matrix::Zero(p, p);
  const Matrix MN = (t * blk).exp().leftCols(p);
  return Y * MN.topRows(p) + Q * MN.bottomRows(p);
}

namespace {

CheckResult make(std::string name, double error, double tol) {
  return {std::move(name), error, tol, error <= tol};
}

TangentAmbient random_tangent(const StiefelPoint& Y, Rng& rng) {
  const Matrix W = rng.gaussian(Y.n(), Y.p());
  const Matrix xi = project(Y, W).matrix();
  return TangentAmbient(Y, xi / std::max(xi.norm(), 1e-300));
}

}  // namespace

std::vector<CheckResult> run_checks(Index n, Index p, Index N, std::uint64_t seed) {
  if (!(1 <= p && p <= n && n <= 12 && N >= 1)) {
    throw Error(ErrorCode::InvalidArgument, "run_checks: need 1 <= p <= n <= 12 and N >= 1");
  }
  Rng rng(seed);
  std::vector<Matrix> mats;
  for (Index l = 0; l < N; ++l) mats.push_back(random_symmetric(n, rng));
  const SymmetricSet A(std::move(mats));
  const StiefelPoint Y(random_stiefel(n, p, rng));
  const Frame frame(Y);
  const CompressedData data = compress(A, frame);
  std::vector<CheckResult> out;

  for (Metric metric : {Metric::Induced, Metric::Canonical}) {
    const std::string tag = std::string("[") + to_string(metric) + "] ";
    const TangentAmbient grad = riemannian_gradient(A, Y, metric);

    double grad_err = 0.0, hess_err = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const TangentAmbient xi = random_tangent(Y, rng);
      const double h = 1e-6;
      const double fd = (objective(A, qr_retract(Y, TangentAmbient(Y, h * xi.matrix()))) -
                         objective(A, qr_retract(Y, TangentAmbient(Y, -h * xi.matrix())))) /
                        (2 * h);
      const double an = inner(Y, grad, xi, metric);
      grad_err = std::max(grad_err, std::abs(fd - an) / std::max(grad.matrix().norm(), 1e-300));

      const double h2 = 1e-4;
      const double f0 = objective(A, Y.matrix());
      const double sd = (objective(A, stiefel_geodesic(Y.matrix(), xi.matrix(), h2, metric)) - 2 * f0 +
                         objective(A, stiefel_geodesic(Y.matrix(), xi.matrix(), -h2, metric))) /
                        (h2 * h2);
      const TangentAmbient Hxi = hessian_apply(A, Y, xi, metric);
      const double q = inner(Y, Hxi, xi, metric);
      hess_err = std::max(hess_err, std::abs(sd - q) / std::max(Hxi.matrix().norm(), 1e-300));
    }
    out.push_back(make(tag + "gradient vs central differences of f(qf(Y + t xi))", grad_err, 1e-6));
    out.push_back(make(tag + "Hessian quadratic form vs geodesic second differences", hess_err, 1e-5));

    const HessianRep rep = hessian_matrix(data, metric);
    const Matrix H = rep.full();
    const double hscale = std::max(H.norm(), 1e-300);
    double op_err = 0.0;
    for (Index k = 0; k < rep.dim(); ++k) {
      const TangentCoords e = TangentCoords::from_vector(Vector::Unit(rep.dim(), k), n, p);
      const Vector by_matrix = H.col(k);
      const Vector by_coords = hessian_coords(data, e, metric).to_vector();
      const Vector by_ambient =
          coords_from_ambient(frame, hessian_apply(A, Y, ambient_from_coords(frame, e), metric))
              .to_vector();
      op_err = std::max({op_err, (by_matrix - by_coords).norm() / hscale,
                         (by_coords - by_ambient).norm() / hscale});
    }
    out.push_back(make(tag + "H_A columns vs coordinate and ambient Hessian", op_err, 1e-11));

    const HessianRep ref = hessian_matrix_reference(data, metric);
    out.push_back(make(tag + "production vs literal Kronecker assembly",
                       (ref.full() - H).norm() / hscale, 1e-12));
    if (metric == Metric::Induced) {
      out.push_back(make(tag + "H21 = 2 H12^T (literal blocks)",
                         (ref.H21 - 2.0 * ref.H12.transpose()).norm() / hscale, 1e-12));
      // Self-adjointness in the coordinate metric 2 b.b' + c.c'.
      Vector w = Vector::Ones(rep.dim());
      w.head(skew_dim(p)).setConstant(2.0);
      const Matrix GH = w.asDiagonal() * H;
      out.push_back(make(tag + "diag(2I, I) H_A symmetric", (GH - GH.transpose()).norm() / hscale, 1e-12));
      out.push_back(make(tag + "H11, H22 symmetric",
                         ((ref.H11 - ref.H11.transpose()).norm() + (ref.H22 - ref.H22.transpose()).norm()) /
                             hscale,
                         1e-12));
    } else {
      out.push_back(make(tag + "H^c_A symmetric (literal blocks)",
                         (ref.full() - ref.full().transpose()).norm() / hscale, 1e-12));
    }
  }

  double lemma = 0.0;
  for (Index q = 2; q <= 8; ++q) {
    const Matrix D = skew_duplication(q).dense();
    const Matrix T = commutation(q).dense();
    lemma = std::max(lemma, (D.transpose() + D.transpose() * T).cwiseAbs().maxCoeff());
    lemma = std::max(lemma, (D.transpose() * D - 2.0 * Matrix::Identity(D.cols(), D.cols()))
                                .cwiseAbs()
                                .maxCoeff());
  }
  out.push_back(make("D_p^T = -D_p^T T_p and D_p^T D_p = 2I for p <= 8", lemma, 0.0));

  if (p == n) {
    const Matrix Ho = orthogonal_hessian_matrix(data.Z);
    const Matrix Hg = hessian_matrix(data, Metric::Induced).full();
    out.push_back(make("orthogonal-group Hessian vs general assembly",
                       (Ho - Hg).norm() / std::max(Hg.norm(), 1e-300), 1e-12));
  }
  return out;
}

}  // namespace jdn
