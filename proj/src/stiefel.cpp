#include "jdnewton/stiefel.hpp"

#include "jdnewton/errors.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace jdn {

const char* to_string(Metric metric) {
  return metric == Metric::Induced ? "induced" : "canonical";
}

Metric metric_from_string(const std::string& name) {
  if (name == "induced") return Metric::Induced;
  if (name == "canonical") return Metric::Canonical;
  throw Error(ErrorCode::InvalidArgument, "unknown metric '" + name + "'");
}

Matrix qf(const Matrix& W) {
  const Index n = W.rows();
  const Index p = W.cols();
  if (p > n) throw Error(ErrorCode::ShapeMismatch, "qf: more columns than rows");
  if (p == 0) return Matrix(n, 0);
  Eigen::HouseholderQR<Matrix> qr(W);
  const Matrix R = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  Matrix Q = qr.householderQ() * Matrix::Identity(n, p);
  const double floor = 1e-12 * W.norm();
  for (Index j = 0; j < p; ++j) {
    if (!(std::abs(R(j, j)) >= floor) || R(j, j) == 0.0) {
      throw Error(ErrorCode::RankDeficient, "qf: matrix is numerically rank deficient");
    }
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  }
  return Q;
}

double orthogonality_defect(const Matrix& Y) {
  return (Y.transpose() * Y - Matrix::Identity(Y.cols(), Y.cols())).norm();
}

StiefelPoint::StiefelPoint(Matrix Y) : Y_(std::move(Y)) {
  if (Y_.cols() > Y_.rows() || Y_.cols() == 0) {
    throw Error(ErrorCode::ShapeMismatch, "StiefelPoint: need 1 <= p <= n");
  }
  if (!Y_.allFinite()) throw Error(ErrorCode::NotStiefel, "StiefelPoint: non-finite entries");
  const double defect = orthogonality_defect(Y_);
  if (defect > 1e-6) {
    throw Error(ErrorCode::NotStiefel,
                "StiefelPoint: orthogonality defect " + std::to_string(defect) + " exceeds 1e-6");
  }
  if (defect > 1e-10) Y_ = qf(Y_);
}

StiefelPoint StiefelPoint::identity(Index n, Index p) {
  return StiefelPoint(Matrix::Identity(n, p));
}

OrthoComplement compute_perp(const StiefelPoint& point) {
  const Matrix& Y = point.matrix();
  const Index n = point.n();
  const Index p = point.p();
  if (p == n) return {Matrix(n, 0)};

  const Matrix X = Matrix::Identity(n, n) - Y * Y.transpose();
  const double threshold = 1e-8 * X.norm();

  // Modified Gram-Schmidt against the accepted set decides independence;
  // the accepted columns of X themselves are what gets orthonormalized.
  std::vector<Index> kept;
  Matrix basis(n, n - p);
  for (Index j = 0; j < n && static_cast<Index>(kept.size()) < n - p; ++j) {
    Vector r = X.col(j);
    for (Index k = 0; k < static_cast<Index>(kept.size()); ++k) {
      r -= basis.col(k).dot(r) * basis.col(k);
    }
    const double rn = r.norm();
    if (rn > threshold) {
      basis.col(static_cast<Index>(kept.size())) = r / rn;
      kept.push_back(j);
    }
  }
  if (static_cast<Index>(kept.size()) < n - p) {
    throw Error(ErrorCode::NumericalBreakdown,
                "compute_perp: found only " + std::to_string(kept.size()) +
                    " independent columns, need " + std::to_string(n - p));
  }

  Matrix Z0(n, n - p);
  for (Index k = 0; k < n - p; ++k) Z0.col(k) = X.col(kept[static_cast<std::size_t>(k)]);
  Matrix Yperp = qf(Z0);
  // One reorthogonalization pass against Y; qf preserves column signs here.
  Yperp = qf(Yperp - Y * (Y.transpose() * Yperp));
  return {std::move(Yperp)};
}

Frame::Frame(StiefelPoint Y) : Y_(std::move(Y)), perp_(compute_perp(Y_)) {}

Frame::Frame(StiefelPoint Y, OrthoComplement perp) : Y_(std::move(Y)), perp_(std::move(perp)) {
  if (perp_.Yperp.rows() != Y_.n() || perp_.Yperp.cols() != Y_.n() - Y_.p()) {
    throw Error(ErrorCode::ShapeMismatch, "Frame: complement has wrong shape");
  }
}

TangentAmbient::TangentAmbient(const StiefelPoint& anchor, Matrix xi)
    : anchor_(anchor.matrix()), xi_(std::move(xi)) {
  if (xi_.rows() != anchor_.rows() || xi_.cols() != anchor_.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "TangentAmbient: shape differs from anchor");
  }
  const Matrix S = xi_.transpose() * anchor_;
  const double defect = (S + S.transpose()).norm();
  if (!(defect <= 1e-10 * std::max(1.0, xi_.norm()))) {
    throw Error(ErrorCode::NotTangent,
                "TangentAmbient: xi^T Y + Y^T xi has norm " + std::to_string(defect));
  }
}

TangentCoords::TangentCoords(Vector veck_B, Matrix C, Index p)
    : b_(std::move(veck_B)), C_(std::move(C)), p_(p) {
  if (b_.size() != skew_dim(p) || C_.cols() != p) {
    throw Error(ErrorCode::ShapeMismatch, "TangentCoords: inconsistent block sizes");
  }
}

TangentCoords TangentCoords::from_skew(const Matrix& B, Matrix C) {
  const Index p = B.rows();
  return TangentCoords(veck(B), std::move(C), p);
}

TangentCoords TangentCoords::zero(Index n, Index p) {
  return TangentCoords(Vector::Zero(skew_dim(p)), Matrix::Zero(n - p, p), p);
}

TangentCoords TangentCoords::from_vector(const Vector& x, Index n, Index p) {
  const Index nb = skew_dim(p);
  if (x.size() != nb + p * (n - p)) {
    throw Error(ErrorCode::ShapeMismatch, "TangentCoords: vector length mismatch");
  }
  return TangentCoords(x.head(nb), unvec(x.tail(p * (n - p)), n - p, p), p);
}

Vector TangentCoords::to_vector() const {
  Vector x(b_.size() + C_.size());
  x << b_, vec(C_);
  return x;
}

TangentAmbient project(const StiefelPoint& Y, const Matrix& W) {
  const Matrix& y = Y.matrix();
  if (W.rows() != y.rows() || W.cols() != y.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "project: W must be n x p");
  }
  return TangentAmbient(Y, W - y * sym(y.transpose() * W));
}

StiefelPoint qr_retract(const StiefelPoint& Y, const TangentAmbient& xi) {
  if (xi.anchor() != Y.matrix()) {
    throw Error(ErrorCode::AnchorMismatch, "qr_retract: tangent anchored elsewhere");
  }
  return StiefelPoint(qf(Y.matrix() + xi.matrix()));
}

TangentCoords coords_from_ambient(const Frame& frame, const TangentAmbient& xi) {
  if (xi.anchor() != frame.Y()) {
    throw Error(ErrorCode::AnchorMismatch, "coords_from_ambient: tangent anchored elsewhere");
  }
  const Matrix B = skew(frame.Y().transpose() * xi.matrix());
  return TangentCoords::from_skew(B, frame.Yperp().transpose() * xi.matrix());
}

TangentAmbient ambient_from_coords(const Frame& frame, const TangentCoords& coords) {
  if (coords.p() != frame.p() || coords.C().rows() != frame.n() - frame.p()) {
    throw Error(ErrorCode::ShapeMismatch, "ambient_from_coords: coordinate sizes differ");
  }
  Matrix xi = frame.Y() * coords.B();
  if (coords.C().size() > 0) xi += frame.Yperp() * coords.C();
  return TangentAmbient(frame.point(), std::move(xi));
}

double inner(const StiefelPoint& Y, const TangentAmbient& xi1, const TangentAmbient& xi2,
             Metric metric) {
  if (xi1.anchor() != Y.matrix() || xi2.anchor() != Y.matrix()) {
    throw Error(ErrorCode::AnchorMismatch, "inner: tangents anchored elsewhere");
  }
  const double full = (xi1.matrix().array() * xi2.matrix().array()).sum();
  if (metric == Metric::Induced) return full;
  const Matrix a = Y.matrix().transpose() * xi1.matrix();
  const Matrix b = Y.matrix().transpose() * xi2.matrix();
  return full - 0.5 * (a.array() * b.array()).sum();
}

double inner(const TangentCoords& c1, const TangentCoords& c2, Metric metric) {
  if (c1.p() != c2.p() || c1.C().rows() != c2.C().rows()) {
    throw Error(ErrorCode::ShapeMismatch, "inner: coordinate sizes differ");
  }
  const double weight = metric == Metric::Induced ? 2.0 : 1.0;
  return weight * c1.b().dot(c2.b()) + (c1.C().array() * c2.C().array()).sum();
}

}  // namespace jdn
