#include "jdnewton/jdcore.hpp"

#include "jdnewton/errors.hpp"

#include <string>

namespace jdn {

SymmetricSet::SymmetricSet(std::vector<Matrix> matrices) : A_(std::move(matrices)) {
  if (A_.empty()) throw Error(ErrorCode::InvalidArgument, "SymmetricSet: no matrices");
  n_ = A_.front().rows();
  for (std::size_t l = 0; l < A_.size(); ++l) {
    Matrix& A = A_[l];
    if (A.rows() != A.cols()) {
      throw Error(ErrorCode::NotSquare, "SymmetricSet: matrix " + std::to_string(l) + " not square");
    }
    if (A.rows() != n_) {
      throw Error(ErrorCode::ShapeMismatch, "SymmetricSet: matrices differ in size");
    }
    if (!A.allFinite()) {
      throw Error(ErrorCode::InvalidArgument, "SymmetricSet: non-finite entries");
    }
    if ((A - A.transpose()).norm() > 1e-10 * A.norm()) {
      throw Error(ErrorCode::AsymmetricInput,
                  "SymmetricSet: matrix " + std::to_string(l) + " is not symmetric");
    }
    A = sym(A);
  }
}

double SymmetricSet::frobenius_sum() const {
  double s = 0.0;
  for (const auto& A : A_) s += A.norm();
  return s;
}

double SymmetricSet::frobenius_sq_sum() const {
  double s = 0.0;
  for (const auto& A : A_) s += A.squaredNorm();
  return s;
}

Matrix HessianRep::full() const {
  Matrix H(dim(), dim());
  const Index nb = H11.rows();
  const Index nc = H22.rows();
  H.topLeftCorner(nb, nb) = H11;
  H.topRightCorner(nb, nc) = H12;
  H.bottomLeftCorner(nc, nb) = H21;
  H.bottomRightCorner(nc, nc) = H22;
  return H;
}

Vector HessianRep::apply(const Vector& x) const {
  if (x.size() != dim()) throw Error(ErrorCode::ShapeMismatch, "HessianRep::apply: wrong length");
  const Index nb = H11.rows();
  const Index nc = H22.rows();
  Vector y(dim());
  y.head(nb) = H11 * x.head(nb) + H12 * x.tail(nc);
  y.tail(nc) = H21 * x.head(nb) + H22 * x.tail(nc);
  return y;
}

namespace {

void check_shape(const SymmetricSet& A, const Matrix& Y) {
  if (Y.rows() != A.n()) {
    throw Error(ErrorCode::ShapeMismatch, "Y has " + std::to_string(Y.rows()) +
                                              " rows, matrices are " + std::to_string(A.n()));
  }
}

}  // namespace

CompressedData compress(const SymmetricSet& A, const Frame& frame) {
  check_shape(A, frame.Y());
  CompressedData data;
  data.n = frame.n();
  data.p = frame.p();
  const Matrix& Y = frame.Y();
  const Matrix& Yp = frame.Yperp();
  for (const auto& Al : A.matrices()) {
    const Matrix AY = Al * Y;
    data.Z.push_back(sym(Y.transpose() * AY));
    data.Zperp.push_back(AY.transpose() * Yp);
    data.Zperpperp.push_back(sym(Yp.transpose() * Al * Yp));
  }
  return data;
}

double objective(const SymmetricSet& A, const Matrix& Y) {
  check_shape(A, Y);
  double f = 0.0;
  for (const auto& Al : A.matrices()) {
    const Matrix AY = Al * Y;
    for (Index i = 0; i < Y.cols(); ++i) {
      const double z = Y.col(i).dot(AY.col(i));
      f -= z * z;
    }
  }
  return f;
}

Matrix euclidean_gradient(const SymmetricSet& A, const Matrix& Y) {
  check_shape(A, Y);
  Matrix G = Matrix::Zero(Y.rows(), Y.cols());
  for (const auto& Al : A.matrices()) {
    const Matrix AY = Al * Y;
    const Vector d = (Y.transpose() * AY).diagonal();
    G -= 4.0 * AY * d.asDiagonal();
  }
  return G;
}

TangentAmbient riemannian_gradient(const SymmetricSet& A, const StiefelPoint& point,
                                   Metric metric) {
  const Matrix& Y = point.matrix();
  check_shape(A, Y);
  Matrix g = Matrix::Zero(Y.rows(), Y.cols());
  if (metric == Metric::Induced) {
    for (const auto& Al : A.matrices()) {
      const Matrix AY = Al * Y;
      const Matrix Z = sym(Y.transpose() * AY);
      const Matrix d = diag_part(Z);
      g -= 4.0 * (AY * d - Y * sym(Z * d));
    }
  } else {
    const Matrix G = euclidean_gradient(A, Y);
    g = G - Y * G.transpose() * Y;
  }
  return TangentAmbient(point, std::move(g));
}

TangentCoords gradient_coords(const CompressedData& data, Metric metric) {
  Matrix ZD = Matrix::Zero(data.p, data.p);
  Matrix C = Matrix::Zero(data.n - data.p, data.p);
  for (std::size_t l = 0; l < data.Z.size(); ++l) {
    const Matrix d = diag_part(data.Z[l]);
    ZD += data.Z[l] * d;
    C -= 4.0 * data.Zperp[l].transpose() * d;
  }
  // Y^T grad^c f = 2 Y^T grad f; the perpendicular parts coincide.
  const double scale = metric == Metric::Induced ? -4.0 : -8.0;
  return TangentCoords::from_skew(scale * skew(ZD), std::move(C));
}

TangentAmbient hessian_apply(const SymmetricSet& A, const StiefelPoint& point,
                             const TangentAmbient& xi, Metric metric) {
  const Matrix& Y = point.matrix();
  check_shape(A, Y);
  if (xi.anchor() != Y) throw Error(ErrorCode::AnchorMismatch, "hessian_apply: foreign tangent");
  const Matrix& X = xi.matrix();
  const Index n = Y.rows();
  Matrix G = Matrix::Zero(n, Y.cols());
  for (const auto& Al : A.matrices()) {
    const Matrix AY = Al * Y;
    const Matrix AX = Al * X;
    const Matrix Z = sym(Y.transpose() * AY);
    const Matrix d = diag_part(Z);
    const Matrix S = sym(Z * d);
    const Matrix dYAX = diag_part(Y.transpose() * AX);
    if (metric == Metric::Induced) {
      G += AX * d + 2.0 * AY * dYAX - X * S;
    } else {
      G += AX * d + 2.0 * AY * dYAX +
           0.5 * (Y * (X.transpose() * AY) * d + AY * d * (X.transpose() * Y)) -
           (X - Y * (Y.transpose() * X)) * S;
    }
  }
  G *= -4.0;
  const Matrix PG = G - Y * sym(Y.transpose() * G);
  if (metric == Metric::Induced) return TangentAmbient(point, PG);
  return TangentAmbient(point, PG + Y * (Y.transpose() * PG));
}

TangentCoords hessian_coords(const CompressedData& data, const TangentCoords& coords,
                             Metric metric) {
  if (coords.p() != data.p || coords.C().rows() != data.n - data.p) {
    throw Error(ErrorCode::ShapeMismatch, "hessian_coords: coordinates do not match data");
  }
  const Matrix B = coords.B();
  const Matrix& C = coords.C();
  Matrix BH = Matrix::Zero(data.p, data.p);
  Matrix CH = Matrix::Zero(data.n - data.p, data.p);
  for (std::size_t l = 0; l < data.Z.size(); ++l) {
    const Matrix& Z = data.Z[l];
    const Matrix& Zp = data.Zperp[l];
    const Matrix& Zpp = data.Zperpperp[l];
    const Matrix d = diag_part(Z);
    const Matrix S = sym(Z * d);
    const Matrix W = Z * B + Zp * C;
    const Matrix dW = diag_part(W);
    if (metric == Metric::Induced) {
      BH += skew(W * d + 2.0 * Z * dW - B * S);
      CH += (Zp.transpose() * B + Zpp * C) * d + 2.0 * Zp.transpose() * dW - C * S;
    } else {
      BH += skew(W * d + 2.0 * Z * dW +
                 0.5 * ((-B * Z + C.transpose() * Zp.transpose()) * d - Z * d * B));
      CH += (Zp.transpose() * B + Zpp * C) * d + 2.0 * Zp.transpose() * dW -
            0.5 * Zp.transpose() * d * B - C * S;
    }
  }
  BH *= metric == Metric::Induced ? -4.0 : -8.0;
  CH *= -4.0;
  return TangentCoords::from_skew(BH, std::move(CH));
}

namespace {

// Per-column slices of the Kronecker sums. With d_l = diag(Z_l):
//   sum_l diag(Z_l) (x) Z_l + 2 (I (x) Z_l) Delta (I (x) Z_l) has entry
//   delta_{jj'} R[j](i, i') at row i + p j, column i' + p j', where
//   R[j] = sum_l (d_l)_j Z_l + 2 Z_l(:, j) Z_l(:, j)^T.
struct KroneckerSlices {
  std::vector<Matrix> R;    // p x p per column j
  std::vector<Matrix> R12;  // p x (n-p) per column j
  std::vector<Matrix> R22;  // (n-p) x (n-p) per column j
  Matrix S;                 // sum_l sym(Z_l diag(Z_l))
  Matrix E;                 // sum_l diag(Z_l) Zperp_l
};

KroneckerSlices slices(const CompressedData& data, bool with_perp) {
  const Index p = data.p;
  const Index q = data.n - data.p;
  KroneckerSlices k;
  k.R.assign(static_cast<std::size_t>(p), Matrix::Zero(p, p));
  k.S = Matrix::Zero(p, p);
  if (with_perp) {
    k.R12.assign(static_cast<std::size_t>(p), Matrix::Zero(p, q));
    k.R22.assign(static_cast<std::size_t>(p), Matrix::Zero(q, q));
    k.E = Matrix::Zero(p, q);
  }
  for (std::size_t l = 0; l < data.Z.size(); ++l) {
    const Matrix& Z = data.Z[l];
    const Vector d = Z.diagonal();
    k.S += sym(Z * d.asDiagonal());
    for (Index j = 0; j < p; ++j) {
      auto sj = static_cast<std::size_t>(j);
      k.R[sj] += d(j) * Z + 2.0 * Z.col(j) * Z.col(j).transpose();
      if (with_perp) {
        const Matrix& Zp = data.Zperp[l];
        k.R12[sj] += d(j) * Zp + 2.0 * Z.col(j) * Zp.row(j);
        k.R22[sj] += d(j) * data.Zperpperp[l] + 2.0 * Zp.row(j).transpose() * Zp.row(j);
      }
    }
    if (with_perp) k.E += d.asDiagonal() * data.Zperp[l];
  }
  return k;
}

// -coef * D_p^T K D_p where K(i,j;i',j') = delta_{jj'} R[j](i,i') - S(j,j') delta_{ii'}.
Matrix skew_block(const KroneckerSlices& k, Index p, double coef) {
  auto K = [&](Index i, Index j, Index i2, Index j2) {
    double v = (j == j2) ? k.R[static_cast<std::size_t>(j)](i, i2) : 0.0;
    if (i == i2) v -= k.S(j, j2);
    return v;
  };
  const Index nb = skew_dim(p);
  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(static_cast<std::size_t>(nb));
  for (Index a = 0; a < nb; ++a) pairs.push_back(skew_pair(p, a));
  Matrix H(nb, nb);
  for (Index b = 0; b < nb; ++b) {
    const auto [rb, cb] = pairs[static_cast<std::size_t>(b)];
    for (Index a = 0; a < nb; ++a) {
      const auto [ra, ca] = pairs[static_cast<std::size_t>(a)];
      H(a, b) = coef * (K(ra, ca, rb, cb) - K(ra, ca, cb, rb) - K(ca, ra, rb, cb) +
                        K(ca, ra, cb, rb));
    }
  }
  return H;
}

}  // namespace

HessianRep hessian_matrix(const CompressedData& data, Metric metric) {
  const Index p = data.p;
  const Index q = data.n - data.p;
  const Index nb = skew_dim(p);
  const bool canonical = metric == Metric::Canonical;
  const KroneckerSlices k = slices(data, true);

  HessianRep rep;
  rep.metric = metric;
  // D_p^T (I - T_p) = 2 D_p^T
  rep.H11 = skew_block(k, p, canonical ? -4.0 : -2.0);

  const double c12 = canonical ? -4.0 : -2.0;
  rep.H12 = Matrix::Zero(nb, p * q);
  for (Index a = 0; a < nb; ++a) {
    const auto [r, c] = skew_pair(p, a);
    // M(i,j; i',j') = delta_{jj'} (R12[j](i,i') - [canonical] E(i,i') / 2)
    for (Index i2 = 0; i2 < q; ++i2) {
      double plus = k.R12[static_cast<std::size_t>(c)](r, i2);
      double minus = k.R12[static_cast<std::size_t>(r)](c, i2);
      if (canonical) {
        plus -= 0.5 * k.E(r, i2);
        minus -= 0.5 * k.E(c, i2);
      }
      rep.H12(a, i2 + q * c) += c12 * plus;
      rep.H12(a, i2 + q * r) -= c12 * minus;
    }
  }
  rep.H21 = canonical ? Matrix(rep.H12.transpose()) : Matrix(2.0 * rep.H12.transpose());

  rep.H22 = Matrix::Zero(p * q, p * q);
  for (Index j = 0; j < p; ++j) {
    rep.H22.block(q * j, q * j, q, q) = k.R22[static_cast<std::size_t>(j)];
  }
  for (Index j = 0; j < p; ++j) {
    for (Index j2 = 0; j2 < p; ++j2) {
      rep.H22.block(q * j, q * j2, q, q).diagonal().array() -= k.S(j, j2);
    }
  }
  rep.H22 *= -4.0;
  return rep;
}

HessianRep hessian_matrix_reference(const CompressedData& data, Metric metric) {
  const Index p = data.p;
  const Index q = data.n - data.p;
  const bool canonical = metric == Metric::Canonical;
  // D_1 would have no columns; the B block is then empty.
  const Matrix D = p >= 2 ? skew_duplication(p).dense() : Matrix(p * p, 0);
  const Matrix T = commutation(p).dense();
  const Matrix Delta = diag_selector(p).dense();
  const Matrix Ip = Matrix::Identity(p, p);
  const Matrix Iq = Matrix::Identity(q, q);
  const Matrix Ipp = Matrix::Identity(p * p, p * p);

  Matrix K11 = Matrix::Zero(p * p, p * p);
  Matrix K12 = Matrix::Zero(p * p, p * q);
  Matrix K21 = Matrix::Zero(p * q, p * p);
  Matrix K22 = Matrix::Zero(p * q, p * q);
  for (std::size_t l = 0; l < data.Z.size(); ++l) {
    const Matrix& Z = data.Z[l];
    const Matrix& Zp = data.Zperp[l];
    const Matrix Zpt = Zp.transpose();
    const Matrix d = diag_part(Z);
    const Matrix S = sym(Z * d);
    K11 += kron(d, Z) + 2.0 * kron(Ip, Z) * Delta * kron(Ip, Z) - kron(S, Ip);
    K12 += kron(d, Zp) + 2.0 * kron(Ip, Z) * Delta * kron(Ip, Zp);
    K21 += kron(d, Zpt) + 2.0 * kron(Ip, Zpt) * Delta * kron(Ip, Z);
    K22 += kron(d, data.Zperpperp[l]) + 2.0 * kron(Ip, Zpt) * Delta * kron(Ip, Zp) - kron(S, Iq);
    if (canonical) {
      K12 -= 0.5 * kron(Ip, d * Zp);
      K21 -= 0.5 * kron(Ip, Zpt * d);
    }
  }
  const Matrix left = D.transpose() * (Ipp - T);
  const double c = canonical ? -2.0 : -1.0;
  HessianRep rep;
  rep.metric = metric;
  rep.H11 = c * left * K11 * D;
  rep.H12 = c * left * K12;
  rep.H21 = -4.0 * K21 * D;
  rep.H22 = -4.0 * K22;
  return rep;
}

Matrix orthogonal_hessian_matrix(const std::vector<Matrix>& Z) {
  if (Z.empty()) throw Error(ErrorCode::InvalidArgument, "orthogonal_hessian_matrix: no data");
  CompressedData data;
  data.n = data.p = Z.front().rows();
  data.Z = Z;
  return skew_block(slices(data, false), data.p, -2.0);
}

}  // namespace jdn
