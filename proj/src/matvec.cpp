#include "jdnewton/matvec.hpp"

#include "jdnewton/errors.hpp"

#include <cmath>
#include <string>

namespace jdn {

Vector vec(const Matrix& W) {
  return Eigen::Map<const Vector>(W.data(), W.size());
}

Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) {
    throw Error(ErrorCode::ShapeMismatch, "unvec: length " + std::to_string(v.size()) +
                                              " does not match " + std::to_string(rows) + "x" +
                                              std::to_string(cols));
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

std::pair<Index, Index> skew_pair(Index n, Index k) {
  if (k < 0 || k >= skew_dim(n)) {
    throw Error(ErrorCode::IndexOutOfRange, "skew_pair: index out of range");
  }
  Index col = 0;
  Index remaining = k;
  while (remaining >= n - 1 - col) {
    remaining -= n - 1 - col;
    ++col;
  }
  return {col + 1 + remaining, col};
}

Index skew_index(Index n, Index row, Index col) {
  if (!(row > col && col >= 0 && row < n)) {
    throw Error(ErrorCode::IndexOutOfRange, "skew_index: need n > row > col >= 0");
  }
  return col * n - col * (col + 1) / 2 + (row - col - 1);
}

Vector veck(const Matrix& S) {
  if (S.rows() != S.cols()) throw Error(ErrorCode::NotSquare, "veck: input not square");
  const Index n = S.rows();
  const double scale = std::max(S.norm(), 1e-300);
  if (sym(S).norm() > 1e-12 * scale) {
    throw Error(ErrorCode::NotSkew, "veck: input is not skew-symmetric");
  }
  Vector out(skew_dim(n));
  Index k = 0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) out(k++) = S(i, j);
  }
  return out;
}

Matrix unveck(const Vector& v, Index n) {
  if (v.size() != skew_dim(n)) throw Error(ErrorCode::ShapeMismatch, "unveck: wrong length");
  Matrix S = Matrix::Zero(n, n);
  Index k = 0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      S(i, j) = v(k);
      S(j, i) = -v(k);
      ++k;
    }
  }
  return S;
}

Matrix kron(const Matrix& U, const Matrix& V) {
  Matrix out(U.rows() * V.rows(), U.cols() * V.cols());
  for (Index j = 0; j < U.cols(); ++j) {
    for (Index i = 0; i < U.rows(); ++i) {
      out.block(i * V.rows(), j * V.cols(), V.rows(), V.cols()) = U(i, j) * V;
    }
  }
  return out;
}

Matrix sym(const Matrix& W) { return 0.5 * (W + W.transpose()); }
Matrix skew(const Matrix& W) { return 0.5 * (W - W.transpose()); }

Matrix diag_part(const Matrix& W) {
  Matrix D = Matrix::Zero(W.rows(), W.cols());
  D.diagonal() = W.diagonal();
  return D;
}

Matrix off_part(const Matrix& W) { return W - diag_part(W); }

Parts parts(const Matrix& W) {
  if (W.rows() != W.cols()) throw Error(ErrorCode::NotSquare, "parts: input not square");
  return {sym(W), skew(W), diag_part(W), off_part(W)};
}

Matrix elementary(Index rows, Index cols, Index i, Index j) {
  Matrix E = Matrix::Zero(rows, cols);
  E(i, j) = 1.0;
  return E;
}

StructuralMatrix::StructuralMatrix(Kind kind, Index n) : kind_(kind), n_(n) {
  const Index min_n = kind == Kind::SkewDuplication ? 2 : 1;
  if (n < min_n) throw Error(ErrorCode::InvalidArgument, "structural matrix: n too small");
}

Index StructuralMatrix::rows() const { return n_ * n_; }

Index StructuralMatrix::cols() const {
  return kind_ == Kind::SkewDuplication ? skew_dim(n_) : n_ * n_;
}

Vector StructuralMatrix::apply(const Vector& x) const {
  if (x.size() != cols()) throw Error(ErrorCode::ShapeMismatch, "structural apply: wrong length");
  Vector y = Vector::Zero(rows());
  switch (kind_) {
    case Kind::Commutation:
      // y = vec(W^T) for x = vec(W)
      for (Index j = 0; j < n_; ++j)
        for (Index i = 0; i < n_; ++i) y(j + n_ * i) = x(i + n_ * j);
      break;
    case Kind::DiagSelector:
      for (Index i = 0; i < n_; ++i) y(i + n_ * i) = x(i + n_ * i);
      break;
    case Kind::SkewDuplication:
      for (Index k = 0; k < cols(); ++k) {
        const auto [r, c] = skew_pair(n_, k);
        y(r + n_ * c) += x(k);
        y(c + n_ * r) -= x(k);
      }
      break;
  }
  return y;
}

Vector StructuralMatrix::apply_transpose(const Vector& y) const {
  if (y.size() != rows()) {
    throw Error(ErrorCode::ShapeMismatch, "structural apply_transpose: wrong length");
  }
  switch (kind_) {
    case Kind::Commutation:
    case Kind::DiagSelector:
      // both are symmetric
      return apply(y);
    case Kind::SkewDuplication: {
      Vector x(cols());
      for (Index k = 0; k < cols(); ++k) {
        const auto [r, c] = skew_pair(n_, k);
        x(k) = y(r + n_ * c) - y(c + n_ * r);
      }
      return x;
    }
  }
  return {};
}

Matrix StructuralMatrix::dense() const {
  Matrix M = Matrix::Zero(rows(), cols());
  switch (kind_) {
    case Kind::Commutation:
      // sum_{i,j} E_ij (x) E_ji
      for (Index i = 0; i < n_; ++i)
        for (Index j = 0; j < n_; ++j) M(i * n_ + j, j * n_ + i) = 1.0;
      break;
    case Kind::DiagSelector:
      for (Index i = 0; i < n_; ++i) M(i * n_ + i, i * n_ + i) = 1.0;
      break;
    case Kind::SkewDuplication:
      for (Index k = 0; k < cols(); ++k) {
        const auto [r, c] = skew_pair(n_, k);
        M(r + n_ * c, k) = 1.0;
        M(c + n_ * r, k) = -1.0;
      }
      break;
  }
  return M;
}

StructuralMatrix commutation(Index n) {
  return {StructuralMatrix::Kind::Commutation, n};
}
StructuralMatrix diag_selector(Index n) {
  return {StructuralMatrix::Kind::DiagSelector, n};
}
StructuralMatrix skew_duplication(Index n) {
  return {StructuralMatrix::Kind::SkewDuplication, n};
}

}  // namespace jdn
