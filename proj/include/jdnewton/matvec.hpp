#pragma once

// Matrix-calculus helpers: column-major vec, veck for skew matrices, the
// Kronecker product, and the structural matrices T_n (commutation),
// Delta_n (diagonal selector) and D_n (skew duplication).

#include "jdnewton/errors.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <utility>

namespace jdn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Column-major stacking of W.
Vector vec(const Matrix& W);
Matrix unvec(const Vector& v, Index rows, Index cols);

/// Number of strictly-lower entries of an n x n matrix, n(n-1)/2.
constexpr Index skew_dim(Index n) { return n * (n - 1) / 2; }

/// 0-based (row, col) of the k-th veck coordinate of an n x n skew matrix;
/// the strictly-lower triangle is walked column by column, so row > col.
std::pair<Index, Index> skew_pair(Index n, Index k);

/// Inverse of skew_pair for row > col.
Index skew_index(Index n, Index row, Index col);

/// Strictly-lower entries of S stacked column by column. Throws NotSkew when
/// ||sym(S)||_F exceeds 1e-12 * max(||S||_F, 1e-300).
Vector veck(const Matrix& S);

/// The skew-symmetric matrix whose veck is v.
Matrix unveck(const Vector& v, Index n);

Matrix kron(const Matrix& U, const Matrix& V);

struct Parts {
  Matrix sym;
  Matrix skew;
  Matrix diag;
  Matrix off;
};

/// Throws NotSquare for rectangular input.
Parts parts(const Matrix& W);

Matrix sym(const Matrix& W);
Matrix skew(const Matrix& W);
/// Diagonal part, same shape as W.
Matrix diag_part(const Matrix& W);
Matrix off_part(const Matrix& W);

/// One of T_n, Delta_n, D_n held as an index map. apply() and
/// apply_transpose() never allocate an n^2 x n^2 matrix; dense() does.
class StructuralMatrix {
 public:
  enum class Kind { Commutation, DiagSelector, SkewDuplication };

  StructuralMatrix(Kind kind, Index n);

  Kind kind() const { return kind_; }
  Index n() const { return n_; }
  Index rows() const;
  Index cols() const;

  Vector apply(const Vector& x) const;
  Vector apply_transpose(const Vector& y) const;
  Matrix dense() const;

 private:
  Kind kind_;
  Index n_;
};

StructuralMatrix commutation(Index n);
StructuralMatrix diag_selector(Index n);
StructuralMatrix skew_duplication(Index n);

/// The n x n matrix with a single 1 at (i, j), 0-based.
Matrix elementary(Index rows, Index cols, Index i, Index j);

}  // namespace jdn
