#pragma once

// Geometry of the Stiefel manifold St(p, n) = { Y in R^{n x p} : Y^T Y = I_p }.

#include "jdnewton/matvec.hpp"

namespace jdn {

enum class Metric { Induced, Canonical };

const char* to_string(Metric metric);
Metric metric_from_string(const std::string& name);

/// Q factor of the thin QR decomposition with the R diagonal made strictly
/// positive. Throws RankDeficient if min |R_ii| < 1e-12 * ||W||_F.
Matrix qf(const Matrix& W);

/// ||Y^T Y - I_p||_F.
double orthogonality_defect(const Matrix& Y);

/// An n x p matrix with orthonormal columns. Inputs with a defect in
/// (1e-10, 1e-6] are re-orthonormalized through qf; larger defects throw.
class StiefelPoint {
 public:
  explicit StiefelPoint(Matrix Y);

  const Matrix& matrix() const { return Y_; }
  Index n() const { return Y_.rows(); }
  Index p() const { return Y_.cols(); }
  /// p(p-1)/2 + p(n-p)
  Index manifold_dim() const { return skew_dim(p()) + p() * (n() - p()); }

  /// First p columns of I_n.
  static StiefelPoint identity(Index n, Index p);

 private:
  Matrix Y_;
};

/// Orthonormal basis of the complement of span(Y); n x (n-p), empty when p = n.
struct OrthoComplement {
  Matrix Yperp;
};

/// Greedy column selection from X = I_n - Y Y^T followed by qf of the kept
/// columns. Throws NumericalBreakdown if fewer than n - p columns pass the
/// independence test.
OrthoComplement compute_perp(const StiefelPoint& Y);

/// A point together with the complement basis computed at it. All coordinate
/// maps go through a Frame so Y and Y_perp can never come from different points.
class Frame {
 public:
  explicit Frame(StiefelPoint Y);
  Frame(StiefelPoint Y, OrthoComplement perp);

  const StiefelPoint& point() const { return Y_; }
  const Matrix& Y() const { return Y_.matrix(); }
  const Matrix& Yperp() const { return perp_.Yperp; }
  Index n() const { return Y_.n(); }
  Index p() const { return Y_.p(); }

 private:
  StiefelPoint Y_;
  OrthoComplement perp_;
};

/// An n x p tangent vector anchored at a point. Construction checks
/// ||xi^T Y + Y^T xi||_F <= 1e-10 * max(1, ||xi||_F) and throws NotTangent.
class TangentAmbient {
 public:
  TangentAmbient(const StiefelPoint& anchor, Matrix xi);

  const Matrix& matrix() const { return xi_; }
  const Matrix& anchor() const { return anchor_; }

 private:
  Matrix anchor_;
  Matrix xi_;
};

/// xi = Y B + Y_perp C with B skew (p x p) and C free ((n-p) x p). B is stored
/// through its strictly-lower triangle, so B + B^T = 0 holds exactly.
class TangentCoords {
 public:
  TangentCoords(Vector veck_B, Matrix C, Index p);
  static TangentCoords from_skew(const Matrix& B, Matrix C);
  static TangentCoords zero(Index n, Index p);
  /// Inverse of to_vector().
  static TangentCoords from_vector(const Vector& x, Index n, Index p);

  Index p() const { return p_; }
  Matrix B() const { return unveck(b_, p_); }
  const Vector& b() const { return b_; }
  const Matrix& C() const { return C_; }
  /// (veck(B); vec(C)), length p(p-1)/2 + p(n-p).
  Vector to_vector() const;

 private:
  Vector b_;
  Matrix C_;
  Index p_;
};

/// W - Y sym(Y^T W)
TangentAmbient project(const StiefelPoint& Y, const Matrix& W);

/// qf(Y + xi)
StiefelPoint qr_retract(const StiefelPoint& Y, const TangentAmbient& xi);

/// B = skew(Y^T xi), C = Y_perp^T xi
TangentCoords coords_from_ambient(const Frame& frame, const TangentAmbient& xi);
TangentAmbient ambient_from_coords(const Frame& frame, const TangentCoords& coords);

/// Induced: tr(xi1^T xi2). Canonical: tr(xi1^T (I - Y Y^T / 2) xi2).
double inner(const StiefelPoint& Y, const TangentAmbient& xi1, const TangentAmbient& xi2,
             Metric metric);

/// The same inner product evaluated from coordinates:
/// induced 2 veck(B1).veck(B2) + vec(C1).vec(C2), canonical without the 2.
double inner(const TangentCoords& c1, const TangentCoords& c2, Metric metric);

}  // namespace jdn
