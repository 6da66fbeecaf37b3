#include "jdnewton/newton.hpp"

#include <cmath>
#include <sstream>

namespace jdn {

void NewtonConfig::validate() const {
  if (max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
  if (grad_tol && !(*grad_tol > 0)) {
    throw Error(ErrorCode::InvalidArgument, "grad_tol must be positive");
  }
  if (!(singular_rtol > 0)) throw Error(ErrorCode::InvalidArgument, "singular_rtol must be positive");
}

double NewtonConfig::resolved_grad_tol(const SymmetricSet& A) const {
  return grad_tol ? *grad_tol : 1e-12 * std::max(1.0, A.frobenius_sum());
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "Converged";
    case Termination::MaxIters: return "MaxIters";
    case Termination::SingularHessian: return "SingularHessian";
  }
  return "Unknown";
}

double gradient_norm(const SymmetricSet& A, const StiefelPoint& Y) {
  return riemannian_gradient(A, Y, Metric::Induced).matrix().norm();
}

Vector solve_reduced_system(const Matrix& H, const Vector& rhs, double rtol) {
  if (H.rows() == 0) return Vector(0);
  Eigen::PartialPivLU<Matrix> lu(H);
  const Vector pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double largest = pivots.maxCoeff();
  const double ratio = largest > 0 ? pivots.minCoeff() / largest : 0.0;
  if (!(ratio >= rtol)) {
    std::ostringstream msg;
    msg << "reduced Hessian pivot ratio " << ratio << " below " << rtol;
    throw SingularHessianError(msg.str(), ratio);
  }
  return lu.solve(rhs);
}

namespace {

double induced_norm(const TangentCoords& g) {
  return std::sqrt(2.0 * g.b().squaredNorm() + g.C().squaredNorm());
}

struct StepParts {
  TangentCoords step;
  double grad_norm;
};

StepParts reduced_newton_step(const CompressedData& data, const NewtonConfig& cfg) {
  const TangentCoords g_induced = gradient_coords(data, Metric::Induced);
  const double gnorm = induced_norm(g_induced);
  const TangentCoords g =
      cfg.metric == Metric::Induced ? g_induced : gradient_coords(data, cfg.metric);
  const HessianRep H = hessian_matrix(data, cfg.metric);
  const Vector x = solve_reduced_system(H.full(), -g.to_vector(), cfg.singular_rtol);
  return {TangentCoords::from_vector(x, data.n, data.p), gnorm};
}

}  // namespace

NewtonStep newton_step(const SymmetricSet& A, const StiefelPoint& Y, const NewtonConfig& cfg) {
  cfg.validate();
  const Frame frame(Y);
  const CompressedData data = compress(A, frame);
  StepParts parts = reduced_newton_step(data, cfg);
  const TangentAmbient xi = ambient_from_coords(frame, parts.step);
  return {qr_retract(Y, xi), std::move(parts.step), parts.grad_norm};
}

JDResult solve(const SymmetricSet& A, const StiefelPoint& Y0, const NewtonConfig& cfg) {
  cfg.validate();
  const double tol = cfg.resolved_grad_tol(A);
  StiefelPoint Y = Y0;
  SolveTrace trace;
  double last_step = 0.0;
  for (int k = 0;; ++k) {
    const Frame frame(Y);
    const CompressedData data = compress(A, frame);
    const double gnorm = induced_norm(gradient_coords(data, Metric::Induced));
    trace.records.push_back({k, objective(A, Y), gnorm, last_step,
                             orthogonality_defect(Y.matrix())});
    if (cfg.record_iterates) trace.iterates.push_back(Y.matrix());
    if (gnorm <= tol) {
      trace.termination = Termination::Converged;
      break;
    }
    if (k >= cfg.max_iters) {
      trace.termination = Termination::MaxIters;
      break;
    }
    try {
      const StepParts parts = reduced_newton_step(data, cfg);
      const TangentAmbient xi = ambient_from_coords(frame, parts.step);
      last_step = xi.matrix().norm();
      Y = qr_retract(Y, xi);
    } catch (const SingularHessianError&) {
      trace.termination = Termination::SingularHessian;
      break;
    }
  }
  return {std::move(Y), std::move(trace)};
}

JDResult solve_orthogonal(const SymmetricSet& A, const StiefelPoint& Y0, const NewtonConfig& cfg) {
  cfg.validate();
  if (Y0.p() != Y0.n()) {
    throw Error(ErrorCode::ShapeMismatch, "solve_orthogonal requires a square starting point");
  }
  if (cfg.metric != Metric::Induced) {
    throw Error(ErrorCode::InvalidArgument, "solve_orthogonal uses the induced metric only");
  }
  const double tol = cfg.resolved_grad_tol(A);
  StiefelPoint Y = Y0;
  SolveTrace trace;
  double last_step = 0.0;
  for (int k = 0;; ++k) {
    const Matrix& y = Y.matrix();
    std::vector<Matrix> Z;
    Matrix grad = Matrix::Zero(y.rows(), y.cols());
    for (const auto& Al : A.matrices()) {
      const Matrix AY = Al * y;
      Z.push_back(sym(y.transpose() * AY));
      const Matrix d = diag_part(Z.back());
      grad -= 4.0 * (AY * d - y * sym(Z.back() * d));
    }
    const double gnorm = grad.norm();
    trace.records.push_back({k, objective(A, y), gnorm, last_step, orthogonality_defect(y)});
    if (cfg.record_iterates) trace.iterates.push_back(y);
    if (gnorm <= tol) {
      trace.termination = Termination::Converged;
      break;
    }
    if (k >= cfg.max_iters) {
      trace.termination = Termination::MaxIters;
      break;
    }
    try {
      const Matrix H = orthogonal_hessian_matrix(Z);
      const Vector b =
          solve_reduced_system(H, -veck(skew(y.transpose() * grad)), cfg.singular_rtol);
      const Matrix xi = y * unveck(b, y.cols());
      last_step = xi.norm();
      Y = qr_retract(Y, TangentAmbient(Y, xi));
    } catch (const SingularHessianError&) {
      trace.termination = Termination::SingularHessian;
      break;
    }
  }
  return {std::move(Y), std::move(trace)};
}

}  // namespace jdn
