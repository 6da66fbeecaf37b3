#include "jdnewton/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace jdn {

using nlohmann::json;

const char* to_string(Family f) {
  switch (f) {
    case Family::RandomSymmetric: return "random-symmetric";
    case Family::CommutingConstructed: return "commuting";
    case Family::PerturbedOptimum: return "perturbed-optimum";
    case Family::JacobiThenNewton: return "jacobi-newton";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  for (Family f : {Family::RandomSymmetric, Family::CommutingConstructed,
                   Family::PerturbedOptimum, Family::JacobiThenNewton}) {
    if (name == to_string(f)) return f;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown experiment family '" + name + "'");
}

void ExperimentSpec::validate() const {
  if (!(1 <= p && p <= n)) throw Error(ErrorCode::InvalidArgument, "need 1 <= p <= n");
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "need N >= 1");
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "need trials >= 1");
  if (!(perturbation_scale > 0)) throw Error(ErrorCode::InvalidArgument, "perturbation must be positive");
}

json ExperimentSpec::to_json() const {
  return {{"family", to_string(family)}, {"n", n},       {"p", p},
          {"N", N},                      {"seed", seed}, {"trials", trials},
          {"perturbation_scale", perturbation_scale}};
}

SymmetricSet make_random_symmetric_set(Index n, Index N, Rng& rng) {
  std::vector<Matrix> A;
  for (Index l = 0; l < N; ++l) A.push_back(random_symmetric(n, rng));
  return SymmetricSet(std::move(A));
}

ConstructedInstance make_commuting_set(Index n, Index N, Rng& rng) {
  std::vector<Vector> lambdas;
  for (Index l = 0; l < N; ++l) {
    Vector d(n);
    for (Index i = 0; i < n; ++i) d(i) = rng.normal();
    lambdas.push_back(std::move(d));
  }
  Matrix P = random_orthogonal(n, rng);
  std::vector<Matrix> A;
  for (const auto& d : lambdas) A.push_back(P * d.asDiagonal() * P.transpose());
  for (auto& M : A) M = sym(M);
  return {SymmetricSet(std::move(A)), std::move(P)};
}

PerturbedInstance make_perturbed_optimum(Index n, Index p, Index N, double scale, Rng& rng) {
  std::vector<Vector> lambdas;
  for (Index l = 0; l < N; ++l) {
    Vector d(n);
    for (Index i = 0; i < n; ++i) d(i) = 1.0 - rng.uniform();  // (0, 1]
    std::sort(d.begin(), d.end(), std::greater<>());
    lambdas.push_back(std::move(d));
  }
  const Matrix P = random_orthogonal(n, rng);
  Matrix Yrand(n, p);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < n; ++i) Yrand(i, j) = rng.uniform(-scale, scale);
  }
  std::vector<Matrix> A;
  for (const auto& d : lambdas) A.push_back(sym(P * d.asDiagonal() * P.transpose()));
  const Matrix Yopt = P.leftCols(p);
  return {SymmetricSet(std::move(A)), StiefelPoint(Yopt), StiefelPoint(qf(Yopt + Yrand))};
}

double gradient_noise_floor(const SymmetricSet& A) {
  return 1e-12 * std::max(1.0, A.frobenius_sum());
}

double convergence_order(const std::vector<double>& e, double floor) {
  if (e.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k + 1 < e.size(); ++k) {
    if (e[k] < e[0] && e[k + 1] > floor && e[k] > 0) {
      pts.emplace_back(std::log(e[k]), std::log(e[k + 1]));
    }
  }
  if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0, sxx = 0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxx > 0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

namespace {

std::vector<double> grad_norms(const SolveTrace& t) {
  std::vector<double> e;
  for (const auto& r : t.records) e.push_back(r.grad_norm);
  return e;
}

json newton_config_json(const NewtonConfig& cfg, const SymmetricSet& A) {
  return {{"max_iters", cfg.max_iters},
          {"grad_tol", cfg.resolved_grad_tol(A)},
          {"singular_rtol", cfg.singular_rtol},
          {"metric", to_string(cfg.metric)}};
}

JDResult run_newton(const SymmetricSet& A, const StiefelPoint& Y0, const NewtonConfig& cfg) {
  if (Y0.p() == Y0.n() && cfg.metric == Metric::Induced) return solve_orthogonal(A, Y0, cfg);
  return solve(A, Y0, cfg);
}

}  // namespace

TrialOutcome run_trial(const ExperimentSpec& spec, int trial, const NewtonConfig& newton,
                       const JacobiConfig& jacobi) {
  spec.validate();
  const std::uint64_t seed = derive_seed(spec.seed, static_cast<std::uint64_t>(trial));
  Rng rng(seed);
  json metrics = {{"trial", trial}, {"seed", seed}};
  json config = spec.to_json();
  config["trial"] = trial;

  auto finish = [&](const SymmetricSet& A, const JDResult& res) {
    config["newton"] = newton_config_json(newton, A);
    metrics["termination"] = to_string(res.trace.termination);
    metrics["iterations"] = res.trace.iterations();
    metrics["final_grad_norm"] = res.trace.records.back().grad_norm;
    metrics["convergence_order"] = convergence_order(grad_norms(res.trace), gradient_noise_floor(A));
    return TrialOutcome{make_trace(res.trace, config, metrics), metrics};
  };

  switch (spec.family) {
    case Family::PerturbedOptimum: {
      const PerturbedInstance inst =
          make_perturbed_optimum(spec.n, spec.p, spec.N, spec.perturbation_scale, rng);
      const JDResult res = run_newton(inst.A, inst.Y_app, newton);
      const double fopt = objective(inst.A, inst.Y_opt);
      json gap = json::array();
      for (const auto& r : res.trace.records) gap.push_back(r.f - fopt);
      metrics["f_opt"] = fopt;
      metrics["f_gap"] = std::move(gap);
      return finish(inst.A, res);
    }
    case Family::JacobiThenNewton: {
      const SymmetricSet A = make_random_symmetric_set(spec.n, spec.N, rng);
      const JacobiResult jac = jacobi_diagonalize(A, jacobi);
      const StiefelPoint YJ = spec.p == spec.n ? jac.Y : truncate_columns(A, jac.Y, spec.p);
      const JDResult res = run_newton(A, YJ, newton);
      const double fJ = objective(A, YJ), fN = objective(A, res.Y);
      const double gJ = gradient_norm(A, YJ), gN = gradient_norm(A, res.Y);
      const double oJ = orthogonality_defect(YJ.matrix()), oN = orthogonality_defect(res.Y.matrix());
      config["jacobi"] = {{"sweep_tol", jacobi.sweep_tol}, {"max_sweeps", jacobi.max_sweeps}};
      metrics["jacobi_sweeps"] = jac.sweeps;
      metrics["f_jacobi"] = fJ;
      metrics["f_newton"] = fN;
      metrics["f_diff"] = fJ - fN;
      metrics["grad_jacobi"] = gJ;
      metrics["grad_newton"] = gN;
      metrics["grad_diff"] = gJ - gN;
      metrics["orth_jacobi"] = oJ;
      metrics["orth_newton"] = oN;
      metrics["orth_diff"] = oJ - oN;
      return finish(A, res);
    }
    case Family::CommutingConstructed: {
      const ConstructedInstance inst = make_commuting_set(spec.n, spec.N, rng);
      const JacobiResult jac = jacobi_diagonalize(inst.A, jacobi);
      const StiefelPoint Y0 = spec.p == spec.n ? jac.Y : truncate_columns(inst.A, jac.Y, spec.p);
      const JDResult res = run_newton(inst.A, Y0, newton);
      config["jacobi"] = {{"sweep_tol", jacobi.sweep_tol}, {"max_sweeps", jacobi.max_sweeps}};
      metrics["jacobi_sweeps"] = jac.sweeps;
      metrics["off_norm_sq"] = off_norm_sq(inst.A, res.Y.matrix());
      return finish(inst.A, res);
    }
    case Family::RandomSymmetric: {
      const SymmetricSet A = make_random_symmetric_set(spec.n, spec.N, rng);
      const StiefelPoint Y0(random_stiefel(spec.n, spec.p, rng));
      const JDResult res = run_newton(A, Y0, newton);
      metrics["f_initial"] = res.trace.records.front().f;
      metrics["f_final"] = res.trace.records.back().f;
      return finish(A, res);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unhandled family");
}

}  // namespace jdn
