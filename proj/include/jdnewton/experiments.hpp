#pragma once

// Instance generators and trial runners for the benchmark families.
//
// Random draws consume one Rng stream per trial, seeded with
// derive_seed(spec.seed, trial), in this order:
//   RandomSymmetric      N symmetric matrices, then a random n x p start
//   CommutingConstructed N diagonals (n normals each), then P
//   PerturbedOptimum     N diagonals (n uniforms each, sorted descending),
//                        then P, then Y_rand (n x p uniforms in (-s, s))
//   JacobiThenNewton     N symmetric matrices
// A symmetric matrix is (G + G^T) / 2 with G standard Gaussian drawn column
// by column; P is qf of an n x n standard Gaussian.

#include "jdnewton/jacobi.hpp"
#include "jdnewton/newton.hpp"
#include "jdnewton/random.hpp"
#include "jdnewton/trace.hpp"

#include <cstdint>
#include <string>

namespace jdn {

enum class Family { RandomSymmetric, CommutingConstructed, PerturbedOptimum, JacobiThenNewton };

const char* to_string(Family f);
Family family_from_string(const std::string& name);

struct ExperimentSpec {
  Family family = Family::PerturbedOptimum;
  Index n = 50;
  Index p = 30;
  Index N = 10;
  std::uint64_t seed = 1;
  int trials = 50;
  double perturbation_scale = 0.01;

  void validate() const;
  nlohmann::json to_json() const;
};

SymmetricSet make_random_symmetric_set(Index n, Index N, Rng& rng);

struct ConstructedInstance {
  SymmetricSet A;
  /// The orthogonal P with A_l = P Lambda_l P^T.
  Matrix P;
};

/// A_l = P Lambda_l P^T with Gaussian diagonal Lambda_l.
ConstructedInstance make_commuting_set(Index n, Index N, Rng& rng);

struct PerturbedInstance {
  SymmetricSet A;
  StiefelPoint Y_opt;
  StiefelPoint Y_app;
};

/// Lambda_l positive with descending diagonal, A_l = P Lambda_l P^T,
/// Y_opt = P I_{n,p}, Y_app = qf(Y_opt + Y_rand) with |Y_rand| < scale.
PerturbedInstance make_perturbed_optimum(Index n, Index p, Index N, double scale, Rng& rng);

struct TrialOutcome {
  TraceFile trace;
  /// Flat per-trial metrics (also stored in trace.summary).
  nlohmann::json metrics;
};

TrialOutcome run_trial(const ExperimentSpec& spec, int trial, const NewtonConfig& newton,
                       const JacobiConfig& jacobi);

/// Least-squares slope of log e_{k+1} against log e_k over consecutive pairs
/// where e_k < e_0 and e_{k+1} > floor. NaN when fewer than two pairs qualify.
double convergence_order(const std::vector<double>& e, double floor);

/// Gradient norms at or below this are treated as rounding noise when fitting
/// convergence orders: 1e-12 * max(1, sum_l ||A_l||_F).
double gradient_noise_floor(const SymmetricSet& A);

}  // namespace jdn
