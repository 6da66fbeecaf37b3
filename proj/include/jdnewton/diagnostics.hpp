#pragma once

// Self-checks runnable from the command line: finite-difference derivative
// checks, Hessian assembly cross-checks and structural identities on a random
// instance.

#include "jdnewton/jdcore.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace jdn {

struct CheckResult {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Point on the geodesic of the given metric with Y(0) = Y, Y'(0) = xi.
Matrix stiefel_geodesic(const Matrix& Y, const Matrix& xi, double t, Metric metric);

/// Random instance with N Gaussian symmetric matrices and a random Y in
/// St(p, n); requires n <= 12.
std::vector<CheckResult> run_checks(Index n, Index p, Index N, std::uint64_t seed);

}  // namespace jdn
