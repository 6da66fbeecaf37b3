#pragma once

// Portable random streams. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; uniforms and normals are derived here
// (not via <random> distributions, which differ between standard libraries).

#include "jdnewton/matvec.hpp"

#include <cstdint>
#include <random>

namespace jdn {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) from the top 53 bits of one draw.
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal by the Box-Muller transform; consumes two uniforms per
  /// pair of normals.
  double normal();

  /// Entries drawn column by column.
  Matrix gaussian(Index rows, Index cols);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer applied to seed + stream; used to give each trial an
/// independent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// qf of an n x n standard Gaussian matrix.
Matrix random_orthogonal(Index n, Rng& rng);
/// qf of an n x p standard Gaussian matrix.
Matrix random_stiefel(Index n, Index p, Rng& rng);
/// (G + G^T) / 2 for a standard Gaussian G.
Matrix random_symmetric(Index n, Rng& rng);

}  // namespace jdn
