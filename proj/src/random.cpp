#include "jdnewton/random.hpp"

#include "jdnewton/stiefel.hpp"

#include <cmath>
#include <numbers>

namespace jdn {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

Matrix Rng::gaussian(Index rows, Index cols) {
  Matrix G(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) G(i, j) = normal();
  return G;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Matrix random_orthogonal(Index n, Rng& rng) { return qf(rng.gaussian(n, n)); }

Matrix random_stiefel(Index n, Index p, Rng& rng) { return qf(rng.gaussian(n, p)); }

Matrix random_symmetric(Index n, Rng& rng) { return sym(rng.gaussian(n, n)); }

}  // namespace jdn
