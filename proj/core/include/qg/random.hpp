#pragma once

#include "qg/pseudo_linalg.hpp"

#include <cstdint>
#include <random>

namespace qg {

// SplitMix64 stream. Each split() hands out an independent child seed, so
// suites can derive per-element generators from one recorded seed.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  std::mt19937_64 split() { return std::mt19937_64(next()); }

 private:
  std::uint64_t state_;
};

// Random element of the isometry group of `space`: a product of plane
// rotations and boosts (rapidity at most max_boost) in an orthonormal basis,
// conjugated back to the space's own basis.
Mat6 random_isometry(const PseudoSpace& space, std::mt19937_64& rng, double max_boost = 0.5, int planes = 15);

// Random A with det A = 1, within roughly `spread` of the identity.
Mat4r random_sl4(std::mt19937_64& rng, double spread = 0.3);

}  // namespace qg
