#pragma once

// Reproducible uniform draws. std::uniform_real_distribution is
// implementation-defined, so doubles are formed directly from the top 53 bits
// of std::mt19937_64, which the standard fully specifies.

#include <cstdint>
#include <random>

#include "adaptobs/matrix.hpp"

namespace adaptobs {

class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  Vector uniform_vector(std::size_t n, double scale = 1.0) {
    Vector v(n);
    for (double& x : v) x = scale * uniform();
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace adaptobs
