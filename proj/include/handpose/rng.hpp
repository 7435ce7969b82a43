#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Core>

namespace handpose::rng {

// Generator identifier recorded in report headers. Bump the version suffix if
// the sampling algorithm changes, so archived reports stay attributable.
inline constexpr std::string_view kAlgorithm = "mt19937_64/marsaglia-polar-v1";

// splitmix64-style mixing used to derive independent substream seeds.
std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// Seeded random stream. Uniform and normal draws are defined explicitly on
// top of the raw mt19937_64 output, so sequences do not depend on the
// standard library's unspecified distribution internals.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : gen_(seed) {}

  static Stream substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return Stream(mix(seed, a, b));
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01();

  // Standard normal via the Marsaglia polar method.
  double normal();

  Eigen::VectorXd normal_vector(Eigen::Index size);

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace handpose::rng
