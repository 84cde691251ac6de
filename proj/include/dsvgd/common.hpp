#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace dsvgd {

// Particle/sample matrices are row-major in meaning: one particle per row.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Named substreams so that reruns with one seed reproduce every draw and
// unscheduled components never advance a shared generator.
enum class Stream : std::uint64_t {
  init = 1,
  batch = 2,
  noise = 3,
  split = 4,
  partition = 5,
  synth = 6,
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  static Rng derive(std::uint64_t seed, Stream stream, std::uint64_t lane = 0) {
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ static_cast<std::uint64_t>(stream));
    s = splitmix64(s ^ lane);
    return Rng(s);
  }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform_(engine_);
  }

  // Shape/rate parametrization, mean = shape / rate.
  double gamma(double shape, double rate) {
    std::gamma_distribution<double> dist(shape, 1.0 / rate);
    return dist(engine_);
  }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
    return dist(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace dsvgd
