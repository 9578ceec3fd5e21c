#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>
#include <cstdint>
#include <random>

namespace catmanip {

// splitmix64 finalizer; used to derive stream seeds so that (master, index)
// pairs land far apart even for small consecutive inputs.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for run `index` of a batch started from `master`. Each run gets its
// own stream; run results are reproducible independent of execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x9e3779b97f4a7c15ULL));
}

// Deterministic random source. The engine sequence is fixed by the standard
// (mt19937_64); the distributions are implemented here so draws are bit-exact
// across platforms and library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random mantissa bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi] inclusive, by rejection (unbiased).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(engine_());  // full range
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return lo + static_cast<std::int64_t>(draw % span);
  }

  // Standard normal via Box-Muller; one fresh pair of uniforms per call so a
  // draw never depends on cached state.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  Eigen::Vector3d normal3(double sigma) {
    const double x = normal(), y = normal(), z = normal();
    return Eigen::Vector3d(sigma * x, sigma * y, sigma * z);
  }

  Eigen::Vector3d unit_vector() {
    for (;;) {
      const Eigen::Vector3d v = normal3(1.0);
      const double n = v.norm();
      if (n > 1e-12) return v / n;
    }
  }

  // Uniform rotation on SO(3) (Shoemake's subgroup algorithm).
  Eigen::Quaterniond random_rotation() {
    const double u1 = uniform(), u2 = uniform(), u3 = uniform();
    const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
    return Eigen::Quaterniond(a * std::sin(2.0 * M_PI * u2),
                              a * std::cos(2.0 * M_PI * u2),
                              b * std::sin(2.0 * M_PI * u3),
                              b * std::cos(2.0 * M_PI * u3));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace catmanip
