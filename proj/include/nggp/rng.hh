// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace nggp {

// 64-bit Mersenne twister with explicit stream splitting.
//
// Stream k of seed s is seeded through std::seed_seq over the four 32-bit
// words (lo(s), hi(s), lo(k), hi(k)), so distinct (seed, stream) pairs give
// decorrelated engines. Chains running side by side take distinct streams of
// the same seed; a chain never shares its generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  Rng split(std::uint64_t stream) {
    return Rng(engine_(), stream);
  }

  std::mt19937_64& engine() { return engine_; }

  // Uniform on the open interval (0, 1).
  double uniform() {
    double u;
    do {
      u = std::generate_canonical<double, 53>(engine_);
    } while (u <= 0.0);
    return u;
  }

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  double exponential() { return -std::log(uniform()); }

  // Gamma with shape and rate.
  double gamma(double shape, double rate) {
    return std::gamma_distribution<double>(shape, 1.0)(engine_) / rate;
  }

  double beta(double alpha, double beta) {
    double x = gamma(alpha, 1.0);
    double y = gamma(beta, 1.0);
    return x / (x + y);
  }

  double chi_squared(double dof) { return gamma(0.5 * dof, 0.5); }

  std::size_t uniform_index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  // Draws an index with probability proportional to exp(log_weights[k]).
  // Weights may contain -inf entries; at least one must be finite.
  std::size_t categorical_log(std::span<const double> log_weights);

 private:
  std::mt19937_64 engine_;
};

inline std::size_t Rng::categorical_log(std::span<const double> log_weights) {
  double max_w = -INFINITY;
  for (double w : log_weights) max_w = std::max(max_w, w);
  double total = 0.0;
  for (double w : log_weights) total += std::exp(w - max_w);
  double target = uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < log_weights.size(); ++k) {
    double p = std::exp(log_weights[k] - max_w);
    if (p > 0.0) last_positive = k;
    acc += p;
    if (target < acc) return k;
  }
  return last_positive;
}

}  // namespace nggp
