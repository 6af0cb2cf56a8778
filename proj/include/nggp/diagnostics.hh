// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nggp/dataset.hh"
#include "nggp/rng.hh"
#include "nggp/samplers.hh"

namespace nggp {

double sample_mean(std::span<const double> x);
// Unbiased sample variance; 0 for fewer than two values.
double sample_variance(std::span<const double> x);

// Effective sample size N / (1 + 2 sum_k rho_k), with the autocorrelation
// sum truncated by Geyer's initial positive sequence rule and the result
// clipped to [1, N]. A constant series returns N. Throws
// std::invalid_argument for fewer than 10 values.
double ess(std::span<const double> x);

// Running posterior similarity matrix: entry (i, j) is the fraction of
// label vectors in which i and j share a label.
class Coclustering {
 public:
  explicit Coclustering(std::size_t n) : n_(n), counts_(n * n, 0) {}

  void add(std::span<const int> labels);
  std::size_t samples() const { return samples_; }
  std::size_t size() const { return n_; }
  // Row-major n x n matrix.
  std::vector<double> matrix() const;

 private:
  std::size_t n_;
  std::size_t samples_ = 0;
  std::vector<std::uint32_t> counts_;
};

std::vector<double> coclustering(const std::vector<std::vector<int>>& labels);

struct DensitySummary {
  std::vector<double> mean;
  std::vector<double> lower;   // 2.5% pointwise
  std::vector<double> upper;   // 97.5% pointwise
};

// Pointwise mean and empirical 2.5 / 97.5 percentiles over samples.
DensitySummary summarize_densities(const std::vector<std::vector<double>>& per_sample);

inline constexpr std::size_t kPriorPredictiveDraws = 200;
inline constexpr std::uint64_t kPriorPredictiveSeed = 0x5eed'0f'd3e5;

// Predictive density of a new observation at each grid row given the
// chain's current state:
//
//   sum_c (|c| - sigma) / Z f(y | X_c) + a (U + tau)^sigma / Z f0(y),
//   Z = n - sigma |pi| + a (U + tau)^sigma,
//
// where f0 is the prior predictive. For the collapsed sampler f(y | X_c) is
// the cluster's posterior predictive. For nonconjugate kernels f0 is
// averaged over a fixed-seed set of mu0 draws, so it is itself a density.
template <typename Kernel>
std::vector<double> predictive_density(const ChainState<Kernel>& s,
                                       SamplerKind kind, const Dataset& grid) {
  const auto& part = s.partition;
  const double n = static_cast<double>(part.num_assigned());
  const double k = static_cast<double>(part.num_clusters());
  const double w_new = s.params.is_dp()
                           ? s.params.a
                           : s.params.a * std::pow(s.u.value() + s.params.tau, s.params.sigma);
  const double z = n - s.params.sigma * k + w_new;
  const bool collapsed = kind == SamplerKind::kMarginalConjugate;

  std::vector<double> out(grid.size(), 0.0);
  for (ClusterId c : part.clusters()) {
    const auto& cl = part.cluster(c);
    double w = (static_cast<double>(cl.members.size()) - s.params.sigma) / z;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      double lf;
      if constexpr (Kernel::kConjugate) {
        lf = collapsed ? s.kernel.log_predictive(grid.row(g), cl.stats)
                       : s.kernel.log_likelihood(grid.row(g), cl.param);
      } else {
        lf = s.kernel.log_likelihood(grid.row(g), cl.param);
      }
      out[g] += w * std::exp(lf);
    }
  }

  const double w0 = w_new / z;
  if constexpr (Kernel::kConjugate) {
    typename Kernel::Stats empty(grid.dim());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      out[g] += w0 * std::exp(s.kernel.log_predictive(grid.row(g), empty));
    }
  } else {
    Rng rng(kPriorPredictiveSeed);
    const double wm = w0 / static_cast<double>(kPriorPredictiveDraws);
    for (std::size_t m = 0; m < kPriorPredictiveDraws; ++m) {
      auto comp = s.kernel.sample_prior(rng);
      for (std::size_t g = 0; g < grid.size(); ++g) {
        out[g] += wm * std::exp(s.kernel.log_likelihood(grid.row(g), comp));
      }
    }
  }
  return out;
}

}  // namespace nggp
