// Apache License, Version 2.0, refer to LICENSE.txt

// Closed-form calculus of the generalized Gamma completely random measure
// with Levy density a / Gamma(1 - sigma) * s^(-1 - sigma) * exp(-tau * s):
// Laplace exponent, tilted moments, the joint law of (partition, U), the
// conditional predictive weights and the log conditionals used by the
// hyperparameter updates. sigma == 0 is the Dirichlet process (Gamma CRM)
// and is routed to its own closed forms.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nggp {

struct NggpParams {
  double a = 1.0;
  double sigma = 0.0;
  double tau = 1.0;

  NggpParams() = default;
  // Throws std::invalid_argument unless a > 0, 0 <= sigma < 1 and tau > 0.
  NggpParams(double a, double sigma, double tau);

  bool is_dp() const { return sigma == 0.0; }
};

// V = log U, kept in the log domain so U = exp(v) > 0 always.
struct AuxiliaryU {
  double log_u = 0.0;
  double value() const;
};

struct PartitionShape {
  std::size_t n = 0;
  std::vector<std::size_t> sizes;

  PartitionShape() = default;
  // Throws std::invalid_argument if a size is zero; n is the sum of sizes.
  explicit PartitionShape(std::vector<std::size_t> cluster_sizes);

  std::size_t num_clusters() const { return sizes.size(); }
};

struct PredictiveWeights {
  double new_cluster = 0.0;
  std::vector<double> per_cluster;

  double total() const;
  // Returns a copy scaled to sum to one.
  PredictiveWeights normalized() const;
};

double psi(double u, const NggpParams& p);

double log_kappa(std::size_t m, double u, const NggpParams& p);

// Unnormalized weights a (U + tau)^sigma for a new cluster and |c| - sigma
// for each existing cluster.
PredictiveWeights predictive_weights(const PartitionShape& shape,
                                     AuxiliaryU u, const NggpParams& p);

// log of Gamma(1 - sigma)^-|pi| * prod_c Gamma(|c| - sigma); logGamma(|c|)
// summed over clusters for the DP.
double log_cluster_factor(const PartitionShape& shape, double sigma);

// Log density of (partition = shape, U = u) with respect to du.
double log_joint_partition_u(const PartitionShape& shape, double u,
                             const NggpParams& p);

// Unnormalized log density of V = log U given the partition.
double log_cond_density_v(double v, const PartitionShape& shape,
                          const NggpParams& p);

// Unnormalized log conditional of sigma in (0, 1) given (a, tau, U, pi)
// under a Beta(alpha, beta) prior.
double log_cond_density_sigma(double sigma, const PartitionShape& shape,
                              double u, double a, double tau,
                              double prior_alpha, double prior_beta);

// Unnormalized log conditional of log(tau) given (a, sigma, U, pi) under a
// Gamma(shape, rate) prior on tau, including the log-domain Jacobian.
double log_cond_density_log_tau(double log_tau, const PartitionShape& shape,
                                double u, double a, double sigma,
                                double prior_shape, double prior_rate);

// Dirichlet process EPPF Gamma(a) a^k / Gamma(a + n) prod_c Gamma(|c|),
// in log space.
double log_dp_eppf(const PartitionShape& shape, double a);
double dp_eppf(const PartitionShape& shape, double a);

// ((u + tau)^sigma - tau^sigma) / sigma, the a-free part of psi; log(1 +
// u/tau) for sigma == 0. Accurate for sigma close to zero.
double psi_over_a(double u, double sigma, double tau);

}  // namespace nggp
