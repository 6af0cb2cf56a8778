// Apache License, Version 2.0, refer to LICENSE.txt

// Simulation of the jumps of the exponentially tilted generalized Gamma
// CRM, with Levy density
//
//   v'(s) = A s^(-1 - sigma) exp(-lambda s),  A = a / Gamma(1 - sigma),
//   lambda = tau + U,
//
// by adaptive thinning: from the current point t the dominating intensity
// w_t(s) = A t^(-1 - sigma) exp(-lambda s) has a closed-form cumulative
// W_t(s) and inverse, so jumps are produced in increasing order of mass.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nggp/levy.hh"
#include "nggp/rng.hh"

namespace nggp {

inline constexpr double kMinAtomMass = 1e-8;
inline constexpr std::size_t kMaxAtoms = 1'000'000;

// Tilted Levy density v'(s) (U enters only through lambda = tau + U).
double levy_density(double s, double u, const NggpParams& p);

// Dominating intensity w_t(s) for s >= t.
double thinning_bound(double t, double s, double u, const NggpParams& p);

// log W_t(infinity), the total mass of w_t on [t, infinity).
double log_thinning_bound_total(double t, double u, const NggpParams& p);

// W_t(s) = int_t^s w_t and its inverse W_t^{-1}(r) for 0 <= r < W_t(inf).
double thinning_cumulative(double t, double s, double u, const NggpParams& p);
double thinning_inverse(double t, double r, double u, const NggpParams& p);

struct ThinningResult {
  std::vector<double> masses;  // increasing
  std::size_t candidates = 0;
  bool capped = false;         // more than `cap` jumps were generated
};

// A Poisson process with intensity v' on [S, infinity). When more than
// `cap` jumps are produced only the largest `cap` are kept.
ThinningResult adaptive_thinning(double S, AuxiliaryU u, const NggpParams& p,
                                 Rng& rng, std::size_t cap = kMaxAtoms);

// Expected number of jumps above S, A lambda^sigma Gamma(-sigma, lambda S)
// (a E1(lambda S) for the DP), from incomplete gamma functions.
double expected_jumps_above(double S, double u, const NggpParams& p);

// Expected total mass of jumps below S, A lambda^(sigma-1)
// gamma(1 - sigma, lambda S).
double expected_mass_below(double S, double u, const NggpParams& p);

// ---------------------------------------------------------------------------
// Partitions under the prior (U = 0).

struct PriorSimOptions {
  double neglected_fraction = 1e-6;
  // Expected number of explicit jumps allowed before the threshold is
  // raised; the mass below the threshold is treated as dust.
  double max_expected_atoms = 2e5;
};

struct PriorSimResult {
  // Number of clusters after the first ns[j] observations.
  std::vector<std::size_t> num_clusters;
  // Cluster sizes of the full sample.
  PartitionShape shape;
  double threshold = 0.0;
  bool threshold_raised = false;
};

// Draws a truncated CRM above a threshold S at which the neglected mass
// fraction is below opts.neglected_fraction, normalizes it and assigns
// max(ns) observations; counts are reported at every prefix length in ns.
// If S would require more than opts.max_expected_atoms jumps it is raised
// and `threshold_raised` is set. The expected mass below S is kept as a
// continuum of infinitesimal atoms ("dust"): an observation landing on it
// opens a new singleton cluster.
PriorSimResult prior_partition_counts(std::span<const std::size_t> ns,
                                      const NggpParams& p, Rng& rng,
                                      const PriorSimOptions& opts = {});

PartitionShape prior_partition_simulate(std::size_t n, const NggpParams& p,
                                        Rng& rng,
                                        const PriorSimOptions& opts = {});

}  // namespace nggp
