// Apache License, Version 2.0, refer to LICENSE.txt

// Updates of U and the NGGP hyperparameters given the partition shape only;
// component parameters, atoms and slices play no role here.

#pragma once

#include "nggp/levy.hh"
#include "nggp/rng.hh"

namespace nggp {

// a ~ Gamma(a_shape, a_rate), sigma ~ Beta(sigma_alpha, sigma_beta),
// tau ~ Gamma(tau_shape, tau_rate). Parameters whose infer flag is off stay
// at their current value.
struct HyperPrior {
  double a_shape = 1.0;
  double a_rate = 1.0;
  double sigma_alpha = 1.0;
  double sigma_beta = 2.0;
  double tau_shape = 1.0;
  double tau_rate = 1.0;
  bool infer_a = true;
  bool infer_sigma = true;
  bool infer_tau = false;
};

inline constexpr double kLogUProposalSd = 0.5;
inline constexpr double kLogTauProposalSd = 0.5;
inline constexpr double kSigmaSliceWidth = 0.1;

// One random-walk MH step on V = log U. Returns true on acceptance.
bool update_u(AuxiliaryU& u, const PartitionShape& shape, const NggpParams& p,
              Rng& rng);

// Exact Gamma draw of a.
void update_a(NggpParams& p, const PartitionShape& shape, AuxiliaryU u,
              const HyperPrior& prior, Rng& rng);

// One random-walk MH step on log tau. Returns true on acceptance.
bool update_tau(NggpParams& p, const PartitionShape& shape, AuxiliaryU u,
                const HyperPrior& prior, Rng& rng);

// One stepping-out / shrinkage slice update of sigma on (0, 1).
void update_sigma(NggpParams& p, const PartitionShape& shape, AuxiliaryU u,
                  const HyperPrior& prior, Rng& rng);

// U, then a, sigma and tau as enabled by the prior's flags.
void update_hyperparameters(NggpParams& p, AuxiliaryU& u,
                            const PartitionShape& shape,
                            const HyperPrior& prior, bool with_u, Rng& rng);

// Draws (a, sigma, tau) from the hyperprior for the inferred parameters.
void sample_hyperprior(NggpParams& p, const HyperPrior& prior, Rng& rng);

}  // namespace nggp
