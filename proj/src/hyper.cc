// Apache License, Version 2.0, refer to LICENSE.txt

#include "nggp/hyper.hh"

#include <algorithm>
#include <cmath>

namespace nggp {

bool update_u(AuxiliaryU& u, const PartitionShape& shape, const NggpParams& p,
              Rng& rng) {
  double v = u.log_u;
  double proposal = v + kLogUProposalSd * rng.normal();
  double log_ratio = log_cond_density_v(proposal, shape, p) -
                     log_cond_density_v(v, shape, p);
  if (std::log(rng.uniform()) < log_ratio) {
    u.log_u = proposal;
    return true;
  }
  return false;
}

void update_a(NggpParams& p, const PartitionShape& shape, AuxiliaryU u,
              const HyperPrior& prior, Rng& rng) {
  double k = static_cast<double>(shape.num_clusters());
  double rate = prior.a_rate + psi_over_a(u.value(), p.sigma, p.tau);
  p.a = std::max(rng.gamma(prior.a_shape + k, rate), 1e-300);
}

bool update_tau(NggpParams& p, const PartitionShape& shape, AuxiliaryU u,
                const HyperPrior& prior, Rng& rng) {
  double uu = u.value();
  double current = std::log(p.tau);
  double proposal = current + kLogTauProposalSd * rng.normal();
  double log_ratio =
      log_cond_density_log_tau(proposal, shape, uu, p.a, p.sigma,
                               prior.tau_shape, prior.tau_rate) -
      log_cond_density_log_tau(current, shape, uu, p.a, p.sigma,
                               prior.tau_shape, prior.tau_rate);
  if (std::log(rng.uniform()) < log_ratio) {
    p.tau = std::exp(proposal);
    return true;
  }
  return false;
}

void update_sigma(NggpParams& p, const PartitionShape& shape, AuxiliaryU u,
                  const HyperPrior& prior, Rng& rng) {
  double uu = u.value();
  auto logf = [&](double s) {
    return log_cond_density_sigma(s, shape, uu, p.a, p.tau, prior.sigma_alpha,
                                  prior.sigma_beta);
  };
  double x = p.sigma;
  double level = logf(x) + std::log(rng.uniform());
  double lo = x - kSigmaSliceWidth * rng.uniform();
  double hi = lo + kSigmaSliceWidth;
  while (lo > 0.0 && logf(lo) > level) lo -= kSigmaSliceWidth;
  while (hi < 1.0 && logf(hi) > level) hi += kSigmaSliceWidth;
  lo = std::max(lo, 0.0);
  hi = std::min(hi, 1.0);
  for (;;) {
    double candidate = lo + (hi - lo) * rng.uniform();
    if (candidate > 0.0 && candidate < 1.0 && logf(candidate) > level) {
      p.sigma = candidate;
      return;
    }
    if (candidate < x) lo = candidate; else hi = candidate;
  }
}

void update_hyperparameters(NggpParams& p, AuxiliaryU& u,
                            const PartitionShape& shape,
                            const HyperPrior& prior, bool with_u, Rng& rng) {
  if (with_u) update_u(u, shape, p, rng);
  if (prior.infer_a) update_a(p, shape, u, prior, rng);
  if (prior.infer_sigma) update_sigma(p, shape, u, prior, rng);
  if (prior.infer_tau) update_tau(p, shape, u, prior, rng);
}

void sample_hyperprior(NggpParams& p, const HyperPrior& prior, Rng& rng) {
  if (prior.infer_a) p.a = std::max(rng.gamma(prior.a_shape, prior.a_rate), 1e-300);
  if (prior.infer_sigma) {
    double s;
    do {
      s = rng.beta(prior.sigma_alpha, prior.sigma_beta);
    } while (!(s > 0.0 && s < 1.0));
    p.sigma = s;
  }
  if (prior.infer_tau) p.tau = rng.gamma(prior.tau_shape, prior.tau_rate);
}

}  // namespace nggp
