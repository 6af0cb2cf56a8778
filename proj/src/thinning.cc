// Apache License, Version 2.0, refer to LICENSE.txt

#include "nggp/thinning.hh"

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace nggp {

namespace {

double log_intensity_scale(const NggpParams& p) {
  return std::log(p.a) - boost::math::lgamma(1.0 - p.sigma);
}

}  // namespace

double levy_density(double s, double u, const NggpParams& p) {
  return std::exp(log_intensity_scale(p) - (1.0 + p.sigma) * std::log(s) -
                  (p.tau + u) * s);
}

double thinning_bound(double t, double s, double u, const NggpParams& p) {
  return std::exp(log_intensity_scale(p) - (1.0 + p.sigma) * std::log(t) -
                  (p.tau + u) * s);
}

double log_thinning_bound_total(double t, double u, const NggpParams& p) {
  double lambda = p.tau + u;
  return log_intensity_scale(p) - (1.0 + p.sigma) * std::log(t) - lambda * t -
         std::log(lambda);
}

double thinning_cumulative(double t, double s, double u, const NggpParams& p) {
  double lambda = p.tau + u;
  return std::exp(log_thinning_bound_total(t, u, p)) *
         -std::expm1(-lambda * (s - t));
}

double thinning_inverse(double t, double r, double u, const NggpParams& p) {
  double lambda = p.tau + u;
  double total = std::exp(log_thinning_bound_total(t, u, p));
  return t - std::log1p(-r / total) / lambda;
}

ThinningResult adaptive_thinning(double S, AuxiliaryU u, const NggpParams& p,
                                 Rng& rng, std::size_t cap) {
  if (!(S > 0.0)) throw std::invalid_argument("adaptive_thinning: S <= 0");
  const double uu = u.value();
  const double lambda = p.tau + uu;
  const double log_scale = log_intensity_scale(p);
  ThinningResult out;
  std::deque<double> kept;
  double t = S;
  for (;;) {
    double r = rng.exponential();
    double log_total = log_scale - (1.0 + p.sigma) * std::log(t) -
                       lambda * t - std::log(lambda);
    if (std::log(r) > log_total) break;
    double next = t - std::log1p(-r * std::exp(-log_total)) / lambda;
    ++out.candidates;
    // v'(t') / w_t(t') = (t' / t)^(-1 - sigma)
    if (rng.uniform() < std::pow(next / t, -1.0 - p.sigma)) {
      kept.push_back(next);
      if (kept.size() > cap) {
        kept.pop_front();
        out.capped = true;
      }
    }
    t = next;
  }
  out.masses.assign(kept.begin(), kept.end());
  return out;
}

double expected_jumps_above(double S, double u, const NggpParams& p) {
  double lambda = p.tau + u;
  double x = lambda * S;
  if (p.is_dp()) return p.a * boost::math::expint(1, x);
  // Gamma(-s, x) = (x^-s e^-x - Gamma(1 - s, x)) / s
  double upper = (std::exp(-p.sigma * std::log(x) - x) -
                  boost::math::tgamma(1.0 - p.sigma, x)) /
                 p.sigma;
  return std::exp(log_intensity_scale(p) + p.sigma * std::log(lambda)) * upper;
}

double expected_mass_below(double S, double u, const NggpParams& p) {
  double lambda = p.tau + u;
  return std::exp(log_intensity_scale(p) + (p.sigma - 1.0) * std::log(lambda)) *
         boost::math::tgamma_lower(1.0 - p.sigma, lambda * S);
}

PriorSimResult prior_partition_counts(std::span<const std::size_t> ns,
                                      const NggpParams& p, Rng& rng,
                                      const PriorSimOptions& opts) {
  if (ns.empty() || *std::min_element(ns.begin(), ns.end()) < 1) {
    throw std::invalid_argument("prior_partition_counts: n must be >= 1");
  }
  const std::size_t n_max = *std::max_element(ns.begin(), ns.end());
  PriorSimResult out;

  // Neglected fraction of E[T] = a tau^(sigma - 1) is P(1 - sigma, tau S).
  double S = boost::math::gamma_p_inv(1.0 - p.sigma, opts.neglected_fraction) /
             p.tau;
  if (expected_jumps_above(S, 0.0, p) > opts.max_expected_atoms) {
    double lo = std::log(S), hi = lo;
    while (expected_jumps_above(std::exp(hi), 0.0, p) > opts.max_expected_atoms) {
      hi += 1.0;
    }
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      if (expected_jumps_above(std::exp(mid), 0.0, p) > opts.max_expected_atoms) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    S = std::exp(hi);
    out.threshold_raised = true;
  }
  out.threshold = S;

  ThinningResult jumps =
      adaptive_thinning(S, AuxiliaryU{-INFINITY}, p, rng, kMaxAtoms);
  const std::vector<double>& masses = jumps.masses;
  std::vector<double> cumulative(masses.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < masses.size(); ++k) {
    acc += masses[k];
    cumulative[k] = acc;
  }
  const double dust = expected_mass_below(S, 0.0, p);
  const double total = acc + dust;

  std::vector<std::size_t> sorted_ns(ns.begin(), ns.end());
  std::sort(sorted_ns.begin(), sorted_ns.end());
  std::vector<std::size_t> counts_sorted;
  std::vector<std::int64_t> cluster_of_atom(masses.size(), -1);
  std::vector<std::size_t> sizes;
  std::size_t next = 0;
  for (std::size_t i = 1; i <= n_max; ++i) {
    double x = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
    if (it == cumulative.end()) {
      sizes.push_back(1);  // dust
    } else {
      auto k = static_cast<std::size_t>(it - cumulative.begin());
      if (cluster_of_atom[k] < 0) {
        cluster_of_atom[k] = static_cast<std::int64_t>(sizes.size());
        sizes.push_back(1);
      } else {
        ++sizes[static_cast<std::size_t>(cluster_of_atom[k])];
      }
    }
    while (next < sorted_ns.size() && sorted_ns[next] == i) {
      counts_sorted.push_back(sizes.size());
      ++next;
    }
  }
  out.num_clusters.reserve(ns.size());
  for (std::size_t n : ns) {
    auto pos = std::lower_bound(sorted_ns.begin(), sorted_ns.end(), n) -
               sorted_ns.begin();
    out.num_clusters.push_back(counts_sorted[static_cast<std::size_t>(pos)]);
  }
  out.shape = PartitionShape(std::move(sizes));
  return out;
}

PartitionShape prior_partition_simulate(std::size_t n, const NggpParams& p,
                                        Rng& rng, const PriorSimOptions& opts) {
  std::size_t ns[] = {n};
  return prior_partition_counts(ns, p, rng, opts).shape;
}

}  // namespace nggp
