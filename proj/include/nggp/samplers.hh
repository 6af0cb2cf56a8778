// Apache License, Version 2.0, refer to LICENSE.txt

// One-sweep transition operators for NGGP mixtures:
//
//   marg-conj  collapsed Gibbs over labels with the component parameters
//              integrated out (conjugate kernels only);
//   neal8      labels with C temporary empty clusters drawn from mu0;
//   reuse      labels with a persistent pool of C empty clusters whose
//              parameters are recycled; every proposal is accepted;
//   slice      conditional sampler over an instantiated truncation of the
//              posterior CRM, with one slice variable per observation.
//
// U and (a, sigma, tau) are always updated given the partition alone, so all
// four operators share the hyperparameter code in hyper.hh.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "nggp/hyper.hh"
#include "nggp/kernels.hh"
#include "nggp/levy.hh"
#include "nggp/partition.hh"
#include "nggp/rng.hh"
#include "nggp/thinning.hh"

namespace nggp {

enum class SamplerKind { kMarginalConjugate, kNeal8, kReuse, kSlice };

inline const char* sampler_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kMarginalConjugate: return "marg-conj";
    case SamplerKind::kNeal8: return "neal8";
    case SamplerKind::kReuse: return "reuse";
    case SamplerKind::kSlice: return "slice";
  }
  return "?";
}

// Accepts "marg-conj", "neal8", "reuse" and "slice".
inline SamplerKind parse_sampler(const std::string& name) {
  for (SamplerKind k : {SamplerKind::kMarginalConjugate, SamplerKind::kNeal8,
                        SamplerKind::kReuse, SamplerKind::kSlice}) {
    if (name == sampler_name(k)) return k;
  }
  throw std::invalid_argument("unknown sampler '" + name + "'");
}

struct SamplerOptions {
  std::size_t C = 1;          // temporaries (neal8) or pool size (reuse)
  bool update_u = true;
  bool update_base = true;    // Gibbs update of Sigma0
  bool random_scan = false;   // random observation order per sweep
  HyperPrior prior;
};

template <typename Component>
struct Atom {
  double mass = 0.0;
  Component location;
};

template <typename Kernel>
struct ChainState {
  using Component = typename Kernel::Component;
  using Stats = typename Kernel::Stats;
  using PartitionType = Partition<Stats, Component>;

  ChainState(const Dataset& data, Kernel k, NggpParams p)
      : kernel(std::move(k)), partition(data), params(p) {}

  Kernel kernel;
  PartitionType partition;
  NggpParams params;
  AuxiliaryU u;

  std::vector<Component> pool;                  // reuse
  std::vector<Atom<Component>> atoms;           // slice, decreasing mass
  std::vector<double> slices;                   // slice
  std::size_t num_random_atoms = 0;             // slice
  std::size_t truncation_events = 0;            // slice

  std::vector<Component> occupied_components() const {
    std::vector<Component> out;
    out.reserve(partition.num_clusters());
    for (ClusterId c : partition.clusters()) out.push_back(partition.cluster(c).param);
    return out;
  }
};

namespace detail {

inline std::vector<std::size_t> scan_order(std::size_t n, bool random, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (random) std::shuffle(order.begin(), order.end(), rng.engine());
  return order;
}

// log of the new-cluster weight a (U + tau)^sigma.
inline double log_new_weight(const NggpParams& p, AuxiliaryU u) {
  if (p.is_dp()) return std::log(p.a);
  return std::log(p.a) + p.sigma * std::log(u.value() + p.tau);
}

template <typename Kernel>
void update_globals(ChainState<Kernel>& s, const SamplerOptions& opts,
                    std::span<const typename Kernel::Component> components,
                    Rng& rng) {
  PartitionShape shape = s.partition.shape();
  update_hyperparameters(s.params, s.u, shape, opts.prior, opts.update_u, rng);
  if (opts.update_base) s.kernel.update_hyper(components, rng);
}

template <typename Kernel>
void update_cluster_params(ChainState<Kernel>& s, Rng& rng) {
  for (ClusterId c : s.partition.clusters()) {
    auto& cl = s.partition.cluster(c);
    cl.param = s.kernel.sample_posterior(cl.stats, cl.param, rng);
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Conjugate marginal sampler.

template <typename Kernel>
void update_label_marginal(ChainState<Kernel>& s, std::size_t i, Rng& rng,
                           std::vector<double>& logw,
                           std::vector<ClusterId>& ids) {
  static_assert(Kernel::kConjugate, "marg-conj requires a conjugate kernel");
  auto& part = s.partition;
  auto y = part.data().row(i);
  part.detach(i);
  logw.clear();
  ids.clear();
  for (ClusterId c : part.clusters()) {
    const auto& cl = part.cluster(c);
    logw.push_back(std::log(static_cast<double>(cl.members.size()) - s.params.sigma) +
                   s.kernel.log_predictive(y, cl.stats));
    ids.push_back(c);
  }
  typename Kernel::Stats empty(part.data().dim());
  logw.push_back(detail::log_new_weight(s.params, s.u) +
                 s.kernel.log_predictive(y, empty));
  std::size_t k = rng.categorical_log(logw);
  if (k < ids.size()) {
    part.attach(i, ids[k]);
  } else {
    part.attach_new(i, typename Kernel::Component{});
  }
}

template <typename Kernel>
void sweep_conjugate_marginal(ChainState<Kernel>& s, const SamplerOptions& opts,
                              Rng& rng) {
  std::vector<double> logw;
  std::vector<ClusterId> ids;
  for (std::size_t i : detail::scan_order(s.partition.num_observations(),
                                          opts.random_scan, rng)) {
    update_label_marginal(s, i, rng, logw, ids);
  }
  // Sigma0 given exact posterior draws of the (otherwise integrated out)
  // component parameters, which are then discarded.
  std::vector<typename Kernel::Component> components;
  if (opts.update_base) {
    for (ClusterId c : s.partition.clusters()) {
      components.push_back(
          s.kernel.sample_posterior(s.partition.cluster(c).stats, rng));
    }
  }
  detail::update_globals(s, opts, components, rng);
}

// ---------------------------------------------------------------------------
// Generalized Neal Algorithm 8.

template <typename Kernel>
void update_label_neal8(ChainState<Kernel>& s, std::size_t i, std::size_t C,
                        Rng& rng, std::vector<typename Kernel::Component>& temps,
                        std::vector<double>& logw, std::vector<ClusterId>& ids) {
  auto& part = s.partition;
  auto y = part.data().row(i);
  auto receipt = part.detach(i);
  temps.clear();
  if (receipt.emptied) temps.push_back(std::move(*receipt.param));
  while (temps.size() < C) temps.push_back(s.kernel.sample_prior(rng));

  logw.clear();
  ids.clear();
  for (ClusterId c : part.clusters()) {
    const auto& cl = part.cluster(c);
    logw.push_back(std::log(static_cast<double>(cl.members.size()) - s.params.sigma) +
                   s.kernel.log_likelihood(y, cl.param));
    ids.push_back(c);
  }
  double log_new = detail::log_new_weight(s.params, s.u) -
                   std::log(static_cast<double>(C));
  for (const auto& t : temps) logw.push_back(log_new + s.kernel.log_likelihood(y, t));

  std::size_t k = rng.categorical_log(logw);
  if (k < ids.size()) {
    part.attach(i, ids[k]);
  } else {
    part.attach_new(i, std::move(temps[k - ids.size()]));
  }
}

template <typename Kernel>
void sweep_neal8(ChainState<Kernel>& s, const SamplerOptions& opts, Rng& rng) {
  if (opts.C < 1) throw std::invalid_argument("neal8: C must be >= 1");
  std::vector<typename Kernel::Component> temps;
  std::vector<double> logw;
  std::vector<ClusterId> ids;
  for (std::size_t i : detail::scan_order(s.partition.num_observations(),
                                          opts.random_scan, rng)) {
    update_label_neal8(s, i, opts.C, rng, temps, logw, ids);
  }
  detail::update_cluster_params(s, rng);
  auto components = s.occupied_components();
  detail::update_globals(s, opts, components, rng);
}

// ---------------------------------------------------------------------------
// Reuse.

template <typename Kernel>
void refill_pool(ChainState<Kernel>& s, std::size_t C, Rng& rng) {
  s.pool.clear();
  for (std::size_t k = 0; k < C; ++k) s.pool.push_back(s.kernel.sample_prior(rng));
}

template <typename Kernel>
void update_label_reuse(ChainState<Kernel>& s, std::size_t i, Rng& rng,
                        std::vector<double>& logw, std::vector<ClusterId>& ids) {
  auto& part = s.partition;
  const std::size_t C = s.pool.size();
  auto y = part.data().row(i);
  auto receipt = part.detach(i);
  if (receipt.emptied) s.pool[rng.uniform_index(C)] = std::move(*receipt.param);

  logw.clear();
  ids.clear();
  for (ClusterId c : part.clusters()) {
    const auto& cl = part.cluster(c);
    logw.push_back(std::log(static_cast<double>(cl.members.size()) - s.params.sigma) +
                   s.kernel.log_likelihood(y, cl.param));
    ids.push_back(c);
  }
  double log_new = detail::log_new_weight(s.params, s.u) -
                   std::log(static_cast<double>(C));
  for (const auto& e : s.pool) logw.push_back(log_new + s.kernel.log_likelihood(y, e));

  std::size_t k = rng.categorical_log(logw);
  if (k < ids.size()) {
    part.attach(i, ids[k]);
  } else {
    std::size_t slot = k - ids.size();
    part.attach_new(i, std::move(s.pool[slot]));
    s.pool[slot] = s.kernel.sample_prior(rng);
  }
}

template <typename Kernel>
void sweep_reuse(ChainState<Kernel>& s, const SamplerOptions& opts, Rng& rng) {
  if (opts.C < 1) throw std::invalid_argument("reuse: C must be >= 1");
  if (s.pool.size() != opts.C) refill_pool(s, opts.C, rng);
  std::vector<double> logw;
  std::vector<ClusterId> ids;
  for (std::size_t i : detail::scan_order(s.partition.num_observations(),
                                          opts.random_scan, rng)) {
    update_label_reuse(s, i, rng, logw, ids);
  }
  detail::update_cluster_params(s, rng);
  s.pool.clear();
  auto components = s.occupied_components();
  detail::update_globals(s, opts, components, rng);
  refill_pool(s, opts.C, rng);
}

// ---------------------------------------------------------------------------
// Conditional slice sampler.

// Steps 3-5 of the sweep: fixed-atom masses and locations, slices, and the
// random atoms above the smallest slice. Also used to initialize the
// auxiliary state from a partition with parameters.
template <typename Kernel>
void refresh_atoms(ChainState<Kernel>& s, Rng& rng, bool update_locations) {
  auto& part = s.partition;
  const double rate = s.u.value() + s.params.tau;
  s.atoms.clear();
  s.slices.assign(part.num_observations(), 0.0);
  double min_slice = INFINITY;
  for (ClusterId c : part.clusters()) {
    auto& cl = part.cluster(c);
    if (update_locations) cl.param = s.kernel.sample_posterior(cl.stats, cl.param, rng);
    double mass = rng.gamma(static_cast<double>(cl.members.size()) - s.params.sigma, rate);
    mass = std::max(mass, std::numeric_limits<double>::min());
    for (std::size_t i : cl.members) {
      double slice = mass * rng.uniform();
      s.slices[i] = slice;
      min_slice = std::min(min_slice, slice);
    }
    s.atoms.push_back({mass, cl.param});
  }

  double threshold = min_slice;
  if (threshold < kMinAtomMass) {
    threshold = kMinAtomMass;
    ++s.truncation_events;
  }
  ThinningResult random = adaptive_thinning(threshold, s.u, s.params, rng, kMaxAtoms);
  if (random.capped) ++s.truncation_events;
  s.num_random_atoms = random.masses.size();
  for (double m : random.masses) s.atoms.push_back({m, s.kernel.sample_prior(rng)});
  std::sort(s.atoms.begin(), s.atoms.end(),
            [](const auto& x, const auto& y) { return x.mass > y.mass; });
}

template <typename Kernel>
void sweep_slice(ChainState<Kernel>& s, const SamplerOptions& opts, Rng& rng) {
  auto& part = s.partition;
  const std::size_t n = part.num_observations();
  if (s.slices.size() != n) refresh_atoms(s, rng, false);

  // (1) labels over the atoms heavier than each slice.
  std::vector<std::size_t> choice(n);
  std::vector<double> logw;
  for (std::size_t i = 0; i < n; ++i) {
    double slice = s.slices[i];
    auto end = std::partition_point(s.atoms.begin(), s.atoms.end(),
                                    [slice](const auto& a) { return a.mass > slice; });
    auto m = static_cast<std::size_t>(end - s.atoms.begin());
    auto y = part.data().row(i);
    logw.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      logw[k] = s.kernel.log_likelihood(y, s.atoms[k].location);
    }
    choice[i] = rng.categorical_log(logw);
  }
  for (std::size_t i = 0; i < n; ++i) part.detach(i);
  std::vector<ClusterId> cluster_of_atom(s.atoms.size(), kUnassigned);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = choice[i];
    if (cluster_of_atom[k] == kUnassigned) {
      cluster_of_atom[k] = part.attach_new(i, s.atoms[k].location);
    } else {
      part.attach(i, cluster_of_atom[k]);
    }
  }

  // (2) U and hyperparameters given the partition; Sigma0 given locations.
  auto components = s.occupied_components();
  detail::update_globals(s, opts, components, rng);

  // (3)-(5)
  refresh_atoms(s, rng, true);
}

// ---------------------------------------------------------------------------

// Draws the sampler-specific auxiliary variables from their conditional
// given the partition, parameters and globals.
template <typename Kernel>
void prepare_auxiliary(ChainState<Kernel>& s, SamplerKind kind,
                       const SamplerOptions& opts, Rng& rng) {
  s.pool.clear();
  s.atoms.clear();
  s.slices.clear();
  if (kind == SamplerKind::kReuse) refill_pool(s, opts.C, rng);
  if (kind == SamplerKind::kSlice) refresh_atoms(s, rng, false);
}

// All observations in one cluster with a posterior parameter draw; U at
// log n. Auxiliary state (pool, atoms) is prepared for the given sampler.
template <typename Kernel>
void initialize_chain(ChainState<Kernel>& s, SamplerKind kind,
                      const SamplerOptions& opts, Rng& rng) {
  auto& part = s.partition;
  const std::size_t n = part.num_observations();
  for (std::size_t i = 0; i < n; ++i) {
    if (part.is_assigned(i)) part.detach(i);
  }
  if (n > 0) {
    ClusterId c = part.attach_new(0, s.kernel.sample_prior(rng));
    for (std::size_t i = 1; i < n; ++i) part.attach(i, c);
    auto& cl = part.cluster(c);
    cl.param = s.kernel.sample_posterior(cl.stats, cl.param, rng);
  }
  s.u.log_u = std::log(static_cast<double>(std::max<std::size_t>(n, 1)));
  prepare_auxiliary(s, kind, opts, rng);
}

template <typename Kernel>
void sweep(ChainState<Kernel>& s, SamplerKind kind, const SamplerOptions& opts,
           Rng& rng) {
  switch (kind) {
    case SamplerKind::kMarginalConjugate:
      if constexpr (Kernel::kConjugate) {
        sweep_conjugate_marginal(s, opts, rng);
        return;
      } else {
        throw std::invalid_argument("marg-conj requires the conjugate model");
      }
    case SamplerKind::kNeal8:
      sweep_neal8(s, opts, rng);
      return;
    case SamplerKind::kReuse:
      sweep_reuse(s, opts, rng);
      return;
    case SamplerKind::kSlice:
      sweep_slice(s, opts, rng);
      return;
  }
}

}  // namespace nggp
