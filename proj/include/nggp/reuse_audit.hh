// Apache License, Version 2.0, refer to LICENSE.txt

// Explicit Metropolis-Hastings audit of one Reuse label update. The target
// on (partition, occupied parameters, pool) given U is
//
//   prod_c kappa_|c|(U) mu0(X_c) prod_i f(Y_i | X_z_i) prod_k mu0(E_k),
//
// and the transition density of an update is computed by enumerating every
// path through the proposal mechanics (pool slot taken by a singleton's
// parameter, choice of cluster or pool entry, fresh mu0 draw for a consumed
// slot). The log acceptance ratio must vanish.

#pragma once

#include <cmath>
#include <vector>

#include "nggp/samplers.hh"

namespace nggp {

template <typename Component>
struct ReuseSnapshot {
  std::vector<int> labels;          // first-appearance order
  std::vector<Component> params;    // per label
  std::vector<Component> pool;
};

namespace detail {

template <typename Component>
ReuseSnapshot<Component> canonical_snapshot(const std::vector<int>& raw,
                                            const std::vector<Component>& raw_params,
                                            std::vector<Component> pool) {
  ReuseSnapshot<Component> out;
  std::vector<int> relabel(raw_params.size(), -1);
  out.labels.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto r = static_cast<std::size_t>(raw[i]);
    if (relabel[r] < 0) {
      relabel[r] = static_cast<int>(out.params.size());
      out.params.push_back(raw_params[r]);
    }
    out.labels[i] = relabel[r];
  }
  out.pool = std::move(pool);
  return out;
}

template <typename Component, typename Same>
bool same_params(const std::vector<Component>& x, const std::vector<Component>& y,
                 Same same) {
  if (x.size() != y.size()) return false;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!same(x[k], y[k])) return false;
  }
  return true;
}

}  // namespace detail

template <typename Kernel>
ReuseSnapshot<typename Kernel::Component> reuse_snapshot(const ChainState<Kernel>& s) {
  std::vector<int> labels = s.partition.labels();
  std::vector<typename Kernel::Component> params;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto l = static_cast<std::size_t>(labels[i]);
    if (l >= params.size()) params.push_back(s.partition.cluster(s.partition.cluster_of(i)).param);
  }
  return {labels, params, s.pool};
}

template <typename Kernel>
double reuse_log_target(const ChainState<Kernel>& s,
                        const ReuseSnapshot<typename Kernel::Component>& x) {
  const auto& data = s.partition.data();
  std::vector<std::size_t> sizes(x.params.size(), 0);
  for (int l : x.labels) ++sizes[static_cast<std::size_t>(l)];
  double out = 0.0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    out += log_kappa(sizes[c], s.u.value(), s.params) + s.kernel.log_prior_density(x.params[c]);
  }
  for (std::size_t i = 0; i < x.labels.size(); ++i) {
    out += s.kernel.log_likelihood(data.row(i), x.params[static_cast<std::size_t>(x.labels[i])]);
  }
  for (const auto& e : x.pool) out += s.kernel.log_prior_density(e);
  return out;
}

// Log density of moving from `from` to `to` by one Reuse update of
// observation i, summed over all proposal paths.
template <typename Kernel, typename Same>
double reuse_log_transition(const ChainState<Kernel>& s,
                            const ReuseSnapshot<typename Kernel::Component>& from,
                            const ReuseSnapshot<typename Kernel::Component>& to,
                            std::size_t i, Same same) {
  using Component = typename Kernel::Component;
  const auto y = s.partition.data().row(i);
  const std::size_t C = from.pool.size();
  const int c = from.labels[i];
  std::vector<std::size_t> sizes(from.params.size(), 0);
  for (int l : from.labels) ++sizes[static_cast<std::size_t>(l)];
  --sizes[static_cast<std::size_t>(c)];
  const bool singleton = sizes[static_cast<std::size_t>(c)] == 0;
  const double log_new = (s.params.is_dp() ? std::log(s.params.a)
                                           : std::log(s.params.a) +
                                                 s.params.sigma * std::log(s.u.value() + s.params.tau)) -
                         std::log(static_cast<double>(C));

  double total = 0.0;
  const std::size_t slots = singleton ? C : 1;
  for (std::size_t j = 0; j < slots; ++j) {
    std::vector<Component> pool = from.pool;
    if (singleton) pool[j] = from.params[static_cast<std::size_t>(c)];
    const double path = singleton ? 1.0 / static_cast<double>(C) : 1.0;

    std::vector<double> logw;
    std::vector<int> choice;  // existing label, or -(k + 1) for pool slot k
    for (std::size_t l = 0; l < sizes.size(); ++l) {
      if (sizes[l] == 0) continue;
      logw.push_back(std::log(static_cast<double>(sizes[l]) - s.params.sigma) +
                     s.kernel.log_likelihood(y, from.params[l]));
      choice.push_back(static_cast<int>(l));
    }
    for (std::size_t k = 0; k < C; ++k) {
      logw.push_back(log_new + s.kernel.log_likelihood(y, pool[k]));
      choice.push_back(-static_cast<int>(k) - 1);
    }
    double m = -INFINITY;
    for (double w : logw) m = std::max(m, w);
    double z = 0.0;
    for (double w : logw) z += std::exp(w - m);

    for (std::size_t r = 0; r < choice.size(); ++r) {
      std::vector<int> raw = from.labels;
      std::vector<Component> raw_params = from.params;
      std::vector<Component> new_pool = pool;
      double fresh = 0.0;
      if (choice[r] >= 0) {
        raw[i] = choice[r];
      } else {
        auto k = static_cast<std::size_t>(-choice[r] - 1);
        raw[i] = static_cast<int>(raw_params.size());
        raw_params.push_back(pool[k]);
        if (k >= to.pool.size()) continue;
        new_pool[k] = to.pool[k];
        fresh = s.kernel.log_prior_density(to.pool[k]);
      }
      auto cand = detail::canonical_snapshot(raw, raw_params, new_pool);
      if (cand.labels != to.labels || !detail::same_params(cand.params, to.params, same) ||
          !detail::same_params(cand.pool, to.pool, same)) {
        continue;
      }
      total += path * std::exp(logw[r] - m) / z * std::exp(fresh);
    }
  }
  return std::log(total);
}

// Performs one real Reuse update of observation i on `s` and returns the
// Metropolis-Hastings log acceptance ratio of the move it made; the value
// is zero up to rounding. `same` decides whether two parameters are the
// same object (exact equality of their values).
template <typename Kernel, typename Same>
double reuse_audit_step(ChainState<Kernel>& s, std::size_t i, Rng& rng, Same same) {
  auto from = reuse_snapshot(s);
  std::vector<double> logw;
  std::vector<ClusterId> ids;
  update_label_reuse(s, i, rng, logw, ids);
  auto to = reuse_snapshot(s);
  return reuse_log_target(s, to) - reuse_log_target(s, from) +
         reuse_log_transition(s, to, from, i, same) -
         reuse_log_transition(s, from, to, i, same);
}

}  // namespace nggp
