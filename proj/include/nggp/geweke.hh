// Apache License, Version 2.0, refer to LICENSE.txt

// Joint-distribution ("getting it right") tests. The marginal-conditional
// simulator draws everything from the prior and then the data; the
// successive-conditional simulator alternates one sampler sweep with a
// fresh draw of the data given the state. Both target the same joint law,
// so the first and second moments of any statistic must agree.

#pragma once

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "nggp/diagnostics.hh"
#include "nggp/hyper.hh"
#include "nggp/oracle.hh"
#include "nggp/samplers.hh"

namespace nggp {

struct GewekeStat {
  std::string name;
  double mc_mean = 0.0;
  double sc_mean = 0.0;
  double z_first = 0.0;
  double z_second = 0.0;
  double sc_ess = 0.0;
};

struct GewekeResult {
  std::vector<GewekeStat> stats;
  std::size_t samples = 0;

  double max_abs_z() const {
    double m = 0.0;
    for (const auto& s : stats) m = std::max({m, std::abs(s.z_first), std::abs(s.z_second)});
    return m;
  }
  bool passed(double threshold = 4.0) const { return max_abs_z() < threshold; }
};

// z-scores on E[x] and E[x^2] between two sample sets, one column per
// statistic. Columns of `b` are treated as autocorrelated when b_is_chain is
// set (variance divided by the ESS instead of N). Two degenerate columns
// with equal values give z = 0.
GewekeResult geweke_compare(const std::vector<std::vector<double>>& a,
                            const std::vector<std::vector<double>>& b,
                            const std::vector<std::string>& names,
                            bool b_is_chain);

// Generic driver. `draw_marginal()` and `step()` each return one vector of
// statistics; `step` advances the successive-conditional chain.
template <typename MarginalDraw, typename Transition>
GewekeResult geweke_test(MarginalDraw&& draw_marginal, Transition&& step,
                         const std::vector<std::string>& names,
                         std::size_t samples) {
  std::vector<std::vector<double>> mc(names.size()), sc(names.size());
  for (std::size_t t = 0; t < samples; ++t) {
    auto x = draw_marginal();
    for (std::size_t j = 0; j < names.size(); ++j) mc[j].push_back(x[j]);
  }
  for (std::size_t t = 0; t < samples; ++t) {
    auto x = step();
    for (std::size_t j = 0; j < names.size(); ++j) sc[j].push_back(x[j]);
  }
  GewekeResult r = geweke_compare(mc, sc, names, true);
  r.samples = samples;
  return r;
}

// ---------------------------------------------------------------------------
// Mixture models.

struct MixtureGewekeConfig {
  std::size_t n = 5;
  SamplerKind kind = SamplerKind::kNeal8;
  SamplerOptions options;
  NggpParams initial;         // values of the parameters that are not inferred
  std::size_t samples = 20000;
  std::size_t sweeps_per_sample = 1;
  std::uint64_t seed = 1;
};

inline const std::vector<std::string>& mixture_geweke_names() {
  static const std::vector<std::string> names = {
      "num_clusters", "log_u", "a", "sigma", "base_scale", "data_mean"};
  return names;
}

template <typename Kernel>
class MixtureGeweke {
 public:
  using Component = typename Kernel::Component;

  MixtureGeweke(Kernel kernel, MixtureGewekeConfig config)
      : config_(std::move(config)),
        prototype_(std::move(kernel)),
        data_(config_.n, prototype_.dim()),
        joint_(config_.n),
        rng_(config_.seed, 0),
        chain_rng_(config_.seed, 1) {}

  // One marginal-conditional draw (does not touch the chain).
  std::vector<double> draw_marginal() { return draw_into(rng_, mc_data_, nullptr); }

  // One successive-conditional transition; the chain is initialized from a
  // marginal draw on first use.
  std::vector<double> step() {
    if (!state_) {
      state_ = std::make_unique<ChainState<Kernel>>(data_, prototype_, config_.initial);
      draw_into(chain_rng_, data_, state_.get());
      prepare_auxiliary(*state_, config_.kind, config_.options, chain_rng_);
    }
    for (std::size_t k = 0; k < config_.sweeps_per_sample; ++k) {
      sweep(*state_, config_.kind, config_.options, chain_rng_);
      redraw_data(*state_, chain_rng_);
    }
    return statistics(*state_);
  }

  GewekeResult run() {
    return geweke_test([this] { return draw_marginal(); }, [this] { return step(); },
                       mixture_geweke_names(), config_.samples);
  }

 private:
  std::vector<double> statistics(const ChainState<Kernel>& s) const {
    double mean = sample_mean(s.partition.data().values());
    return {static_cast<double>(s.partition.num_clusters()), s.u.log_u, s.params.a,
            s.params.sigma, s.kernel.hyper_summary(), mean};
  }

  // Prior draw of (a, sigma, tau), Sigma0, (partition, U), components and
  // data. With `target` set the draw is written into that chain state
  // (whose partition refers to `data`).
  std::vector<double> draw_into(Rng& rng, Dataset& data, ChainState<Kernel>* target) {
    NggpParams params = config_.initial;
    sample_hyperprior(params, config_.options.prior, rng);
    Kernel kernel = prototype_;
    if (config_.options.update_base) kernel.sample_hyper_prior(rng);
    auto joint = joint_.sample(params, rng);
    int k = 0;
    for (int l : joint.labels) k = std::max(k, l + 1);
    std::vector<Component> comps;
    for (int c = 0; c < k; ++c) comps.push_back(kernel.sample_prior(rng));
    if (data.size() != config_.n) data = Dataset(config_.n, prototype_.dim());
    for (std::size_t i = 0; i < config_.n; ++i) {
      kernel.sample_observation(comps[static_cast<std::size_t>(joint.labels[i])], data.row(i), rng);
    }
    if (target == nullptr) {
      return {static_cast<double>(k), joint.log_u, params.a, params.sigma,
              kernel.hyper_summary(), sample_mean(data.values())};
    }
    target->kernel = kernel;
    target->params = params;
    target->u.log_u = joint.log_u;
    auto& part = target->partition;
    for (std::size_t i = 0; i < config_.n; ++i) {
      if (part.is_assigned(i)) part.detach(i);
    }
    std::vector<ClusterId> ids(static_cast<std::size_t>(k), kUnassigned);
    for (std::size_t i = 0; i < config_.n; ++i) {
      auto l = static_cast<std::size_t>(joint.labels[i]);
      if (ids[l] == kUnassigned) {
        ids[l] = part.attach_new(i, comps[l]);
      } else {
        part.attach(i, ids[l]);
      }
    }
    return statistics(*target);
  }

  // Data given the state. The collapsed sampler keeps no parameters, so
  // they are drawn afresh from mu0, which gives the exact conditional of the
  // data given (partition, Sigma0).
  void redraw_data(ChainState<Kernel>& s, Rng& rng) {
    auto& part = s.partition;
    const bool collapsed = config_.kind == SamplerKind::kMarginalConjugate;
    for (ClusterId c : part.clusters()) {
      const auto& cl = part.cluster(c);
      Component fresh;
      if (collapsed) fresh = s.kernel.sample_prior(rng);
      const Component& comp = collapsed ? fresh : cl.param;
      for (std::size_t i : cl.members) s.kernel.sample_observation(comp, data_.row(i), rng);
    }
    part.refresh_stats();
  }

  MixtureGewekeConfig config_;
  Kernel prototype_;
  Dataset data_;
  Dataset mc_data_;
  JointPriorSampler joint_;
  Rng rng_;
  Rng chain_rng_;
  std::unique_ptr<ChainState<Kernel>> state_;
};

}  // namespace nggp
