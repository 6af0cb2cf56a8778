// Apache License, Version 2.0, refer to LICENSE.txt

#include "nggp/oracle.hh"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "nggp/diagnostics.hh"
#include "nggp/geweke.hh"
#include "nggp/thinning.hh"

namespace nggp {

namespace {

using boost::math::quadrature::gauss_kronrod;

double lgam(double x) { return boost::math::lgamma(x); }

double log_exp_plus(double v, double tau) {
  if (v > 0.0) return v + std::log1p(tau * std::exp(-v));
  return std::log(std::exp(v) + tau);
}

double log_sum_exp(double x, double y) {
  if (x == -INFINITY) return y;
  if (y == -INFINITY) return x;
  double m = std::max(x, y);
  return m + std::log1p(std::exp(-std::abs(x - y)));
}

// Integral of exp(f) over the real line, split at the mode found on a
// coarse scan so the adaptive rule sees the peak.
template <typename F>
double integrate_line(F f) {
  double best_v = 0.0, best = -INFINITY;
  for (double v = -60.0; v <= 60.0; v += 0.25) {
    double val = f(v);
    if (val > best) {
      best = val;
      best_v = v;
    }
  }
  auto g = [&](double v) { return std::exp(f(v) - best); };
  const double inf = std::numeric_limits<double>::infinity();
  double left = gauss_kronrod<double, 61>::integrate(g, -inf, best_v, 20, 1e-13);
  double right = gauss_kronrod<double, 61>::integrate(g, best_v, inf, 20, 1e-13);
  return (left + right) * std::exp(best);
}

}  // namespace

SetPartitionList enumerate_partitions(std::size_t n) {
  if (n > kMaxEnumeration) {
    throw std::invalid_argument("enumerate_partitions: n = " + std::to_string(n) +
                                " exceeds " + std::to_string(kMaxEnumeration));
  }
  SetPartitionList out;
  out.n = n;
  if (n == 0) {
    out.partitions.emplace_back();
    return out;
  }
  // Restricted-growth string a with a[0] = 0, a[i] <= max(a[0..i-1]) + 1.
  std::vector<std::size_t> a(n, 0), prefix_max(n, 0);
  for (;;) {
    std::size_t blocks = prefix_max[n - 1] + 1;
    SetPartition part(blocks);
    for (std::size_t i = 0; i < n; ++i) part[a[i]].push_back(i);
    out.partitions.push_back(std::move(part));

    std::size_t i = n - 1;
    while (i > 0 && a[i] == prefix_max[i - 1] + 1) --i;
    if (i == 0) break;
    ++a[i];
    prefix_max[i] = std::max(prefix_max[i - 1], a[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      a[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
  }
  return out;
}

PartitionShape shape_of(const SetPartition& partition) {
  std::vector<std::size_t> sizes;
  sizes.reserve(partition.size());
  for (const auto& block : partition) sizes.push_back(block.size());
  return PartitionShape(std::move(sizes));
}

double integrate_joint_over_u(const PartitionShape& shape, const NggpParams& p) {
  return integrate_line([&](double v) {
    return log_joint_partition_u(shape, std::exp(v), p) + v;
  });
}

double eppf_by_quadrature(const PartitionShape& shape, const NggpParams& p) {
  return integrate_joint_over_u(shape, p);
}

double eppf_normalization(std::size_t n, const NggpParams& p) {
  if (n > 8) throw std::invalid_argument("eppf_normalization: n > 8");
  SetPartitionList all = enumerate_partitions(n);
  std::map<std::vector<std::size_t>, double> cache;
  double total = 0.0;
  for (const auto& part : all.partitions) {
    PartitionShape shape = shape_of(part);
    std::vector<std::size_t> key = shape.sizes;
    std::sort(key.begin(), key.end());
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, integrate_joint_over_u(shape, p)).first;
    }
    total += it->second;
  }
  return total;
}

double levy_tail_rate(double S, double u, const NggpParams& p) {
  if (!(S > 0.0)) throw std::invalid_argument("levy_tail_rate: S <= 0");
  if (std::isinf(S)) return 0.0;
  // v'(s) s in log form so that s = inf gives 0 rather than inf * 0.
  const double log_scale = std::log(p.a) - lgam(1.0 - p.sigma);
  const double lambda = p.tau + u;
  auto f = [&](double x) {
    double log_s = std::log(S) + x;
    return std::exp(log_scale - p.sigma * log_s - lambda * std::exp(log_s));
  };
  return gauss_kronrod<double, 61>::integrate(
      f, 0.0, std::numeric_limits<double>::infinity(), 20, 1e-13);
}

std::vector<double> num_clusters_distribution(std::size_t n, const NggpParams& p) {
  if (n == 0) throw std::invalid_argument("num_clusters_distribution: n = 0");
  const double nd = static_cast<double>(n);
  // log W(m, k), k = 1..m, built up to m = n.
  std::vector<double> logw(n + 1, -INFINITY);
  logw[1] = 0.0;
  for (std::size_t m = 1; m < n; ++m) {
    double md = static_cast<double>(m);
    for (std::size_t k = m + 1; k >= 1; --k) {
      double stay = k <= m ? std::log(md - p.sigma * static_cast<double>(k)) + logw[k]
                           : -INFINITY;
      logw[k] = log_sum_exp(stay, logw[k - 1]);
    }
  }

  // Trapezoid in v over a fixed wide range; the integrands are smooth and
  // decay exponentially at both ends.
  const double lo = -50.0, hi = 80.0, dv = 0.02;
  const auto grid = static_cast<std::size_t>((hi - lo) / dv) + 1;
  std::vector<double> base(grid), lse(grid);
  for (std::size_t g = 0; g < grid; ++g) {
    double v = lo + dv * static_cast<double>(g);
    lse[g] = log_exp_plus(v, p.tau);
    base[g] = nd * v - lgam(nd) - nd * lse[g] - psi(std::exp(v), p);
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    double sk = p.sigma * static_cast<double>(k);
    double m = -INFINITY;
    for (std::size_t g = 0; g < grid; ++g) m = std::max(m, base[g] + sk * lse[g]);
    double acc = 0.0;
    for (std::size_t g = 0; g < grid; ++g) {
      double w = (g == 0 || g + 1 == grid) ? 0.5 : 1.0;
      acc += w * std::exp(base[g] + sk * lse[g] - m);
    }
    // logw already carries the 1 / Gamma(1 - sigma) per block.
    double log_prob = logw[k] + static_cast<double>(k) * std::log(p.a) + m +
                      std::log(acc * dv);
    out[k - 1] = std::exp(log_prob);
  }
  return out;
}

double expected_num_clusters(std::size_t n, const NggpParams& p) {
  std::vector<double> prob = num_clusters_distribution(n, p);
  double total = 0.0, mean = 0.0;
  for (std::size_t k = 0; k < prob.size(); ++k) {
    total += prob[k];
    mean += static_cast<double>(k + 1) * prob[k];
  }
  return mean / total;
}

std::vector<ShapeClass> integer_partitions(std::size_t n) {
  std::vector<ShapeClass> out;
  std::vector<std::size_t> current;
  auto recurse = [&](auto& self, std::size_t remaining, std::size_t max_part) -> void {
    if (remaining == 0) {
      ShapeClass sc;
      sc.sizes = current;
      double lc = lgam(static_cast<double>(n) + 1.0);
      std::size_t run = 0;
      for (std::size_t j = 0; j < current.size(); ++j) {
        lc -= lgam(static_cast<double>(current[j]) + 1.0);
        ++run;
        if (j + 1 == current.size() || current[j + 1] != current[j]) {
          lc -= lgam(static_cast<double>(run) + 1.0);
          run = 0;
        }
      }
      sc.log_count = lc;
      out.push_back(std::move(sc));
      return;
    }
    for (std::size_t part = std::min(remaining, max_part); part >= 1; --part) {
      current.push_back(part);
      self(self, remaining - part, part);
      current.pop_back();
    }
  };
  recurse(recurse, n, n);
  return out;
}

JointPriorSampler::JointPriorSampler(std::size_t n, std::size_t grid_points)
    : n_(n), grid_points_(grid_points), shapes_(integer_partitions(n)) {
  if (n == 0 || n > 12) throw std::invalid_argument("JointPriorSampler: need 1 <= n <= 12");
}

JointPriorSampler::Draw JointPriorSampler::sample(const NggpParams& p, Rng& rng) {
  const double nd = static_cast<double>(n_);
  const std::size_t num_shapes = shapes_.size();
  cluster_factor_.resize(num_shapes);
  for (std::size_t s = 0; s < num_shapes; ++s) {
    PartitionShape shape(shapes_[s].sizes);
    double k = static_cast<double>(shape.num_clusters());
    cluster_factor_[s] = shapes_[s].log_count + k * std::log(p.a) - lgam(nd) +
                         log_cluster_factor(shape, p.sigma);
  }
  // log density of (shape, v) up to nothing: the joint law times e^v.
  auto eval = [&](double v, std::size_t s, double lse, double psi_u) {
    double k = static_cast<double>(shapes_[s].sizes.size());
    return cluster_factor_[s] + nd * v - (nd - p.sigma * k) * lse - psi_u;
  };
  auto max_over_shapes = [&](double v) {
    double lse = log_exp_plus(v, p.tau), ps = psi(std::exp(v), p);
    double m = -INFINITY;
    for (std::size_t s = 0; s < num_shapes; ++s) m = std::max(m, eval(v, s, lse, ps));
    return m;
  };

  // Bracket the region within 50 log units of the maximum.
  const double coarse = 0.5;
  std::vector<double> cv, cf;
  for (double v = -80.0; v <= 80.0; v += coarse) {
    cv.push_back(v);
    cf.push_back(max_over_shapes(v));
  }
  double top = *std::max_element(cf.begin(), cf.end());
  std::size_t first = 0, last = cv.size() - 1;
  while (first < last && cf[first] < top - 50.0) ++first;
  while (last > first && cf[last] < top - 50.0) --last;
  double lo = cv[first > 0 ? first - 1 : 0];
  double hi = cv[std::min(last + 1, cv.size() - 1)];

  const std::size_t g = grid_points_;
  const double dv = (hi - lo) / static_cast<double>(g - 1);
  std::vector<double> values(num_shapes * g);
  for (std::size_t j = 0; j < g; ++j) {
    double v = lo + dv * static_cast<double>(j);
    double lse = log_exp_plus(v, p.tau), ps = psi(std::exp(v), p);
    for (std::size_t s = 0; s < num_shapes; ++s) values[s * g + j] = eval(v, s, lse, ps);
  }
  // Cell masses under log-linear interpolation.
  logw_.resize(num_shapes * (g - 1));
  const double log_dv = std::log(dv);
  for (std::size_t s = 0; s < num_shapes; ++s) {
    for (std::size_t j = 0; j + 1 < g; ++j) {
      double f0 = values[s * g + j], f1 = values[s * g + j + 1];
      double d = f1 - f0;
      double factor = std::abs(d) < 1e-12 ? 0.0 : std::log(std::expm1(d) / d);
      logw_[s * (g - 1) + j] = f0 + log_dv + factor;
    }
  }
  std::size_t cell = rng.categorical_log(logw_);
  std::size_t s = cell / (g - 1), j = cell % (g - 1);
  double d = values[s * g + j + 1] - values[s * g + j];
  double unif = rng.uniform();
  double t = std::abs(d) < 1e-12 ? unif : std::log1p(unif * std::expm1(d)) / d;

  Draw out;
  out.log_u = lo + dv * (static_cast<double>(j) + t);

  std::vector<std::size_t> perm(n_);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  std::vector<int> raw(n_);
  std::size_t pos = 0;
  for (std::size_t b = 0; b < shapes_[s].sizes.size(); ++b) {
    for (std::size_t r = 0; r < shapes_[s].sizes[b]; ++r) raw[perm[pos++]] = static_cast<int>(b);
  }
  std::vector<int> relabel(shapes_[s].sizes.size(), -1);
  int next = 0;
  out.labels.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    if (relabel[raw[i]] < 0) relabel[raw[i]] = next++;
    out.labels[i] = relabel[raw[i]];
  }
  return out;
}

namespace {

double z_score(std::span<const double> a, std::span<const double> b, bool b_is_chain) {
  double ma = sample_mean(a), mb = sample_mean(b);
  double va = sample_variance(a) / static_cast<double>(a.size());
  double vb = sample_variance(b);
  if (vb > 0.0) vb /= b_is_chain ? ess(b) : static_cast<double>(b.size());
  double se = std::sqrt(va + vb);
  if (se == 0.0) return ma == mb ? 0.0 : std::copysign(INFINITY, ma - mb);
  return (ma - mb) / se;
}

}  // namespace

GewekeResult geweke_compare(const std::vector<std::vector<double>>& a,
                            const std::vector<std::vector<double>>& b,
                            const std::vector<std::string>& names,
                            bool b_is_chain) {
  GewekeResult out;
  out.samples = a.empty() ? 0 : a.front().size();
  for (std::size_t j = 0; j < names.size(); ++j) {
    GewekeStat st;
    st.name = names[j];
    st.mc_mean = sample_mean(a[j]);
    st.sc_mean = sample_mean(b[j]);
    st.z_first = z_score(a[j], b[j], b_is_chain);
    st.sc_ess = b_is_chain && b[j].size() >= 10 ? ess(b[j]) : static_cast<double>(b[j].size());
    std::vector<double> a2(a[j].size()), b2(b[j].size());
    for (std::size_t t = 0; t < a2.size(); ++t) a2[t] = a[j][t] * a[j][t];
    for (std::size_t t = 0; t < b2.size(); ++t) b2[t] = b[j][t] * b[j][t];
    st.z_second = z_score(a2, b2, b_is_chain);
    out.stats.push_back(std::move(st));
  }
  return out;
}

}  // namespace nggp
