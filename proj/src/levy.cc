// Apache License, Version 2.0, refer to LICENSE.txt

#include "nggp/levy.hh"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nggp {

namespace {

double lgam(double x) { return boost::math::lgamma(x); }

// log(exp(v) + tau) without overflow for large v.
double log_exp_plus(double v, double tau) {
  if (v > 0.0) return v + std::log1p(tau * std::exp(-v));
  return std::log(std::exp(v) + tau);
}

}  // namespace

NggpParams::NggpParams(double a_, double sigma_, double tau_)
    : a(a_), sigma(sigma_), tau(tau_) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("NggpParams: a must be positive, got " +
                                std::to_string(a));
  }
  if (!(sigma >= 0.0 && sigma < 1.0)) {
    throw std::invalid_argument("NggpParams: sigma must lie in [0, 1), got " +
                                std::to_string(sigma));
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("NggpParams: tau must be positive, got " +
                                std::to_string(tau));
  }
}

double AuxiliaryU::value() const { return std::exp(log_u); }

PartitionShape::PartitionShape(std::vector<std::size_t> cluster_sizes)
    : sizes(std::move(cluster_sizes)) {
  for (std::size_t s : sizes) {
    if (s == 0) throw std::invalid_argument("PartitionShape: empty cluster");
  }
  n = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
}

double PredictiveWeights::total() const {
  return std::accumulate(per_cluster.begin(), per_cluster.end(), new_cluster);
}

PredictiveWeights PredictiveWeights::normalized() const {
  double z = total();
  PredictiveWeights out;
  out.new_cluster = new_cluster / z;
  out.per_cluster.reserve(per_cluster.size());
  for (double w : per_cluster) out.per_cluster.push_back(w / z);
  return out;
}

double psi_over_a(double u, double sigma, double tau) {
  double l = std::log1p(u / tau);
  if (sigma == 0.0) return l;
  return std::pow(tau, sigma) * std::expm1(sigma * l) / sigma;
}

double psi(double u, const NggpParams& p) {
  return p.a * psi_over_a(u, p.sigma, p.tau);
}

double log_kappa(std::size_t m, double u, const NggpParams& p) {
  double md = static_cast<double>(m);
  double out = std::log(p.a) - (md - p.sigma) * std::log(u + p.tau);
  if (p.is_dp()) return out + lgam(md);
  return out + lgam(md - p.sigma) - lgam(1.0 - p.sigma);
}

PredictiveWeights predictive_weights(const PartitionShape& shape,
                                     AuxiliaryU u, const NggpParams& p) {
  PredictiveWeights w;
  w.new_cluster = p.is_dp() ? p.a : p.a * std::pow(u.value() + p.tau, p.sigma);
  w.per_cluster.reserve(shape.sizes.size());
  for (std::size_t s : shape.sizes) {
    w.per_cluster.push_back(static_cast<double>(s) - p.sigma);
  }
  return w;
}

double log_cluster_factor(const PartitionShape& shape, double sigma) {
  double out = 0.0;
  if (sigma == 0.0) {
    for (std::size_t s : shape.sizes) out += lgam(static_cast<double>(s));
    return out;
  }
  double base = lgam(1.0 - sigma);
  for (std::size_t s : shape.sizes) {
    out += lgam(static_cast<double>(s) - sigma) - base;
  }
  return out;
}

double log_joint_partition_u(const PartitionShape& shape, double u,
                             const NggpParams& p) {
  double n = static_cast<double>(shape.n);
  double k = static_cast<double>(shape.num_clusters());
  // The density vanishes as u -> infinity (exp(-psi) beats any power).
  if (std::isinf(u)) return -INFINITY;
  double out = shape.n > 1 ? (n - 1.0) * std::log(u) : 0.0;
  out += -lgam(n) + k * std::log(p.a) - (n - p.sigma * k) * std::log(u + p.tau);
  out -= psi(u, p);
  return out + log_cluster_factor(shape, p.sigma);
}

double log_cond_density_v(double v, const PartitionShape& shape,
                          const NggpParams& p) {
  double n = static_cast<double>(shape.n);
  double k = static_cast<double>(shape.num_clusters());
  if (std::isinf(std::exp(v))) return -INFINITY;
  return n * v - (n - p.sigma * k) * log_exp_plus(v, p.tau) -
         psi(std::exp(v), p);
}

double log_cond_density_sigma(double sigma, const PartitionShape& shape,
                              double u, double a, double tau,
                              double prior_alpha, double prior_beta) {
  if (!(sigma > 0.0 && sigma < 1.0)) return -INFINITY;
  double k = static_cast<double>(shape.num_clusters());
  double out = (prior_alpha - 1.0) * std::log(sigma) +
               (prior_beta - 1.0) * std::log1p(-sigma);
  out += -a * psi_over_a(u, sigma, tau) + sigma * k * std::log(u + tau);
  return out + log_cluster_factor(shape, sigma);
}

double log_cond_density_log_tau(double log_tau, const PartitionShape& shape,
                                double u, double a, double sigma,
                                double prior_shape, double prior_rate) {
  double tau = std::exp(log_tau);
  if (!(tau > 0.0) || !std::isfinite(tau)) return -INFINITY;
  double n = static_cast<double>(shape.n);
  double k = static_cast<double>(shape.num_clusters());
  double out = prior_shape * log_tau - prior_rate * tau;
  out += -(n - sigma * k) * std::log(u + tau) - a * psi_over_a(u, sigma, tau);
  return out;
}

double log_dp_eppf(const PartitionShape& shape, double a) {
  double n = static_cast<double>(shape.n);
  double k = static_cast<double>(shape.num_clusters());
  return lgam(a) + k * std::log(a) - lgam(a + n) +
         log_cluster_factor(shape, 0.0);
}

double dp_eppf(const PartitionShape& shape, double a) {
  return std::exp(log_dp_eppf(shape, a));
}

}  // namespace nggp
