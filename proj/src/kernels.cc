// Apache License, Version 2.0, refer to LICENSE.txt

#include "nggp/kernels.hh"

#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nggp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double lgam(double x) { return boost::math::lgamma(x); }

}  // namespace

double calibrated_gamma0(double alpha0, double beta0, std::size_t dim) {
  double d = static_cast<double>(dim);
  // beta0 * gamma0 * S0 / (alpha0 - D - 1) = S0 / 50
  return (alpha0 - d - 1.0) / (kPriorRangeRatio * beta0);
}

// ---------------------------------------------------------------------------

void ConjugateNormalBase::validate() const {
  if (!(s0 > 0.0 && alpha0 > 0.0 && sigma0 > 0.0 && beta0 > 0.0 &&
        gamma0 > 0.0)) {
    throw std::invalid_argument(
        "ConjugateNormalBase: s0, alpha0, sigma0, beta0 and gamma0 must be "
        "positive");
  }
}

ConjugateNormalKernel::ConjugateNormalKernel(ConjugateNormalBase base)
    : base_(base) {
  base_.validate();
  kappa0_ = base_.sigma0 / base_.s0;
}

void ConjugateNormalKernel::set_sigma0(double s) {
  base_.sigma0 = s;
  kappa0_ = s / base_.s0;
}

ConjugateNormalKernel::Posterior ConjugateNormalKernel::posterior(
    const Stats& stats) const {
  Posterior p;
  double n = stats.count;
  p.kappa = kappa0_ + n;
  p.mean = (kappa0_ * base_.m0 + stats.sum) / p.kappa;
  p.shape = 0.5 * base_.alpha0 + 0.5 * n;
  double scatter = 0.0;
  double shift = 0.0;
  if (n > 0.0) {
    double ybar = stats.sum / n;
    scatter = std::max(0.0, stats.sum_sq - stats.sum * ybar);
    shift = kappa0_ * n * (ybar - base_.m0) * (ybar - base_.m0) / p.kappa;
  }
  p.rate = 0.5 * base_.sigma0 + 0.5 * (scatter + shift);
  return p;
}

double ConjugateNormalKernel::log_marginal(const Stats& stats) const {
  if (stats.count == 0.0) return 0.0;
  Posterior p = posterior(stats);
  double shape0 = 0.5 * base_.alpha0;
  double rate0 = 0.5 * base_.sigma0;
  return lgam(p.shape) - lgam(shape0) + shape0 * std::log(rate0) -
         p.shape * std::log(p.rate) + 0.5 * std::log(kappa0_ / p.kappa) -
         0.5 * stats.count * kLog2Pi;
}

double ConjugateNormalKernel::log_predictive(std::span<const double> y,
                                             const Stats& stats) const {
  Posterior p = posterior(stats);
  double dof = 2.0 * p.shape;
  double scale_sq = p.rate * (p.kappa + 1.0) / (p.shape * p.kappa);
  double d = y[0] - p.mean;
  return lgam(0.5 * (dof + 1.0)) - lgam(0.5 * dof) -
         0.5 * std::log(dof * std::numbers::pi * scale_sq) -
         0.5 * (dof + 1.0) * std::log1p(d * d / (dof * scale_sq));
}

double ConjugateNormalKernel::log_prior_density(const Component& c) const {
  double shape0 = 0.5 * base_.alpha0;
  double rate0 = 0.5 * base_.sigma0;
  double mean_var = c.var / kappa0_;
  double d = c.mean - base_.m0;
  double log_normal = -0.5 * kLog2Pi - 0.5 * std::log(mean_var) -
                      0.5 * d * d / mean_var;
  double log_ig = shape0 * std::log(rate0) - lgam(shape0) -
                  (shape0 + 1.0) * std::log(c.var) - rate0 / c.var;
  return log_normal + log_ig;
}

ConjugateNormalKernel::Component ConjugateNormalKernel::sample_prior(
    Rng& rng) const {
  double var = 0.5 * base_.sigma0 / rng.gamma(0.5 * base_.alpha0, 1.0);
  double mean = rng.normal(base_.m0, std::sqrt(var / kappa0_));
  return Component::make(mean, var);
}

ConjugateNormalKernel::Component ConjugateNormalKernel::sample_posterior(
    const Stats& stats, Rng& rng) const {
  Posterior p = posterior(stats);
  double var = p.rate / rng.gamma(p.shape, 1.0);
  double mean = rng.normal(p.mean, std::sqrt(var / p.kappa));
  return Component::make(mean, var);
}

ConjugateNormalKernel::Component ConjugateNormalKernel::sample_posterior(
    const Stats& stats, const Component&, Rng& rng) const {
  return sample_posterior(stats, rng);
}

std::pair<double, double> ConjugateNormalKernel::sigma0_conditional(
    std::span<const Component> components) const {
  double shape = 0.5 * base_.beta0;
  double rate = 0.5 / (base_.gamma0 * base_.s0);
  for (const Component& c : components) {
    double d = c.mean - base_.m0;
    shape += 0.5 * (base_.alpha0 + 1.0);
    rate += 0.5 * (1.0 + d * d / base_.s0) / c.var;
  }
  return {shape, rate};
}

void ConjugateNormalKernel::update_hyper(std::span<const Component> components,
                                         Rng& rng) {
  auto [shape, rate] = sigma0_conditional(components);
  set_sigma0(rng.gamma(shape, rate));
}

void ConjugateNormalKernel::sample_hyper_prior(Rng& rng) {
  update_hyper({}, rng);
}

// ---------------------------------------------------------------------------

GaussianComponent GaussianComponent::make(Vector mean, Matrix cov) {
  GaussianComponent c;
  c.chol = cholesky_lower(cov);
  c.log_norm = 0.5 * static_cast<double>(mean.size()) * kLog2Pi +
               0.5 * log_det_from_cholesky(c.chol);
  c.mean = std::move(mean);
  c.cov = std::move(cov);
  return c;
}

void NonconjugateGaussianBase::validate() const {
  const auto d = m0.size();
  if (d == 0 || s0.rows() != d || s0.cols() != d || sigma0.rows() != d ||
      sigma0.cols() != d) {
    throw std::invalid_argument("NonconjugateGaussianBase: inconsistent "
                                "dimensions");
  }
  if (!(alpha0 > static_cast<double>(d) - 1.0) ||
      !(beta0 > static_cast<double>(d) - 1.0) || !(gamma0 > 0.0)) {
    throw std::invalid_argument("NonconjugateGaussianBase: degrees of freedom "
                                "must exceed D - 1 and gamma0 be positive");
  }
  cholesky_lower(s0);
  cholesky_lower(sigma0);
}

GaussianKernel::GaussianKernel(NonconjugateGaussianBase base)
    : base_(std::move(base)) {
  base_.validate();
  s0_chol_ = cholesky_lower(base_.s0);
  s0_inv_ = base_.s0.llt().solve(Matrix::Identity(base_.s0.rows(),
                                                  base_.s0.cols()));
}

void GaussianKernel::set_sigma0(Matrix s) {
  cholesky_lower(s);
  base_.sigma0 = std::move(s);
}

double GaussianKernel::hyper_summary() const {
  return log_det_from_cholesky(cholesky_lower(base_.sigma0));
}

double GaussianKernel::log_likelihood(std::span<const double> y,
                                      const Component& c) const {
  if (c.mean.size() == 1) {
    double z = (y[0] - c.mean(0)) / c.chol(0, 0);
    return -c.log_norm - 0.5 * z * z;
  }
  Vector z = c.chol.triangularView<Eigen::Lower>().solve(as_vector(y) - c.mean);
  return -c.log_norm - 0.5 * z.squaredNorm();
}

double GaussianKernel::log_prior_density(const Component& c) const {
  return log_mvn_density(c.mean, base_.m0, base_.s0) +
         log_inverse_wishart_density(c.cov, base_.alpha0, base_.sigma0);
}

GaussianKernel::Component GaussianKernel::sample_prior(Rng& rng) const {
  Vector mean = sample_mvn(base_.m0, s0_chol_, rng);
  Matrix cov = sample_inverse_wishart(base_.alpha0, base_.sigma0, rng);
  return Component::make(std::move(mean), std::move(cov));
}

GaussianKernel::Component GaussianKernel::sample_posterior(
    const Stats& stats, const Component& current, Rng& rng) const {
  const Eigen::Index d = base_.m0.size();
  const Matrix identity = Matrix::Identity(d, d);
  double n = stats.count;

  Vector mean;
  if (n == 0.0) {
    mean = sample_mvn(base_.m0, s0_chol_, rng);
  } else {
    Matrix cov_inv = current.cov.llt().solve(identity);
    Matrix precision = s0_inv_ + n * cov_inv;
    Vector linear = s0_inv_ * base_.m0 + cov_inv * stats.sum;
    Eigen::LLT<Matrix> llt(precision);
    Vector center = llt.solve(linear);
    Vector z(d);
    for (Eigen::Index i = 0; i < d; ++i) z(i) = rng.normal();
    mean = center + llt.matrixU().solve(z);
  }

  Matrix scatter = stats.outer - mean * stats.sum.transpose() -
                   stats.sum * mean.transpose() + n * mean * mean.transpose();
  Matrix psi = base_.sigma0 + 0.5 * (scatter + scatter.transpose());
  Matrix cov = sample_inverse_wishart(base_.alpha0 + n, psi, rng);
  return Component::make(std::move(mean), std::move(cov));
}

std::pair<double, Matrix> GaussianKernel::sigma0_conditional(
    std::span<const Component> components) const {
  const Eigen::Index d = base_.m0.size();
  const Matrix identity = Matrix::Identity(d, d);
  double dof = base_.beta0;
  Matrix precision = (base_.gamma0 * base_.s0).llt().solve(identity);
  for (const Component& c : components) {
    dof += base_.alpha0;
    precision += c.cov.llt().solve(identity);
  }
  Matrix scale = precision.llt().solve(identity);
  return {dof, 0.5 * (scale + scale.transpose())};
}

void GaussianKernel::update_hyper(std::span<const Component> components,
                                  Rng& rng) {
  auto [dof, scale] = sigma0_conditional(components);
  Matrix s = sample_wishart(dof, scale, rng);
  base_.sigma0 = 0.5 * (s + s.transpose());
}

void GaussianKernel::sample_hyper_prior(Rng& rng) { update_hyper({}, rng); }

void GaussianKernel::sample_observation(const Component& c,
                                        std::span<double> out,
                                        Rng& rng) const {
  Vector y = sample_mvn(c.mean, c.chol, rng);
  std::copy(y.data(), y.data() + y.size(), out.begin());
}

// ---------------------------------------------------------------------------

namespace {

struct Range {
  Vector mid;
  Vector half;
};

Range data_range(const Dataset& data) {
  if (data.size() < 2) {
    throw std::invalid_argument("weakly informative prior needs at least two "
                                "observations");
  }
  const auto d = static_cast<Eigen::Index>(data.dim());
  Range r{Vector(d), Vector(d)};
  for (Eigen::Index j = 0; j < d; ++j) {
    double lo = data(0, j), hi = data(0, j);
    for (std::size_t i = 1; i < data.size(); ++i) {
      lo = std::min(lo, data(i, j));
      hi = std::max(hi, data(i, j));
    }
    if (!(hi > lo)) {
      throw std::invalid_argument("zero data range in dimension " +
                                  std::to_string(j));
    }
    r.mid(j) = 0.5 * (lo + hi);
    r.half(j) = 0.5 * (hi - lo);
  }
  return r;
}

}  // namespace

NonconjugateGaussianBase build_weakly_informative(const Dataset& data) {
  Range r = data_range(data);
  double d = static_cast<double>(data.dim());
  NonconjugateGaussianBase base;
  base.m0 = r.mid;
  base.s0 = r.half.array().square().matrix().asDiagonal();
  base.alpha0 = d + 3.0;
  base.beta0 = d - 0.6;
  base.gamma0 = calibrated_gamma0(base.alpha0, base.beta0, data.dim());
  base.sigma0 = base.beta0 * base.gamma0 * base.s0;
  return base;
}

ConjugateNormalBase build_weakly_informative_conjugate(const Dataset& data) {
  if (data.dim() != 1) {
    throw std::invalid_argument("conjugate normal kernel requires 1-D data");
  }
  Range r = data_range(data);
  ConjugateNormalBase base;
  base.m0 = r.mid(0);
  base.s0 = r.half(0) * r.half(0);
  base.alpha0 = 4.0;
  base.beta0 = 0.4;
  base.gamma0 = calibrated_gamma0(base.alpha0, base.beta0, 1);
  base.sigma0 = base.beta0 * base.gamma0 * base.s0;
  return base;
}

}  // namespace nggp
