// Apache License, Version 2.0, refer to LICENSE.txt

// Gaussian mixture kernels and their base distributions.
//
// Both kernels share the range-based weakly informative prior: component
// covariances are inverse-Wishart IW(alpha0, Sigma0) with mean
// Sigma0 / (alpha0 - D - 1), and the random scale Sigma0 carries a Wishart
// hyperprior W(beta0, gamma0 * S0) with mean beta0 * gamma0 * S0. The
// Wishart is conjugate to the inverse-Wishart scale, so Sigma0 is updated by
// an exact Gibbs draw. In one dimension IW(a, s) is the inverse gamma
// IG(a / 2, s / 2) and W(b, v) is Gamma(b / 2, rate 1 / (2 v)).
//
// A kernel type provides
//   Stats, Component                          per-cluster types
//   log_likelihood(y, component)              log f(y | x)
//   log_prior_density(component)              log mu0(x)
//   sample_prior(rng), sample_posterior(stats, current, rng)
//   update_hyper(components, rng)             Gibbs update of Sigma0
// and, for the conjugate kernel only, log_marginal / log_predictive.

#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "nggp/dataset.hh"
#include "nggp/linalg.hh"
#include "nggp/rng.hh"

namespace nggp {

// Expected component covariance is S0 / kPriorRangeRatio.
inline constexpr double kPriorRangeRatio = 50.0;

// gamma0 such that E[Sigma] = E[Sigma0] / (alpha0 - D - 1) = S0 / 50 under
// the Wishart hyperprior.
double calibrated_gamma0(double alpha0, double beta0, std::size_t dim);

// ---------------------------------------------------------------------------
// Conjugate univariate normal kernel.

struct ScalarStats {
  double count = 0.0;
  double sum = 0.0;
  double sum_sq = 0.0;

  explicit ScalarStats(std::size_t = 1) {}
  void add(std::span<const double> y) {
    count += 1.0;
    sum += y[0];
    sum_sq += y[0] * y[0];
  }
  void remove(std::span<const double> y) {
    count -= 1.0;
    sum -= y[0];
    sum_sq -= y[0] * y[0];
  }
};

struct NormalComponent {
  double mean = 0.0;
  double var = 1.0;
  double log_norm = 0.5 * std::log(2.0 * M_PI);  // 0.5 log(2 pi var)

  static NormalComponent make(double mean, double var) {
    return {mean, var, 0.5 * std::log(2.0 * M_PI * var)};
  }
};

// mu0(dm, dSigma) = N(m; m0, S0 Sigma / Sigma0) IG(Sigma; alpha0/2, Sigma0/2)
// with Sigma0 ~ Gamma(beta0 / 2, rate 1 / (2 gamma0 S0)).
struct ConjugateNormalBase {
  double m0 = 0.0;
  double s0 = 1.0;
  double alpha0 = 4.0;
  double sigma0 = 1.0;
  double beta0 = 0.4;
  double gamma0 = 0.1;

  // Throws std::invalid_argument if a scale parameter is not positive.
  void validate() const;
};

class ConjugateNormalKernel {
 public:
  using Stats = ScalarStats;
  using Component = NormalComponent;
  static constexpr bool kConjugate = true;

  explicit ConjugateNormalKernel(ConjugateNormalBase base);

  const ConjugateNormalBase& base() const { return base_; }
  std::size_t dim() const { return 1; }
  double sigma0() const { return base_.sigma0; }
  void set_sigma0(double s);
  // log Sigma0, the summary reported in traces.
  double hyper_summary() const { return std::log(base_.sigma0); }

  // log f(Y_c), the normal-inverse-gamma marginal likelihood of a cluster.
  double log_marginal(const Stats& stats) const;
  // log f(y | Y_c) = log f({y} u Y_c) - log f(Y_c), as a Student-t density.
  double log_predictive(std::span<const double> y, const Stats& stats) const;

  double log_likelihood(std::span<const double> y, const Component& c) const {
    double d = y[0] - c.mean;
    return -c.log_norm - 0.5 * d * d / c.var;
  }
  double log_prior_density(const Component& c) const;

  Component sample_prior(Rng& rng) const;
  // Exact draw from mu0(dx) prod_{i in c} f(Y_i | x); `current` is unused.
  Component sample_posterior(const Stats& stats, const Component& current,
                             Rng& rng) const;
  Component sample_posterior(const Stats& stats, Rng& rng) const;

  // Shape and rate of the Gamma full conditional of Sigma0.
  std::pair<double, double> sigma0_conditional(
      std::span<const Component> components) const;
  void update_hyper(std::span<const Component> components, Rng& rng);
  void sample_hyper_prior(Rng& rng);

  // Sample a data point from f(. | x).
  void sample_observation(const Component& c, std::span<double> out,
                          Rng& rng) const {
    out[0] = rng.normal(c.mean, std::sqrt(c.var));
  }

 private:
  struct Posterior {
    double kappa, mean, shape, rate;
  };
  Posterior posterior(const Stats& stats) const;

  ConjugateNormalBase base_;
  double kappa0_;  // Sigma0 / S0
};

// ---------------------------------------------------------------------------
// Nonconjugate multivariate normal kernel.

struct GaussianStats {
  double count = 0.0;
  Vector sum;
  Matrix outer;

  explicit GaussianStats(std::size_t dim = 1)
      : sum(Vector::Zero(static_cast<Eigen::Index>(dim))),
        outer(Matrix::Zero(static_cast<Eigen::Index>(dim),
                           static_cast<Eigen::Index>(dim))) {}
  void add(std::span<const double> y) {
    auto v = as_vector(y);
    count += 1.0;
    sum += v;
    outer.noalias() += v * v.transpose();
  }
  void remove(std::span<const double> y) {
    auto v = as_vector(y);
    count -= 1.0;
    sum -= v;
    outer.noalias() -= v * v.transpose();
  }
};

struct GaussianComponent {
  Vector mean;
  Matrix cov;
  Matrix chol;            // lower Cholesky factor of cov
  double log_norm = 0.0;  // 0.5 log det(2 pi cov)

  // Throws std::runtime_error if cov is not positive definite.
  static GaussianComponent make(Vector mean, Matrix cov);
};

// mu0(dm, dSigma) = N_D(m; m0, S0) IW_D(Sigma; alpha0, Sigma0) with
// Sigma0 ~ W_D(beta0, gamma0 S0).
struct NonconjugateGaussianBase {
  Vector m0;
  Matrix s0;
  double alpha0 = 4.0;
  Matrix sigma0;
  double beta0 = 0.4;
  double gamma0 = 0.1;

  std::size_t dim() const { return static_cast<std::size_t>(m0.size()); }
  void validate() const;
};

class GaussianKernel {
 public:
  using Stats = GaussianStats;
  using Component = GaussianComponent;
  static constexpr bool kConjugate = false;

  explicit GaussianKernel(NonconjugateGaussianBase base);

  const NonconjugateGaussianBase& base() const { return base_; }
  std::size_t dim() const { return base_.dim(); }
  const Matrix& sigma0() const { return base_.sigma0; }
  void set_sigma0(Matrix s);
  // log det Sigma0.
  double hyper_summary() const;

  double log_likelihood(std::span<const double> y, const Component& c) const;
  double log_prior_density(const Component& c) const;

  Component sample_prior(Rng& rng) const;
  // One Gibbs scan, mean | cov then cov | mean, leaving
  // mu0(dx) prod_{i in c} f(Y_i | x) invariant.
  Component sample_posterior(const Stats& stats, const Component& current,
                             Rng& rng) const;

  // Dof and scale of the Wishart full conditional of Sigma0.
  std::pair<double, Matrix> sigma0_conditional(
      std::span<const Component> components) const;
  void update_hyper(std::span<const Component> components, Rng& rng);
  void sample_hyper_prior(Rng& rng);

  void sample_observation(const Component& c, std::span<double> out,
                          Rng& rng) const;

 private:
  NonconjugateGaussianBase base_;
  Matrix s0_chol_;
  Matrix s0_inv_;
};

// ---------------------------------------------------------------------------
// Range-based prior construction. m0 is the per-dimension midpoint of the
// data range, s_i the half range, S0 = diag(s_i^2), alpha0 = D + 3,
// beta0 = D - 0.6 and gamma0 from calibrated_gamma0. Sigma0 starts at its
// hyperprior mean. Throws std::invalid_argument on fewer than two rows or a
// zero range in some dimension.
NonconjugateGaussianBase build_weakly_informative(const Dataset& data);
ConjugateNormalBase build_weakly_informative_conjugate(const Dataset& data);

}  // namespace nggp
