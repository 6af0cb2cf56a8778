// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "nggp/diagnostics.hh"
#include "nggp/geweke.hh"
#include "nggp/kernels.hh"

using namespace nggp;

namespace {

ConjugateNormalBase conj_base() {
  ConjugateNormalBase b;
  b.m0 = 0.5;
  b.s0 = 2.0;
  b.alpha0 = 5.0;
  b.beta0 = 3.0;
  b.gamma0 = 0.2;
  b.sigma0 = 1.3;
  return b;
}

NonconjugateGaussianBase gauss_base(std::size_t d) {
  NonconjugateGaussianBase b;
  auto D = static_cast<Eigen::Index>(d);
  b.m0 = Vector::Constant(D, 0.5);
  b.s0 = Matrix::Identity(D, D) * 2.0;
  b.alpha0 = static_cast<double>(d) + 5.0;
  b.beta0 = static_cast<double>(d) + 1.0;
  b.gamma0 = 0.2;
  b.sigma0 = Matrix::Identity(D, D) * 1.3;
  return b;
}

ScalarStats stats_of(std::initializer_list<double> ys) {
  ScalarStats s;
  for (double y : ys) s.add(std::span<const double>(&y, 1));
  return s;
}

double zscore(const std::vector<double>& x, double expect) {
  return (sample_mean(x) - expect) / std::sqrt(sample_variance(x) / static_cast<double>(x.size()));
}

}  // namespace

TEST_CASE("conjugate marginal: empty cluster and single point") {
  ConjugateNormalKernel k(conj_base());
  CHECK(k.log_marginal(ScalarStats()) == 0.0);
  // A single point is Student-t with alpha0 dof, location m0 and squared
  // scale Sigma0 (1 + 1 / kappa0) / alpha0.
  auto b = conj_base();
  double kappa0 = b.sigma0 / b.s0;
  double scale = std::sqrt(b.sigma0 * (1.0 + 1.0 / kappa0) / b.alpha0);
  boost::math::students_t t(b.alpha0);
  for (double y : {-3.0, 0.5, 2.7}) {
    double expect = std::log(boost::math::pdf(t, (y - b.m0) / scale) / scale);
    CHECK(k.log_marginal(stats_of({y})) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("conjugate marginal obeys the chain rule") {
  ConjugateNormalKernel k(conj_base());
  std::vector<double> ys = {0.3, -1.2, 2.2, 0.9, 0.95};
  ScalarStats s;
  double acc = 0.0;
  for (double y : ys) {
    acc += k.log_predictive(std::span<const double>(&y, 1), s);
    s.add(std::span<const double>(&y, 1));
  }
  CHECK(k.log_marginal(s) == doctest::Approx(acc).epsilon(1e-10));
}

TEST_CASE("conjugate predictive integrates to one") {
  ConjugateNormalKernel k(conj_base());
  ScalarStats s = stats_of({0.1, 0.4, -0.3});
  double h = 1e-3, total = 0.0;
  for (double y = -40.0; y <= 40.0; y += h) {
    total += std::exp(k.log_predictive(std::span<const double>(&y, 1), s)) * h;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("conjugate marginal matches a Monte Carlo average over mu0") {
  ConjugateNormalKernel k(conj_base());
  Rng rng(3);
  double y = 1.1;
  std::vector<double> f;
  for (int t = 0; t < 200000; ++t) {
    auto c = k.sample_prior(rng);
    f.push_back(std::exp(k.log_likelihood(std::span<const double>(&y, 1), c)));
  }
  double expect = std::exp(k.log_marginal(stats_of({y})));
  CHECK(std::abs(zscore(f, expect)) < 4.0);
}

TEST_CASE("conjugate posterior draws match the posterior predictive") {
  ConjugateNormalKernel k(conj_base());
  ScalarStats s = stats_of({0.2, 0.5, 0.4, 0.9});
  Rng rng(4);
  double y = 0.7;
  std::vector<double> f;
  for (int t = 0; t < 200000; ++t) {
    auto c = k.sample_posterior(s, rng);
    f.push_back(std::exp(k.log_likelihood(std::span<const double>(&y, 1), c)));
  }
  double expect = std::exp(k.log_predictive(std::span<const double>(&y, 1), s));
  CHECK(std::abs(zscore(f, expect)) < 4.0);
}

TEST_CASE("Sigma0 conditionals") {
  SUBCASE("conjugate, no components: the hyperprior") {
    ConjugateNormalKernel k(conj_base());
    auto [shape, rate] = k.sigma0_conditional({});
    CHECK(shape == doctest::Approx(1.5));
    CHECK(rate == doctest::Approx(1.0 / (2.0 * 0.2 * 2.0)));
  }
  SUBCASE("conjugate, two components") {
    auto b = conj_base();
    ConjugateNormalKernel k(b);
    std::vector<NormalComponent> cs = {NormalComponent::make(1.0, 0.5),
                                       NormalComponent::make(-0.5, 2.0)};
    auto [shape, rate] = k.sigma0_conditional(cs);
    CHECK(shape == doctest::Approx(b.beta0 / 2 + 2 * (b.alpha0 + 1) / 2));
    double d1 = 0.5 * 0.5 / b.s0, d2 = 1.0 / b.s0;
    double expect = 1.0 / (2 * b.gamma0 * b.s0) + 0.5 * ((1 + d1) / 0.5 + (1 + d2) / 2.0);
    CHECK(rate == doctest::Approx(expect));
  }
  SUBCASE("nonconjugate in one dimension reduces to a Gamma") {
    auto b = gauss_base(1);
    GaussianKernel k(b);
    std::vector<GaussianComponent> cs = {
        GaussianComponent::make(Vector::Constant(1, 0.0), Matrix::Constant(1, 1, 0.5)),
        GaussianComponent::make(Vector::Constant(1, 2.0), Matrix::Constant(1, 1, 4.0))};
    auto [dof, scale] = k.sigma0_conditional(cs);
    CHECK(dof == doctest::Approx(b.beta0 + 2 * b.alpha0));
    double inv = 1.0 / (b.gamma0 * 2.0) + 1.0 / 0.5 + 1.0 / 4.0;
    CHECK(scale(0, 0) == doctest::Approx(1.0 / inv));
  }
}

TEST_CASE("nonconjugate prior moments") {
  GaussianKernel k(gauss_base(2));
  Rng rng(8);
  std::vector<double> m0, m1, cov00;
  for (int t = 0; t < 100000; ++t) {
    auto c = k.sample_prior(rng);
    m0.push_back(c.mean(0));
    m1.push_back(c.mean(1));
  }
  CHECK(std::abs(zscore(m0, 0.5)) < 4.0);
  CHECK(std::abs(zscore(m1, 0.5)) < 4.0);
  CHECK(sample_variance(m0) == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("nonconjugate log-likelihood is the Gaussian density") {
  Matrix cov(2, 2);
  cov << 2.0, 0.3, 0.3, 0.5;
  Vector mean(2);
  mean << 1.0, -1.0;
  auto c = GaussianComponent::make(mean, cov);
  GaussianKernel k(gauss_base(2));
  std::vector<double> y = {0.2, 0.4};
  Vector d(2);
  d << -0.8, 1.4;
  double expect = -std::log(2 * M_PI) - 0.5 * std::log(cov.determinant()) -
                  0.5 * d.dot(cov.inverse() * d);
  CHECK(k.log_likelihood(y, c) == doctest::Approx(expect).epsilon(1e-12));
  CHECK_THROWS_AS(GaussianComponent::make(mean, -cov), std::runtime_error);
}

TEST_CASE("nonconjugate Gibbs update: joint test on (Sigma0, parameters, data)") {
  // Marginal-conditional draws versus Gibbs updates of the parameters and
  // Sigma0 alternated with data redraws, for three clusters of two points.
  auto b = gauss_base(1);
  GaussianKernel proto(b);
  const int K = 3, m = 2;
  Rng mc_rng(11), sc_rng(12);
  auto draw = [&](Rng& rng, GaussianKernel& k, std::vector<GaussianComponent>& cs,
                  std::vector<GaussianStats>& st) {
    k.sample_hyper_prior(rng);
    cs.clear();
    st.assign(K, GaussianStats(1));
    for (int c = 0; c < K; ++c) {
      cs.push_back(k.sample_prior(rng));
      for (int j = 0; j < m; ++j) {
        double y;
        k.sample_observation(cs.back(), std::span<double>(&y, 1), rng);
        st[static_cast<std::size_t>(c)].add(std::span<const double>(&y, 1));
      }
    }
  };
  auto stats = [](const GaussianKernel& k, const std::vector<GaussianComponent>& cs,
                  const std::vector<GaussianStats>& st) {
    return std::vector<double>{k.hyper_summary(), cs[0].mean(0), std::log(cs[0].cov(0, 0)),
                               st[0].sum(0) / m};
  };
  GaussianKernel mc_k = proto, sc_k = proto;
  std::vector<GaussianComponent> mc_cs, sc_cs;
  std::vector<GaussianStats> mc_st, sc_st;
  draw(sc_rng, sc_k, sc_cs, sc_st);
  auto r = geweke_test(
      [&] {
        draw(mc_rng, mc_k, mc_cs, mc_st);
        return stats(mc_k, mc_cs, mc_st);
      },
      [&] {
        for (int c = 0; c < K; ++c) {
          auto& comp = sc_cs[static_cast<std::size_t>(c)];
          comp = sc_k.sample_posterior(sc_st[static_cast<std::size_t>(c)], comp, sc_rng);
        }
        sc_k.update_hyper(sc_cs, sc_rng);
        for (int c = 0; c < K; ++c) {
          GaussianStats fresh(1);
          for (int j = 0; j < m; ++j) {
            double y;
            sc_k.sample_observation(sc_cs[static_cast<std::size_t>(c)], std::span<double>(&y, 1), sc_rng);
            fresh.add(std::span<const double>(&y, 1));
          }
          sc_st[static_cast<std::size_t>(c)] = fresh;
        }
        return stats(sc_k, sc_cs, sc_st);
      },
      {"log_sigma0", "mean", "log_var", "data_mean"}, 30000);
  INFO(r.max_abs_z());
  CHECK(r.passed(4.0));
}

TEST_CASE("range-based prior construction") {
  Dataset data = Dataset::column({0.0, 0.25, 1.0});
  auto b = build_weakly_informative(data);
  CHECK(b.m0(0) == doctest::Approx(0.5));
  CHECK(b.s0(0, 0) == doctest::Approx(0.25));
  CHECK(b.alpha0 == doctest::Approx(4.0));
  CHECK(b.beta0 == doctest::Approx(0.4));
  auto cb = build_weakly_informative_conjugate(data);
  CHECK(cb.m0 == doctest::Approx(0.5));
  CHECK(cb.s0 == doctest::Approx(0.25));

  CHECK_THROWS_AS(build_weakly_informative(Dataset::column({1.0})), std::invalid_argument);
  CHECK_THROWS_AS(build_weakly_informative(Dataset::column({2.0, 2.0})), std::invalid_argument);
  Dataset flat(3, 2, {0.0, 1.0, 1.0, 1.0, 2.0, 1.0});
  CHECK_THROWS_AS(build_weakly_informative(flat), std::invalid_argument);
}

TEST_CASE("calibrated gamma0 gives E[Sigma] = S0 / 50") {
  // Rao-Blackwellized: E[Sigma | Sigma0] = Sigma0 / (alpha0 - D - 1), so
  // averaging that over hyperprior draws avoids the heavy tails of Sigma.
  for (std::size_t d : {1u, 2u}) {
    auto D = static_cast<Eigen::Index>(d);
    Dataset data(2, d);
    for (std::size_t j = 0; j < d; ++j) {
      data(0, j) = 0.0;
      data(1, j) = 2.0 + static_cast<double>(j);
    }
    auto b = build_weakly_informative(data);
    GaussianKernel k(b);
    Rng rng(31 + d);
    std::vector<double> diag0;
    for (int t = 0; t < 100000; ++t) {
      k.sample_hyper_prior(rng);
      diag0.push_back(k.sigma0()(0, 0) / (b.alpha0 - static_cast<double>(d) - 1.0));
    }
    CHECK(std::abs(zscore(diag0, b.s0(0, 0) / kPriorRangeRatio)) < 4.0);
    (void)D;
  }
  auto cb = build_weakly_informative_conjugate(Dataset::column({0.0, 4.0}));
  ConjugateNormalKernel ck(cb);
  Rng rng(40);
  std::vector<double> v;
  for (int t = 0; t < 100000; ++t) {
    ck.sample_hyper_prior(rng);
    v.push_back(ck.sigma0() / (cb.alpha0 - 2.0));
  }
  CHECK(std::abs(zscore(v, cb.s0 / kPriorRangeRatio)) < 4.0);
}
