// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <cmath>

#include "nggp/diagnostics.hh"
#include "nggp/kernels.hh"

using namespace nggp;

TEST_CASE("ESS of iid and AR(1) series") {
  Rng rng(1);
  const std::size_t n = 100000;
  std::vector<double> iid(n), ar(n);
  const double rho = 0.9;
  double x = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    iid[t] = rng.normal();
    x = rho * x + std::sqrt(1 - rho * rho) * rng.normal();
    ar[t] = x;
  }
  CHECK(ess(iid) / n == doctest::Approx(1.0).epsilon(0.06));
  double expect = n * (1 - rho) / (1 + rho);
  CHECK(ess(ar) == doctest::Approx(expect).epsilon(0.1));
}

TEST_CASE("ESS edge cases") {
  std::vector<double> constant(50, 2.0);
  CHECK(ess(constant) == 50.0);
  CHECK_THROWS_AS(ess(std::vector<double>(9, 1.0)), std::invalid_argument);
  std::vector<double> alternating;
  for (int t = 0; t < 100; ++t) alternating.push_back(t % 2 == 0 ? 1.0 : -1.0);
  double e = ess(alternating);
  CHECK(e >= 1.0);
  CHECK(e <= 100.0);
}

TEST_CASE("co-clustering matrix") {
  auto m = coclustering({{0, 0, 1}, {0, 1, 1}});
  std::vector<double> expect = {1, 0.5, 0, 0.5, 1, 0.5, 0, 0.5, 1};
  REQUIRE(m.size() == 9);
  for (std::size_t k = 0; k < 9; ++k) CHECK(m[k] == doctest::Approx(expect[k]));
  // Invariant to relabeling.
  auto r = coclustering({{5, 5, 2}, {7, 3, 3}});
  for (std::size_t k = 0; k < 9; ++k) CHECK(r[k] == doctest::Approx(expect[k]));
}

TEST_CASE("density summaries") {
  auto one = summarize_densities({{0.1, 0.2}});
  CHECK(one.mean[1] == doctest::Approx(0.2));
  CHECK(one.lower[1] == doctest::Approx(0.2));
  CHECK(one.upper[1] == doctest::Approx(0.2));
  std::vector<std::vector<double>> many;
  for (int k = 0; k <= 100; ++k) many.push_back({static_cast<double>(k)});
  auto s = summarize_densities(many);
  CHECK(s.mean[0] == doctest::Approx(50.0));
  CHECK(s.lower[0] == doctest::Approx(2.5));
  CHECK(s.upper[0] == doctest::Approx(97.5));
}

namespace {

Dataset grid_1d(double lo, double hi, std::size_t m) {
  std::vector<double> v;
  for (std::size_t g = 0; g < m; ++g) v.push_back(lo + (hi - lo) * g / (m - 1.0));
  return Dataset::column(v);
}

double trapezoid(const std::vector<double>& f, double h) {
  double t = 0.0;
  for (std::size_t g = 1; g < f.size(); ++g) t += 0.5 * (f[g] + f[g - 1]) * h;
  return t;
}

}  // namespace

TEST_CASE("predictive density integrates to one") {
  Dataset data = Dataset::column({-1.0, -0.8, 1.5, 2.0});
  Dataset grid = grid_1d(-60.0, 60.0, 120001);
  const double h = 120.0 / 120000.0;
  SUBCASE("conjugate, collapsed and with parameters") {
    auto base = build_weakly_informative_conjugate(data);
    for (SamplerKind kind : {SamplerKind::kMarginalConjugate, SamplerKind::kNeal8}) {
      Rng rng(3);
      SamplerOptions opts;
      ChainState<ConjugateNormalKernel> s(data, ConjugateNormalKernel(base), NggpParams(1.0, 0.4, 1.0));
      initialize_chain(s, kind, opts, rng);
      for (int t = 0; t < 5; ++t) sweep(s, kind, opts, rng);
      CHECK(trapezoid(predictive_density(s, kind, grid), h) == doctest::Approx(1.0).epsilon(1e-3));
    }
  }
  SUBCASE("nonconjugate") {
    Rng rng(4);
    SamplerOptions opts;
    ChainState<GaussianKernel> s(data, GaussianKernel(build_weakly_informative(data)),
                                 NggpParams(1.0, 0.4, 1.0));
    initialize_chain(s, SamplerKind::kSlice, opts, rng);
    for (int t = 0; t < 5; ++t) sweep(s, SamplerKind::kSlice, opts, rng);
    CHECK(trapezoid(predictive_density(s, SamplerKind::kSlice, grid), h) ==
          doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("DP predictive puts weight a / (a + n) on a new cluster") {
  // With every cluster far from the grid point the density there is the
  // new-cluster term only.
  Dataset data = Dataset::column({100.0, 100.5, 101.0});
  ConjugateNormalBase b;
  b.m0 = 0.0;
  b.s0 = 1.0;
  b.alpha0 = 4.0;
  b.sigma0 = 0.1;
  ConjugateNormalKernel k(b);
  ChainState<ConjugateNormalKernel> s(data, k, NggpParams(2.0, 0.0, 1.0));
  ClusterId c = s.partition.attach_new(0, NormalComponent::make(100.0, 0.1));
  s.partition.attach(1, c);
  s.partition.attach(2, c);
  Dataset at = Dataset::column({0.0});
  double f0 = std::exp(k.log_predictive(at.row(0), ScalarStats()));
  auto f = predictive_density(s, SamplerKind::kNeal8, at);
  CHECK(f[0] == doctest::Approx(2.0 / 5.0 * f0).epsilon(1e-10));
}
