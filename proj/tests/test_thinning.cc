// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <cmath>

#include "nggp/diagnostics.hh"
#include "nggp/oracle.hh"
#include "nggp/thinning.hh"

using namespace nggp;

TEST_CASE("thinning bound dominates the Levy density") {
  NggpParams p(1.3, 0.6, 0.8);
  const double u = 0.7;
  for (double t : {1e-6, 1e-3, 0.1, 2.0}) {
    for (double f : {1.0, 1.001, 2.0, 50.0}) {
      double s = t * f;
      CHECK(thinning_bound(t, s, u, p) >= levy_density(s, u, p) * (1.0 - 1e-14));
    }
    CHECK(thinning_bound(t, t, u, p) == doctest::Approx(levy_density(t, u, p)).epsilon(1e-13));
  }
}

TEST_CASE("thinning cumulative and inverse are consistent") {
  NggpParams p(2.0, 0.3, 1.0);
  const double u = 1.5;
  for (double t : {1e-5, 0.01, 1.0}) {
    double total = std::exp(log_thinning_bound_total(t, u, p));
    for (double frac : {1e-12, 0.1, 0.5, 0.999}) {
      double r = frac * total;
      double s = thinning_inverse(t, r, u, p);
      CHECK(s >= t);
      CHECK(thinning_cumulative(t, s, u, p) == doctest::Approx(r).epsilon(1e-9));
    }
    CHECK(thinning_cumulative(t, 1e6, u, p) == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("expected jumps agree with quadrature of the Levy density") {
  for (double sigma : {0.0, 0.2, 0.5, 0.8}) {
    NggpParams p(1.5, sigma, 1.0);
    for (double S : {1e-4, 0.01, 1.0}) {
      for (double u : {0.0, 2.0}) {
        CHECK(expected_jumps_above(S, u, p) ==
              doctest::Approx(levy_tail_rate(S, u, p)).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("thinning counts are Poisson with the tail rate") {
  Rng rng(3);
  NggpParams p(1.0, 0.5, 1.0);
  const double S = 0.05, u = 0.3;
  std::vector<double> counts;
  for (int r = 0; r < 20000; ++r) {
    auto res = adaptive_thinning(S, AuxiliaryU{std::log(u)}, p, rng);
    counts.push_back(static_cast<double>(res.masses.size()));
    for (std::size_t k = 1; k < res.masses.size(); ++k) REQUIRE(res.masses[k - 1] <= res.masses[k]);
    if (!res.masses.empty()) REQUIRE(res.masses.front() >= S);
  }
  double lambda = levy_tail_rate(S, u, p);
  CHECK(std::abs(sample_mean(counts) - lambda) < 4.0 * std::sqrt(lambda / 20000.0));
  double ratio = sample_variance(counts) / sample_mean(counts);
  CHECK(ratio > 0.9);
  CHECK(ratio < 1.1);
}

TEST_CASE("thinning keeps the largest jumps when capped") {
  Rng rng(4);
  NggpParams p(5.0, 0.5, 1.0);
  auto res = adaptive_thinning(1e-6, AuxiliaryU{-INFINITY}, p, rng, 10);
  CHECK(res.capped);
  REQUIRE(res.masses.size() == 10);
  Rng rng2(4);
  auto full = adaptive_thinning(1e-6, AuxiliaryU{-INFINITY}, p, rng2);
  REQUIRE(full.masses.size() > 10);
  for (std::size_t k = 0; k < 10; ++k) {
    CHECK(res.masses[9 - k] == full.masses[full.masses.size() - 1 - k]);
  }
}

TEST_CASE("prior simulation: DP with two observations") {
  Rng rng(5);
  NggpParams p(1.0, 0.0, 1.0);
  double together = 0.0;
  const int reps = 40000;
  for (int r = 0; r < reps; ++r) {
    together += prior_partition_simulate(2, p, rng).num_clusters() == 1 ? 1.0 : 0.0;
  }
  CHECK(std::abs(together / reps - 0.5) < 4.0 * std::sqrt(0.25 / reps));
}

TEST_CASE("prior simulation matches the exact cluster-count law") {
  for (double sigma : {0.25, 0.6}) {
    NggpParams p(1.2, sigma, 1.0);
    Rng rng(6);
    std::vector<double> ks;
    for (int r = 0; r < 3000; ++r) {
      // A low atom budget exercises the dust approximation as well.
      PriorSimOptions opts;
      opts.max_expected_atoms = 2000;
      ks.push_back(static_cast<double>(prior_partition_simulate(100, p, rng, opts).num_clusters()));
    }
    double expect = expected_num_clusters(100, p);
    CHECK(std::abs(sample_mean(ks) - expect) < 4.0 * std::sqrt(sample_variance(ks) / 3000.0));
  }
}

TEST_CASE("prior simulation raises the threshold when too many atoms are needed") {
  Rng rng(7);
  PriorSimOptions opts;
  opts.max_expected_atoms = 100;
  std::vector<std::size_t> ns = {50, 200};
  auto r = prior_partition_counts(ns, NggpParams(1.0, 0.8, 1.0), rng, opts);
  CHECK(r.threshold_raised);
  CHECK(expected_jumps_above(r.threshold, 0.0, NggpParams(1.0, 0.8, 1.0)) <= 100.0 * 1.0001);
  REQUIRE(r.num_clusters.size() == 2);
  CHECK(r.num_clusters[0] <= r.num_clusters[1]);
  CHECK(r.shape.n == 200);
}
