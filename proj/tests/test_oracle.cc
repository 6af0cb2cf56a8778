// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <numeric>

#include "nggp/diagnostics.hh"
#include "nggp/geweke.hh"
#include "nggp/oracle.hh"

using namespace nggp;

TEST_CASE("set partitions are counted by the Bell numbers") {
  CHECK(enumerate_partitions(1).partitions.size() == 1);
  CHECK(enumerate_partitions(3).partitions.size() == 5);
  CHECK(enumerate_partitions(8).partitions.size() == 4140);
  CHECK_THROWS_AS(enumerate_partitions(11), std::invalid_argument);
  auto list = enumerate_partitions(4);
  std::size_t two_two = 0;
  for (const auto& part : list.partitions) {
    auto shape = shape_of(part);
    std::sort(shape.sizes.begin(), shape.sizes.end());
    if (shape.sizes == std::vector<std::size_t>{2, 2}) ++two_two;
  }
  CHECK(two_two == 3);
}

TEST_CASE("integer partitions carry set-partition counts") {
  auto classes = integer_partitions(6);
  CHECK(classes.size() == 11);
  double total = 0.0;
  for (const auto& c : classes) total += std::exp(c.log_count);
  CHECK(total == doctest::Approx(203.0));
}

TEST_CASE("EPPF sums to one over all partitions") {
  for (double sigma : {0.0, 0.5}) {
    for (std::size_t n : {2u, 5u}) {
      CHECK(eppf_normalization(n, NggpParams(2.0, sigma, 1.0)) ==
            doctest::Approx(1.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("quadrature EPPF equals the DP closed form") {
  PartitionShape shape({3, 1, 2});
  for (double a : {0.5, 4.0}) {
    CHECK(eppf_by_quadrature(shape, NggpParams(a, 0.0, 1.0)) ==
          doctest::Approx(dp_eppf(shape, a)).epsilon(1e-10));
  }
}

TEST_CASE("tail rate: DP exponential integral, limits") {
  NggpParams dp(2.0, 0.0, 1.0);
  for (double S : {1e-3, 0.5, 3.0}) {
    CHECK(levy_tail_rate(S, 0.5, dp) ==
          doctest::Approx(2.0 * boost::math::expint(1, 1.5 * S)).epsilon(1e-9));
  }
  NggpParams p(1.0, 0.5, 1.0);
  CHECK(levy_tail_rate(200.0, 0.0, p) < 1e-80);
  CHECK(levy_tail_rate(1e-10, 0.0, p) > levy_tail_rate(1e-8, 0.0, p) * 9.9);
}

TEST_CASE("cluster-count law") {
  SUBCASE("sums to one") {
    for (double sigma : {0.0, 0.3, 0.8}) {
      auto d = num_clusters_distribution(40, NggpParams(1.5, sigma, 1.0));
      CHECK(std::accumulate(d.begin(), d.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  SUBCASE("DP with two observations") {
    auto d = num_clusters_distribution(2, NggpParams(3.0, 0.0, 1.0));
    CHECK(d[0] == doctest::Approx(0.25).epsilon(1e-9));
  }
  SUBCASE("agrees with enumeration") {
    NggpParams p(0.8, 0.4, 2.0);
    auto d = num_clusters_distribution(6, p);
    std::vector<double> enumerated(6, 0.0);
    for (const auto& part : enumerate_partitions(6).partitions) {
      enumerated[part.size() - 1] += eppf_by_quadrature(shape_of(part), p);
    }
    for (std::size_t k = 0; k < 6; ++k) CHECK(d[k] == doctest::Approx(enumerated[k]).epsilon(1e-7));
  }
}

TEST_CASE("joint prior sampler reproduces the cluster-count law") {
  NggpParams p(1.1, 0.35, 1.0);
  JointPriorSampler sampler(5);
  Rng rng(13);
  std::vector<double> k1(5, 0.0);
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) {
    auto d = sampler.sample(p, rng);
    int k = *std::max_element(d.labels.begin(), d.labels.end()) + 1;
    k1[static_cast<std::size_t>(k - 1)] += 1.0 / reps;
    REQUIRE(d.labels[0] == 0);
  }
  auto exact = num_clusters_distribution(5, p);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(std::abs(k1[k] - exact[k]) < 4.0 * std::sqrt(exact[k] * (1 - exact[k]) / reps) + 1e-4);
  }
}

TEST_CASE("geweke_compare: same law passes, shifted law fails") {
  Rng rng(2);
  std::vector<std::vector<double>> a(1), b(1), c(1);
  for (int t = 0; t < 20000; ++t) {
    a[0].push_back(rng.normal());
    b[0].push_back(rng.normal());
    c[0].push_back(rng.normal(0.2, 1.0));
  }
  CHECK(geweke_compare(a, b, {"x"}, true).passed(4.0));
  CHECK_FALSE(geweke_compare(a, c, {"x"}, true).passed(4.0));
  std::vector<std::vector<double>> k1(1, std::vector<double>(50, 1.0));
  CHECK(geweke_compare(k1, k1, {"k"}, true).max_abs_z() == 0.0);
}
