// Apache License, Version 2.0, refer to LICENSE.txt

#include <doctest.h>

#include "nggp/kernels.hh"
#include "nggp/partition.hh"

using namespace nggp;

namespace {
using Part = Partition<ScalarStats, int>;
}

TEST_CASE("attach, detach and canonical labels") {
  Dataset data = Dataset::column({1.0, 2.0, 3.0, 4.0, 5.0});
  Part part(data);
  CHECK(part.num_clusters() == 0);
  ClusterId a = part.attach_new(0, 10);
  ClusterId b = part.attach_new(1, 20);
  part.attach(2, a);
  part.attach(3, b);
  part.attach(4, a);
  CHECK(part.num_clusters() == 2);
  CHECK(part.num_assigned() == 5);
  CHECK(part.labels() == std::vector<int>{0, 1, 0, 1, 0});
  CHECK(part.shape().sizes == std::vector<std::size_t>{3, 2});
  CHECK(part.cluster(a).stats.sum == doctest::Approx(9.0));
  CHECK(part.cluster(a).stats.sum_sq == doctest::Approx(35.0));

  auto r = part.detach(0);
  CHECK_FALSE(r.emptied);
  CHECK_FALSE(r.param.has_value());
  CHECK(part.labels() == std::vector<int>{-1, 0, 1, 0, 1});
  CHECK(part.cluster(a).stats.sum == doctest::Approx(8.0));

  part.detach(3);
  auto r2 = part.detach(1);
  CHECK(r2.emptied);
  REQUIRE(r2.param.has_value());
  CHECK(*r2.param == 20);
  CHECK(part.num_clusters() == 1);
}

TEST_CASE("cluster ids are recycled and creation order is kept") {
  Dataset data = Dataset::column({0.0, 0.0, 0.0});
  Part part(data);
  ClusterId a = part.attach_new(0, 1);
  ClusterId b = part.attach_new(1, 2);
  part.detach(0);
  ClusterId c = part.attach_new(0, 3);
  CHECK(c == a);
  ClusterId d = part.attach_new(2, 4);
  std::vector<ClusterId> order(part.clusters().begin(), part.clusters().end());
  CHECK(order == std::vector<ClusterId>{b, c, d});
  CHECK(part.cluster(c).param == 3);
  CHECK(part.cluster(c).members.size() == 1);
}

TEST_CASE("refresh_stats recomputes after in-place data changes") {
  Dataset data = Dataset::column({1.0, 2.0});
  Part part(data);
  ClusterId a = part.attach_new(0, 0);
  part.attach(1, a);
  data(0, 0) = 10.0;
  part.refresh_stats();
  CHECK(part.cluster(a).stats.sum == doctest::Approx(12.0));
  CHECK(part.cluster(a).stats.count == doctest::Approx(2.0));
}

TEST_CASE("shape validation") {
  PartitionShape s({1, 1, 3});
  CHECK(s.num_clusters() == 3);
  CHECK(s.n == 5);
}
