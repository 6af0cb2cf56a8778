// Apache License, Version 2.0, refer to LICENSE.txt

// Brute-force and numerical references: set-partition enumeration, the
// normalization of the joint law of (partition, U), tail rates of the Levy
// measure, the exact prior law of the number of clusters, and an exact
// sampler of (partition, U) for small n.

#pragma once

#include <cstddef>
#include <vector>

#include "nggp/levy.hh"
#include "nggp/rng.hh"

namespace nggp {

inline constexpr std::size_t kMaxEnumeration = 10;

// A set partition of {0, ..., n-1} as a list of blocks.
using SetPartition = std::vector<std::vector<std::size_t>>;

struct SetPartitionList {
  std::size_t n = 0;
  std::vector<SetPartition> partitions;
};

// All partitions via restricted-growth strings, in lexicographic order of
// the strings. Throws std::invalid_argument for n > 10.
SetPartitionList enumerate_partitions(std::size_t n);

PartitionShape shape_of(const SetPartition& partition);

// int_0^inf exp(log_joint_partition_u(shape, u)) du by adaptive
// Gauss-Kronrod quadrature in v = log u.
double integrate_joint_over_u(const PartitionShape& shape, const NggpParams& p);

// Sum over all partitions of [n] of the EPPF; should equal 1. n <= 8.
double eppf_normalization(std::size_t n, const NggpParams& p);

// The EPPF itself, by quadrature over U.
double eppf_by_quadrature(const PartitionShape& shape, const NggpParams& p);

// int_S^inf v'(s) ds for the U-tilted Levy density, by quadrature in
// x = log(s / S).
double levy_tail_rate(double S, double u, const NggpParams& p);

// Prior law of |pi_n|: entry k - 1 is P(|pi_n| = k). Uses the recurrence
// W(m + 1, k) = (m - sigma k) W(m, k) + W(m, k - 1) for the sum over
// partitions with k blocks of prod_c Gamma(|c| - sigma) / Gamma(1 - sigma),
// and trapezoidal quadrature over log U.
std::vector<double> num_clusters_distribution(std::size_t n, const NggpParams& p);
double expected_num_clusters(std::size_t n, const NggpParams& p);

// Integer partitions of n (block sizes, decreasing) and the number of set
// partitions of [n] with each shape.
struct ShapeClass {
  std::vector<std::size_t> sizes;
  double log_count = 0.0;
};
std::vector<ShapeClass> integer_partitions(std::size_t n);

// Exact draws of (partition, U) from their joint prior for small n: the
// shape and V = log U are drawn jointly from a fine adaptive grid with
// log-linear interpolation, then the set partition uniformly among those
// with that shape. Returns labels in first-appearance order.
class JointPriorSampler {
 public:
  explicit JointPriorSampler(std::size_t n, std::size_t grid_points = 2000);

  struct Draw {
    std::vector<int> labels;
    double log_u = 0.0;
  };
  Draw sample(const NggpParams& p, Rng& rng);

 private:
  std::size_t n_;
  std::size_t grid_points_;
  std::vector<ShapeClass> shapes_;
  std::vector<double> cluster_factor_;  // scratch
  std::vector<double> logw_;            // scratch
};

}  // namespace nggp
