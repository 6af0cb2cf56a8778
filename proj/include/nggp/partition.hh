// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "nggp/dataset.hh"
#include "nggp/levy.hh"

namespace nggp {

// Sufficient statistics that track nothing; used when a partition only needs
// membership bookkeeping.
struct NoStats {
  explicit NoStats(std::size_t = 0) {}
  void add(std::span<const double>) {}
  void remove(std::span<const double>) {}
};

using ClusterId = std::uint32_t;
inline constexpr ClusterId kUnassigned = std::numeric_limits<ClusterId>::max();

template <typename Param>
struct DetachReceipt {
  ClusterId cluster = kUnassigned;
  bool emptied = false;
  // The parameter of the removed cluster, present iff emptied.
  std::optional<Param> param;
};

// Assignment of observations to clusters with per-cluster members, cached
// sufficient statistics and kernel parameter.
//
// Cluster ids are recycled from a free list. Members are kept in an index
// list with swap-remove, so detach and attach are O(1) apart from the
// insertion-order bookkeeping, which is O(|pi|). The data set is borrowed
// and must outlive the partition.
template <typename Stats, typename Param>
class Partition {
 public:
  struct Cluster {
    std::vector<std::size_t> members;
    Stats stats;
    Param param{};
  };

  explicit Partition(const Dataset& data)
      : data_(&data),
        assignment_(data.size(), kUnassigned),
        slot_(data.size(), 0) {}

  std::size_t num_observations() const { return assignment_.size(); }
  std::size_t num_assigned() const { return num_assigned_; }
  std::size_t num_clusters() const { return order_.size(); }
  const Dataset& data() const { return *data_; }

  ClusterId cluster_of(std::size_t i) const { return assignment_[i]; }
  bool is_assigned(std::size_t i) const { return assignment_[i] != kUnassigned; }

  // Live cluster ids in creation order.
  std::span<const ClusterId> clusters() const { return order_; }

  const Cluster& cluster(ClusterId c) const {
    assert(live(c));
    return clusters_[c];
  }
  Cluster& cluster(ClusterId c) {
    assert(live(c));
    return clusters_[c];
  }
  std::size_t cluster_size(ClusterId c) const { return cluster(c).members.size(); }

  DetachReceipt<Param> detach(std::size_t i) {
    ClusterId c = assignment_[i];
    assert(c != kUnassigned && "detaching an unassigned observation");
    Cluster& cl = clusters_[c];
    std::size_t pos = slot_[i];
    std::size_t last = cl.members.back();
    cl.members[pos] = last;
    slot_[last] = pos;
    cl.members.pop_back();
    cl.stats.remove(data_->row(i));
    assignment_[i] = kUnassigned;
    --num_assigned_;

    DetachReceipt<Param> receipt;
    receipt.cluster = c;
    if (cl.members.empty()) {
      receipt.emptied = true;
      receipt.param = std::move(cl.param);
      release(c);
    }
    return receipt;
  }

  ClusterId attach(std::size_t i, ClusterId c) {
    assert(assignment_[i] == kUnassigned);
    assert(live(c) && "attaching to a nonexistent cluster");
    Cluster& cl = clusters_[c];
    slot_[i] = cl.members.size();
    cl.members.push_back(i);
    cl.stats.add(data_->row(i));
    assignment_[i] = c;
    ++num_assigned_;
    return c;
  }

  ClusterId attach_new(std::size_t i, Param param) {
    ClusterId c = acquire();
    clusters_[c].param = std::move(param);
    return attach(i, c);
  }

  // Recomputes cached statistics after the data set was modified in place.
  void refresh_stats() {
    for (ClusterId c : order_) {
      Cluster& cl = clusters_[c];
      cl.stats = Stats(data_->dim());
      for (std::size_t i : cl.members) cl.stats.add(data_->row(i));
    }
  }

  // Cluster sizes in creation order.
  PartitionShape shape() const {
    std::vector<std::size_t> sizes;
    sizes.reserve(order_.size());
    for (ClusterId c : order_) sizes.push_back(clusters_[c].members.size());
    return PartitionShape(std::move(sizes));
  }

  // Canonical labels: clusters numbered by first appearance in observation
  // order; unassigned observations get -1.
  std::vector<int> labels() const {
    std::vector<int> out(assignment_.size(), -1);
    std::vector<int> relabel(clusters_.size(), -1);
    int next = 0;
    for (std::size_t i = 0; i < assignment_.size(); ++i) {
      ClusterId c = assignment_[i];
      if (c == kUnassigned) continue;
      if (relabel[c] < 0) relabel[c] = next++;
      out[i] = relabel[c];
    }
    return out;
  }

 private:
  bool live(ClusterId c) const { return c < alive_.size() && alive_[c]; }

  ClusterId acquire() {
    ClusterId c;
    if (!free_.empty()) {
      c = free_.back();
      free_.pop_back();
      clusters_[c].stats = Stats(data_->dim());
      clusters_[c].members.clear();
      alive_[c] = true;
    } else {
      c = static_cast<ClusterId>(clusters_.size());
      clusters_.push_back(Cluster{{}, Stats(data_->dim()), Param{}});
      alive_.push_back(true);
    }
    order_.push_back(c);
    return c;
  }

  void release(ClusterId c) {
    alive_[c] = false;
    free_.push_back(c);
    order_.erase(std::find(order_.begin(), order_.end(), c));
  }

  const Dataset* data_;
  std::vector<ClusterId> assignment_;
  std::vector<std::size_t> slot_;
  std::vector<Cluster> clusters_;
  std::vector<bool> alive_;
  std::vector<ClusterId> free_;
  std::vector<ClusterId> order_;
  std::size_t num_assigned_ = 0;
};

}  // namespace nggp
