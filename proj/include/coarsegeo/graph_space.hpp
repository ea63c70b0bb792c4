#pragma once

#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "coarsegeo/metric_graph.hpp"

namespace coarsegeo {

// A subset of a graph together with its distance field and nearest-point
// sets. Built either by BFS from the members or, for factor cosets in a
// Cayley ball, from the exact closed form (correct up to the boundary).
class GraphTarget {
 public:
  GraphTarget() = default;
  GraphTarget(const MetricGraph& g, VertexSubset X);
  static GraphTarget exact_coset(const MetricGraph& g, const FactorCoset& X);

  const VertexSubset& subset() const { return data_->subset; }
  bool contains(VertexId v) const { return data_->subset.contains(v); }
  std::int64_t distance_to(VertexId v) const { return data_->dist[v]; }
  const std::vector<std::int32_t>& distance_field() const { return data_->dist; }
  // d(v, X)-minimisers; with the exact mode these may lie outside the ball,
  // in which case the set is empty and `projection_inside(v)` is false.
  std::span<const VertexId> nearest(VertexId v) const {
    return {data_->near.data() + data_->near_off[v], data_->near.data() + data_->near_off[v + 1]};
  }
  bool projection_inside(VertexId v) const { return nearest(v).size() > 0; }
  std::vector<VertexId> project(VertexId v, std::int64_t delta) const;
  bool exact() const { return data_->coset.has_value(); }
  const std::optional<FactorCoset>& coset() const { return data_->coset; }

  friend bool operator==(const GraphTarget& a, const GraphTarget& b) {
    return a.data_ == b.data_ || a.data_->subset == b.data_->subset;
  }

 private:
  struct Data {
    const MetricGraph* graph = nullptr;
    VertexSubset subset;
    std::vector<std::int32_t> dist;
    std::vector<std::uint64_t> near_off;
    std::vector<VertexId> near;
    std::optional<FactorCoset> coset;
  };
  std::shared_ptr<const Data> data_;
};

class GraphSpace {
 public:
  using Point = VertexId;
  using Path = PathSeq;
  using Target = GraphTarget;

  explicit GraphSpace(const MetricGraph& g) : g_(&g) {}

  const MetricGraph& graph() const { return *g_; }
  std::int64_t distance(VertexId u, VertexId v) const;
  bool contains(const Target& X, VertexId v) const { return X.contains(v); }
  std::int64_t distance_to(const Target& X, VertexId v) const { return X.distance_to(v); }
  std::vector<VertexId> project(const Target& X, VertexId v, std::int64_t delta) const {
    return X.project(v, delta);
  }
  bool same_target(const Target& a, const Target& b) const { return a == b; }
  // With a bound installed: diam(N_U(a) & N_U(b)) < bound(U) for U = 0..probe.
  // Without one: the targets differ.
  bool bounded_intersection(const Target& a, const Target& b) const;
  void set_intersection_bound(std::function<std::int64_t(std::int64_t)> bound, int probe_radius) {
    bound_ = std::move(bound);
    probe_ = probe_radius;
  }
  std::int64_t diam(std::span<const VertexId> pts) const { return g_->diam_of(pts); }

  Path trivial_path(VertexId x) const { return Path{x}; }
  Path geodesic(VertexId x, VertexId y) const { return g_->a_geodesic(x, y); }
  Path concat(std::span<const Path* const> pieces) const;
  QuasigeodesicVerdict is_quasigeodesic(const Path& p, double lambda, double c) const {
    return g_->is_quasigeodesic(p, lambda, c);
  }
  double fit_c(const Path& p, double lambda) const { return g_->fit_c(p, lambda); }

 private:
  const MetricGraph* g_;
  // BFS rows for graphs without an exact metric; not thread safe.
  mutable std::unordered_map<VertexId, std::vector<std::int32_t>> rows_;
  std::function<std::int64_t(std::int64_t)> bound_;
  int probe_ = 0;
};

}  // namespace coarsegeo
