#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <iosfwd>
#include <vector>

#include "coarsegeo/group_model.hpp"
#include "coarsegeo/quasigeodesic.hpp"
#include "coarsegeo/subgroup.hpp"

namespace coarsegeo {

using VertexId = std::uint32_t;
inline constexpr VertexId kNoVertex = 0xffffffffu;
inline constexpr std::int32_t kUnreached = -1;

// Consecutive entries must be adjacent.
using PathSeq = std::vector<VertexId>;

enum class SubsetProvenance { kSubgroup, kCoset, kAdHoc };

struct VertexSubset {
  std::vector<VertexId> members;  // sorted, unique
  SubsetProvenance provenance = SubsetProvenance::kAdHoc;

  static VertexSubset from(std::vector<VertexId> ids, SubsetProvenance p = SubsetProvenance::kAdHoc);
  bool contains(VertexId v) const;
  std::size_t size() const { return members.size(); }
  bool empty() const { return members.empty(); }
  friend bool operator==(const VertexSubset& a, const VertexSubset& b) { return a.members == b.members; }
};

// A measured quantity in a finite ball. `trusted` is false when the data
// touched the boundary shell and the true value may be larger.
struct Measured {
  std::int64_t value = 0;
  bool trusted = true;
  bool unbounded = false;
};

class MetricGraph {
 public:
  static constexpr std::size_t kDefaultVertexBudget = 12'000'000;

  // Cayley-graph ball of the given radius around the identity, grown by BFS.
  static MetricGraph ball(const GroupModel& model, int radius,
                          std::size_t max_vertices = kDefaultVertexBudget);
  // General unit-edge graph from adjacency lists.
  static MetricGraph from_adjacency(const std::vector<std::vector<VertexId>>& adj);

  // Same vertex ids, with all edges at the given vertices (or the given
  // edges) removed. The result measures distances by BFS.
  MetricGraph without_vertices(std::span<const VertexId> removed) const;
  MetricGraph without_edges(std::span<const std::pair<VertexId, VertexId>> removed) const;

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return adj_.size() / 2; }
  std::span<const VertexId> neighbors(VertexId v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  // Generator letter carried by each edge of neighbors(v); only for Cayley balls.
  std::span<const Letter> edge_letters(VertexId v) const {
    return {letters_.data() + offsets_[v], letters_.data() + offsets_[v + 1]};
  }

  bool has_labels() const { return model_ != nullptr; }
  const GroupModel& model() const;
  const Element& label(VertexId v) const { return labels_.at(v); }
  std::optional<VertexId> find(const Element& g) const;
  VertexId root() const { return 0; }
  // Radius the ball was grown to (or the max BFS depth from vertex 0).
  int radius() const { return radius_; }
  // Distance from the root (word length for Cayley balls).
  int depth(VertexId v) const { return depth_[v]; }
  std::vector<std::size_t> sphere_sizes() const;
  // True when distances come from the exact group metric. Balls are
  // geodesically convex, so this agrees with BFS inside the ball.
  bool exact_metric() const { return exact_; }

  std::vector<std::int32_t> bfs(std::span<const VertexId> sources, int max_depth = -1) const;
  std::vector<std::int32_t> bfs(VertexId source, int max_depth = -1) const {
    return bfs(std::span<const VertexId>(&source, 1), max_depth);
  }
  std::int64_t distance(VertexId u, VertexId v) const;
  // Geodesic from u to v; at each step the lowest generator letter (or the
  // smallest neighbour id) that decreases the distance to v.
  PathSeq a_geodesic(VertexId u, VertexId v) const;
  bool is_path(const PathSeq& p) const;

  VertexSubset neighborhood(const VertexSubset& X, int U) const;
  // Flagged untrusted if X meets the outer shell of the given width.
  Measured diam(const VertexSubset& X, int shell = 1) const;
  std::int64_t diam_of(std::span<const VertexId> pts) const;
  VertexSubset proj(std::span<const VertexId> A, const VertexSubset& X, int delta) const;
  QuasigeodesicVerdict is_quasigeodesic(const PathSeq& p, double lambda, double c) const;
  double fit_c(const PathSeq& p, double lambda) const;

  // Members of the coset g * factor inside the ball (exact membership).
  VertexSubset coset_subset(const FactorCoset& X) const;
  VertexSubset subgroup_subset(const SubgroupSpec& H, bool* stabilized = nullptr) const;

  // Serialization used by the ball cache.
  void save(std::ostream& out) const;
  static MetricGraph load(std::istream& in, const GroupModel& model);

 private:
  void build_index();
  void finish_depths();

  std::shared_ptr<const GroupModel> model_;
  std::vector<std::uint64_t> offsets_;
  std::vector<VertexId> adj_;
  std::vector<Letter> letters_;
  std::vector<Element> labels_;
  std::vector<int> depth_;
  std::vector<VertexId> index_;  // open addressing over labels_
  int radius_ = 0;
  bool exact_ = false;
};

}  // namespace coarsegeo
