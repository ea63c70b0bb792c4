#include "coarsegeo/graph_space.hpp"

#include <algorithm>

#include "coarsegeo/errors.hpp"

namespace coarsegeo {

GraphTarget::GraphTarget(const MetricGraph& g, VertexSubset X) {
  if (X.empty()) throw EmptyInputError("target subset is empty");
  auto d = std::make_shared<Data>();
  d->graph = &g;
  d->subset = std::move(X);
  d->dist = g.bfs(d->subset.members);
  // Nearest sets propagate along the BFS layers: the minimisers seen from v
  // are the union of those seen from its predecessors.
  const std::size_t n = g.size();
  std::vector<VertexId> order;
  order.reserve(n);
  for (VertexId v = 0; v < n; ++v)
    if (d->dist[v] != kUnreached) order.push_back(v);
  std::stable_sort(order.begin(), order.end(), [&](VertexId a, VertexId b) { return d->dist[a] < d->dist[b]; });
  std::vector<std::vector<VertexId>> sets(n);
  for (auto v : order) {
    if (d->dist[v] == 0) {
      sets[v] = {v};
      continue;
    }
    std::vector<VertexId> acc;
    for (auto w : g.neighbors(v))
      if (d->dist[w] == d->dist[v] - 1) acc.insert(acc.end(), sets[w].begin(), sets[w].end());
    std::sort(acc.begin(), acc.end());
    acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
    sets[v] = std::move(acc);
  }
  d->near_off.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    d->near.insert(d->near.end(), sets[v].begin(), sets[v].end());
    d->near_off[v + 1] = d->near.size();
  }
  data_ = std::move(d);
}

GraphTarget GraphTarget::exact_coset(const MetricGraph& g, const FactorCoset& X) {
  const auto& m = g.model();
  auto d = std::make_shared<Data>();
  d->graph = &g;
  d->coset = X;
  d->subset = g.coset_subset(X);
  if (d->subset.empty()) throw EmptyInputError("coset does not meet the ball");
  const std::size_t n = g.size();
  d->dist.resize(n);
  d->near_off.assign(n + 1, 0);
  for (VertexId v = 0; v < n; ++v) {
    const auto p = coset_projection(m, X, g.label(v));
    d->dist[v] = static_cast<std::int32_t>(p.distance);
    if (auto id = g.find(p.nearest)) d->near.push_back(*id);
    d->near_off[v + 1] = d->near.size();
  }
  GraphTarget t;
  t.data_ = std::move(d);
  return t;
}

std::vector<VertexId> GraphTarget::project(VertexId v, std::int64_t delta) const {
  if (delta < 0) throw PreconditionError("projection slack must be non-negative");
  const auto& g = *data_->graph;
  if (delta == 0) {
    auto s = nearest(v);
    return {s.begin(), s.end()};
  }
  std::vector<VertexId> out;
  if (data_->coset) {
    for (const auto& e : coset_project(g.model(), *data_->coset, g.label(v), delta))
      if (auto id = g.find(e)) out.push_back(*id);
    std::sort(out.begin(), out.end());
    return out;
  }
  const auto lim = data_->dist[v] + delta;
  const auto dv = g.bfs(v, static_cast<int>(lim));
  for (auto x : data_->subset.members)
    if (dv[x] != kUnreached && dv[x] <= lim) out.push_back(x);
  return out;
}

std::int64_t GraphSpace::distance(VertexId u, VertexId v) const {
  if (g_->exact_metric()) return g_->distance(u, v);
  auto it = rows_.find(u);
  if (it == rows_.end()) {
    if (rows_.size() > 4096) rows_.clear();
    it = rows_.emplace(u, g_->bfs(u)).first;
  }
  if (it->second[v] == kUnreached) throw PreconditionError("vertices lie in different components");
  return it->second[v];
}

bool GraphSpace::bounded_intersection(const GraphTarget& a, const GraphTarget& b) const {
  if (a == b) return false;
  if (!bound_) return true;
  for (int U = 0; U <= probe_; ++U) {
    std::vector<VertexId> both;
    const auto& da = a.distance_field();
    const auto& db = b.distance_field();
    for (VertexId v = 0; v < g_->size(); ++v)
      if (da[v] != kUnreached && db[v] != kUnreached && da[v] <= U && db[v] <= U) both.push_back(v);
    if (g_->diam_of(both) >= bound_(U)) return false;
  }
  return true;
}

PathSeq GraphSpace::concat(std::span<const PathSeq* const> pieces) const {
  if (pieces.empty()) throw EmptyInputError("nothing to concatenate");
  PathSeq out;
  for (const auto* p : pieces) {
    if (p->empty()) throw StructuralError("empty piece");
    if (!out.empty() && out.back() != p->front()) throw StructuralError("pieces do not chain");
    out.insert(out.end(), p->begin() + (out.empty() ? 0 : 1), p->end());
  }
  return out;
}

}  // namespace coarsegeo
