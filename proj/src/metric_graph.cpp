#include "coarsegeo/metric_graph.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "coarsegeo/errors.hpp"

namespace coarsegeo {

VertexSubset VertexSubset::from(std::vector<VertexId> ids, SubsetProvenance p) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return VertexSubset{std::move(ids), p};
}

bool VertexSubset::contains(VertexId v) const {
  return std::binary_search(members.begin(), members.end(), v);
}

const GroupModel& MetricGraph::model() const {
  if (!model_) throw PreconditionError("graph carries no group labels");
  return *model_;
}

void MetricGraph::build_index() {
  std::size_t cap = 16;
  while (cap < 2 * labels_.size() + 1) cap *= 2;
  index_.assign(cap, kNoVertex);
  const std::size_t mask = cap - 1;
  ElementHash h;
  for (VertexId v = 0; v < labels_.size(); ++v) {
    std::size_t s = h(labels_[v]) & mask;
    while (index_[s] != kNoVertex) s = (s + 1) & mask;
    index_[s] = v;
  }
}

std::optional<VertexId> MetricGraph::find(const Element& g) const {
  if (index_.empty()) return std::nullopt;
  const std::size_t mask = index_.size() - 1;
  std::size_t s = ElementHash{}(g)&mask;
  while (index_[s] != kNoVertex) {
    if (labels_[index_[s]] == g) return index_[s];
    s = (s + 1) & mask;
  }
  return std::nullopt;
}

MetricGraph MetricGraph::ball(const GroupModel& model, int radius, std::size_t max_vertices) {
  if (radius < 0) throw PreconditionError("ball radius must be non-negative");
  MetricGraph g;
  g.model_ = std::make_shared<const GroupModel>(model);
  g.radius_ = radius;
  g.exact_ = true;
  const auto ngen = model.num_generators();
  std::vector<Letter> alphabet;
  for (std::uint32_t k = 0; k < ngen; ++k) {
    alphabet.push_back({k, false});
    alphabet.push_back({k, true});
  }
  // Grow layer by layer; a letter either lengthens or shortens a word by one.
  // The seen-set stores ids and hashes the labels in place.
  struct IdHash {
    const std::vector<Element>* labels;
    std::size_t operator()(VertexId v) const { return ElementHash{}((*labels)[v]); }
  };
  struct IdEq {
    const std::vector<Element>* labels;
    bool operator()(VertexId a, VertexId b) const { return (*labels)[a] == (*labels)[b]; }
  };
  std::unordered_set<VertexId, IdHash, IdEq> seen(64, IdHash{&g.labels_}, IdEq{&g.labels_});
  g.labels_.push_back(model.identity());
  g.depth_.push_back(0);
  seen.insert(0);
  std::size_t head = 0;
  while (head < g.labels_.size()) {
    const VertexId v = static_cast<VertexId>(head++);
    if (g.depth_[v] == radius) continue;
    for (const auto& l : alphabet) {
      Element y = g.labels_[v];
      model.append_letter(y, l);
      if (model.word_length(y) != g.depth_[v] + 1) continue;
      const auto id = static_cast<VertexId>(g.labels_.size());
      g.labels_.push_back(std::move(y));
      if (!seen.insert(id).second) {
        g.labels_.pop_back();
        continue;
      }
      if (g.labels_.size() > max_vertices)
        throw ResourceError("ball of radius " + std::to_string(radius) + " in " + model.name() +
                            " exceeds the vertex budget of " + std::to_string(max_vertices) +
                            " (reached depth " + std::to_string(g.depth_[v] + 1) + ")");
      g.depth_.push_back(g.depth_[v] + 1);
    }
  }
  seen = decltype(seen)(0, IdHash{&g.labels_}, IdEq{&g.labels_});
  g.build_index();
  g.offsets_.assign(g.labels_.size() + 1, 0);
  for (VertexId v = 0; v < g.labels_.size(); ++v) {
    for (const auto& l : alphabet) {
      Element y = g.labels_[v];
      model.append_letter(y, l);
      if (model.word_length(y) > radius) continue;
      auto w = g.find(y);
      if (!w) throw ResourceError("internal: ball neighbour missing");
      g.adj_.push_back(*w);
      g.letters_.push_back(l);
    }
    g.offsets_[v + 1] = g.adj_.size();
  }
  return g;
}

MetricGraph MetricGraph::from_adjacency(const std::vector<std::vector<VertexId>>& adj) {
  MetricGraph g;
  g.offsets_.assign(adj.size() + 1, 0);
  for (std::size_t v = 0; v < adj.size(); ++v) {
    auto nb = adj[v];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    for (auto w : nb) {
      if (w >= adj.size()) throw StructuralError("adjacency refers to a missing vertex");
      if (w == v) throw StructuralError("self loops are not allowed");
      g.adj_.push_back(w);
      g.letters_.push_back({});
    }
    g.offsets_[v + 1] = g.adj_.size();
  }
  for (VertexId v = 0; v < adj.size(); ++v)
    for (auto w : g.neighbors(v)) {
      auto back = g.neighbors(w);
      if (!std::binary_search(back.begin(), back.end(), v)) throw StructuralError("adjacency is not symmetric");
    }
  g.finish_depths();
  return g;
}

void MetricGraph::finish_depths() {
  depth_.assign(size(), 0);
  if (size() == 0) return;
  auto d = bfs(VertexId{0});
  radius_ = 0;
  for (std::size_t v = 0; v < size(); ++v) {
    depth_[v] = d[v];
    radius_ = std::max(radius_, d[v]);
  }
}

MetricGraph MetricGraph::without_vertices(std::span<const VertexId> removed) const {
  std::vector<char> gone(size(), 0);
  for (auto v : removed) gone.at(v) = 1;
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (VertexId v = 0; v < size(); ++v)
    for (auto w : neighbors(v))
      if (gone[v] || gone[w]) edges.emplace_back(v, w);
  return without_edges(edges);
}

MetricGraph MetricGraph::without_edges(std::span<const std::pair<VertexId, VertexId>> removed) const {
  std::vector<std::pair<VertexId, VertexId>> cut(removed.begin(), removed.end());
  for (auto& e : cut)
    if (e.first > e.second) std::swap(e.first, e.second);
  std::sort(cut.begin(), cut.end());
  MetricGraph g;
  g.model_ = model_;
  g.labels_ = labels_;
  g.index_ = index_;
  g.exact_ = false;
  g.offsets_.assign(size() + 1, 0);
  for (VertexId v = 0; v < size(); ++v) {
    auto nb = neighbors(v);
    auto ls = edge_letters(v);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      std::pair<VertexId, VertexId> e{std::min(v, nb[k]), std::max(v, nb[k])};
      if (std::binary_search(cut.begin(), cut.end(), e)) continue;
      g.adj_.push_back(nb[k]);
      g.letters_.push_back(ls[k]);
    }
    g.offsets_[v + 1] = g.adj_.size();
  }
  g.depth_ = depth_;
  g.radius_ = radius_;
  return g;
}

std::vector<std::size_t> MetricGraph::sphere_sizes() const {
  std::vector<std::size_t> s(static_cast<std::size_t>(radius_) + 1, 0);
  for (auto d : depth_)
    if (d >= 0) ++s[static_cast<std::size_t>(d)];
  return s;
}

std::vector<std::int32_t> MetricGraph::bfs(std::span<const VertexId> sources, int max_depth) const {
  std::vector<std::int32_t> d(size(), kUnreached);
  std::vector<VertexId> queue;
  queue.reserve(size());
  for (auto s : sources) {
    if (s >= size()) throw PreconditionError("BFS source out of range");
    if (d[s] != 0) {
      d[s] = 0;
      queue.push_back(s);
    }
  }
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const VertexId v = queue[h];
    if (max_depth >= 0 && d[v] >= max_depth) continue;
    for (auto w : neighbors(v)) {
      if (d[w] != kUnreached) continue;
      d[w] = d[v] + 1;
      queue.push_back(w);
    }
  }
  return d;
}

std::int64_t MetricGraph::distance(VertexId u, VertexId v) const {
  if (u >= size() || v >= size()) throw PreconditionError("vertex id out of range");
  if (exact_) return model_->distance(labels_[u], labels_[v]);
  if (u == v) return 0;
  const auto d = bfs(u);
  if (d[v] == kUnreached) throw PreconditionError("vertices lie in different components");
  return d[v];
}

PathSeq MetricGraph::a_geodesic(VertexId u, VertexId v) const {
  if (u >= size() || v >= size()) throw PreconditionError("vertex id out of range");
  PathSeq p{u};
  std::vector<std::int32_t> row;
  if (!exact_) {
    row = bfs(v);
    if (row[u] == kUnreached) throw PreconditionError("vertices lie in different components");
  }
  auto dist_to_v = [&](VertexId x) -> std::int64_t {
    return exact_ ? model_->distance(labels_[x], labels_[v]) : row[x];
  };
  std::int64_t cur = dist_to_v(u);
  VertexId x = u;
  while (cur > 0) {
    VertexId next = kNoVertex;
    for (auto w : neighbors(x)) {
      if (dist_to_v(w) == cur - 1) {
        // Cayley balls store neighbours in letter order, other graphs by id.
        next = w;
        break;
      }
    }
    if (next == kNoVertex) throw ResourceError("no geodesic step inside the ball; the ball is too small");
    p.push_back(next);
    x = next;
    --cur;
  }
  return p;
}

bool MetricGraph::is_path(const PathSeq& p) const {
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    if (p[k] >= size() || p[k + 1] >= size()) return false;
    auto nb = neighbors(p[k]);
    if (std::find(nb.begin(), nb.end(), p[k + 1]) == nb.end()) return false;
  }
  return p.empty() || p.back() < size();
}

VertexSubset MetricGraph::neighborhood(const VertexSubset& X, int U) const {
  if (U < 0) throw PreconditionError("neighbourhood radius must be non-negative");
  const auto d = bfs(X.members, U);
  std::vector<VertexId> out;
  for (VertexId v = 0; v < size(); ++v)
    if (d[v] != kUnreached && d[v] <= U) out.push_back(v);
  return VertexSubset{std::move(out), SubsetProvenance::kAdHoc};
}

std::int64_t MetricGraph::diam_of(std::span<const VertexId> pts) const {
  std::int64_t best = 0;
  if (exact_) {
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = a + 1; b < pts.size(); ++b)
        best = std::max(best, model_->distance(labels_[pts[a]], labels_[pts[b]]));
    return best;
  }
  for (std::size_t a = 0; a < pts.size(); ++a) {
    const auto d = bfs(pts[a]);
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      if (d[pts[b]] == kUnreached) throw PreconditionError("subset spans several components");
      best = std::max<std::int64_t>(best, d[pts[b]]);
    }
  }
  return best;
}

Measured MetricGraph::diam(const VertexSubset& X, int shell) const {
  if (X.empty()) throw EmptyInputError("diameter of an empty subset");
  Measured m;
  m.value = diam_of(X.members);
  for (auto v : X.members)
    if (depth_[v] > radius_ - shell) m.trusted = false;
  return m;
}

VertexSubset MetricGraph::proj(std::span<const VertexId> A, const VertexSubset& X, int delta) const {
  if (X.empty()) throw EmptyInputError("projection target is empty");
  if (delta < 0) throw PreconditionError("projection slack must be non-negative");
  const auto dX = bfs(X.members);
  std::vector<VertexId> out;
  for (auto a : A) {
    if (dX[a] == kUnreached) throw PreconditionError("projection source cannot reach the target");
    const auto da = bfs(a, dX[a] + delta);
    for (auto x : X.members)
      if (da[x] != kUnreached && da[x] <= dX[a] + delta) out.push_back(x);
  }
  return VertexSubset::from(std::move(out));
}

namespace {

// Distances between path vertices, by the exact metric or by BFS rows that
// are computed once per distinct vertex.
struct PathDistance {
  const MetricGraph& g;
  const PathSeq& p;
  std::unordered_map<VertexId, std::vector<std::int32_t>> rows;

  std::int64_t operator()(std::size_t i, std::size_t j) {
    if (g.exact_metric()) return g.model().distance(g.label(p[i]), g.label(p[j]));
    auto it = rows.find(p[i]);
    if (it == rows.end()) it = rows.emplace(p[i], g.bfs(p[i])).first;
    return it->second[p[j]];
  }
};

}  // namespace

QuasigeodesicVerdict MetricGraph::is_quasigeodesic(const PathSeq& p, double lambda, double c) const {
  if (!is_path(p)) throw StructuralError("sequence is not a path in the graph");
  PathDistance d{*this, p, {}};
  return check_quasigeodesic(p.size(), d, lambda, c);
}

double MetricGraph::fit_c(const PathSeq& p, double lambda) const {
  if (!is_path(p)) throw StructuralError("sequence is not a path in the graph");
  PathDistance d{*this, p, {}};
  return fit_additive_constant(p.size(), d, lambda);
}

VertexSubset MetricGraph::coset_subset(const FactorCoset& X) const {
  const auto& m = model();
  std::vector<VertexId> out;
  for (VertexId v = 0; v < size(); ++v)
    if (coset_contains(m, X, labels_[v])) out.push_back(v);
  return VertexSubset{std::move(out), SubsetProvenance::kCoset};
}

VertexSubset MetricGraph::subgroup_subset(const SubgroupSpec& H, bool* stabilized) const {
  const auto e = enumerate_subgroup(model(), H, radius_);
  std::vector<VertexId> out;
  for (const auto& g : e.elements)
    if (auto v = find(g)) out.push_back(*v);
  if (stabilized) *stabilized = e.stabilized;
  return VertexSubset::from(std::move(out), SubsetProvenance::kSubgroup);
}

}  // namespace coarsegeo
