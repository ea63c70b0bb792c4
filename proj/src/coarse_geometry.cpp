#include "coarsegeo/coarse_geometry.hpp"

#include <algorithm>
#include <random>
#include <unordered_set>

#include "coarsegeo/errors.hpp"
#include "coarsegeo/path_ops.hpp"

namespace coarsegeo {

namespace {

struct ContractAccumulator {
  const RateFunction& mu;
  const RateFunction* bound;
  ContractingReport report;
  std::map<Bucket, ContractWitness> worst;

  void add(VertexId from, VertexId to, double lambda, double c, std::int64_t diam) {
    const Bucket b = round_up(lambda, c);
    auto& m = report.max_proj_diam.try_emplace(b, 0).first->second;
    ++report.far_samples;
    if (diam >= m) {
      m = diam;
      auto it = worst.find(b);
      if (it == worst.end() || diam > it->second.proj_diam) worst[b] = ContractWitness{from, to, b, diam};
    }
    if (bound && diam >= bound->at(lambda, c)) {
      report.held = false;
      if (report.witnesses.size() < 16) report.witnesses.push_back({from, to, b, diam});
    }
  }

  ContractingReport finish(const std::vector<Bucket>& seen) {
    std::map<Bucket, std::int64_t> eps;
    for (const auto& b : seen) eps[b] = 0;
    for (const auto& [b, d] : report.max_proj_diam) eps[b] = d + 1;
    if (eps.empty()) throw InsufficientDataError("no samples");
    report.epsilon = RateFunction::qg_table(eps);
    if (report.held)
      for (const auto& [b, w] : worst) report.witnesses.push_back(w);
    return std::move(report);
  }
};

std::int64_t mu_at(const RateFunction& mu, double lambda, double c) { return mu.at(lambda, c); }

}  // namespace

ContractingReport check_contracting(const MetricGraph& g, const GraphTarget& X, std::span<const TaggedPath> samples,
                                    const RateFunction& mu, const RateFunction* epsilon_bound) {
  if (samples.empty()) throw InsufficientDataError("contraction check needs at least one sample path");
  ContractAccumulator acc{mu, epsilon_bound, {}, {}};
  std::vector<Bucket> seen;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    if (s.path.empty()) throw PreconditionError("empty sample path");
    const auto v = g.is_quasigeodesic(s.path, s.lambda, s.c);
    if (!v.ok)
      throw PreconditionError("sample " + std::to_string(k) + " is not a quasigeodesic of its declared class");
    ++acc.report.samples;
    seen.push_back(round_up(s.lambda, s.c));
    std::int64_t dmin = INT64_MAX;
    for (auto x : s.path) dmin = std::min(dmin, X.distance_to(x));
    if (dmin < mu_at(mu, s.lambda, s.c)) continue;
    std::vector<VertexId> pts;
    for (auto x : s.path) {
      auto nb = X.nearest(x);
      if (nb.empty()) acc.report.trusted = false;
      pts.insert(pts.end(), nb.begin(), nb.end());
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    acc.add(s.path.front(), s.path.back(), s.lambda, s.c, g.diam_of(pts));
  }
  return acc.finish(seen);
}

ContractingReport check_contracting_geodesics(const MetricGraph& g, const GraphTarget& X, const RateFunction& mu,
                                              const RateFunction* epsilon_bound) {
  const std::size_t n = g.size();
  if (n < 2) throw InsufficientDataError("a one-vertex graph has no geodesic samples");
  ContractAccumulator acc{mu, epsilon_bound, {}, {}};
  const std::int64_t mu10 = mu.at(1.0, 0.0);
  GraphSpace S(g);

  std::vector<std::int32_t> dist(n);
  std::vector<VertexId> order;
  std::vector<VertexId> parent(n);
  std::vector<std::int64_t> dmin(n), diam(n);
  // Projection points first met at each vertex, chained through the
  // contributing ancestors.
  std::vector<VertexId> pool;
  std::vector<std::uint32_t> beg(n), end(n);
  std::vector<VertexId> head(n);  // nearest contributing ancestor-or-self
  order.reserve(n);

  for (VertexId u = 0; u < n; ++u) {
    std::fill(dist.begin(), dist.end(), kUnreached);
    order.clear();
    pool.clear();
    dist[u] = 0;
    order.push_back(u);
    for (std::size_t h = 0; h < order.size(); ++h) {
      const VertexId v = order[h];
      for (auto w : g.neighbors(v))
        if (dist[w] == kUnreached) {
          dist[w] = dist[v] + 1;
          order.push_back(w);
        }
    }
    for (auto v : order) {
      if (v == u) {
        parent[v] = kNoVertex;
      } else {
        // lowest letter towards u: the step a_geodesic(v, u) takes
        for (auto w : g.neighbors(v))
          if (dist[w] == dist[v] - 1) {
            parent[v] = w;
            break;
          }
      }
      const VertexId par = parent[v];
      const std::int64_t dv = X.distance_to(v);
      dmin[v] = par == kNoVertex ? dv : std::min(dmin[par], dv);
      diam[v] = par == kNoVertex ? 0 : diam[par];
      beg[v] = end[v] = static_cast<std::uint32_t>(pool.size());
      const VertexId chain = par == kNoVertex ? kNoVertex : head[par];
      auto near = X.nearest(v);
      if (near.empty()) acc.report.trusted = false;
      for (auto x : near) {
        bool known = false;
        for (VertexId c = chain; c != kNoVertex && !known; c = parent[c] == kNoVertex ? kNoVertex : head[parent[c]])
          for (auto k = beg[c]; k < end[c]; ++k)
            if (pool[k] == x) {
              known = true;
              break;
            }
        for (auto k = beg[v]; k < end[v] && !known; ++k) known = pool[k] == x;
        if (known) continue;
        for (VertexId c = chain; c != kNoVertex; c = parent[c] == kNoVertex ? kNoVertex : head[parent[c]])
          for (auto k = beg[c]; k < end[c]; ++k) diam[v] = std::max(diam[v], S.distance(pool[k], x));
        for (auto k = beg[v]; k < end[v]; ++k) diam[v] = std::max(diam[v], S.distance(pool[k], x));
        pool.push_back(x);
        end[v] = static_cast<std::uint32_t>(pool.size());
      }
      head[v] = end[v] > beg[v] ? v : chain;
      if (v == u) continue;
      ++acc.report.samples;
      if (dmin[v] >= mu10) acc.add(v, u, 1.0, 0.0, diam[v]);
    }
  }
  return acc.finish({Bucket{1, 0}});
}

QuasiconvexReport check_quasiconvex(const MetricGraph& g, const GraphTarget& X, int U, std::int64_t sigma_U) {
  if (U < 0) throw PreconditionError("U must be non-negative");
  QuasiconvexReport r;
  r.U = U;
  r.sigma = sigma_U;
  const std::size_t n = g.size();
  const auto& dX = X.distance_field();
  std::vector<VertexId> sources;
  for (VertexId v = 0; v < n; ++v)
    if (dX[v] != kUnreached && dX[v] <= U) sources.push_back(v);

  std::vector<std::int32_t> dist(n);
  std::vector<std::int32_t> esc(n);
  std::vector<VertexId> esc_at(n);
  std::vector<VertexId> order;
  order.reserve(n);
  for (auto u : sources) {
    std::fill(dist.begin(), dist.end(), kUnreached);
    order.clear();
    dist[u] = 0;
    order.push_back(u);
    for (std::size_t h = 0; h < order.size(); ++h) {
      const VertexId v = order[h];
      // worst distance to X over all geodesics u -> v inside the ball
      esc[v] = dX[v];
      esc_at[v] = v;
      for (auto w : g.neighbors(v)) {
        if (dist[w] == kUnreached) {
          dist[w] = dist[v] + 1;
          order.push_back(w);
        } else if (dist[w] == dist[v] - 1 && esc[w] > esc[v]) {
          esc[v] = esc[w];
          esc_at[v] = esc_at[w];
        }
      }
    }
    for (auto v : sources) {
      if (v == u) continue;
      ++r.pairs;
      if (g.depth(u) + g.depth(v) <= g.radius()) ++r.complete_pairs;
      r.max_excursion = std::max<std::int64_t>(r.max_excursion, esc[v]);
      if (esc[v] > sigma_U) {
        r.ok = false;
        if (!r.witness) r.witness = QuasiconvexReport::Witness{u, v, esc_at[v], esc[v]};
      }
    }
  }
  return r;
}

OrthogonalReport check_orthogonal(const MetricGraph& g, const TaggedPath& p, const GraphTarget& X,
                                  const RateFunction& mu, const RateFunction& tau) {
  if (p.path.empty()) throw PreconditionError("empty path");
  GraphSpace S(g);
  const auto nd = near_diameter(S, p.path, X, mu.at(p.lambda, p.c));
  OrthogonalReport r;
  r.diam = nd.diam;
  r.exact = nd.exact;
  r.ok = nd.diam <= tau.at(p.lambda, p.c);
  return r;
}

std::int64_t a_bound(const RateFunction& mu, const RateFunction& tau, const RateFunction& epsilon, double lambda,
                     double c) {
  return mu.at(lambda, c) + tau.at(lambda, c) + epsilon.at(lambda, c);
}

namespace {

// Diameter of a vertex set, trusted when dropping the outer two shells of
// the ball does not change it.
Measured stable_diam(const MetricGraph& g, const std::vector<VertexId>& pts) {
  Measured m;
  if (pts.empty()) return m;
  m.value = g.diam_of(pts);
  std::vector<VertexId> inner;
  for (auto v : pts)
    if (g.depth(v) <= g.radius() - 2) inner.push_back(v);
  m.trusted = g.diam_of(inner) == m.value;
  return m;
}

std::vector<VertexId> projection_of(const GraphTarget& onto, const GraphTarget& from, int max_depth, bool* outside) {
  std::vector<VertexId> out;
  const auto& g_members = from.subset().members;
  for (auto v : g_members) {
    (void)max_depth;
    auto nb = onto.nearest(v);
    if (nb.empty()) *outside = true;
    out.insert(out.end(), nb.begin(), nb.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Measured projection_diam(const MetricGraph& g, const GraphTarget& onto, const GraphTarget& from) {
  bool outside = false;
  const auto all = projection_of(onto, from, g.radius(), &outside);
  Measured m;
  m.value = g.diam_of(all);
  // stabilisation: the projection of the part of `from` two shells inside
  std::vector<VertexId> inner_pts;
  for (auto v : from.subset().members) {
    if (g.depth(v) > g.radius() - 2) continue;
    auto nb = onto.nearest(v);
    inner_pts.insert(inner_pts.end(), nb.begin(), nb.end());
  }
  std::sort(inner_pts.begin(), inner_pts.end());
  inner_pts.erase(std::unique(inner_pts.begin(), inner_pts.end()), inner_pts.end());
  m.trusted = !outside && g.diam_of(inner_pts) == m.value;
  return m;
}

std::vector<VertexId> both_near(const MetricGraph& g, const GraphTarget& X, const GraphTarget& Xp, int U) {
  std::vector<VertexId> out;
  const auto& a = X.distance_field();
  const auto& b = Xp.distance_field();
  for (VertexId v = 0; v < g.size(); ++v)
    if (a[v] != kUnreached && b[v] != kUnreached && a[v] <= U && b[v] <= U) out.push_back(v);
  return out;
}

}  // namespace

InteractionReport bounded_interaction(const MetricGraph& g, const GraphTarget& X, const GraphTarget& Xp,
                                      std::span<const int> Us, std::int64_t mu10, std::int64_t eps10) {
  if (X == Xp) throw PreconditionError("bounded interaction needs two different subsets");
  InteractionReport r;
  r.proj_diam_xprime_on_x = projection_diam(g, X, Xp);
  r.proj_diam_x_on_xprime = projection_diam(g, Xp, X);
  r.B = std::max(r.proj_diam_xprime_on_x.value, r.proj_diam_x_on_xprime.value) + 1;
  for (int U : Us) {
    if (U < 0) throw PreconditionError("U must be non-negative");
    const auto m = stable_diam(g, both_near(g, X, Xp, U));
    r.U.push_back(U);
    r.intersection_diam.push_back(m);
    r.nu.push_back(m.value + 1);
    r.predicted_nu.push_back(r.B + 4 * mu10 + 2 * eps10 + 2 * U);
    if (r.nu.back() > r.predicted_nu.back()) r.nu_within_prediction = false;
  }
  r.nu_at_mu = stable_diam(g, both_near(g, X, Xp, static_cast<int>(mu10))).value + 1;
  r.predicted_B = 2 * eps10 + r.nu_at_mu;
  r.B_within_prediction = r.B <= r.predicted_B;
  return r;
}

TransitionReport deep_and_transition_points(const GroupModel& model, std::span<const Element> path, int U,
                                            std::int64_t L, std::optional<std::int64_t> nu_U) {
  if (L <= 0) throw PreconditionError("L must be positive");
  if (U < 0) throw PreconditionError("U must be non-negative");
  TransitionReport r;
  const std::size_t n = path.size();
  r.points.assign(n, PointClass{});
  const auto periph = model.peripheral_factors();
  if (periph.empty() || n == 0) return r;

  // words of length <= U, to reach every coset within U of the path
  std::vector<Element> shell{model.identity()};
  for (int k = 0; k < U; ++k) {
    std::vector<Element> next;
    for (const auto& w : shell)
      for (std::uint32_t gen = 0; gen < model.num_generators(); ++gen)
        for (bool inv : {false, true}) {
          Element x = w;
          model.append_letter(x, Letter{gen, inv});
          next.push_back(std::move(x));
        }
    shell.insert(shell.end(), next.begin(), next.end());
    std::unordered_set<Element, ElementHash> s(shell.begin(), shell.end());
    shell.assign(s.begin(), s.end());
  }
  std::unordered_set<FactorCoset, FactorCosetHash> cand;
  std::vector<FactorCoset> cands;
  for (const auto& v : path)
    for (const auto& w : shell)
      for (auto P : periph) {
        auto X = FactorCoset::of(model, model.multiply(v, w), P);
        if (cand.insert(X).second) cands.push_back(std::move(X));
      }
  // deterministic order
  std::sort(cands.begin(), cands.end(), [&](const FactorCoset& a, const FactorCoset& b) {
    if (a.factor != b.factor) return a.factor < b.factor;
    return model.shortlex_less(a.key, b.key);
  });

  std::vector<std::int64_t> pre(n), suf(n);
  for (const auto& X : cands) {
    std::vector<std::size_t> in;
    for (std::size_t i = 0; i < n; ++i)
      if (coset_projection(model, X, path[i]).distance <= U) in.push_back(i);
    if (in.size() < 2) continue;
    // prefix and suffix diameters of p & N_U(X)
    std::int64_t d = 0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      while (k < in.size() && in[k] <= i) {
        for (std::size_t j = 0; j < k; ++j) d = std::max(d, model.distance(path[in[j]], path[in[k]]));
        ++k;
      }
      pre[i] = d;
    }
    d = 0;
    std::size_t m = in.size();
    for (std::size_t i = n; i-- > 0;) {
      while (m > 0 && in[m - 1] >= i) {
        --m;
        for (std::size_t j = m + 1; j < in.size(); ++j) d = std::max(d, model.distance(path[in[j]], path[in[m]]));
      }
      suf[i] = d;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (pre[i] > L && suf[i] > L) {
        auto& pc = r.points[i];
        if (pc.deep_count == 0) pc.deep_in = X;
        ++pc.deep_count;
        pc.transition = false;
      }
    }
  }
  for (const auto& pc : r.points)
    if (pc.deep_count > 1) {
      ++r.multi_deep;
      if (nu_U && L > *nu_U) r.unique_when_required = false;
    }
  return r;
}

TransitionReport deep_and_transition_points(const MetricGraph& g, const PathSeq& p, int U, std::int64_t L,
                                            std::optional<std::int64_t> nu_U) {
  std::vector<Element> pts;
  pts.reserve(p.size());
  for (auto v : p) pts.push_back(g.label(v));
  return deep_and_transition_points(g.model(), pts, U, L, nu_U);
}

RelQuasiconvexReport check_rel_quasiconvex(const MetricGraph& g, const VertexSubset& H,
                                           std::span<const PathSeq> samples, int U, std::int64_t L,
                                           std::int64_t M) {
  if (samples.empty()) throw InsufficientDataError("relative quasiconvexity needs sample paths");
  if (H.empty()) throw EmptyInputError("H is empty");
  const auto dH = g.bfs(H.members);
  RelQuasiconvexReport r;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& p = samples[k];
    if (p.empty()) continue;
    if (!H.contains(p.front()) || !H.contains(p.back()))
      throw PreconditionError("sample " + std::to_string(k) + " does not have both endpoints in H");
    ++r.samples;
    const auto t = deep_and_transition_points(g, p, U, L);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!t.points[i].transition) continue;
      ++r.transition_points;
      const std::int64_t d = dH[p[i]];
      r.max_distance = std::max(r.max_distance, d);
      if (d > M && r.ok) {
        r.ok = false;
        r.witness = std::make_pair(k, p[i]);
      }
    }
  }
  return r;
}

std::vector<PathSeq> geodesics_between(const MetricGraph& g, const VertexSubset& H, std::size_t max_pairs,
                                       std::uint64_t seed) {
  std::vector<PathSeq> out;
  const auto& m = H.members;
  const std::size_t total = m.size() * (m.size() > 0 ? m.size() - 1 : 0);
  if (total <= max_pairs) {
    for (auto u : m)
      for (auto v : m)
        if (u != v) out.push_back(g.a_geodesic(u, v));
    return out;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, m.size() - 1);
  while (out.size() < max_pairs) {
    const auto u = m[pick(rng)], v = m[pick(rng)];
    if (u != v) out.push_back(g.a_geodesic(u, v));
  }
  return out;
}

Measured kappa_estimate(const MetricGraph& g, const VertexSubset& H, const GraphTarget& Y, int U,
                        const VertexSubset& C) {
  if (U < 0) throw PreconditionError("U must be non-negative");
  const auto dH = g.bfs(H.members, U);
  const auto& dY = Y.distance_field();
  std::vector<VertexId> both;
  for (VertexId v = 0; v < g.size(); ++v)
    if (dH[v] != kUnreached && dH[v] <= U && dY[v] != kUnreached && dY[v] <= U) both.push_back(v);
  Measured m;
  if (both.empty()) return m;
  if (C.empty()) {
    m.unbounded = true;
    m.trusted = false;
    return m;
  }
  const auto dC = g.bfs(C.members);
  std::int64_t inner = 0;
  for (auto v : both) {
    if (dC[v] == kUnreached) {
      m.unbounded = true;
      continue;
    }
    m.value = std::max<std::int64_t>(m.value, dC[v]);
    if (g.depth(v) <= g.radius() - 2) inner = std::max<std::int64_t>(inner, dC[v]);
  }
  m.trusted = !m.unbounded && inner == m.value;
  return m;
}

std::string to_string(IntersectionKind k) {
  switch (k) {
    case IntersectionKind::kFinite: return "finite";
    case IntersectionKind::kFiniteIndex: return "finite-index";
    case IntersectionKind::kInfiniteIndex: return "infinite-index";
  }
  return "?";
}

ParabolicReport classify_parabolic_intersections(const GroupModel& model, const SubgroupSpec& H, int radius, int U) {
  if (radius < 0 || U < 0) throw PreconditionError("radii must be non-negative");
  ParabolicReport r;
  const auto enumr = enumerate_subgroup(model, H, radius);
  r.stabilized = enumr.stabilized;
  const auto& hs = enumr.elements;
  const auto conj_ball = MetricGraph::ball(model, U);
  std::unordered_set<FactorCoset, FactorCosetHash> seen;
  for (VertexId gi = 0; gi < conj_ball.size(); ++gi) {
    const Element& g = conj_ball.label(gi);
    const Element ginv = model.inverse(g);
    for (auto P : model.peripheral_factors()) {
      const auto X = FactorCoset::of(model, g, P);
      if (!seen.insert(X).second) continue;
      ParabolicClass pc;
      pc.factor = P;
      pc.conjugator = X.key;
      pc.factor_rank = model.factor_rank(P);
      const Element kinv = model.inverse(X.key);
      std::vector<Element> in_p;
      for (const auto& h : hs) {
        const Element x = model.multiply(model.multiply(kinv, h), X.key);
        if (!x.is_identity() && model.in_factor(x, P)) in_p.push_back(x);
      }
      (void)ginv;
      pc.lattice_rank = in_p.empty() ? 0 : FactorLattice::from_elements(model, P, in_p).rank();
      if (pc.lattice_rank == 0) pc.kind = IntersectionKind::kFinite;
      else if (pc.lattice_rank == pc.factor_rank) pc.kind = IntersectionKind::kFiniteIndex;
      else pc.kind = IntersectionKind::kInfiniteIndex;
      if (pc.kind == IntersectionKind::kInfiniteIndex) r.fully_quasiconvex = false;
      if (pc.kind == IntersectionKind::kFinite) {
        std::vector<const Element*> near;
        for (const auto& h : hs)
          if (coset_projection(model, X, h).distance <= U) near.push_back(&h);
        for (std::size_t a = 0; a < near.size(); ++a)
          for (std::size_t b = a + 1; b < near.size(); ++b)
            pc.measure = std::max(pc.measure, model.distance(*near[a], *near[b]));
        r.L = std::max(r.L, pc.measure);
      } else if (pc.kind == IntersectionKind::kFiniteIndex) {
        // ball part of gP: key * s with |key| + |s| <= radius
        const auto klen = model.word_length(X.key);
        for (const auto& v : l1_ball(pc.factor_rank, std::max<std::int64_t>(0, radius - klen))) {
          const Element x = model.multiply(X.key, model.factor_element(P, std::span<const std::int32_t>(v.data(), pc.factor_rank)));
          std::int64_t best = INT64_MAX;
          for (const auto& h : hs) best = std::min(best, model.distance(x, h));
          pc.measure = std::max(pc.measure, best);
        }
        r.cover_radius = std::max(r.cover_radius, pc.measure);
      }
      r.classes.push_back(std::move(pc));
    }
  }
  return r;
}

}  // namespace coarsegeo
