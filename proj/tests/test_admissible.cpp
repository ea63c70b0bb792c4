#include <random>

#include <gtest/gtest.h>

#include "coarsegeo/admissible.hpp"
#include "coarsegeo/cayley_space.hpp"
#include "coarsegeo/graph_space.hpp"

using namespace coarsegeo;

namespace {

RateSet worked_rates() {
  return RateSet::from_json(nlohmann::json::parse(
      R"({"mu": 1, "epsilon": 1, "tau": 2, "nu": {"slope": 2, "intercept": 2}})"));
}

// F2: p pieces of length `len` along a-cosets, q pieces b^qlen between them.
AdmissibleDecomposition<CayleySpace> zigzag(const GroupModel& m, std::vector<int> p_lengths, int qlen) {
  AdmissibleDecomposition<CayleySpace> d;
  Element at = m.identity();
  for (std::size_t k = 0; k < p_lengths.size(); ++k) {
    if (k > 0) {
      CayleyPath q(m, at);
      q.append(m.parse_letters("b")[0], qlen);
      at = q.back();
      d.add_q(std::move(q));
    }
    CayleyPath p(m, at);
    p.append(m.parse_letters("a")[0], p_lengths[k]);
    d.add_p(p, FactorCoset::of(m, at, 0));
    at = p.back();
  }
  return d;
}

const ConditionResult& condition(const AdmissibleReport& r, const std::string& name) {
  for (const auto& c : r.conditions)
    if (c.name == name) return c;
  throw std::runtime_error("no condition " + name);
}

}  // namespace

TEST(Admissible, SingleGeodesicPiece) {
  const auto m = GroupModel::free_group(2);
  const CayleySpace S(m);
  const auto d = zigzag(m, {5}, 0);
  for (std::int64_t D = 0; D <= 5; ++D) EXPECT_TRUE(verify_admissible(S, d, D, worked_rates()).ok);
}

TEST(Admissible, TreeZigzagPassesAllConditions) {
  const auto m = GroupModel::free_group(2);
  const CayleySpace S(m);
  const auto d = zigzag(m, {6, 6, 6}, 6);
  const auto r = verify_admissible(S, d, 4, worked_rates());
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.conditions.size(), 5u);
  EXPECT_EQ(r.max_orthogonal_diam, 1);  // f and f b
}

TEST(Admissible, ShortInteriorPieceIsReported) {
  const auto m = GroupModel::free_group(2);
  const CayleySpace S(m);
  const auto r = verify_admissible(S, zigzag(m, {6, 3, 6}, 6), 4, worked_rates());
  EXPECT_FALSE(r.ok);
  ASSERT_TRUE(r.first_violation.has_value());
  const auto& c = r.conditions[*r.first_violation];
  EXPECT_EQ(c.name, "long-p");
  EXPECT_NE(c.witness.find("p piece 2"), std::string::npos) << c.witness;
}

TEST(Admissible, EndpointOffTargetIsReported) {
  const auto m = GroupModel::free_group(2);
  const CayleySpace S(m);
  auto d = zigzag(m, {6, 6}, 6);
  d.targets[1] = FactorCoset::of(m, m.parse("b"), 0);
  EXPECT_FALSE(condition(verify_admissible(S, d, 4, worked_rates()), "alternation").ok);
}

TEST(Admissible, NonOrthogonalQIsReported) {
  // q runs along the target for three steps before leaving
  const auto m = GroupModel::free_group(2);
  const CayleySpace S(m);
  AdmissibleDecomposition<CayleySpace> d;
  CayleyPath p0(m, m.identity());
  p0.append(m.parse_letters("a")[0], 6);
  d.add_p(p0, FactorCoset::of(m, m.identity(), 0));
  CayleyPath q(m, p0.back());
  q.append_word(m.parse_letters("aaabbbbbb"));
  d.add_q(q);
  CayleyPath p1(m, q.back());
  p1.append(m.parse_letters("a")[0], 6);
  d.add_p(p1, FactorCoset::of(m, q.back(), 0));
  const auto r = verify_admissible(S, d, 4, worked_rates());
  EXPECT_FALSE(condition(r, "orthogonal").ok);
  EXPECT_EQ(r.max_orthogonal_diam, 4);
}

TEST(Admissible, MalformedDecompositionThrows) {
  const auto m = GroupModel::free_group(2);
  const CayleySpace S(m);
  AdmissibleDecomposition<CayleySpace> d;
  EXPECT_THROW(verify_admissible(S, d, 4, worked_rates()), StructuralError);
  d = zigzag(m, {6}, 0);
  d.targets.push_back(d.targets[0]);
  EXPECT_THROW(verify_admissible(S, d, 4, worked_rates()), StructuralError);
}

TEST(FellowTraveller, SameGeodesic) {
  const auto m = GroupModel::free_group(2);
  const CayleySpace S(m);
  const auto d = zigzag(m, {5}, 0);
  const auto f = check_fellow_traveller(S, d, d.pieces[0], 1);
  ASSERT_TRUE(f.ok);
  EXPECT_EQ(f.markers.front(), std::make_pair(std::size_t{0}, std::size_t{5}));
}

TEST(FellowTraveller, ZigzagAgainstItsGeodesicAtBundleR) {
  const auto m = GroupModel::free_group(2);
  const CayleySpace S(m);
  const auto d = zigzag(m, {6, 6, 6}, 6);
  const auto k = compute_constants(worked_rates(), 1, 0);
  const auto gamma = concatenate(S, d);
  const auto alpha = S.geodesic(gamma.front(), gamma.back());
  const auto f = check_fellow_traveller(S, d, alpha, k.R);
  EXPECT_TRUE(f.ok);
  EXPECT_EQ(f.markers.size(), 3u);
  EXPECT_TRUE(S.is_quasigeodesic(gamma, static_cast<double>(k.Lambda), 0.0).ok);
  const auto fitted = fit_lambda(S, gamma, k.Lambda);
  ASSERT_TRUE(fitted.has_value());
  EXPECT_LE(*fitted, k.Lambda);
  EXPECT_LT(max_near_target_projection(S, d), k.B);
}

TEST(FellowTraveller, DetourAroundACycleFails) {
  // 40-cycle; the decomposition runs 0..10, alpha runs the other way round.
  std::vector<std::vector<VertexId>> adj(40);
  for (VertexId v = 0; v < 40; ++v) {
    adj[v].push_back((v + 1) % 40);
    adj[v].push_back((v + 39) % 40);
  }
  const auto g = MetricGraph::from_adjacency(adj);
  const GraphSpace S(g);
  AdmissibleDecomposition<GraphSpace> d;
  auto seg = [](VertexId a, VertexId b) {
    PathSeq p;
    for (VertexId v = a; v <= b; ++v) p.push_back(v);
    return p;
  };
  d.add_p(seg(0, 2), GraphTarget(g, VertexSubset::from({0, 1, 2})));
  d.add_q(seg(2, 4));
  d.add_p(seg(4, 6), GraphTarget(g, VertexSubset::from({4, 5, 6})));
  d.add_q(seg(6, 8));
  d.add_p(seg(8, 10), GraphTarget(g, VertexSubset::from({8, 9, 10})));
  EXPECT_TRUE(check_fellow_traveller(S, d, seg(0, 10), 2).ok);
  // follows p0, then turns back and goes round the other side
  PathSeq detour{0, 1, 2, 1, 0};
  for (VertexId v = 39; v >= 10; --v) detour.push_back(v);
  const auto f = check_fellow_traveller(S, d, detour, 2);
  EXPECT_FALSE(f.ok);
  ASSERT_TRUE(f.failed_piece.has_value());
  EXPECT_EQ(*f.failed_piece, 1u);
}

TEST(Fit, GeodesicAndBacktrack) {
  const auto m = GroupModel::free_group(2);
  const CayleySpace S(m);
  const auto geo = S.geodesic(m.identity(), m.parse("abaB"));
  EXPECT_EQ(S.fit_c(geo, 1.0), 0.0);
  const auto back = CayleyPath::from_word(m, m.identity(), m.parse_letters("aAb"));
  const auto frontier = fit_frontier(S, back, {1.0, 2.0});
  EXPECT_DOUBLE_EQ(frontier[0].c, 2.0);
  EXPECT_DOUBLE_EQ(frontier[1].c, 2.0);  // d = 0 on the loop, so lambda cannot help
}

TEST(Admissible, FirstStepQuasigeodesic) {
  // p geodesic inside X, q orthogonal to X: pq is a (lambda, C)-quasigeodesic.
  const auto m = GroupModel::free_product({2, 2});
  const CayleySpace S(m);
  const auto rates = worked_rates();
  const auto k = compute_constants(rates, 1, 0);
  std::mt19937_64 rng(6);
  for (int t = 0; t < 100; ++t) {
    const auto a = m.multiply(m.power(m.parse("a1"), rng() % 7), m.power(m.parse("a2"), static_cast<std::int64_t>(rng() % 7) - 3));
    Element w = m.parse(rng() % 2 ? "b1" : "B2");
    for (int s = 0; s < 8; ++s) m.append_letter(w, Letter{static_cast<std::uint32_t>(rng() % 4), (rng() & 1) == 1});
    if (m.coset_key(w, 0) == m.identity()) continue;
    auto pq = S.geodesic(m.identity(), a);
    const auto q = S.geodesic(a, m.multiply(a, w));
    const auto X = FactorCoset::of(m, m.identity(), 0);
    if (near_diameter(S, q, X, rates.mu.at(1.0, 0.0)).diam > rates.tau.at(1.0, 0.0)) continue;
    pq.append(q);
    EXPECT_TRUE(S.is_quasigeodesic(pq, 1.0, static_cast<double>(k.C)).ok);
  }
}

TEST(Admissible, BacktrackThroughNextTargetIsNotLambdaZero) {
  // A one-edge q inside the next target followed by a p that turns back:
  // every condition holds, yet the path revisits a vertex after two steps,
  // so no (Lambda, 0) bound holds on that subpath. The length bound over the
  // whole path still holds.
  const auto m = GroupModel::free_product({2, 2});
  const CayleySpace S(m);
  AdmissibleDecomposition<CayleySpace> d;
  const auto f = m.parse("a1^6");
  d.add_p(S.geodesic(m.identity(), f), FactorCoset::of(m, m.identity(), 0));
  d.add_q(S.geodesic(f, m.parse("a1^6 b1")));
  d.add_p(S.geodesic(m.parse("a1^6 b1"), m.parse("a1^6 b2^6")), FactorCoset::of(m, f, 1));
  const auto rates = worked_rates();
  const auto k = compute_constants(rates, 1, 0);
  const auto r = verify_admissible(S, d, k.D, rates);
  EXPECT_TRUE(r.ok);
  const auto gamma = concatenate(S, d);
  const auto v = S.is_quasigeodesic(gamma, static_cast<double>(k.Lambda), 0.0);
  ASSERT_FALSE(v.ok);
  EXPECT_EQ(S.distance(gamma[v.witness->first], gamma[v.witness->second]), 0);
  EXPECT_LE(gamma.length(), k.Lambda * S.distance(gamma.front(), gamma.back()));
}
