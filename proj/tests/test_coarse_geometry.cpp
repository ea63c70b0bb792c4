#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "coarsegeo/cayley_space.hpp"
#include "coarsegeo/coarse_geometry.hpp"
#include "coarsegeo/errors.hpp"
#include "coarsegeo/graph_space.hpp"

using namespace coarsegeo;

namespace {

VertexId at(const MetricGraph& g, const char* w) { return *g.find(g.model().parse(w)); }

GraphTarget coset_target(const MetricGraph& g, const char* key, std::uint32_t factor) {
  return GraphTarget(g, g.coset_subset(FactorCoset::of(g.model(), g.model().parse(key), factor)));
}

// diam(N_U(X) & N_U(Y)) by BFS fields and all pairs.
std::int64_t brute_intersection_diam(const MetricGraph& g, const VertexSubset& X, const VertexSubset& Y, int U) {
  const auto dx = g.bfs(X.members), dy = g.bfs(Y.members);
  std::vector<VertexId> pts;
  for (VertexId v = 0; v < g.size(); ++v)
    if (dx[v] >= 0 && dx[v] <= U && dy[v] >= 0 && dy[v] <= U) pts.push_back(v);
  std::int64_t d = 0;
  for (auto u : pts)
    for (auto v : pts) d = std::max(d, g.distance(u, v));
  return d;
}

}  // namespace

// ---------------------------------------------------------------- contraction

TEST(Contracting, TreeAxisHasZeroProjections) {
  const auto g = MetricGraph::ball(GroupModel::free_group(2), 6);
  const auto X = GraphTarget::exact_coset(g, FactorCoset::of(g.model(), g.model().identity(), 0));
  const auto mu = RateFunction::constant(1);
  const auto eps = RateFunction::constant(1);
  const auto r = check_contracting_geodesics(g, X, mu, &eps);
  EXPECT_TRUE(r.held);
  EXPECT_GT(r.far_samples, 0u);
  EXPECT_EQ(r.max_proj_diam.at(Bucket{1, 0}), 0);
  EXPECT_EQ(r.epsilon.at(1.0, 0.0), 1);
}

TEST(Contracting, FreeProductFactorGates) {
  const auto g = MetricGraph::ball(GroupModel::free_product({2, 2}), 5);
  const auto X = GraphTarget::exact_coset(g, FactorCoset::of(g.model(), g.model().identity(), 0));
  const auto r = check_contracting_geodesics(g, X, RateFunction::constant(1));
  EXPECT_EQ(r.max_proj_diam.at(Bucket{1, 0}), 0);
}

TEST(Contracting, FlatAxisIsNotContracting) {
  // In Z^2 a geodesic parallel to the axis projects onto a long segment.
  const auto g = MetricGraph::ball(GroupModel::free_abelian(2), 8);
  const auto& m = g.model();
  std::vector<VertexId> axis;
  for (int k = -8; k <= 8; ++k) axis.push_back(*g.find(m.power(m.parse("a1"), k)));
  const GraphTarget X(g, VertexSubset::from(axis));
  const auto eps = RateFunction::constant(2);
  const auto r = check_contracting_geodesics(g, X, RateFunction::constant(1), &eps);
  EXPECT_FALSE(r.held);
  EXPECT_GE(r.max_proj_diam.at(Bucket{1, 0}), 4);
}

TEST(Contracting, WholeBallIsVacuous) {
  const auto g = MetricGraph::ball(GroupModel::free_group(2), 4);
  std::vector<VertexId> all(g.size());
  for (VertexId v = 0; v < g.size(); ++v) all[v] = v;
  const auto r = check_contracting_geodesics(g, GraphTarget(g, VertexSubset::from(all)), RateFunction::constant(1));
  EXPECT_EQ(r.far_samples, 0u);
}

TEST(Contracting, EmptySampleClassIsRejected) {
  const auto g = MetricGraph::ball(GroupModel::free_group(2), 3);
  const auto X = coset_target(g, "1", 0);
  EXPECT_THROW(check_contracting(g, X, {}, RateFunction::constant(1)), InsufficientDataError);
}

// ------------------------------------------------------------- quasiconvexity

TEST(Quasiconvex, SigmaFormula) {
  EXPECT_EQ(sigma_of(RateFunction::constant(1), RateFunction::constant(0)).at(std::int64_t{0}), 3);
  EXPECT_EQ(sigma_of(RateFunction::constant(1), RateFunction::constant(1)).at(std::int64_t{2}), 7);
}

TEST(Quasiconvex, TreeAxisExcursionEqualsU) {
  // In a tree the geodesic between two points near the axis leaves it by at
  // most the larger endpoint distance.
  const auto g = MetricGraph::ball(GroupModel::free_group(2), 6);
  const auto X = coset_target(g, "1", 0);
  for (int U = 0; U <= 2; ++U) {
    const auto r = check_quasiconvex(g, X, U, 3 * std::max(U, 1) + 1);
    EXPECT_TRUE(r.ok) << U;
    EXPECT_EQ(r.max_excursion, U);
    EXPECT_GT(r.complete_pairs, 0u);
  }
}

TEST(Quasiconvex, EscapeIsReported) {
  const auto g = MetricGraph::ball(GroupModel::free_group(2), 6);
  const auto X = coset_target(g, "1", 0);
  const auto r = check_quasiconvex(g, X, 2, 1);
  ASSERT_FALSE(r.ok);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_GT(r.witness->distance, 1);
  EXPECT_EQ(X.distance_to(r.witness->escape), r.witness->distance);
}

// --------------------------------------------------------------- orthogonality

TEST(Orthogonal, SpecExamples) {
  const auto g = MetricGraph::ball(GroupModel::free_group(2), 8);
  const auto X = coset_target(g, "1", 0);
  const auto mu = RateFunction::constant(1);
  const auto leaving = check_orthogonal(g, {g.a_geodesic(at(g, "aaa"), at(g, "aaabbbb")), 1, 0}, X, mu,
                                        RateFunction::constant(2));
  EXPECT_TRUE(leaving.ok);
  EXPECT_EQ(leaving.diam, 1);
  const auto along = check_orthogonal(g, {g.a_geodesic(at(g, "AAA"), at(g, "aaa")), 1, 0}, X, mu,
                                      RateFunction::constant(2));
  EXPECT_FALSE(along.ok);
  EXPECT_EQ(along.diam, 6);
  const auto away = check_orthogonal(g, {g.a_geodesic(at(g, "bbb"), at(g, "bbbab")), 1, 0}, X, mu,
                                     RateFunction::constant(0));
  EXPECT_TRUE(away.ok);
  EXPECT_EQ(away.diam, 0);
}

TEST(Orthogonal, ABound) {
  EXPECT_EQ(a_bound(RateFunction::constant(1), RateFunction::constant(2), RateFunction::constant(1), 1, 0), 4);
  EXPECT_EQ(a_bound(RateFunction::constant(0), RateFunction::constant(0), RateFunction::constant(0), 1, 0), 0);
  EXPECT_EQ(a_bound(RateFunction::constant(3), RateFunction::constant(5), RateFunction::constant(2), 2, 1), 10);
}

// ------------------------------------------------------ bounded intersection

TEST(Interaction, SpecExamples) {
  const auto g = MetricGraph::ball(GroupModel::free_product({2, 2}), 5);
  const auto A = coset_target(g, "1", 0);
  const auto bA = coset_target(g, "b1", 0);
  const auto B = coset_target(g, "1", 1);
  const int U1[] = {1};
  EXPECT_EQ(bounded_interaction(g, A, bA, U1, 1, 1).intersection_diam[0].value, 1);
  const int U0[] = {0};
  EXPECT_EQ(bounded_interaction(g, A, B, U0, 1, 1).intersection_diam[0].value, 0);
  EXPECT_THROW(bounded_interaction(g, A, A, U0, 1, 1), PreconditionError);
}

TEST(Interaction, MatchesBruteForceAndPredictions) {
  const auto m = GroupModel::free_product({2, 2});
  const auto g = MetricGraph::ball(m, 6);
  const char* keys[][2] = {{"1", "b1"}, {"b2", "b2 a1 b1"}, {"a1", "1"}, {"b1^2", "b1 a2"}};
  const int Us[] = {0, 1, 2};
  for (const auto& k : keys) {
    const auto X = coset_target(g, k[0], 0);
    const auto Y = coset_target(g, k[1], k[1] == std::string("1") ? 1 : 0);
    const auto r = bounded_interaction(g, X, Y, Us, 1, 1);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_EQ(r.intersection_diam[i].value, brute_intersection_diam(g, X.subset(), Y.subset(), Us[i]));
      EXPECT_EQ(r.nu[i], r.intersection_diam[i].value + 1);
      EXPECT_EQ(r.predicted_nu[i], r.B + 4 + 2 + 2 * Us[i]);
    }
    EXPECT_TRUE(r.nu_within_prediction);
    EXPECT_TRUE(r.B_within_prediction);
  }
}

// ------------------------------------------------------- deep and transition

TEST(Transition, FreeGroupHasOnlyTransitionPoints) {
  const auto m = GroupModel::free_group(2);
  std::vector<Element> p;
  for (int k = 0; k <= 6; ++k) p.push_back(m.power(m.parse("a"), k));
  const auto r = deep_and_transition_points(m, p, 1, 1);
  for (const auto& c : r.points) EXPECT_TRUE(c.transition);
}

TEST(Transition, SpecPath) {
  // 1 -> a1^5 -> a1^5 b1^5, U = 0, L = 1
  const auto m = GroupModel::free_product({2, 2});
  std::vector<Element> p;
  for (int k = 0; k <= 5; ++k) p.push_back(m.power(m.parse("a1"), k));
  for (int k = 1; k <= 5; ++k) p.push_back(m.multiply(m.parse("a1^5"), m.power(m.parse("b1"), k)));
  const auto r = deep_and_transition_points(m, p, 0, 1);
  ASSERT_TRUE(r.points[2].deep_in.has_value());
  EXPECT_EQ(*r.points[2].deep_in, FactorCoset::of(m, m.identity(), 0));
  EXPECT_TRUE(r.points[5].transition);
  ASSERT_TRUE(r.points[8].deep_in.has_value());
  EXPECT_EQ(*r.points[8].deep_in, FactorCoset::of(m, m.parse("a1^5"), 1));
  EXPECT_THROW(deep_and_transition_points(m, p, 0, 0), PreconditionError);
}

TEST(Transition, DeepCosetUniqueAboveNu) {
  const auto m = GroupModel::free_product({2, 2});
  std::mt19937_64 rng(12);
  for (int t = 0; t < 40; ++t) {
    Element g = m.identity();
    for (int k = 0; k < 14; ++k) m.append_letter(g, Letter{static_cast<std::uint32_t>(rng() % 4), (rng() & 1) == 1});
    const auto path = CayleyPath::geodesic(m, m.identity(), g);
    std::vector<Element> pts;
    for (std::size_t i = 0; i < path.size(); ++i) pts.push_back(path[i]);
    // measured nu(1) for distinct factor cosets is 3
    const auto r = deep_and_transition_points(m, pts, 1, 4, 3);
    EXPECT_TRUE(r.unique_when_required);
  }
}

// ------------------------------------------------------------ relative and kappa

TEST(RelQuasiconvex, SubgroupOfTwoGenerators) {
  const auto m = GroupModel::free_product({2, 2});
  const auto g = MetricGraph::ball(m, 5);
  const auto H = g.subgroup_subset({{m.parse("a1"), m.parse("b1")}, 5});
  const auto samples = geodesics_between(g, H, 400, 3);
  const auto r = check_rel_quasiconvex(g, H, samples, 1, 2, 0);
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.max_distance, 0);
  EXPECT_THROW(check_rel_quasiconvex(g, H, {}, 1, 2, 0), InsufficientDataError);
}

TEST(Kappa, SpecExamplesAndMonotone) {
  const auto m = GroupModel::free_product({2, 2});
  const auto g = MetricGraph::ball(m, 5);
  const auto A = g.coset_subset(FactorCoset::of(m, m.identity(), 0));
  const auto B = coset_target(g, "1", 1);
  const auto C = VertexSubset::from({g.root()});
  EXPECT_EQ(kappa_estimate(g, A, B, 1, C).value, 1);
  EXPECT_EQ(kappa_estimate(g, A, B, 0, C).value, 0);
  const auto H = g.subgroup_subset({{m.parse("a1"), m.parse("b1")}, 5});
  const auto Agt = coset_target(g, "1", 0);
  const auto Ca = g.subgroup_subset({{m.parse("a1")}, 5});
  std::int64_t prev = 0;
  for (int U = 0; U <= 2; ++U) {
    const auto k = kappa_estimate(g, H, Agt, U, Ca);
    EXPECT_FALSE(k.unbounded);
    EXPECT_GE(k.value, prev);
    prev = k.value;
  }
}

TEST(Parabolic, SpecClassifications) {
  const auto m = GroupModel::free_product({2, 2});
  const auto a = classify_parabolic_intersections(m, {{m.parse("a1"), m.parse("a2")}, 4}, 4, 1);
  EXPECT_TRUE(a.fully_quasiconvex);
  const auto hb = classify_parabolic_intersections(m, {{m.parse("a1"), m.parse("b1")}, 4}, 4, 1);
  EXPECT_FALSE(hb.fully_quasiconvex);
  bool rank_one = false;
  for (const auto& c : hb.classes)
    if (c.kind == IntersectionKind::kInfiniteIndex && c.lattice_rank == 1) rank_one = true;
  EXPECT_TRUE(rank_one);
  const auto sq = classify_parabolic_intersections(m, {{m.parse("a1^2"), m.parse("a2^2")}, 4}, 4, 1);
  EXPECT_TRUE(sq.fully_quasiconvex);
}
