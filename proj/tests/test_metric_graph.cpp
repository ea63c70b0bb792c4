#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "coarsegeo/ball_cache.hpp"
#include "coarsegeo/cayley_space.hpp"
#include "coarsegeo/errors.hpp"
#include "coarsegeo/metric_graph.hpp"
#include "coarsegeo/quasigeodesic.hpp"

using namespace coarsegeo;

namespace {

// All-pairs oracle for the excess (j - i) - lambda d(i, j).
double brute_max_excess(const MetricGraph& g, const PathSeq& p, double lambda) {
  double best = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      best = std::max(best, static_cast<double>(j - i) - lambda * static_cast<double>(g.distance(p[i], p[j])));
  return best;
}

PathSeq random_walk(const MetricGraph& g, std::mt19937_64& rng, std::size_t len, bool backtrack) {
  PathSeq p{static_cast<VertexId>(rng() % g.size())};
  while (p.size() <= len) {
    const auto nb = g.neighbors(p.back());
    std::vector<VertexId> opts;
    for (auto v : nb)
      if (backtrack || p.size() < 2 || v != p[p.size() - 2]) opts.push_back(v);
    if (opts.empty()) opts.assign(nb.begin(), nb.end());  // leaf on the boundary
    p.push_back(opts[rng() % opts.size()]);
  }
  return p;
}

}  // namespace

TEST(MetricGraph, FreeGroupSpheresGrowByThree) {
  const auto g = MetricGraph::ball(GroupModel::free_group(2), 6);
  const auto s = g.sphere_sizes();
  ASSERT_EQ(s.size(), 7u);
  EXPECT_EQ(s[0], 1u);
  for (std::size_t k = 1; k < s.size(); ++k) EXPECT_EQ(s[k], 4u * static_cast<std::size_t>(std::pow(3, k - 1)));
  EXPECT_EQ(g.size(), 1u + 2u * (static_cast<std::size_t>(std::pow(3, 6)) - 1u));
}

TEST(MetricGraph, Z2SpheresAreDiamonds) {
  // |S_k| = 4k in Z^2 with the l1 metric.
  const auto g = MetricGraph::ball(GroupModel::free_abelian(2), 9);
  const auto s = g.sphere_sizes();
  for (std::size_t k = 1; k < s.size(); ++k) EXPECT_EQ(s[k], 4 * k);
}

TEST(MetricGraph, BfsDistancesMatchWordMetric) {
  const auto m = GroupModel::free_product({2, 1});
  const auto g = MetricGraph::ball(m, 5);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto u = static_cast<VertexId>(rng() % g.size());
    const auto v = static_cast<VertexId>(rng() % g.size());
    EXPECT_EQ(g.distance(u, v), m.distance(g.label(u), g.label(v)));
    const auto d = g.bfs(u);
    EXPECT_EQ(d[v], g.distance(u, v));
  }
}

TEST(MetricGraph, GeodesicsAreGeodesic) {
  const auto g = MetricGraph::ball(GroupModel::free_product({2, 2}), 4);
  std::mt19937_64 rng(9);
  for (int t = 0; t < 100; ++t) {
    const auto u = static_cast<VertexId>(rng() % g.size());
    const auto v = static_cast<VertexId>(rng() % g.size());
    const auto p = g.a_geodesic(u, v);
    EXPECT_TRUE(g.is_path(p));
    EXPECT_EQ(static_cast<std::int64_t>(p.size()) - 1, g.distance(u, v));
    EXPECT_TRUE(g.is_quasigeodesic(p, 1.0, 0.0).ok);
  }
}

TEST(Quasigeodesic, BranchAndBoundAgreesWithAllPairs) {
  const auto g = MetricGraph::ball(GroupModel::free_group(2), 7);
  std::mt19937_64 rng(21);
  for (int t = 0; t < 150; ++t) {
    const auto p = random_walk(g, rng, 4 + rng() % 30, t % 2 == 0);
    bool inside = true;
    for (auto v : p) inside = inside && g.depth(v) < 7;
    if (!inside) continue;
    for (double lambda : {1.0, 1.5, 3.0}) {
      const double want = brute_max_excess(g, p, lambda);
      EXPECT_NEAR(g.fit_c(p, lambda), want, 1e-9) << "lambda " << lambda;
      EXPECT_EQ(g.is_quasigeodesic(p, lambda, want).ok, true);
      if (want > 0) EXPECT_FALSE(g.is_quasigeodesic(p, lambda, want - 0.5).ok);
    }
  }
}

TEST(Quasigeodesic, BacktrackFitsTwoAtLambdaOne) {
  // 1 -> a -> 1 -> b
  const auto m = GroupModel::free_group(2);
  const auto p = CayleyPath::from_word(m, m.identity(), m.parse_letters("aAb"));
  CayleySpace S(m);
  EXPECT_DOUBLE_EQ(S.fit_c(p, 1.0), 2.0);
  const auto v = S.is_quasigeodesic(p, 1.0, 0.0);
  ASSERT_FALSE(v.ok);
  // (0, 2) and (0, 3) both have excess 2; ties go to the longer span
  EXPECT_EQ(*v.witness, std::make_pair(std::size_t{0}, std::size_t{3}));
  EXPECT_DOUBLE_EQ(v.excess, 2.0);
}

TEST(Quasigeodesic, LongCayleyPathsAgreeWithGraphOracle) {
  // Cayley paths against the same walks in a ball.
  const auto m = GroupModel::free_group(2);
  const auto g = MetricGraph::ball(m, 8);
  CayleySpace S(m);
  std::mt19937_64 rng(33);
  for (int t = 0; t < 60; ++t) {
    PathSeq p{g.root()};
    std::vector<Letter> word;
    while (word.size() < 8) {
      const auto nb = g.neighbors(p.back());
      const auto ls = g.edge_letters(p.back());
      const auto k = rng() % nb.size();
      if (g.depth(nb[k]) > 4) continue;
      p.push_back(nb[k]);
      word.push_back(ls[k]);
    }
    const auto cp = CayleyPath::from_word(m, m.identity(), word);
    for (double lambda : {1.0, 2.0}) EXPECT_NEAR(S.fit_c(cp, lambda), brute_max_excess(g, p, lambda), 1e-9);
  }
}

TEST(MetricGraph, CosetAndSubgroupSubsets) {
  const auto m = GroupModel::free_group(2);
  const auto g = MetricGraph::ball(m, 5);
  const auto X = g.coset_subset(FactorCoset::of(m, m.identity(), 0));
  EXPECT_EQ(X.size(), 11u);  // a^-5 .. a^5
  SubgroupSpec ab{{m.parse("ab")}, 3};
  bool stab = false;
  const auto H = g.subgroup_subset(ab, &stab);
  EXPECT_EQ(H.size(), 5u);  // (ab)^k, |k| <= 2
  EXPECT_TRUE(stab);
}

TEST(MetricGraph, DiameterFlagsBoundaryContact) {
  const auto m = GroupModel::free_group(2);
  const auto g = MetricGraph::ball(m, 5);
  const auto axis = g.coset_subset(FactorCoset::of(m, m.identity(), 0));
  const auto d = g.diam(axis);
  EXPECT_EQ(d.value, 10);
  EXPECT_FALSE(d.trusted);
  const auto small = VertexSubset::from({*g.find(m.identity()), *g.find(m.parse("a"))});
  EXPECT_TRUE(g.diam(small).trusted);
}

TEST(MetricGraph, BudgetIsEnforced) {
  EXPECT_THROW(MetricGraph::ball(GroupModel::free_group(3), 12, 1000), ResourceError);
}

TEST(BallCache, RoundTripsThroughDisk) {
  const auto dir = ::testing::TempDir() + "/coarsegeo_cache_test";
  setenv(kCacheDirEnv, dir.c_str(), 1);
  const auto m = GroupModel::free_product({2, 1});
  const auto a = load_or_build_ball(m, 4);
  const auto b = load_or_build_ball(m, 4);
  EXPECT_TRUE(b.from_cache);
  EXPECT_EQ(a.path, b.path);
  ASSERT_EQ(a.graph.size(), b.graph.size());
  for (VertexId v = 0; v < a.graph.size(); ++v) {
    EXPECT_EQ(a.graph.label(v), b.graph.label(v));
    EXPECT_TRUE(std::equal(a.graph.neighbors(v).begin(), a.graph.neighbors(v).end(), b.graph.neighbors(v).begin()));
  }
  // a different radius is a different entry
  EXPECT_NE(ball_cache_path(m, 4), ball_cache_path(m, 5));
  unsetenv(kCacheDirEnv);
}
