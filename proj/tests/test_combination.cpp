#include <functional>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "coarsegeo/amalgam.hpp"
#include "coarsegeo/hnn.hpp"
#include "coarsegeo/relative.hpp"

using namespace coarsegeo;

namespace {

RateSet free_rates() {
  return RateSet::from_json(nlohmann::json::parse(
      R"({"mu": 1, "epsilon": 1, "tau": 1, "nu": {"slope": 2, "intercept": 1}})"));
}

// Free reduction on strings over aAbB.
std::string reduce(const std::string& w) {
  std::string out;
  for (char ch : w) {
    if (!out.empty() && out.back() != ch && std::tolower(out.back()) == std::tolower(ch)) out.pop_back();
    else out.push_back(ch);
  }
  return out;
}

}  // namespace

// ------------------------------------------------------------------ amalgam

TEST(DoubleCoset, SpecExamples) {
  const auto F2 = GroupModel::free_group(2);
  EXPECT_EQ(min_double_coset_rep(F2, F2.parse("aab"), {{}, 4}, 4).rep, F2.parse("aab"));
  EXPECT_EQ(min_double_coset_rep(F2, F2.parse("aab"), {{F2.parse("a")}, 6}, 6).rep, F2.parse("b"));
  const auto G = GroupModel::free_product({2, 2});
  const auto r = min_double_coset_rep(G, G.parse("a1^3 a2"), {{G.parse("a1")}, 6}, 6);
  EXPECT_EQ(r.rep, G.parse("a2"));
  EXPECT_TRUE(r.certified);
}

TEST(DoubleCoset, BruteForceOracle) {
  // min over c1 h c2 with |c1|, |c2| <= 6 in C = <a>
  const auto F2 = GroupModel::free_group(2);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    Element h = F2.identity();
    for (int k = 0; k < 7; ++k) F2.append_letter(h, Letter{static_cast<std::uint32_t>(rng() % 2), (rng() & 1) == 1});
    if (F2.in_factor(h, 0)) continue;
    std::int64_t best = F2.word_length(h);
    for (int i = -6; i <= 6; ++i)
      for (int j = -6; j <= 6; ++j)
        best = std::min(best, F2.word_length(F2.multiply(F2.multiply(F2.power(F2.parse("a"), i), h),
                                                         F2.power(F2.parse("a"), j))));
    EXPECT_EQ(F2.word_length(min_double_coset_rep(F2, h, {{F2.parse("a")}, 6}, 6).rep), best);
  }
}

TEST(NormalPath, FreeGroupThreeSyllables) {
  const auto m = GroupModel::free_group(2);
  const AmalgamWord w{{Side::kK, m.parse("b^5")}, {Side::kH, m.parse("a^5")}, {Side::kK, m.parse("b^-5")}};
  const auto np = build_normal_path_amalgam(m, w, 0, 1);
  EXPECT_EQ(np.decomp.pieces.size(), 3u);
  ASSERT_EQ(np.decomp.targets.size(), 2u);
  EXPECT_EQ(np.decomp.targets[0], FactorCoset::of(m, m.identity(), 1));
  EXPECT_EQ(np.decomp.targets[1], FactorCoset::of(m, m.parse("b^5 a^5"), 1));
  EXPECT_EQ(np.value, m.parse("b^5 a^5 b^-5"));
  EXPECT_EQ(np.path.length(), 15);
}

TEST(NormalPath, OpeningHGetsTrivialP) {
  const auto m = GroupModel::free_product({2, 2});
  const AmalgamWord w{{Side::kH, m.parse("a1^5")}, {Side::kK, m.parse("b1^5")}};
  const auto np = build_normal_path_amalgam(m, w, 0, 1);
  ASSERT_EQ(np.decomp.targets.size(), 2u);
  EXPECT_EQ(np.decomp.pieces[0].length(), 0);
  EXPECT_EQ(np.decomp.targets[1], FactorCoset::of(m, m.parse("a1^5"), 1));
}

TEST(Amalgam, FreeGroupAgainstFreeReduction) {
  const auto m = GroupModel::free_group(2);
  const auto rates = free_rates();
  const auto k = compute_constants(rates, 1, 0);
  const std::int64_t N = k.D + 1;
  AmalgamBounds b;
  b.max_syllables = 4;
  b.syllable_depth = 1;
  const auto r = check_amalgam_injectivity(m, {{m.power(m.parse("a"), N)}, 2}, {{m.power(m.parse("b"), N)}, 2},
                                           {{}, 1}, b, rates, k);
  EXPECT_EQ(r.collisions, 0u);
  EXPECT_EQ(r.trivial, 0u);
  EXPECT_EQ(r.qg_failures, 0u);
  EXPECT_EQ(r.admissible_failures, 0u);
  EXPECT_EQ(r.misclassified, 0u);
  // two syllable choices per side: sum over n <= 4 of 2 * 2^n words
  EXPECT_EQ(r.words, 2u * (2 + 4 + 8 + 16));

  // independent count: distinct free reductions of the same words in x = a^N, y = b^N
  std::set<std::string> seen;
  const std::string X(N, 'a'), x(N, 'A'), Y(N, 'b'), y(N, 'B');
  std::function<void(std::string, int, int)> grow = [&](std::string w, int len, int side) {
    if (len > 0) seen.insert(reduce(w));
    if (len == 4) return;
    for (const auto* s : side == 0 ? std::vector<const std::string*>{&Y, &y} : std::vector<const std::string*>{&X, &x})
      grow(w + *s, len + 1, 1 - side);
  };
  grow("", 0, 0);
  grow("", 0, 1);
  EXPECT_EQ(seen.size(), r.distinct);
}

TEST(Amalgam, DegenerateSidesAreRejected) {
  const auto m = GroupModel::free_group(2);
  const auto rates = free_rates();
  const auto k = compute_constants(rates, 1, 0);
  EXPECT_THROW(check_amalgam_injectivity(m, {{m.parse("a")}, 2}, {{m.parse("a")}, 2}, {{}, 1}, {}, rates, k),
               PreconditionError);
}

TEST(Amalgam, CyclicLength) {
  const auto m = GroupModel::free_group(2);
  const AmalgamWord w{{Side::kK, m.parse("b")}, {Side::kH, m.parse("a")}, {Side::kK, m.parse("B")}};
  EXPECT_EQ(amalgam_cyclic_length(m, w), 1u);
  const AmalgamWord v{{Side::kH, m.parse("a")}, {Side::kK, m.parse("b")}};
  EXPECT_EQ(amalgam_cyclic_length(m, v), 2u);
}

// ------------------------------------------------------------ parabolics, lifts

TEST(Classify, SpecExamples) {
  const auto m = GroupModel::free_product({2, 2});
  const auto p = classify_hyperbolic(m, m.parse("a1^3"));
  EXPECT_TRUE(p.parabolic);
  EXPECT_EQ(p.factor, 0u);
  const auto c = classify_hyperbolic(m, m.parse("b1 a1 B1"));
  EXPECT_TRUE(c.parabolic);
  EXPECT_EQ(c.conjugator, m.parse("b1"));
  EXPECT_EQ(m.multiply(m.multiply(c.conjugator, c.core), m.inverse(c.conjugator)), m.parse("b1 a1 B1"));
  const auto h = classify_hyperbolic(m, m.parse("a1 b1"));
  EXPECT_FALSE(h.parabolic);
  EXPECT_EQ(h.cyclic_syllables, 2u);
  EXPECT_FALSE(classify_hyperbolic(GroupModel::free_group(2), GroupModel::free_group(2).parse("a")).parabolic);
}

TEST(Classify, ConjugatesOfSyllablesAreParabolic) {
  const auto m = GroupModel::free_product({2, 2});
  std::mt19937_64 rng(10);
  for (int t = 0; t < 200; ++t) {
    Element g = m.identity();
    for (int k = 0; k < 6; ++k) m.append_letter(g, Letter{static_cast<std::uint32_t>(rng() % 4), (rng() & 1) == 1});
    const auto s = m.parse(rng() % 2 ? "a1^2 a2" : "b2^3");
    const auto w = m.multiply(m.multiply(g, s), m.inverse(g));
    const auto c = classify_hyperbolic(m, w);
    ASSERT_TRUE(c.parabolic);
    EXPECT_EQ(m.multiply(m.multiply(c.conjugator, c.core), m.inverse(c.conjugator)), w);
    // conjugate of s b1 a1: two syllables after cyclic reduction
    const auto v = m.multiply(w, m.multiply(m.multiply(g, m.parse("b1 a1")), m.inverse(g)));
    EXPECT_FALSE(classify_hyperbolic(m, v).parabolic);
  }
}

TEST(Relative, ComponentsOfSpecElement) {
  const auto m = GroupModel::free_product({2, 2});
  const auto rel = relative_geodesic(m, m.parse("a1 b1 a2"));
  const auto comps = components(m, rel);
  ASSERT_EQ(comps.size(), 3u);
  EXPECT_EQ(comps[0].coset, FactorCoset::of(m, m.identity(), 0));
  EXPECT_EQ(comps[1].coset, FactorCoset::of(m, m.parse("a1"), 1));
  EXPECT_EQ(comps[2].coset, FactorCoset::of(m, m.parse("a1 b1"), 0));
  EXPECT_NE(comps[0].coset, comps[2].coset);
  for (const auto& c : comps) EXPECT_TRUE(c.isolated);
  EXPECT_EQ(components(m, relative_geodesic(m, m.parse("a1^3"))).size(), 1u);
}

TEST(Relative, LiftsOfRelativeGeodesicsAreGeodesics) {
  const auto m = GroupModel::free_product({2, 2});
  const CayleySpace S(m);
  const auto lift = lift_path(m, relative_geodesic(m, m.parse("a1^2 a2")));
  ASSERT_EQ(lift.size(), 4u);
  EXPECT_EQ(lift[1], m.parse("a1"));
  EXPECT_EQ(lift[2], m.parse("a1^2"));
  EXPECT_EQ(lift_path(m, relative_geodesic(m, m.parse("a1 b1"))).length(), 2);
  std::mt19937_64 rng(14);
  for (int t = 0; t < 200; ++t) {
    Element g = m.identity();
    while (g.syllables().size() < 4)
      m.append_letter(g, Letter{static_cast<std::uint32_t>(rng() % 4), (rng() & 1) == 1});
    const auto start = m.parse(rng() % 2 ? "b2" : "1");
    const auto l = lift_path(m, relative_geodesic(m, g, start));
    EXPECT_EQ(l.length(), m.word_length(g));
    EXPECT_EQ(l.back(), m.multiply(start, g));
    EXPECT_EQ(S.fit_c(l, 1.0), 0.0);
  }
}

// ---------------------------------------------------------------------- HNN

TEST(Hnn, FreeReduceOracle) {
  EXPECT_EQ(free_reduce({1, 2, -2, 3, -3, -1}), HWord{});
  EXPECT_EQ(free_reduce({1, 1, -1, 2}), (HWord{1, 2}));
  EXPECT_EQ(free_reduce({-3, 3, 3}), (HWord{3}));
}

TEST(Hnn, FixtureHypotheses) {
  const auto fx = make_hnn_fixture(12);
  EXPECT_EQ(fx.z, fx.model.parse("b2 a1 B2"));
  EXPECT_EQ(fx.t, fx.model.parse("b2 a2^12"));
  for (const auto& c : validate_hnn_fixture(fx, 10, 5)) EXPECT_TRUE(c.ok) << c.hypothesis << ": " << c.detail;
  // cQ must be longer than D
  bool rejected = false;
  for (const auto& c : validate_hnn_fixture(fx, 100, 5)) rejected = rejected || !c.ok;
  EXPECT_TRUE(rejected);
  EXPECT_THROW(make_hnn_fixture(0), PreconditionError);
}

TEST(Hnn, HBallCountsByHand) {
  // length <= 2 in G: words of length <= 2 in a1, b1 (z has length 3)
  const auto fx = make_hnn_fixture(5);
  const auto ball = h_ball(fx, 2);
  EXPECT_EQ(ball.size(), 17u);
  std::set<std::string> seen;
  for (const auto& [g, w] : ball) {
    EXPECT_EQ(fx.evaluate(w), g);
    EXPECT_LE(fx.model.word_length(g), 2);
    seen.insert(fx.model.format(g));
  }
  EXPECT_EQ(seen.size(), ball.size());
  // z itself appears at radius 3
  bool has_z = false;
  for (const auto& [g, w] : h_ball(fx, 3)) has_z = has_z || g == fx.z;
  EXPECT_TRUE(has_z);
}

TEST(Hnn, BrittonPinches) {
  const auto fx = make_hnn_fixture(5);
  // t x t^-1 with x in Q pinches; t y t^-1 does not
  EXPECT_EQ(britton_pinch(fx, {{{}, {1}}, {1, -1}}), std::optional<std::size_t>{0});
  EXPECT_FALSE(britton_pinch(fx, {{{}, {2}}, {1, -1}}).has_value());
  // t^-1 z t pinches (z in Q'), t^-1 x t does not
  EXPECT_TRUE(britton_pinch(fx, {{{}, {3}}, {-1, 1}}).has_value());
  EXPECT_FALSE(britton_pinch(fx, {{{}, {1}}, {-1, 1}}).has_value());
  EXPECT_THROW(build_truncation_hnn(fx, {{{}, {1}}, {1, -1}}), ReductionError);
}

TEST(Hnn, AbstractKeyMatchesRelation) {
  // t x t^-1 = z, so t x t^-1 y t = z y t
  const auto fx = make_hnn_fixture(5);
  const HnnWord lhs{{{}, {1}, {2}}, {1, -1, 1}};
  const HnnWord rhs{{{3, 2}}, {1}};
  EXPECT_EQ(abstract_key(lhs), abstract_key(rhs));
  EXPECT_EQ(evaluate_hnn(fx, lhs), evaluate_hnn(fx, rhs));
  EXPECT_NE(abstract_key(rhs), abstract_key({{{2, 3}}, {1}}));
  EXPECT_EQ(cyclic_t_length({{{2}, {}}, {1, -1}}), 0u);
  EXPECT_EQ(cyclic_t_length({{{2}, {2}}, {1, -1}}), 2u);
}

TEST(Hnn, TruncationOfSingleT) {
  const auto fx = make_hnn_fixture(8);
  const auto tp = build_truncation_hnn(fx, {{{}}, {1}});
  EXPECT_EQ(tp.value, fx.t);
  EXPECT_EQ(tp.decomp.num_p(), 1u);
  EXPECT_EQ(tp.targets.size(), 1u);
}

TEST(Hnn, TruncationConjugateHasDistinctTargets) {
  const auto fx = make_hnn_fixture(10);
  const CayleySpace S(fx.model);
  for (const HWord& h : {HWord{2}, HWord{2, 1}, HWord{-2, 3}, HWord{1, 2}}) {
    const HnnWord w{{{}, h}, {1, -1}};
    const auto tp = build_truncation_hnn(fx, w);
    EXPECT_EQ(tp.value, evaluate_hnn(fx, w));
    ASSERT_EQ(tp.targets.size(), 2u);
    EXPECT_NE(tp.targets[0], tp.targets[1]);
    EXPECT_TRUE(tp.targets_distinct);
    for (auto len : tp.p_lengths) EXPECT_GE(len, fx.N - 2);
    // pieces chain and p pieces sit on their targets
    const auto r = verify_admissible(S, tp.decomp, 0, free_rates());
    EXPECT_TRUE(r.conditions[0].ok) << r.conditions[0].witness;
    EXPECT_TRUE(r.conditions[1].ok) << r.conditions[1].witness;
  }
}
