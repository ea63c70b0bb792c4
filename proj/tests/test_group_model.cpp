#include <random>
#include <string>

#include <gtest/gtest.h>

#include "coarsegeo/errors.hpp"
#include "coarsegeo/group_model.hpp"

using namespace coarsegeo;

namespace {

// Oracle for free groups: stack free reduction on the raw letter string.
std::string free_reduce(const std::string& w) {
  std::string out;
  for (char ch : w) {
    if (!out.empty() && out.back() != ch && std::tolower(out.back()) == std::tolower(ch)) out.pop_back();
    else out.push_back(ch);
  }
  return out;
}

std::string random_word(std::mt19937_64& rng, const std::string& alphabet, int len) {
  std::string w;
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  for (int i = 0; i < len; ++i) w.push_back(alphabet[pick(rng)]);
  return w;
}

}  // namespace

TEST(GroupModel, FreeGroupNormalFormMatchesFreeReduction) {
  const auto F2 = GroupModel::free_group(2);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const auto w = random_word(rng, "aAbB", 1 + static_cast<int>(rng() % 20));
    const auto g = F2.parse(w);
    const auto red = free_reduce(w);
    EXPECT_EQ(F2.word_length(g), static_cast<std::int64_t>(red.size())) << w;
    EXPECT_EQ(F2.parse(red.empty() ? "1" : red), g) << w;
  }
}

TEST(GroupModel, FormatRoundTrips) {
  const auto G = GroupModel::free_product({2, 2});
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    Element g = G.identity();
    for (int k = 0; k < 12; ++k)
      G.append_letter(g, Letter{static_cast<std::uint32_t>(rng() % 4), (rng() & 1) == 1});
    EXPECT_EQ(G.parse(G.format(g)), g);
  }
}

TEST(GroupModel, GroupAxioms) {
  const auto G = GroupModel::free_product({2, 1});
  std::mt19937_64 rng(3);
  auto rnd = [&] {
    Element g = G.identity();
    for (int k = 0; k < 8; ++k) G.append_letter(g, Letter{static_cast<std::uint32_t>(rng() % 3), (rng() & 1) == 1});
    return g;
  };
  for (int i = 0; i < 300; ++i) {
    const auto x = rnd(), y = rnd(), z = rnd();
    EXPECT_EQ(G.multiply(G.multiply(x, y), z), G.multiply(x, G.multiply(y, z)));
    EXPECT_TRUE(G.multiply(x, G.inverse(x)).is_identity());
    EXPECT_EQ(G.distance(x, y), G.word_length(G.between(x, y)));
    EXPECT_LE(G.distance(x, z), G.distance(x, y) + G.distance(y, z));
  }
}

TEST(GroupModel, AbelianFactorLengthIsL1) {
  // In Z^2 * Z^2 the length of a syllable is the l1 norm of its exponents.
  const auto G = GroupModel::free_product({2, 2});
  EXPECT_EQ(G.word_length(G.parse("a1^3 a2^-2")), 5);
  EXPECT_EQ(G.parse("a1 a2"), G.parse("a2 a1"));
  EXPECT_NE(G.parse("a1 b1"), G.parse("b1 a1"));
  EXPECT_EQ(G.word_length(G.parse("a1 b1 a2^4 b2 B2 A1")), 7);
}

TEST(GroupModel, PowersAndSyllables) {
  const auto F2 = GroupModel::free_group(2);
  EXPECT_EQ(F2.word_length(F2.power(F2.parse("ab"), 5)), 10);
  EXPECT_EQ(F2.word_length(F2.power(F2.parse("aba"), -3)), 9);  // ABA ABA ABA, nothing cancels
  EXPECT_EQ(F2.word_length(F2.power(F2.parse("abA"), 4)), 6);   // conjugate of b^4
  EXPECT_TRUE(F2.power(F2.parse("ab"), 0).is_identity());
}

TEST(GroupModel, CosetKeysAreCanonical) {
  const auto G = GroupModel::free_product({2, 2});
  const auto g = G.parse("b1 a1^2");
  EXPECT_EQ(G.coset_key(g, 0), G.parse("b1"));
  EXPECT_EQ(G.coset_key(G.parse("b1 a2^-5"), 0), G.coset_key(g, 0));
  EXPECT_NE(G.coset_key(g, 1), G.coset_key(G.parse("b1"), 1));
  EXPECT_TRUE(G.in_factor(G.parse("a1 a2^3"), 0));
  EXPECT_FALSE(G.in_factor(G.parse("a1 b1"), 0));
}

TEST(GroupModel, RejectsUnknownLetters) {
  const auto F2 = GroupModel::free_group(2);
  EXPECT_THROW(F2.parse("abz"), AlphabetError);
  EXPECT_THROW(GroupModel::from_json(nlohmann::json{{"kind", "surface"}}), ConfigError);
}

TEST(GroupModel, JsonRoundTripKeepsHash) {
  for (const auto& m : {GroupModel::free_group(3), GroupModel::free_abelian(2), GroupModel::free_product({2, 1, 3})}) {
    const auto back = GroupModel::from_json(m.to_json());
    EXPECT_EQ(back.hash(), m.hash());
    EXPECT_EQ(back.num_generators(), m.num_generators());
  }
}

TEST(GroupModel, TorsionFactorIsAConfigError) {
  EXPECT_THROW(GroupModel::from_json(nlohmann::json::parse(R"({"kind": "free_product", "factors": [2, "Z/3"]})")),
               ConfigError);
}
