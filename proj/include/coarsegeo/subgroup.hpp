#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "coarsegeo/group_model.hpp"

namespace coarsegeo {

struct SubgroupSpec {
  std::vector<Element> generators;
  int enumeration_depth = 4;
};

struct SubgroupEnumeration {
  std::vector<Element> elements;  // BFS order over subgroup words
  // True when one more level of subgroup words adds no element of word
  // length <= radius. Always false without a radius unless the subgroup is
  // exhausted.
  bool stabilized = false;
  std::size_t added_at_next_depth = 0;
};

// Elements reachable by subgroup words of length <= depth. With a radius only
// elements of word length <= radius are kept (intermediate words may leave
// the ball).
SubgroupEnumeration enumerate_subgroup(const GroupModel& model, const SubgroupSpec& spec,
                                       std::optional<std::int64_t> radius = std::nullopt,
                                       std::size_t max_elements = 5'000'000);

// Left coset g * F of a factor subgroup F.
struct FactorCoset {
  Element key;  // canonical representative: no trailing F-syllable
  std::uint32_t factor = 0;

  static FactorCoset of(const GroupModel& model, const Element& g, std::uint32_t factor);
  friend bool operator==(const FactorCoset&, const FactorCoset&) = default;
};

struct FactorCosetHash {
  std::size_t operator()(const FactorCoset& c) const noexcept {
    return ElementHash{}(c.key) * 31u + c.factor;
  }
};

bool coset_contains(const GroupModel& model, const FactorCoset& X, const Element& v);

struct CosetProjection {
  std::int64_t distance = 0;
  Element nearest;  // the unique nearest point
  Syllable offset;  // nearest = key * offset (offset may be zero)
};

// Exact closed form: with w = key^{-1} v, the nearest point is key * s where
// s is the leading F-syllable of w (or trivial), and d = |w| - |s|.
CosetProjection coset_projection(const GroupModel& model, const FactorCoset& X, const Element& v);

// Points x of X with d(v, x) <= d(v, X) + delta: an l1-ball around the
// nearest point inside the factor.
std::vector<Element> coset_project(const GroupModel& model, const FactorCoset& X, const Element& v,
                                   std::int64_t delta);

// All integer vectors of the given rank with l1 norm <= radius, in
// lexicographic order.
std::vector<std::array<std::int32_t, kMaxFactorRank>> l1_ball(int rank, std::int64_t radius);

// Integer lattice L inside a factor Z^r, stored in Hermite normal form.
class FactorLattice {
 public:
  FactorLattice() = default;
  FactorLattice(const GroupModel& model, std::uint32_t factor,
                const std::vector<std::array<std::int32_t, kMaxFactorRank>>& generators);
  // Lattice generated by the given factor elements (each must lie in the factor).
  static FactorLattice from_elements(const GroupModel& model, std::uint32_t factor,
                                     const std::vector<Element>& gens);

  std::uint32_t factor() const { return factor_; }
  int rank() const { return static_cast<int>(basis_.size()); }
  const std::vector<std::array<std::int64_t, kMaxFactorRank>>& basis() const { return basis_; }
  bool contains(const GroupModel& model, const Element& g) const;
  bool contains_vector(const std::array<std::int32_t, kMaxFactorRank>& v) const;
  // Canonical representative of v + L.
  std::array<std::int32_t, kMaxFactorRank> reduce(const std::array<std::int32_t, kMaxFactorRank>& v) const;

 private:
  std::uint32_t factor_ = 0;
  int ambient_ = 0;
  std::vector<std::array<std::int64_t, kMaxFactorRank>> basis_;  // echelon rows
  std::vector<int> pivots_;
};

// Rank over Q of a set of integer vectors (exact, fraction-free).
int integer_rank(std::vector<std::vector<std::int64_t>> rows);

}  // namespace coarsegeo
