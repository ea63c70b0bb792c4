#include "coarsegeo/subgroup.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <unordered_set>

#include "coarsegeo/errors.hpp"

namespace coarsegeo {

SubgroupEnumeration enumerate_subgroup(const GroupModel& model, const SubgroupSpec& spec,
                                       std::optional<std::int64_t> radius, std::size_t max_elements) {
  if (spec.enumeration_depth < 0) throw PreconditionError("enumeration depth must be non-negative");
  std::vector<Element> gens;
  for (const auto& g : spec.generators) {
    model.check(g);
    if (g.is_identity()) continue;
    gens.push_back(g);
    gens.push_back(model.inverse(g));
  }
  std::unordered_set<Element, ElementHash> seen;
  std::vector<Element> layer{model.identity()};
  seen.insert(model.identity());
  SubgroupEnumeration out;
  auto keep = [&](const Element& e) { return !radius || model.word_length(e) <= *radius; };
  out.elements.push_back(model.identity());
  for (int depth = 1; depth <= spec.enumeration_depth + 1; ++depth) {
    const bool probe = depth == spec.enumeration_depth + 1;
    std::vector<Element> next;
    std::size_t added = 0;
    for (const auto& x : layer) {
      for (const auto& g : gens) {
        Element y = model.multiply(x, g);
        if (!seen.insert(y).second) continue;
        if (keep(y)) {
          ++added;
          if (!probe) out.elements.push_back(y);
        }
        if (seen.size() > max_elements)
          throw ResourceError("subgroup enumeration exceeded " + std::to_string(max_elements) +
                              " elements at depth " + std::to_string(depth));
        if (!probe) next.push_back(std::move(y));
      }
    }
    if (probe) {
      out.added_at_next_depth = added;
      out.stabilized = added == 0;
    }
    layer = std::move(next);
  }
  return out;
}

FactorCoset FactorCoset::of(const GroupModel& model, const Element& g, std::uint32_t factor) {
  if (factor >= model.num_factors()) throw PreconditionError("coset factor index out of range");
  return FactorCoset{model.coset_key(g, factor), factor};
}

bool coset_contains(const GroupModel& model, const FactorCoset& X, const Element& v) {
  return model.coset_key(v, X.factor) == X.key;
}

CosetProjection coset_projection(const GroupModel& model, const FactorCoset& X, const Element& v) {
  const Element w = model.between(X.key, v);
  CosetProjection p;
  p.offset.factor = X.factor;
  const auto& syl = w.syllables();
  std::int64_t len = model.word_length(w);
  if (!syl.empty() && syl.front().factor == X.factor) {
    p.offset = syl.front();
    len -= model.syllable_length(syl.front());
  }
  p.distance = len;
  p.nearest = model.multiply(X.key, model.factor_element(X.factor, std::span<const std::int32_t>(
                                                                       p.offset.exps.data(),
                                                                       static_cast<std::size_t>(model.factor_rank(X.factor)))));
  return p;
}

std::vector<std::array<std::int32_t, kMaxFactorRank>> l1_ball(int rank, std::int64_t radius) {
  std::vector<std::array<std::int32_t, kMaxFactorRank>> out;
  std::array<std::int32_t, kMaxFactorRank> cur{};
  auto rec = [&](auto&& self, int k, std::int64_t left) -> void {
    if (k == rank) {
      out.push_back(cur);
      return;
    }
    for (std::int64_t x = -left; x <= left; ++x) {
      cur[k] = static_cast<std::int32_t>(x);
      self(self, k + 1, left - std::llabs(x));
    }
    cur[k] = 0;
  };
  rec(rec, 0, radius);
  return out;
}

std::vector<Element> coset_project(const GroupModel& model, const FactorCoset& X, const Element& v,
                                   std::int64_t delta) {
  if (delta < 0) throw PreconditionError("projection slack must be non-negative");
  const auto p = coset_projection(model, X, v);
  const int r = model.factor_rank(X.factor);
  std::vector<Element> out;
  for (const auto& d : l1_ball(r, delta)) {
    std::array<std::int32_t, kMaxFactorRank> e{};
    for (int k = 0; k < r; ++k) e[k] = p.offset.exps[k] + d[k];
    out.push_back(model.multiply(X.key, model.factor_element(X.factor, std::span<const std::int32_t>(e.data(), r))));
  }
  return out;
}

namespace {

// Row echelon form over Z by repeated gcd elimination; rows with all zeros
// are dropped. Pivots are positive.
template <class Row>
std::vector<Row> echelon(std::vector<Row> rows, int cols, std::vector<int>* pivots) {
  std::vector<Row> done;
  for (int c = 0; c < cols && !rows.empty(); ++c) {
    while (true) {
      int best = -1;
      for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
        if (rows[i][c] == 0) continue;
        if (best < 0 || std::llabs(rows[i][c]) < std::llabs(rows[best][c])) best = i;
      }
      if (best < 0) break;
      bool clean = true;
      for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
        if (i == best || rows[i][c] == 0) continue;
        const auto q = rows[i][c] / rows[best][c];
        for (int k = 0; k < cols; ++k) rows[i][k] -= q * rows[best][k];
        if (rows[i][c] != 0) clean = false;
      }
      if (clean) {
        Row piv = rows[best];
        if (piv[c] < 0)
          for (int k = 0; k < cols; ++k) piv[k] = -piv[k];
        done.push_back(piv);
        if (pivots) pivots->push_back(c);
        rows.erase(rows.begin() + best);
        break;
      }
    }
    rows.erase(std::remove_if(rows.begin(), rows.end(),
                              [&](const Row& r) {
                                for (int k = 0; k < cols; ++k)
                                  if (r[k] != 0) return false;
                                return true;
                              }),
               rows.end());
  }
  return done;
}

}  // namespace

FactorLattice::FactorLattice(const GroupModel& model, std::uint32_t factor,
                             const std::vector<std::array<std::int32_t, kMaxFactorRank>>& generators)
    : factor_(factor), ambient_(model.factor_rank(factor)) {
  std::vector<std::array<std::int64_t, kMaxFactorRank>> rows;
  for (const auto& g : generators) {
    std::array<std::int64_t, kMaxFactorRank> r{};
    for (int k = 0; k < ambient_; ++k) r[k] = g[k];
    rows.push_back(r);
  }
  basis_ = echelon(std::move(rows), ambient_, &pivots_);
}

FactorLattice FactorLattice::from_elements(const GroupModel& model, std::uint32_t factor,
                                           const std::vector<Element>& gens) {
  std::vector<std::array<std::int32_t, kMaxFactorRank>> vs;
  for (const auto& g : gens) {
    if (!model.in_factor(g, factor))
      throw PreconditionError("lattice generator " + model.format(g) + " is not in factor " +
                              model.factor_name(factor));
    vs.push_back(g.is_identity() ? std::array<std::int32_t, kMaxFactorRank>{} : g.syllables()[0].exps);
  }
  return FactorLattice(model, factor, vs);
}

std::array<std::int32_t, kMaxFactorRank> FactorLattice::reduce(
    const std::array<std::int32_t, kMaxFactorRank>& v) const {
  std::array<std::int64_t, kMaxFactorRank> w{};
  for (int k = 0; k < ambient_; ++k) w[k] = v[k];
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    const int p = pivots_[i];
    const auto piv = basis_[i][p];
    auto q = w[p] / piv;
    if (w[p] - q * piv < 0) --q;
    for (int k = 0; k < ambient_; ++k) w[k] -= q * basis_[i][k];
  }
  std::array<std::int32_t, kMaxFactorRank> out{};
  for (int k = 0; k < ambient_; ++k) out[k] = static_cast<std::int32_t>(w[k]);
  return out;
}

bool FactorLattice::contains_vector(const std::array<std::int32_t, kMaxFactorRank>& v) const {
  const auto r = reduce(v);
  return std::all_of(r.begin(), r.end(), [](std::int32_t x) { return x == 0; });
}

bool FactorLattice::contains(const GroupModel& model, const Element& g) const {
  if (g.is_identity()) return true;
  if (!model.in_factor(g, factor_)) return false;
  return contains_vector(g.syllables()[0].exps);
}

int integer_rank(std::vector<std::vector<std::int64_t>> rows) {
  if (rows.empty()) return 0;
  const int cols = static_cast<int>(rows[0].size());
  return static_cast<int>(echelon(std::move(rows), cols, nullptr).size());
}

}  // namespace coarsegeo
