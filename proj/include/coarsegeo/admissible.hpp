#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coarsegeo/constants.hpp"
#include "coarsegeo/errors.hpp"
#include "coarsegeo/path_ops.hpp"

namespace coarsegeo {

// Alternating concatenation of quasigeodesic pieces. Pieces tagged p have
// both endpoints on their target; q pieces join consecutive targets. The
// usual shape is p0 q1 p1 ... qn pn; a path may also open or close with a q.
template <class Space>
struct AdmissibleDecomposition {
  using Path = typename Space::Path;
  using Target = typename Space::Target;

  std::vector<Path> pieces;
  std::vector<bool> is_p;
  std::vector<Target> targets;  // one per p piece, in order
  double lambda = 1.0;
  double c = 0.0;

  void add_p(Path p, Target X) {
    pieces.push_back(std::move(p));
    is_p.push_back(true);
    targets.push_back(std::move(X));
  }
  void add_q(Path q) {
    pieces.push_back(std::move(q));
    is_p.push_back(false);
  }
  std::size_t num_p() const { return targets.size(); }
  // Indices of the p pieces within `pieces`.
  std::vector<std::size_t> p_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < pieces.size(); ++k)
      if (is_p[k]) out.push_back(k);
    return out;
  }
};

struct ConditionResult {
  std::string name;
  std::string anchor;
  bool ok = true;
  std::string witness;
};

struct AdmissibleReport {
  bool ok = true;
  std::vector<ConditionResult> conditions;
  std::optional<std::size_t> first_violation;  // index into conditions
  std::int64_t max_orthogonal_diam = 0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["ok"] = ok;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : conditions)
      arr.push_back({{"condition", c.name}, {"anchor", c.anchor}, {"ok", c.ok}, {"witness", c.witness}});
    j["conditions"] = arr;
    return j;
  }
};

template <class Space>
typename Space::Path concatenate(const Space& S, const AdmissibleDecomposition<Space>& d) {
  std::vector<const typename Space::Path*> ptrs;
  for (const auto& p : d.pieces) ptrs.push_back(&p);
  return S.concat(ptrs);
}

namespace detail {

template <class Path>
auto path_front(const Path& p) {
  return p[0];
}
template <class Path>
auto path_back(const Path& p) {
  return p[p.size() - 1];
}

}  // namespace detail

// Conditions of an admissible path at (D, lambda, c):
//   pieces      every piece is a (lambda, c)-quasigeodesic and they chain
//   alternation p and q alternate, each p has both endpoints on its target
//   long-p      interior p pieces are longer than lambda D + c
//   orthogonal  a q piece with an endpoint on a target is tau-orthogonal to it
//   separated   consecutive targets have bounded intersection, or the q
//               between them is longer than lambda D + c
template <class Space>
AdmissibleReport verify_admissible(const Space& S, const AdmissibleDecomposition<Space>& d, std::int64_t D,
                                   const RateSet& rates) {
  if (d.pieces.empty()) throw StructuralError("decomposition has no pieces");
  if (d.is_p.size() != d.pieces.size()) throw StructuralError("piece tags do not match pieces");
  std::size_t np = 0;
  for (bool b : d.is_p) np += b ? 1 : 0;
  if (np != d.targets.size()) throw StructuralError("one target per p piece required");

  AdmissibleReport r;
  auto add = [&](const char* name, const char* anchor, bool ok, std::string w) {
    r.conditions.push_back({name, anchor, ok, std::move(w)});
    if (!ok && !r.first_violation) r.first_violation = r.conditions.size() - 1;
    r.ok = r.ok && ok;
  };
  const double lam = d.lambda, c = d.c;
  const double threshold = lam * static_cast<double>(D) + c;
  const std::size_t n = d.pieces.size();

  {
    std::string w;
    for (std::size_t k = 0; k < n && w.empty(); ++k) {
      if (d.pieces[k].size() == 0) w = "piece " + std::to_string(k) + " is empty";
      else if (k > 0 && !(detail::path_front(d.pieces[k]) == detail::path_back(d.pieces[k - 1])))
        w = "piece " + std::to_string(k) + " does not start where piece " + std::to_string(k - 1) + " ends";
      else if (!S.is_quasigeodesic(d.pieces[k], lam, c).ok)
        w = "piece " + std::to_string(k) + " is not a (" + std::to_string(lam) + ", " + std::to_string(c) +
            ")-quasigeodesic";
    }
    add("pieces", "admissible-quasigeodesic-pieces", w.empty(), w);
  }
  {
    std::string w;
    std::size_t t = 0;
    for (std::size_t k = 0; k < n && w.empty(); ++k) {
      if (k > 0 && d.is_p[k] == d.is_p[k - 1]) w = "pieces " + std::to_string(k - 1) + " and " + std::to_string(k) + " do not alternate";
      if (d.is_p[k]) {
        const auto& X = d.targets[t++];
        if (!S.contains(X, detail::path_front(d.pieces[k])) || !S.contains(X, detail::path_back(d.pieces[k])))
          w = "p piece " + std::to_string(k) + " has an endpoint off its target";
      }
    }
    add("alternation", "admissible-alternation", w.empty(), w);
  }
  {
    std::string w;
    const std::size_t first_p = d.is_p.front() ? 0 : 1;
    for (std::size_t k = 0; k < n && w.empty(); ++k) {
      if (!d.is_p[k] || k == 0 || k + 1 == n) continue;
      const double len = static_cast<double>(d.pieces[k].size() - 1);
      if (!(len > threshold))
        w = "p piece " + std::to_string(k) + " has length " + std::to_string(d.pieces[k].size() - 1) +
            " <= lambda D + c = " + std::to_string(threshold);
    }
    (void)first_p;
    add("long-p", "admissible-long-pieces", w.empty(), w);
  }
  {
    std::string w;
    const std::int64_t mu = rates.mu.at(lam, c), tau = rates.tau.at(lam, c);
    std::size_t t = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (d.is_p[k]) {
        ++t;
        continue;
      }
      // targets adjacent to this q: the previous p (index t-1) and the next (t)
      const typename Space::Target* before = k > 0 ? &d.targets[t - 1] : nullptr;
      const typename Space::Target* after = k + 1 < n ? &d.targets[t] : nullptr;
      for (const auto* X : {before, after}) {
        if (!X) continue;
        const auto nd = near_diameter(S, d.pieces[k], *X, mu);
        r.max_orthogonal_diam = std::max(r.max_orthogonal_diam, nd.diam);
        if (nd.diam > tau && w.empty())
          w = "q piece " + std::to_string(k) + " meets N_" + std::to_string(mu) + " of an adjacent target in diameter " +
              std::to_string(nd.diam) + " > tau = " + std::to_string(tau);
      }
    }
    add("orthogonal", "orthogonality", w.empty(), w);
  }
  {
    std::string w;
    std::size_t t = 0;
    for (std::size_t k = 0; k < n && w.empty(); ++k) {
      if (d.is_p[k]) {
        ++t;
        continue;
      }
      if (k == 0 || k + 1 == n) continue;
      const auto& X0 = d.targets[t - 1];
      const auto& X1 = d.targets[t];
      const double len = static_cast<double>(d.pieces[k].size() - 1);
      if (!S.bounded_intersection(X0, X1) && !(len > threshold))
        w = "targets around q piece " + std::to_string(k) + " coincide and the piece is short";
    }
    add("separated", "bounded-intersection", w.empty(), w);
  }
  return r;
}

struct FellowReport {
  bool ok = true;
  std::vector<std::pair<std::size_t, std::size_t>> markers;  // (z_i, w_i) indices on alpha
  std::optional<std::size_t> failed_piece;
};

namespace detail {

// First index j >= from with d(alpha[j], y) < R, skipping by the
// 1-Lipschitz bound.
template <class Space>
std::optional<std::size_t> first_within(const Space& S, const typename Space::Path& alpha, std::size_t from,
                                        const typename Space::Point& y, std::int64_t R) {
  std::size_t j = from;
  while (j < alpha.size()) {
    const auto dd = S.distance(alpha[j], y);
    if (dd < R) return j;
    j += static_cast<std::size_t>(dd - R + 1);
  }
  return std::nullopt;
}

}  // namespace detail

// Greedy left-to-right search for z_0 <= w_0 <= z_1 <= ... on alpha with
// d(z_i, (p_i)-) < R, d(w_i, (p_i)+) < R and d(z_i, w_i) >= 1.
template <class Space>
FellowReport check_fellow_traveller(const Space& S, const AdmissibleDecomposition<Space>& d,
                                    const typename Space::Path& alpha, std::int64_t R) {
  FellowReport r;
  std::size_t pos = 0;
  std::size_t i = 0;
  for (auto k : d.p_indices()) {
    const auto& p = d.pieces[k];
    const auto a = detail::path_front(p);
    const auto b = detail::path_back(p);
    bool found = false;
    auto z = detail::first_within(S, alpha, pos, a, R);
    while (z && !found) {
      auto w = detail::first_within(S, alpha, *z, b, R);
      while (w && S.distance(alpha[*z], alpha[*w]) < 1) w = detail::first_within(S, alpha, *w + 1, b, R);
      if (w) {
        r.markers.emplace_back(*z, *w);
        pos = *w;
        found = true;
      } else {
        break;
      }
    }
    if (!found) {
      r.ok = false;
      r.failed_piece = i;
      return r;
    }
    ++i;
  }
  return r;
}

struct FrontierPoint {
  double lambda = 1.0;
  double c = 0.0;
};

// Minimal c for each lambda on the grid.
template <class Space>
std::vector<FrontierPoint> fit_frontier(const Space& S, const typename Space::Path& p, const std::vector<double>& lambdas) {
  std::vector<FrontierPoint> out;
  for (double l : lambdas) out.push_back({l, S.fit_c(p, l)});
  return out;
}

// Smallest integer Lambda' >= 1 with p a (Lambda', 0)-quasigeodesic, up to cap.
template <class Space>
std::optional<std::int64_t> fit_lambda(const Space& S, const typename Space::Path& p, std::int64_t cap) {
  std::int64_t lo = 1, hi = cap;
  if (!S.is_quasigeodesic(p, static_cast<double>(hi), 0.0).ok) return std::nullopt;
  while (lo < hi) {
    const auto mid = lo + (hi - lo) / 2;
    if (S.is_quasigeodesic(p, static_cast<double>(mid), 0.0).ok) hi = mid;
    else lo = mid + 1;
  }
  return lo;
}

// Largest diam proj_{X_k}(p_{k-1} q_k) and diam proj_{X_k}(q_{k+1} p_{k+1}),
// the quantities bounded by B.
template <class Space>
std::int64_t max_near_target_projection(const Space& S, const AdmissibleDecomposition<Space>& d) {
  std::int64_t best = 0;
  const auto pk = d.p_indices();
  auto span_diam = [&](std::size_t t, std::size_t k0, std::size_t k1) {
    std::vector<typename Space::Point> pts;
    for (std::size_t k = k0; k < k1; ++k) {
      auto more = projection_points(S, d.pieces[k], d.targets[t], 0, d.pieces[k].size());
      pts.insert(pts.end(), more.begin(), more.end());
    }
    best = std::max(best, S.diam(pts));
  };
  for (std::size_t t = 0; t < pk.size(); ++t) {
    if (t > 0) span_diam(t, pk[t - 1], pk[t]);
    if (t + 1 < pk.size()) span_diam(t, pk[t] + 1, pk[t + 1] + 1);
  }
  return best;
}

}  // namespace coarsegeo
