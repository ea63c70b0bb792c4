#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <unordered_set>
#include <vector>

#include "coarsegeo/group_model.hpp"
#include "coarsegeo/metric_graph.hpp"

namespace coarsegeo {

template <class P>
struct PointHashOf {
  using type = std::hash<P>;
};
template <>
struct PointHashOf<Element> {
  using type = ElementHash;
};

// Indices i with d(p[i], X) <= U. Distance to X is 1-Lipschitz along a
// path, so from a vertex at distance d > U the next d - U - 1 vertices can be
// skipped. Long paths that stay far from X cost O(log) evaluations.
template <class Space>
std::vector<std::size_t> indices_near(const Space& S, const typename Space::Path& p,
                                      const typename Space::Target& X, std::int64_t U) {
  std::vector<std::size_t> out;
  const std::size_t n = p.size();
  std::size_t i = 0;
  while (i < n) {
    const std::int64_t d = S.distance_to(X, p[i]);
    if (d <= U) {
      out.push_back(i++);
    } else {
      i += static_cast<std::size_t>(d - U);
    }
  }
  return out;
}

struct NearDiam {
  std::int64_t diam = 0;
  std::size_t count = 0;
  // First and last near index; meaningful when count > 0.
  std::size_t first = 0;
  std::size_t last = 0;
  bool exact = true;
};

// diam(p & N_U(X)). Exact pairwise up to `pair_cap` points; above that the
// value is a lower bound from two sweeps and `exact` is false.
template <class Space>
NearDiam near_diameter(const Space& S, const typename Space::Path& p, const typename Space::Target& X,
                       std::int64_t U, std::size_t pair_cap = 1024) {
  NearDiam r;
  const auto idx = indices_near(S, p, X, U);
  r.count = idx.size();
  if (idx.empty()) return r;
  r.first = idx.front();
  r.last = idx.back();
  std::vector<typename Space::Point> pts;
  pts.reserve(idx.size());
  for (auto i : idx) pts.push_back(p[i]);
  if (pts.size() <= pair_cap) {
    r.diam = S.diam(pts);
    return r;
  }
  r.exact = false;
  auto far_from = [&](const typename Space::Point& a) {
    std::size_t best = 0;
    std::int64_t bd = -1;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const auto d = S.distance(a, pts[k]);
      if (d > bd) {
        bd = d;
        best = k;
      }
    }
    return std::make_pair(best, bd);
  };
  const auto [k1, d1] = far_from(pts.front());
  const auto [k2, d2] = far_from(pts[k1]);
  (void)k2;
  r.diam = std::max(d1, d2);
  return r;
}

// Union of nearest-point projections of the path vertices [from, to) onto X.
template <class Space>
std::vector<typename Space::Point> projection_points(const Space& S, const typename Space::Path& p,
                                                     const typename Space::Target& X, std::size_t from,
                                                     std::size_t to) {
  using Point = typename Space::Point;
  std::unordered_set<Point, typename PointHashOf<Point>::type> seen;
  std::vector<Point> out;
  for (std::size_t i = from; i < to; ++i)
    for (auto& x : S.project(X, p[i], 0))
      if (seen.insert(x).second) out.push_back(x);
  return out;
}

}  // namespace coarsegeo
