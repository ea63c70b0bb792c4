#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace coarsegeo {

struct QuasigeodesicVerdict {
  bool ok = true;
  // Violating pair of path indices (i < j), present iff !ok.
  std::optional<std::pair<std::size_t, std::size_t>> witness;
  // (j - i) - lambda * d(i, j) at the witness.
  double excess = 0.0;
};

struct ExcessPair {
  std::size_t i = 0;
  std::size_t j = 0;
  double excess = 0.0;
};

// Consecutive path vertices are adjacent, so d(i, j) is 1-Lipschitz in each
// index. A pair-wise check over an n-vertex path therefore reduces to:
//   1. cut the path into maximal geodesic runs (d(s, e) == e - s is
//      monotone in e, so each run is found by galloping);
//   2. branch and bound over index rectangles spanning two runs, using
//      excess(i', j') <= excess(i, j) + (1 + lambda)(|i - i'| + |j - j'|).
// The search is exact. Near-geodesic paths cost O(runs^2 log^2 n) distance
// evaluations.
template <class Dist>
std::vector<std::size_t> geodesic_breakpoints(std::size_t n, Dist&& dist) {
  std::vector<std::size_t> b{0};
  if (n <= 1) return b;
  std::size_t s = 0;
  while (s + 1 < n) {
    auto geo = [&](std::size_t e) { return dist(s, e) == static_cast<std::int64_t>(e - s); };
    if (!geo(s + 1)) {
      // repeated vertex or non-adjacent step: a run of one edge
      b.push_back(++s);
      continue;
    }
    std::size_t good = s + 1;
    std::size_t step = 1;
    std::size_t bad = n;
    while (true) {
      const std::size_t probe = good + step;
      if (probe >= n) {
        if (good == n - 1 || geo(n - 1)) good = n - 1;
        else bad = n - 1;
        break;
      }
      if (geo(probe)) {
        good = probe;
        step *= 2;
      } else {
        bad = probe;
        break;
      }
    }
    while (bad < n && bad - good > 1) {
      const std::size_t mid = good + (bad - good) / 2;
      if (geo(mid)) good = mid;
      else bad = mid;
    }
    b.push_back(good);
    s = good;
  }
  return b;
}

// Maximum of (j - i) - lambda * d(i, j) over pairs i < j whose excess is
// strictly above `floor`; nullopt if none.
template <class Dist>
std::optional<ExcessPair> max_excess(std::size_t n, Dist&& dist, double lambda, double floor) {
  if (n < 2) return std::nullopt;
  const auto br = geodesic_breakpoints(n, dist);
  struct Cell {
    std::size_t i0, i1, j0, j1;
  };
  std::vector<Cell> stack;
  const std::size_t runs = br.size() - 1;
  if (runs <= 1) {
    // whole path is a geodesic: excess = (1 - lambda)(j - i)
    if (lambda >= 1.0) return std::nullopt;
  }
  auto block_lo = [&](std::size_t k) { return br[k]; };
  auto block_hi = [&](std::size_t k) { return k + 1 == runs ? n - 1 : br[k + 1] - 1; };
  if (runs <= 1) {
    stack.push_back({0, n - 2, 1, n - 1});
  } else {
    for (std::size_t a = 0; a < runs; ++a)
      for (std::size_t c = runs; c-- > a + 1;) stack.push_back({block_lo(a), block_hi(a), block_lo(c), block_hi(c)});
  }
  std::optional<ExcessPair> best;
  const double slope = 1.0 + lambda;
  while (!stack.empty()) {
    Cell cl = stack.back();
    stack.pop_back();
    if (cl.i0 > cl.i1 || cl.j0 > cl.j1) continue;
    if (cl.i1 >= cl.j1) cl.i1 = cl.j1 - 1;
    if (cl.j0 <= cl.i0) cl.j0 = cl.i0 + 1;
    if (cl.i0 > cl.i1 || cl.j0 > cl.j1) continue;
    std::size_t ic = cl.i0 + (cl.i1 - cl.i0) / 2;
    std::size_t jc = cl.j0 + (cl.j1 - cl.j0 + 1) / 2;
    if (jc <= ic) jc = ic + 1;
    if (jc > cl.j1) {
      jc = cl.j1;
      ic = std::min(ic, jc - 1);
    }
    const double e = static_cast<double>(jc - ic) - lambda * static_cast<double>(dist(ic, jc));
    if (e > floor) {
      const bool better = !best || e > best->excess ||
                          (e == best->excess && (jc - ic > best->j - best->i ||
                                                 (jc - ic == best->j - best->i && ic < best->i)));
      if (better) best = ExcessPair{ic, jc, e};
    }
    const std::size_t di = std::max(ic - cl.i0, cl.i1 - ic);
    const std::size_t dj = std::max(jc - cl.j0, cl.j1 - jc);
    if (di == 0 && dj == 0) continue;
    double ub = e + slope * static_cast<double>(di + dj);
    // Moving i left or j right changes the excess by at least 1 - lambda,
    // so the outer corner (i0, j1) also bounds the cell; exact at lambda = 1.
    if (cl.i0 != ic || cl.j1 != jc) {
      const double ec = static_cast<double>(cl.j1 - cl.i0) - lambda * static_cast<double>(dist(cl.i0, cl.j1));
      if (ec > floor) {
        const bool better = !best || ec > best->excess ||
                            (ec == best->excess && (cl.j1 - cl.i0 > best->j - best->i ||
                                                    (cl.j1 - cl.i0 == best->j - best->i && cl.i0 < best->i)));
        if (better) best = ExcessPair{cl.i0, cl.j1, ec};
      }
      const double widths = static_cast<double>((cl.i1 - cl.i0) + (cl.j1 - cl.j0));
      ub = std::min(ub, ec + std::max(lambda - 1.0, 0.0) * widths);
    }
    if (ub <= floor) continue;
    if (best && ub <= best->excess) continue;
    if (cl.i1 - cl.i0 >= cl.j1 - cl.j0) {
      const std::size_t mid = cl.i0 + (cl.i1 - cl.i0) / 2;
      stack.push_back({mid + 1, cl.i1, cl.j0, cl.j1});
      stack.push_back({cl.i0, mid, cl.j0, cl.j1});
    } else {
      const std::size_t mid = cl.j0 + (cl.j1 - cl.j0) / 2;
      stack.push_back({cl.i0, cl.i1, cl.j0, mid});
      stack.push_back({cl.i0, cl.i1, mid + 1, cl.j1});
    }
  }
  return best;
}

template <class Dist>
QuasigeodesicVerdict check_quasigeodesic(std::size_t n, Dist&& dist, double lambda, double c) {
  QuasigeodesicVerdict v;
  auto worst = max_excess(n, dist, lambda, c);
  if (worst) {
    v.ok = false;
    v.witness = std::make_pair(worst->i, worst->j);
    v.excess = worst->excess;
  }
  return v;
}

// Smallest c >= 0 with the path a (lambda, c)-quasigeodesic.
template <class Dist>
double fit_additive_constant(std::size_t n, Dist&& dist, double lambda) {
  auto worst = max_excess(n, dist, lambda, 0.0);
  return worst ? worst->excess : 0.0;
}

}  // namespace coarsegeo
