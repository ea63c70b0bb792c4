#include "coarsegeo/hnn.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "coarsegeo/ball_cache.hpp"
#include "coarsegeo/coarse_geometry.hpp"
#include "coarsegeo/errors.hpp"
#include "coarsegeo/graph_space.hpp"

namespace coarsegeo {

HWord free_reduce(const HWord& w) {
  HWord out;
  for (int l : w) {
    if (l == 0) throw PreconditionError("letter 0 in a basis word");
    if (!out.empty() && out.back() == -l) out.pop_back();
    else out.push_back(l);
  }
  return out;
}

namespace {

constexpr std::uint32_t kA1 = 0, kA2 = 1, kB1 = 2, kB2 = 3;

std::uint64_t splitmix(std::uint64_t v) {
  v += 0x9e3779b97f4a7c15ULL;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  return v ^ (v >> 31);
}

std::uint64_t hash_ints(const std::vector<int>& w) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (int l : w) h = splitmix(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(l)));
  return splitmix(h ^ w.size());
}

bool all_letters(const HWord& w, int gen) {
  for (int l : w)
    if (l != gen && l != -gen) return false;
  return true;
}

// phi: Q -> Q', x^k -> z^k (and back).
HWord substitute(const HWord& w, int from, int to) {
  HWord out;
  for (int l : w) out.push_back(l == from ? to : l == -from ? -to : l);
  return out;
}

}  // namespace

Element HnnFixture::evaluate(const HWord& w) const {
  Element e = model.identity();
  for (int l : w) {
    const Element* g = nullptr;
    switch (l < 0 ? -l : l) {
      case 1: g = &x; break;
      case 2: g = &y; break;
      case 3: g = &z; break;
      default: throw PreconditionError("basis letter out of range: " + std::to_string(l));
    }
    e = model.multiply(e, l < 0 ? model.inverse(*g) : *g);
  }
  return e;
}

HnnFixture make_hnn_fixture(std::int64_t N) {
  if (N < 1) throw PreconditionError("the fixture needs N >= 1");
  HnnFixture fx;
  const auto& m = fx.model;
  fx.N = N;
  fx.x = m.letter({kA1, false});
  fx.y = m.letter({kB1, false});
  fx.f = m.letter({kB2, false});
  fx.z = m.multiply(m.multiply(fx.f, fx.x), m.inverse(fx.f));
  fx.c = m.power(m.letter({kA2, false}), N);
  fx.t = m.multiply(fx.f, fx.c);
  fx.H = SubgroupSpec{{fx.x, fx.y, fx.z}, 4};
  fx.Q = SubgroupSpec{{fx.x}, 8};
  fx.Qp = SubgroupSpec{{fx.z}, 8};
  return fx;
}

namespace {

bool in_Q(const HnnFixture& fx, const Element& g) {
  if (g.is_identity()) return true;
  const auto& s = g.syllables();
  return s.size() == 1 && s[0].factor == fx.P && s[0].exps[1] == 0;
}

bool in_Qp(const HnnFixture& fx, const Element& g) {
  const auto& m = fx.model;
  return in_Q(fx, m.multiply(m.multiply(m.inverse(fx.f), g), fx.f));
}

// Reduced basis words up to the given length, in BFS order.
template <class Visit>
void for_each_reduced(int depth, Visit&& visit) {
  HWord w;
  auto rec = [&](auto&& self) -> void {
    visit(w);
    if (static_cast<int>(w.size()) >= depth) return;
    for (int l : {1, -1, 2, -2, 3, -3}) {
      if (!w.empty() && w.back() == -l) continue;
      w.push_back(l);
      self(self);
      w.pop_back();
    }
  };
  rec(rec);
}

}  // namespace

std::vector<std::pair<Element, HWord>> h_ball(const HnnFixture& fx, int radius) {
  if (radius < 0) throw PreconditionError("radius must be non-negative");
  // In a reduced basis word the a1 and b1 exponents sit in syllables that
  // never cancel (between two z-runs there is a nonzero y-run, so only the
  // b2 letters of z cancel). Word length in G is therefore at least the
  // basis length, and basis depth = radius covers the ball.
  std::unordered_map<Element, HWord, ElementHash> best;
  const auto& m = fx.model;
  for_each_reduced(radius, [&](const HWord& w) {
    const Element e = fx.evaluate(w);
    if (m.word_length(e) > radius) return;
    auto it = best.find(e);
    if (it == best.end()) best.emplace(e, w);
    else if (w.size() < it->second.size()) it->second = w;
  });
  std::vector<std::pair<Element, HWord>> out(best.begin(), best.end());
  std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
    const auto la = m.word_length(a.first), lb = m.word_length(b.first);
    return la != lb ? la < lb : m.shortlex_less(a.first, b.first);
  });
  return out;
}

std::vector<FixtureCheck> validate_hnn_fixture(const HnnFixture& fx, std::int64_t D, int free_depth) {
  const auto& m = fx.model;
  std::vector<FixtureCheck> out;
  {
    FixtureCheck c{"H is free on x, y, z", true, ""};
    std::unordered_map<Element, HWord, ElementHash> seen;
    std::size_t n = 0;
    for_each_reduced(free_depth, [&](const HWord& w) {
      ++n;
      auto [it, fresh] = seen.emplace(fx.evaluate(w), w);
      if (!fresh && c.ok) {
        c.ok = false;
        c.detail = "two reduced words give the same element: lengths " + std::to_string(it->second.size()) + " and " +
                   std::to_string(w.size());
      }
    });
    if (c.ok) c.detail = std::to_string(n) + " reduced words of length <= " + std::to_string(free_depth) + " are distinct";
    out.push_back(c);
  }
  const auto hs = h_ball(fx, 6);
  {
    FixtureCheck c{"Q = P & H", true, ""};
    std::size_t inP = 0;
    for (const auto& [e, w] : hs) {
      if (!m.in_factor(e, fx.P)) continue;
      ++inP;
      if (!in_Q(fx, e)) {
        c.ok = false;
        c.detail = "element " + m.format(e) + " of H lies in P but not in Q";
        break;
      }
    }
    if (c.ok) c.detail = std::to_string(inP) + " elements of H in P within radius 6, all in <a1>";
    out.push_back(c);
  }
  {
    const bool ok = m.multiply(m.multiply(fx.f, fx.x), m.inverse(fx.f)) == fx.z;
    out.push_back({"Q' = f Q f^-1 <= H", ok, ok ? "f x f^-1 = z is a basis element" : "f x f^-1 != z"});
  }
  {
    const bool ok = m.multiply(m.multiply(fx.c, fx.x), m.inverse(fx.c)) == fx.x;
    out.push_back({"c Q c^-1 = Q", ok, ok ? "c commutes with a1" : "c does not normalise Q"});
  }
  {
    FixtureCheck c{"Q and Q' are not conjugate in H", true, ""};
    for (const auto& [e, w] : h_ball(fx, 4)) {
      const Element g = m.multiply(m.multiply(e, fx.x), m.inverse(e));
      if (in_Qp(fx, g)) {
        c.ok = false;
        c.detail = "h x h^-1 lies in Q' for h = " + m.format(e);
        break;
      }
    }
    if (c.ok) c.detail = "h x h^-1 avoids Q' for all h in H of length <= 4";
    out.push_back(c);
  }
  {
    FixtureCheck c{"cQ is longer than D", true, ""};
    for (int k = -8; k <= 8; ++k) {
      const auto len = m.word_length(m.multiply(fx.c, m.power(fx.x, k)));
      if (len <= D) {
        c.ok = false;
        c.detail = "|c a1^" + std::to_string(k) + "| = " + std::to_string(len) + " <= D = " + std::to_string(D);
        break;
      }
    }
    if (c.ok) c.detail = "|c a1^k| > D = " + std::to_string(D) + " for |k| <= 8";
    out.push_back(c);
  }
  return out;
}

std::string format_hnn_word(const HnnWord& w) {
  static const char* names = "?xyz";
  auto fmt = [](const HWord& h) {
    std::string s;
    for (int l : h) {
      const char ch = names[l < 0 ? -l : l];
      s += l < 0 ? static_cast<char>(ch - 'a' + 'A') : ch;
    }
    return s.empty() ? std::string("1") : s;
  };
  std::string s;
  for (std::size_t i = 0; i < w.h.size(); ++i) {
    if (!s.empty()) s += ' ';
    s += fmt(w.h[i]);
    s += w.eps[i] > 0 ? " t" : " T";
  }
  return s.empty() ? "1" : s;
}

std::optional<std::size_t> britton_pinch(const HnnFixture& fx, const HnnWord& w) {
  if (w.h.size() != w.eps.size()) throw StructuralError("word has mismatched h and t parts");
  for (std::size_t i = 0; i + 1 < w.eps.size(); ++i) {
    const Element h = fx.evaluate(w.h[i + 1]);
    if (w.eps[i] > 0 && w.eps[i + 1] < 0 && in_Q(fx, h)) return i;
    if (w.eps[i] < 0 && w.eps[i + 1] > 0 && in_Qp(fx, h)) return i;
  }
  return std::nullopt;
}

Element evaluate_hnn(const HnnFixture& fx, const HnnWord& w) {
  const auto& m = fx.model;
  const Element tinv = m.inverse(fx.t);
  Element e = m.identity();
  for (std::size_t i = 0; i < w.h.size(); ++i) {
    e = m.multiply(e, fx.evaluate(w.h[i]));
    e = m.multiply(e, w.eps[i] > 0 ? fx.t : tinv);
  }
  return e;
}

std::vector<int> abstract_key(const HnnWord& w) {
  std::vector<int> out;
  for (std::size_t i = 0; i < w.h.size(); ++i) {
    for (int l : w.h[i]) {
      if (l == 3 || l == -3) {
        out.push_back(4);
        out.push_back(l > 0 ? 1 : -1);
        out.push_back(-4);
      } else {
        out.push_back(l);
      }
    }
    out.push_back(w.eps[i] > 0 ? 4 : -4);
  }
  return free_reduce(out);
}

std::size_t cyclic_t_length(const HnnWord& w) {
  // Cyclic sequence of (t^e_i, a_i) with a_i the H-part following t^e_i.
  const std::size_t n0 = w.eps.size();
  std::vector<std::pair<int, HWord>> seq;
  for (std::size_t i = 0; i < n0; ++i) seq.emplace_back(w.eps[i], free_reduce(w.h[(i + 1) % n0]));
  bool changed = true;
  while (changed && seq.size() >= 2) {
    changed = false;
    const std::size_t n = seq.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      const auto& [e, a] = seq[i];
      HWord image;
      if (e > 0 && seq[j].first < 0 && all_letters(a, 1)) image = substitute(a, 1, 3);
      else if (e < 0 && seq[j].first > 0 && all_letters(a, 3)) image = substitute(a, 3, 1);
      else continue;
      if (n == 2) return 0;
      // rotate so the pinch sits at positions 1, 2
      std::rotate(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>((i + n - 1) % n), seq.end());
      HWord merged = seq[0].second;
      merged.insert(merged.end(), image.begin(), image.end());
      merged.insert(merged.end(), seq[2].second.begin(), seq[2].second.end());
      seq[0].second = free_reduce(merged);
      seq.erase(seq.begin() + 1, seq.begin() + 3);
      changed = true;
      break;
    }
  }
  return seq.size();
}

// --------------------------------------------------------------- truncation

TruncationPath build_truncation_hnn(const HnnFixture& fx, const HnnWord& w) {
  if (auto pinch = britton_pinch(fx, w)) {
    ReductionError err("word is not Britton-reduced: pinch at t-letter " + std::to_string(*pinch));
    err.index = *pinch;
    throw err;
  }
  const auto& m = fx.model;
  TruncationPath tp;
  tp.relative.start = m.identity();
  const Syllable beta = fx.f.syllables().front();
  const Syllable pc = fx.c.syllables().front();
  auto inv = [](Syllable s) {
    for (auto& e : s.exps) e = -e;
    return s;
  };
  auto& edges = tp.relative.edges;
  for (std::size_t i = 0; i < w.h.size(); ++i) {
    const Element hi_val = fx.evaluate(w.h[i]);
    for (const auto& s : hi_val.syllables()) edges.push_back(s);
    if (w.eps[i] > 0) {
      edges.push_back(beta);
      tp.p_edges.push_back(edges.size());
      edges.push_back(pc);
    } else {
      tp.p_edges.push_back(edges.size());
      edges.push_back(inv(pc));
      edges.push_back(inv(beta));
    }
  }
  const auto V = tp.relative.vertices(m);
  const std::size_t E = edges.size();
  const std::size_t n = tp.p_edges.size();
  // Block k spans relative vertices [lo(k), hi(k)]; block k < n ends where
  // p_k starts, block n is the tail after the last p.
  auto lo = [&](std::size_t k) { return k == 0 ? std::size_t{0} : tp.p_edges[k - 1] + 1; };
  auto hi = [&](std::size_t k) { return k < n ? tp.p_edges[k] : E; };
  for (std::size_t i = 0; i < n; ++i) {
    const auto X = FactorCoset::of(m, V[tp.p_edges[i]], fx.P);
    std::size_t zi = hi(i);
    for (std::size_t v = lo(i); v <= hi(i); ++v)
      if (coset_contains(m, X, V[v])) {
        zi = v;
        break;
      }
    std::size_t wi = lo(i + 1);
    for (std::size_t v = hi(i + 1) + 1; v-- > lo(i + 1);)
      if (coset_contains(m, X, V[v])) {
        wi = v;
        break;
      }
    tp.targets.push_back(X);
    tp.z.push_back(zi);
    tp.w.push_back(wi);
  }
  CayleySpace S(m);
  tp.decomp.lambda = 1.0;
  tp.decomp.c = 3.0 * static_cast<double>(m.word_length(fx.f));
  auto lift_segment = [&](std::size_t a, std::size_t b) {
    if (a > b)
      throw StructuralError("truncation points out of order: vertex " + std::to_string(a) + " after " +
                            std::to_string(b));
    RelativePath seg{V[a], std::vector<Syllable>(edges.begin() + static_cast<std::ptrdiff_t>(a),
                                                  edges.begin() + static_cast<std::ptrdiff_t>(b))};
    return lift_path(m, seg);
  };
  std::size_t prev = 0;
  for (std::size_t i = 0; i < n; ++i) {
    tp.decomp.add_q(lift_segment(prev, tp.z[i]));
    auto p = CayleyPath::geodesic(m, V[tp.z[i]], V[tp.w[i]]);
    tp.p_lengths.push_back(p.length());
    tp.decomp.add_p(std::move(p), tp.targets[i]);
    prev = tp.w[i];
  }
  tp.decomp.add_q(lift_segment(prev, E));
  for (std::size_t i = 1; i < n; ++i)
    if (tp.targets[i] == tp.targets[i - 1]) tp.targets_distinct = false;
  tp.path = concatenate(S, tp.decomp);
  tp.value = V.back();
  return tp;
}

// ---------------------------------------------------------------- constants

nlohmann::ordered_json HnnThreshold::to_json() const {
  auto measured = [](const Measured& x) {
    return nlohmann::ordered_json{{"value", x.value}, {"trusted", x.trusted}, {"unbounded", x.unbounded}};
  };
  nlohmann::ordered_json j;
  j["M"] = M;
  j["kappa1"] = measured(kappa1);
  j["kappa2"] = measured(kappa2);
  j["lambda"] = lambda;
  j["c_prime"] = c_prime;
  j["D"] = constants.D;
  j["Lambda"] = constants.Lambda;
  j["N"] = N;
  j["D_prime"] = D_prime;
  j["trusted"] = trusted;
  return j;
}

std::int64_t hnn_d_prime(const HnnThreshold& th, std::int64_t N) {
  const std::int64_t num = N - th.kappa1.value - th.kappa2.value - th.c_prime - 1;
  if (num < 0) return -1;
  return num / th.lambda;
}

HnnThreshold hnn_threshold(const RateSet& rates, const HnnMeasureOptions& opt) {
  const HnnFixture fx = make_hnn_fixture(1);
  const auto& m = fx.model;
  const auto ball = load_or_build_ball(m, opt.ball_radius);
  const MetricGraph& g = ball.graph;
  // Basis length never exceeds word length in G (see h_ball), so basis
  // depth = radius enumerates each subgroup exactly inside the ball.
  auto deep = [&](SubgroupSpec s) {
    s.enumeration_depth = opt.ball_radius;
    return s;
  };
  bool stab = true;
  const auto H = g.subgroup_subset(deep(fx.H), &stab);
  const auto samples = geodesics_between(g, H, opt.max_pairs, opt.seed);
  const std::int64_t L = opt.L > 0 ? opt.L : rates.nu.at(std::int64_t{opt.U}) + 1;
  const auto rq = check_rel_quasiconvex(g, H, samples, opt.U, L, INT64_MAX);

  HnnThreshold th;
  th.M = rq.max_distance;
  const int M = static_cast<int>(th.M);
  const auto fP = GraphTarget::exact_coset(g, FactorCoset::of(m, fx.f, fx.P));
  const auto P = GraphTarget::exact_coset(g, FactorCoset::of(m, m.identity(), fx.P));
  th.kappa1 = kappa_estimate(g, H, fP, M, g.subgroup_subset(deep(fx.Qp)));
  th.kappa2 = kappa_estimate(g, H, P, M, g.subgroup_subset(deep(fx.Q)));
  th.lambda = 1;
  th.c_prime = (th.lambda + 2) * m.word_length(fx.f);
  th.constants = compute_constants(rates, th.lambda, th.c_prime);
  th.N = th.lambda * (th.constants.D + 1) + th.c_prime + th.kappa1.value + th.kappa2.value + 1;
  th.D_prime = hnn_d_prime(th, th.N);
  th.trusted = stab && th.kappa1.trusted && th.kappa2.trusted && !th.kappa1.unbounded && !th.kappa2.unbounded;
  return th;
}

// -------------------------------------------------------------- injectivity

nlohmann::ordered_json HnnReport::to_json() const {
  nlohmann::ordered_json j;
  j["h_elements"] = h_elements;
  j["words"] = words;
  j["pinched_skipped"] = pinched_skipped;
  j["abstract_classes"] = abstract_classes;
  j["g_classes"] = g_classes;
  j["collisions"] = collisions;
  j["splits"] = splits;
  j["trivial"] = trivial;
  j["checked_paths"] = checked_paths;
  j["admissible_failures"] = admissible_failures;
  j["quasigeodesic_failures"] = qg_failures;
  j["target_repeats"] = target_repeats;
  j["short_p"] = short_p;
  j["min_p_length"] = min_p_length;
  j["parabolic"] = parabolic;
  j["parabolic_not_conjugate_into_H"] = parabolic_not_conjugate_into_H;
  j["witnesses"] = witnesses;
  j["ok"] = ok();
  return j;
}

HnnReport check_hnn_injectivity(const HnnFixture& fx, const HnnBounds& bounds, const RateSet& rates,
                                const HnnThreshold& th) {
  if (bounds.max_t < 0 || bounds.max_t > 4) throw PreconditionError("max_t must lie in 0..4");
  const auto& m = fx.model;
  const auto hs = h_ball(fx, bounds.h_length);
  const std::size_t nh = hs.size();
  std::vector<bool> hQ(nh), hQp(nh);
  for (std::size_t k = 0; k < nh; ++k) {
    hQ[k] = in_Q(fx, hs[k].first);
    hQp[k] = in_Qp(fx, hs[k].first);
  }
  const Element tinv = m.inverse(fx.t);
  const std::int64_t D_prime = hnn_d_prime(th, fx.N);
  const std::int64_t p_floor = fx.N - th.kappa1.value - th.kappa2.value;
  CayleySpace S(m);

  HnnReport r;
  r.h_elements = nh;
  auto witness = [&](std::string s) {
    if (r.witnesses.size() < 20) r.witnesses.push_back(std::move(s));
  };
  struct Rec {
    std::uint64_t g, a;
    std::uint32_t code;  // digits base 2 nh, plus the t count
    std::uint8_t n;
  };
  std::vector<Rec> recs;
  std::vector<std::size_t> idx;
  std::vector<int> eps;
  HnnWord w;

  auto decode = [&](const Rec& rec) {
    HnnWord out;
    std::uint32_t code = rec.code;
    std::vector<std::pair<std::size_t, int>> parts;
    for (int i = 0; i < rec.n; ++i) {
      parts.emplace_back(code % (2 * nh) / 2, code % 2 ? 1 : -1);
      code /= static_cast<std::uint32_t>(2 * nh);
    }
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
      out.h.push_back(hs[it->first].second);
      out.eps.push_back(it->second);
    }
    return out;
  };

  auto finish_word = [&](const Element& value) {
    ++r.words;
    const auto key = abstract_key(w);
    std::uint32_t code = 0;
    for (std::size_t i = 0; i < idx.size(); ++i)
      code = code * static_cast<std::uint32_t>(2 * nh) + static_cast<std::uint32_t>(2 * idx[i] + (eps[i] > 0));
    recs.push_back({static_cast<std::uint64_t>(ElementHash{}(value)), hash_ints(key), code,
                    static_cast<std::uint8_t>(idx.size())});
    if (!key.empty() && value.is_identity()) {
      ++r.trivial;
      witness("trivial in G: " + format_hnn_word(w));
    }
    const auto cls = classify_hyperbolic(m, value);
    if (cls.parabolic) {
      ++r.parabolic;
      if (cyclic_t_length(w) != 0) {
        ++r.parabolic_not_conjugate_into_H;
        witness("parabolic but not conjugate into H: " + format_hnn_word(w));
      }
    }
    if (bounds.check_stride > 1 && (r.words - 1) % bounds.check_stride != 0) return;
    ++r.checked_paths;
    const auto tp = build_truncation_hnn(fx, w);
    if (!(tp.value == value)) throw StructuralError("truncation path ends off the element: " + format_hnn_word(w));
    if (!tp.targets_distinct) {
      ++r.target_repeats;
      witness("repeated target coset: " + format_hnn_word(w));
    }
    for (std::size_t i = 0; i < tp.p_lengths.size(); ++i) {
      const auto len = tp.p_lengths[i];
      r.min_p_length = r.min_p_length < 0 ? len : std::min(r.min_p_length, len);
      if (len < p_floor) {
        ++r.short_p;
        witness("p'" + std::to_string(i + 1) + " has length " + std::to_string(len) + " < " +
                std::to_string(p_floor) + ": " + format_hnn_word(w));
      }
    }
    const auto adm = verify_admissible(S, tp.decomp, D_prime, rates);
    if (!adm.ok) {
      ++r.admissible_failures;
      witness("not admissible (" + adm.conditions[*adm.first_violation].witness + "): " + format_hnn_word(w));
    }
    if (!S.is_quasigeodesic(tp.path, static_cast<double>(th.constants.Lambda), 0.0).ok) {
      ++r.qg_failures;
      witness("not a (Lambda, 0)-quasigeodesic: " + format_hnn_word(w));
    }
  };

  auto rec = [&](auto&& self, const Element& prefix) -> void {
    finish_word(prefix);
    if (static_cast<int>(idx.size()) >= bounds.max_t) return;
    for (std::size_t k = 0; k < nh; ++k) {
      const Element ph = m.multiply(prefix, hs[k].first);
      for (int e : {1, -1}) {
        if (!eps.empty()) {
          const int last = eps.back();
          if ((last > 0 && e < 0 && hQ[k]) || (last < 0 && e > 0 && hQp[k])) {
            ++r.pinched_skipped;
            continue;
          }
        }
        idx.push_back(k);
        eps.push_back(e);
        w.h.push_back(hs[k].second);
        w.eps.push_back(e);
        self(self, m.multiply(ph, e > 0 ? fx.t : tinv));
        idx.pop_back();
        eps.pop_back();
        w.h.pop_back();
        w.eps.pop_back();
      }
    }
  };
  rec(rec, m.identity());

  // abstract-equal <=> equal in G, compared through 64-bit hashes and
  // confirmed exactly on every disagreement
  auto count_classes = [&](auto key_of) {
    std::vector<std::uint64_t> keys;
    keys.reserve(recs.size());
    for (const auto& x : recs) keys.push_back(key_of(x));
    std::sort(keys.begin(), keys.end());
    return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
  };
  r.abstract_classes = count_classes([](const Rec& x) { return x.a; });
  r.g_classes = count_classes([](const Rec& x) { return x.g; });
  auto disagreements = [&](bool by_g) {
    std::sort(recs.begin(), recs.end(), [&](const Rec& a, const Rec& b) {
      return by_g ? std::tie(a.g, a.a, a.code) < std::tie(b.g, b.a, b.code)
                  : std::tie(a.a, a.g, a.code) < std::tie(b.a, b.g, b.code);
    });
    std::size_t count = 0;
    for (std::size_t i = 1; i < recs.size(); ++i) {
      const auto& a = recs[i - 1];
      const auto& b = recs[i];
      const bool same_group = by_g ? a.g == b.g : a.a == b.a;
      const bool other_differs = by_g ? a.a != b.a : a.g != b.g;
      if (!same_group || !other_differs) continue;
      const auto wa = decode(a), wb = decode(b);
      const bool g_equal = evaluate_hnn(fx, wa) == evaluate_hnn(fx, wb);
      const bool a_equal = abstract_key(wa) == abstract_key(wb);
      if (by_g && g_equal && !a_equal) {
        ++count;
        witness("distinct in the extension, equal in G: " + format_hnn_word(wa) + " vs " + format_hnn_word(wb));
      } else if (!by_g && a_equal && !g_equal) {
        ++count;
        witness("equal in the extension, distinct in G: " + format_hnn_word(wa) + " vs " + format_hnn_word(wb));
      }
    }
    return count;
  };
  r.collisions = disagreements(true);
  r.splits = disagreements(false);
  return r;
}

}  // namespace coarsegeo
