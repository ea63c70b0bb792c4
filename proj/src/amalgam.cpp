#include "coarsegeo/amalgam.hpp"

#include <algorithm>
#include <unordered_map>

#include "coarsegeo/errors.hpp"
#include "coarsegeo/relative.hpp"

namespace coarsegeo {

DoubleCosetRep min_double_coset_rep(const GroupModel& model, const Element& h, const SubgroupSpec& C, int depth) {
  model.check(h);
  auto search = [&](int dpt) {
    SubgroupSpec s = C;
    s.enumeration_depth = dpt;
    const auto cs = enumerate_subgroup(model, s).elements;
    Element best = h;
    for (const auto& c1 : cs) {
      const Element left = model.multiply(c1, h);
      for (const auto& c2 : cs) {
        Element x = model.multiply(left, c2);
        const auto lx = model.word_length(x), lb = model.word_length(best);
        if (lx < lb || (lx == lb && model.shortlex_less(x, best))) best = std::move(x);
      }
    }
    return best;
  };
  const auto cs = enumerate_subgroup(model, SubgroupSpec{C.generators, depth}).elements;
  if (std::find(cs.begin(), cs.end(), h) != cs.end())
    throw PreconditionError("element lies in C; its double coset is C itself");
  DoubleCosetRep r;
  r.rep = search(depth);
  const Element deeper = search(depth + 1);
  r.certified = model.word_length(deeper) == model.word_length(r.rep);
  return r;
}

namespace {

std::uint32_t subgroup_factor(const GroupModel& m, const SubgroupSpec& s, const char* name) {
  if (s.generators.empty()) throw PreconditionError(std::string(name) + " has no generators");
  std::optional<std::uint32_t> f;
  for (const auto& g : s.generators) {
    if (g.syllables().size() != 1)
      throw PreconditionError(std::string(name) + " must lie in a single factor; generator " + m.format(g) +
                              " does not");
    const auto gf = g.syllables().front().factor;
    if (f && *f != gf) throw PreconditionError(std::string(name) + " has generators in two factors");
    f = gf;
  }
  return *f;
}

}  // namespace

NormalPath build_normal_path_amalgam(const GroupModel& model, const AmalgamWord& w, std::uint32_t h_factor,
                                     std::uint32_t k_factor) {
  NormalPath np;
  np.decomp.lambda = 1.0;
  np.decomp.c = 0.0;
  Element x = model.identity();
  CayleySpace S(model);
  // k0 h1 k1 ... hn kn, with k0 / kn trivial when missing
  bool expect_k = true;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto& s = w[i];
    if (s.g.is_identity()) throw StructuralError("word has a trivial syllable at " + std::to_string(i));
    const auto f = s.side == Side::kH ? h_factor : k_factor;
    if (!model.in_factor(s.g, f)) throw StructuralError("syllable " + std::to_string(i) + " is not in its factor");
    if (i > 0 && w[i - 1].side == s.side) throw StructuralError("syllables " + std::to_string(i - 1) + " and " + std::to_string(i) + " are on the same side");
    if (s.side == Side::kH && expect_k) {
      np.decomp.add_p(S.trivial_path(x), FactorCoset::of(model, x, k_factor));
      expect_k = false;
    }
    const Element y = model.multiply(x, s.g);
    auto piece = CayleyPath::geodesic(model, x, y);
    if (s.side == Side::kK) {
      np.decomp.add_p(std::move(piece), FactorCoset::of(model, x, k_factor));
      expect_k = false;
    } else {
      np.decomp.add_q(std::move(piece));
      expect_k = true;
    }
    x = y;
  }
  if (w.empty() || expect_k) np.decomp.add_p(S.trivial_path(x), FactorCoset::of(model, x, k_factor));
  np.path = concatenate(S, np.decomp);
  np.value = x;
  return np;
}

std::size_t amalgam_cyclic_length(const GroupModel& model, AmalgamWord w) {
  while (w.size() >= 2 && w.front().side == w.back().side) {
    AmalgamSyllable merged{w.front().side, model.multiply(w.back().g, w.front().g)};
    w.erase(w.begin());
    w.pop_back();
    if (!merged.g.is_identity()) w.insert(w.begin(), std::move(merged));
  }
  return w.size();
}

std::string format_word(const GroupModel& model, const AmalgamWord& w) {
  if (w.empty()) return "1";
  std::string s;
  for (const auto& x : w) {
    if (!s.empty()) s += " | ";
    s += (x.side == Side::kH ? "H:" : "K:") + model.format(x.g);
  }
  return s;
}

nlohmann::ordered_json AmalgamReport::to_json() const {
  nlohmann::ordered_json j;
  j["words"] = words;
  j["distinct_elements"] = distinct;
  j["trivial"] = trivial;
  j["collisions"] = collisions;
  auto ct = nlohmann::ordered_json::array();
  for (const auto& [a, b] : collision_table) ct.push_back({a, b});
  j["collision_table"] = ct;
  j["quasigeodesic_failures"] = qg_failures;
  j["admissible_failures"] = admissible_failures;
  j["failure_witnesses"] = failure_witnesses;
  j["cyclically_long_words"] = cyclic_long;
  j["parabolic_misclassified"] = misclassified;
  j["misclassified_witnesses"] = misclassified_witnesses;
  j["max_fitted_c_at_lambda_1"] = max_fitted_c;
  j["max_fitted_Lambda"] = max_fitted_lambda;
  j["h_syllables"] = h_syllables;
  j["k_syllables"] = k_syllables;
  j["min_syllable_length"] = min_syllable_length;
  return j;
}

AmalgamReport check_amalgam_injectivity(const GroupModel& model, const SubgroupSpec& Hdot, const SubgroupSpec& Kdot,
                                        const SubgroupSpec& C, const AmalgamBounds& bounds, const RateSet& rates,
                                        const ConstantsBundle& constants) {
  const auto hf = subgroup_factor(model, Hdot, "Hdot");
  const auto kf = subgroup_factor(model, Kdot, "Kdot");
  const auto hs_all = enumerate_subgroup(model, SubgroupSpec{Hdot.generators, bounds.syllable_depth}).elements;
  const auto ks_all = enumerate_subgroup(model, SubgroupSpec{Kdot.generators, bounds.syllable_depth}).elements;
  const auto cs = enumerate_subgroup(model, C).elements;

  // Hdot & Kdot must equal C on the enumerations; the formal oracle needs C = 1.
  std::unordered_map<Element, int, ElementHash> in_h;
  for (const auto& h : hs_all) in_h[h] = 1;
  std::vector<std::string> common;
  for (const auto& k : ks_all)
    if (in_h.count(k) && !k.is_identity()) common.push_back(model.format(k));
  for (const auto& c : cs)
    if (!c.is_identity()) throw PreconditionError("the formal amalgam oracle supports a trivial C only");
  if (!common.empty()) {
    std::string msg = "Hdot and Kdot meet outside C (C = everything they share):";
    for (std::size_t i = 0; i < common.size() && i < 8; ++i) msg += " " + common[i];
    throw PreconditionError(msg);
  }
  std::vector<Element> hs, ks;
  std::vector<std::string> short_ones;
  AmalgamReport r;
  r.min_syllable_length = INT64_MAX;
  for (const auto* src : {&hs_all, &ks_all})
    for (const auto& g : *src) {
      if (g.is_identity()) continue;
      const auto len = model.word_length(g);
      r.min_syllable_length = std::min(r.min_syllable_length, len);
      if (len <= constants.D) short_ones.push_back(model.format(g));
      (src == &hs_all ? hs : ks).push_back(g);
    }
  if (hs.empty() || ks.empty()) throw PreconditionError("Hdot or Kdot has no element outside C");
  if (!short_ones.empty()) {
    std::string msg = "elements of (Hdot u Kdot) \\ C of length <= D = " + std::to_string(constants.D) + ":";
    for (std::size_t i = 0; i < short_ones.size() && i < 8; ++i) msg += " " + short_ones[i];
    throw PreconditionError(msg);
  }
  r.h_syllables = hs.size();
  r.k_syllables = ks.size();

  CayleySpace S(model);
  std::unordered_map<Element, std::string, ElementHash> seen;
  AmalgamWord w;
  std::size_t fitted = 0;
  auto visit = [&](auto&& self, Side next, const Element& prefix) -> void {
    if (!w.empty()) {
      ++r.words;
      const std::string name = format_word(model, w);
      if (prefix.is_identity()) {
        ++r.trivial;
        if (r.failure_witnesses.size() < 10) r.failure_witnesses.push_back("trivial: " + name);
      }
      auto [it, fresh] = seen.emplace(prefix, name);
      if (!fresh) {
        ++r.collisions;
        if (r.collision_table.size() < 50) r.collision_table.emplace_back(it->second, name);
      }
      const auto np = build_normal_path_amalgam(model, w, hf, kf);
      const auto adm = verify_admissible(S, np.decomp, constants.D, rates);
      if (!adm.ok) {
        ++r.admissible_failures;
        if (r.failure_witnesses.size() < 10)
          r.failure_witnesses.push_back("admissible " + name + ": " + adm.conditions[*adm.first_violation].witness);
      }
      const auto qg = S.is_quasigeodesic(np.path, static_cast<double>(constants.Lambda), 0.0);
      if (!qg.ok) {
        ++r.qg_failures;
        if (r.failure_witnesses.size() < 10) r.failure_witnesses.push_back("quasigeodesic " + name);
      }
      r.max_fitted_c = std::max(r.max_fitted_c, S.fit_c(np.path, 1.0));
      if (fitted < bounds.fit_samples && r.words % 7 == 1) {
        ++fitted;
        if (auto l = fit_lambda(S, np.path, constants.Lambda)) r.max_fitted_lambda = std::max(r.max_fitted_lambda, *l);
        else r.max_fitted_lambda = std::max(r.max_fitted_lambda, constants.Lambda + 1);
      }
      if (amalgam_cyclic_length(model, w) >= 2) {
        ++r.cyclic_long;
        const auto cls = classify_hyperbolic(model, prefix);
        if (cls.parabolic || cls.trivial) {
          ++r.misclassified;
          if (r.misclassified_witnesses.size() < 10) r.misclassified_witnesses.push_back(name);
        }
      }
    }
    if (static_cast<int>(w.size()) >= bounds.max_syllables) return;
    const auto& pool = next == Side::kH ? hs : ks;
    const Side other = next == Side::kH ? Side::kK : Side::kH;
    for (const auto& g : pool) {
      w.push_back({next, g});
      self(self, other, model.multiply(prefix, g));
      w.pop_back();
    }
  };
  visit(visit, Side::kH, model.identity());
  visit(visit, Side::kK, model.identity());
  r.distinct = seen.size();
  return r;
}

}  // namespace coarsegeo
