#include "coarsegeo/relative.hpp"

#include "coarsegeo/errors.hpp"

namespace coarsegeo {

namespace {

Element syllable_element(const GroupModel& m, const Syllable& s) {
  return m.factor_element(s.factor, std::span<const std::int32_t>(s.exps.data(), m.factor_rank(s.factor)));
}

}  // namespace

Conjugacy classify_hyperbolic(const GroupModel& model, const Element& w) {
  model.check(w);
  Conjugacy r;
  Element cur = w;
  Element conj = model.identity();
  // Conjugating by the inverse of the last syllable merges it into the first.
  while (cur.syllables().size() >= 2 && cur.syllables().front().factor == cur.syllables().back().factor) {
    const Element y = syllable_element(model, cur.syllables().back());
    cur = model.multiply(y, model.multiply(cur, model.inverse(y)));
    conj = model.multiply(conj, model.inverse(y));
  }
  r.cyclic_syllables = cur.syllables().size();
  if (cur.is_identity()) {
    r.trivial = true;
    return r;
  }
  if (cur.syllables().size() == 1 && model.is_peripheral(cur.syllables().front().factor)) {
    r.parabolic = true;
    r.factor = cur.syllables().front().factor;
    r.conjugator = conj;
    r.core = cur;
  }
  return r;
}

std::vector<Element> RelativePath::vertices(const GroupModel& model) const {
  std::vector<Element> out{start};
  Element x = start;
  for (const auto& e : edges) {
    x = model.multiply(x, syllable_element(model, e));
    out.push_back(x);
  }
  return out;
}

Element RelativePath::end(const GroupModel& model) const {
  Element x = start;
  for (const auto& e : edges) x = model.multiply(x, syllable_element(model, e));
  return x;
}

RelativePath relative_geodesic(const GroupModel& model, const Element& g, const Element& start) {
  model.check(g);
  return RelativePath{start, g.syllables()};
}

RelativePath relative_geodesic(const GroupModel& model, const Element& g) {
  return relative_geodesic(model, g, model.identity());
}

std::vector<RelComponent> components(const GroupModel& model, const RelativePath& rel) {
  std::vector<RelComponent> out;
  Element x = rel.start;
  for (std::size_t i = 0; i < rel.edges.size();) {
    const auto f = rel.edges[i].factor;
    RelComponent c;
    c.first_edge = i;
    c.factor = f;
    c.coset = FactorCoset::of(model, x, f);
    Element label = model.identity();
    while (i < rel.edges.size() && rel.edges[i].factor == f) {
      label = model.multiply(label, syllable_element(model, rel.edges[i]));
      ++i;
    }
    c.last_edge = i - 1;
    c.label = label.is_identity() ? Syllable{f, {}} : label.syllables().front();
    x = model.multiply(x, label);
    out.push_back(std::move(c));
  }
  for (std::size_t a = 0; a < out.size(); ++a)
    for (std::size_t b = a + 1; b < out.size(); ++b)
      if (out[a].coset == out[b].coset) out[a].isolated = out[b].isolated = false;
  return out;
}

CayleyPath lift_path(const GroupModel& model, const RelativePath& rel) {
  CayleyPath p(model, rel.start);
  for (const auto& c : components(model, rel)) {
    const Element label = syllable_element(model, c.label);
    p.append_geodesic(label);
  }
  return p;
}

}  // namespace coarsegeo
