#include "coarsegeo/cayley_space.hpp"

#include <algorithm>

#include "coarsegeo/errors.hpp"

namespace coarsegeo {

CayleyPath::CayleyPath(const GroupModel& model, Element start)
    : model_(&model), start_(std::move(start)), end_(start_) {
  model.check(start_);
}

CayleyPath CayleyPath::geodesic(const GroupModel& model, const Element& from, const Element& to) {
  CayleyPath p(model, from);
  p.append_geodesic(model.between(from, to));
  return p;
}

CayleyPath CayleyPath::from_word(const GroupModel& model, Element start, std::span<const Letter> word) {
  CayleyPath p(model, std::move(start));
  p.append_word(word);
  return p;
}

Element CayleyPath::operator[](std::size_t i) const {
  if (static_cast<std::int64_t>(i) > length_) throw PreconditionError("path index out of range");
  if (runs_.empty() || i == 0) return start_;
  if (static_cast<std::int64_t>(i) == length_) return end_;
  const auto it = std::upper_bound(offset_.begin(), offset_.end(), static_cast<std::int64_t>(i));
  const auto k = static_cast<std::size_t>(it - offset_.begin()) - 1;
  Element e = run_start_[k];
  model_->append_letter(e, runs_[k].letter, static_cast<std::int64_t>(i) - offset_[k]);
  return e;
}

void CayleyPath::append(Letter l, std::int64_t count) {
  if (count < 0) throw PreconditionError("negative run length");
  if (count == 0) return;
  if (!model_) throw PreconditionError("path has no model");
  if (!runs_.empty() && runs_.back().letter == l) {
    runs_.back().count += count;
  } else {
    runs_.push_back({l, count});
    run_start_.push_back(end_);
    offset_.push_back(length_);
  }
  length_ += count;
  model_->append_letter(end_, l, count);
}

void CayleyPath::append_word(std::span<const Letter> word) {
  for (const auto& l : word) append(l);
}

void CayleyPath::append_geodesic(const Element& g) {
  for (const auto& s : g.syllables()) {
    const int r = model_->factor_rank(s.factor);
    for (int k = 0; k < r; ++k) {
      const auto e = s.exps[k];
      if (e == 0) continue;
      append(Letter{model_->first_gen(s.factor) + static_cast<std::uint32_t>(k), e < 0}, e < 0 ? -e : e);
    }
  }
}

void CayleyPath::append(const CayleyPath& other) {
  if (!(other.start_ == end_)) throw StructuralError("paths do not chain");
  for (const auto& r : other.runs_) append(r.letter, r.count);
}

CayleyPath CayleyPath::subpath(std::size_t i, std::size_t j) const {
  if (i > j || static_cast<std::int64_t>(j) > length_) throw PreconditionError("bad subpath range");
  CayleyPath p(*model_, (*this)[i]);
  auto pos = static_cast<std::int64_t>(i);
  const auto stop = static_cast<std::int64_t>(j);
  for (std::size_t k = 0; k < runs_.size() && pos < stop; ++k) {
    const auto lo = offset_[k];
    const auto hi = lo + runs_[k].count;
    if (hi <= pos) continue;
    const auto take = std::min(hi, stop) - pos;
    p.append(runs_[k].letter, take);
    pos += take;
  }
  return p;
}

CayleyPath CayleyPath::reversed() const {
  CayleyPath p(*model_, end_);
  for (auto it = runs_.rbegin(); it != runs_.rend(); ++it)
    p.append(Letter{it->letter.gen, !it->letter.inverse}, it->count);
  return p;
}

std::int64_t CayleySpace::diam(std::span<const Element> pts) const {
  std::int64_t best = 0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) best = std::max(best, model_->distance(pts[a], pts[b]));
  return best;
}

CayleyPath CayleySpace::concat(std::span<const CayleyPath* const> pieces) const {
  if (pieces.empty()) throw EmptyInputError("nothing to concatenate");
  CayleyPath out(*model_, pieces.front()->front());
  for (const auto* p : pieces) out.append(*p);
  return out;
}

QuasigeodesicVerdict CayleySpace::is_quasigeodesic(const CayleyPath& p, double lambda, double c) const {
  auto d = [&](std::size_t i, std::size_t j) { return model_->distance(p[i], p[j]); };
  return check_quasigeodesic(p.size(), d, lambda, c);
}

double CayleySpace::fit_c(const CayleyPath& p, double lambda) const {
  auto d = [&](std::size_t i, std::size_t j) { return model_->distance(p[i], p[j]); };
  return fit_additive_constant(p.size(), d, lambda);
}

}  // namespace coarsegeo
