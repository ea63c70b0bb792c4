#include "coarsegeo/group_model.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "coarsegeo/errors.hpp"

namespace coarsegeo {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  // splitmix64 step folded into an FNV-style accumulator
  v += 0x9e3779b97f4a7c15ULL;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  v ^= v >> 31;
  return (h ^ v) * 0x100000001b3ULL;
}

bool all_zero(const Syllable& s, int rank) {
  for (int k = 0; k < rank; ++k)
    if (s.exps[k] != 0) return false;
  return true;
}

}  // namespace

std::size_t ElementHash::operator()(const Element& e) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& s : e.syllables()) {
    h = mix(h, s.factor);
    for (auto x : s.exps) h = mix(h, static_cast<std::uint32_t>(x));
  }
  return static_cast<std::size_t>(h);
}

GroupModel::GroupModel(ModelKind kind, std::vector<Factor> factors)
    : kind_(kind), factors_(std::move(factors)) {
  if (factors_.empty()) throw ConfigError("group model needs at least one factor");
  if (factors_.size() > 26) throw ConfigError("at most 26 factors are supported");
  std::uint64_t h = mix(0xcbf29ce484222325ULL, static_cast<std::uint64_t>(kind_));
  for (std::uint32_t f = 0; f < factors_.size(); ++f) {
    auto& fac = factors_[f];
    if (fac.rank < 1 || fac.rank > kMaxFactorRank)
      throw ConfigError("factor rank must lie in [1, " + std::to_string(kMaxFactorRank) + "]");
    fac.letter = static_cast<char>('a' + f);
    factor_first_.push_back(static_cast<std::uint32_t>(gen_factor_.size()));
    for (int k = 0; k < fac.rank; ++k) {
      gen_factor_.push_back(f);
      gen_coord_.push_back(static_cast<std::uint32_t>(k));
    }
    h = mix(h, static_cast<std::uint64_t>(fac.rank));
    h = mix(h, fac.peripheral ? 1 : 0);
  }
  hash_ = h;
}

GroupModel GroupModel::free_group(int rank) {
  if (rank < 1) throw ConfigError("free group rank must be positive");
  return GroupModel(ModelKind::kFree, std::vector<Factor>(static_cast<std::size_t>(rank), Factor{1, false, 'a'}));
}

GroupModel GroupModel::free_abelian(int rank) {
  return GroupModel(ModelKind::kFreeAbelian, {Factor{rank, true, 'a'}});
}

GroupModel GroupModel::free_product(const std::vector<int>& ranks,
                                    std::optional<std::vector<int>> peripheral) {
  std::vector<Factor> fs;
  for (int r : ranks) fs.push_back(Factor{r, !peripheral.has_value(), 'a'});
  if (peripheral) {
    for (int p : *peripheral) {
      if (p < 0 || static_cast<std::size_t>(p) >= fs.size())
        throw ConfigError("peripheral factor index out of range: " + std::to_string(p));
      fs[static_cast<std::size_t>(p)].peripheral = true;
    }
  }
  return GroupModel(ModelKind::kFreeProduct, std::move(fs));
}

GroupModel GroupModel::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("group model must be an object with a 'kind'");
  try {
    return parse_model(j);
  } catch (const nlohmann::json::exception& e) {
    // factors are free abelian ranks; torsion factors such as "Z/3" land here
    throw ConfigError(std::string("group model: ") + e.what() + " (factors must be integer ranks)");
  }
}

GroupModel GroupModel::parse_model(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  std::optional<std::vector<int>> periph;
  if (j.contains("peripheral")) periph = j.at("peripheral").get<std::vector<int>>();
  if (kind == "free") {
    auto m = free_group(j.at("rank").get<int>());
    if (periph && !periph->empty()) {
      std::vector<Factor> fs = m.factors_;
      for (int p : *periph) fs.at(static_cast<std::size_t>(p)).peripheral = true;
      return GroupModel(ModelKind::kFree, fs);
    }
    return m;
  }
  if (kind == "free_abelian") {
    auto m = free_abelian(j.at("rank").get<int>());
    if (periph && periph->empty()) return GroupModel(ModelKind::kFreeAbelian, {Factor{m.factors_[0].rank, false, 'a'}});
    return m;
  }
  if (kind == "free_product") return free_product(j.at("factors").get<std::vector<int>>(), periph);
  throw ConfigError("unknown group model kind '" + kind + "'");
}

GroupModel GroupModel::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("model file " + path + ": " + e.what());
  }
  return from_json(j.contains("model") ? j.at("model") : j);
}

nlohmann::json GroupModel::to_json() const {
  nlohmann::json j;
  std::vector<int> periph;
  for (auto p : peripheral_factors()) periph.push_back(static_cast<int>(p));
  switch (kind_) {
    case ModelKind::kFree:
      j["kind"] = "free";
      j["rank"] = factors_.size();
      break;
    case ModelKind::kFreeAbelian:
      j["kind"] = "free_abelian";
      j["rank"] = factors_[0].rank;
      break;
    case ModelKind::kFreeProduct: {
      j["kind"] = "free_product";
      std::vector<int> ranks;
      for (const auto& f : factors_) ranks.push_back(f.rank);
      j["factors"] = ranks;
      break;
    }
  }
  j["peripheral"] = periph;
  return j;
}

std::vector<std::uint32_t> GroupModel::peripheral_factors() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t f = 0; f < factors_.size(); ++f)
    if (factors_[f].peripheral) out.push_back(f);
  return out;
}

std::string GroupModel::generator_name(std::uint32_t gen) const {
  const auto f = factor_of(gen);
  std::string s(1, factors_[f].letter);
  if (factors_[f].rank > 1) s += std::to_string(coord_of(gen) + 1);
  return s;
}

std::string GroupModel::factor_name(std::uint32_t factor) const {
  return std::string(1, static_cast<char>(std::toupper(factors_.at(factor).letter)));
}

std::string GroupModel::name() const {
  switch (kind_) {
    case ModelKind::kFree:
      return "F" + std::to_string(factors_.size());
    case ModelKind::kFreeAbelian:
      return "Z" + std::to_string(factors_[0].rank);
    case ModelKind::kFreeProduct: {
      std::string s;
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i) s += "*";
        s += "Z" + (factors_[i].rank > 1 ? std::to_string(factors_[i].rank) : std::string());
      }
      return s;
    }
  }
  return "?";
}

Element GroupModel::identity() const {
  Element e;
  e.tag_ = tag();
  return e;
}

void GroupModel::check(const Element& g) const {
  if (g.tag_ != tag()) throw ModelMismatchError("element belongs to a different group model than " + name());
}

void GroupModel::check_pair(const Element& x, const Element& y) const {
  if (x.tag_ != tag() || y.tag_ != tag())
    throw ModelMismatchError("operands belong to different group models (expected " + name() + ")");
}

void GroupModel::push_syllable(std::vector<Syllable>& out, const Syllable& s, int rank) {
  if (!out.empty() && out.back().factor == s.factor) {
    auto& b = out.back();
    for (int k = 0; k < rank; ++k) b.exps[k] += s.exps[k];
    if (all_zero(b, rank)) out.pop_back();
  } else if (!all_zero(s, rank)) {
    out.push_back(s);
  }
}

Element GroupModel::letter(Letter l) const {
  if (l.gen >= num_generators()) throw AlphabetError("generator index out of range");
  Element e = identity();
  Syllable s;
  s.factor = factor_of(l.gen);
  s.exps[coord_of(l.gen)] = l.inverse ? -1 : 1;
  e.syl_.push_back(s);
  return e;
}

Element GroupModel::factor_element(std::uint32_t factor, std::span<const std::int32_t> exps) const {
  if (factor >= num_factors()) throw AlphabetError("factor index out of range");
  if (static_cast<int>(exps.size()) != factors_[factor].rank)
    throw AlphabetError("exponent vector does not match factor rank");
  Element e = identity();
  Syllable s;
  s.factor = factor;
  std::copy(exps.begin(), exps.end(), s.exps.begin());
  push_syllable(e.syl_, s, factors_[factor].rank);
  return e;
}

void GroupModel::append_letter(Element& x, Letter l, std::int64_t count) const {
  check(x);
  if (count == 0) return;
  Syllable s;
  s.factor = factor_of(l.gen);
  s.exps[coord_of(l.gen)] = static_cast<std::int32_t>(l.inverse ? -count : count);
  push_syllable(x.syl_, s, factors_[s.factor].rank);
}

Element GroupModel::normalize(std::span<const Letter> letters) const {
  Element e = identity();
  for (const auto& l : letters) {
    if (l.gen >= num_generators()) throw AlphabetError("generator index out of range");
    append_letter(e, l);
  }
  return e;
}

namespace {
struct Token {
  Letter letter;
  long long count;
};
}  // namespace

static std::vector<Token> tokenize(const GroupModel& m, std::string_view w) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto fail = [&](const std::string& why) {
    throw AlphabetError("cannot parse word '" + std::string(w) + "' at offset " + std::to_string(i) + ": " + why);
  };
  while (i < w.size()) {
    const char ch = w[i];
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == '*' || ch == '.') {
      ++i;
      continue;
    }
    if (ch == '1' && (i + 1 == w.size() || !std::isdigit(static_cast<unsigned char>(w[i + 1])))) {
      ++i;
      continue;
    }
    if (!std::isalpha(static_cast<unsigned char>(ch))) fail(std::string("unknown symbol '") + ch + "'");
    const bool inv = std::isupper(static_cast<unsigned char>(ch)) != 0;
    const auto f = static_cast<std::uint32_t>(std::tolower(static_cast<unsigned char>(ch)) - 'a');
    if (f >= m.num_factors()) fail(std::string("unknown generator '") + ch + "'");
    ++i;
    std::uint32_t coord = 0;
    const int rank = m.factor_rank(f);
    if (rank > 1) {
      std::size_t j = i;
      while (j < w.size() && std::isdigit(static_cast<unsigned char>(w[j]))) ++j;
      if (j == i) fail("generator of a rank " + std::to_string(rank) + " factor needs an index");
      const int idx = std::atoi(std::string(w.substr(i, j - i)).c_str());
      if (idx < 1 || idx > rank) fail("generator index out of range");
      coord = static_cast<std::uint32_t>(idx - 1);
      i = j;
    } else if (i < w.size() && std::isdigit(static_cast<unsigned char>(w[i]))) {
      fail("unknown generator");
    }
    long long e = 1;
    if (i < w.size() && w[i] == '^') {
      ++i;
      bool neg = false;
      if (i < w.size() && (w[i] == '-' || w[i] == '+')) neg = w[i++] == '-';
      std::size_t j = i;
      while (j < w.size() && std::isdigit(static_cast<unsigned char>(w[j]))) ++j;
      if (j == i) fail("missing exponent");
      e = std::atoll(std::string(w.substr(i, j - i)).c_str());
      if (neg) e = -e;
      i = j;
    }
    if (inv) e = -e;
    if (e != 0) out.push_back({Letter{m.first_gen(f) + coord, e < 0}, e < 0 ? -e : e});
  }
  return out;
}

std::vector<Letter> GroupModel::parse_letters(std::string_view w) const {
  std::vector<Letter> out;
  for (const auto& t : tokenize(*this, w))
    for (long long k = 0; k < t.count; ++k) out.push_back(t.letter);
  return out;
}

Element GroupModel::parse(std::string_view w) const {
  Element e = identity();
  for (const auto& t : tokenize(*this, w)) append_letter(e, t.letter, t.count);
  return e;
}

std::vector<Letter> GroupModel::normal_word(const Element& g) const {
  check(g);
  std::vector<Letter> out;
  for (const auto& s : g.syl_) {
    const int r = factors_[s.factor].rank;
    for (int k = 0; k < r; ++k) {
      const auto e = s.exps[k];
      const Letter l{first_gen(s.factor) + static_cast<std::uint32_t>(k), e < 0};
      for (std::int32_t n = 0; n < (e < 0 ? -e : e); ++n) out.push_back(l);
    }
  }
  return out;
}

std::string GroupModel::format_letter(Letter l) const {
  std::string s = generator_name(l.gen);
  if (l.inverse) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string GroupModel::format(const Element& g) const {
  check(g);
  if (g.syl_.empty()) return "1";
  std::ostringstream os;
  bool first = true;
  for (const auto& s : g.syl_) {
    const int r = factors_[s.factor].rank;
    for (int k = 0; k < r; ++k) {
      if (s.exps[k] == 0) continue;
      if (!first) os << ' ';
      first = false;
      os << generator_name(first_gen(s.factor) + static_cast<std::uint32_t>(k));
      if (s.exps[k] != 1) os << '^' << s.exps[k];
    }
  }
  return os.str();
}

Element GroupModel::multiply(const Element& x, const Element& y) const {
  check_pair(x, y);
  Element out = x;
  for (const auto& s : y.syl_) push_syllable(out.syl_, s, factors_[s.factor].rank);
  return out;
}

Element GroupModel::inverse(const Element& x) const {
  check(x);
  Element out = identity();
  out.syl_.reserve(x.syl_.size());
  for (auto it = x.syl_.rbegin(); it != x.syl_.rend(); ++it) {
    Syllable s = *it;
    for (auto& e : s.exps) e = -e;
    out.syl_.push_back(s);
  }
  return out;
}

Element GroupModel::between(const Element& x, const Element& y) const {
  check_pair(x, y);
  Element out = inverse(x);
  for (const auto& s : y.syl_) push_syllable(out.syl_, s, factors_[s.factor].rank);
  return out;
}

Element GroupModel::power(const Element& x, std::int64_t k) const {
  check(x);
  Element base = k < 0 ? inverse(x) : x;
  if (k < 0) k = -k;
  Element out = identity();
  if (base.syl_.size() == 1) {
    // single syllable: scale directly
    Syllable s = base.syl_[0];
    for (auto& e : s.exps) e = static_cast<std::int32_t>(e * k);
    push_syllable(out.syl_, s, factors_[s.factor].rank);
    return out;
  }
  while (k > 0) {
    if (k & 1) out = multiply(out, base);
    base = multiply(base, base);
    k >>= 1;
  }
  return out;
}

std::int64_t GroupModel::syllable_length(const Syllable& s) const {
  std::int64_t n = 0;
  const int r = factors_[s.factor].rank;
  for (int k = 0; k < r; ++k) n += s.exps[k] < 0 ? -static_cast<std::int64_t>(s.exps[k]) : s.exps[k];
  return n;
}

std::int64_t GroupModel::word_length(const Element& g) const {
  check(g);
  std::int64_t n = 0;
  for (const auto& s : g.syl_) n += syllable_length(s);
  return n;
}

std::int64_t GroupModel::distance(const Element& x, const Element& y) const {
  check_pair(x, y);
  const auto& a = x.syl_;
  const auto& b = y.syl_;
  std::size_t k = 0;
  while (k < a.size() && k < b.size() && a[k] == b[k]) ++k;
  std::int64_t d = 0;
  std::size_t ia = k;
  std::size_t ib = k;
  if (k < a.size() && k < b.size() && a[k].factor == b[k].factor) {
    const int r = factors_[a[k].factor].rank;
    for (int c = 0; c < r; ++c) {
      const std::int64_t diff = static_cast<std::int64_t>(b[k].exps[c]) - a[k].exps[c];
      d += diff < 0 ? -diff : diff;
    }
    ++ia;
    ++ib;
  }
  for (; ia < a.size(); ++ia) d += syllable_length(a[ia]);
  for (; ib < b.size(); ++ib) d += syllable_length(b[ib]);
  return d;
}

bool GroupModel::shortlex_less(const Element& x, const Element& y) const {
  const auto lx = word_length(x);
  const auto ly = word_length(y);
  if (lx != ly) return lx < ly;
  const auto wx = normal_word(x);
  const auto wy = normal_word(y);
  return std::lexicographical_compare(wx.begin(), wx.end(), wy.begin(), wy.end());
}

bool GroupModel::in_factor(const Element& g, std::uint32_t factor) const {
  check(g);
  return g.syl_.empty() || (g.syl_.size() == 1 && g.syl_[0].factor == factor);
}

Element GroupModel::coset_key(const Element& g, std::uint32_t factor) const {
  check(g);
  Element k = g;
  if (!k.syl_.empty() && k.syl_.back().factor == factor) k.syl_.pop_back();
  return k;
}

}  // namespace coarsegeo
