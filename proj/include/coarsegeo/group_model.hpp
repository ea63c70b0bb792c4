#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace coarsegeo {

// Groups are free products of free abelian factors Z^r. F_k is k copies of
// Z, Z^k is a single factor. Generators are numbered factor by factor.
inline constexpr int kMaxFactorRank = 6;

struct Letter {
  std::uint32_t gen = 0;
  bool inverse = false;

  friend bool operator==(const Letter&, const Letter&) = default;
  friend auto operator<=>(const Letter&, const Letter&) = default;
};

struct Syllable {
  std::uint32_t factor = 0;
  std::array<std::int32_t, kMaxFactorRank> exps{};

  friend bool operator==(const Syllable&, const Syllable&) = default;
};

// Free-product normal form: alternating factors, every syllable nonzero.
class Element {
 public:
  Element() = default;

  const std::vector<Syllable>& syllables() const { return syl_; }
  bool is_identity() const { return syl_.empty(); }
  std::uint32_t model_tag() const { return tag_; }

  friend bool operator==(const Element&, const Element&) = default;

 private:
  friend class GroupModel;
  std::uint32_t tag_ = 0;
  std::vector<Syllable> syl_;
};

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept;
};

enum class ModelKind { kFree, kFreeAbelian, kFreeProduct };

struct Factor {
  int rank = 1;
  bool peripheral = false;
  char letter = 'a';
};

class GroupModel {
 public:
  static GroupModel free_group(int rank);
  static GroupModel free_abelian(int rank);
  // Default: every factor is peripheral.
  static GroupModel free_product(const std::vector<int>& ranks,
                                 std::optional<std::vector<int>> peripheral = std::nullopt);
  static GroupModel from_json(const nlohmann::json& j);
  static GroupModel from_file(const std::string& path);
  nlohmann::json to_json() const;

  ModelKind kind() const { return kind_; }
  const std::vector<Factor>& factors() const { return factors_; }
  std::uint32_t num_factors() const { return static_cast<std::uint32_t>(factors_.size()); }
  std::uint32_t num_generators() const { return static_cast<std::uint32_t>(gen_factor_.size()); }
  std::uint32_t factor_of(std::uint32_t gen) const { return gen_factor_.at(gen); }
  std::uint32_t coord_of(std::uint32_t gen) const { return gen_coord_.at(gen); }
  std::uint32_t first_gen(std::uint32_t factor) const { return factor_first_.at(factor); }
  int factor_rank(std::uint32_t factor) const { return factors_.at(factor).rank; }
  bool is_peripheral(std::uint32_t factor) const { return factors_.at(factor).peripheral; }
  std::vector<std::uint32_t> peripheral_factors() const;

  std::string generator_name(std::uint32_t gen) const;
  std::string factor_name(std::uint32_t factor) const;
  std::string name() const;
  std::uint64_t hash() const { return hash_; }
  std::uint32_t tag() const { return static_cast<std::uint32_t>(hash_ ^ (hash_ >> 32)) | 1u; }

  Element identity() const;
  Element letter(Letter l) const;
  Element factor_element(std::uint32_t factor, std::span<const std::int32_t> exps) const;
  Element normalize(std::span<const Letter> letters) const;
  Element parse(std::string_view word) const;
  std::vector<Letter> parse_letters(std::string_view word) const;
  std::vector<Letter> normal_word(const Element& g) const;
  std::string format(const Element& g) const;
  std::string format_letter(Letter l) const;

  Element multiply(const Element& x, const Element& y) const;
  Element inverse(const Element& x) const;
  Element power(const Element& x, std::int64_t k) const;
  // x^{-1} y
  Element between(const Element& x, const Element& y) const;
  void append_letter(Element& x, Letter l, std::int64_t count = 1) const;

  std::int64_t word_length(const Element& g) const;
  std::int64_t distance(const Element& x, const Element& y) const;
  std::int64_t syllable_length(const Syllable& s) const;
  // Shortlex on normal-form words; letters ordered by (gen, positive first).
  bool shortlex_less(const Element& x, const Element& y) const;

  bool in_factor(const Element& g, std::uint32_t factor) const;
  // Canonical representative of the coset g * factor.
  Element coset_key(const Element& g, std::uint32_t factor) const;

  void check(const Element& g) const;

  friend bool operator==(const GroupModel& a, const GroupModel& b) { return a.hash_ == b.hash_; }

 private:
  GroupModel(ModelKind kind, std::vector<Factor> factors);
  static GroupModel parse_model(const nlohmann::json& j);
  void check_pair(const Element& x, const Element& y) const;
  static void push_syllable(std::vector<Syllable>& out, const Syllable& s, int rank);

  ModelKind kind_ = ModelKind::kFreeProduct;
  std::vector<Factor> factors_;
  std::vector<std::uint32_t> gen_factor_;
  std::vector<std::uint32_t> gen_coord_;
  std::vector<std::uint32_t> factor_first_;
  std::uint64_t hash_ = 0;
};

}  // namespace coarsegeo
