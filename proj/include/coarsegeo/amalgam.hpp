#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coarsegeo/admissible.hpp"
#include "coarsegeo/cayley_space.hpp"
#include "coarsegeo/constants.hpp"
#include "coarsegeo/subgroup.hpp"

namespace coarsegeo {

struct DoubleCosetRep {
  Element rep;
  // True when one more level of C-words finds nothing shorter.
  bool certified = false;
};

// Shortest element of C h C over C-words of length <= depth; ties broken by
// shortlex.
DoubleCosetRep min_double_coset_rep(const GroupModel& model, const Element& h, const SubgroupSpec& C, int depth);

enum class Side { kH = 0, kK = 1 };

struct AmalgamSyllable {
  Side side = Side::kH;
  Element g;
};

using AmalgamWord = std::vector<AmalgamSyllable>;

struct NormalPath {
  CayleyPath path;
  AdmissibleDecomposition<CayleySpace> decomp;
  Element value;
};

// p0 q1 p1 ... qn pn with lab(p_i) = k_i, lab(q_i) = h_i; each p_i has both
// endpoints on f_i K where K is the factor containing the K-side syllables.
// A word opening or closing with an h gets a trivial p piece there.
NormalPath build_normal_path_amalgam(const GroupModel& model, const AmalgamWord& w, std::uint32_t h_factor,
                                     std::uint32_t k_factor);

struct AmalgamBounds {
  int max_syllables = 6;
  int syllable_depth = 2;  // subgroup-word length of each syllable
  std::size_t fit_samples = 200;
};

struct AmalgamReport {
  std::size_t words = 0;
  std::size_t distinct = 0;
  std::size_t trivial = 0;
  std::size_t collisions = 0;
  std::vector<std::pair<std::string, std::string>> collision_table;
  std::size_t qg_failures = 0;
  std::size_t admissible_failures = 0;
  std::vector<std::string> failure_witnesses;
  std::size_t cyclic_long = 0;        // words of cyclic length >= 2
  std::size_t misclassified = 0;      // of those, classified parabolic
  std::vector<std::string> misclassified_witnesses;
  double max_fitted_c = 0.0;          // at lambda = 1
  std::int64_t max_fitted_lambda = 0; // smallest Lambda' with (Lambda', 0), on a sample
  std::size_t h_syllables = 0, k_syllables = 0;
  std::int64_t min_syllable_length = 0;

  nlohmann::ordered_json to_json() const;
};

// Words with at most max_syllables syllables drawn from the enumerations
// of Hdot and Kdot, each evaluated in G and checked against the formal
// free product (C trivial): distinct words must give distinct nontrivial
// elements, every normal path must be admissible at D and a
// (Lambda, 0)-quasigeodesic.
AmalgamReport check_amalgam_injectivity(const GroupModel& model, const SubgroupSpec& Hdot, const SubgroupSpec& Kdot,
                                        const SubgroupSpec& C, const AmalgamBounds& bounds, const RateSet& rates,
                                        const ConstantsBundle& constants);

// Cyclic syllable length of a word in the free product of the two sides.
std::size_t amalgam_cyclic_length(const GroupModel& model, AmalgamWord w);

std::string format_word(const GroupModel& model, const AmalgamWord& w);

}  // namespace coarsegeo
