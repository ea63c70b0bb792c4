#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coarsegeo/rates.hpp"

namespace coarsegeo {

// mu, epsilon, tau are functions of the class (lambda, c); nu and sigma of a
// radius U.
struct RateSet {
  RateFunction mu;
  RateFunction epsilon;
  RateFunction tau;
  RateFunction nu;
  RateFunction sigma;

  // sigma defaults to 3 max(U, mu(1,0)) + eps(1,0) when absent.
  static RateSet from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

struct ConstantsBundle {
  std::int64_t lambda = 1;
  std::int64_t c = 0;
  std::int64_t A = 0, B = 0, C = 0;
  std::int64_t R1 = 0, R2 = 0, R3 = 0, R = 0;
  std::int64_t Lambda = 0;
  std::int64_t D1 = 0, D2 = 0, D3 = 0, D4 = 0, D5 = 0, D = 0;
  // The rate values the formulas consumed.
  std::int64_t mu = 0, eps = 0, tau = 0, mu10 = 0, eps10 = 0, sigma0 = 0, sigma_mu10 = 0, nu_arg = 0, nu_val = 0;
  nlohmann::ordered_json provenance;

  nlohmann::ordered_json to_json() const;
  // One row per candidate: name, formula, value before and after the strict
  // increment.
  std::vector<std::vector<std::string>> csv_rows() const;
};

// Order: A, C, B, then R1..R3 and R, then Lambda, then D1..D5 and D.
// Candidates of the strict inequalities (R > ..., D > ...) get +1.
ConstantsBundle compute_constants(const RateSet& rates, std::int64_t lambda, std::int64_t c);

}  // namespace coarsegeo
