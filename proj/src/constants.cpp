#include "coarsegeo/constants.hpp"

#include <algorithm>

#include "coarsegeo/errors.hpp"

namespace coarsegeo {

RateSet RateSet::from_json(const nlohmann::json& j) {
  RateSet r;
  for (const char* k : {"mu", "epsilon", "tau", "nu"})
    if (!j.contains(k)) throw ConfigError(std::string("rates: missing '") + k + "'");
  r.mu = RateFunction::from_json(j.at("mu"), RateDomain::kQuasigeodesic);
  r.epsilon = RateFunction::from_json(j.at("epsilon"), RateDomain::kQuasigeodesic);
  r.tau = RateFunction::from_json(j.at("tau"), RateDomain::kQuasigeodesic);
  r.nu = RateFunction::from_json(j.at("nu"), RateDomain::kRadius);
  r.sigma = j.contains("sigma") ? RateFunction::from_json(j.at("sigma"), RateDomain::kRadius)
                                : sigma_of(r.mu, r.epsilon);
  return r;
}

nlohmann::ordered_json RateSet::to_json() const {
  nlohmann::ordered_json j;
  j["mu"] = mu.to_json();
  j["epsilon"] = epsilon.to_json();
  j["tau"] = tau.to_json();
  j["nu"] = nu.to_json();
  j["sigma"] = sigma.to_json();
  return j;
}

ConstantsBundle compute_constants(const RateSet& rates, std::int64_t lambda, std::int64_t c) {
  if (lambda < 1 || c < 0) throw PreconditionError("constants need lambda >= 1 and c >= 0");
  ConstantsBundle b;
  b.lambda = lambda;
  b.c = c;
  const double l = static_cast<double>(lambda), cc = static_cast<double>(c);
  b.mu = rates.mu.at(l, cc);
  b.eps = rates.epsilon.at(l, cc);
  b.tau = rates.tau.at(l, cc);
  b.mu10 = rates.mu.at(1.0, 0.0);
  b.eps10 = rates.epsilon.at(1.0, 0.0);
  b.sigma0 = rates.sigma.at(std::int64_t{0});
  b.sigma_mu10 = rates.sigma.at(b.mu10);

  b.A = b.mu + b.tau + b.eps;
  b.C = lambda * (b.mu + b.eps + b.A) + c;
  b.nu_arg = b.mu10 + b.sigma0;
  b.nu_val = rates.nu.at(b.nu_arg);
  b.B = 2 * b.eps10 + 2 * b.mu10 + b.nu_val + b.A;

  b.R1 = b.A + 2 * b.eps10 + 4 * b.mu10 + 1 + 1;
  b.R2 = b.B + 3 * b.eps10 + 4 * b.mu10 + 1 + 1;
  b.R3 = b.mu10 + 5 * b.eps10 + b.B + 1 + 1;
  b.R = std::max({b.R1, b.R2, b.R3});

  b.Lambda = lambda * (6 * b.R + 1) + 3 * c;

  b.D1 = b.mu10 + b.eps10 + b.A + b.C + 1;
  b.D2 = 2 * b.A + 3 * b.eps10 + 6 * b.mu10 + 1;
  b.D3 = b.Lambda * (b.B + b.eps + b.mu) + 1;
  b.D4 = b.Lambda * (b.R + b.sigma_mu10) + 1;
  b.D5 = 13 * b.eps10 + 6 * b.mu10 + 2 * b.B + 1;
  b.D = std::max({b.D1, b.D2, b.D3, b.D4, b.D5});

  b.provenance = rates.to_json();
  return b;
}

nlohmann::ordered_json ConstantsBundle::to_json() const {
  nlohmann::ordered_json j;
  j["lambda"] = lambda;
  j["c"] = c;
  j["inputs"] = {{"mu", mu},         {"epsilon", eps},     {"tau", tau},
                 {"mu_1_0", mu10},   {"epsilon_1_0", eps10}, {"sigma_0", sigma0},
                 {"sigma_mu_1_0", sigma_mu10}, {"nu_argument", nu_arg}, {"nu_value", nu_val}};
  j["A"] = A;
  j["C"] = C;
  j["B"] = B;
  j["R_candidates"] = {R1, R2, R3};
  j["R"] = R;
  j["Lambda"] = Lambda;
  j["D_candidates"] = {D1, D2, D3, D4, D5};
  j["D"] = D;
  j["strict_increment"] = 1;
  j["rates"] = provenance;
  return j;
}

std::vector<std::vector<std::string>> ConstantsBundle::csv_rows() const {
  auto row = [](const char* name, const char* formula, std::int64_t v) {
    return std::vector<std::string>{name, formula, std::to_string(v - 1), std::to_string(v)};
  };
  return {
      row("R1", "A + 2eps10 + 4mu10 + 1", R1),
      row("R2", "B + 3eps10 + 4mu10 + 1", R2),
      row("R3", "mu10 + 5eps10 + B + 1", R3),
      row("D1", "mu10 + eps10 + A + C", D1),
      row("D2", "2A + 3eps10 + 6mu10", D2),
      row("D3", "Lambda(B + eps + mu)", D3),
      row("D4", "Lambda(R + sigma(mu10))", D4),
      row("D5", "13eps10 + 6mu10 + 2B", D5),
  };
}

}  // namespace coarsegeo
