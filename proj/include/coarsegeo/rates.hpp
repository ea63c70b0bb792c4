#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace coarsegeo {

// Quasigeodesic classes are sampled on the grid (1,0), (1,2), (2,4), (3,6), ...
// A class (lambda, c) is served by the smallest grid bucket dominating it.
struct Bucket {
  std::int64_t lambda = 1;
  std::int64_t c = 0;

  friend bool operator==(const Bucket&, const Bucket&) = default;
  friend auto operator<=>(const Bucket&, const Bucket&) = default;
  bool dominates(double l, double cc) const { return static_cast<double>(lambda) >= l && static_cast<double>(c) >= cc; }
  std::string str() const;
};

std::vector<Bucket> bucket_grid(int kmax);
Bucket round_up(double lambda, double c);

enum class RateDomain { kQuasigeodesic, kRadius };

// A nonnegative function of (lambda, c) or of a radius U: either a closed
// form max(slope * U + intercept, floor) (constant when slope = 0) or a table
// made monotone by running maxima.
class RateFunction {
 public:
  RateFunction() = default;
  static RateFunction constant(std::int64_t v, RateDomain d = RateDomain::kQuasigeodesic);
  static RateFunction affine(std::int64_t slope, std::int64_t intercept, std::int64_t floor = 0);
  static RateFunction qg_table(const std::map<Bucket, std::int64_t>& t);
  static RateFunction radius_table(const std::map<std::int64_t, std::int64_t>& t);
  static RateFunction from_json(const nlohmann::json& j, RateDomain d);

  RateDomain domain() const { return domain_; }
  bool tabulated() const { return tabulated_; }
  std::int64_t at(double lambda, double c) const;
  std::int64_t at(std::int64_t U) const;
  // Pointwise comparison on the keys both functions know about.
  nlohmann::ordered_json to_json() const;
  std::string describe() const;

 private:
  RateDomain domain_ = RateDomain::kQuasigeodesic;
  bool tabulated_ = false;
  std::int64_t slope_ = 0;
  std::int64_t intercept_ = 0;
  std::int64_t floor_ = 0;
  std::map<Bucket, std::int64_t> qg_;
  std::map<std::int64_t, std::int64_t> radius_;
  std::string name_;
};

// sigma(U) = 3 max(U, mu(1,0)) + eps(1,0)
RateFunction sigma_of(const RateFunction& mu, const RateFunction& eps);

}  // namespace coarsegeo
