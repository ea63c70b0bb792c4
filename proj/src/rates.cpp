#include "coarsegeo/rates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coarsegeo/errors.hpp"

namespace coarsegeo {

std::string Bucket::str() const { return "(" + std::to_string(lambda) + "," + std::to_string(c) + ")"; }

std::vector<Bucket> bucket_grid(int kmax) {
  std::vector<Bucket> g{{1, 0}};
  for (int k = 1; k <= kmax; ++k) g.push_back({k, 2 * k});
  return g;
}

Bucket round_up(double lambda, double c) {
  if (lambda < 1.0 || c < 0.0) throw PreconditionError("quasigeodesic class needs lambda >= 1 and c >= 0");
  if (lambda == 1.0 && c == 0.0) return {1, 0};
  const auto k = static_cast<std::int64_t>(std::max(std::ceil(lambda), std::ceil(c / 2.0)));
  return {std::max<std::int64_t>(k, 1), 2 * std::max<std::int64_t>(k, 1)};
}

RateFunction RateFunction::constant(std::int64_t v, RateDomain d) {
  if (v < 0) throw PreconditionError("rate values are nonnegative");
  RateFunction r;
  r.domain_ = d;
  r.intercept_ = v;
  r.floor_ = v;
  return r;
}

RateFunction RateFunction::affine(std::int64_t slope, std::int64_t intercept, std::int64_t floor) {
  if (slope < 0) throw PreconditionError("rate functions are nondecreasing");
  RateFunction r;
  r.domain_ = RateDomain::kRadius;
  r.slope_ = slope;
  r.intercept_ = intercept;
  r.floor_ = std::max<std::int64_t>(floor, 0);
  return r;
}

RateFunction RateFunction::qg_table(const std::map<Bucket, std::int64_t>& t) {
  if (t.empty()) throw InsufficientDataError("empty rate table");
  RateFunction r;
  r.tabulated_ = true;
  r.domain_ = RateDomain::kQuasigeodesic;
  // Buckets on the grid form a chain under domination; take running maxima.
  std::int64_t run = 0;
  for (const auto& [b, v] : t) {
    if (v < 0) throw PreconditionError("rate values are nonnegative");
    run = std::max(run, v);
    r.qg_[b] = run;
  }
  return r;
}

RateFunction RateFunction::radius_table(const std::map<std::int64_t, std::int64_t>& t) {
  if (t.empty()) throw InsufficientDataError("empty rate table");
  RateFunction r;
  r.tabulated_ = true;
  r.domain_ = RateDomain::kRadius;
  std::int64_t run = 0;
  for (const auto& [u, v] : t) {
    if (v < 0 || u < 0) throw PreconditionError("rate values are nonnegative");
    run = std::max(run, v);
    r.radius_[u] = run;
  }
  return r;
}

std::int64_t RateFunction::at(double lambda, double c) const {
  if (!tabulated_) {
    if (domain_ == RateDomain::kRadius) throw PreconditionError("radius rate evaluated at a quasigeodesic class");
    return std::max(intercept_, floor_);
  }
  if (domain_ != RateDomain::kQuasigeodesic) throw PreconditionError("radius table evaluated at a quasigeodesic class");
  for (const auto& [b, v] : qg_)
    if (b.dominates(lambda, c)) return v;
  std::ostringstream os;
  os << "rate table has no bucket covering (" << lambda << "," << c << "); needed bucket "
     << round_up(lambda, c).str();
  throw IncompleteInputError(os.str());
}

std::int64_t RateFunction::at(std::int64_t U) const {
  if (U < 0) throw PreconditionError("radius must be non-negative");
  if (!tabulated_) return std::max(slope_ * U + intercept_, floor_);
  if (domain_ != RateDomain::kRadius) throw PreconditionError("quasigeodesic table evaluated at a radius");
  auto it = radius_.lower_bound(U);
  if (it == radius_.end())
    throw IncompleteInputError("rate table has no entry at radius " + std::to_string(U) + " (largest tabulated " +
                               std::to_string(radius_.rbegin()->first) + ")");
  return it->second;
}

RateFunction RateFunction::from_json(const nlohmann::json& j, RateDomain d) {
  if (j.is_number_integer()) return constant(j.get<std::int64_t>(), d);
  if (!j.is_object()) throw ConfigError("rate function must be an integer or an object");
  if (j.contains("table")) {
    if (d == RateDomain::kQuasigeodesic) {
      std::map<Bucket, std::int64_t> t;
      for (const auto& e : j.at("table")) t[{e.at("lambda").get<std::int64_t>(), e.at("c").get<std::int64_t>()}] = e.at("value");
      return qg_table(t);
    }
    std::map<std::int64_t, std::int64_t> t;
    for (const auto& e : j.at("table")) t[e.at("U").get<std::int64_t>()] = e.at("value");
    return radius_table(t);
  }
  if (j.contains("slope")) {
    if (d != RateDomain::kRadius) throw ConfigError("affine rates are functions of a radius");
    return affine(j.at("slope"), j.value("intercept", std::int64_t{0}), j.value("floor", std::int64_t{0}));
  }
  if (j.contains("value")) return constant(j.at("value").get<std::int64_t>(), d);
  throw ConfigError("unrecognised rate function");
}

nlohmann::ordered_json RateFunction::to_json() const {
  nlohmann::ordered_json j;
  j["domain"] = domain_ == RateDomain::kRadius ? "radius" : "quasigeodesic";
  if (!tabulated_) {
    j["form"] = "closed";
    j["slope"] = slope_;
    j["intercept"] = intercept_;
    j["floor"] = floor_;
    return j;
  }
  j["form"] = "table";
  auto t = nlohmann::ordered_json::array();
  if (domain_ == RateDomain::kQuasigeodesic) {
    for (const auto& [b, v] : qg_) t.push_back({{"lambda", b.lambda}, {"c", b.c}, {"value", v}});
  } else {
    for (const auto& [u, v] : radius_) t.push_back({{"U", u}, {"value", v}});
  }
  j["table"] = t;
  return j;
}

std::string RateFunction::describe() const {
  std::ostringstream os;
  if (!tabulated_) {
    if (slope_ == 0) os << std::max(intercept_, floor_);
    else os << "max(" << slope_ << "U+" << intercept_ << ", " << floor_ << ")";
    return os.str();
  }
  os << "table{";
  bool first = true;
  if (domain_ == RateDomain::kQuasigeodesic) {
    for (const auto& [b, v] : qg_) {
      os << (first ? "" : ", ") << b.str() << ":" << v;
      first = false;
    }
  } else {
    for (const auto& [u, v] : radius_) {
      os << (first ? "" : ", ") << u << ":" << v;
      first = false;
    }
  }
  os << "}";
  return os.str();
}

RateFunction sigma_of(const RateFunction& mu, const RateFunction& eps) {
  const auto m = mu.at(1.0, 0.0);
  const auto e = eps.at(1.0, 0.0);
  return RateFunction::affine(3, e, 3 * m + e);
}

}  // namespace coarsegeo
