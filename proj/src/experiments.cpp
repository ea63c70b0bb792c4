#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "config_access.hpp"
#include "coarsegeo/admissible.hpp"
#include "coarsegeo/amalgam.hpp"
#include "coarsegeo/ball_cache.hpp"
#include "coarsegeo/cayley_space.hpp"
#include "coarsegeo/coarse_geometry.hpp"
#include "coarsegeo/constants.hpp"
#include "coarsegeo/errors.hpp"
#include "coarsegeo/harness.hpp"
#include "coarsegeo/hnn.hpp"
#include "coarsegeo/relative.hpp"

namespace coarsegeo {

namespace {

using detail::Node;
using Rng = std::mt19937_64;
using ojson = nlohmann::ordered_json;

std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

GroupModel model_of(const ExperimentConfig& cfg) {
  if (cfg.model.is_null()) Node::fail("/model", "this experiment needs a group model");
  try {
    return GroupModel::from_json(cfg.model);
  } catch (const nlohmann::json::exception& e) {
    Node::fail("/model", e.what());
  }
}

RateFunction rate_of(const Node& p, const std::string& key, RateDomain d, std::optional<RateFunction> def) {
  if (!p.has(key)) {
    if (def) return *def;
    Node::fail(p.path() + "/" + key, "required key missing");
  }
  try {
    return RateFunction::from_json(p.at(key).raw(), d);
  } catch (const ConfigError& e) {
    Node::fail(p.path() + "/" + key, e.what());
  } catch (const nlohmann::json::exception& e) {
    Node::fail(p.path() + "/" + key, e.what());
  }
}

RateSet rates_of(const Node& p) {
  const Node r = p.at("rates");
  try {
    return RateSet::from_json(r.raw());
  } catch (const ConfigError& e) {
    Node::fail(r.path(), e.what());
  } catch (const nlohmann::json::exception& e) {
    Node::fail(r.path(), e.what());
  }
}

Element parse_in(const GroupModel& m, const Node& n) {
  try {
    return m.parse(n.str());
  } catch (const AlphabetError& e) {
    Node::fail(n.path(), e.what());
  }
}

struct NamedTarget {
  std::string name;
  GraphTarget target;
};

// {"coset": {"key": "b1", "factor": 0}} or {"subgroup": {"generators": [...], "depth": 4}}
NamedTarget target_of(const GroupModel& m, const MetricGraph& g, const Node& n) {
  if (n.has("coset")) {
    const Node c = n.at("coset");
    c.only({"key", "factor"});
    const Element key = c.has("key") ? parse_in(m, c.at("key")) : m.identity();
    const auto f = c.integer_in("factor", 0, 0, static_cast<std::int64_t>(m.num_factors()) - 1);
    const auto X = FactorCoset::of(m, key, static_cast<std::uint32_t>(f));
    return {m.format(X.key) + " " + m.factor_name(X.factor), GraphTarget::exact_coset(g, X)};
  }
  if (n.has("subgroup")) {
    const Node s = n.at("subgroup");
    s.only({"generators", "depth"});
    SubgroupSpec spec;
    const Node gens = s.at("generators");
    std::string name = "<";
    for (std::size_t i = 0; i < gens.size(); ++i) {
      spec.generators.push_back(parse_in(m, gens.at(i)));
      name += (i ? ", " : "") + gens.at(i).str();
    }
    spec.enumeration_depth = static_cast<int>(s.integer_in("depth", 4, 0, 64));
    return {name + ">", GraphTarget(g, g.subgroup_subset(spec))};
  }
  Node::fail(n.path(), "a target needs 'coset' or 'subgroup'");
}

Element random_element(const GroupModel& m, Rng& rng, int max_len) {
  Element e = m.identity();
  const auto len = uniform(rng, 1, max_len);
  for (std::int64_t i = 0; i < len; ++i)
    m.append_letter(e, Letter{static_cast<std::uint32_t>(uniform(rng, 0, m.num_generators() - 1)), uniform(rng, 0, 1) == 1});
  return e;
}

std::vector<std::uint32_t> peripherals(const GroupModel& m) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t f = 0; f < m.num_factors(); ++f)
    if (m.is_peripheral(f)) out.push_back(f);
  if (out.empty())
    for (std::uint32_t f = 0; f < m.num_factors(); ++f) out.push_back(f);
  return out;
}

std::vector<FactorCoset> random_cosets(const GroupModel& m, Rng& rng, std::size_t count, int max_len,
                                       std::vector<FactorCoset> avoid = {}) {
  const auto ps = peripherals(m);
  std::vector<FactorCoset> out;
  std::size_t guard = 0;
  while (out.size() < count && ++guard < 100000) {
    const auto f = ps[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(ps.size()) - 1))];
    const auto X = FactorCoset::of(m, random_element(m, rng, max_len), f);
    if (std::find(avoid.begin(), avoid.end(), X) != avoid.end()) continue;
    if (std::find(out.begin(), out.end(), X) != out.end()) continue;
    out.push_back(X);
  }
  return out;
}

std::string coset_name(const GroupModel& m, const FactorCoset& X) { return m.format(X.key) + " " + m.factor_name(X.factor); }

ojson measured_json(const Measured& x) {
  return ojson{{"value", x.value}, {"trusted", x.trusted}, {"unbounded", x.unbounded}};
}

const MetricGraph& ball_for(const ExperimentConfig& cfg, const GroupModel& m, int radius, std::optional<BallLoad>& hold,
                            ExperimentReport& rep) {
  hold = load_or_build_ball(m, radius, cfg.use_cache);
  rep.results["ball"] = ojson{{"radius", radius}, {"vertices", hold->graph.size()}};
  return hold->graph;
}

// ------------------------------------------------------------------ contract

void run_contract(const ExperimentConfig& cfg, ExperimentReport& rep) {
  const Node p(cfg.params, "/params");
  p.only({"radius", "target", "mode", "samples", "max_length", "max_c", "mu", "epsilon_bound"});
  const GroupModel m = model_of(cfg);
  const int radius = static_cast<int>(p.integer_in("radius", 6, 1, 40));
  const std::string mode = p.str("mode", "geodesics");
  if (mode != "geodesics" && mode != "sampled") Node::fail("/params/mode", "expected 'geodesics' or 'sampled'");
  const RateFunction mu = rate_of(p, "mu", RateDomain::kQuasigeodesic, RateFunction::constant(1));
  std::optional<RateFunction> bound;
  if (p.has("epsilon_bound")) bound = rate_of(p, "epsilon_bound", RateDomain::kQuasigeodesic, std::nullopt);

  std::optional<BallLoad> hold;
  const MetricGraph& g = ball_for(cfg, m, radius, hold, rep);
  const auto X = target_of(m, g, p.at("target"));
  ContractingReport cr;
  if (mode == "geodesics") {
    cr = check_contracting_geodesics(g, X.target, mu, bound ? &*bound : nullptr);
  } else {
    Rng rng(cfg.seed);
    const auto n = static_cast<std::size_t>(p.integer_in("samples", 2000, 1, 10'000'000));
    const auto max_len = p.integer_in("max_length", 2 * radius, 1, 1000);
    const double max_c = p.number("max_c", 6.0);
    std::vector<TaggedPath> samples;
    std::size_t guard = 0;
    while (samples.size() < n && ++guard < 50 * n) {
      PathSeq path{static_cast<VertexId>(uniform(rng, 0, static_cast<std::int64_t>(g.size()) - 1))};
      const auto len = uniform(rng, 1, max_len);
      for (std::int64_t i = 0; i < len; ++i) {
        const auto nb = g.neighbors(path.back());
        std::vector<VertexId> options;
        for (auto v : nb)
          if (path.size() < 2 || v != path[path.size() - 2]) options.push_back(v);
        if (options.empty()) break;
        path.push_back(options[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(options.size()) - 1))]);
      }
      if (path.size() > 2 && uniform(rng, 0, 2) == 0) {
        // a spike: out and back along one edge
        const auto i = static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(path.size()) - 1));
        const auto nb = g.neighbors(path[i]);
        const VertexId v = nb[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(nb.size()) - 1))];
        path.insert(path.begin() + static_cast<std::ptrdiff_t>(i) + 1, {v, path[i]});
      }
      const double c = std::ceil(g.fit_c(path, 1.0));
      if (c > max_c) continue;
      samples.push_back({std::move(path), 1.0, c});
    }
    rep.results["sampled_paths"] = samples.size();
    cr = check_contracting(g, X.target, samples, mu, bound ? &*bound : nullptr);
  }
  CsvTable table{{"lambda", "c", "max_projection_diameter", "epsilon"}};
  ojson rows = ojson::array();
  for (const auto& [b, d] : cr.max_proj_diam) {
    table.push_back({std::to_string(b.lambda), std::to_string(b.c), std::to_string(d), std::to_string(d + 1)});
    rows.push_back({{"lambda", b.lambda}, {"c", b.c}, {"max_projection_diameter", d}, {"epsilon", d + 1}});
  }
  rep.tables["epsilon"] = table;
  ojson wit = ojson::array();
  for (const auto& w : cr.witnesses)
    wit.push_back({{"from", m.format(g.label(w.from))}, {"to", m.format(g.label(w.to))}, {"bucket", w.bucket.str()},
                   {"projection_diameter", w.proj_diam}});
  rep.results["target"] = X.name;
  rep.results["mode"] = mode;
  rep.results["samples"] = cr.samples;
  rep.results["far_samples"] = cr.far_samples;
  rep.results["epsilon"] = cr.epsilon.to_json();
  rep.results["table"] = rows;
  rep.results["trusted"] = cr.trusted;
  rep.results["witnesses"] = wit;
  std::string w;
  if (!cr.held && !cr.witnesses.empty())
    w = "projection diameter " + std::to_string(cr.witnesses.front().proj_diam) + " from " +
        m.format(g.label(cr.witnesses.front().from)) + " to " + m.format(g.label(cr.witnesses.front().to));
  rep.add({"contracting", "contracting-subset", cr.held, cr.trusted, w});
}

// -------------------------------------------------------------- quasiconvex

void run_quasiconvex(const ExperimentConfig& cfg, ExperimentReport& rep) {
  const Node p(cfg.params, "/params");
  p.only({"radius", "targets", "random_cosets", "random_key_length", "Us", "mu", "epsilon", "sigma"});
  const GroupModel m = model_of(cfg);
  const int radius = static_cast<int>(p.integer_in("radius", 6, 1, 40));
  const RateFunction mu = rate_of(p, "mu", RateDomain::kQuasigeodesic, RateFunction::constant(1));
  const RateFunction eps = rate_of(p, "epsilon", RateDomain::kQuasigeodesic, RateFunction::constant(1));
  const RateFunction sigma = rate_of(p, "sigma", RateDomain::kRadius, sigma_of(mu, eps));
  const auto Us = p.integers("Us", {0, 1, 2});
  std::optional<BallLoad> hold;
  const MetricGraph& g = ball_for(cfg, m, radius, hold, rep);
  std::vector<NamedTarget> targets;
  if (p.has("targets")) {
    const Node ts = p.at("targets");
    for (std::size_t i = 0; i < ts.size(); ++i) targets.push_back(target_of(m, g, ts.at(i)));
  }
  Rng rng(cfg.seed);
  const auto nrand = static_cast<std::size_t>(p.integer_in("random_cosets", 0, 0, 1000));
  std::vector<FactorCoset> fixed;
  for (const auto& t : targets)
    if (t.target.coset()) fixed.push_back(*t.target.coset());
  for (const auto& X : random_cosets(m, rng, nrand, static_cast<int>(p.integer_in("random_key_length", 3, 1, 20)), fixed))
    targets.push_back({coset_name(m, X), GraphTarget::exact_coset(g, X)});
  if (targets.empty()) Node::fail("/params/targets", "no targets given");

  CsvTable table{{"target", "U", "sigma", "max_excursion", "pairs", "complete_pairs", "ok"}};
  ojson rows = ojson::array();
  bool ok = true;
  std::string witness;
  for (const auto& t : targets)
    for (auto U : Us) {
      const auto s = sigma.at(U);
      const auto qr = check_quasiconvex(g, t.target, static_cast<int>(U), s);
      table.push_back({t.name, std::to_string(U), std::to_string(s), std::to_string(qr.max_excursion),
                       std::to_string(qr.pairs), std::to_string(qr.complete_pairs), qr.ok ? "1" : "0"});
      rows.push_back({{"target", t.name}, {"U", U}, {"sigma", s}, {"max_excursion", qr.max_excursion},
                      {"pairs", qr.pairs}, {"complete_pairs", qr.complete_pairs}, {"ok", qr.ok}});
      if (!qr.ok && ok) {
        ok = false;
        const auto& wt = *qr.witness;
        witness = t.name + ", U = " + std::to_string(U) + ": geodesic " + m.format(g.label(wt.u)) + " -> " +
                  m.format(g.label(wt.v)) + " reaches " + m.format(g.label(wt.escape)) + " at distance " +
                  std::to_string(wt.distance) + " > sigma = " + std::to_string(s);
      }
    }
  rep.results["sigma"] = sigma.to_json();
  rep.results["table"] = rows;
  rep.tables["quasiconvexity"] = table;
  rep.add({"sigma-quasiconvex", "quasiconvex-sigma", ok, true, witness});
}

// -------------------------------------------------------------- interaction

InteractionReport interaction_for(const MetricGraph& g, const GraphTarget& a, const GraphTarget& b,
                                  const std::vector<std::int64_t>& Us, std::int64_t mu10, std::int64_t eps10) {
  std::vector<int> us(Us.begin(), Us.end());
  return bounded_interaction(g, a, b, us, mu10, eps10);
}

void run_interaction(const ExperimentConfig& cfg, ExperimentReport& rep) {
  const Node p(cfg.params, "/params");
  p.only({"radius", "pairs", "random_pairs", "random_key_length", "Us", "mu10", "eps10"});
  const GroupModel m = model_of(cfg);
  const int radius = static_cast<int>(p.integer_in("radius", 6, 1, 40));
  const auto Us = p.integers("Us", {0, 1, 2});
  const auto mu10 = p.integer_in("mu10", 1, 0, 1000);
  const auto eps10 = p.integer_in("eps10", 1, 0, 1000);
  std::optional<BallLoad> hold;
  const MetricGraph& g = ball_for(cfg, m, radius, hold, rep);
  std::vector<std::pair<NamedTarget, NamedTarget>> pairs;
  if (p.has("pairs")) {
    const Node ps = p.at("pairs");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const Node pr = ps.at(i);
      if (pr.size() != 2) Node::fail(pr.path(), "a pair has two targets");
      pairs.emplace_back(target_of(m, g, pr.at(0)), target_of(m, g, pr.at(1)));
    }
  }
  Rng rng(cfg.seed);
  const auto nrand = static_cast<std::size_t>(p.integer_in("random_pairs", 0, 0, 1000));
  const int klen = static_cast<int>(p.integer_in("random_key_length", 2, 1, 20));
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t guard = 0;
  while (pairs.size() < nrand + (p.has("pairs") ? p.at("pairs").size() : 0) && ++guard < 10000) {
    const auto cs = random_cosets(m, rng, 2, klen);
    if (cs.size() < 2) continue;
    const auto key = std::make_pair(coset_name(m, cs[0]), coset_name(m, cs[1]));
    if (!seen.insert(key).second) continue;
    pairs.emplace_back(NamedTarget{key.first, GraphTarget::exact_coset(g, cs[0])},
                       NamedTarget{key.second, GraphTarget::exact_coset(g, cs[1])});
  }
  CsvTable table{{"X", "X'", "U", "nu", "predicted_nu", "B", "predicted_B", "trusted"}};
  ojson rows = ojson::array();
  bool nu_ok = true, B_ok = true, trusted = true;
  std::string nu_w, B_w;
  std::int64_t B_max = 0;
  for (const auto& [a, b] : pairs) {
    const auto ir = interaction_for(g, a.target, b.target, Us, mu10, eps10);
    bool tr = ir.proj_diam_x_on_xprime.trusted && ir.proj_diam_xprime_on_x.trusted;
    for (const auto& d : ir.intersection_diam) tr = tr && d.trusted && !d.unbounded;
    trusted = trusted && tr;
    B_max = std::max(B_max, ir.B);
    ojson per_u = ojson::array();
    for (std::size_t k = 0; k < ir.U.size(); ++k) {
      table.push_back({a.name, b.name, std::to_string(ir.U[k]), std::to_string(ir.nu[k]),
                       std::to_string(ir.predicted_nu[k]), std::to_string(ir.B), std::to_string(ir.predicted_B),
                       tr ? "1" : "0"});
      per_u.push_back({{"U", ir.U[k]}, {"intersection_diam", measured_json(ir.intersection_diam[k])},
                       {"nu", ir.nu[k]}, {"predicted_nu", ir.predicted_nu[k]}});
      if (ir.nu[k] > ir.predicted_nu[k] && nu_ok) {
        nu_ok = false;
        nu_w = a.name + " / " + b.name + ", U = " + std::to_string(ir.U[k]) + ": nu = " + std::to_string(ir.nu[k]) +
               " > " + std::to_string(ir.predicted_nu[k]);
      }
    }
    if (!ir.B_within_prediction && B_ok) {
      B_ok = false;
      B_w = a.name + " / " + b.name + ": B = " + std::to_string(ir.B) + " > " + std::to_string(ir.predicted_B);
    }
    rows.push_back({{"X", a.name}, {"X'", b.name}, {"per_U", per_u},
                    {"projection_diam_X'_on_X", measured_json(ir.proj_diam_xprime_on_x)},
                    {"projection_diam_X_on_X'", measured_json(ir.proj_diam_x_on_xprime)}, {"B", ir.B},
                    {"nu_at_mu10", ir.nu_at_mu}, {"predicted_B", ir.predicted_B}, {"trusted", tr}});
  }
  if (pairs.empty()) Node::fail("/params/pairs", "no coset pairs given");
  rep.results["pairs"] = rows;
  rep.results["B_max"] = B_max;
  rep.tables["interaction"] = table;
  rep.add({"nu-from-B", "bounded-projection-to-intersection", nu_ok, trusted, nu_w});
  rep.add({"B-from-nu", "bounded-intersection-to-projection", B_ok, trusted, B_w});
}

// ---------------------------------------------------------------- constants

void run_constants(const ExperimentConfig& cfg, ExperimentReport& rep) {
  const Node p(cfg.params, "/params");
  p.only({"rates", "lambda", "c", "expected"});
  const RateSet rates = rates_of(p);
  const auto lambda = p.integer_in("lambda", 1, 1, 1000);
  const auto c = p.integer_in("c", 0, 0, 100000);
  const auto b = compute_constants(rates, lambda, c);
  rep.results["constants"] = b.to_json();
  CsvTable table{{"name", "formula", "value_before_increment", "value"}};
  for (auto& row : b.csv_rows()) table.push_back(row);
  auto plain = [&](const char* n, const char* f, std::int64_t v) { table.push_back({n, f, std::to_string(v), std::to_string(v)}); };
  plain("A", "mu + tau + eps", b.A);
  plain("C", "lambda(mu + eps + A) + c", b.C);
  plain("B", "2eps10 + 2mu10 + nu(mu10 + sigma(0)) + A", b.B);
  plain("R", "max(R1, R2, R3)", b.R);
  plain("Lambda", "lambda(6R + 1) + 3c", b.Lambda);
  plain("D", "max(D1, ..., D5)", b.D);
  rep.tables["constants"] = table;
  if (p.has("expected")) {
    const Node e = p.at("expected");
    e.only({"A", "B", "C", "R", "Lambda", "D"});
    const std::map<std::string, std::int64_t> got{{"A", b.A}, {"B", b.B}, {"C", b.C},
                                                  {"R", b.R}, {"Lambda", b.Lambda}, {"D", b.D}};
    bool ok = true;
    std::string w;
    for (const auto& [k, v] : got) {
      if (!e.has(k)) continue;
      const auto want = e.at(k).integer();
      if (want != v && ok) {
        ok = false;
        w = k + " = " + std::to_string(v) + ", expected " + std::to_string(want);
      }
    }
    rep.add({"constants-expected", "constant-formulas", ok, true, w});
  }
}

// ------------------------------------------------------------ admissible-mc

struct McClass {
  std::int64_t lambda, c;
};

void run_admissible_mc(const ExperimentConfig& cfg, ExperimentReport& rep) {
  const Node p(cfg.params, "/params");
  p.only({"rates", "classes", "accepted", "max_attempts", "max_p", "extra_length", "q_max_length", "min_accepted"});
  const GroupModel m = model_of(cfg);
  const RateSet rates = rates_of(p);
  std::vector<McClass> classes;
  if (p.has("classes")) {
    const Node cs = p.at("classes");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const Node c = cs.at(i);
      if (c.size() != 2) Node::fail(c.path(), "a class is [lambda, c]");
      if (c.at(0).integer() < 1 || c.at(1).integer() < 0) Node::fail(c.path(), "need lambda >= 1 and c >= 0");
      classes.push_back({c.at(0).integer(), c.at(1).integer()});
    }
  } else {
    classes = {{1, 0}, {1, 2}};
  }
  const auto want = p.integer_in("accepted", 300, 1, 1'000'000);
  const auto max_attempts = p.integer_in("max_attempts", 20 * want, 1, 100'000'000);
  const auto max_p = p.integer_in("max_p", 4, 1, 16);
  const auto extra = p.integer_in("extra_length", 40, 0, 100000);
  const auto qmax = p.integer_in("q_max_length", 6, 1, 1000);
  const auto min_accepted = p.integer_in("min_accepted", 0, 0, 100'000'000);
  Rng rng(cfg.seed);
  CayleySpace S(m);
  const auto nf = static_cast<std::int64_t>(m.num_factors());

  auto random_letter_outside = [&](std::optional<std::uint32_t> avoid) {
    while (true) {
      const auto gen = static_cast<std::uint32_t>(uniform(rng, 0, m.num_generators() - 1));
      if (avoid && m.factor_of(gen) == *avoid) continue;
      return Letter{gen, uniform(rng, 0, 1) == 1};
    }
  };
  auto factor_step = [&](std::uint32_t f, std::int64_t len) {
    // random element of factor f with l1 length len
    std::array<std::int32_t, kMaxFactorRank> e{};
    const int r = m.factor_rank(f);
    for (std::int64_t k = 0; k < len; ++k) {
      const auto i = static_cast<std::size_t>(uniform(rng, 0, r - 1));
      e[i] += e[i] < 0 ? -1 : e[i] > 0 ? 1 : (uniform(rng, 0, 1) ? 1 : -1);
    }
    return m.factor_element(f, std::span<const std::int32_t>(e.data(), static_cast<std::size_t>(r)));
  };

  ojson per_class = ojson::array();
  CsvTable table{{"lambda", "c", "D", "R", "Lambda", "B", "attempts", "accepted", "qg_failures", "qg_failures_at_loops", "length_bound_failures", "fellow_failures",
                  "projection_failures", "max_projection", "max_fitted_c"}};
  bool qg_ok = true, len_ok = true, fellow_ok = true, proj_ok = true, enough = true;
  std::string qg_w, len_w, fellow_w, proj_w;
  for (const auto& cl : classes) {
    const auto K = compute_constants(rates, cl.lambda, cl.c);
    const double lam = static_cast<double>(cl.lambda), cc = static_cast<double>(cl.c);
    const auto threshold = static_cast<std::int64_t>(std::floor(lam * static_cast<double>(K.D) + cc));
    std::int64_t attempts = 0, accepted = 0, qg_fail = 0, qg_loop = 0, len_fail = 0, fellow_fail = 0, proj_fail = 0, max_proj = 0;
    double max_fit = 0;
    std::map<std::string, std::int64_t> rejected;
    while (accepted < want && attempts < max_attempts) {
      ++attempts;
      AdmissibleDecomposition<CayleySpace> d;
      d.lambda = lam;
      d.c = cc;
      Element x = m.identity();
      const auto k = uniform(rng, 1, max_p);
      std::optional<std::uint32_t> prev_factor;
      for (std::int64_t i = 0; i < k; ++i) {
        std::uint32_t f;
        do f = static_cast<std::uint32_t>(uniform(rng, 0, nf - 1));
        while (prev_factor && f == *prev_factor && nf > 1 && uniform(rng, 0, 3) != 0);
        const bool end_piece = i == 0 || i + 1 == k;
        const auto len = end_piece && uniform(rng, 0, 2) == 0 ? uniform(rng, 0, threshold + extra)
                                                               : threshold + 1 + uniform(rng, 0, extra);
        CayleyPath piece(m, x);
        if (cl.c >= 2 && len > 2 && uniform(rng, 0, 1) == 0) {
          const auto cut = uniform(rng, 1, len - 1);
          piece.append_geodesic(factor_step(f, cut));
          const Letter l = random_letter_outside(f);
          piece.append(l);
          piece.append(Letter{l.gen, !l.inverse});
          piece.append_geodesic(factor_step(f, len - cut));
        } else {
          piece.append_geodesic(factor_step(f, len));
        }
        const auto X = FactorCoset::of(m, x, f);
        x = piece.back();
        d.add_p(std::move(piece), X);
        if (i + 1 == k) break;
        CayleyPath q(m, x);
        const auto qlen = uniform(rng, 1, qmax);
        std::optional<Letter> last;
        for (std::int64_t j = 0; j < qlen; ++j) {
          Letter l = j == 0 ? random_letter_outside(f) : random_letter_outside(std::nullopt);
          if (last && l.gen == last->gen && l.inverse != last->inverse) l.inverse = last->inverse;
          q.append(l);
          last = l;
        }
        if (cl.c >= 2 && uniform(rng, 0, 2) == 0) {
          const Letter l = random_letter_outside(m.factor_of(last->gen));
          q.append(l);
          q.append(Letter{l.gen, !l.inverse});
        }
        x = q.back();
        d.add_q(std::move(q));
        prev_factor = f;
      }
      const auto adm = verify_admissible(S, d, K.D, rates);
      if (!adm.ok) {
        ++rejected[adm.conditions[*adm.first_violation].name];
        continue;
      }
      ++accepted;
      const auto path = concatenate(S, d);
      max_fit = std::max(max_fit, S.fit_c(path, static_cast<double>(K.Lambda)));
      const auto qg = S.is_quasigeodesic(path, static_cast<double>(K.Lambda), 0.0);
      if (!qg.ok) {
        ++qg_fail;
        const auto [i, j] = *qg.witness;
        const auto dij = S.distance(path[i], path[j]);
        if (dij == 0) ++qg_loop;
        if (qg_ok) {
          qg_ok = false;
          qg_w = "class (" + std::to_string(cl.lambda) + ", " + std::to_string(cl.c) + "): subpath " +
                 std::to_string(i) + ".." + std::to_string(j) + " of a path of length " + std::to_string(path.length()) +
                 " has endpoint distance " + std::to_string(dij);
        }
      }
      // the whole-path bound len <= Lambda d(endpoints)
      if (static_cast<double>(path.length()) >
          static_cast<double>(K.Lambda) * static_cast<double>(S.distance(path.front(), path.back()))) {
        ++len_fail;
        if (len_ok) {
          len_ok = false;
          len_w = "class (" + std::to_string(cl.lambda) + ", " + std::to_string(cl.c) + "): length " +
                  std::to_string(path.length()) + " > Lambda * " + std::to_string(S.distance(path.front(), path.back()));
        }
      }
      const auto alpha = S.geodesic(path.front(), path.back());
      const auto fr = check_fellow_traveller(S, d, alpha, K.R);
      if (!fr.ok) {
        ++fellow_fail;
        if (fellow_ok) {
          fellow_ok = false;
          fellow_w = "class (" + std::to_string(cl.lambda) + ", " + std::to_string(cl.c) + "): no R-close markers for p piece " +
                     std::to_string(*fr.failed_piece);
        }
      }
      const auto pr = max_near_target_projection(S, d);
      max_proj = std::max(max_proj, pr);
      if (pr > K.B) {
        ++proj_fail;
        if (proj_ok) {
          proj_ok = false;
          proj_w = "class (" + std::to_string(cl.lambda) + ", " + std::to_string(cl.c) + "): projection diameter " +
                   std::to_string(pr) + " > B = " + std::to_string(K.B);
        }
      }
    }
    if (accepted < min_accepted) enough = false;
    ojson rej = ojson::object();
    for (const auto& [k2, v] : rejected) rej[k2] = v;
    per_class.push_back({{"lambda", cl.lambda}, {"c", cl.c}, {"D", K.D}, {"R", K.R}, {"Lambda", K.Lambda}, {"B", K.B},
                         {"attempts", attempts}, {"accepted", accepted}, {"rejected_by", rej},
                         {"quasigeodesic_failures", qg_fail}, {"quasigeodesic_failures_at_closed_loops", qg_loop},
                         {"length_bound_failures", len_fail}, {"fellow_failures", fellow_fail},
                         {"projection_failures", proj_fail}, {"max_projection", max_proj},
                         {"max_fitted_c_at_Lambda", max_fit}});
    std::ostringstream fit;
    fit << max_fit;
    table.push_back({std::to_string(cl.lambda), std::to_string(cl.c), std::to_string(K.D), std::to_string(K.R),
                     std::to_string(K.Lambda), std::to_string(K.B), std::to_string(attempts), std::to_string(accepted),
                     std::to_string(qg_fail), std::to_string(qg_loop), std::to_string(len_fail), std::to_string(fellow_fail), std::to_string(proj_fail),
                     std::to_string(max_proj), fit.str()});
  }
  rep.results["classes"] = per_class;
  rep.tables["admissible_mc"] = table;
  rep.add({"admissible-quasigeodesic", "admissible-quasigeodesic", qg_ok, true, qg_w});
  rep.add({"admissible-length-bound", "admissible-quasigeodesic", len_ok, true, len_w});
  rep.add({"fellow-traveller", "fellow-traveller", fellow_ok, true, fellow_w});
  rep.add({"near-target-projection", "near-contracting-projection", proj_ok, true, proj_w});
  rep.add({"sample-budget", "monte-carlo-budget", true, enough,
           enough ? "" : "fewer accepted decompositions than min_accepted"});
}

// ------------------------------------------------------------------ amalgam

SubgroupSpec side_of(const GroupModel& m, const Node& n, std::int64_t auto_power) {
  n.only({"generators", "power"});
  SubgroupSpec s;
  std::int64_t power = 1;
  if (n.has("power")) {
    const Node pw = n.at("power");
    if (pw.raw().is_string()) {
      if (pw.str() != "auto") Node::fail(pw.path(), "expected an integer or \"auto\"");
      power = auto_power;
    } else {
      power = pw.integer();
      if (power < 1) Node::fail(pw.path(), "must be positive");
    }
  }
  if (n.has("generators")) {
    const Node gs = n.at("generators");
    for (std::size_t i = 0; i < gs.size(); ++i) s.generators.push_back(m.power(parse_in(m, gs.at(i)), power));
  }
  return s;
}

void run_amalgam(const ExperimentConfig& cfg, ExperimentReport& rep) {
  const Node p(cfg.params, "/params");
  p.only({"rates", "lambda", "c", "hdot", "kdot", "C", "syllable_depth", "max_syllables", "fit_samples"});
  const GroupModel m = model_of(cfg);
  const RateSet rates = rates_of(p);
  const auto K = compute_constants(rates, p.integer_in("lambda", 1, 1, 1000), p.integer_in("c", 0, 0, 100000));
  const auto H = side_of(m, p.at("hdot"), K.D + 1);
  const auto Kd = side_of(m, p.at("kdot"), K.D + 1);
  const SubgroupSpec C = p.has("C") ? side_of(m, p.at("C"), 1) : SubgroupSpec{};
  AmalgamBounds b;
  b.max_syllables = static_cast<int>(p.integer_in("max_syllables", 6, 1, 12));
  b.syllable_depth = static_cast<int>(p.integer_in("syllable_depth", 2, 1, 8));
  b.fit_samples = static_cast<std::size_t>(p.integer_in("fit_samples", 200, 0, 1'000'000));
  const auto r = check_amalgam_injectivity(m, H, Kd, C, b, rates, K);
  ojson gens = ojson::object();
  auto names = [&](const SubgroupSpec& s) {
    ojson a = ojson::array();
    for (const auto& g : s.generators) a.push_back(m.format(g));
    return a;
  };
  gens["hdot"] = names(H);
  gens["kdot"] = names(Kd);
  rep.results["generators"] = gens;
  rep.results["constants"] = {{"D", K.D}, {"Lambda", K.Lambda}, {"R", K.R}};
  rep.results["report"] = r.to_json();
  CsvTable coll{{"first_word", "second_word"}};
  for (const auto& [a, c2] : r.collision_table) coll.push_back({a, c2});
  rep.tables["collisions"] = coll;
  auto first = [&](const std::string& prefix) {
    for (const auto& w : r.failure_witnesses)
      if (w.rfind(prefix, 0) == 0) return w;
    return std::string();
  };
  std::string inj_w;
  if (r.collisions > 0) inj_w = r.collision_table.front().first + " = " + r.collision_table.front().second;
  else if (r.trivial > 0) inj_w = first("trivial");
  rep.add({"amalgam-injective", "virtual-amalgamation", r.collisions == 0 && r.trivial == 0, true, inj_w});
  rep.add({"normal-path-admissible", "normal-path-admissible", r.admissible_failures == 0, true, first("admissible")});
  rep.add({"normal-path-quasigeodesic", "normal-path-quasigeodesic", r.qg_failures == 0, true, first("quasigeodesic")});
  rep.add({"cyclic-words-hyperbolic", "amalgam-not-parabolic", r.misclassified == 0, true,
           r.misclassified_witnesses.empty() ? "" : r.misclassified_witnesses.front()});
}

// ---------------------------------------------------------------------- hnn

void run_hnn(const ExperimentConfig& cfg, ExperimentReport& rep) {
  const Node p(cfg.params, "/params");
  p.only({"rates", "ball_radius", "U", "L", "max_pairs", "N", "max_t", "h_length", "check_stride"});
  const RateSet rates = rates_of(p);
  HnnMeasureOptions opt;
  opt.ball_radius = static_cast<int>(p.integer_in("ball_radius", 6, 2, 20));
  opt.U = static_cast<int>(p.integer_in("U", 1, 0, 20));
  opt.L = p.integer_in("L", 0, 0, 1000);
  opt.max_pairs = static_cast<std::size_t>(p.integer_in("max_pairs", 4000, 1, 10'000'000));
  opt.seed = cfg.seed;
  const auto th = hnn_threshold(rates, opt);
  std::int64_t N = th.N;
  if (p.has("N") && !(p.at("N").raw().is_string() && p.at("N").str() == "auto")) {
    N = p.at("N").integer();
    if (N < 1) Node::fail("/params/N", "must be positive");
  }
  HnnBounds b;
  b.max_t = static_cast<int>(p.integer_in("max_t", 3, 0, 4));
  b.h_length = static_cast<int>(p.integer_in("h_length", 3, 0, 6));
  b.check_stride = static_cast<std::size_t>(p.integer_in("check_stride", 0, 0, 1'000'000));
  const auto fx = make_hnn_fixture(N);
  rep.results["threshold"] = th.to_json();
  rep.results["N"] = N;
  const auto checks = validate_hnn_fixture(fx, th.constants.D);
  ojson fj = ojson::array();
  std::string bad;
  for (const auto& c : checks) {
    fj.push_back({{"hypothesis", c.hypothesis}, {"ok", c.ok}, {"detail", c.detail}});
    if (!c.ok && bad.empty()) bad = c.hypothesis + ": " + c.detail;
  }
  rep.results["fixture"] = fj;
  if (!bad.empty()) throw FixtureError("fixture hypothesis violated, " + bad);
  rep.add({"threshold", "hnn-threshold", N >= th.N, th.trusted,
           N >= th.N ? "" : "N = " + std::to_string(N) + " < threshold " + std::to_string(th.N)});
  const auto r = check_hnn_injectivity(fx, b, rates, th);
  rep.results["D_prime"] = hnn_d_prime(th, N);
  rep.results["report"] = r.to_json();
  auto first = [&](const std::string& needle) {
    for (const auto& w : r.witnesses)
      if (w.find(needle) != std::string::npos) return w;
    return std::string();
  };
  const bool inj = r.collisions == 0 && r.splits == 0 && r.trivial == 0;
  std::string inj_w = first("equal in G");
  if (inj_w.empty()) inj_w = first("distinct in G");
  if (inj_w.empty()) inj_w = first("trivial in G");
  rep.add({"hnn-injective", "hnn-extension", inj, true, inj ? "" : inj_w});
  rep.add({"truncation-admissible", "truncation-admissible", r.admissible_failures == 0, th.trusted, first("not admissible")});
  rep.add({"truncation-quasigeodesic", "admissible-quasigeodesic", r.qg_failures == 0, th.trusted, first("not a (Lambda")});
  rep.add({"truncation-targets-distinct", "distinct-peripheral-cosets", r.target_repeats == 0, true, first("repeated target")});
  rep.add({"truncation-long-pieces", "truncation-length", r.short_p == 0, th.trusted, first("has length")});
  rep.add({"parabolic-conjugate-into-H", "hnn-parabolic", r.parabolic_not_conjugate_into_H == 0, true,
           first("parabolic")});
}

// --------------------------------------------------------------- transition

std::vector<Element> path_elements(const CayleyPath& p) {
  std::vector<Element> out;
  out.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out.push_back(p[i]);
  return out;
}

Element random_syllabic(const GroupModel& m, Rng& rng, int max_syllables, int max_exp) {
  Element e = m.identity();
  const auto n = uniform(rng, 1, max_syllables);
  std::optional<std::uint32_t> prev;
  const auto nf = static_cast<std::int64_t>(m.num_factors());
  for (std::int64_t i = 0; i < n; ++i) {
    std::uint32_t f;
    do f = static_cast<std::uint32_t>(uniform(rng, 0, nf - 1));
    while (nf > 1 && prev && f == *prev);
    std::array<std::int32_t, kMaxFactorRank> ex{};
    bool nz = false;
    while (!nz) {
      for (int k = 0; k < m.factor_rank(f); ++k) {
        ex[static_cast<std::size_t>(k)] = static_cast<std::int32_t>(uniform(rng, -max_exp, max_exp));
        nz = nz || ex[static_cast<std::size_t>(k)] != 0;
      }
    }
    e = m.multiply(e, m.factor_element(f, std::span<const std::int32_t>(ex.data(), static_cast<std::size_t>(m.factor_rank(f)))));
    prev = f;
  }
  return e;
}

void run_transition(const ExperimentConfig& cfg, ExperimentReport& rep) {
  const Node p(cfg.params, "/params");
  p.only({"samples", "max_syllables", "max_exp", "U", "L", "nu"});
  const GroupModel m = model_of(cfg);
  const auto n = p.integer_in("samples", 200, 1, 1'000'000);
  const int ms = static_cast<int>(p.integer_in("max_syllables", 6, 1, 64));
  const int me = static_cast<int>(p.integer_in("max_exp", 4, 1, 1000));
  const int U = static_cast<int>(p.integer_in("U", 1, 0, 100));
  const RateFunction nu = rate_of(p, "nu", RateDomain::kRadius, RateFunction::affine(2, 1, 0));
  const std::int64_t L = p.integer_in("L", nu.at(std::int64_t{U}) + 1, 0, 100000);
  Rng rng(cfg.seed);
  std::size_t points = 0, transition = 0, deep = 0, multi = 0, violations = 0;
  std::string witness;
  for (std::int64_t s = 0; s < n; ++s) {
    const Element g = random_syllabic(m, rng, ms, me);
    const auto path = path_elements(CayleyPath::geodesic(m, m.identity(), g));
    const auto tr = deep_and_transition_points(m, path, U, L, nu.at(std::int64_t{U}));
    points += tr.points.size();
    multi += tr.multi_deep;
    for (const auto& pc : tr.points) {
      transition += pc.transition ? 1 : 0;
      deep += pc.deep_in ? 1 : 0;
    }
    if (!tr.unique_when_required) {
      ++violations;
      if (witness.empty()) witness = "geodesic to " + m.format(g) + " has a vertex deep in two cosets";
    }
  }
  rep.results["U"] = U;
  rep.results["L"] = L;
  rep.results["nu_U"] = nu.at(std::int64_t{U});
  rep.results["samples"] = n;
  rep.results["points"] = points;
  rep.results["transition_points"] = transition;
  rep.results["deep_points"] = deep;
  rep.results["multi_deep_points"] = multi;
  rep.add({"deep-coset-unique", "deep-transition-points", violations == 0, true, witness});
}

// --------------------------------------------------------------------- lift

void run_lift(const ExperimentConfig& cfg, ExperimentReport& rep) {
  const Node p(cfg.params, "/params");
  p.only({"samples", "Us", "B", "radius", "pairs", "max_syllables", "max_exp", "mu10", "eps10"});
  const GroupModel m = model_of(cfg);
  const auto n = p.integer_in("samples", 200, 1, 1'000'000);
  const auto Us = p.integers("Us", {1, 2});
  const int ms = static_cast<int>(p.integer_in("max_syllables", 6, 1, 64));
  const int me = static_cast<int>(p.integer_in("max_exp", 6, 1, 1000));
  Rng rng(cfg.seed);
  std::int64_t B = 0;
  bool B_trusted = true;
  if (p.has("B")) {
    B = p.at("B").integer();
  } else {
    // measured: largest projection constant over random coset pairs
    const int radius = static_cast<int>(p.integer_in("radius", 5, 1, 40));
    std::optional<BallLoad> hold;
    const MetricGraph& g = ball_for(cfg, m, radius, hold, rep);
    const auto pairs = p.integer_in("pairs", 10, 1, 1000);
    const auto mu10 = p.integer_in("mu10", 1, 0, 1000), eps10 = p.integer_in("eps10", 1, 0, 1000);
    const auto cs = random_cosets(m, rng, static_cast<std::size_t>(2 * pairs), 2);
    for (std::size_t i = 0; i + 1 < cs.size(); i += 2) {
      const auto ir = interaction_for(g, GraphTarget::exact_coset(g, cs[i]), GraphTarget::exact_coset(g, cs[i + 1]),
                                      {0}, mu10, eps10);
      B = std::max(B, ir.B);
      B_trusted = B_trusted && ir.proj_diam_x_on_xprime.trusted && ir.proj_diam_xprime_on_x.trusted;
    }
  }
  CayleySpace S(m);
  std::map<std::int64_t, std::int64_t> worst;
  bool ok = true, geo_ok = true, iso_ok = true;
  std::string w, geo_w, iso_w;
  std::int64_t used = 0;
  for (std::int64_t s = 0; s < n; ++s) {
    const Element g = random_syllabic(m, rng, ms, me);
    const auto rel = relative_geodesic(m, g);
    const auto last = g.syllables().back().factor;
    std::optional<std::uint32_t> P;
    for (auto f : peripherals(m))
      if (f != last) P = f;
    if (!P) continue;
    ++used;
    const auto X = FactorCoset::of(m, g, *P);
    const auto lift = lift_path(m, rel);
    if (!S.is_quasigeodesic(lift, 1.0, 0.0).ok && geo_ok) {
      geo_ok = false;
      geo_w = "lift of the relative geodesic of " + m.format(g) + " is not a geodesic";
    }
    for (const auto& c : components(m, rel))
      if (!c.isolated && iso_ok) {
        iso_ok = false;
        iso_w = "relative geodesic of " + m.format(g) + " has connected components";
      }
    for (auto U : Us) {
      const auto nd = near_diameter(S, lift, X, U);
      const auto bound = 4 * B * (U + 1) * (U + 1) + 2 * (U + 1);
      auto& wv = worst[U];
      wv = std::max(wv, nd.diam);
      if (nd.diam > bound && ok) {
        ok = false;
        w = m.format(g) + " ending on " + coset_name(m, X) + ", U = " + std::to_string(U) + ": diameter " +
            std::to_string(nd.diam) + " > " + std::to_string(bound);
      }
    }
  }
  ojson rows = ojson::array();
  CsvTable table{{"U", "max_diameter", "bound"}};
  for (const auto& [U, d] : worst) {
    const auto bound = 4 * B * (U + 1) * (U + 1) + 2 * (U + 1);
    rows.push_back({{"U", U}, {"max_diameter", d}, {"bound", bound}});
    table.push_back({std::to_string(U), std::to_string(d), std::to_string(bound)});
  }
  rep.results["B"] = B;
  rep.results["B_trusted"] = B_trusted;
  rep.results["samples_used"] = used;
  rep.results["table"] = rows;
  rep.tables["lift"] = table;
  rep.add({"lift-orthogonality", "relative-geodesic-orthogonality", ok, B_trusted, w});
  rep.add({"lift-geodesic", "lift-quasigeodesic", geo_ok, true, geo_w});
  rep.add({"components-isolated", "isolated-components", iso_ok, true, iso_w});
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.kind = cfg.kind;
  rep.inputs = ojson{{"kind", cfg.kind}, {"seed", cfg.seed}};
  if (!cfg.model.is_null()) rep.inputs["model"] = ojson::parse(cfg.model.dump());
  rep.inputs["params"] = ojson::parse(cfg.params.dump());
  rep.results = ojson::object();
  try {
    if (cfg.kind == "contract") run_contract(cfg, rep);
    else if (cfg.kind == "quasiconvex") run_quasiconvex(cfg, rep);
    else if (cfg.kind == "interaction") run_interaction(cfg, rep);
    else if (cfg.kind == "constants") run_constants(cfg, rep);
    else if (cfg.kind == "admissible-mc") run_admissible_mc(cfg, rep);
    else if (cfg.kind == "amalgam") run_amalgam(cfg, rep);
    else if (cfg.kind == "hnn") run_hnn(cfg, rep);
    else if (cfg.kind == "transition") run_transition(cfg, rep);
    else if (cfg.kind == "lift") run_lift(cfg, rep);
    else Node::fail("/kind", "unknown experiment kind '" + cfg.kind + "'");
  } catch (const ResourceError& e) {
    rep.resource_exhausted = true;
    rep.resource_note = e.what();
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace coarsegeo
