// Acceptance suite: runs the ten criteria on the shipped configs and prints
// one PASS/FAIL line per criterion. Exit status is nonzero only when a
// criterion fails that is not listed as a known failure.
//
//   coarsegeo_acceptance [configs dir]

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "coarsegeo/constants.hpp"
#include "coarsegeo/harness.hpp"

#ifndef COARSEGEO_CONFIG_DIR
#define COARSEGEO_CONFIG_DIR "configs"
#endif

using namespace coarsegeo;
using json = nlohmann::ordered_json;

namespace {

// Pinned tolerances and budgets.
constexpr std::int64_t kTreeProjectionMax = 1;
constexpr double kTreeRuntimeSeconds = 30.0;
constexpr std::size_t kMinCosetPairs = 10;
constexpr std::int64_t kMaxU = 2;
constexpr std::int64_t kMinDecompositions = 500;
constexpr double kMonteCarloRuntimeSeconds = 600.0;
constexpr std::int64_t kWorkedA = 4, kWorkedC = 6, kWorkedB = 20;
constexpr std::int64_t kF2Syllables = 6, kZ2Z2Syllables = 4;
constexpr std::int64_t kLiftSamples = 200;
constexpr double kHnnRuntimeSeconds = 900.0;
constexpr std::int64_t kHnnMaxT = 3, kHnnHLength = 3;

// Criterion 4 asks for (Lambda, 0) on every subpath. Admissible paths can
// revisit a vertex two steps later (a one-edge q inside the next target
// followed by a p turning back, or a spike inside a (1, 2) piece); a
// subpath with equal endpoints satisfies no (Lambda, 0) bound. The failure
// counts as known only if every violation is such a closed loop and the
// whole-path bound, fellow travelling and the sample budget all hold.
constexpr const char* kKnownFailure4 =
    "(Lambda, 0) fails only on closed two-step subpaths; whole-path length bound, fellow travelling and "
    "projection bound hold on every path";

struct Run {
  ExperimentReport report;
  json body;
  std::string bytes;
  std::string config;
};

struct Outcome {
  bool pass = false;
  std::string detail;
  bool known_failure = false;
};

class Suite {
 public:
  explicit Suite(std::string dir) : dir_(std::move(dir)) {}

  const Run& run(const std::string& name) {
    auto it = runs_.find(name);
    if (it != runs_.end()) return it->second;
    const auto cfg = ExperimentConfig::from_file(dir_ + "/" + name);
    Run r;
    r.config = name;
    r.report = run_experiment(cfg);
    r.bytes = dump_report(r.report);
    r.body = json::parse(r.bytes);
    return runs_.emplace(name, std::move(r)).first->second;
  }

  // Re-runs every config used so far and compares serialisations.
  Outcome rerun_all() {
    Outcome o{true, "", false};
    std::size_t n = 0;
    for (const auto& [name, first] : runs_) {
      const auto again = dump_report(run_experiment(ExperimentConfig::from_file(dir_ + "/" + name)));
      ++n;
      if (again != first.bytes) {
        o.pass = false;
        o.detail += name + " differs; ";
      }
    }
    if (o.pass) o.detail = std::to_string(n) + " configs re-run, all byte-identical";
    return o;
  }

 private:
  std::string dir_;
  std::map<std::string, Run> runs_;
};

bool all_conditions(const Run& r, std::string& why) {
  for (const auto& c : r.report.conditions) {
    if (!c.ok) {
      why += r.config + ": " + c.name + " failed (" + c.witness + "); ";
      return false;
    }
    if (!c.trusted) {
      why += r.config + ": " + c.name + " untrusted; ";
      return false;
    }
  }
  if (r.report.resource_exhausted) {
    why += r.config + ": resource limit: " + r.report.resource_note + "; ";
    return false;
  }
  return true;
}

const ConditionEntry* cond(const Run& r, const std::string& name) { return r.report.find(name); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", x);
  return buf;
}

Outcome tree_contraction(Suite& s) {
  const auto& r = s.run("contract_f2.json");
  std::string why;
  bool ok = all_conditions(r, why);
  const auto& p = r.body["inputs"]["params"];
  ok = ok && p["radius"] == 7 && p["mode"] == "geodesics";
  std::int64_t worst = 0;
  for (const auto& row : r.body["results"]["table"]) worst = std::max(worst, row["max_projection_diameter"].get<std::int64_t>());
  ok = ok && worst <= kTreeProjectionMax && r.report.wall_seconds < kTreeRuntimeSeconds;
  return {ok, why + "max projection diameter " + std::to_string(worst) + " over " +
                  std::to_string(r.body["results"]["far_samples"].get<std::int64_t>()) + " far geodesics, " +
                  fmt(r.report.wall_seconds) + " s",
          false};
}

Outcome sigma_bound(Suite& s) {
  std::string why;
  bool ok = true;
  std::size_t rows = 0, pairs = 0;
  for (const char* name : {"quasiconvex_f2.json", "quasiconvex_z2z2.json"}) {
    const auto& r = s.run(name);
    ok = all_conditions(r, why) && ok;
    ok = ok && r.body["inputs"]["params"]["radius"] == 6;
    for (const auto& row : r.body["results"]["table"]) {
      ++rows;
      pairs += row["pairs"].get<std::size_t>();
      ok = ok && row["ok"].get<bool>() && row["U"].get<std::int64_t>() <= kMaxU;
    }
  }
  return {ok, why + std::to_string(rows) + " (target, U) cells, " + std::to_string(pairs) + " endpoint pairs, 0 escapes",
          false};
}

Outcome interaction(Suite& s) {
  const auto& r = s.run("interaction_z2z2.json");
  std::string why;
  bool ok = all_conditions(r, why);
  const auto& pairs = r.body["results"]["pairs"];
  ok = ok && pairs.size() >= kMinCosetPairs;
  for (const auto& p : pairs)
    for (const auto& u : p["per_U"]) {
      ok = ok && u["U"].get<std::int64_t>() <= kMaxU && u["nu"].get<std::int64_t>() <= u["predicted_nu"].get<std::int64_t>();
    }
  for (const auto& p : pairs) ok = ok && p["B"].get<std::int64_t>() <= p["predicted_B"].get<std::int64_t>();
  return {ok, why + std::to_string(pairs.size()) + " coset pairs, both conversions hold", false};
}

Outcome admissible_mc(Suite& s) {
  const auto& r = s.run("admissible_mc_f2.json");
  std::int64_t accepted = 0, qg = 0, loops = 0, length = 0, fellow = 0;
  for (const auto& c : r.body["results"]["classes"]) {
    accepted += c["accepted"].get<std::int64_t>();
    qg += c["quasigeodesic_failures"].get<std::int64_t>();
    loops += c["quasigeodesic_failures_at_closed_loops"].get<std::int64_t>();
    length += c["length_bound_failures"].get<std::int64_t>();
    fellow += c["fellow_failures"].get<std::int64_t>();
  }
  const auto* q = cond(r, "admissible-quasigeodesic");
  const auto* f = cond(r, "fellow-traveller");
  const bool budget = accepted >= kMinDecompositions && r.report.wall_seconds < kMonteCarloRuntimeSeconds;
  const bool pass = q && q->ok && q->trusted && f && f->ok && f->trusted && budget && !r.report.resource_exhausted;
  std::string detail = std::to_string(accepted) + " decompositions, " + std::to_string(qg) + " (Lambda, 0) failures (" +
                       std::to_string(loops) + " at closed loops), " + std::to_string(length) +
                       " length-bound failures, " + std::to_string(fellow) + " fellow-traveller failures, " +
                       fmt(r.report.wall_seconds) + " s";
  const auto* lb = cond(r, "admissible-length-bound");
  const auto* pr = cond(r, "near-target-projection");
  const bool known = !pass && budget && qg == loops && length == 0 && fellow == 0 && f && f->ok && lb && lb->ok &&
                     pr && pr->ok;
  if (known) detail += "; known: " + std::string(kKnownFailure4);
  return {pass, detail, known};
}

Outcome constants(Suite& s) {
  const auto& r = s.run("constants_worked.json");
  std::string why;
  bool ok = all_conditions(r, why);
  const auto& k = r.body["results"]["constants"];
  const auto A = k["A"].get<std::int64_t>(), C = k["C"].get<std::int64_t>(), B = k["B"].get<std::int64_t>();
  const auto R = k["R"].get<std::int64_t>(), L = k["Lambda"].get<std::int64_t>();
  const auto lambda = k["lambda"].get<std::int64_t>(), c = k["c"].get<std::int64_t>();
  ok = ok && A == kWorkedA && C == kWorkedC && B == kWorkedB && L == lambda * (6 * R + 1) + 3 * c;
  return {ok, why + "A=" + std::to_string(A) + " C=" + std::to_string(C) + " B=" + std::to_string(B) +
                  " R=" + std::to_string(R) + " Lambda=" + std::to_string(L),
          false};
}

Outcome amalgam(Suite& s) {
  std::string why, detail;
  bool ok = true;
  for (auto [name, syll] : {std::pair{"amalgam_f2.json", kF2Syllables}, std::pair{"amalgam_z2z2.json", kZ2Z2Syllables}}) {
    const auto& r = s.run(name);
    for (const char* c : {"amalgam-injective", "normal-path-admissible", "normal-path-quasigeodesic"}) {
      const auto* e = cond(r, c);
      ok = ok && e && e->ok && e->trusted;
      if (e && !e->ok) why += std::string(name) + ": " + c + " (" + e->witness + "); ";
    }
    const auto& rep = r.body["results"]["report"];
    const auto D = r.body["results"]["constants"]["D"].get<std::int64_t>();
    ok = ok && r.body["inputs"]["params"]["max_syllables"].get<std::int64_t>() == syll &&
         rep["collisions"] == 0 && rep["trivial"] == 0 && rep["quasigeodesic_failures"] == 0 &&
         rep["min_syllable_length"].get<std::int64_t>() > D && !r.report.resource_exhausted;
    detail += (detail.empty() ? "" : "; ") + std::string(name) + ": " + std::to_string(rep["words"].get<std::int64_t>()) + " words, 0 collisions";
  }
  return {ok, why + detail, false};
}

Outcome parabolic(Suite& s) {
  std::string why;
  bool ok = true;
  std::int64_t words = 0;
  for (const char* name : {"amalgam_f2.json", "amalgam_z2z2.json"}) {
    const auto& r = s.run(name);
    const auto* e = cond(r, "cyclic-words-hyperbolic");
    ok = ok && e && e->ok && e->trusted;
    const auto& rep = r.body["results"]["report"];
    ok = ok && rep["parabolic_misclassified"] == 0;
    words += rep["cyclically_long_words"].get<std::int64_t>();
  }
  ok = ok && words > 0;
  return {ok, why + std::to_string(words) + " cyclically long words, 0 parabolic", false};
}

Outcome lift(Suite& s) {
  const auto& r = s.run("lift_z2z2.json");
  std::string why;
  bool ok = all_conditions(r, why);
  ok = ok && r.body["inputs"]["params"]["samples"].get<std::int64_t>() == kLiftSamples &&
       r.body["results"]["samples_used"].get<std::int64_t>() == kLiftSamples;
  std::string detail = "B=" + std::to_string(r.body["results"]["B"].get<std::int64_t>());
  for (const auto& row : r.body["results"]["table"]) {
    ok = ok && row["max_diameter"].get<std::int64_t>() <= row["bound"].get<std::int64_t>();
    detail += ", U=" + std::to_string(row["U"].get<std::int64_t>()) + ": " +
              std::to_string(row["max_diameter"].get<std::int64_t>()) + " <= " +
              std::to_string(row["bound"].get<std::int64_t>());
  }
  return {ok, why + detail, false};
}

Outcome hnn(Suite& s) {
  const auto& r = s.run("hnn_z2z2.json");
  std::string why;
  bool ok = all_conditions(r, why);
  const auto& p = r.body["inputs"]["params"];
  const auto& th = r.body["results"]["threshold"];
  const auto& rep = r.body["results"]["report"];
  ok = ok && p["max_t"].get<std::int64_t>() == kHnnMaxT && p["h_length"].get<std::int64_t>() == kHnnHLength &&
       r.body["results"]["N"].get<std::int64_t>() >= th["N"].get<std::int64_t>() && rep["ok"].get<bool>() &&
       rep["checked_paths"] == rep["words"] && r.report.wall_seconds < kHnnRuntimeSeconds;
  return {ok, why + "N=" + std::to_string(r.body["results"]["N"].get<std::int64_t>()) + ", " +
                  std::to_string(rep["words"].get<std::int64_t>()) + " reduced words, all distinct, " +
                  fmt(r.report.wall_seconds) + " s",
          false};
}

}  // namespace

int main(int argc, char** argv) {
  Suite suite(argc > 1 ? argv[1] : COARSEGEO_CONFIG_DIR);
  const std::vector<std::pair<const char*, std::function<Outcome(Suite&)>>> criteria{
      {"tree contraction", tree_contraction},
      {"quasiconvexity bound", sigma_bound},
      {"intersection/projection conversions", interaction},
      {"admissible Monte Carlo", admissible_mc},
      {"constants pipeline", constants},
      {"amalgam desk instance", amalgam},
      {"parabolic classification", parabolic},
      {"lift orthogonality", lift},
      {"HNN desk instance", hnn},
      {"determinism", [](Suite& s) { return s.rerun_all(); }},
  };
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second(suite);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what(), false};
    }
    std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << (o.known_failure ? " (known)" : "")
              << "  " << criteria[i].first << ": " << o.detail << std::endl;
    if (!o.pass && !o.known_failure) ++unexpected;
  }
  std::cout << (unexpected == 0 ? "acceptance: no unexpected failures" : "acceptance: unexpected failures") << std::endl;
  return unexpected == 0 ? 0 : 1;
}
