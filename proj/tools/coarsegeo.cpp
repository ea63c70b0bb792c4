// coarsegeo: run experiments, build cached balls, diff reports.
//
//   coarsegeo run <config> [--seed N] [--set params.key=json ...] [--json out] [--csv dir] [--no-cache]
//   coarsegeo ball --model <file> --radius N
//   coarsegeo report --diff a.json b.json
//
// Exit codes: 0 all conditions passed, 1 violation, 2 inconclusive or error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "coarsegeo/ball_cache.hpp"
#include "coarsegeo/errors.hpp"
#include "coarsegeo/harness.hpp"

namespace {

constexpr int kExitInconclusive = 2;

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw coarsegeo::ConfigError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw coarsegeo::ConfigError(path + ": invalid JSON: " + e.what());
  }
  return j;
}

// "params.samples=500" sets j["params"]["samples"] = 500. The value is read
// as JSON, falling back to a plain string.
void apply_override(nlohmann::json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw coarsegeo::ConfigError("--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    value = text;
  }
  if (value.is_object() || value.is_array())
    throw coarsegeo::ConfigError("--set " + key + ": only scalars can be overridden");
  std::string ptr = "/" + key;
  for (auto& ch : ptr)
    if (ch == '.') ch = '/';
  j[nlohmann::json::json_pointer(ptr)] = value;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& sets, const std::optional<std::int64_t>& seed,
            const std::string& json_out, const std::string& csv_dir, bool no_cache) {
  nlohmann::json j = read_json(config_path);
  for (const auto& s : sets) apply_override(j, s);
  if (seed) j["seed"] = *seed;
  const auto base = std::filesystem::path(config_path).parent_path();
  auto cfg = coarsegeo::ExperimentConfig::from_json(j, base.empty() ? "." : base.string());
  if (!json_out.empty()) cfg.json_out = json_out;
  if (!csv_dir.empty()) cfg.csv_dir = csv_dir;
  if (no_cache) cfg.use_cache = false;

  const auto report = coarsegeo::run_experiment(cfg);
  if (cfg.json_out) coarsegeo::emit_report(report, *cfg.json_out, cfg.csv_dir);
  else std::cout << coarsegeo::dump_report(report);

  for (const auto& c : report.conditions) {
    std::cerr << (c.ok ? "ok  " : "FAIL") << (c.trusted ? "  " : "? ") << c.name << " [" << c.anchor << "]";
    if (!c.witness.empty()) std::cerr << "  " << c.witness;
    std::cerr << "\n";
  }
  if (report.resource_exhausted) std::cerr << "resource limit: " << report.resource_note << "\n";
  std::cerr << "verdict: " << report.verdict() << " (" << report.wall_seconds << " s)\n";
  return report.exit_code();
}

int cmd_ball(const std::string& model_path, int radius, bool no_cache) {
  const auto model = coarsegeo::GroupModel::from_file(model_path);
  const auto load = coarsegeo::load_or_build_ball(model, radius, !no_cache);
  nlohmann::ordered_json out{{"model", model.name()},
                             {"radius", radius},
                             {"vertices", load.graph.size()},
                             {"edges", load.graph.num_edges()},
                             {"sphere_sizes", load.graph.sphere_sizes()},
                             {"from_cache", load.from_cache},
                             {"cache_path", load.path}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_diff(const std::vector<std::string>& files) {
  const auto a = read_json(files[0]);
  const auto b = read_json(files[1]);
  // wall time lives in the sidecar, so reports compare whole
  const auto lines = coarsegeo::diff_json(a, b);
  for (const auto& l : lines) std::cout << l << "\n";
  if (lines.empty()) {
    std::cout << "identical\n";
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coarsegeo: computational checks for contracting subsets and combination theorems"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment config and emit its report");
  std::string config_path, json_out, csv_dir;
  std::vector<std::string> sets;
  std::int64_t seed_value = 0;
  bool no_cache = false;
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  auto* seed_opt = run->add_option("--seed", seed_value, "Override the config seed")->check(CLI::NonNegativeNumber);
  run->add_option("--set", sets, "Override a scalar, e.g. params.samples=500");
  run->add_option("--json", json_out, "Report path (default: config output.json, else stdout)");
  run->add_option("--csv", csv_dir, "Directory for CSV tables");
  run->add_flag("--no-cache", no_cache, "Do not read or write the ball cache");

  auto* ball = app.add_subcommand("ball", "Build (or load) a cached Cayley ball and print its statistics");
  std::string model_path;
  int radius = 0;
  ball->add_option("--model", model_path, "Group model (JSON)")->required()->check(CLI::ExistingFile);
  ball->add_option("--radius", radius, "Ball radius")->required()->check(CLI::Range(0, 64));
  ball->add_flag("--no-cache", no_cache, "Do not read or write the ball cache");

  auto* report = app.add_subcommand("report", "Compare two reports");
  std::vector<std::string> diff;
  report->add_option("--diff", diff, "Two report files")->required()->expected(2)->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInconclusive;
  }

  try {
    if (*run) {
      std::optional<std::int64_t> seed;
      if (seed_opt->count()) seed = seed_value;
      return cmd_run(config_path, sets, seed, json_out, csv_dir, no_cache);
    }
    if (*ball) return cmd_ball(model_path, radius, no_cache);
    if (*report) return cmd_diff(diff);
  } catch (const coarsegeo::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const coarsegeo::FixtureError& e) {
    std::cerr << "error: fixture rejected: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitInconclusive;
}
