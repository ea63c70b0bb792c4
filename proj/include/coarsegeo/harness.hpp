#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace coarsegeo {

inline constexpr int kReportSchemaVersion = 1;

// One checked condition. `anchor` names the statement being tested.
struct ConditionEntry {
  std::string name;
  std::string anchor;
  bool ok = true;
  bool trusted = true;
  std::string witness;  // required when !ok
};

using CsvTable = std::vector<std::vector<std::string>>;  // first row is the header

struct ExperimentReport {
  std::string kind;
  nlohmann::ordered_json inputs;
  nlohmann::ordered_json results;
  std::vector<ConditionEntry> conditions;
  std::map<std::string, CsvTable> tables;
  bool resource_exhausted = false;
  std::string resource_note;
  double wall_seconds = 0.0;  // kept out of the JSON body

  void add(ConditionEntry c) { conditions.push_back(std::move(c)); }
  const ConditionEntry* find(const std::string& name) const;
  // 1 if a trusted condition failed, else 2 if anything is untrusted or a
  // resource limit was hit, else 0.
  int exit_code() const;
  std::string verdict() const;
  nlohmann::ordered_json to_json() const;
};

struct ExperimentConfig {
  std::string kind;
  std::uint64_t seed = 1;
  nlohmann::json model;   // group model spec
  nlohmann::json params;  // kind-specific
  std::optional<std::string> json_out;
  std::optional<std::string> csv_dir;
  bool use_cache = true;

  // Validates the common schema; kind-specific keys are validated when the
  // experiment runs. Errors carry a JSON path.
  static ExperimentConfig from_json(const nlohmann::json& j, const std::string& base_dir = ".");
  static ExperimentConfig from_file(const std::string& path);
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

// JSON at json_path (atomic rename), one CSV per table in csv_dir, and the
// wall time in json_path + ".timing.json".
void emit_report(const ExperimentReport& r, const std::string& json_path, const std::optional<std::string>& csv_dir);
void write_file_atomic(const std::string& path, const std::string& content);
std::string to_csv(const CsvTable& t);
// Canonical serialisation used for files and determinism checks.
std::string dump_report(const ExperimentReport& r);

// Leaf-level differences as "path: a -> b" lines.
std::vector<std::string> diff_json(const nlohmann::json& a, const nlohmann::json& b);

}  // namespace coarsegeo
