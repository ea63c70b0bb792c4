#include "coarsegeo/harness.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "config_access.hpp"
#include "coarsegeo/errors.hpp"

namespace coarsegeo {

namespace fs = std::filesystem;

const ConditionEntry* ExperimentReport::find(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return &c;
  return nullptr;
}

int ExperimentReport::exit_code() const {
  bool untrusted = resource_exhausted;
  for (const auto& c : conditions) {
    if (!c.ok && c.trusted) return 1;
    if (!c.trusted) untrusted = true;
  }
  return untrusted ? 2 : 0;
}

std::string ExperimentReport::verdict() const {
  switch (exit_code()) {
    case 0: return "pass";
    case 1: return "violation";
    default: return "inconclusive";
  }
}

nlohmann::ordered_json ExperimentReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = kind;
  j["inputs"] = inputs;
  j["results"] = results.is_null() ? nlohmann::ordered_json::object() : results;
  auto cs = nlohmann::ordered_json::array();
  for (const auto& c : conditions)
    cs.push_back({{"condition", c.name}, {"anchor", c.anchor}, {"ok", c.ok}, {"trusted", c.trusted},
                  {"witness", c.witness}});
  j["conditions"] = cs;
  j["resource_exhausted"] = resource_exhausted;
  if (resource_exhausted) j["resource_note"] = resource_note;
  j["verdict"] = verdict();
  return j;
}

std::string dump_report(const ExperimentReport& r) { return r.to_json().dump(2) + "\n"; }

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, const std::string& base_dir) {
  const detail::Node root(j, "");
  root.only({"kind", "seed", "model", "model_file", "params", "output", "cache"});
  ExperimentConfig c;
  c.kind = root.at("kind").str();
  static const char* kinds[] = {"contract", "quasiconvex", "interaction", "constants", "admissible-mc",
                                "amalgam",  "hnn",         "transition",  "lift"};
  bool known = false;
  for (const char* k : kinds) known = known || c.kind == k;
  if (!known) detail::Node::fail("/kind", "unknown experiment kind '" + c.kind + "'");
  if (root.has("seed")) {
    const auto s = root.at("seed").integer();
    if (s < 0) detail::Node::fail("/seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (root.has("model") && root.has("model_file")) detail::Node::fail("/model_file", "give model or model_file, not both");
  if (root.has("model")) {
    if (!j.at("model").is_object()) detail::Node::fail("/model", "expected an object");
    c.model = j.at("model");
  } else if (root.has("model_file")) {
    fs::path p = root.at("model_file").str();
    if (p.is_relative()) p = fs::path(base_dir) / p;
    std::ifstream in(p);
    if (!in) detail::Node::fail("/model_file", "cannot open " + p.string());
    try {
      in >> c.model;
    } catch (const nlohmann::json::exception& e) {
      detail::Node::fail("/model_file", std::string("invalid JSON: ") + e.what());
    }
  }
  c.params = root.has("params") ? j.at("params") : nlohmann::json::object();
  if (!c.params.is_object()) detail::Node::fail("/params", "expected an object");
  if (root.has("output")) {
    const auto out = root.at("output");
    out.only({"json", "csv_dir"});
    auto resolve = [&](const std::string& s) {
      fs::path p = s;
      return p.is_relative() ? (fs::path(base_dir) / p).string() : p.string();
    };
    if (out.has("json")) c.json_out = resolve(out.at("json").str());
    if (out.has("csv_dir")) c.csv_dir = resolve(out.at("csv_dir").str());
  }
  c.use_cache = root.boolean("cache", true);
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path + ": invalid JSON: " + e.what());
  }
  const auto base = fs::path(path).parent_path();
  return from_json(j, base.empty() ? "." : base.string());
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move report into place at " + path + ": " + ec.message());
  }
}

std::string to_csv(const CsvTable& t) {
  std::ostringstream os;
  for (const auto& row : t) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      const auto& cell = row[i];
      if (cell.find_first_of(",\"\n") != std::string::npos) {
        os << '"';
        for (char ch : cell) os << (ch == '"' ? "\"\"" : std::string(1, ch));
        os << '"';
      } else {
        os << cell;
      }
    }
    os << '\n';
  }
  return os.str();
}

void emit_report(const ExperimentReport& r, const std::string& json_path, const std::optional<std::string>& csv_dir) {
  write_file_atomic(json_path, dump_report(r));
  nlohmann::ordered_json timing{{"kind", r.kind}, {"wall_seconds", r.wall_seconds}};
  write_file_atomic(json_path + ".timing.json", timing.dump(2) + "\n");
  if (csv_dir)
    for (const auto& [name, table] : r.tables) write_file_atomic((fs::path(*csv_dir) / (name + ".csv")).string(), to_csv(table));
}

namespace {

void diff_rec(const nlohmann::json& a, const nlohmann::json& b, const std::string& path, std::vector<std::string>& out) {
  if (a.type() != b.type()) {
    out.push_back((path.empty() ? "/" : path) + ": " + a.dump() + " -> " + b.dump());
    return;
  }
  if (a.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key())) out.push_back(path + "/" + it.key() + ": " + it.value().dump() + " -> (absent)");
      else diff_rec(it.value(), b.at(it.key()), path + "/" + it.key(), out);
    }
    for (auto it = b.begin(); it != b.end(); ++it)
      if (!a.contains(it.key())) out.push_back(path + "/" + it.key() + ": (absent) -> " + it.value().dump());
    return;
  }
  if (a.is_array()) {
    const std::size_t n = std::max(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      const std::string p = path + "/" + std::to_string(i);
      if (i >= a.size()) out.push_back(p + ": (absent) -> " + b[i].dump());
      else if (i >= b.size()) out.push_back(p + ": " + a[i].dump() + " -> (absent)");
      else diff_rec(a[i], b[i], p, out);
    }
    return;
  }
  if (a != b) out.push_back((path.empty() ? "/" : path) + ": " + a.dump() + " -> " + b.dump());
}

}  // namespace

std::vector<std::string> diff_json(const nlohmann::json& a, const nlohmann::json& b) {
  std::vector<std::string> out;
  diff_rec(a, b, "", out);
  return out;
}

}  // namespace coarsegeo
