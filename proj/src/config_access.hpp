#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coarsegeo/errors.hpp"

namespace coarsegeo::detail {

// Read-only view of a JSON object that reports errors with their path.
class Node {
 public:
  Node(const nlohmann::json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const nlohmann::json& raw() const { return *j_; }
  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

  Node at(const std::string& key) const {
    if (!j_->is_object()) fail(path_, "expected an object");
    if (!j_->contains(key)) fail(path_ + "/" + key, "required key missing");
    return Node(j_->at(key), path_ + "/" + key);
  }
  Node at(std::size_t i) const {
    if (!j_->is_array()) fail(path_, "expected an array");
    if (i >= j_->size()) fail(path_ + "/" + std::to_string(i), "index out of range");
    return Node((*j_)[i], path_ + "/" + std::to_string(i));
  }
  std::size_t size() const {
    if (!j_->is_array()) fail(path_, "expected an array");
    return j_->size();
  }

  std::int64_t integer() const {
    if (!j_->is_number_integer()) fail(path_, "expected an integer");
    return j_->get<std::int64_t>();
  }
  double number() const {
    if (!j_->is_number()) fail(path_, "expected a number");
    return j_->get<double>();
  }
  std::string str() const {
    if (!j_->is_string()) fail(path_, "expected a string");
    return j_->get<std::string>();
  }
  bool boolean() const {
    if (!j_->is_boolean()) fail(path_, "expected true or false");
    return j_->get<bool>();
  }

  std::int64_t integer(const std::string& key, std::int64_t def) const { return has(key) ? at(key).integer() : def; }
  std::int64_t integer_in(const std::string& key, std::int64_t def, std::int64_t lo, std::int64_t hi) const {
    const auto v = integer(key, def);
    if (v < lo || v > hi)
      fail(path_ + "/" + key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }
  double number(const std::string& key, double def) const { return has(key) ? at(key).number() : def; }
  std::string str(const std::string& key, const std::string& def) const { return has(key) ? at(key).str() : def; }
  bool boolean(const std::string& key, bool def) const { return has(key) ? at(key).boolean() : def; }

  std::vector<std::int64_t> integers(const std::string& key, std::vector<std::int64_t> def) const {
    if (!has(key)) return def;
    const Node a = at(key);
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a.at(i).integer());
    return out;
  }

  // Keys outside `allowed` are rejected.
  void only(std::initializer_list<const char*> allowed) const {
    if (!j_->is_object()) fail(path_, "expected an object");
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      bool known = false;
      for (const char* a : allowed) known = known || it.key() == a;
      if (!known) fail(path_ + "/" + it.key(), "unknown key");
    }
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& why) {
    throw ConfigError("config " + (path.empty() ? std::string("/") : path) + ": " + why);
  }

 private:
  const nlohmann::json* j_;
  std::string path_;
};

}  // namespace coarsegeo::detail
