#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coarsegeo/group_model.hpp"
#include "coarsegeo/quasigeodesic.hpp"
#include "coarsegeo/subgroup.hpp"

namespace coarsegeo {

struct LetterRun {
  Letter letter;
  std::int64_t count = 0;
};

// A path in the full Cayley graph, stored as runs of one repeated letter.
// Vertices are materialised on demand, so paths of length in the tens of
// thousands cost a few bytes per run. Holds a pointer to its model, which
// must outlive the path.
class CayleyPath {
 public:
  CayleyPath() = default;
  CayleyPath(const GroupModel& model, Element start);
  // Normal-form geodesic from `from` to `to` (lowest generator first).
  static CayleyPath geodesic(const GroupModel& model, const Element& from, const Element& to);
  static CayleyPath from_word(const GroupModel& model, Element start, std::span<const Letter> word);

  std::size_t size() const { return static_cast<std::size_t>(length_) + 1; }
  std::int64_t length() const { return length_; }
  Element operator[](std::size_t i) const;
  const Element& front() const { return start_; }
  const Element& back() const { return end_; }
  const GroupModel& model() const { return *model_; }
  const std::vector<LetterRun>& runs() const { return runs_; }

  void append(Letter l, std::int64_t count = 1);
  void append_word(std::span<const Letter> word);
  // Appends the normal-form geodesic from back() to back() * g.
  void append_geodesic(const Element& g);
  // Requires other.front() == back().
  void append(const CayleyPath& other);
  CayleyPath subpath(std::size_t i, std::size_t j) const;
  CayleyPath reversed() const;

 private:
  const GroupModel* model_ = nullptr;
  Element start_;
  Element end_;
  std::vector<LetterRun> runs_;
  std::vector<Element> run_start_;
  std::vector<std::int64_t> offset_;  // index of the first vertex of each run
  std::int64_t length_ = 0;
};

// Exact metric space of a free product of free abelian groups; targets are
// cosets of factor subgroups. Distinct factor cosets always have bounded
// coarse intersection in these models (their neighbourhoods meet in a set of
// diameter about 2U, measured separately as nu).
class CayleySpace {
 public:
  using Point = Element;
  using Path = CayleyPath;
  using Target = FactorCoset;

  explicit CayleySpace(const GroupModel& model) : model_(&model) {}
  const GroupModel& model() const { return *model_; }

  std::int64_t distance(const Element& x, const Element& y) const { return model_->distance(x, y); }
  bool contains(const Target& X, const Element& v) const { return coset_contains(*model_, X, v); }
  std::int64_t distance_to(const Target& X, const Element& v) const {
    return coset_projection(*model_, X, v).distance;
  }
  std::vector<Element> project(const Target& X, const Element& v, std::int64_t delta) const {
    return coset_project(*model_, X, v, delta);
  }
  bool same_target(const Target& a, const Target& b) const { return a == b; }
  bool bounded_intersection(const Target& a, const Target& b) const { return !(a == b); }
  std::int64_t diam(std::span<const Element> pts) const;

  Path trivial_path(const Element& x) const { return CayleyPath(*model_, x); }
  Path geodesic(const Element& x, const Element& y) const { return CayleyPath::geodesic(*model_, x, y); }
  Path concat(std::span<const Path* const> pieces) const;
  QuasigeodesicVerdict is_quasigeodesic(const Path& p, double lambda, double c) const;
  double fit_c(const Path& p, double lambda) const;

 private:
  const GroupModel* model_;
};

}  // namespace coarsegeo
