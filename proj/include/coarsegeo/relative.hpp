#pragma once

#include <cstdint>
#include <vector>

#include "coarsegeo/cayley_space.hpp"
#include "coarsegeo/group_model.hpp"
#include "coarsegeo/subgroup.hpp"

namespace coarsegeo {

struct Conjugacy {
  bool trivial = false;
  bool parabolic = false;
  // Set when parabolic: w = conjugator * core * conjugator^-1 with core a
  // single syllable of a peripheral factor.
  std::uint32_t factor = 0;
  Element conjugator;
  Element core;
  // Syllable count after cyclic reduction.
  std::size_t cyclic_syllables = 0;
};

// Cyclically reduces the syllable form. Parabolic iff what remains is one
// syllable of a peripheral factor; a free group has no peripheral factors,
// so every nontrivial element is hyperbolic there.
Conjugacy classify_hyperbolic(const GroupModel& model, const Element& w);

// A path in the relative Cayley graph: one edge per factor element. Edges
// need not alternate; adjacent same-factor edges belong to one component.
struct RelativePath {
  Element start;
  std::vector<Syllable> edges;

  std::vector<Element> vertices(const GroupModel& model) const;
  Element end(const GroupModel& model) const;
};

struct RelComponent {
  std::size_t first_edge = 0;
  std::size_t last_edge = 0;  // inclusive
  std::uint32_t factor = 0;
  Syllable label;  // product of the edges; may be trivial
  FactorCoset coset;
  bool isolated = true;
};

// One relative edge per syllable of g: a relative geodesic from `start`.
RelativePath relative_geodesic(const GroupModel& model, const Element& g, const Element& start);
RelativePath relative_geodesic(const GroupModel& model, const Element& g);

// Maximal same-factor runs of edges. For free groups every factor is a
// component factor (the Cayley graph is its own relative graph).
std::vector<RelComponent> components(const GroupModel& model, const RelativePath& rel);

// Each component replaced by the normal-form geodesic of its label.
CayleyPath lift_path(const GroupModel& model, const RelativePath& rel);

}  // namespace coarsegeo
