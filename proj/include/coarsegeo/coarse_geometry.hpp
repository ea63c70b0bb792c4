#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coarsegeo/graph_space.hpp"
#include "coarsegeo/metric_graph.hpp"
#include "coarsegeo/rates.hpp"
#include "coarsegeo/subgroup.hpp"

namespace coarsegeo {

struct TaggedPath {
  PathSeq path;
  double lambda = 1.0;
  double c = 0.0;
};

// ---------------------------------------------------------------- contraction

struct ContractWitness {
  VertexId from = kNoVertex;
  VertexId to = kNoVertex;
  Bucket bucket;
  std::int64_t proj_diam = 0;
};

struct ContractingReport {
  bool held = true;  // every far sample stayed below the supplied epsilon
  RateFunction epsilon;  // per-bucket max projection diameter + 1
  std::map<Bucket, std::int64_t> max_proj_diam;
  std::size_t samples = 0;
  std::size_t far_samples = 0;
  bool trusted = true;
  std::vector<ContractWitness> witnesses;  // violations, or the worst sample per bucket
};

ContractingReport check_contracting(const MetricGraph& g, const GraphTarget& X, std::span<const TaggedPath> samples,
                                    const RateFunction& mu, const RateFunction* epsilon_bound = nullptr);

// The (1,0) class sampled exhaustively: for every ordered pair (u, v) the
// geodesic a_geodesic(v, u). Streams over BFS trees, so no path is stored.
ContractingReport check_contracting_geodesics(const MetricGraph& g, const GraphTarget& X, const RateFunction& mu,
                                              const RateFunction* epsilon_bound = nullptr);

// ------------------------------------------------------------- quasiconvexity

struct QuasiconvexReport {
  bool ok = true;
  int U = 0;
  std::int64_t sigma = 0;
  std::size_t pairs = 0;
  // Pairs whose every geodesic lies in the ball (|u| + |v| <= radius).
  std::size_t complete_pairs = 0;
  std::int64_t max_excursion = 0;
  struct Witness {
    VertexId u = kNoVertex, v = kNoVertex, escape = kNoVertex;
    std::int64_t distance = 0;
  };
  std::optional<Witness> witness;
};

// Every geodesic inside the ball with endpoints in N_U(X) stays in
// N_sigma(X). All geodesics between a pair are covered at once by a dynamic
// programme over the BFS layers.
QuasiconvexReport check_quasiconvex(const MetricGraph& g, const GraphTarget& X, int U, std::int64_t sigma_U);

// --------------------------------------------------------------- orthogonality

struct OrthogonalReport {
  bool ok = true;
  std::int64_t diam = 0;
  bool exact = true;
};

OrthogonalReport check_orthogonal(const MetricGraph& g, const TaggedPath& p, const GraphTarget& X,
                                  const RateFunction& mu, const RateFunction& tau);

std::int64_t a_bound(const RateFunction& mu, const RateFunction& tau, const RateFunction& epsilon, double lambda,
                     double c);

// ------------------------------------------------------ bounded intersection

struct InteractionReport {
  std::vector<int> U;
  std::vector<Measured> intersection_diam;  // diam(N_U(X) & N_U(X')), 0 when empty
  std::vector<std::int64_t> nu;             // intersection_diam + 1
  Measured proj_diam_xprime_on_x;
  Measured proj_diam_x_on_xprime;
  std::int64_t B = 0;  // max projection diameter + 1
  // nu(U) <= B + 4 mu_{1,0} + 2 eps_{1,0} + 2U
  std::vector<std::int64_t> predicted_nu;
  // B <= 2 eps_{1,0} + nu(mu_{1,0})
  std::int64_t nu_at_mu = 0;
  std::int64_t predicted_B = 0;
  bool nu_within_prediction = true;
  bool B_within_prediction = true;
};

InteractionReport bounded_interaction(const MetricGraph& g, const GraphTarget& X, const GraphTarget& Xp,
                                      std::span<const int> Us, std::int64_t mu10, std::int64_t eps10);

// ------------------------------------------------------- deep and transition

struct PointClass {
  bool transition = true;
  std::optional<FactorCoset> deep_in;
  int deep_count = 0;
};

struct TransitionReport {
  std::vector<PointClass> points;
  // False when some vertex is deep in two cosets although L > nu(U).
  bool unique_when_required = true;
  std::size_t multi_deep = 0;
};

// Candidate targets are the peripheral cosets meeting N_U(p).
TransitionReport deep_and_transition_points(const GroupModel& model, std::span<const Element> path, int U,
                                            std::int64_t L, std::optional<std::int64_t> nu_U = std::nullopt);
TransitionReport deep_and_transition_points(const MetricGraph& g, const PathSeq& p, int U, std::int64_t L,
                                            std::optional<std::int64_t> nu_U = std::nullopt);

struct RelQuasiconvexReport {
  bool ok = true;
  std::int64_t max_distance = 0;
  std::size_t samples = 0;
  std::size_t transition_points = 0;
  std::optional<std::pair<std::size_t, VertexId>> witness;  // sample index, vertex
};

RelQuasiconvexReport check_rel_quasiconvex(const MetricGraph& g, const VertexSubset& H,
                                           std::span<const PathSeq> samples, int U, std::int64_t L,
                                           std::int64_t M);

// Geodesics between members of H, every ordered pair or a seeded sample.
std::vector<PathSeq> geodesics_between(const MetricGraph& g, const VertexSubset& H, std::size_t max_pairs,
                                       std::uint64_t seed);

// ---------------------------------------------------------------------- kappa

// Smallest kappa with N_U(H) & N_U(Y) inside N_kappa(C), within the ball.
Measured kappa_estimate(const MetricGraph& g, const VertexSubset& H, const GraphTarget& Y, int U,
                        const VertexSubset& C);

// ----------------------------------------------------- parabolic intersections

enum class IntersectionKind { kFinite, kFiniteIndex, kInfiniteIndex };
std::string to_string(IntersectionKind k);

struct ParabolicClass {
  std::uint32_t factor = 0;
  Element conjugator;  // g, for the conjugate g P g^-1
  int lattice_rank = 0;
  int factor_rank = 0;
  IntersectionKind kind = IntersectionKind::kFinite;
  // Finite classes: diam(N_U(gP) & H). Finite-index classes: smallest V
  // with the ball part of gP inside N_V(H).
  std::int64_t measure = 0;
};

struct ParabolicReport {
  std::vector<ParabolicClass> classes;
  bool fully_quasiconvex = true;
  bool stabilized = true;
  std::int64_t L = 0;
  std::int64_t cover_radius = 0;
};

// Classes (P, g) for g in the U-ball, deduplicated by the coset gP. H is
// enumerated inside the ball of the given radius.
ParabolicReport classify_parabolic_intersections(const GroupModel& model, const SubgroupSpec& H, int radius, int U);

}  // namespace coarsegeo
