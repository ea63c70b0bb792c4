#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coarsegeo/admissible.hpp"
#include "coarsegeo/cayley_space.hpp"
#include "coarsegeo/constants.hpp"
#include "coarsegeo/metric_graph.hpp"
#include "coarsegeo/relative.hpp"
#include "coarsegeo/subgroup.hpp"

namespace coarsegeo {

// Word in the free basis x, y, z of H: letters +-1 (x), +-2 (y), +-3 (z).
using HWord = std::vector<int>;

// Stack-based free reduction.
HWord free_reduce(const HWord& w);

// The fixture in Z^2 * Z^2 = A * B:
//   H = <x = a1, y = b1, z = b2 a1 b2^-1>, P = A, Q = P & H = <a1>,
//   f = b2, c = a2^N, t = f c, Q' = t Q t^-1 = <z>.
struct HnnFixture {
  GroupModel model = GroupModel::free_product({2, 2});
  std::uint32_t P = 0;  // factor index of the peripheral A
  std::int64_t N = 0;
  Element x, y, z, f, c, t;
  SubgroupSpec H, Q, Qp;

  Element evaluate(const HWord& w) const;
};

HnnFixture make_hnn_fixture(std::int64_t N);

struct FixtureCheck {
  std::string hypothesis;
  bool ok = true;
  std::string detail;
};

// Checked on enumerations: H is free on x, y, z (reduced words up to
// free_depth evaluate injectively); Q = P & H; Q' = Q^f <= H; Q^c = Q;
// Q and Q' are not conjugate in H; cQ has word length > D.
std::vector<FixtureCheck> validate_hnn_fixture(const HnnFixture& fx, std::int64_t D, int free_depth = 6);

// h1 t^e1 h2 t^e2 ... hn t^en.
struct HnnWord {
  std::vector<HWord> h;
  std::vector<int> eps;  // +1 or -1, same length as h
};

std::string format_hnn_word(const HnnWord& w);

// Index i such that t^eps_i h_{i+1} t^eps_{i+1} is a pinch: eps_i = +1,
// eps_{i+1} = -1 and h_{i+1} in Q, or eps_i = -1, eps_{i+1} = +1 and h_{i+1}
// in Q'. Membership is read off the normal form in G.
std::optional<std::size_t> britton_pinch(const HnnFixture& fx, const HnnWord& w);

Element evaluate_hnn(const HnnFixture& fx, const HnnWord& w);

// The abstract extension H *_{Q^t = Q'} is free on x, y, t after
// eliminating z = t x t^-1. Letters +-1 (x), +-2 (y), +-4 (t).
std::vector<int> abstract_key(const HnnWord& w);

// Number of t letters left after cyclic Britton reduction; 0 means the
// element is conjugate into H.
std::size_t cyclic_t_length(const HnnWord& w);

struct TruncationPath {
  RelativePath relative;  // q1 (beta1 p1)^e1 q2 ... as relative edges
  std::vector<std::size_t> p_edges;  // relative edge index of each p_i
  std::vector<FactorCoset> targets;  // g_i P
  std::vector<std::size_t> z, w;     // relative vertex indices
  AdmissibleDecomposition<CayleySpace> decomp;  // q'1 p'1 ... p'n q'(n+1)
  CayleyPath path;
  std::vector<std::int64_t> p_lengths;
  Element value;
  bool targets_distinct = true;
};

// Truncation of the normal path of w. The decomposition carries
// (lambda, c) = (1, 3|f|). Throws ReductionError on a pinch.
TruncationPath build_truncation_hnn(const HnnFixture& fx, const HnnWord& w);

// ------------------------------------------------------------ constants

struct HnnThreshold {
  std::int64_t M = 0;      // relative quasiconvexity constant of H, measured
  Measured kappa1;         // kappa(H, fP, M), intersection subgroup Q'
  Measured kappa2;         // kappa(H, P, M), intersection subgroup Q
  std::int64_t lambda = 1;
  std::int64_t c_prime = 3;  // (lambda + 2)|f|
  ConstantsBundle constants;  // at (lambda, c_prime)
  std::int64_t N = 0;         // lambda (D + 1) + c' + kappa1 + kappa2 + 1
  std::int64_t D_prime = 0;   // floor((N - kappa1 - kappa2 - c' - 1) / lambda)
  bool trusted = true;

  nlohmann::ordered_json to_json() const;
};

struct HnnMeasureOptions {
  int ball_radius = 6;
  int U = 1;            // deep / transition radius
  std::int64_t L = 0;   // 0: nu(U) + 1
  std::size_t max_pairs = 4000;
  std::uint64_t seed = 1;
};

HnnThreshold hnn_threshold(const RateSet& rates, const HnnMeasureOptions& opt);
// D' for a given N with the measured kappas.
std::int64_t hnn_d_prime(const HnnThreshold& th, std::int64_t N);

// ---------------------------------------------------------- injectivity

struct HnnBounds {
  int max_t = 3;
  int h_length = 3;  // word length in G of each h_i
  // Verify admissibility and quasigeodesicity on every word when 0,
  // otherwise on every k-th word.
  std::size_t check_stride = 0;
};

struct HnnReport {
  std::size_t h_elements = 0;
  std::size_t words = 0;
  std::size_t pinched_skipped = 0;
  std::size_t abstract_classes = 0;
  std::size_t g_classes = 0;
  std::size_t collisions = 0;   // abstract-distinct words equal in G
  std::size_t splits = 0;       // abstract-equal words distinct in G
  std::size_t trivial = 0;      // abstract-nontrivial words trivial in G
  std::size_t checked_paths = 0;
  std::size_t admissible_failures = 0;
  std::size_t qg_failures = 0;
  std::size_t target_repeats = 0;
  std::size_t short_p = 0;      // p' shorter than N - kappa1 - kappa2
  std::int64_t min_p_length = -1;
  std::size_t parabolic = 0;
  std::size_t parabolic_not_conjugate_into_H = 0;
  std::vector<std::string> witnesses;

  bool ok() const {
    return collisions == 0 && splits == 0 && trivial == 0 && admissible_failures == 0 && qg_failures == 0 &&
           target_repeats == 0 && short_p == 0 && parabolic_not_conjugate_into_H == 0;
  }
  nlohmann::ordered_json to_json() const;
};

// Elements of H with word length <= radius in G, with their basis words,
// in shortlex order of the G normal form.
std::vector<std::pair<Element, HWord>> h_ball(const HnnFixture& fx, int radius);

HnnReport check_hnn_injectivity(const HnnFixture& fx, const HnnBounds& bounds, const RateSet& rates,
                                const HnnThreshold& th);

}  // namespace coarsegeo
