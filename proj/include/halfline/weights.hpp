#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "halfline/grid.hpp"

namespace halfline {

/// Which of the two one-sided weight classes on the half-line a diagnostic
/// refers to.  The minus class governs the backward maximal operator, the
/// plus class the forward one; plus-side quantities are computed by running
/// the minus-side code on the reflected weight.
enum class SawyerVariant { plus, minus };

enum class SamplingRule { cell_average, midpoint };

struct WeightFamily;

struct PowerWeight {
  double beta;
};
struct ExponentialWeight {
  double gamma;
};
struct RampWeight {
  double offset = 1.0;
  double slope = 1.0;
};
struct ProductWeight {
  std::vector<WeightFamily> factors;
};

struct WeightFamily {
  std::variant<PowerWeight, ExponentialWeight, RampWeight, ProductWeight> node;
  double operator()(double t) const;
};

struct MaterializedWeight {
  Weight weight;
  SamplingRule rule;
  bool rule_forced;  // cell averaging was impossible (non-integrable cell)
};

/// Either a tabulated weight or a closed-form family plus the sampling rule
/// used to put it on a grid.  Power weights with beta <= -1 have an
/// infinite-average first cell; for those the midpoint rule is forced and
/// flagged in the result.
class WeightSpec {
 public:
  static WeightSpec tabulated(Weight w);
  static WeightSpec closed_form(WeightFamily family,
                                SamplingRule rule = SamplingRule::cell_average);

  MaterializedWeight materialize(const Grid& g) const;
  bool is_tabulated() const { return tab_.has_value(); }
  std::string label() const;

 private:
  WeightSpec() = default;
  std::optional<Weight> tab_;
  std::optional<WeightFamily> family_;
  SamplingRule rule_ = SamplingRule::cell_average;
};

enum class BoundDirection { lower, two_sided };

struct SawyerMethod {
  enum class Kind { exact, sampled };
  Kind kind = Kind::exact;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  static SawyerMethod Exact() { return {}; }
  static SawyerMethod Sampled(std::size_t budget, std::uint64_t seed = 0) {
    return {Kind::sampled, budget, seed};
  }
};

struct SawyerReport {
  double constant = 0.0;
  std::array<std::size_t, 3> witness_index{};  // breakpoint indices a < b < c
  std::array<double, 3> witness{};             // breakpoint values
  SawyerVariant variant = SawyerVariant::minus;
  double p = 2.0;
  SawyerMethod::Kind method = SawyerMethod::Kind::exact;
  /// Suprema are restricted to breakpoint triples (exact) or to visited
  /// triples (sampled); both are lower bounds of the continuum constant,
  /// converging under grid refinement.
  BoundDirection bound_direction = BoundDirection::lower;
};

/// Sawyer-type constant of w for exponent p: the minus variant takes the sup
/// over breakpoint triples a < b < c of
///   (c-a)^{-p} \int_b^c w dt ( \int_a^b w^{1-p'} dt )^{p-1},
/// the plus variant swaps the two integrals.  Exact enumerates all triples
/// (n <= 256); Sampled runs seeded random restarts with coordinate ascent
/// under an evaluation budget and can only undershoot Exact.
SawyerReport sawyer_constant(const Weight& w, double p, SawyerVariant variant,
                             const SawyerMethod& method = SawyerMethod::Exact());

/// A_1-type constant: max over cells of M w / w, where the maximal side is
/// backward for the plus variant and forward for the minus variant (the
/// reflection convention of the half-line classes).
double a1_constant(const Weight& w, SawyerVariant variant);

struct ReverseHolderReport {
  double delta = 0.0;
  double constant = 0.0;
  std::size_t witness_b = 0, witness_c = 0;  // breakpoint indices
};

/// Weak reverse Hoelder probe for sigma = w^{1-p'}: for each delta,
///   C(delta) = max_{b<c} [ avg_{(b,c)} sigma^{1+delta} ] /
///              [ max over windows (s,c], s in [b,c) of avg sigma ]^{1+delta},
/// i.e. backward-looking window maxima anchored at the right endpoint.
/// Returns the delta minimising C together with that C and its witness pair.
ReverseHolderReport reverse_holder_probe(const Weight& w, double p,
                                         const std::vector<double>& deltas);

/// Empirical lower bound for the best constant in the density comparison
///   w(S)/w(a,c) <= C (|S|/(c-b))^delta,  S a union of whole cells in (a,b),
/// over seeded random tuples.
double doubling_probe(const Weight& w, double delta, std::size_t samples,
                      std::uint64_t seed = 0);

struct OpennessStep {
  double q = 0.0;
  double constant_base = 0.0;
  double constant_refined = 0.0;
  double growth = 0.0;
  bool stable = false;
};

struct OpennessReport {
  double q = 0.0;           // smallest stable exponent found (p if none)
  bool found_stable = false;
  std::vector<OpennessStep> trajectory;
};

/// Walks q_grid (decreasing, inside (1, p)) and reports the smallest q whose
/// Sawyer constant stays within stability_tol relative growth under one
/// refine-by-2 of the base grid.
OpennessReport openness_probe(const WeightSpec& spec, const Grid& base,
                              double p, const std::vector<double>& q_grid,
                              SawyerVariant variant = SawyerVariant::minus,
                              double stability_tol = 0.10);

}  // namespace halfline
