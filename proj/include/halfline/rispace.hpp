#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "halfline/grid.hpp"
#include "halfline/maximal.hpp"

namespace halfline {

/// Rearrangement-invariant space descriptor: either L^p or the Lorentz space
/// L^{p,q}.  Both have lower Boyd index = upper Boyd index = p.
class SpaceSpec {
 public:
  enum class Kind { lp, lorentz };

  static SpaceSpec Lp(double p);
  static SpaceSpec Lorentz(double p, double q);

  Kind kind() const { return kind_; }
  double p() const { return p_; }
  double q() const { return q_; }
  double boyd_lower() const { return p_; }
  double boyd_upper() const { return p_; }
  std::string label() const;

 private:
  SpaceSpec(Kind k, double p, double q) : kind_(k), p_(p), q_(q) {}
  Kind kind_;
  double p_, q_;
};

/// Nonincreasing step function on the measure axis [0, w-total]: the
/// decreasing rearrangement of some |f| with respect to w dt.  Stored as
/// breakpoints s_0 = 0 < ... < s_m and one value per cell.
class RearrangementProfile {
 public:
  RearrangementProfile(std::vector<double> breakpoints,
                       std::vector<double> values);

  std::size_t cells() const { return values_.size(); }
  double breakpoint(std::size_t k) const { return breaks_[k]; }
  double value(std::size_t k) const { return values_[k]; }
  double total_measure() const { return breaks_.back(); }

  /// |{ f* > lambda }|, summed in the stored (descending-value) order so it
  /// matches the construction of the profile bit for bit.
  double measure_above(double lambda) const;

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
};

/// Exact decreasing rearrangement of |f| with respect to w dt: cells sorted
/// by |f| descending (stable in the cell index), each contributing a
/// measure-axis width w_i * Delta_i; equal values are merged.
RearrangementProfile decreasing_rearrangement(const StepFunction& f,
                                              const Weight& w);

/// ||f*_w||_E evaluated in closed form on the profile cells.
double profile_norm(const RearrangementProfile& prof, const SpaceSpec& E);

/// Norm of f in E_w.  L^p is evaluated directly as (int |f|^p w dt)^{1/p};
/// Lorentz goes through the rearrangement profile.
double space_norm(const StepFunction& f, const Weight& w, const SpaceSpec& E);
double space_norm(const VectorStepFunction& f, const Weight& w,
                  const SpaceSpec& E);

/// Analytic Boyd indices (lower, upper).
std::pair<double, double> boyd_indices(const SpaceSpec& E);

struct BoydOptions {
  int probe_count = 32;
  std::uint64_t seed = 0;
  int octave_min = -10;
  int octave_max = 10;
  int fit_points = 4;  // octaves used in the end-of-range regression
};

struct BoydEstimate {
  double lower = 0.0;
  double upper = 0.0;
  int probes = 0;
};

/// Empirical Boyd indices: the dilation-operator norm h_E(t) is estimated at
/// t = 2^k as a sup over a probe family of profiles, and log t / log h_E(t)
/// is regressed at both ends of the octave range.
BoydEstimate boyd_indices_empirical(const SpaceSpec& E,
                                    const BoydOptions& opts = {});

/// Calderon operator with exponents (r, r, q, q):
///   S phi(t) = t^{-1/r} int_0^t s^{1/r} phi(s) ds/s
///            + t^{-1/q} int_t^inf s^{1/q} phi(s) ds/s,
/// exact for step phi via power antiderivatives.  q may be infinity (the
/// second integral then carries ds/s alone).  Requires r < q.
double calderon_value(const RearrangementProfile& phi, double r, double q,
                      double t);
double calderon_value(const StepFunction& phi, double r, double q, double t);

/// S phi sampled at the right endpoint of every cell of phi (the operator
/// diverges at t = 0 for nontrivial phi).
StepFunction calderon_operator(const StepFunction& phi, double r, double q);
StepFunction calderon_operator(const RearrangementProfile& phi, double r,
                               double q);

struct RubioResult {
  StepFunction series;
  double tail_bound = 0.0;      // ||h||_{E_w} * 2^{-K}, valid while the norm
                                // surrogate dominates the true operator norm
  double norm_bound_used = 0.0; // the surrogate ||M|| used in the series
  int terms = 0;
};

/// Truncated Rubio de Francia series sum_{k=0..K} M^k h / (2 ||M||)^k, where
/// M is the one-sided maximal operator for `side` (primal) or the dual
/// operator S h = M^{opposite}(h w)/w (dual = true).  measured_norm is an
/// empirical operator-norm lower bound; the surrogate actually used is
/// safety * max(measured_norm, growth ratios observed along the iterates),
/// which keeps |h| <= Rh and ||Rh||_{E_w} <= 2 ||h||_{E_w} + tail valid for
/// the truncated series.  Requires h >= 0.
RubioResult rubio_iteration(const StepFunction& h, const Weight& w,
                            const SpaceSpec& E, Side side, bool dual,
                            int terms, double measured_norm,
                            double safety = 1.5);

}  // namespace halfline
