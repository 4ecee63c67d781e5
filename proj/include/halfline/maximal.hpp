#pragma once

#include "halfline/grid.hpp"

namespace halfline {

/// Window direction of the one-sided averages: backward takes averages over
/// [t-h, t], forward over [t, t+h].
enum class Side { backward, forward };

Side opposite(Side s);

/// One-sided Hardy-Littlewood maximal function of the zero extension of f,
/// evaluated at the left endpoint of every cell.  The value at t_i is
/// max(|f_i|, sup over breakpoint windows of the window average); for step
/// inputs this equals the pointwise supremum because the window average is a
/// Moebius function of the width between breakpoints (see fast_max_slope in
/// maximal.cpp).  Runs in O(n log n).
StepFunction one_sided_maximal(const StepFunction& f, Side side);
StepFunction one_sided_maximal(const VectorStepFunction& f, Side side);

/// Same quantity by exhaustive O(n^2) enumeration of breakpoint windows;
/// ground truth for tests.
StepFunction one_sided_maximal_oracle(const StepFunction& f, Side side);

/// (M^{side}(|f|^r))^{1/r}; requires r >= 1.
StepFunction power_maximal(const StepFunction& f, double r, Side side);

struct SharpOptions {
  /// Candidate window widths between consecutive breakpoints are subdivided
  /// into this many steps; larger values tighten the computed lower bound.
  int subdivisions = 4;
  /// Candidate widths are extended past the domain end up to this multiple of
  /// the remaining span, so windows reaching into the zero extension are seen.
  double tail_factor = 4.0;
};

/// One-sided sharp maximal function: for the forward side,
///   sup_h (1/h) \int_t^{t+h} ( f(s) - (1/h) \int_{t+h}^{t+2h} f )^+ ds,
/// with the supremum restricted to a finite candidate set of widths.  The
/// result is a certified lower bound of the true supremum.  The backward side
/// is the mirror image (windows to the left, reference average further left).
StepFunction sharp_maximal(const StepFunction& f, Side side = Side::forward,
                           const SharpOptions& opts = {});

/// Slow direct scan over the same candidate construction; independent of the
/// fast path, used as a test oracle (typically with more subdivisions).
StepFunction sharp_maximal_scan(const StepFunction& f, Side side,
                                const SharpOptions& opts);

}  // namespace halfline
