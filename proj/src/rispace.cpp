#include "halfline/rispace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "halfline/detail/rng.hpp"

namespace halfline {

SpaceSpec SpaceSpec::Lp(double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument("SpaceSpec: p must lie in (1, inf)");
  return SpaceSpec(Kind::lp, p, p);
}

SpaceSpec SpaceSpec::Lorentz(double p, double q) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument("SpaceSpec: p must lie in (1, inf)");
  if (!(q >= 1.0) || !std::isfinite(q))
    throw std::invalid_argument("SpaceSpec: q must lie in [1, inf)");
  return SpaceSpec(Kind::lorentz, p, q);
}

std::string SpaceSpec::label() const {
  std::ostringstream os;
  if (kind_ == Kind::lp)
    os << "L" << p_;
  else
    os << "L(" << p_ << "," << q_ << ")";
  return os.str();
}

RearrangementProfile::RearrangementProfile(std::vector<double> breakpoints,
                                           std::vector<double> values)
    : breaks_(std::move(breakpoints)), values_(std::move(values)) {
  if (breaks_.size() != values_.size() + 1 || breaks_.empty() ||
      breaks_.front() != 0.0)
    throw std::invalid_argument("profile: breakpoints/values mismatch");
  for (std::size_t k = 0; k + 1 < breaks_.size(); ++k)
    if (!(breaks_[k + 1] > breaks_[k]))
      throw std::invalid_argument("profile: breakpoints must increase");
  for (std::size_t k = 0; k + 1 < values_.size(); ++k)
    if (values_[k] < values_[k + 1])
      throw std::invalid_argument("profile: values must be nonincreasing");
}

double RearrangementProfile::measure_above(double lambda) const {
  // values are nonincreasing, so the level set is a prefix; its measure is a
  // stored cumulative breakpoint, not a re-summation.
  std::size_t k = 0;
  while (k < values_.size() && values_[k] > lambda) ++k;
  return breaks_[k];
}

RearrangementProfile decreasing_rearrangement(const StepFunction& f,
                                              const Weight& w) {
  if (!f.grid().same_breakpoints(w.grid()))
    throw std::invalid_argument(
        "decreasing_rearrangement: f and w must share a grid (resample first)");
  const std::size_t n = f.cells();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = std::fabs(f.value(i));
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a[i] > a[j]; });

  std::vector<double> breaks{0.0};
  std::vector<double> values;
  double cum = 0.0;
  for (std::size_t idx : order) {
    cum += w.value(idx) * f.grid().width(idx);
    if (!values.empty() && values.back() == a[idx]) {
      breaks.back() = cum;  // merge equal values, keep the cumulative sum
    } else {
      values.push_back(a[idx]);
      breaks.push_back(cum);
    }
  }
  return RearrangementProfile(std::move(breaks), std::move(values));
}

double profile_norm(const RearrangementProfile& prof, const SpaceSpec& E) {
  if (E.kind() == SpaceSpec::Kind::lp) {
    const double p = E.p();
    double s = 0.0;
    for (std::size_t k = 0; k < prof.cells(); ++k)
      s += std::pow(prof.value(k), p) *
           (prof.breakpoint(k + 1) - prof.breakpoint(k));
    return std::pow(s, 1.0 / p);
  }
  const double p = E.p(), q = E.q();
  // int (s^{1/p} f*(s))^q ds/s = sum_k v_k^q (p/q)(s_{k+1}^{q/p} - s_k^{q/p})
  double s = 0.0;
  for (std::size_t k = 0; k < prof.cells(); ++k) {
    const double v = prof.value(k);
    if (v == 0.0) continue;
    s += std::pow(v, q) * (p / q) *
         (std::pow(prof.breakpoint(k + 1), q / p) -
          std::pow(prof.breakpoint(k), q / p));
  }
  return std::pow(s, 1.0 / q);
}

double space_norm(const StepFunction& f, const Weight& w, const SpaceSpec& E) {
  if (E.kind() == SpaceSpec::Kind::lp) {
    const double p = E.p();
    double s = 0.0;
    for (std::size_t i = 0; i < f.cells(); ++i)
      s += std::pow(std::fabs(f.value(i)), p) * w.value(i) * f.grid().width(i);
    return std::pow(s, 1.0 / p);
  }
  return profile_norm(decreasing_rearrangement(f, w), E);
}

double space_norm(const VectorStepFunction& f, const Weight& w,
                  const SpaceSpec& E) {
  return space_norm(f.magnitude(), w, E);
}

std::pair<double, double> boyd_indices(const SpaceSpec& E) {
  return {E.boyd_lower(), E.boyd_upper()};
}

namespace {

RearrangementProfile scale_profile(const RearrangementProfile& p, double t) {
  std::vector<double> b(p.cells() + 1), v(p.cells());
  for (std::size_t k = 0; k <= p.cells(); ++k) b[k] = p.breakpoint(k) * t;
  for (std::size_t k = 0; k < p.cells(); ++k) v[k] = p.value(k);
  b[0] = 0.0;
  return RearrangementProfile(std::move(b), std::move(v));
}

std::vector<RearrangementProfile> boyd_probes(const BoydOptions& opts) {
  std::vector<RearrangementProfile> probes;
  probes.emplace_back(std::vector<double>{0.0, 1.0}, std::vector<double>{1.0});
  probes.emplace_back(std::vector<double>{0.0, 0.25, 1.0, 3.0},
                      std::vector<double>{3.0, 1.0, 0.25});
  detail::Rng rng(opts.seed);
  while (static_cast<int>(probes.size()) < std::max(3, opts.probe_count)) {
    const std::size_t m = 2 + rng.index(14);
    std::vector<double> vals(m), breaks(m + 1, 0.0);
    for (auto& v : vals) v = rng.uniform(0.05, 1.0);
    std::sort(vals.rbegin(), vals.rend());
    for (std::size_t k = 0; k < m; ++k)
      breaks[k + 1] = breaks[k] + rng.uniform(0.05, 1.0);
    probes.emplace_back(std::move(breaks), std::move(vals));
  }
  return probes;
}

// least-squares slope of log h against log t
double fitted_slope(const std::vector<std::pair<double, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

BoydEstimate boyd_indices_empirical(const SpaceSpec& E, const BoydOptions& opts) {
  const auto probes = boyd_probes(opts);
  std::vector<double> base_norm(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i)
    base_norm[i] = profile_norm(probes[i], E);

  auto h_at = [&](double t) {
    double best = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i)
      best = std::max(best,
                      profile_norm(scale_profile(probes[i], t), E) / base_norm[i]);
    return best;
  };

  std::vector<std::pair<double, double>> top, bottom;
  for (int k = opts.octave_max - opts.fit_points + 1; k <= opts.octave_max; ++k) {
    const double t = std::ldexp(1.0, k);
    top.push_back({std::log(t), std::log(h_at(t))});
  }
  for (int k = opts.octave_min; k < opts.octave_min + opts.fit_points; ++k) {
    const double t = std::ldexp(1.0, k);
    bottom.push_back({std::log(t), std::log(h_at(t))});
  }
  BoydEstimate est;
  est.lower = 1.0 / fitted_slope(top);
  est.upper = 1.0 / fitted_slope(bottom);
  est.probes = static_cast<int>(probes.size());
  return est;
}

namespace {

double calderon_core(const std::vector<double>& breaks,
                     const std::vector<double>& values, double r, double q,
                     double t) {
  if (!(r > 0.0) || !(r < q))
    throw std::invalid_argument("calderon: need 0 < r < q");
  if (!(t > 0.0)) throw std::invalid_argument("calderon: need t > 0");
  const double ar = 1.0 / r;
  const bool q_finite = std::isfinite(q);
  const double aq = q_finite ? 1.0 / q : 0.0;

  double first = 0.0;  // int_0^t s^{1/r - 1} phi ds
  for (std::size_t k = 0; k < values.size() && breaks[k] < t; ++k) {
    const double hi = std::min(t, breaks[k + 1]);
    first += values[k] * (std::pow(hi, ar) - std::pow(breaks[k], ar)) / ar;
  }
  double second = 0.0;  // int_t^inf s^{1/q - 1} phi ds
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (breaks[k + 1] <= t) continue;
    const double lo = std::max(t, breaks[k]);
    second += values[k] * (q_finite ? (std::pow(breaks[k + 1], aq) -
                                       std::pow(lo, aq)) / aq
                                    : std::log(breaks[k + 1] / lo));
  }
  return std::pow(t, -ar) * first +
         (q_finite ? std::pow(t, -aq) : 1.0) * second;
}

}  // namespace

double calderon_value(const RearrangementProfile& phi, double r, double q,
                      double t) {
  std::vector<double> b(phi.cells() + 1), v(phi.cells());
  for (std::size_t k = 0; k <= phi.cells(); ++k) b[k] = phi.breakpoint(k);
  for (std::size_t k = 0; k < phi.cells(); ++k) v[k] = phi.value(k);
  return calderon_core(b, v, r, q, t);
}

double calderon_value(const StepFunction& phi, double r, double q, double t) {
  return calderon_core(phi.grid().breakpoints(), phi.values(), r, q, t);
}

StepFunction calderon_operator(const StepFunction& phi, double r, double q) {
  std::vector<double> out(phi.cells());
  for (std::size_t i = 0; i < phi.cells(); ++i)
    out[i] = calderon_value(phi, r, q, phi.grid().point(i + 1));
  return StepFunction(phi.grid(), std::move(out));
}

StepFunction calderon_operator(const RearrangementProfile& phi, double r,
                               double q) {
  std::vector<double> b(phi.cells() + 1), v(phi.cells());
  for (std::size_t k = 0; k <= phi.cells(); ++k) b[k] = phi.breakpoint(k);
  for (std::size_t k = 0; k < phi.cells(); ++k) v[k] = phi.value(k);
  return calderon_operator(StepFunction(Grid(std::move(b)), std::move(v)), r, q);
}

RubioResult rubio_iteration(const StepFunction& h, const Weight& w,
                            const SpaceSpec& E, Side side, bool dual, int terms,
                            double measured_norm, double safety) {
  for (double v : h.values())
    if (v < 0.0)
      throw std::invalid_argument("rubio_iteration: h must be nonnegative");
  if (terms < 0) throw std::invalid_argument("rubio_iteration: terms >= 0");
  if (!(measured_norm > 0.0) || !(safety >= 1.0))
    throw std::invalid_argument("rubio_iteration: invalid norm bound");

  auto apply = [&](const StepFunction& g) {
    if (!dual) return one_sided_maximal(g, side);
    StepFunction gw = zip(g, w.fn(), [](double a, double b) { return a * b; });
    StepFunction m = one_sided_maximal(gw, opposite(side));
    return zip(m, w.fn(), [](double a, double b) { return a / b; });
  };

  // Two passes: the iterates fix the norm surrogate first, so the truncated
  // series provably satisfies ||Rh|| <= 2 ||h|| and M(Rh) <= 2N (Rh + tail).
  std::vector<StepFunction> iter;
  iter.reserve(static_cast<std::size_t>(terms) + 1);
  iter.push_back(h);
  double growth = 0.0;
  for (int k = 0; k < terms; ++k) {
    iter.push_back(apply(iter.back()));
    const double a = space_norm(iter[k], w, E);
    const double b = space_norm(iter[k + 1], w, E);
    if (a > 0.0) growth = std::max(growth, b / a);
  }
  const double norm_bound = safety * std::max(measured_norm, growth);

  std::vector<double> sum(h.cells(), 0.0);
  double coeff = 1.0;
  for (int k = 0; k <= terms; ++k) {
    for (std::size_t i = 0; i < sum.size(); ++i)
      sum[i] += coeff * iter[static_cast<std::size_t>(k)].value(i);
    coeff /= 2.0 * norm_bound;
  }

  RubioResult res{StepFunction(h.grid(), std::move(sum)),
                  space_norm(h, w, E) * std::ldexp(1.0, -terms), norm_bound,
                  terms};
  return res;
}

}  // namespace halfline
