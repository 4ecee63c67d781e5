#include "halfline/weights.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "halfline/detail/rng.hpp"
#include "halfline/maximal.hpp"

namespace halfline {

namespace {

double conjugate_exponent(double p) { return p / (p - 1.0); }

// 16-point Gauss-Legendre on [a, b]; exact for the polynomial families and
// close enough for smooth products used as probe weights.
double gauss_average(const WeightFamily& fam, double a, double b) {
  static const double xs[8] = {0.0950125098376374, 0.2816035507792589,
                               0.4580167776572274, 0.6178762444026438,
                               0.7554044083550030, 0.8656312023878318,
                               0.9445750230732326, 0.9894009349916499};
  static const double ws[8] = {0.1894506104550685, 0.1826034150449236,
                               0.1691565193950025, 0.1495959888165767,
                               0.1246289712555339, 0.0951585116824928,
                               0.0622535239386479, 0.0271524594117541};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int k = 0; k < 8; ++k)
    s += ws[k] * (fam(mid - half * xs[k]) + fam(mid + half * xs[k]));
  return 0.5 * s;
}

bool forces_midpoint(const WeightFamily& fam) {
  return std::visit(
      [](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, PowerWeight>) {
          return node.beta <= -1.0;
        } else if constexpr (std::is_same_v<T, ProductWeight>) {
          for (const auto& f : node.factors)
            if (forces_midpoint(f)) return true;
          return false;
        } else {
          return false;
        }
      },
      fam.node);
}

double cell_average(const WeightFamily& fam, double a, double b) {
  return std::visit(
      [&](const auto& node) -> double {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, PowerWeight>) {
          const double beta = node.beta;
          if (beta == 0.0) return 1.0;
          return (std::pow(b, beta + 1.0) - std::pow(a, beta + 1.0)) /
                 ((beta + 1.0) * (b - a));
        } else if constexpr (std::is_same_v<T, ExponentialWeight>) {
          const double g = node.gamma;
          if (g == 0.0) return 1.0;
          return (std::exp(g * b) - std::exp(g * a)) / (g * (b - a));
        } else if constexpr (std::is_same_v<T, RampWeight>) {
          return node.offset + node.slope * 0.5 * (a + b);
        } else {
          return gauss_average(fam, a, b);
        }
      },
      fam.node);
}

std::string family_label(const WeightFamily& fam) {
  return std::visit(
      [](const auto& node) -> std::string {
        using T = std::decay_t<decltype(node)>;
        std::ostringstream os;
        if constexpr (std::is_same_v<T, PowerWeight>) {
          os << "power(" << node.beta << ")";
        } else if constexpr (std::is_same_v<T, ExponentialWeight>) {
          os << "exp(" << node.gamma << ")";
        } else if constexpr (std::is_same_v<T, RampWeight>) {
          os << "ramp(" << node.offset << "+" << node.slope << "t)";
        } else {
          os << "product(";
          for (std::size_t i = 0; i < node.factors.size(); ++i)
            os << (i ? "*" : "") << family_label(node.factors[i]);
          os << ")";
        }
        return os.str();
      },
      fam.node);
}

}  // namespace

double WeightFamily::operator()(double t) const {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, PowerWeight>) {
          return std::pow(t, n.beta);
        } else if constexpr (std::is_same_v<T, ExponentialWeight>) {
          return std::exp(n.gamma * t);
        } else if constexpr (std::is_same_v<T, RampWeight>) {
          return n.offset + n.slope * t;
        } else {
          double v = 1.0;
          for (const auto& f : n.factors) v *= f(t);
          return v;
        }
      },
      node);
}

WeightSpec WeightSpec::tabulated(Weight w) {
  WeightSpec s;
  s.tab_ = std::move(w);
  return s;
}

WeightSpec WeightSpec::closed_form(WeightFamily family, SamplingRule rule) {
  WeightSpec s;
  s.family_ = std::move(family);
  s.rule_ = rule;
  return s;
}

MaterializedWeight WeightSpec::materialize(const Grid& g) const {
  if (tab_) {
    if (tab_->grid().same_breakpoints(g))
      return {*tab_, SamplingRule::cell_average, false};
    return {Weight(resample(tab_->fn(), g)), SamplingRule::cell_average, false};
  }
  const WeightFamily& fam = *family_;
  const bool forced = rule_ == SamplingRule::cell_average && forces_midpoint(fam);
  const SamplingRule rule =
      forced ? SamplingRule::midpoint : rule_;
  std::vector<double> v(g.cells());
  for (std::size_t i = 0; i < g.cells(); ++i) {
    const double a = g.point(i), b = g.point(i + 1);
    v[i] = rule == SamplingRule::midpoint ? fam(0.5 * (a + b))
                                          : cell_average(fam, a, b);
  }
  return {Weight(StepFunction(g, std::move(v))), rule, forced};
}

std::string WeightSpec::label() const {
  if (tab_) {
    std::ostringstream os;
    os << "tabulated(n=" << tab_->cells() << ")";
    return os.str();
  }
  return family_label(*family_);
}

namespace {

struct TripleBest {
  double value = -1.0;
  std::array<std::size_t, 3> idx{0, 0, 0};
};

// Objective of the minus variant at breakpoint indices ia < ib < ic, given
// prefix integrals of w and sigma = w^{1-p'}.
struct SawyerObjective {
  const std::vector<double>& pts;
  std::vector<double> W;   // prefix of w
  std::vector<double> S;   // prefix of sigma
  double p;

  SawyerObjective(const Weight& w, double p_) : pts(w.grid().breakpoints()), p(p_) {
    const std::size_t n = w.cells();
    W.assign(n + 1, 0.0);
    S.assign(n + 1, 0.0);
    const double sigma_exp = 1.0 - conjugate_exponent(p);
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = pts[i + 1] - pts[i];
      W[i + 1] = W[i] + w.value(i) * dx;
      S[i + 1] = S[i] + std::pow(w.value(i), sigma_exp) * dx;
    }
  }

  double operator()(std::size_t ia, std::size_t ib, std::size_t ic) const {
    const double span = pts[ic] - pts[ia];
    return (W[ic] - W[ib]) * std::pow(S[ib] - S[ia], p - 1.0) /
           std::pow(span, p);
  }
};

TripleBest exact_enumeration(const SawyerObjective& obj, std::size_t n) {
  auto scan_range = [&](std::size_t a_lo, std::size_t a_hi) {
    TripleBest best;
    for (std::size_t ia = a_lo; ia < a_hi; ++ia)
      for (std::size_t ib = ia + 1; ib < n; ++ib)
        for (std::size_t ic = ib + 1; ic <= n; ++ic) {
          const double v = obj(ia, ib, ic);
          if (v > best.value) best = {v, {ia, ib, ic}};
        }
    return best;
  };

  const unsigned hw = std::thread::hardware_concurrency();
  if (n < 96 || hw < 2) return scan_range(0, n - 1);

  // Chunked over the outer index and merged in order: identical result for
  // any thread count, since each triple value is computed the same way.
  const std::size_t chunks = std::min<std::size_t>(hw, 16);
  std::vector<std::future<TripleBest>> futs;
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t lo = (n - 1) * c / chunks;
    const std::size_t hi = (n - 1) * (c + 1) / chunks;
    futs.push_back(std::async(std::launch::async, scan_range, lo, hi));
  }
  TripleBest best;
  for (auto& f : futs) {
    TripleBest b = f.get();
    if (b.value > best.value) best = b;
  }
  return best;
}

TripleBest sampled_search(const SawyerObjective& obj, std::size_t n,
                          std::size_t budget, std::uint64_t seed) {
  detail::Rng rng(seed);
  TripleBest best;
  std::size_t evals = 0;
  auto eval = [&](std::size_t ia, std::size_t ib, std::size_t ic) {
    ++evals;
    const double v = obj(ia, ib, ic);
    if (v > best.value ||
        (v == best.value && std::array<std::size_t, 3>{ia, ib, ic} < best.idx))
      best = {v, {ia, ib, ic}};
    return v;
  };
  while (evals < budget) {
    std::size_t t[3];
    do {
      for (auto& x : t) x = rng.index(n + 1);
      std::sort(t, t + 3);
    } while (t[0] == t[1] || t[1] == t[2]);
    std::size_t ia = t[0], ib = t[1], ic = t[2];
    double cur = eval(ia, ib, ic);
    bool improved = true;
    while (improved && evals < budget) {
      improved = false;
      for (int coord = 0; coord < 3; ++coord) {
        for (std::size_t stride : {std::size_t{1}, std::size_t{4}, std::size_t{16}}) {
          for (int dir : {-1, +1}) {
            std::size_t a = ia, b = ib, c = ic;
            std::size_t& x = coord == 0 ? a : coord == 1 ? b : c;
            const std::size_t step = stride;
            if (dir < 0) {
              if (x < step) continue;
              x -= step;
            } else {
              x += step;
            }
            if (!(a < b && b < c && c <= n)) continue;
            const double v = eval(a, b, c);
            if (v > cur) {
              cur = v;
              ia = a;
              ib = b;
              ic = c;
              improved = true;
            }
            if (evals >= budget) break;
          }
          if (evals >= budget) break;
        }
        if (evals >= budget) break;
      }
    }
  }
  return best;
}

}  // namespace

SawyerReport sawyer_constant(const Weight& w, double p, SawyerVariant variant,
                             const SawyerMethod& method) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument("sawyer_constant: p must lie in (1, inf)");

  if (variant == SawyerVariant::plus) {
    // Plus-side constant by construction: reflect and evaluate the minus
    // side, then map the witness back.  Tie-breaking is lexicographic in the
    // reflected coordinates.
    SawyerReport r =
        sawyer_constant(Weight(reflect(w.fn())), p, SawyerVariant::minus, method);
    const std::size_t n = w.cells();
    const auto& pts = w.grid().breakpoints();
    SawyerReport out = r;
    out.variant = SawyerVariant::plus;
    out.witness_index = {n - r.witness_index[2], n - r.witness_index[1],
                         n - r.witness_index[0]};
    for (int k = 0; k < 3; ++k) out.witness[k] = pts[out.witness_index[k]];
    return out;
  }

  const std::size_t n = w.cells();
  if (n < 2)
    throw std::invalid_argument("sawyer_constant: need at least two cells");
  SawyerObjective obj(w, p);

  TripleBest best;
  if (method.kind == SawyerMethod::Kind::exact) {
    if (n > 256)
      throw std::invalid_argument(
          "sawyer_constant: exact enumeration limited to n <= 256");
    best = exact_enumeration(obj, n);
  } else {
    best = sampled_search(obj, n, std::max<std::size_t>(method.budget, 8),
                          method.seed);
  }

  SawyerReport r;
  r.constant = best.value;
  r.witness_index = best.idx;
  for (int k = 0; k < 3; ++k) r.witness[k] = obj.pts[best.idx[k]];
  r.variant = variant;
  r.p = p;
  r.method = method.kind;
  r.bound_direction = BoundDirection::lower;
  return r;
}

double a1_constant(const Weight& w, SawyerVariant variant) {
  const Side side =
      variant == SawyerVariant::plus ? Side::backward : Side::forward;
  StepFunction m = one_sided_maximal(w.fn(), side);
  double best = 0.0;
  for (std::size_t i = 0; i < w.cells(); ++i)
    best = std::max(best, m.value(i) / w.value(i));
  return best;
}

ReverseHolderReport reverse_holder_probe(const Weight& w, double p,
                                         const std::vector<double>& deltas) {
  if (deltas.empty())
    throw std::invalid_argument("reverse_holder_probe: deltas must be nonempty");
  const std::size_t n = w.cells();
  const auto& pts = w.grid().breakpoints();
  const double sigma_exp = 1.0 - conjugate_exponent(p);

  std::vector<double> sigma(n);
  for (std::size_t i = 0; i < n; ++i)
    sigma[i] = std::pow(w.value(i), sigma_exp);
  std::vector<double> S(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    S[i + 1] = S[i] + sigma[i] * (pts[i + 1] - pts[i]);

  ReverseHolderReport best;
  best.constant = std::numeric_limits<double>::infinity();
  for (double delta : deltas) {
    if (!(delta > 0.0))
      throw std::invalid_argument("reverse_holder_probe: deltas must be positive");
    std::vector<double> Sd(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      Sd[i + 1] = Sd[i] + std::pow(sigma[i], 1.0 + delta) * (pts[i + 1] - pts[i]);

    double worst = 0.0;
    std::size_t wb = 0, wc = 1;
    for (std::size_t ic = 1; ic <= n; ++ic) {
      double window_max = 0.0;  // backward windows anchored at pts[ic]
      for (std::size_t ib = ic; ib-- > 0;) {
        const double len = pts[ic] - pts[ib];
        window_max = std::max(window_max, (S[ic] - S[ib]) / len);
        const double ratio = (Sd[ic] - Sd[ib]) / len /
                             std::pow(window_max, 1.0 + delta);
        if (ratio > worst) {
          worst = ratio;
          wb = ib;
          wc = ic;
        }
      }
    }
    if (worst < best.constant) best = {delta, worst, wb, wc};
  }
  return best;
}

double doubling_probe(const Weight& w, double delta, std::size_t samples,
                      std::uint64_t seed) {
  if (samples < 1)
    throw std::invalid_argument("doubling_probe: samples must be positive");
  const std::size_t n = w.cells();
  if (n < 2) throw std::invalid_argument("doubling_probe: need >= 2 cells");
  const auto& pts = w.grid().breakpoints();
  std::vector<double> W(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    W[i + 1] = W[i] + w.value(i) * (pts[i + 1] - pts[i]);

  detail::Rng rng(seed);
  double best = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    std::size_t t[3];
    do {
      for (auto& x : t) x = rng.index(n + 1);
      std::sort(t, t + 3);
    } while (t[0] == t[1] || t[1] == t[2]);
    const std::size_t ia = t[0], ib = t[1], ic = t[2];

    double wS = 0.0, lenS = 0.0;
    for (std::size_t k = ia; k < ib; ++k) {
      if (rng.uniform() < 0.5) {
        wS += w.value(k) * (pts[k + 1] - pts[k]);
        lenS += pts[k + 1] - pts[k];
      }
    }
    if (lenS == 0.0) {
      const std::size_t k = ia + rng.index(ib - ia);
      wS = w.value(k) * (pts[k + 1] - pts[k]);
      lenS = pts[k + 1] - pts[k];
    }
    const double ratio = (wS / (W[ic] - W[ia])) /
                         std::pow(lenS / (pts[ic] - pts[ib]), delta);
    best = std::max(best, ratio);
  }
  return best;
}

OpennessReport openness_probe(const WeightSpec& spec, const Grid& base,
                              double p, const std::vector<double>& q_grid,
                              SawyerVariant variant, double stability_tol) {
  OpennessReport rep;
  rep.q = p;
  const Grid fine = refine(base, 2);
  for (std::size_t i = 0; i + 1 < q_grid.size(); ++i)
    if (!(q_grid[i] > q_grid[i + 1]))
      throw std::invalid_argument("openness_probe: q_grid must be decreasing");

  for (double q : q_grid) {
    if (!(q > 1.0 && q < p))
      throw std::invalid_argument("openness_probe: q_grid must lie in (1, p)");
    const Weight w0 = spec.materialize(base).weight;
    const Weight w1 = spec.materialize(fine).weight;
    const double c0 = sawyer_constant(w0, q, variant).constant;
    const double c1 = sawyer_constant(w1, q, variant).constant;
    const double growth = c1 / c0;
    const bool stable = std::isfinite(c0) && std::isfinite(c1) &&
                        growth < 1.0 + stability_tol;
    rep.trajectory.push_back({q, c0, c1, growth, stable});
    if (stable && (!rep.found_stable || q < rep.q)) {
      rep.q = q;
      rep.found_stable = true;
    }
  }
  return rep;
}

}  // namespace halfline
