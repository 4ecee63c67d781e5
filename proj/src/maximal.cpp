#include "halfline/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace halfline {

namespace {

// For points (x_k, y_k) with strictly increasing x, returns for every k the
// maximum slope (y_j - y_k)/(x_j - x_k) over j > k (last entry: -inf).
//
// With y the prefix integral of |f| and x the breakpoints, the window average
// over [x_k, x_k + h] equals (y(x_k + h) - y_k)/h, and between breakpoints y
// is affine, so the average is v + c/h for constants v, c: monotone in h.
// The supremum over all h > 0 is therefore attained at a breakpoint width (or
// in the h -> 0 limit, handled by the caller), and equals the best slope from
// (x_k, y_k) to a later point.  Those maxima are answered on the upper convex
// hull of the later points, built right to left, with a binary search for the
// tangent vertex per query.
std::vector<double> max_slope_right(const std::vector<double>& xs,
                                    const std::vector<double>& ys) {
  const std::size_t m = xs.size();
  std::vector<double> out(m, -std::numeric_limits<double>::infinity());
  if (m < 2) return out;

  // hull[0] is the rightmost vertex; the back is the leftmost inserted.
  std::vector<std::size_t> hull;
  hull.reserve(m);

  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) -> long double {
    const long double ax = xs[a] - (long double)xs[o];
    const long double ay = ys[a] - (long double)ys[o];
    const long double bx = xs[b] - (long double)xs[o];
    const long double by = ys[b] - (long double)ys[o];
    return ax * by - ay * bx;
  };
  auto slope = [&](std::size_t from, std::size_t to) -> double {
    return (ys[to] - ys[from]) / (xs[to] - xs[from]);
  };

  for (std::size_t k = m; k-- > 0;) {
    if (k + 1 < m) {
      // insert point k+1 as the new leftmost hull candidate
      const std::size_t p = k + 1;
      while (hull.size() >= 2 &&
             cross(p, hull[hull.size() - 1], hull[hull.size() - 2]) >= 0.0L)
        hull.pop_back();
      hull.push_back(p);

      // slopes from (x_k, y_k) to hull vertices are unimodal in the
      // left-to-right order, i.e. from hull.back() towards hull[0]
      std::size_t lo = 0, hi = hull.size() - 1;  // positions from the left
      auto vert = [&](std::size_t pos) { return hull[hull.size() - 1 - pos]; };
      while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (slope(k, vert(mid + 1)) >= slope(k, vert(mid)))
          lo = mid + 1;
        else
          hi = mid;
      }
      // guard against near-collinear ties: check a small neighbourhood
      double best = slope(k, vert(lo));
      for (std::size_t d = 1; d <= 2; ++d) {
        if (lo >= d) best = std::max(best, slope(k, vert(lo - d)));
        if (lo + d < hull.size()) best = std::max(best, slope(k, vert(lo + d)));
      }
      out[k] = best;
    }
  }
  return out;
}

std::vector<double> abs_values(const StepFunction& f) {
  std::vector<double> a(f.values());
  for (double& v : a) v = std::fabs(v);
  return a;
}

// Direct zero-extended integral by per-cell scan; no prefix tables.  Kept as
// an independent path for the sharp-maximal scan oracle.
double direct_integral(const StepFunction& f, double a, double b) {
  double s = 0.0;
  for (std::size_t k = 0; k < f.cells(); ++k) {
    const double lo = std::max(a, f.grid().point(k));
    const double hi = std::min(b, f.grid().point(k + 1));
    if (hi > lo) s += f.value(k) * (hi - lo);
  }
  return s;
}

// Fenwick trees over value ranks holding (sum of lengths, sum of value*length)
// so that \int (f - c)^+ over the inserted cells is a suffix query.
class PositivePartSums {
 public:
  explicit PositivePartSums(std::vector<double> sorted_unique)
      : vals_(std::move(sorted_unique)),
        len_(vals_.size() + 1, 0.0),
        vlen_(vals_.size() + 1, 0.0) {}

  void clear() {
    std::fill(len_.begin(), len_.end(), 0.0);
    std::fill(vlen_.begin(), vlen_.end(), 0.0);
    total_len_ = total_vlen_ = 0.0;
  }

  void add(double value, double length) {
    std::size_t r = static_cast<std::size_t>(
        std::lower_bound(vals_.begin(), vals_.end(), value) - vals_.begin());
    for (std::size_t i = r + 1; i < len_.size(); i += i & (~i + 1)) {
      len_[i] += length;
      vlen_[i] += value * length;
    }
    total_len_ += length;
    total_vlen_ += value * length;
  }

  // \sum_{value_k > c} (value_k - c) * length_k over inserted cells
  double positive_part(double c) const {
    std::size_t r = static_cast<std::size_t>(
        std::upper_bound(vals_.begin(), vals_.end(), c) - vals_.begin());
    double len = 0.0, vlen = 0.0;  // prefix over ranks < r (values <= c)
    for (std::size_t i = r; i > 0; i -= i & (~i + 1)) {
      len += len_[i];
      vlen += vlen_[i];
    }
    return (total_vlen_ - vlen) - c * (total_len_ - len);
  }

 private:
  std::vector<double> vals_;
  std::vector<double> len_, vlen_;
  double total_len_ = 0.0, total_vlen_ = 0.0;
};

template <class Candidate>
void for_each_sharp_candidate(const Grid& g, std::size_t i,
                              const SharpOptions& opts, Candidate&& cand) {
  // Breakpoint-aligned widths t_j - t_i, each gap subdivided, then a tail of
  // doubling widths past T so windows reaching into the zero extension are
  // represented.  cand(last_full_cell_exclusive, h).
  const std::size_t n = g.cells();
  const double t = g.point(i);
  const int R = std::max(1, opts.subdivisions);
  double prev = 0.0;
  for (std::size_t j = i + 1; j <= n; ++j) {
    const double cur = g.point(j) - t;
    for (int k = 1; k <= R; ++k) {
      const double h = (k == R) ? cur : prev + (cur - prev) * k / R;
      cand(j - 1, h);
    }
    prev = cur;
  }
  const double H = g.total() - t;
  double lo = H;
  while (lo < opts.tail_factor * H - 1e-15 * H) {
    const double hi = std::min(2.0 * lo, opts.tail_factor * H);
    for (int k = 1; k <= R; ++k) cand(n, lo + (hi - lo) * k / R);
    lo = hi;
  }
}

StepFunction sharp_forward_fast(const StepFunction& f, const SharpOptions& opts) {
  const Grid& g = f.grid();
  const std::size_t n = f.cells();
  const double T = g.total();

  std::vector<double> sorted(f.values());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  PositivePartSums acc(std::move(sorted));

  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    acc.clear();
    std::size_t filled = i;  // cells [i, filled) are in acc
    double best = 0.0;
    const double t = g.point(i);
    for_each_sharp_candidate(g, i, opts, [&](std::size_t part, double h) {
      while (filled < part) {
        acc.add(f.value(filled), g.width(filled));
        ++filled;
      }
      const double c = integrate_zero_ext(f, t + h, t + 2.0 * h) / h;
      double num = acc.positive_part(c);
      if (part < n) {
        const double plen = t + h - g.point(part);
        if (plen > 0.0 && f.value(part) > c) num += (f.value(part) - c) * plen;
      } else {
        const double plen = t + h - T;
        if (plen > 0.0 && c < 0.0) num += -c * plen;
      }
      best = std::max(best, num / h);
    });
    out[i] = best;
  }
  return StepFunction(g, std::move(out));
}

StepFunction sharp_forward_scan(const StepFunction& f, const SharpOptions& opts) {
  const Grid& g = f.grid();
  const std::size_t n = f.cells();
  const double T = g.total();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double best = 0.0;
    const double t = g.point(i);
    for_each_sharp_candidate(g, i, opts, [&](std::size_t, double h) {
      const double c = direct_integral(f, t + h, t + 2.0 * h) / h;
      double num = 0.0;
      for (std::size_t k = i; k < n; ++k) {
        const double lo = g.point(k);
        const double hi = std::min(g.point(k + 1), t + h);
        if (hi <= lo) break;
        if (f.value(k) > c) num += (f.value(k) - c) * (hi - lo);
      }
      if (t + h > T && c < 0.0) num += -c * (t + h - T);
      best = std::max(best, num / h);
    });
    out[i] = best;
  }
  return StepFunction(g, std::move(out));
}

}  // namespace

Side opposite(Side s) {
  return s == Side::forward ? Side::backward : Side::forward;
}

StepFunction one_sided_maximal(const StepFunction& f, Side side) {
  const Grid& g = f.grid();
  const std::size_t n = f.cells();
  const std::vector<double> a = abs_values(f);

  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    prefix[i + 1] = prefix[i] + a[i] * g.width(i);

  std::vector<double> xs(n + 1), ys(n + 1);
  if (side == Side::forward) {
    for (std::size_t k = 0; k <= n; ++k) {
      xs[k] = g.point(k);
      ys[k] = prefix[k];
    }
  } else {
    // Backward windows at t_i maximise (P_i - P_j)/(t_i - t_j) over j < i,
    // which is a max-slope-to-the-right problem in reversed, negated
    // coordinates.
    for (std::size_t k = 0; k <= n; ++k) {
      xs[k] = -g.point(n - k);
      ys[k] = -prefix[n - k];
    }
  }
  const std::vector<double> slopes = max_slope_right(xs, ys);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double win = (side == Side::forward) ? slopes[i] : slopes[n - i];
    out[i] = std::max(a[i], win);
  }
  return StepFunction(g, std::move(out));
}

StepFunction one_sided_maximal(const VectorStepFunction& f, Side side) {
  return one_sided_maximal(f.magnitude(), side);
}

StepFunction one_sided_maximal_oracle(const StepFunction& f, Side side) {
  const Grid& g = f.grid();
  const std::size_t n = f.cells();
  const std::vector<double> a = abs_values(f);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = a[i];
    double s = 0.0;
    if (side == Side::forward) {
      for (std::size_t j = i; j < n; ++j) {
        s += a[j] * g.width(j);
        best = std::max(best, s / (g.point(j + 1) - g.point(i)));
      }
    } else {
      for (std::size_t j = i; j-- > 0;) {
        s += a[j] * g.width(j);
        best = std::max(best, s / (g.point(i) - g.point(j)));
      }
    }
    out[i] = best;
  }
  return StepFunction(g, std::move(out));
}

StepFunction power_maximal(const StepFunction& f, double r, Side side) {
  if (!(r >= 1.0))
    throw std::invalid_argument("power_maximal: r must be at least 1");
  if (r == 1.0) return one_sided_maximal(f, side);
  StepFunction powered =
      map(f, [r](double v) { return std::pow(std::fabs(v), r); });
  StepFunction m = one_sided_maximal(powered, side);
  return map(m, [r](double v) { return std::pow(v, 1.0 / r); });
}

StepFunction sharp_maximal(const StepFunction& f, Side side,
                           const SharpOptions& opts) {
  if (side == Side::forward) return sharp_forward_fast(f, opts);
  StepFunction fwd = sharp_forward_fast(reflect(f), opts);
  const std::size_t n = f.cells();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) out[i] = fwd.value(n - i);
  return StepFunction(f.grid(), std::move(out));
}

StepFunction sharp_maximal_scan(const StepFunction& f, Side side,
                                const SharpOptions& opts) {
  if (side == Side::forward) return sharp_forward_scan(f, opts);
  StepFunction fwd = sharp_forward_scan(reflect(f), opts);
  const std::size_t n = f.cells();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) out[i] = fwd.value(n - i);
  return StepFunction(f.grid(), std::move(out));
}

}  // namespace halfline
