#include "halfline/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace halfline {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

Grid::Grid(std::vector<double> breakpoints) {
  require(breakpoints.size() >= 2, "grid: need at least two breakpoints");
  require(breakpoints.front() == 0.0, "grid: first breakpoint must be 0");
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    require(std::isfinite(breakpoints[i + 1]) &&
                breakpoints[i + 1] > breakpoints[i],
            "grid: breakpoints must be finite and strictly increasing");
  }
  pts_ = std::make_shared<const std::vector<double>>(std::move(breakpoints));
}

std::size_t Grid::locate(double t) const {
  const auto& p = *pts_;
  require(t >= 0.0 && t <= p.back(), "grid: point outside [0, T]");
  if (t >= p[p.size() - 2]) return p.size() - 2;
  auto it = std::upper_bound(p.begin(), p.end(), t);
  return static_cast<std::size_t>(it - p.begin()) - 1;
}

bool Grid::same_breakpoints(const Grid& other) const {
  return pts_ == other.pts_ || *pts_ == *other.pts_;
}

Grid make_uniform_grid(double T, std::size_t n) {
  require(std::isfinite(T) && T > 0.0, "make_uniform_grid: T must be positive");
  require(n >= 1, "make_uniform_grid: n must be positive");
  std::vector<double> pts(n + 1);
  for (std::size_t k = 0; k <= n; ++k)
    pts[k] = T * static_cast<double>(k) / static_cast<double>(n);
  pts[0] = 0.0;
  pts[n] = T;
  return Grid(std::move(pts));
}

Grid make_geometric_grid(double T, std::size_t n, double first) {
  require(T > 0.0 && first > 0.0 && first < T,
          "make_geometric_grid: need 0 < first < T");
  require(n >= 2, "make_geometric_grid: need at least two cells");
  std::vector<double> pts(n + 1);
  pts[0] = 0.0;
  const double rho = std::pow(T / first, 1.0 / static_cast<double>(n - 1));
  double t = first;
  for (std::size_t k = 1; k < n; ++k, t *= rho) pts[k] = t;
  pts[n] = T;
  return Grid(std::move(pts));
}

Grid refine(const Grid& g, std::size_t factor) {
  require(factor >= 1, "refine: factor must be positive");
  if (factor == 1) return g;
  const auto& p = g.breakpoints();
  std::vector<double> pts;
  pts.reserve(g.cells() * factor + 1);
  for (std::size_t i = 0; i < g.cells(); ++i) {
    pts.push_back(p[i]);
    const double w = p[i + 1] - p[i];
    for (std::size_t k = 1; k < factor; ++k)
      pts.push_back(p[i] + w * static_cast<double>(k) / static_cast<double>(factor));
  }
  pts.push_back(p.back());
  return Grid(std::move(pts));
}

Grid reflect(const Grid& g) {
  const auto& p = g.breakpoints();
  const double T = g.total();
  std::vector<double> pts(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) pts[k] = T - p[p.size() - 1 - k];
  pts[0] = 0.0;
  pts[p.size() - 1] = T;
  return Grid(std::move(pts));
}

StepFunction::StepFunction(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(values_.size() == grid_.cells(),
          "step function: one value per cell required");
  for (double v : values_)
    require(std::isfinite(v), "step function: values must be finite");
  prefix_.resize(values_.size() + 1);
  prefix_[0] = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i)
    prefix_[i + 1] = prefix_[i] + values_[i] * grid_.width(i);
}

double StepFunction::operator()(double t) const {
  if (t < 0.0 || t >= grid_.total()) return 0.0;
  return values_[grid_.locate(t)];
}

double integrate(const StepFunction& f, double a, double b) {
  if (!(a >= 0.0 && a <= b && b <= f.grid().total()))
    throw std::invalid_argument("integrate: need 0 <= a <= b <= T");
  return integrate_zero_ext(f, a, b);
}

namespace {

// Integral of f over [0, x].  Reduces to the pure prefix value when x is a
// breakpoint, so that integrate(f, t_j, t_k) is exactly P_k - P_j.
double prefix_integral(const StepFunction& f, double x) {
  const std::size_t i = f.grid().locate(x);
  return f.prefix(i) + f.value(i) * (x - f.grid().point(i));
}

}  // namespace

double integrate_zero_ext(const StepFunction& f, double a, double b) {
  const double T = f.grid().total();
  a = std::max(a, 0.0);
  b = std::min(b, T);
  if (!(a < b)) return 0.0;
  return prefix_integral(f, b) - prefix_integral(f, a);
}

StepFunction refine(const StepFunction& f, std::size_t factor) {
  Grid g = refine(f.grid(), factor);
  if (factor == 1) return f;
  std::vector<double> v;
  v.reserve(f.cells() * factor);
  for (std::size_t i = 0; i < f.cells(); ++i)
    v.insert(v.end(), factor, f.value(i));
  return StepFunction(std::move(g), std::move(v));
}

StepFunction reflect(const StepFunction& f) {
  std::vector<double> v(f.values().rbegin(), f.values().rend());
  return StepFunction(reflect(f.grid()), std::move(v));
}

StepFunction resample(const StepFunction& f, const Grid& g) {
  if (f.grid().same_breakpoints(g)) return StepFunction(g, f.values());
  if (g.total() != f.grid().total())
    throw std::invalid_argument("resample: grids must span the same interval");
  std::vector<double> v(g.cells());
  for (std::size_t i = 0; i < g.cells(); ++i)
    v[i] = integrate(f, g.point(i), g.point(i + 1)) / g.width(i);
  return StepFunction(g, std::move(v));
}

Weight::Weight(StepFunction f) : f_(std::move(f)) {
  for (double v : f_.values())
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("weight: cell values must be positive and finite");
}

VectorStepFunction::VectorStepFunction(Grid grid, Eigen::MatrixXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.cols()) != grid_.cells())
    throw std::invalid_argument("vector step function: one column per cell");
  if (!values_.allFinite())
    throw std::invalid_argument("vector step function: values must be finite");
}

StepFunction VectorStepFunction::magnitude() const {
  std::vector<double> v(cells());
  for (std::size_t i = 0; i < cells(); ++i)
    v[i] = values_.col(static_cast<Eigen::Index>(i)).norm();
  return StepFunction(grid_, std::move(v));
}

VectorStepFunction refine(const VectorStepFunction& f, std::size_t factor) {
  Grid g = refine(f.grid(), factor);
  if (factor == 1) return f;
  Eigen::MatrixXd v(f.dim(), static_cast<Eigen::Index>(f.cells() * factor));
  for (std::size_t i = 0; i < f.cells(); ++i)
    for (std::size_t k = 0; k < factor; ++k)
      v.col(static_cast<Eigen::Index>(i * factor + k)) =
          f.values().col(static_cast<Eigen::Index>(i));
  return VectorStepFunction(std::move(g), std::move(v));
}

}  // namespace halfline
