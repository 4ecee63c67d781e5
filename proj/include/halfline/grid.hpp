#pragma once

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace halfline {

/// Partition of [0, T] into cells [t_i, t_{i+1}) given by strictly increasing
/// breakpoints t_0 = 0 < t_1 < ... < t_n = T.  Immutable; copies share the
/// breakpoint array and are cheap to pass by value.
class Grid {
 public:
  explicit Grid(std::vector<double> breakpoints);

  std::size_t cells() const { return pts_->size() - 1; }
  std::size_t points() const { return pts_->size(); }
  double point(std::size_t i) const { return (*pts_)[i]; }
  double width(std::size_t cell) const {
    return (*pts_)[cell + 1] - (*pts_)[cell];
  }
  double total() const { return pts_->back(); }
  const std::vector<double>& breakpoints() const { return *pts_; }

  /// Index of the cell containing t, with t == T mapped to the last cell.
  /// Requires 0 <= t <= T.
  std::size_t locate(double t) const;

  bool same_breakpoints(const Grid& other) const;

 private:
  std::shared_ptr<const std::vector<double>> pts_;
};

Grid make_uniform_grid(double T, std::size_t n);

/// Breakpoints 0, first, first*rho, ..., T with rho = (T/first)^{1/(n-1)}.
/// Used to probe weights with a singularity at the origin.
Grid make_geometric_grid(double T, std::size_t n, double first);

/// Splits every cell into `factor` equal subcells; original breakpoints are
/// preserved exactly.
Grid refine(const Grid& g, std::size_t factor);

/// Breakpoints T - t_{n-k}; reflects [0,T] through its midpoint.
Grid reflect(const Grid& g);

/// Piecewise-constant scalar function on a Grid; values_[i] holds on
/// [t_i, t_{i+1}).  Carries a prefix-integral table so that integrate() is
/// O(log n) for arbitrary endpoints and exact at breakpoints.
class StepFunction {
 public:
  StepFunction(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t cells() const { return values_.size(); }
  double value(std::size_t cell) const { return values_[cell]; }
  const std::vector<double>& values() const { return values_; }

  /// Pointwise evaluation with the zero extension outside [0, T).
  double operator()(double t) const;

  /// Integral of f over [0, t_k].
  double prefix(std::size_t k) const { return prefix_[k]; }

 private:
  Grid grid_;
  std::vector<double> values_;
  std::vector<double> prefix_;
};

/// Exact integral over [a, b]; requires 0 <= a <= b <= T.
double integrate(const StepFunction& f, double a, double b);

/// Integral over [a, b] of the zero extension of f; a <= b arbitrary.
double integrate_zero_ext(const StepFunction& f, double a, double b);

StepFunction refine(const StepFunction& f, std::size_t factor);
StepFunction reflect(const StepFunction& f);

/// Cell averages of f on g; exact whenever g refines f's grid.
StepFunction resample(const StepFunction& f, const Grid& g);

template <class F>
StepFunction map(const StepFunction& f, F&& fn) {
  std::vector<double> v(f.values());
  for (double& x : v) x = fn(x);
  return StepFunction(f.grid(), std::move(v));
}

template <class F>
StepFunction zip(const StepFunction& f, const StepFunction& g, F&& fn) {
  std::vector<double> v(f.cells());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(f.value(i), g.value(i));
  return StepFunction(f.grid(), std::move(v));
}

/// Scalar step function with strictly positive, finite cell values.
class Weight {
 public:
  explicit Weight(StepFunction f);

  const StepFunction& fn() const { return f_; }
  const Grid& grid() const { return f_.grid(); }
  std::size_t cells() const { return f_.cells(); }
  double value(std::size_t cell) const { return f_.value(cell); }

 private:
  StepFunction f_;
};

/// d-dimensional step function; column i is the value on cell i.  The
/// pointwise magnitude is the Euclidean norm of the column.
class VectorStepFunction {
 public:
  VectorStepFunction(Grid grid, Eigen::MatrixXd values);

  const Grid& grid() const { return grid_; }
  std::size_t cells() const { return static_cast<std::size_t>(values_.cols()); }
  int dim() const { return static_cast<int>(values_.rows()); }
  Eigen::VectorXd value(std::size_t cell) const {
    return values_.col(static_cast<Eigen::Index>(cell));
  }
  const Eigen::MatrixXd& values() const { return values_; }

  StepFunction magnitude() const;

 private:
  Grid grid_;
  Eigen::MatrixXd values_;
};

VectorStepFunction refine(const VectorStepFunction& f, std::size_t factor);

}  // namespace halfline
