#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "halfline/grid.hpp"

namespace halfline {

/// Operator-valued kernel supported on { t > s >= 0 }.  evaluate must return
/// a dim_out x dim_in matrix for every t > s; cell_integral, when present,
/// returns the exact integral of K(t, .) over [s1, s2] and takes precedence
/// over quadrature.  singularity_order records the blowup exponent of
/// |K(t,s)| as t - s -> 0 and steers the graded quadrature fallback near the
/// diagonal.
struct KernelSpec {
  int dim_in = 1;
  int dim_out = 1;
  std::function<Eigen::MatrixXd(double t, double s)> evaluate;
  std::function<Eigen::MatrixXd(double t, double s1, double s2)> cell_integral;
  double singularity_order = 0.0;
  bool translation_invariant = false;  // enables caching of cell integrals
};

enum class ExpMethod { eigendecomposition, scaling_squaring };

/// Small real matrix A whose negative generates the semigroup e^{-tA}.
/// Sectorial here means every eigenvalue has positive real part, which for
/// matrices gives |A e^{-uA}| <= C/u on u bounded away from 0 and decay at
/// infinity.  The exponential uses the eigendecomposition when it is well
/// conditioned and scaling-and-squaring (Pade) otherwise; the choice is
/// recorded and queryable.
class MatrixGenerator {
 public:
  explicit MatrixGenerator(Eigen::MatrixXd A);

  const Eigen::MatrixXd& matrix() const { return A_; }
  int dim() const { return static_cast<int>(A_.rows()); }
  bool sectorial() const { return sectorial_; }
  bool invertible() const { return invertible_; }
  ExpMethod exp_method() const { return method_; }
  Eigen::VectorXcd eigenvalues() const { return eigenvalues_; }
  double operator_norm() const { return op_norm_; }

  Eigen::MatrixXd exp_neg(double u) const;  // e^{-uA}
  Eigen::MatrixXd inverse() const;

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXcd eigenvalues_;
  Eigen::MatrixXcd V_, Vinv_;
  ExpMethod method_ = ExpMethod::scaling_squaring;
  bool sectorial_ = false;
  bool invertible_ = false;
  double op_norm_ = 0.0;
};

/// K(t,s) = A e^{-(t-s)A} with the exact cell integral
/// e^{-(t-s2)A} - e^{-(t-s1)A}.  Requires a sectorial generator.
KernelSpec semigroup_kernel(const MatrixGenerator& A);

enum class DiniCondition { d1_plus, dr_prime_plus };

struct DiniProbePlan {
  std::vector<double> h_values;
  std::vector<double> anchors;  // s values (d1_plus) or t values (dr_prime_plus)

  static DiniProbePlan log_spaced(double h_min, double h_max, int per_octave,
                                  std::vector<double> anchors);
};

struct DiniEstimate {
  double estimate = 0.0;
  double truncation_bound = 0.0;
  double witness_h = 0.0;
  double witness_anchor = 0.0;
};

/// Dyadic-shell regularity constants.  d1_plus estimates
///   sup_{s,h} sum_{m=1}^{M} int_{2^m h < t-s <= 2^{m+1} h} |K(t,s) - K(t,s+h)| dt,
/// dr_prime_plus the h^{1/r'} sum 2^{m/r'} ( int |K(t,s) - K(t-h,s)|^r ds )^{1/r}
/// analogue over s-shells clipped to s >= 0.  The sup runs over the probe
/// plan only, so the estimate is a lower bound; truncation_bound extrapolates
/// the dropped shells m > M geometrically from the observed decay.
DiniEstimate dini_constant(const KernelSpec& K, DiniCondition cond, double r,
                           int shells, const DiniProbePlan& plan);

/// Tf(t_i) = sum_j ( int_{cell_j, s < t_i} K(t_i, s) ds ) f_j at every left
/// endpoint; exact when the kernel carries exact cell integrals.  Throws
/// (reporting the offending cell) if the quadrature fallback cannot reach
/// 1e-6 relative accuracy.
VectorStepFunction apply_sio(const KernelSpec& K, const VectorStepFunction& f);

struct DuhamelSolution {
  VectorStepFunction u;
  VectorStepFunction Au;
  VectorStepFunction u_dot;
};

/// Exact step-data solution of u' + Au = f, u(0) = 0:
///   u(t_i)  = sum_j A^{-1}( e^{-(t_i - s_{j+1})A} - e^{-(t_i - s_j)A} ) f_j,
///   Au(t_i) = the same sum without A^{-1}, and u_dot = f - Au.
/// Requires a sectorial, invertible generator.
DuhamelSolution duhamel_solve(const MatrixGenerator& A,
                              const VectorStepFunction& f);

}  // namespace halfline
