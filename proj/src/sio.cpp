#include "halfline/sio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "halfline/detail/quadrature.hpp"

namespace halfline {

namespace {

double matrix_operator_norm(const Eigen::MatrixXd& M) {
  if (M.rows() == 1 && M.cols() == 1) return std::fabs(M(0, 0));
  return Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0);
}

std::uint64_t key_of(double x) {
  std::uint64_t k;
  std::memcpy(&k, &x, sizeof(k));
  return k;
}

struct PairHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const {
    return std::hash<std::uint64_t>{}(p.first * 0x9e3779b97f4a7c15ULL ^ p.second);
  }
};

}  // namespace

MatrixGenerator::MatrixGenerator(Eigen::MatrixXd A) : A_(std::move(A)) {
  if (A_.rows() != A_.cols() || A_.rows() < 1)
    throw std::invalid_argument("MatrixGenerator: square matrix required");
  op_norm_ = matrix_operator_norm(A_);

  Eigen::EigenSolver<Eigen::MatrixXd> es(A_);
  eigenvalues_ = es.eigenvalues();
  sectorial_ = true;
  double min_abs = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) {
    if (!(eigenvalues_(k).real() > 0.0)) sectorial_ = false;
    min_abs = std::min(min_abs, std::abs(eigenvalues_(k)));
  }
  invertible_ = min_abs > 1e-12 * std::max(1.0, op_norm_);

  Eigen::MatrixXcd V = es.eigenvectors();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V);
  const double cond = svd.singularValues()(0) /
                      svd.singularValues()(svd.singularValues().size() - 1);
  if (es.info() == Eigen::Success && std::isfinite(cond) && cond < 1e8) {
    method_ = ExpMethod::eigendecomposition;
    V_ = V;
    Vinv_ = V.inverse();
  } else {
    method_ = ExpMethod::scaling_squaring;
  }
}

Eigen::MatrixXd MatrixGenerator::exp_neg(double u) const {
  if (method_ == ExpMethod::eigendecomposition) {
    Eigen::VectorXcd d(eigenvalues_.size());
    for (Eigen::Index k = 0; k < d.size(); ++k)
      d(k) = std::exp(-u * eigenvalues_(k));
    return (V_ * d.asDiagonal() * Vinv_).real();
  }
  return (-u * A_).exp();
}

Eigen::MatrixXd MatrixGenerator::inverse() const {
  if (!invertible_)
    throw std::invalid_argument("MatrixGenerator: matrix is singular");
  return A_.inverse();
}

KernelSpec semigroup_kernel(const MatrixGenerator& A) {
  if (!A.sectorial())
    throw std::invalid_argument("semigroup_kernel: generator is not sectorial");
  KernelSpec K;
  K.dim_in = K.dim_out = A.dim();
  K.singularity_order = 1.0;
  K.translation_invariant = true;
  K.evaluate = [A](double t, double s) { return A.matrix() * A.exp_neg(t - s); };
  K.cell_integral = [A](double t, double s1, double s2) {
    return A.exp_neg(t - s2) - A.exp_neg(t - s1);
  };
  return K;
}

DiniProbePlan DiniProbePlan::log_spaced(double h_min, double h_max,
                                        int per_octave,
                                        std::vector<double> anchors) {
  if (!(h_min > 0.0) || !(h_max >= h_min) || per_octave < 1)
    throw std::invalid_argument("DiniProbePlan: bad h range");
  DiniProbePlan plan;
  plan.anchors = std::move(anchors);
  const double step = std::pow(2.0, 1.0 / per_octave);
  for (double h = h_min; h <= h_max * (1.0 + 1e-12); h *= step)
    plan.h_values.push_back(h);
  return plan;
}

DiniEstimate dini_constant(const KernelSpec& K, DiniCondition cond, double r,
                           int shells, const DiniProbePlan& plan) {
  if (shells < 1) throw std::invalid_argument("dini_constant: shells >= 1");
  if (plan.h_values.empty() || plan.anchors.empty())
    throw std::invalid_argument("dini_constant: empty probe plan");
  if (cond == DiniCondition::dr_prime_plus && !(r > 1.0))
    throw std::invalid_argument("dini_constant: r must exceed 1");

  const double rp = (cond == DiniCondition::d1_plus) ? 0.0 : r / (r - 1.0);
  DiniEstimate out;
  double worst_tail = 0.0;

  for (double anchor : plan.anchors) {
    for (double h : plan.h_values) {
      double total = 0.0;
      double prev_term = -1.0, last_term = -1.0;
      for (int m = 1; m <= shells; ++m) {
        const double lo_off = std::ldexp(h, m);
        const double hi_off = std::ldexp(h, m + 1);
        double term = 0.0;
        if (cond == DiniCondition::d1_plus) {
          const double s = anchor;
          auto g = [&](double t) {
            return matrix_operator_norm(K.evaluate(t, s) - K.evaluate(t, s + h));
          };
          term = detail::adaptive_simpson(g, s + lo_off, s + hi_off, 1e-11);
        } else {
          const double t = anchor;
          const double lo = std::max(0.0, t - hi_off);
          const double hi = t - lo_off;
          if (hi > lo) {
            auto g = [&](double s) {
              return std::pow(
                  matrix_operator_norm(K.evaluate(t, s) - K.evaluate(t - h, s)), r);
            };
            const double integral = detail::adaptive_simpson(g, lo, hi, 1e-12);
            term = std::pow(h, 1.0 / rp) * std::pow(2.0, m / rp) *
                   std::pow(std::max(integral, 0.0), 1.0 / r);
          }
        }
        total += term;
        prev_term = last_term;
        last_term = term;
      }
      if (total > out.estimate) {
        out.estimate = total;
        out.witness_h = h;
        out.witness_anchor = anchor;
      }
      // geometric extrapolation of the dropped shells
      if (last_term > 0.0 && prev_term > 0.0) {
        const double rho = last_term / prev_term;
        worst_tail = std::max(worst_tail,
                              rho < 1.0
                                  ? last_term * rho / (1.0 - rho)
                                  : std::numeric_limits<double>::infinity());
      }
    }
  }
  out.truncation_bound = worst_tail;
  return out;
}

namespace {

Eigen::MatrixXd kernel_cell_integral(const KernelSpec& K, double t, double s1,
                                     double s2, std::size_t cell) {
  if (K.cell_integral) return K.cell_integral(t, s1, s2);

  auto integrate_patch = [&](double a, double b) {
    bool ok = true;
    auto g = [&](double s) { return K.evaluate(t, s); };
    Eigen::MatrixXd val =
        detail::adaptive_simpson(g, a, b, 1e-10, 28, ok);
    if (!ok) {
      std::ostringstream os;
      os << "apply_sio: quadrature failed on cell " << cell << " = [" << s1
         << ", " << s2 << ") at t = " << t;
      throw std::runtime_error(os.str());
    }
    return val;
  };

  const bool touches_diagonal = s2 >= t - 1e-14 * std::max(1.0, t);
  if (!(K.singularity_order > 0.0) || !touches_diagonal)
    return integrate_patch(s1, s2);

  // graded subdivision towards the diagonal endpoint
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(K.dim_out, K.dim_in);
  const double width = s2 - s1;
  double lo = s1;
  for (int k = 1; k <= 30 && lo < s2; ++k) {
    const double hi = (k == 30) ? s2 : s2 - width * std::ldexp(1.0, -k);
    if (hi > lo) acc += integrate_patch(lo, hi);
    lo = hi;
  }
  return acc;
}

}  // namespace

VectorStepFunction apply_sio(const KernelSpec& K, const VectorStepFunction& f) {
  if (K.dim_in != f.dim())
    throw std::invalid_argument("apply_sio: kernel/input dimension mismatch");
  const Grid& g = f.grid();
  const std::size_t n = f.cells();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(K.dim_out, static_cast<Eigen::Index>(n));

  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, Eigen::MatrixXd,
                     PairHash>
      cache;
  for (std::size_t i = 1; i < n; ++i) {
    const double t = g.point(i);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(K.dim_out);
    for (std::size_t j = 0; j < i; ++j) {
      const double s1 = g.point(j), s2 = g.point(j + 1);
      if (K.translation_invariant) {
        const auto key = std::make_pair(key_of(t - s1), key_of(t - s2));
        auto it = cache.find(key);
        if (it == cache.end())
          it = cache.emplace(key, kernel_cell_integral(K, t, s1, s2, j)).first;
        acc += it->second * f.value(j);
      } else {
        acc += kernel_cell_integral(K, t, s1, s2, j) * f.value(j);
      }
    }
    out.col(static_cast<Eigen::Index>(i)) = acc;
  }
  return VectorStepFunction(g, std::move(out));
}

DuhamelSolution duhamel_solve(const MatrixGenerator& A,
                              const VectorStepFunction& f) {
  if (!A.sectorial())
    throw std::invalid_argument("duhamel_solve: generator is not sectorial");
  if (!A.invertible())
    throw std::invalid_argument("duhamel_solve: generator is singular");
  if (A.dim() != f.dim())
    throw std::invalid_argument("duhamel_solve: dimension mismatch");

  const Grid& g = f.grid();
  const std::size_t n = f.cells();
  const Eigen::MatrixXd Ainv = A.inverse();

  std::unordered_map<std::uint64_t, Eigen::MatrixXd> cache;
  auto E = [&](double u) -> const Eigen::MatrixXd& {
    const std::uint64_t key = key_of(u);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, A.exp_neg(u)).first;
    return it->second;
  };

  Eigen::MatrixXd u_vals = Eigen::MatrixXd::Zero(A.dim(), static_cast<Eigen::Index>(n));
  Eigen::MatrixXd Au_vals = Eigen::MatrixXd::Zero(A.dim(), static_cast<Eigen::Index>(n));
  for (std::size_t i = 1; i < n; ++i) {
    const double t = g.point(i);
    Eigen::VectorXd au = Eigen::VectorXd::Zero(A.dim());
    Eigen::VectorXd uu = Eigen::VectorXd::Zero(A.dim());
    for (std::size_t j = 0; j < i; ++j) {
      const Eigen::MatrixXd D = E(t - g.point(j + 1)) - E(t - g.point(j));
      const Eigen::VectorXd Df = D * f.value(j);
      au += Df;
      uu += Ainv * Df;
    }
    u_vals.col(static_cast<Eigen::Index>(i)) = uu;
    Au_vals.col(static_cast<Eigen::Index>(i)) = au;
  }
  Eigen::MatrixXd dot_vals = f.values() - Au_vals;
  return {VectorStepFunction(g, std::move(u_vals)),
          VectorStepFunction(g, std::move(Au_vals)),
          VectorStepFunction(g, std::move(dot_vals))};
}

}  // namespace halfline
