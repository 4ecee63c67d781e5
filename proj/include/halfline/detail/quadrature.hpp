#pragma once

#include <cmath>
#include <cstddef>
#include <type_traits>

namespace halfline::detail {

template <class V>
double quad_norm(const V& v) {
  if constexpr (std::is_arithmetic_v<V>)
    return std::fabs(v);
  else
    return v.norm();
}

/// Adaptive Simpson with Richardson correction.  `ok` is cleared if any leaf
/// bottoms out at max_depth with its error estimate above the local budget.
template <class F, class V = std::invoke_result_t<F, double>>
V adaptive_simpson(F&& f, double a, double b, double abs_tol, int max_depth,
                   bool& ok) {
  struct Impl {
    F& f;
    bool& ok;
    int max_depth;
    V run(double a, double m, double b, const V& fa, const V& fm, const V& fb,
          const V& whole, double tol, int depth) {
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const V flm = f(lm), frm = f(rm);
      const V left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const V right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const V delta = left + right - whole;
      if (quad_norm(delta) <= 15.0 * tol || depth >= max_depth) {
        if (depth >= max_depth && quad_norm(delta) > 15.0 * tol) ok = false;
        return left + right + delta / 15.0;
      }
      return run(a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
             run(m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }
  };
  const double m = 0.5 * (a + b);
  const V fa = f(a), fm = f(m), fb = f(b);
  const V whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  Impl impl{f, ok, max_depth};
  return impl.run(a, m, b, fa, fm, fb, whole, abs_tol, 0);
}

template <class F, class V = std::invoke_result_t<F, double>>
V adaptive_simpson(F&& f, double a, double b, double abs_tol,
                   int max_depth = 28) {
  bool ok = true;
  return adaptive_simpson(f, a, b, abs_tol, max_depth, ok);
}

}  // namespace halfline::detail
