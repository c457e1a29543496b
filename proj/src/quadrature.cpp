#include "matchkit/quadrature.hpp"

#include <cmath>

#include "matchkit/errors.hpp"

namespace matchkit {
namespace {

struct Simpson {
  const std::function<double(double)>& f;
  int max_depth;

  static double rule(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  }

  double refine(double a, double b, double fa, double fm, double fb, double whole,
                double tol, int depth) const {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    if (!std::isfinite(flm) || !std::isfinite(frm))
      throw QuadratureFailure("integrand is not finite on the interval");
    const double left = rule(a, m, fa, flm, fm);
    const double right = rule(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth >= max_depth)
      throw QuadratureFailure("adaptive Simpson did not reach tolerance");
    return refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        QuadratureOptions options) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
    throw QuadratureFailure("integrand is not finite on the interval");
  const Simpson s{f, options.max_depth};
  const double whole = Simpson::rule(a, b, fa, fm, fb);
  return s.refine(a, b, fa, fm, fb, whole, options.abs_tol, 0);
}

}  // namespace matchkit
