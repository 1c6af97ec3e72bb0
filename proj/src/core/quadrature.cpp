#include "core/quadrature.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace schedlaw {

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double recurse(const std::function<double(double)>& f, double a, double b,
               double fa, double fm, double fb, double whole, double abs_tol,
               double rel_tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double fine = left + right;
  const double err = (fine - whole) / 15.0;
  if (depth <= 0) {
    if (std::abs(err) > 1e3 * (abs_tol + rel_tol * std::abs(fine))) {
      throw numeric_error("adaptive Simpson failed to converge");
    }
    return fine + err;
  }
  if (std::abs(err) <= abs_tol + rel_tol * std::abs(fine)) {
    return fine + err;
  }
  return recurse(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, rel_tol,
                 depth - 1) +
         recurse(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, rel_tol,
                 depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, double rel_tol,
                        int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = simpson(fa, fm, fb, b - a);
  return recurse(f, a, b, fa, fm, fb, whole, abs_tol, rel_tol, max_depth);
}

}  // namespace schedlaw
