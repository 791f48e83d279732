#include "fragwave/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fragwave/errors.hpp"

namespace fragwave {

RootResult brent_root(const std::function<double(double)>& f, double a, double b,
                      double fa, double fb, double f_tol, double x_tol,
                      int max_iter) {
  if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(fa) && std::isfinite(fb)))
    throw NumericalError("brent_root: non-finite bracket");
  if (fa * fb > 0.0) throw NumericalError("brent_root: endpoints do not bracket a root");
  if (std::abs(fa) <= f_tol) return {a, fa, 0};
  if (std::abs(fb) <= f_tol) return {b, fb, 0};

  // Invariant: b is the best estimate, [b, c] brackets the root.
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 1; iter <= max_iter; ++iter) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * x_tol;
    double xm = 0.5 * (c - b);
    if (std::abs(fb) <= f_tol || std::abs(xm) <= tol1) return {b, fb, iter};

    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      // Inverse quadratic interpolation, falling back to secant.
      double s = fb / fa, p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  throw NumericalError("brent_root: iteration cap exceeded");
}

}  // namespace fragwave
