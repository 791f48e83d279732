#pragma once

#include <functional>

namespace fragwave {

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

// Brent's method on a bracketing interval [a, b] with f(a) and f(b) of
// opposite sign.  Stops when |f| <= f_tol or the bracket shrinks below
// x_tol (absolute).  Throws NumericalError if the bracket is invalid or the
// iteration cap is hit first.
RootResult brent_root(const std::function<double(double)>& f, double a, double b,
                      double fa, double fb, double f_tol, double x_tol,
                      int max_iter = 200);

}  // namespace fragwave
