#ifndef BMTRUNC_PERRON_HPP
#define BMTRUNC_PERRON_HPP

#include "bmtrunc/core.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace bmtrunc {

template <typename Scalar>
struct PerronResult {
  Scalar root = 0;
  VectorX<Scalar> vector;  // positive, max component 1
  Index iterations = 0;
};

/// Perron root and vector of a nonnegative primitive matrix by power
/// iteration. Convergence is judged on the Collatz-Wielandt bracket
/// min_i (Ax)_i / x_i <= rho <= max_i (Ax)_i / x_i.
template <typename Scalar>
PerronResult<Scalar> perron(const MatrixX<Scalar>& a, double rel_tol = 1e-14, Index max_iter = 100000) {
  const Index n = a.rows();
  if (n == 0 || a.cols() != n) throw DimensionMismatch("Perron iteration needs a square matrix");
  PerronResult<Scalar> res;
  VectorX<Scalar> x = VectorX<Scalar>::Ones(n);
  Scalar best_width = std::numeric_limits<Scalar>::infinity();
  Index stagnant = 0;
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  for (Index it = 1; it <= max_iter; ++it) {
    VectorX<Scalar> y = a * x;
    Scalar lo = std::numeric_limits<Scalar>::infinity();
    Scalar hi = 0;
    for (Index i = 0; i < n; ++i) {
      const Scalar r = y(i) / x(i);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    const Scalar top = y.maxCoeff();
    if (!(top > Scalar(0))) throw NoConvergence("matrix annihilates the iterate; it is not primitive");
    x = y / top;
    const Scalar width = hi - lo;
    if (width <= Scalar(rel_tol) * hi) {
      res.root = (lo + hi) / 2;
      res.vector = x;
      res.iterations = it;
      return res;
    }
    // Restart from a random positive vector when the bracket stops shrinking.
    if (width < Scalar(0.999) * best_width) {
      best_width = width;
      stagnant = 0;
    } else if (++stagnant > 200) {
      // At the roundoff floor a restart cannot help.
      if (width <= Scalar(1e-12) * hi) {
        res.root = (lo + hi) / 2;
        res.vector = x;
        res.iterations = it;
        return res;
      }
      for (Index i = 0; i < n; ++i) x(i) = Scalar(unif(rng));
      stagnant = 0;
      best_width = std::numeric_limits<Scalar>::infinity();
    }
  }
  throw NoConvergence("power iteration did not converge; the matrix may be reducible");
}

}  // namespace bmtrunc

#endif  // BMTRUNC_PERRON_HPP
