#ifndef BMTRUNC_SOLVE_HPP
#define BMTRUNC_SOLVE_HPP

// Stationary and transient solvers for finite conservative generators,
// plus the distances used to compare their outputs.

#include "bmtrunc/core.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace bmtrunc {

enum class DistributionSource { Reference, LastColumn, FirstColumn, Custom, Phase, Other };
std::string to_string(DistributionSource s);

struct DistributionVector {
  Index d = 1;
  Vector values;  // pi(k, i) stored at k * d + i
  DistributionSource source = DistributionSource::Other;
  Index n = -1;  // truncation level, -1 when not applicable

  Index levels() const { return values.size() / d; }
  double operator()(Index k, Index i) const { return values(k * d + i); }
  /// Per-phase marginal: sum over levels.
  Vector phase_marginal() const;
};

/// Stationary row vector of a finite conservative generator by
/// subtraction-free state elimination, highest index first.
template <typename Scalar>
RowVectorX<Scalar> gth_stationary(const MatrixX<Scalar>& g) {
  const Index n = g.rows();
  if (g.cols() != n) throw DimensionMismatch("generator must be square");
  if (n == 0) throw DimensionMismatch("generator is empty");
  MatrixX<Scalar> a = g;
  VectorX<Scalar> pivot(n);
  for (Index k = n - 1; k >= 1; --k) {
    Scalar s = 0;
    for (Index j = 0; j < k; ++j) s += a(k, j);
    if (!(s > Scalar(0)))
      throw MultipleClosedClasses("state " + std::to_string(k) +
                                  " cannot reach any lower-indexed state; the generator is reducible");
    pivot(k) = s;
    for (Index i = 0; i < k; ++i) {
      const Scalar f = a(i, k) / s;
      if (f == Scalar(0)) continue;
      for (Index j = 0; j < k; ++j)
        if (j != i) a(i, j) += f * a(k, j);
    }
  }
  RowVectorX<Scalar> pi(n);
  pi(0) = 1;
  for (Index k = 1; k < n; ++k) {
    Scalar acc = 0;
    for (Index i = 0; i < k; ++i) acc += pi(i) * a(i, k);
    pi(k) = acc / pivot(k);
  }
  return pi / pi.sum();
}

/// Stationary distribution of a finite block generator.
DistributionVector stationary(const BlockMatrix& g, DistributionSource source = DistributionSource::Other,
                              Index n = -1);

/// e^{-x} x^m / m! evaluated through logarithms.
template <typename Scalar>
Scalar poisson_weight(Scalar x, Index m) {
  using std::exp;
  using std::lgamma;
  using std::log;
  if (x == Scalar(0)) return m == 0 ? Scalar(1) : Scalar(0);
  return exp(-x + Scalar(m) * log(x) - lgamma(Scalar(m + 1)));
}

/// Uniformization rate: the largest exit rate, or 1 for the zero generator.
template <typename Scalar>
Scalar uniformization_rate(const MatrixX<Scalar>& g) {
  const Scalar s = g.diagonal().cwiseAbs().maxCoeff();
  return s > Scalar(0) ? s : Scalar(1);
}

namespace detail {

// Runs f(weight, m) over Poisson(x) terms until the remaining tail is < tol.
template <typename Scalar, typename F>
void poisson_terms(Scalar x, double tol, F&& f) {
  const Index cap = static_cast<Index>(x + 40.0 * std::sqrt(static_cast<double>(x) + 1.0) + 100.0);
  for (Index m = 0;; ++m) {
    const Scalar w = poisson_weight(x, m);
    f(w, m);
    // For m > x the terms fall at least geometrically with ratio x / (m + 1).
    if (Scalar(m + 1) > x) {
      const Scalar ratio = x / Scalar(m + 2);
      const Scalar tail = poisson_weight(x, m + 1) / (Scalar(1) - ratio);
      if (tail < Scalar(tol)) break;
    }
    if (m > cap) break;
  }
}

}  // namespace detail

/// P(t) = exp(G t) by uniformization; the truncated Poisson tail is < tol.
template <typename Scalar>
MatrixX<Scalar> transition_matrix(const MatrixX<Scalar>& g, Scalar t, double tol = 1e-12) {
  if (g.rows() != g.cols()) throw DimensionMismatch("generator must be square");
  if (t < Scalar(0)) throw InputError("time must be nonnegative");
  const Index n = g.rows();
  if (t == Scalar(0)) return MatrixX<Scalar>::Identity(n, n);
  const Scalar sigma = uniformization_rate(g);
  const MatrixX<Scalar> a = MatrixX<Scalar>::Identity(n, n) + g / sigma;
  MatrixX<Scalar> term = MatrixX<Scalar>::Identity(n, n);
  MatrixX<Scalar> p = MatrixX<Scalar>::Zero(n, n);
  detail::poisson_terms(sigma * t, tol, [&](Scalar w, Index) {
    p += w * term;
    term = term * a;
  });
  return p;
}

inline BlockMatrix transition_matrix(const BlockMatrix& g, double t, double tol = 1e-12) {
  return BlockMatrix(g.block_size(), transition_matrix<double>(g.entries(), t, tol));
}

/// p0 exp(G t) for a row vector p0, without forming exp(G t).
template <typename Scalar>
RowVectorX<Scalar> transient_distribution(const RowVectorX<Scalar>& p0, const MatrixX<Scalar>& g, Scalar t,
                                          double tol = 1e-12) {
  if (p0.size() != g.rows()) throw DimensionMismatch("initial vector does not match the generator");
  if (t == Scalar(0)) return p0;
  const Scalar sigma = uniformization_rate(g);
  RowVectorX<Scalar> term = p0;
  RowVectorX<Scalar> out = RowVectorX<Scalar>::Zero(p0.size());
  detail::poisson_terms(sigma * t, tol, [&](Scalar w, Index) {
    out += w * term;
    term = term + (term * g) / sigma;
  });
  return out;
}

/// sum |a - b| after zero-padding the shorter vector (not halved).
double tv_distance(const Vector& a, const Vector& b);
double tv_distance(const DistributionVector& a, const DistributionVector& b);

/// sum |x(k,i)| v(k,i); v must be >= 1 entrywise.
double v_norm(const Vector& x, const Vector& v);

struct OrderingCheck {
  bool pass = true;
  double worst = 0.0;  // largest violation
  Index level = 0;
  Index phase = 0;
  std::string where;  // which inequality failed
};

/// Per phase and for every m <= n:
///   0 <= sum_{k<=m}(lc - ref) <= sum_{k<=m}(mid - ref) <= sum_{k<=m}(fc - ref).
OrderingCheck cumulative_ordering(const DistributionVector& lc, const DistributionVector& mid,
                                  const DistributionVector& fc, const DistributionVector& ref, double tol = 1e-9);

/// ||x G||_inf, the stationary residual.
double stationary_residual(const RowVector& pi, const Matrix& g);

}  // namespace bmtrunc

#endif  // BMTRUNC_SOLVE_HPP
