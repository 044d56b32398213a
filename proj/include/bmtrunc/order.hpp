#ifndef BMTRUNC_ORDER_HPP
#define BMTRUNC_ORDER_HPP

// Block-wise ordering: the T_d transform, block-increasing vectors, block
// monotonicity and block-wise dominance.
//
// Right-multiplying by T_d turns each row into per-phase tail sums:
//   (x T_d)(l, j) = sum_{m >= l} x(m, j).
// Left-multiplying by T_d^{-1} takes per-phase first differences in level:
//   (T_d^{-1} f)(k, i) = f(k, i) - f(k - 1, i).

#include "bmtrunc/core.hpp"
#include "bmtrunc/model.hpp"

#include <limits>
#include <string>

namespace bmtrunc {

enum class TdDirection { Forward, Inverse };

struct DominanceReport {
  bool holds = true;
  LevelPhaseIndex row{};
  LevelPhaseIndex col{};
  double worst_violation = 0.0;
  double margin = std::numeric_limits<double>::infinity();
  std::string provenance;

  /// Records the inequality lhs <= rhs at (row, col).
  void record(double lhs, double rhs, LevelPhaseIndex r, LevelPhaseIndex c) {
    const double slack = rhs - lhs;
    if (slack < margin) margin = slack;
    if (-slack > worst_violation) {
      worst_violation = -slack;
      row = r;
      col = c;
    }
    holds = worst_violation <= kOrderTolerance;
  }
};

std::string to_string(const DominanceReport& r);

/// x * T_d (Forward) or x * T_d^{-1} (Inverse); x has a multiple of d columns.
template <typename Derived>
MatrixX<typename Derived::Scalar> td_transform(const Eigen::MatrixBase<Derived>& x, Index d,
                                               TdDirection dir) {
  using Scalar = typename Derived::Scalar;
  if (d < 1 || x.cols() % d != 0) throw DimensionMismatch("column count is not a multiple of the block size");
  const Index levels = x.cols() / d;
  MatrixX<Scalar> out = x;
  if (levels == 0) return out;
  if (dir == TdDirection::Forward) {
    for (Index l = levels - 2; l >= 0; --l) out.middleCols(l * d, d) += out.middleCols((l + 1) * d, d);
  } else {
    for (Index l = 0; l + 1 < levels; ++l) out.middleCols(l * d, d) -= x.middleCols((l + 1) * d, d);
  }
  return out;
}

/// T_d^{-1} * y for y with a multiple of d rows.
template <typename Derived>
MatrixX<typename Derived::Scalar> td_left_inverse(const Eigen::MatrixBase<Derived>& y, Index d) {
  using Scalar = typename Derived::Scalar;
  if (d < 1 || y.rows() % d != 0) throw DimensionMismatch("row count is not a multiple of the block size");
  const Index levels = y.rows() / d;
  MatrixX<Scalar> out = y;
  for (Index k = levels - 1; k >= 1; --k) out.middleRows(k * d, d) -= y.middleRows((k - 1) * d, d);
  return out;
}

/// T_d^{-1} Q T_d.
template <typename Derived>
MatrixX<typename Derived::Scalar> td_conjugate(const Eigen::MatrixBase<Derived>& q, Index d) {
  return td_left_inverse(td_transform(q, d, TdDirection::Forward), d);
}

/// f(k, i) <= f(k + 1, i) for every level k and phase i.
template <typename Derived>
DominanceReport is_block_increasing(const Eigen::MatrixBase<Derived>& f, Index d) {
  if (d < 1 || f.size() % d != 0) throw DimensionMismatch("vector length is not a multiple of the block size");
  DominanceReport rep;
  const Index levels = f.size() / d;
  for (Index k = 0; k + 1 < levels; ++k)
    for (Index i = 0; i < d; ++i)
      rep.record(static_cast<double>(f(k * d + i)), static_cast<double>(f((k + 1) * d + i)), {k, i}, {k + 1, i});
  if (levels < 2) rep.margin = 0.0;
  return rep;
}

/// mu precedes eta blockwise: mu T_d <= eta T_d.
template <typename DerivedA, typename DerivedB>
DominanceReport vector_dominates(const Eigen::MatrixBase<DerivedA>& mu, const Eigen::MatrixBase<DerivedB>& eta,
                                 Index d) {
  if (mu.size() != eta.size()) throw DimensionMismatch("distributions have different lengths");
  const double tol = kConservativeFactor;
  if (std::abs(static_cast<double>(mu.sum()) - 1.0) > tol || std::abs(static_cast<double>(eta.sum()) - 1.0) > tol)
    throw NotStochastic("dominance is defined for probability vectors");
  RowVector a(mu.size()), b(eta.size());
  for (Index c = 0; c < a.size(); ++c) {
    a(c) = static_cast<double>(mu(c));
    b(c) = static_cast<double>(eta(c));
  }
  a = td_transform(a, d, TdDirection::Forward);
  b = td_transform(b, d, TdDirection::Forward);
  DominanceReport rep;
  for (Index c = 0; c < a.size(); ++c) {
    const auto s = level_phase(c, d);
    rep.record(static_cast<double>(a(c)), static_cast<double>(b(c)), s, s);
  }
  return rep;
}

/// T_d^{-1} P T_d >= 0 for a row-stochastic P.
template <typename Scalar>
DominanceReport is_block_monotone_stochastic(const FiniteBlockMatrix<Scalar>& p) {
  const Index d = p.block_size();
  const auto& e = p.entries();
  const double tol = kConservativeFactor * std::max(1.0, max_abs_row_sum(e));
  for (Index r = 0; r < e.rows(); ++r) {
    if (std::abs(static_cast<double>(e.row(r).sum()) - 1.0) > tol || e.row(r).minCoeff() < -tol)
      throw NotStochastic("row " + to_string(level_phase(r, d)) + " is not a probability vector");
  }
  const MatrixX<Scalar> m = td_conjugate(e, d);
  DominanceReport rep;
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c)
      rep.record(0.0, static_cast<double>(m(r, c)), level_phase(r, d), level_phase(c, d));
  return rep;
}

/// Off-diagonal entries of T_d^{-1} Q T_d are nonnegative.
template <typename Scalar>
DominanceReport generator_is_block_monotone(const FiniteBlockMatrix<Scalar>& q) {
  const Index d = q.block_size();
  const MatrixX<Scalar> m = td_conjugate(q.entries(), d);
  DominanceReport rep;
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c)
      if (r != c) rep.record(0.0, static_cast<double>(m(r, c)), level_phase(r, d), level_phase(c, d));
  return rep;
}

/// Q T_d <= Qt T_d elementwise (also used for stochastic matrices).
template <typename Scalar>
DominanceReport generator_dominates(const FiniteBlockMatrix<Scalar>& q, const FiniteBlockMatrix<Scalar>& qt) {
  if (q.block_size() != qt.block_size() || q.order() != qt.order())
    throw IncompatibleModels("matrices differ in block size or order");
  const Index d = q.block_size();
  const MatrixX<Scalar> a = td_transform(q.entries(), d, TdDirection::Forward);
  const MatrixX<Scalar> b = td_transform(qt.entries(), d, TdDirection::Forward);
  DominanceReport rep;
  for (Index r = 0; r < a.rows(); ++r)
    for (Index c = 0; c < a.cols(); ++c)
      rep.record(static_cast<double>(a(r, c)), static_cast<double>(b(r, c)), level_phase(r, d), level_phase(c, d));
  return rep;
}

/// Cumulative tail inequalities of block monotonicity for rows
/// 1..check_horizon(), computed from exact tail sums.
DominanceReport generator_is_block_monotone(const BlockGeneratorModel& model);

/// S(k; l) <= St(k; l) for rows up to the larger check horizon.
DominanceReport generator_dominates(const BlockGeneratorModel& q, const BlockGeneratorModel& qt);

}  // namespace bmtrunc

#endif  // BMTRUNC_ORDER_HPP
