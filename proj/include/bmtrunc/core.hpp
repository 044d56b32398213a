#ifndef BMTRUNC_CORE_HPP
#define BMTRUNC_CORE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace bmtrunc {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using RowVector = RowVectorX<double>;

// Absolute tolerance on T_d-transformed entries for every ordering check.
inline constexpr double kOrderTolerance = 1e-12;
// Row-sum tolerance factor, scaled by the largest absolute row sum.
inline constexpr double kConservativeFactor = 1e-10;

/// A state (k, i) of a level/phase chain. Phases are stored zero-based;
/// reports print them one-based.
struct LevelPhaseIndex {
  Index level = 0;
  Index phase = 0;

  friend bool operator==(const LevelPhaseIndex&, const LevelPhaseIndex&) = default;
};

inline Index flat_index(LevelPhaseIndex s, Index d) { return s.level * d + s.phase; }
inline LevelPhaseIndex level_phase(Index flat, Index d) { return {flat / d, flat % d}; }
std::string to_string(LevelPhaseIndex s);

// ---------------------------------------------------------------------------
// Errors. The three bases map onto CLI exit codes 1, 2 and 3.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mathematical hypothesis failed (exit code 1).
class CheckFailure : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input (exit code 2).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical engine could not produce a result (exit code 3).
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

#define BMTRUNC_ERROR(Name, Base)  \
  class Name : public Base {       \
   public:                         \
    using Base::Base;              \
  };

BMTRUNC_ERROR(DimensionMismatch, InputError)
BMTRUNC_ERROR(IncompatibleModels, InputError)
BMTRUNC_ERROR(InvalidRedistribution, InputError)
BMTRUNC_ERROR(InvalidBmap, InputError)
BMTRUNC_ERROR(NotStochastic, InputError)
BMTRUNC_ERROR(TailSumUnavailable, InputError)
BMTRUNC_ERROR(NotConstantAcrossLevels, CheckFailure)
BMTRUNC_ERROR(CertificateNotVerified, CheckFailure)
BMTRUNC_ERROR(CertificateInvalid, CheckFailure)
BMTRUNC_ERROR(KNotZero, CheckFailure)
BMTRUNC_ERROR(FirstColumnUnreachable, CheckFailure)
BMTRUNC_ERROR(DegenerateArrivals, CheckFailure)
BMTRUNC_ERROR(NoPositiveC, CheckFailure)
BMTRUNC_ERROR(NoFeasibleK, CheckFailure)
BMTRUNC_ERROR(MultipleClosedClasses, NumericalFailure)
BMTRUNC_ERROR(NoConvergence, NumericalFailure)

#undef BMTRUNC_ERROR

class DriftViolated : public CheckFailure {
 public:
  DriftViolated(LevelPhaseIndex state, double slack, const std::string& detail);
  LevelPhaseIndex state;
  double slack;
};

class ParseError : public InputError {
 public:
  ParseError(int line, const std::string& what);
  int line;  // 1-based, 0 when unknown
};

// ---------------------------------------------------------------------------

/// Dense square matrix over levels 0..n with d phases per level.
template <typename Scalar>
class FiniteBlockMatrix {
 public:
  FiniteBlockMatrix() = default;
  FiniteBlockMatrix(Index d, Index levels)
      : d_(d), entries_(MatrixX<Scalar>::Zero(d * levels, d * levels)) {}
  FiniteBlockMatrix(Index d, MatrixX<Scalar> entries) : d_(d), entries_(std::move(entries)) {
    if (d_ < 1 || entries_.rows() != entries_.cols() || entries_.rows() % d_ != 0)
      throw DimensionMismatch("block matrix order must be a multiple of the block size");
  }

  Index block_size() const { return d_; }
  Index levels() const { return d_ == 0 ? 0 : entries_.rows() / d_; }
  Index order() const { return entries_.rows(); }

  const MatrixX<Scalar>& entries() const { return entries_; }
  MatrixX<Scalar>& entries() { return entries_; }

  auto block(Index k, Index l) { return entries_.block(k * d_, l * d_, d_, d_); }
  auto block(Index k, Index l) const { return entries_.block(k * d_, l * d_, d_, d_); }

  Scalar& operator()(LevelPhaseIndex r, LevelPhaseIndex c) {
    return entries_(flat_index(r, d_), flat_index(c, d_));
  }
  Scalar operator()(LevelPhaseIndex r, LevelPhaseIndex c) const {
    return entries_(flat_index(r, d_), flat_index(c, d_));
  }

  /// Levels 0..n of this matrix (the northwest corner).
  FiniteBlockMatrix corner(Index n) const {
    return FiniteBlockMatrix(d_, MatrixX<Scalar>(entries_.topLeftCorner((n + 1) * d_, (n + 1) * d_)));
  }

 private:
  Index d_ = 1;
  MatrixX<Scalar> entries_;
};

using BlockMatrix = FiniteBlockMatrix<double>;

/// Largest absolute row sum; the scale for conservativity tolerances.
template <typename Derived>
double max_abs_row_sum(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  return static_cast<double>(m.cwiseAbs().rowwise().sum().maxCoeff());
}

}  // namespace bmtrunc

#endif  // BMTRUNC_CORE_HPP
