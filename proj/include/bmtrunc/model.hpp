#ifndef BMTRUNC_MODEL_HPP
#define BMTRUNC_MODEL_HPP

#include "bmtrunc/core.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace bmtrunc {

enum class ModelKind { ExplicitBanded, MG1Type, BmapQueue, Truncated };
std::string to_string(ModelKind kind);

/// Column vector rule v(k, i) = beta^k u_i + shift * [k >= 1], evaluable at
/// every level. Covers geometric Lyapunov functions and their shifted form.
struct VRule {
  double beta = 1.0;
  Vector u;
  double shift = 0.0;

  Index phases() const { return u.size(); }
  double operator()(Index k, Index i) const {
    return std::pow(beta, static_cast<double>(k)) * u(i) + (k >= 1 ? shift : 0.0);
  }
  Vector level(Index k) const;
  /// Levels 0..n stacked into one column vector.
  Vector stacked(Index n) const;

  static VRule ones(Index d) { return {1.0, Vector::Ones(d), 0.0}; }
};

/// Outcome of a model's symbolic argument that a drift residual cannot grow
/// beyond some level.
struct DriftTailVerdict {
  bool certified = false;
  std::string note;
};

/// A finitely described infinite block generator Q = (Q(k; l)).
/// Implementations are immutable and safe to share across threads.
class BlockGeneratorModel {
 public:
  virtual ~BlockGeneratorModel() = default;

  virtual Index phases() const = 0;
  virtual ModelKind kind() const = 0;
  virtual Matrix block(Index k, Index l) const = 0;
  /// S(k; l) = sum over m >= l of Q(k; m), evaluated exactly.
  virtual Matrix tail_sum(Index k, Index l) const = 0;
  /// Column levels whose blocks may be nonzero in row k, ascending.
  virtual std::vector<Index> row_support(Index k) const = 0;
  /// Q(k; l) = 0 whenever l > k + U.
  virtual Index upper_bandwidth() const = 0;
  virtual Index homogeneous_level() const = 0;
  /// Rows 0..horizon are checked explicitly by the ordering and drift code.
  virtual Index check_horizon() const = 0;
  /// States why checks up to check_horizon() cover every level.
  virtual std::string horizon_note() const = 0;

  /// Smallest level from which drift_tail() can be asked.
  virtual Index first_tail_level() const { return check_horizon() + 1; }
  /// Whether the residual (Qv)(k) + c v(k) is nonincreasing for all k >= k0.
  virtual DriftTailVerdict drift_tail(const VRule& v, double c, Index k0) const;

  /// (Q v)(k) as a d-vector; `scale` receives sum_l |Q(k;l)| v(l).
  Vector drift_image(const VRule& v, Index k, Vector* scale = nullptr) const;
};

using ModelPtr = std::shared_ptr<const BlockGeneratorModel>;

/// Explicit banded model: rows 0..K_hom are listed blockwise by offset
/// l - k; rows k > K_hom use one homogeneous law H(s), -L <= s <= U.
class ExplicitBandedModel : public BlockGeneratorModel {
 public:
  using OffsetBlocks = std::map<Index, Matrix>;

  ExplicitBandedModel(Index d, Index lower, Index upper, Index k_hom,
                      std::vector<OffsetBlocks> boundary_rows, OffsetBlocks homogeneous,
                      ModelKind kind = ModelKind::ExplicitBanded);

  Index phases() const override { return d_; }
  ModelKind kind() const override { return kind_; }
  Matrix block(Index k, Index l) const override;
  Matrix tail_sum(Index k, Index l) const override;
  std::vector<Index> row_support(Index k) const override;
  Index upper_bandwidth() const override { return upper_; }
  Index lower_bandwidth() const { return lower_; }
  Index homogeneous_level() const override { return k_hom_; }
  Index check_horizon() const override { return k_hom_ + lower_ + upper_ + 1; }
  std::string horizon_note() const override;
  Index first_tail_level() const override { return k_hom_ + lower_ + 1; }
  DriftTailVerdict drift_tail(const VRule& v, double c, Index k0) const override;

  const OffsetBlocks& homogeneous_law() const { return homogeneous_; }
  const std::vector<OffsetBlocks>& boundary_rows() const { return boundary_; }
  /// sum_s z^s H(s), the generating matrix of the homogeneous law.
  Matrix homogeneous_transform(double z) const;

 private:
  const OffsetBlocks& row_law(Index k) const;

  Index d_, lower_, upper_, k_hom_;
  std::vector<OffsetBlocks> boundary_;
  OffsetBlocks homogeneous_;
  ModelKind kind_;
};

/// M/G/1-type generator: row 0 is B(0), B(1), ...; row k >= 1 has A(-1) on
/// the subdiagonal and A(s) at level k + s.
std::shared_ptr<ExplicitBandedModel> make_mg1_type(const std::vector<Matrix>& boundary,
                                                   const Matrix& down,
                                                   const std::vector<Matrix>& local);

/// Birth-death M/M/1 queue with arrival rate lambda and service rate mu.
std::shared_ptr<ExplicitBandedModel> make_mm1(double lambda, double mu);

// ---------------------------------------------------------------------------

struct Violation {
  enum class Kind { NegativeOffDiagonal, PositiveDiagonal, RowSum };
  Kind kind;
  LevelPhaseIndex row;
  LevelPhaseIndex col;  // equals row for RowSum
  double value;
};
std::string to_string(const Violation& v);

struct ValidationReport {
  std::vector<Violation> violations;
  double tolerance = 0.0;
  bool valid() const { return violations.empty(); }
};

/// Sign pattern and zero row sums of a finite q-matrix.
ValidationReport validate_q_matrix(const BlockMatrix& m);
/// Same checks on rows 0..levels of a model (row sums via tail_sum).
ValidationReport validate_model(const BlockGeneratorModel& model, Index levels);
inline ValidationReport validate_model(const BlockGeneratorModel& model) {
  return validate_model(model, model.check_horizon());
}

/// Northwest corner Q^{<=n}: blocks Q(k; l) for k, l <= n.
BlockMatrix window(const BlockGeneratorModel& model, Index n);

/// Xi = (sum_l q(k,i;l,j)), required to be the same for every level.
Matrix phase_generator(const BlockGeneratorModel& model);

}  // namespace bmtrunc

#endif  // BMTRUNC_MODEL_HPP
