#include "bmtrunc/model.hpp"

#include <algorithm>
#include <sstream>

namespace bmtrunc {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::ExplicitBanded: return "banded";
    case ModelKind::MG1Type: return "mg1";
    case ModelKind::BmapQueue: return "bmap";
    case ModelKind::Truncated: return "truncated";
  }
  return "unknown";
}

Vector VRule::level(Index k) const {
  Vector out(u.size());
  for (Index i = 0; i < u.size(); ++i) out(i) = (*this)(k, i);
  return out;
}

Vector VRule::stacked(Index n) const {
  const Index d = u.size();
  Vector out((n + 1) * d);
  for (Index k = 0; k <= n; ++k) out.segment(k * d, d) = level(k);
  return out;
}

DriftTailVerdict BlockGeneratorModel::drift_tail(const VRule&, double, Index) const {
  return {false, "model supplies no level-homogeneous tail law"};
}

Vector BlockGeneratorModel::drift_image(const VRule& v, Index k, Vector* scale) const {
  const Index d = phases();
  Vector out = Vector::Zero(d);
  if (scale) *scale = Vector::Zero(d);
  for (Index l : row_support(k)) {
    const Matrix q = block(k, l);
    const Vector vl = v.level(l);
    out.noalias() += q * vl;
    if (scale) scale->noalias() += q.cwiseAbs() * vl;
  }
  return out;
}

// ---------------------------------------------------------------------------

ExplicitBandedModel::ExplicitBandedModel(Index d, Index lower, Index upper, Index k_hom,
                                         std::vector<OffsetBlocks> boundary_rows,
                                         OffsetBlocks homogeneous, ModelKind kind)
    : d_(d),
      lower_(lower),
      upper_(upper),
      k_hom_(k_hom),
      boundary_(std::move(boundary_rows)),
      homogeneous_(std::move(homogeneous)),
      kind_(kind) {
  if (d_ < 1) throw InputError("block size must be positive");
  if (lower_ < 0 || upper_ < 0 || k_hom_ < 0) throw InputError("bandwidths and K_hom must be nonnegative");
  if (static_cast<Index>(boundary_.size()) != k_hom_ + 1)
    throw InputError("banded model needs explicit rows for levels 0..K_hom");
  if (k_hom_ + 1 < lower_)
    throw InputError("K_hom must be at least L - 1 so homogeneous rows stay above level 0");
  auto check = [&](const OffsetBlocks& row, Index k) {
    for (const auto& [s, m] : row) {
      if (m.rows() != d_ || m.cols() != d_) throw DimensionMismatch("block is not d x d");
      if (s < -lower_ || s > upper_) throw InputError("block offset outside the declared band");
      if (k >= 0 && k + s < 0) throw InputError("block offset reaches below level 0");
    }
  };
  for (Index k = 0; k <= k_hom_; ++k) check(boundary_[k], k);
  check(homogeneous_, -1);
}

const ExplicitBandedModel::OffsetBlocks& ExplicitBandedModel::row_law(Index k) const {
  return k <= k_hom_ ? boundary_[k] : homogeneous_;
}

Matrix ExplicitBandedModel::block(Index k, Index l) const {
  const auto& row = row_law(k);
  auto it = row.find(l - k);
  return it == row.end() ? Matrix::Zero(d_, d_) : it->second;
}

Matrix ExplicitBandedModel::tail_sum(Index k, Index l) const {
  Matrix s = Matrix::Zero(d_, d_);
  const auto& row = row_law(k);
  // Right to left, matching the cumulative order of the T_d transform.
  for (auto it = row.rbegin(); it != row.rend(); ++it) {
    if (k + it->first < l) break;
    s += it->second;
  }
  return s;
}

std::vector<Index> ExplicitBandedModel::row_support(Index k) const {
  std::vector<Index> out;
  for (Index l = std::max<Index>(0, k - lower_); l <= k + upper_; ++l) out.push_back(l);
  return out;
}

std::string ExplicitBandedModel::horizon_note() const {
  std::ostringstream os;
  os << "rows above level " << k_hom_ << " repeat one block law, so levels above "
     << check_horizon() << " are asserted by level-homogeneity";
  return os.str();
}

Matrix ExplicitBandedModel::homogeneous_transform(double z) const {
  Matrix h = Matrix::Zero(d_, d_);
  for (const auto& [s, m] : homogeneous_) h += std::pow(z, static_cast<double>(s)) * m;
  return h;
}

DriftTailVerdict ExplicitBandedModel::drift_tail(const VRule& v, double c, Index k0) const {
  if (k0 < first_tail_level()) return {false, "level below the homogeneous region"};
  // For k >= k0: (Qv)(k) + c v(k) = beta^k (H^(beta) u + c u) + const.
  const Vector w = homogeneous_transform(v.beta) * v.u + c * v.u;
  const double tol = 1e-12 * std::max(1.0, (homogeneous_transform(v.beta).cwiseAbs() * v.u).maxCoeff());
  if (w.maxCoeff() <= tol)
    return {true, "geometric residual coefficient of the homogeneous law is nonpositive"};
  return {false, "homogeneous drift coefficient is positive; the residual grows without bound"};
}

std::shared_ptr<ExplicitBandedModel> make_mg1_type(const std::vector<Matrix>& boundary,
                                                   const Matrix& down,
                                                   const std::vector<Matrix>& local) {
  if (boundary.empty() || local.empty()) throw InputError("M/G/1-type model needs B(0) and A(0)");
  const Index d = down.rows();
  ExplicitBandedModel::OffsetBlocks row0, hom;
  for (std::size_t s = 0; s < boundary.size(); ++s) row0[static_cast<Index>(s)] = boundary[s];
  hom[-1] = down;
  for (std::size_t s = 0; s < local.size(); ++s) hom[static_cast<Index>(s)] = local[s];
  const Index upper = static_cast<Index>(std::max(boundary.size(), local.size())) - 1;
  return std::make_shared<ExplicitBandedModel>(d, 1, upper, 0,
                                               std::vector<ExplicitBandedModel::OffsetBlocks>{row0},
                                               hom, ModelKind::MG1Type);
}

std::shared_ptr<ExplicitBandedModel> make_mm1(double lambda, double mu) {
  auto m1 = [](double x) { return Matrix::Constant(1, 1, x); };
  ExplicitBandedModel::OffsetBlocks row0{{0, m1(-lambda)}, {1, m1(lambda)}};
  ExplicitBandedModel::OffsetBlocks hom{{-1, m1(mu)}, {0, m1(-lambda - mu)}, {1, m1(lambda)}};
  return std::make_shared<ExplicitBandedModel>(1, 1, 1, 0,
                                               std::vector<ExplicitBandedModel::OffsetBlocks>{row0}, hom);
}

// ---------------------------------------------------------------------------

std::string to_string(const Violation& v) {
  std::ostringstream os;
  switch (v.kind) {
    case Violation::Kind::NegativeOffDiagonal:
      os << "negative off-diagonal entry at " << to_string(v.row) << "->" << to_string(v.col);
      break;
    case Violation::Kind::PositiveDiagonal:
      os << "positive diagonal entry at " << to_string(v.row);
      break;
    case Violation::Kind::RowSum:
      os << "nonzero row sum at " << to_string(v.row);
      break;
  }
  os << " (value " << v.value << ")";
  return os.str();
}

namespace {

void check_row_signs(const Eigen::Ref<const Matrix>& rows, Index d, Index row_level, Index col_level0,
                     std::vector<Violation>& out) {
  for (Index i = 0; i < rows.rows(); ++i) {
    for (Index j = 0; j < rows.cols(); ++j) {
      const LevelPhaseIndex r{row_level, i};
      const LevelPhaseIndex c = level_phase(col_level0 * d + j, d);
      const double x = rows(i, j);
      if (r == c) {
        if (x > 0.0) out.push_back({Violation::Kind::PositiveDiagonal, r, c, x});
      } else if (x < 0.0) {
        out.push_back({Violation::Kind::NegativeOffDiagonal, r, c, x});
      }
    }
  }
}

}  // namespace

ValidationReport validate_q_matrix(const BlockMatrix& m) {
  ValidationReport rep;
  const Index d = m.block_size();
  const Matrix& q = m.entries();
  rep.tolerance = kConservativeFactor * max_abs_row_sum(q);
  for (Index k = 0; k < m.levels(); ++k) check_row_signs(q.middleRows(k * d, d), d, k, 0, rep.violations);
  const Vector sums = q.rowwise().sum();
  for (Index r = 0; r < q.rows(); ++r) {
    if (std::abs(sums(r)) > rep.tolerance) {
      const auto s = level_phase(r, d);
      rep.violations.push_back({Violation::Kind::RowSum, s, s, sums(r)});
    }
  }
  return rep;
}

ValidationReport validate_model(const BlockGeneratorModel& model, Index levels) {
  ValidationReport rep;
  const Index d = model.phases();
  double scale = 0.0;
  std::vector<Vector> sums;
  for (Index k = 0; k <= levels; ++k) {
    Vector abs_sum = Vector::Zero(d);
    for (Index l : model.row_support(k)) {
      const Matrix q = model.block(k, l);
      abs_sum += q.cwiseAbs().rowwise().sum();
      // Only the diagonal block carries diagonal entries.
      if (l == k) {
        check_row_signs(q, d, k, l, rep.violations);
      } else {
        for (Index i = 0; i < d; ++i)
          for (Index j = 0; j < d; ++j)
            if (q(i, j) < 0.0)
              rep.violations.push_back({Violation::Kind::NegativeOffDiagonal, {k, i}, {l, j}, q(i, j)});
      }
    }
    scale = std::max(scale, abs_sum.maxCoeff());
    sums.push_back(model.tail_sum(k, 0).rowwise().sum());
  }
  rep.tolerance = kConservativeFactor * scale;
  for (Index k = 0; k <= levels; ++k)
    for (Index i = 0; i < d; ++i)
      if (std::abs(sums[k](i)) > rep.tolerance)
        rep.violations.push_back({Violation::Kind::RowSum, {k, i}, {k, i}, sums[k](i)});
  return rep;
}

BlockMatrix window(const BlockGeneratorModel& model, Index n) {
  if (n < 0) throw InputError("window level must be nonnegative");
  BlockMatrix w(model.phases(), n + 1);
  for (Index k = 0; k <= n; ++k)
    for (Index l : model.row_support(k))
      if (l <= n) w.block(k, l) = model.block(k, l);
  return w;
}

Matrix phase_generator(const BlockGeneratorModel& model) {
  const Index horizon = model.check_horizon();
  std::vector<Matrix> aggregates;
  double scale = 0.0;
  for (Index k = 0; k <= horizon; ++k) {
    aggregates.push_back(model.tail_sum(k, 0));
    for (Index l : model.row_support(k)) scale = std::max(scale, max_abs_row_sum(model.block(k, l)));
  }
  const double tol = kConservativeFactor * std::max(scale, 1.0);
  const Matrix& xi = aggregates[std::min(model.homogeneous_level(), horizon)];
  for (Index k = 0; k <= horizon; ++k) {
    const double diff = (aggregates[k] - xi).cwiseAbs().maxCoeff();
    if (diff > tol) {
      std::ostringstream os;
      os << "aggregated rates at level " << k << " differ from level " << model.homogeneous_level() << " by "
         << diff << "; the model is not block-monotone";
      throw NotConstantAcrossLevels(os.str());
    }
  }
  if (xi.rowwise().sum().cwiseAbs().maxCoeff() > tol)
    throw InputError("phase generator is not conservative");
  for (Index i = 0; i < xi.rows(); ++i)
    for (Index j = 0; j < xi.cols(); ++j)
      if (i != j && xi(i, j) < -tol) throw InputError("phase generator has a negative off-diagonal rate");
  return xi;
}

}  // namespace bmtrunc
