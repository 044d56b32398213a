#include "bmtrunc/truncate.hpp"

#include <algorithm>
#include <sstream>

namespace bmtrunc {

std::string to_string(TruncationStyle s) {
  switch (s) {
    case TruncationStyle::LastColumn: return "lc";
    case TruncationStyle::FirstColumn: return "fc";
    case TruncationStyle::Custom: return "custom";
  }
  return "lc";
}

TruncationStyle parse_truncation_style(const std::string& s) {
  if (s == "lc") return TruncationStyle::LastColumn;
  if (s == "fc") return TruncationStyle::FirstColumn;
  if (s == "custom") return TruncationStyle::Custom;
  throw InputError("unknown truncation style '" + s + "' (expected lc, fc or custom)");
}

RedistributionWeights fixed_weights(std::map<Index, double> by_level) {
  return [by_level = std::move(by_level)](Index, Index n) {
    Vector w = Vector::Zero(n + 1);
    for (const auto& [l, x] : by_level) {
      const Index target = l < 0 ? n : l;
      if (target > n) throw InvalidRedistribution("weight targets level " + std::to_string(target) + " above n");
      w(target) += x;
    }
    return w;
  };
}

std::map<Index, double> parse_weight_list(const std::string& text) {
  std::map<Index, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidRedistribution("weight entry '" + item + "' lacks '='");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    Index level = 0;
    double w = 0.0;
    try {
      level = key == "n" ? -1 : static_cast<Index>(std::stol(key));
      std::size_t used = 0;
      w = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::exception&) {
      throw InvalidRedistribution("cannot parse weight entry '" + item + "'");
    }
    if (key != "n" && level < 0) throw InvalidRedistribution("negative target level in '" + item + "'");
    out[level] += w;
  }
  if (out.empty()) throw InvalidRedistribution("empty weight list");
  return out;
}

namespace {

void validate_weights(const Vector& w, Index n, Index k) {
  std::ostringstream os;
  if (w.size() != n + 1) {
    os << "weights for source level " << k << " have length " << w.size() << ", expected " << n + 1;
  } else if (w.minCoeff() < 0.0) {
    os << "negative redistribution weight for source level " << k;
  } else if (std::abs(w.sum() - 1.0) > 1e-12) {
    os << "redistribution weights for source level " << k << " sum to " << w.sum();
  } else {
    return;
  }
  throw InvalidRedistribution(os.str());
}

TruncatedGenerator build(ModelPtr model, const TruncationSpec& spec) {
  if (!model) throw InputError("no model to truncate");
  if (spec.n < 0) throw InputError("truncation level must be nonnegative");
  if (spec.style == TruncationStyle::Custom && !spec.weights)
    throw InvalidRedistribution("custom truncation needs redistribution weights");
  const Index d = model->phases();
  const Index n = spec.n;
  BlockMatrix corner(d, n + 1);
  for (Index k = 0; k <= n; ++k) {
    for (Index l : model->row_support(k))
      if (l <= n) corner.block(k, l) = model->block(k, l);
    const Matrix excess = model->tail_sum(k, n + 1);
    if (excess.cwiseAbs().maxCoeff() == 0.0) continue;
    Vector w;
    switch (spec.style) {
      case TruncationStyle::LastColumn: w = Vector::Unit(n + 1, n); break;
      case TruncationStyle::FirstColumn: w = Vector::Unit(n + 1, 0); break;
      case TruncationStyle::Custom:
        w = spec.weights(k, n);
        validate_weights(w, n, k);
        break;
    }
    for (Index l = 0; l <= n; ++l)
      if (w(l) != 0.0) corner.block(k, l) += w(l) * excess;
  }
  const ValidationReport rep = validate_q_matrix(corner);
  if (!rep.valid())
    throw InvalidRedistribution("truncated corner is not a conservative q-matrix: " + to_string(rep.violations.front()));
  return {std::move(model), spec, std::move(corner)};
}

}  // namespace

TruncatedGenerator lc_truncate(ModelPtr model, Index n) {
  return build(std::move(model), {n, TruncationStyle::LastColumn, {}});
}

TruncatedGenerator fc_truncate(ModelPtr model, Index n) {
  return build(std::move(model), {n, TruncationStyle::FirstColumn, {}});
}

TruncatedGenerator custom_truncate(ModelPtr model, const TruncationSpec& spec) {
  if (spec.style != TruncationStyle::Custom) throw InvalidRedistribution("spec style is not custom");
  return build(std::move(model), spec);
}

TruncatedGenerator truncate(ModelPtr model, const TruncationSpec& spec) { return build(std::move(model), spec); }

std::shared_ptr<const TruncatedModel> TruncatedGenerator::extended_view() const {
  return std::make_shared<TruncatedModel>(base, spec, matrix);
}

// ---------------------------------------------------------------------------

TruncatedModel::TruncatedModel(ModelPtr base, TruncationSpec spec, BlockMatrix corner)
    : base_(std::move(base)), spec_(std::move(spec)), corner_(std::move(corner)) {}

Vector TruncatedModel::weights_for(Index k) const {
  const Index n = spec_.n;
  switch (spec_.style) {
    case TruncationStyle::LastColumn: return Vector::Unit(n + 1, n);
    case TruncationStyle::FirstColumn: return Vector::Unit(n + 1, 0);
    case TruncationStyle::Custom: break;
  }
  Vector w = spec_.weights(k, n);
  validate_weights(w, n, k);
  return w;
}

Matrix TruncatedModel::block(Index k, Index l) const {
  const Index n = spec_.n;
  const Index d = phases();
  if (k <= n) return l <= n ? Matrix(corner_.block(k, l)) : Matrix::Zero(d, d);
  if (l == k) return base_->block(k, k);
  if (l > n) return Matrix::Zero(d, d);
  const Matrix rest = base_->tail_sum(k, n + 1) - base_->block(k, k);
  return base_->block(k, l) + weights_for(k)(l) * rest;
}

Matrix TruncatedModel::tail_sum(Index k, Index l) const {
  const Index n = spec_.n;
  const Index d = phases();
  Matrix s = Matrix::Zero(d, d);
  if (k <= n) {
    for (Index m = n; m >= l && m >= 0; --m) s += corner_.block(k, m);
    return s;
  }
  if (l > k) return s;
  s = base_->block(k, k);
  if (l > n) return s;
  const Matrix rest = base_->tail_sum(k, n + 1) - base_->block(k, k);
  const Vector w = weights_for(k);
  Matrix lower = base_->tail_sum(k, l) - base_->tail_sum(k, n + 1);
  for (Index m = l; m <= n; ++m) lower += w(m) * rest;
  return s + lower;
}

std::vector<Index> TruncatedModel::row_support(Index k) const {
  const Index n = spec_.n;
  std::vector<Index> out;
  for (Index l = 0; l <= n; ++l) out.push_back(l);
  if (k > n) out.push_back(k);
  return out;
}

Index TruncatedModel::homogeneous_level() const {
  return std::max(spec_.n, base_->homogeneous_level()) + 1;
}

Index TruncatedModel::check_horizon() const {
  return homogeneous_level() + (base_->check_horizon() - base_->homogeneous_level()) + 1;
}

std::string TruncatedModel::horizon_note() const {
  return "rows above level " + std::to_string(spec_.n) +
         " hold only the frozen diagonal block and their folded excess; " + base_->horizon_note();
}

bool check_no_closed_classes_above(const TruncatedModel& model) {
  const Index n = model.level();
  const Index d = model.phases();
  const Index probe = model.upper_bandwidth() + 1;
  for (Index k = n + 1; k <= n + probe; ++k) {
    const Matrix b = model.block(k, k);
    const double tol = kConservativeFactor * std::max(1.0, max_abs_row_sum(b));
    std::vector<bool> leaks(d, false);
    for (Index i = 0; i < d; ++i) leaks[i] = b.row(i).sum() < -tol;
    // Backward closure: phases with a path inside the block to a leaking phase.
    bool changed = true;
    while (changed) {
      changed = false;
      for (Index i = 0; i < d; ++i) {
        if (leaks[i]) continue;
        for (Index j = 0; j < d; ++j) {
          if (i != j && leaks[j] && b(i, j) > 0.0) {
            leaks[i] = true;
            changed = true;
            break;
          }
        }
      }
    }
    if (std::find(leaks.begin(), leaks.end(), false) != leaks.end()) return false;
  }
  return true;
}

}  // namespace bmtrunc
