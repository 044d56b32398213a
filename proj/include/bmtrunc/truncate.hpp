#ifndef BMTRUNC_TRUNCATE_HPP
#define BMTRUNC_TRUNCATE_HPP

// Block-augmented northwest-corner truncations. Row k of the corner keeps
// Q(k; l) for l <= n and folds the escaping mass S(k; n+1) back into columns
// 0..n phase by phase, so every per-phase row aggregate is preserved.

#include "bmtrunc/core.hpp"
#include "bmtrunc/model.hpp"

#include <functional>
#include <map>
#include <string>

namespace bmtrunc {

enum class TruncationStyle { LastColumn, FirstColumn, Custom };
std::string to_string(TruncationStyle s);
TruncationStyle parse_truncation_style(const std::string& s);

/// Weights over target levels 0..n for the excess of source level k.
using RedistributionWeights = std::function<Vector(Index k, Index n)>;

struct TruncationSpec {
  Index n = 1;
  TruncationStyle style = TruncationStyle::LastColumn;
  RedistributionWeights weights;  // Custom only
};

/// The same weights for every source level. Key -1 stands for level n.
RedistributionWeights fixed_weights(std::map<Index, double> by_level);

/// Parses "0=0.5,n=0.5" style weight lists.
std::map<Index, double> parse_weight_list(const std::string& text);

class TruncatedModel;

struct TruncatedGenerator {
  ModelPtr base;
  TruncationSpec spec;
  BlockMatrix matrix;  // the (n+1)d corner, conservative

  /// The infinite generator whose corner is `matrix`: rows above n keep
  /// Q(k; k) and send the rest of their mass into columns 0..n.
  std::shared_ptr<const TruncatedModel> extended_view() const;
};

TruncatedGenerator lc_truncate(ModelPtr model, Index n);
TruncatedGenerator fc_truncate(ModelPtr model, Index n);
TruncatedGenerator custom_truncate(ModelPtr model, const TruncationSpec& spec);
TruncatedGenerator truncate(ModelPtr model, const TruncationSpec& spec);

class TruncatedModel : public BlockGeneratorModel {
 public:
  TruncatedModel(ModelPtr base, TruncationSpec spec, BlockMatrix corner);

  Index phases() const override { return base_->phases(); }
  ModelKind kind() const override { return ModelKind::Truncated; }
  Matrix block(Index k, Index l) const override;
  Matrix tail_sum(Index k, Index l) const override;
  std::vector<Index> row_support(Index k) const override;
  Index upper_bandwidth() const override { return base_->upper_bandwidth(); }
  Index homogeneous_level() const override;
  Index check_horizon() const override;
  std::string horizon_note() const override;

  Index level() const { return spec_.n; }
  const ModelPtr& base() const { return base_; }

 private:
  // Weights used for a source row; validated.
  Vector weights_for(Index k) const;

  ModelPtr base_;
  TruncationSpec spec_;
  BlockMatrix corner_;
};

/// True iff for every k in (n, n + U + 1] each phase of the diagonal block
/// Q(k; k) reaches, inside the block, a phase with strictly negative row sum.
/// Such levels hold no closed class, so all their states are transient.
bool check_no_closed_classes_above(const TruncatedModel& model);

}  // namespace bmtrunc

#endif  // BMTRUNC_TRUNCATE_HPP
