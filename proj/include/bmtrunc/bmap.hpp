#ifndef BMTRUNC_BMAP_HPP
#define BMTRUNC_BMAP_HPP

// BMAP arrivals with level-dependent exponential departures and Poisson
// disasters that empty the system. Row k >= 1 of the generator has psi I
// (plus mu(1) I at k = 1) in column 0, mu(k) I below the diagonal,
// D(0) - (psi + mu(k)) I on the diagonal and D(s) at level k + s.

#include "bmtrunc/bounds.hpp"
#include "bmtrunc/core.hpp"
#include "bmtrunc/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bmtrunc {

/// mu(0) = 0; mu(k) = table[k-1] for k <= table.size(); afterwards the
/// affine rule base + slope (k - 1) with slope >= 0.
struct MuRule {
  std::vector<double> table;
  double base = 0.0;
  double slope = 0.0;

  double operator()(Index k) const;
  /// First level governed by the rule.
  Index rule_start() const { return static_cast<Index>(table.size()) + 1; }
  /// inf over k >= k0 of mu(k).
  double inf_from(Index k0) const;

  static MuRule constant(double mu) { return {{}, mu, 0.0}; }
};

struct BmapModel {
  Index d = 1;
  std::vector<Matrix> D;  // D(0), ..., D(k_max)
  MuRule mu;
  double psi = 0.0;

  Index k_max() const { return static_cast<Index>(D.size()) - 1; }
  Matrix total() const;                // D = sum_k D(k)
  Matrix tail(Index s) const;          // sum_{m >= s} D(m)
  Matrix transform(double z) const;    // sum_k z^k D(k)
  /// Throws InvalidBmap on any structural defect.
  void validate() const;
};

class BmapQueueModel : public BlockGeneratorModel {
 public:
  explicit BmapQueueModel(BmapModel bmap);

  Index phases() const override { return bmap_.d; }
  ModelKind kind() const override { return ModelKind::BmapQueue; }
  Matrix block(Index k, Index l) const override;
  Matrix tail_sum(Index k, Index l) const override;
  std::vector<Index> row_support(Index k) const override;
  Index upper_bandwidth() const override { return bmap_.k_max(); }
  Index homogeneous_level() const override;
  Index check_horizon() const override { return homogeneous_level() + 1 + bmap_.k_max() + 1; }
  std::string horizon_note() const override;
  Index first_tail_level() const override { return homogeneous_level(); }
  DriftTailVerdict drift_tail(const VRule& v, double c, Index k0) const override;

  const BmapModel& bmap() const { return bmap_; }

 private:
  BmapModel bmap_;
  std::vector<Matrix> tails_;  // tails_[s] = sum_{m >= s} D(m)
  Matrix total_;
};

std::shared_ptr<BmapQueueModel> build_generator(const BmapModel& bmap);

/// lambda = eta sum_k k D(k) e with eta the stationary law of D.
double arrival_rate(const BmapModel& bmap);

struct SpectralRecord {
  double z = 1.0;
  double delta = 0.0;  // Perron eigenvalue of D^(z)
  Vector u;            // right eigenvector, min component 1
  RowVector eta;       // left eigenvector, eta u = 1
  double residual_right = 0.0;  // relative
  double residual_left = 0.0;
  Index iterations = 0;
};

SpectralRecord spectral(const BmapModel& bmap, double z);

/// Largest beta searched when none is given.
inline constexpr double kBetaCap = 8.0;

struct NoDisasterConstants {
  double beta = 1.0;
  double c = 0.0;
  double b = 0.0;
  SpectralRecord spec;
};

/// c(beta) = inf mu (1 - 1/beta) - delta_D(beta), b = (c + delta_D) max u.
NoDisasterConstants no_disaster_constants(const BmapModel& bmap, double beta);
NoDisasterConstants find_beta_no_disaster(const BmapModel& bmap, std::optional<double> beta = std::nullopt);

struct DisasterConstants {
  double beta = 1.0;
  double c_prime = 0.0;
  double b_prime = 0.0;
  Index K = 0;
  double c_transformed = 0.0;  // c' / (1 + B) with the minimal B
  SpectralRecord spec;
};

inline constexpr Index kMaxDisasterK = 200;

/// Smallest K <= kMaxDisasterK with c'(K) > 0 at this beta; nullopt if none.
std::optional<DisasterConstants> disaster_constants(const BmapModel& bmap, double beta);
DisasterConstants find_constants_disaster(const BmapModel& bmap, std::optional<double> beta = std::nullopt);

enum class PipelineMode { Auto, NoDisaster, Disaster };

struct PipelineRow {
  BoundReport generic;          // authoritative
  double closed_t_star = 0.0;   // t1* or t2*
  double closed_bound = 0.0;
  double cross_bound = 0.0;     // generic route on the certificate the closed form assumes
  double cross_rel_error = 0.0; // |closed - cross| / cross
  double authority_rel_gap = 0.0;  // |closed - generic| / generic
};

struct PipelineResult {
  PipelineMode mode = PipelineMode::Auto;
  double beta = 1.0;
  DriftCertificate certificate;        // K = 0, authoritative
  DriftCertificate cross_certificate;  // certificate matching the closed form
  std::optional<DisasterConstants> disaster;
  std::optional<NoDisasterConstants> no_disaster;
  std::vector<PipelineRow> rows;
};

PipelineResult bound_pipeline(const BmapModel& bmap, const std::vector<Index>& levels,
                              PipelineMode mode = PipelineMode::Auto, std::optional<double> beta = std::nullopt,
                              std::optional<Index> n_ref = std::nullopt);

}  // namespace bmtrunc

#endif  // BMTRUNC_BMAP_HPP
