#ifndef BMTRUNC_BOUNDS_HPP
#define BMTRUNC_BOUNDS_HPP

// Drift certificates  Qv <= -c v + b 1_{<=K}  and the total-variation error
// bound they yield for last-column truncations:
//   ||pi_n - pi|| <= (b/c) (4 e^{-ct} + 2 t S_n),
//   S_n = sum_j |q(n,j; n,j)| / v(n,j),   for every t >= 0.

#include "bmtrunc/core.hpp"
#include "bmtrunc/model.hpp"
#include "bmtrunc/solve.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bmtrunc {

struct DriftCertificate {
  VRule v;
  double c = 0.0;
  double b = 0.0;
  Index K = 0;
  bool verified = false;
  Index levels_checked = -1;  // numeric check covered levels 0..levels_checked
  std::string provenance;
};

/// Verifies (Qv)(k,i) <= -c v(k,i) + b [k <= K] at every level: numerically
/// up to a horizon, then through the model's tail law. Throws DriftViolated
/// at the first failing state.
DriftCertificate drift_check(const BlockGeneratorModel& model, const VRule& v, double c, double b, Index K);

/// sum_j |q(n,j; n,j)| / v(n,j).
double diagonal_weight_sum(const DriftCertificate& cert, const BlockGeneratorModel& model, Index n);

/// (b/c) (4 e^{-ct} + 2 t S_n).
double theorem_bound(const DriftCertificate& cert, const BlockGeneratorModel& model, Index n, double t);

/// Dimensionless optimum max(-log(S_n / 2c), 0); the minimizing time is
/// t_star / c and the minimum is (4b/c)(t_star + 1) e^{-t_star}.
double t_star(const DriftCertificate& cert, const BlockGeneratorModel& model, Index n);
double optimal_time(const DriftCertificate& cert, const BlockGeneratorModel& model, Index n);
double minimized_bound(const DriftCertificate& cert, const BlockGeneratorModel& model, Index n);
/// (4b/c)(t + 1) e^{-t} for a dimensionless optimum t.
double minimized_bound_from_t_star(double b, double c, double t_star);

/// Converts a K >= 1 certificate to K = 0 by shifting v on levels >= 1 by
/// B = b' / min_i (Q(K;0) e)_i. The result is re-verified.
DriftCertificate corollary_transform(const DriftCertificate& cert, const BlockGeneratorModel& model);

/// Geometric certificate v(k,i) = beta^k u_i for banded models, with u the
/// Perron vector of the homogeneous generating matrix at beta. Without a
/// beta the decay rate is maximized over (1, beta_cap).
DriftCertificate find_geometric_certificate(const ExplicitBandedModel& model,
                                            std::optional<double> beta = std::nullopt,
                                            double beta_cap = 8.0);

struct BoundReport {
  Index n = 0;
  double t_star = 0.0;     // dimensionless optimum
  double t_opt = 0.0;      // minimizing time t_star / c
  double bound_min = 0.0;
  double c = 0.0;
  double b = 0.0;
  double diag_weight_sum = 0.0;
  std::optional<double> true_tv;
  std::optional<double> slack;  // bound_min - true_tv
  double runtime_ms = 0.0;
  std::string provenance;
};

BoundReport bound_report(const DriftCertificate& cert, const BlockGeneratorModel& model, Index n);

struct DecayRow {
  double t = 0.0;
  double lhs = 0.0;  // ||p(t) - pi||_v on the proxy
  double rhs = 0.0;  // 2 e^{-ct} [v(k, w)(1 - 1_0(k)) + b/c]
  double eps = 0.0;  // proxy slack
  bool pass = false;
};

struct DecayReport {
  Index n_ref = 0;
  Index start_level = 0;
  std::vector<DecayRow> rows;
  bool pass() const;
};

/// Exponential decay of the transient law started at (k, phase law w) on a
/// last-column proxy at level n_ref. eps_trunc defaults to the minimized
/// bound at n_ref.
DecayReport transient_decay_check(ModelPtr model, const DriftCertificate& cert, Index k, const Vector& phase_law,
                                  const std::vector<double>& times, Index n_ref,
                                  std::optional<double> eps_trunc = std::nullopt);

}  // namespace bmtrunc

#endif  // BMTRUNC_BOUNDS_HPP
