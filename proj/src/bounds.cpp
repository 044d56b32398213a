#include "bmtrunc/bounds.hpp"

#include "bmtrunc/optimize.hpp"
#include "bmtrunc/perron.hpp"
#include "bmtrunc/truncate.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

namespace bmtrunc {

namespace {

constexpr double kDriftRelTol = 1e-10;
constexpr Index kTailScanCap = 10000;

void check_level(const BlockGeneratorModel& model, const VRule& v, double c, double b, Index K, Index k) {
  Vector scale;
  const Vector qv = model.drift_image(v, k, &scale);
  for (Index i = 0; i < qv.size(); ++i) {
    const double vk = v(k, i);
    const double rhs = -c * vk + (k <= K ? b : 0.0);
    const double excess = qv(i) - rhs;
    const double tol = kDriftRelTol * (scale(i) + c * vk + b);
    if (excess > tol) {
      std::ostringstream os;
      os << "(Qv)" << to_string(LevelPhaseIndex{k, i}) << " = " << qv(i) << " exceeds " << rhs;
      throw DriftViolated({k, i}, -excess, os.str());
    }
  }
}

void require_theorem_form(const DriftCertificate& cert) {
  if (!cert.verified) throw CertificateNotVerified("the drift certificate has not been verified");
  if (cert.K != 0) throw KNotZero("the certificate has K = " + std::to_string(cert.K) + "; transform it first");
}

}  // namespace

DriftCertificate drift_check(const BlockGeneratorModel& model, const VRule& v, double c, double b, Index K) {
  if (v.u.size() != model.phases()) throw DimensionMismatch("v has the wrong number of phases");
  if (!(c > 0.0)) throw CertificateInvalid("decay rate c must be positive");
  if (!(b >= 0.0)) throw CertificateInvalid("offset b must be nonnegative");
  if (K < 0) throw CertificateInvalid("K must be nonnegative");
  if (v.beta < 1.0 || v.shift < 0.0 || v.u.minCoeff() < 1.0 - 1e-12)
    throw CertificateInvalid("v must be block-increasing with v >= 1");

  const Index k_tail = std::max(model.first_tail_level(), K + 1);
  Index k_num = std::max(model.check_horizon(), k_tail);
  for (Index k = 0; k <= k_num; ++k) check_level(model, v, c, b, K, k);

  DriftTailVerdict verdict = model.drift_tail(v, c, k_tail);
  Index tail_from = k_tail;
  // Level-dependent rates may need a higher start before the tail is monotone.
  while (!verdict.certified) {
    const Index k = k_num + 1;
    if (k > kTailScanCap || std::log(v.beta) * static_cast<double>(k) > 690.0)
      throw CertificateNotVerified("drift could not be certified beyond level " + std::to_string(k_num) + ": " +
                                   verdict.note);
    check_level(model, v, c, b, K, k);
    k_num = k;
    tail_from = k;
    verdict = model.drift_tail(v, c, k);
  }

  DriftCertificate cert{v, c, b, K, true, k_num, {}};
  std::ostringstream os;
  os << "verified numerically on levels 0.." << k_num << "; for levels above " << tail_from
     << ": " << verdict.note << " (asserted beyond horizon by level-homogeneity)";
  cert.provenance = os.str();
  return cert;
}

double diagonal_weight_sum(const DriftCertificate& cert, const BlockGeneratorModel& model, Index n) {
  const Matrix q = model.block(n, n);
  double s = 0.0;
  for (Index j = 0; j < q.rows(); ++j) s += std::abs(q(j, j)) / cert.v(n, j);
  return s;
}

double theorem_bound(const DriftCertificate& cert, const BlockGeneratorModel& model, Index n, double t) {
  require_theorem_form(cert);
  if (t < 0.0) throw InputError("time must be nonnegative");
  const double s = diagonal_weight_sum(cert, model, n);
  return cert.b / cert.c * (4.0 * std::exp(-cert.c * t) + 2.0 * t * s);
}

double t_star(const DriftCertificate& cert, const BlockGeneratorModel& model, Index n) {
  require_theorem_form(cert);
  const double s = diagonal_weight_sum(cert, model, n);
  if (s <= 0.0) return std::numeric_limits<double>::infinity();
  return std::max(-std::log(s / (2.0 * cert.c)), 0.0);
}

double optimal_time(const DriftCertificate& cert, const BlockGeneratorModel& model, Index n) {
  return t_star(cert, model, n) / cert.c;
}

double minimized_bound_from_t_star(double b, double c, double ts) {
  if (std::isinf(ts)) return 0.0;
  return 4.0 * b / c * (ts + 1.0) * std::exp(-ts);
}

double minimized_bound(const DriftCertificate& cert, const BlockGeneratorModel& model, Index n) {
  return minimized_bound_from_t_star(cert.b, cert.c, t_star(cert, model, n));
}

DriftCertificate corollary_transform(const DriftCertificate& cert, const BlockGeneratorModel& model) {
  if (!cert.verified) throw CertificateNotVerified("the drift certificate has not been verified");
  if (cert.K == 0) return cert;
  const Vector r = model.block(cert.K, 0).rowwise().sum();
  if (!(r.minCoeff() > 0.0))
    throw FirstColumnUnreachable("Q(" + std::to_string(cert.K) + ";0)e has a zero component");
  const double big_b = cert.b / r.minCoeff();
  VRule v = cert.v;
  v.shift += big_b;
  const double c = cert.c / (1.0 + big_b);
  const Vector q00 = model.block(0, 0).rowwise().sum();
  const double b = (Vector::Constant(q00.size(), cert.b) - big_b * q00).maxCoeff();
  DriftCertificate out = drift_check(model, v, c, b, 0);
  out.provenance = "transformed from K = " + std::to_string(cert.K) + " with B = " + std::to_string(big_b) + "; " +
                   out.provenance;
  return out;
}

DriftCertificate find_geometric_certificate(const ExplicitBandedModel& model, std::optional<double> beta,
                                            double beta_cap) {
  const Index d = model.phases();
  struct Eval {
    double c;
    Vector u;
  };
  auto eval = [&](double z) -> Eval {
    const Matrix h = model.homogeneous_transform(z);
    const double sigma = std::max(0.0, -h.diagonal().minCoeff()) + 1.0;
    const auto pr = perron<double>(h + sigma * Matrix::Identity(d, d));
    Vector u = pr.vector / pr.vector.minCoeff();
    double c = -(pr.root - sigma);
    const VRule v{z, u, 0.0};
    for (Index k = 1; k <= model.homogeneous_level(); ++k) {
      const Vector qv = model.drift_image(v, k);
      for (Index i = 0; i < d; ++i) c = std::min(c, -qv(i) / v(k, i));
    }
    return {c, u};
  };

  double z = 0.0;
  if (beta) {
    if (*beta <= 1.0) throw InputError("beta must exceed 1");
    z = *beta;
  } else {
    const auto grid = open_log_grid(1.0, beta_cap, 200);
    std::size_t best = 0;
    double best_c = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double ci = eval(grid[i]).c;
      if (ci > best_c) {
        best_c = ci;
        best = i;
      }
    }
    const double lo = best == 0 ? 1.0 + 1e-12 : grid[best - 1];
    const double hi = best + 1 == grid.size() ? beta_cap : grid[best + 1];
    z = golden_section_minimize<double>([&](double x) { return -eval(x).c; }, lo, hi, 30).first;
    if (eval(grid[best]).c > eval(z).c) z = grid[best];
  }
  const Eval e = eval(z);
  if (!(e.c > 0.0)) throw NoPositiveC("no positive decay rate for a geometric Lyapunov function");
  const VRule v{z, e.u, 0.0};
  const Vector q0 = model.drift_image(v, 0);
  double b = 0.0;
  for (Index i = 0; i < d; ++i) b = std::max(b, q0(i) + e.c * v(0, i));
  return drift_check(model, v, e.c, b, 0);
}

BoundReport bound_report(const DriftCertificate& cert, const BlockGeneratorModel& model, Index n) {
  const auto start = std::chrono::steady_clock::now();
  BoundReport r;
  r.n = n;
  r.c = cert.c;
  r.b = cert.b;
  r.t_star = t_star(cert, model, n);
  r.t_opt = r.t_star / cert.c;
  r.diag_weight_sum = diagonal_weight_sum(cert, model, n);
  r.bound_min = minimized_bound_from_t_star(cert.b, cert.c, r.t_star);
  r.provenance = cert.provenance;
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

bool DecayReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const DecayRow& r) { return r.pass; });
}

DecayReport transient_decay_check(ModelPtr model, const DriftCertificate& cert, Index k, const Vector& phase_law,
                                  const std::vector<double>& times, Index n_ref, std::optional<double> eps_trunc) {
  if (!cert.verified || cert.K != 0) throw CertificateInvalid("decay check needs a verified K = 0 certificate");
  const Index d = model->phases();
  if (phase_law.size() != d) throw DimensionMismatch("phase law has the wrong length");
  if (k < 0 || k > n_ref) throw InputError("start level outside the proxy");
  const TruncatedGenerator proxy = lc_truncate(model, n_ref);
  const Matrix& g = proxy.matrix.entries();
  const RowVector pi = gth_stationary<double>(g);
  RowVector p0 = RowVector::Zero(g.rows());
  p0.segment(k * d, d) = phase_law.transpose();
  const Vector v = cert.v.stacked(n_ref);
  const double vk = phase_law.dot(cert.v.level(k));
  const double eps = eps_trunc ? *eps_trunc : minimized_bound(cert, *model, n_ref);

  DecayReport rep;
  rep.n_ref = n_ref;
  rep.start_level = k;
  for (double t : times) {
    const RowVector pt = transient_distribution<double>(p0, g, t);
    DecayRow row;
    row.t = t;
    row.lhs = v_norm((pt - pi).transpose(), v);
    row.rhs = 2.0 * std::exp(-cert.c * t) * ((k >= 1 ? vk : 0.0) + cert.b / cert.c);
    row.eps = eps;
    row.pass = row.lhs <= row.rhs + row.eps;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace bmtrunc
