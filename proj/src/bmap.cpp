#include "bmtrunc/bmap.hpp"

#include "bmtrunc/optimize.hpp"
#include "bmtrunc/perron.hpp"
#include "bmtrunc/solve.hpp"
#include "bmtrunc/truncate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace bmtrunc {

double MuRule::operator()(Index k) const {
  if (k <= 0) return 0.0;
  if (k <= static_cast<Index>(table.size())) return table[k - 1];
  return base + slope * static_cast<double>(k - 1);
}

double MuRule::inf_from(Index k0) const {
  k0 = std::max<Index>(k0, 1);
  double m = (*this)(std::max(k0, rule_start()));
  for (Index k = k0; k < rule_start(); ++k) m = std::min(m, (*this)(k));
  return m;
}

Matrix BmapModel::total() const {
  Matrix s = Matrix::Zero(d, d);
  for (const auto& m : D) s += m;
  return s;
}

Matrix BmapModel::tail(Index s) const {
  Matrix t = Matrix::Zero(d, d);
  for (Index m = k_max(); m >= std::max<Index>(s, 0); --m) t += D[m];
  return t;
}

Matrix BmapModel::transform(double z) const {
  Matrix t = Matrix::Zero(d, d);
  double zk = 1.0;
  for (Index k = 0; k <= k_max(); ++k, zk *= z) t += zk * D[k];
  return t;
}

void BmapModel::validate() const {
  if (d < 1) throw InvalidBmap("phase count must be positive");
  if (D.size() < 2) throw InvalidBmap("at least D(0) and D(1) are required");
  for (std::size_t k = 0; k < D.size(); ++k) {
    if (D[k].rows() != d || D[k].cols() != d)
      throw InvalidBmap("D(" + std::to_string(k) + ") is not " + std::to_string(d) + " x " + std::to_string(d));
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) {
        const double x = D[k](i, j);
        if (!std::isfinite(x)) throw InvalidBmap("non-finite entry in D(" + std::to_string(k) + ")");
        if (k == 0 && i == j) {
          if (!(x < 0.0)) throw InvalidBmap("diagonal of D(0) must be negative");
        } else if (x < 0.0) {
          throw InvalidBmap("negative rate in D(" + std::to_string(k) + ")");
        }
      }
  }
  const Matrix t = total();
  const double tol = kConservativeFactor * std::max(1.0, max_abs_row_sum(t));
  if (t.rowwise().sum().cwiseAbs().maxCoeff() > tol) throw InvalidBmap("D = sum_k D(k) is not conservative");
  // Irreducibility of D: every phase reaches every other.
  for (Index s = 0; s < d; ++s) {
    std::vector<bool> seen(d, false);
    std::vector<Index> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const Index i = stack.back();
      stack.pop_back();
      for (Index j = 0; j < d; ++j)
        if (!seen[j] && i != j && t(i, j) > 0.0) {
          seen[j] = true;
          stack.push_back(j);
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw InvalidBmap("D is reducible");
  }
  for (double m : mu.table)
    if (!(m >= 0.0) || !std::isfinite(m)) throw InvalidBmap("departure rates must be nonnegative");
  if (!(mu.base >= 0.0) || !(mu.slope >= 0.0) || !std::isfinite(mu.base) || !std::isfinite(mu.slope))
    throw InvalidBmap("departure rule needs nonnegative base and slope");
  if (!(psi >= 0.0) || !std::isfinite(psi)) throw InvalidBmap("disaster rate must be nonnegative");
}

// ---------------------------------------------------------------------------

BmapQueueModel::BmapQueueModel(BmapModel bmap) : bmap_(std::move(bmap)) {
  bmap_.validate();
  tails_.resize(bmap_.k_max() + 2);
  tails_.back() = Matrix::Zero(bmap_.d, bmap_.d);
  for (Index s = bmap_.k_max(); s >= 0; --s) tails_[s] = tails_[s + 1] + bmap_.D[s];
  total_ = tails_[0];
}

Index BmapQueueModel::homogeneous_level() const { return std::max<Index>(2, bmap_.mu.rule_start()); }

Matrix BmapQueueModel::block(Index k, Index l) const {
  const Index d = bmap_.d;
  const Matrix id = Matrix::Identity(d, d);
  if (l < 0 || k < 0) return Matrix::Zero(d, d);
  if (k == 0) return l <= bmap_.k_max() ? bmap_.D[l] : Matrix::Zero(d, d);
  const double mu = bmap_.mu(k);
  const double psi = bmap_.psi;
  if (l == 0) return (k == 1 ? psi + mu : psi) * id;
  if (l == k - 1) return mu * id;
  if (l == k) return bmap_.D[0] - (psi + mu) * id;
  if (l > k && l - k <= bmap_.k_max()) return bmap_.D[l - k];
  return Matrix::Zero(d, d);
}

Matrix BmapQueueModel::tail_sum(Index k, Index l) const {
  const Index d = bmap_.d;
  const Matrix id = Matrix::Identity(d, d);
  auto dbar = [&](Index s) -> Matrix { return s <= bmap_.k_max() ? tails_[std::max<Index>(s, 0)] : Matrix::Zero(d, d); };
  if (k == 0) return dbar(l);
  if (l <= 0) return total_;
  if (l > k) return dbar(l - k);
  if (l == k) return total_ - (bmap_.psi + bmap_.mu(k)) * id;
  return total_ - bmap_.psi * id;
}

std::vector<Index> BmapQueueModel::row_support(Index k) const {
  std::vector<Index> out;
  if (k == 0) {
    for (Index l = 0; l <= bmap_.k_max(); ++l) out.push_back(l);
    return out;
  }
  out.push_back(0);
  for (Index l = std::max<Index>(1, k - 1); l <= k + bmap_.k_max(); ++l) out.push_back(l);
  return out;
}

std::string BmapQueueModel::horizon_note() const {
  std::ostringstream os;
  os << "rows above level " << homogeneous_level()
     << " share one block law apart from a nondecreasing affine departure rate";
  return os.str();
}

DriftTailVerdict BmapQueueModel::drift_tail(const VRule& v, double c, Index k0) const {
  if (k0 < first_tail_level()) return {false, "level below the departure rule region"};
  const double beta = v.beta;
  const Matrix dh = bmap_.transform(beta);
  // Geometric coefficient of the residual at level k; nonincreasing in k.
  const Vector w = dh * v.u - (bmap_.mu(k0) * (1.0 - 1.0 / beta) + bmap_.psi - c) * v.u;
  const double scale = (dh.cwiseAbs() * v.u).maxCoeff() + (bmap_.mu(k0) + bmap_.psi + c) * v.u.maxCoeff();
  if (w.maxCoeff() <= 1e-12 * std::max(1.0, scale))
    return {true, "geometric residual coefficient is nonpositive and nonincreasing under the departure rule"};
  return {false, "geometric residual coefficient is positive at level " + std::to_string(k0)};
}

std::shared_ptr<BmapQueueModel> build_generator(const BmapModel& bmap) {
  return std::make_shared<BmapQueueModel>(bmap);
}

double arrival_rate(const BmapModel& bmap) {
  bmap.validate();
  const RowVector eta = gth_stationary<double>(bmap.total());
  Vector rate = Vector::Zero(bmap.d);
  for (Index k = 1; k <= bmap.k_max(); ++k) rate += static_cast<double>(k) * bmap.D[k].rowwise().sum();
  const double lambda = eta * rate;
  if (!(lambda > 0.0)) throw DegenerateArrivals("the BMAP generates no arrivals");
  return lambda;
}

SpectralRecord spectral(const BmapModel& bmap, double z) {
  if (!(z > 0.0)) throw InputError("spectral evaluation needs z > 0");
  const Index d = bmap.d;
  const Matrix dh = bmap.transform(z);
  const double m = bmap.D[0].diagonal().cwiseAbs().maxCoeff();
  // E = I + D^/m is nonnegative; the extra identity makes it primitive.
  const Matrix a = 2.0 * Matrix::Identity(d, d) + dh / m;
  const auto right = perron<double>(a);
  const auto left = perron<double>(Matrix(a.transpose()));

  SpectralRecord r;
  r.z = z;
  r.delta = (right.root - 2.0) * m;
  r.u = right.vector / right.vector.minCoeff();
  r.eta = left.vector.transpose();
  r.eta /= r.eta.dot(r.u.transpose());
  r.iterations = right.iterations + left.iterations;
  const double norm = std::max(max_abs_row_sum(dh), std::numeric_limits<double>::min());
  r.residual_right = (dh * r.u - r.delta * r.u).cwiseAbs().maxCoeff() / (norm * r.u.cwiseAbs().maxCoeff());
  r.residual_left =
      (r.eta * dh - r.delta * r.eta).cwiseAbs().maxCoeff() / (max_abs_row_sum(Matrix(dh.transpose())) * r.eta.cwiseAbs().maxCoeff());
  return r;
}

// ---------------------------------------------------------------------------

namespace {

// Maximizes score over a log grid on (1, cap) followed by golden-section
// refinement around the best grid point.
template <typename Score>
double maximize_over_beta(Score&& score, double cap) {
  const auto grid = open_log_grid(1.0, cap, 200);
  std::size_t best = 0;
  double best_s = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = score(grid[i]);
    if (s > best_s) {
      best_s = s;
      best = i;
    }
  }
  if (!std::isfinite(best_s)) return grid[best];
  const double lo = best == 0 ? 1.0 + 1e-9 : grid[best - 1];
  const double hi = best + 1 == grid.size() ? cap : grid[best + 1];
  const auto [z, neg] = golden_section_minimize<double>([&](double x) { return -score(x); }, lo, hi, 30);
  return -neg > best_s ? z : grid[best];
}

double beta_cap() { return kBetaCap; }

}  // namespace

NoDisasterConstants no_disaster_constants(const BmapModel& bmap, double beta) {
  if (!(beta > 1.0)) throw InputError("beta must exceed 1");
  NoDisasterConstants out;
  out.beta = beta;
  out.spec = spectral(bmap, beta);
  out.c = bmap.mu.inf_from(1) * (1.0 - 1.0 / beta) - out.spec.delta;
  out.b = (out.c + out.spec.delta) * out.spec.u.maxCoeff();
  return out;
}

NoDisasterConstants find_beta_no_disaster(const BmapModel& bmap, std::optional<double> beta) {
  bmap.validate();
  if (bmap.psi != 0.0) throw InputError("the no-disaster constants need psi = 0");
  double z = 0.0;
  if (beta) {
    z = *beta;
  } else {
    z = maximize_over_beta([&](double x) { return no_disaster_constants(bmap, x).c; }, beta_cap());
  }
  NoDisasterConstants out = no_disaster_constants(bmap, z);
  if (!(out.c > 0.0))
    throw NoPositiveC("c(beta) <= 0 for every beta searched; inf mu is not above the arrival rate");
  return out;
}

std::optional<DisasterConstants> disaster_constants(const BmapModel& bmap, double beta) {
  if (!(beta > 1.0)) throw InputError("beta must exceed 1");
  const SpectralRecord sp = spectral(bmap, beta);
  const double delta = sp.delta;
  const double psi = bmap.psi;
  auto g = [&](Index k) {
    return bmap.mu(k) * (1.0 - 1.0 / beta) + psi * (1.0 - std::pow(beta, -static_cast<double>(k))) - delta;
  };
  const Index rule = bmap.mu.rule_start();
  for (Index K = 0; K <= kMaxDisasterK; ++K) {
    // g is nondecreasing from the rule region on, so the infimum is a finite min.
    double cp = std::numeric_limits<double>::infinity();
    for (Index k = K + 1; k <= std::max(K + 1, rule); ++k) cp = std::min(cp, g(k));
    if (!(cp > 0.0)) continue;
    double bp = -std::numeric_limits<double>::infinity();
    for (Index k = 0; k <= K; ++k) {
      const double bracket = (cp + delta - (k == 0 ? 0.0 : g(k) + delta)) * std::pow(beta, static_cast<double>(k));
      bp = std::max(bp, bracket * (bracket >= 0.0 ? sp.u.maxCoeff() : sp.u.minCoeff()));
    }
    bp = std::max(bp, 0.0);
    DisasterConstants out;
    out.beta = beta;
    out.c_prime = cp;
    out.b_prime = bp;
    out.K = K;
    out.spec = sp;
    if (K == 0) {
      out.c_transformed = cp;
    } else {
      const double r = K == 1 ? psi + bmap.mu(1) : psi;
      out.c_transformed = r > 0.0 ? cp / (1.0 + bp / r) : 0.0;
    }
    return out;
  }
  return std::nullopt;
}

DisasterConstants find_constants_disaster(const BmapModel& bmap, std::optional<double> beta) {
  bmap.validate();
  if (!(bmap.psi > 0.0)) throw InputError("the disaster constants need psi > 0");
  double z = 0.0;
  if (beta) {
    z = *beta;
  } else {
    z = maximize_over_beta(
        [&](double x) {
          const auto dc = disaster_constants(bmap, x);
          return dc ? dc->c_transformed : -std::numeric_limits<double>::infinity();
        },
        beta_cap());
  }
  const auto dc = disaster_constants(bmap, z);
  if (!dc) throw NoFeasibleK("no K <= " + std::to_string(kMaxDisasterK) + " gives c' > 0");
  return *dc;
}

// ---------------------------------------------------------------------------

PipelineResult bound_pipeline(const BmapModel& bmap, const std::vector<Index>& levels, PipelineMode mode,
                              std::optional<double> beta, std::optional<Index> n_ref) {
  const auto model = build_generator(bmap);
  if (mode == PipelineMode::Auto) mode = bmap.psi == 0.0 ? PipelineMode::NoDisaster : PipelineMode::Disaster;
  PipelineResult res;
  res.mode = mode;
  const Vector d0_diag = bmap.D[0].diagonal().cwiseAbs();

  // Closed-form optimum and bound at level n.
  std::function<std::pair<double, double>(Index)> closed;
  if (mode == PipelineMode::NoDisaster) {
    if (bmap.psi != 0.0) throw InputError("no-disaster mode needs psi = 0");
    const auto nd = find_beta_no_disaster(bmap, beta);
    res.no_disaster = nd;
    res.beta = nd.beta;
    const VRule v{nd.beta, nd.spec.u, 0.0};
    res.certificate = drift_check(*model, v, nd.c, nd.b, 0);
    res.cross_certificate = res.certificate;
    closed = [&bmap, nd, d0_diag](Index n) {
      double s = 0.0;
      for (Index j = 0; j < bmap.d; ++j) s += (bmap.mu(n) + d0_diag(j)) / nd.spec.u(j);
      s *= std::pow(nd.beta, -static_cast<double>(n));
      const double t = std::max(-std::log(s / (2.0 * nd.c)), 0.0);
      return std::make_pair(t, minimized_bound_from_t_star(nd.b, nd.c, t));
    };
  } else {
    if (!(bmap.psi > 0.0)) throw InputError("disaster mode needs psi > 0");
    const auto dc = find_constants_disaster(bmap, beta);
    res.disaster = dc;
    res.beta = dc.beta;
    const VRule v{dc.beta, dc.spec.u, 0.0};
    const DriftCertificate prime = drift_check(*model, v, dc.c_prime, dc.b_prime, dc.K);
    res.certificate = corollary_transform(prime, *model);
    // The closed form takes B = b'/psi, i.e. the support level lifted to 2.
    const DriftCertificate lifted = drift_check(*model, v, dc.c_prime, dc.b_prime, std::max<Index>(dc.K, 2));
    res.cross_certificate = corollary_transform(lifted, *model);
    const double psi = bmap.psi;
    const double big_b = dc.b_prime / psi;
    const double c = dc.c_prime / (1.0 + big_b);
    const double b = dc.b_prime * (1.0 - bmap.D[0].rowwise().sum().minCoeff() / psi);
    closed = [&bmap, dc, d0_diag, psi, big_b, c, b](Index n) {
      const double bn = std::pow(dc.beta, -static_cast<double>(n));
      double s = 0.0;
      for (Index j = 0; j < bmap.d; ++j) s += (psi + bmap.mu(n) + d0_diag(j)) / (dc.spec.u(j) + big_b * bn);
      s *= bn;
      const double t = std::max(-std::log(s / (2.0 * c)), 0.0);
      return std::make_pair(t, minimized_bound_from_t_star(b, c, t));
    };
  }

  std::optional<DistributionVector> ref;
  if (n_ref) ref = stationary(lc_truncate(model, *n_ref).matrix, DistributionSource::Reference, *n_ref);

  for (Index n : levels) {
    if (n < 1) throw InputError("bound levels start at 1");
    PipelineRow row;
    row.generic = bound_report(res.certificate, *model, n);
    const auto [t, bound] = closed(n);
    row.closed_t_star = t;
    row.closed_bound = bound;
    row.cross_bound = minimized_bound(res.cross_certificate, *model, n);
    row.cross_rel_error = std::abs(bound - row.cross_bound) / std::max(row.cross_bound, 1e-300);
    row.authority_rel_gap = std::abs(bound - row.generic.bound_min) / std::max(row.generic.bound_min, 1e-300);
    if (ref) {
      const auto pin = stationary(lc_truncate(model, n).matrix, DistributionSource::LastColumn, n);
      row.generic.true_tv = tv_distance(pin, *ref);
      row.generic.slack = row.generic.bound_min - *row.generic.true_tv;
    }
    res.rows.push_back(row);
  }
  return res;
}

}  // namespace bmtrunc
