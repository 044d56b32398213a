#include "bmtrunc/solve.hpp"

#include <algorithm>

namespace bmtrunc {

std::string to_string(DistributionSource s) {
  switch (s) {
    case DistributionSource::Reference: return "reference";
    case DistributionSource::LastColumn: return "lc";
    case DistributionSource::FirstColumn: return "fc";
    case DistributionSource::Custom: return "custom";
    case DistributionSource::Phase: return "phase";
    case DistributionSource::Other: return "other";
  }
  return "other";
}

Vector DistributionVector::phase_marginal() const {
  Vector m = Vector::Zero(d);
  for (Index k = 0; k < levels(); ++k) m += values.segment(k * d, d);
  return m;
}

DistributionVector stationary(const BlockMatrix& g, DistributionSource source, Index n) {
  const RowVector pi = gth_stationary<double>(g.entries());
  return {g.block_size(), pi.transpose(), source, n};
}

double tv_distance(const Vector& a, const Vector& b) {
  const Index len = std::max(a.size(), b.size());
  double s = 0.0;
  for (Index i = 0; i < len; ++i) {
    const double x = i < a.size() ? a(i) : 0.0;
    const double y = i < b.size() ? b(i) : 0.0;
    s += std::abs(x - y);
  }
  return s;
}

double tv_distance(const DistributionVector& a, const DistributionVector& b) {
  if (a.d != b.d) throw DimensionMismatch("distributions have different block sizes");
  return tv_distance(a.values, b.values);
}

double v_norm(const Vector& x, const Vector& v) {
  if (x.size() != v.size()) throw DimensionMismatch("v-norm weight has the wrong length");
  if (v.size() > 0 && v.minCoeff() < 1.0 - 1e-12) throw InputError("v-norm weight must be at least 1");
  return x.cwiseAbs().dot(v);
}

double stationary_residual(const RowVector& pi, const Matrix& g) {
  return (pi * g).cwiseAbs().maxCoeff();
}

}  // namespace bmtrunc

namespace bmtrunc {

OrderingCheck cumulative_ordering(const DistributionVector& lc, const DistributionVector& mid,
                                  const DistributionVector& fc, const DistributionVector& ref, double tol) {
  const Index d = ref.d;
  if (lc.d != d || mid.d != d || fc.d != d) throw DimensionMismatch("distributions have different block sizes");
  const Index n = std::min({lc.levels(), mid.levels(), fc.levels()}) - 1;
  OrderingCheck out;
  auto value = [](const DistributionVector& x, Index k, Index i) { return k < x.levels() ? x(k, i) : 0.0; };
  for (Index i = 0; i < d; ++i) {
    double a = 0.0, b = 0.0, c = 0.0;
    for (Index m = 0; m <= n; ++m) {
      const double r = value(ref, m, i);
      a += value(lc, m, i) - r;
      b += value(mid, m, i) - r;
      c += value(fc, m, i) - r;
      const std::pair<double, const char*> gaps[] = {
          {-a, "0 <= lc"}, {a - b, "lc <= custom"}, {b - c, "custom <= fc"}};
      for (const auto& [g, label] : gaps) {
        if (g > out.worst) {
          out.worst = g;
          out.level = m;
          out.phase = i;
          out.where = label;
        }
      }
    }
  }
  out.pass = out.worst <= tol;
  return out;
}

}  // namespace bmtrunc
