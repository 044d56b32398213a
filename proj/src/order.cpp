#include "bmtrunc/order.hpp"

#include <algorithm>
#include <sstream>

namespace bmtrunc {

std::string to_string(const DominanceReport& r) {
  std::ostringstream os;
  if (r.holds) {
    os << "holds (margin " << r.margin << ")";
  } else {
    os << "fails at " << to_string(r.row) << "->" << to_string(r.col) << " by " << r.worst_violation;
  }
  if (!r.provenance.empty()) os << "; " << r.provenance;
  return os.str();
}

DominanceReport generator_is_block_monotone(const BlockGeneratorModel& model) {
  const Index d = model.phases();
  const Index horizon = model.check_horizon();
  const Index u = model.upper_bandwidth();
  DominanceReport rep;
  // Row 0 of T^{-1} Q T is S(0; l) itself.
  for (Index l = 0; l <= u + 1; ++l) {
    const Matrix s = model.tail_sum(0, l);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j)
        if (!(l == 0 && i == j)) rep.record(0.0, s(i, j), {0, i}, {l, j});
  }
  for (Index k = 1; k <= horizon; ++k) {
    // Beyond k + U + 1 both tails vanish.
    for (Index l = 0; l <= k + u + 1; ++l) {
      const Matrix lo = model.tail_sum(k - 1, l);
      const Matrix hi = model.tail_sum(k, l);
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
          if (!(l == k && i == j)) rep.record(lo(i, j), hi(i, j), {k, i}, {l, j});
    }
  }
  rep.provenance = "checked rows 0.." + std::to_string(horizon) + "; " + model.horizon_note();
  return rep;
}

DominanceReport generator_dominates(const BlockGeneratorModel& q, const BlockGeneratorModel& qt) {
  if (q.phases() != qt.phases()) throw IncompatibleModels("models have different block sizes");
  const Index d = q.phases();
  const Index horizon = std::max(q.check_horizon(), qt.check_horizon());
  const Index u = std::max(q.upper_bandwidth(), qt.upper_bandwidth());
  DominanceReport rep;
  for (Index k = 0; k <= horizon; ++k) {
    for (Index l = 0; l <= k + u + 1; ++l) {
      const Matrix a = q.tail_sum(k, l);
      const Matrix b = qt.tail_sum(k, l);
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) rep.record(a(i, j), b(i, j), {k, i}, {l, j});
    }
  }
  rep.provenance = "checked rows 0.." + std::to_string(horizon) + "; " + qt.horizon_note();
  return rep;
}

}  // namespace bmtrunc
