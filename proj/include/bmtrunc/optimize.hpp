#ifndef BMTRUNC_OPTIMIZE_HPP
#define BMTRUNC_OPTIMIZE_HPP

#include <cmath>
#include <utility>
#include <vector>

namespace bmtrunc {

/// Golden-section search for a minimum of a unimodal f on [a, b].
/// Returns (argmin, f(argmin)).
template <typename Scalar, typename F>
std::pair<Scalar, Scalar> golden_section_minimize(F&& f, Scalar a, Scalar b, int iterations) {
  const Scalar g = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar x1 = b - g * (b - a);
  Scalar x2 = a + g * (b - a);
  Scalar f1 = f(x1);
  Scalar f2 = f(x2);
  for (int i = 0; i < iterations; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

/// count points log-spaced on the open interval (lo, hi).
inline std::vector<double> open_log_grid(double lo, double hi, int count) {
  std::vector<double> out;
  out.reserve(count);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 1; i <= count; ++i) out.push_back(std::exp(a + (b - a) * i / (count + 1)));
  return out;
}

}  // namespace bmtrunc

#endif  // BMTRUNC_OPTIMIZE_HPP
