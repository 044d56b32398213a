#include "bmtrunc/core.hpp"

namespace bmtrunc {

std::string to_string(LevelPhaseIndex s) {
  return "(" + std::to_string(s.level) + "," + std::to_string(s.phase + 1) + ")";
}

DriftViolated::DriftViolated(LevelPhaseIndex s, double sl, const std::string& detail)
    : CheckFailure("drift inequality violated at state " + bmtrunc::to_string(s) +
                   " (slack " + std::to_string(sl) + ")" + (detail.empty() ? "" : ": " + detail)),
      state(s),
      slack(sl) {}

ParseError::ParseError(int l, const std::string& what)
    : InputError(l > 0 ? "line " + std::to_string(l) + ": " + what : what), line(l) {}

}  // namespace bmtrunc
