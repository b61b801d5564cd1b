#include "epk/state.hpp"

#include <algorithm>
#include <cmath>

namespace epk {

bool StateVector::finite() const {
  for (double x : to_array())
    if (!std::isfinite(x)) return false;
  return true;
}

namespace {
double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }
} // namespace

ControlVector::ControlVector(double w1, double w2, double w3)
    : contact_reduction(clamp01(w1)),
      treatment_boost(clamp01(w2)),
      recovery_boost(clamp01(w3)) {}

} // namespace epk
