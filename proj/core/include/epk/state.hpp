#ifndef EPK_STATE_HPP
#define EPK_STATE_HPP

#include <array>

namespace epk {

/// One point of the SVEIRT phase space (persons per compartment).
/// Also used for right-hand-side values, where entries are persons/week.
struct StateVector {
  double susceptible = 0.0;
  double vaccinated = 0.0;
  double exposed = 0.0;
  double infected = 0.0;
  double recovered = 0.0;
  double treated = 0.0;

  double total() const {
    return susceptible + vaccinated + exposed + infected + recovered + treated;
  }

  bool nonnegative() const {
    return susceptible >= 0.0 && vaccinated >= 0.0 && exposed >= 0.0 &&
           infected >= 0.0 && recovered >= 0.0 && treated >= 0.0;
  }

  bool finite() const;

  std::array<double, 6> to_array() const {
    return {susceptible, vaccinated, exposed, infected, recovered, treated};
  }

  static StateVector from_array(const std::array<double, 6>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5]};
  }
};

/// Intervention intensities, each clamped to [0,1] on construction:
/// contact_reduction scales transmission toward susceptibles down,
/// treatment_boost and recovery_boost scale the exit rates of the
/// infected class up.
struct ControlVector {
  double contact_reduction = 0.0;
  double treatment_boost = 0.0;
  double recovery_boost = 0.0;

  ControlVector() = default;
  ControlVector(double w1, double w2, double w3);

  static ControlVector uniform(double w) { return ControlVector(w, w, w); }
};

} // namespace epk

#endif
