#ifndef EPK_EPI_HPP
#define EPK_EPI_HPP

#include <vector>

#include "epk/calibration.hpp"
#include "epk/parameters.hpp"

namespace epk {

/// Two-stage generation interval: a case spends Exp(latent_exit_rate) in the
/// exposed class and Exp(infectious_exit_rate) in the infected class, so the
/// interval density is hypoexponential with mean 1/b1 + 1/b2.
struct GenerationInterval {
  double latent_exit_rate = 0.0;     ///< b1 = alpha + mu
  double infectious_exit_rate = 0.0; ///< b2 = mu + delta + gamma + gamma1

  static GenerationInterval from_parameters(const ParameterSet& p);

  double mean() const { return 1.0 / latent_exit_rate + 1.0 / infectious_exit_rate; }
  void validate() const;
};

/// Density h(t) = b1*b2*(exp(-b1 t) - exp(-b2 t))/(b2 - b1); the equal-rate
/// limit b^2 t exp(-b t) is used when b1 and b2 agree within 1e-9 relative.
/// Throws ValidationError for t < 0.
double generation_interval_density(const GenerationInterval& gi, double t);

/// Mass of the density over the week bin [week-1, week), week >= 1, in
/// closed form. The bins partition [0, inf), so the masses sum to one.
double generation_interval_week_mass(const GenerationInterval& gi, int week);

/// Weekly effective reproduction number series.
struct RtSeries {
  std::vector<int> week;
  std::vector<double> rt;      ///< meaningful only where defined
  std::vector<bool> defined;   ///< false while the convolution is empty
  int defined_from = -1;       ///< first defined week index, -1 if none
};

/// Renewal-equation estimate rt(t) = c(t) / sum_{s>=1} c(t-s) * hbar(s),
/// with hbar the week-binned generation-interval mass. Weeks with a zero
/// denominator are marked undefined rather than erroring.
RtSeries effective_r_series(const IncidenceSeries& data, const GenerationInterval& gi);

} // namespace epk

#endif
