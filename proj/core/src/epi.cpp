#include "epk/epi.hpp"

#include <cmath>

#include "epk/errors.hpp"

namespace epk {

GenerationInterval GenerationInterval::from_parameters(const ParameterSet& p) {
  p.validate();
  GenerationInterval gi;
  gi.latent_exit_rate = p.progression + p.natural_death;
  gi.infectious_exit_rate =
      p.natural_death + p.disease_death + p.recovery + p.treatment;
  gi.validate();
  return gi;
}

void GenerationInterval::validate() const {
  if (!(latent_exit_rate > 0.0) || !(infectious_exit_rate > 0.0))
    throw ValidationError("generation interval rates must be positive");
}

namespace {

bool nearly_equal_rates(double b1, double b2) {
  return std::fabs(b1 - b2) <= 1e-9 * std::max(b1, b2);
}

// CDF of the two-stage interval; drives both the density bins and the tests.
double interval_cdf(const GenerationInterval& gi, double t) {
  const double b1 = gi.latent_exit_rate;
  const double b2 = gi.infectious_exit_rate;
  if (nearly_equal_rates(b1, b2)) {
    const double b = 0.5 * (b1 + b2);
    return 1.0 - (1.0 + b * t) * std::exp(-b * t);
  }
  return 1.0 - (b2 * std::exp(-b1 * t) - b1 * std::exp(-b2 * t)) / (b2 - b1);
}

} // namespace

double generation_interval_density(const GenerationInterval& gi, double t) {
  gi.validate();
  if (t < 0.0) throw ValidationError("generation interval density needs t >= 0");
  const double b1 = gi.latent_exit_rate;
  const double b2 = gi.infectious_exit_rate;
  if (nearly_equal_rates(b1, b2)) {
    const double b = 0.5 * (b1 + b2);
    return b * b * t * std::exp(-b * t);
  }
  return b1 * b2 * (std::exp(-b1 * t) - std::exp(-b2 * t)) / (b2 - b1);
}

double generation_interval_week_mass(const GenerationInterval& gi, int week) {
  gi.validate();
  if (week < 1) throw ValidationError("week bins start at 1");
  return interval_cdf(gi, static_cast<double>(week)) -
         interval_cdf(gi, static_cast<double>(week - 1));
}

RtSeries effective_r_series(const IncidenceSeries& data, const GenerationInterval& gi) {
  data.validate();
  gi.validate();
  if (data.size() < 2)
    throw ValidationError("effective reproduction number needs >= 2 weeks of data");

  const std::size_t n = data.size();
  std::vector<double> mass(n + 1, 0.0);
  for (std::size_t s = 1; s <= n; ++s)
    mass[s] = generation_interval_week_mass(gi, static_cast<int>(s));

  RtSeries out;
  out.week = data.week;
  out.rt.assign(n, 0.0);
  out.defined.assign(n, false);
  for (std::size_t t = 0; t < n; ++t) {
    double denom = 0.0;
    for (std::size_t s = 1; s <= t; ++s)
      denom += data.new_cases[t - s] * mass[s];
    if (denom > 0.0) {
      out.rt[t] = data.new_cases[t] / denom;
      out.defined[t] = true;
      if (out.defined_from < 0) out.defined_from = static_cast<int>(t);
    }
  }
  return out;
}

} // namespace epk
