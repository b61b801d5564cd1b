#ifndef EPK_CALIBRATION_HPP
#define EPK_CALIBRATION_HPP

#include <utility>
#include <vector>

#include "epk/parameters.hpp"
#include "epk/state.hpp"

namespace epk {

/// Weekly surveillance counts. Weeks are consecutive integers; counts are
/// nonnegative new cases per week.
struct IncidenceSeries {
  std::vector<int> week;
  std::vector<double> new_cases;

  std::size_t size() const { return week.size(); }

  /// Prefix sums of new_cases (cumulative cases as of each week).
  std::vector<double> cumulative() const;

  /// Throws ValidationError on negative counts, week gaps, or empty series.
  void validate() const;
};

/// Whether residuals compare cumulative case counts (default) or the raw
/// weekly increments.
enum class FitTarget { cumulative, weekly };

/// Model-predicted new cases per week: the system is integrated together
/// with a cumulative-infection accumulator C' = alpha * E, and week j's
/// incidence is C(j+1) - C(j). steps_per_week controls the internal grid.
std::vector<double> model_weekly_incidence(const ParameterSet& p,
                                           const StateVector& x0, int n_weeks,
                                           int steps_per_week = 20);

/// Observation minus model, elementwise over the series.
std::vector<double> residuals(const ParameterSet& p, const IncidenceSeries& data,
                              const StateVector& x0,
                              FitTarget target = FitTarget::cumulative);

/// Sum of squared residuals (computed from `residuals`, so the two are
/// consistent to the last bit).
double sse(const ParameterSet& p, const IncidenceSeries& data,
           const StateVector& x0, FitTarget target = FitTarget::cumulative);

struct FitOptions {
  FitTarget target = FitTarget::cumulative;
  int max_evaluations = 0;    ///< 0 means 200 per free dimension
  double diameter_tol = 1e-8; ///< relative simplex diameter at termination
  int steps_per_week = 20;
};

struct FitResult {
  ParameterSet params;
  double sse = 0.0;
  std::vector<double> residuals;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<double> best_sse_history; ///< best vertex per iteration, non-increasing
};

/// Nelder-Mead simplex over the chosen free coordinates, each searched in
/// log-space when its lower bound is positive (keeps rates positive without
/// a constrained solver) and penalized quadratically outside its bounds.
/// Reflection 1, expansion 2, contraction 0.5, shrink 0.5.
FitResult nelder_mead_fit(const IncidenceSeries& data, const StateVector& x0,
                          const ParameterSet& initial,
                          const std::vector<ParamField>& free_fields,
                          const std::vector<std::pair<double, double>>& bounds,
                          const FitOptions& options = {});

/// Ordinary least-squares line of weekly new cases against cumulative cases.
struct GrowthRegression {
  double slope = 0.0; ///< epidemic growth rate, per week
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Regression over weeks [week_lo, week_hi] (inclusive, series week labels).
/// Throws InvalidBoundsError on a bad window and DegenerateParameterError
/// when the cumulative counts are constant over the window.
GrowthRegression epidemic_growth_rate(const IncidenceSeries& data, int week_lo,
                                      int week_hi);

/// Early-phase reproduction-number estimate from the regression slope.
/// The closed form mixes growth-rate and recruitment terms and is reported
/// for comparison only, hence the unconditional caveat flag.
struct ExponentialPhaseR0 {
  double value = 0.0;
  bool formula_caveat = true;
};

ExponentialPhaseR0 r0_from_exponential_phase(const GrowthRegression& growth,
                                             const ParameterSet& p);

} // namespace epk

#endif
