#include "epk/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "epk/errors.hpp"
#include "epk/model.hpp"
#include "epk/ode.hpp"

namespace epk {

std::vector<double> IncidenceSeries::cumulative() const {
  std::vector<double> out(new_cases.size());
  double running = 0.0;
  for (std::size_t i = 0; i < new_cases.size(); ++i) {
    running += new_cases[i];
    out[i] = running;
  }
  return out;
}

void IncidenceSeries::validate() const {
  if (week.size() != new_cases.size())
    throw ValidationError("incidence series: week and count columns differ in length");
  if (week.empty()) throw ValidationError("incidence series: empty");
  for (std::size_t i = 0; i < week.size(); ++i) {
    if (!(new_cases[i] >= 0.0))
      throw ValidationError("incidence series: new_cases must be nonnegative (week " +
                            std::to_string(week[i]) + ")");
    if (i > 0 && week[i] != week[i - 1] + 1)
      throw ValidationError("incidence series: weeks must increase by exactly 1 (week " +
                            std::to_string(week[i]) + ")");
  }
}

std::vector<double> model_weekly_incidence(const ParameterSet& p,
                                           const StateVector& x0, int n_weeks,
                                           int steps_per_week) {
  p.validate();
  if (n_weeks < 1) throw ValidationError("n_weeks must be >= 1");
  if (steps_per_week < 1) throw ValidationError("steps_per_week must be >= 1");

  // Seventh component accumulates cumulative infections, C' = alpha * E.
  using Vec7 = detail::VecN<7>;
  auto rhs = [&](double, const Vec7& x) {
    const StateVector d = base_rhs(
        StateVector::from_array({x[0], x[1], x[2], x[3], x[4], x[5]}), p);
    Vec7 out;
    const auto da = d.to_array();
    std::copy(da.begin(), da.end(), out.begin());
    out[6] = p.progression * x[2];
    return out;
  };

  Vec7 start;
  const auto xa = x0.to_array();
  std::copy(xa.begin(), xa.end(), start.begin());
  start[6] = 0.0;

  TimeGrid grid{0.0, static_cast<double>(n_weeks), n_weeks * steps_per_week};
  const auto nodes = detail::rk4_integrate<7>(rhs, start, grid);

  std::vector<double> incidence(static_cast<std::size_t>(n_weeks));
  for (int j = 0; j < n_weeks; ++j) {
    const double c_hi = nodes[static_cast<std::size_t>((j + 1) * steps_per_week)][6];
    const double c_lo = nodes[static_cast<std::size_t>(j * steps_per_week)][6];
    incidence[static_cast<std::size_t>(j)] = c_hi - c_lo;
  }
  return incidence;
}

std::vector<double> residuals(const ParameterSet& p, const IncidenceSeries& data,
                              const StateVector& x0, FitTarget target) {
  data.validate();
  const int n = static_cast<int>(data.size());
  const std::vector<double> model = model_weekly_incidence(p, x0, n);
  std::vector<double> out(static_cast<std::size_t>(n));
  if (target == FitTarget::weekly) {
    for (int j = 0; j < n; ++j)
      out[static_cast<std::size_t>(j)] =
          data.new_cases[static_cast<std::size_t>(j)] - model[static_cast<std::size_t>(j)];
    return out;
  }
  double obs = 0.0, pred = 0.0;
  for (int j = 0; j < n; ++j) {
    obs += data.new_cases[static_cast<std::size_t>(j)];
    pred += model[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(j)] = obs - pred;
  }
  return out;
}

double sse(const ParameterSet& p, const IncidenceSeries& data,
           const StateVector& x0, FitTarget target) {
  const std::vector<double> r = residuals(p, data, x0, target);
  double sum = 0.0;
  for (double v : r) sum += v * v;
  return sum;
}

namespace {

struct Coordinate {
  ParamField field;
  double low, high; // original units
  bool log_space;   // used when the lower bound is strictly positive

  double encode(double x) const { return log_space ? std::log(x) : x; }
  double decode(double z) const { return log_space ? std::exp(z) : z; }
  double lo_enc() const { return encode(low); }
  double hi_enc() const { return encode(high); }
};

} // namespace

FitResult nelder_mead_fit(const IncidenceSeries& data, const StateVector& x0,
                          const ParameterSet& initial,
                          const std::vector<ParamField>& free_fields,
                          const std::vector<std::pair<double, double>>& bounds,
                          const FitOptions& options) {
  data.validate();
  initial.validate();
  if (free_fields.empty()) throw ValidationError("no free parameters to fit");
  if (bounds.size() != free_fields.size())
    throw InvalidBoundsError("one bound interval required per free parameter");

  const std::size_t dim = free_fields.size();
  std::vector<Coordinate> coords(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const auto [lo, hi] = bounds[i];
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
      throw InvalidBoundsError("bounds for " +
                               std::string(field_key(free_fields[i])) +
                               " must satisfy low < high");
    const double init = get_field(initial, free_fields[i]);
    if (init < lo || init > hi)
      throw InvalidBoundsError("initial value of " +
                               std::string(field_key(free_fields[i])) +
                               " lies outside its bounds");
    coords[i] = {free_fields[i], lo, hi, lo > 0.0};
  }

  const int n = static_cast<int>(data.size());
  const int max_evals = options.max_evaluations > 0
                            ? options.max_evaluations
                            : 200 * static_cast<int>(dim);

  int evaluations = 0;
  auto objective = [&](const std::vector<double>& z) -> double {
    ++evaluations;
    ParameterSet p = initial;
    double penalty = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double zc = std::clamp(z[i], coords[i].lo_enc(), coords[i].hi_enc());
      const double over = z[i] - zc;
      penalty += 1e8 * over * over;
      set_field(p, coords[i].field, coords[i].decode(zc));
    }
    try {
      const std::vector<double> model =
          model_weekly_incidence(p, x0, n, options.steps_per_week);
      double acc = 0.0, obs = 0.0, pred = 0.0;
      for (int j = 0; j < n; ++j) {
        double r;
        if (options.target == FitTarget::weekly) {
          r = data.new_cases[static_cast<std::size_t>(j)] -
              model[static_cast<std::size_t>(j)];
        } else {
          obs += data.new_cases[static_cast<std::size_t>(j)];
          pred += model[static_cast<std::size_t>(j)];
          r = obs - pred;
        }
        acc += r * r;
      }
      if (!std::isfinite(acc)) return std::numeric_limits<double>::infinity();
      return acc + penalty;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity(); // vertex rejected
    }
  };

  // Initial simplex: the start point plus one per-coordinate perturbation.
  std::vector<std::vector<double>> simplex;
  std::vector<double> z0(dim);
  for (std::size_t i = 0; i < dim; ++i)
    z0[i] = coords[i].encode(get_field(initial, coords[i].field));
  simplex.push_back(z0);
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> z = z0;
    z[i] += (z[i] != 0.0) ? 0.05 * std::fabs(z[i]) : 0.00025;
    simplex.push_back(z);
  }
  std::vector<double> fvals(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) fvals[i] = objective(simplex[i]);

  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  std::vector<double> history;
  bool converged = false;
  int iterations = 0;

  auto order = [&]() {
    std::vector<std::size_t> idx(dim + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
    std::vector<std::vector<double>> s2(dim + 1);
    std::vector<double> f2(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) {
      s2[i] = simplex[idx[i]];
      f2[i] = fvals[idx[i]];
    }
    simplex.swap(s2);
    fvals.swap(f2);
  };

  auto diameter = [&]() {
    double d = 0.0, scale = 0.0;
    for (std::size_t i = 1; i <= dim; ++i)
      for (std::size_t k = 0; k < dim; ++k) {
        d = std::max(d, std::fabs(simplex[i][k] - simplex[0][k]));
        scale = std::max(scale, std::fabs(simplex[0][k]));
      }
    return d / std::max(1.0, scale);
  };

  order();
  history.push_back(fvals[0]);

  while (evaluations < max_evals) {
    ++iterations;
    if (diameter() < options.diameter_tol) {
      converged = true;
      break;
    }
    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto blend = [&](double coef) {
      std::vector<double> z(dim);
      for (std::size_t k = 0; k < dim; ++k)
        z[k] = centroid[k] + coef * (centroid[k] - simplex[dim][k]);
      return z;
    };

    const std::vector<double> reflected = blend(kReflect);
    const double f_r = objective(reflected);
    if (f_r < fvals[0]) {
      const std::vector<double> expanded = blend(kExpand);
      const double f_e = objective(expanded);
      if (f_e < f_r) {
        simplex[dim] = expanded;
        fvals[dim] = f_e;
      } else {
        simplex[dim] = reflected;
        fvals[dim] = f_r;
      }
    } else if (f_r < fvals[dim - 1]) {
      simplex[dim] = reflected;
      fvals[dim] = f_r;
    } else {
      const bool outside = f_r < fvals[dim];
      const std::vector<double> contracted = blend(outside ? kContract : -kContract);
      const double f_c = objective(contracted);
      if (f_c < std::min(f_r, fvals[dim])) {
        simplex[dim] = contracted;
        fvals[dim] = f_c;
      } else {
        for (std::size_t i = 1; i <= dim; ++i) {
          for (std::size_t k = 0; k < dim; ++k)
            simplex[i][k] = simplex[0][k] + kShrink * (simplex[i][k] - simplex[0][k]);
          fvals[i] = objective(simplex[i]);
        }
      }
    }
    order();
    history.push_back(std::min(history.back(), fvals[0]));
  }

  FitResult result;
  result.params = initial;
  for (std::size_t i = 0; i < dim; ++i) {
    const double z = std::clamp(simplex[0][i], coords[i].lo_enc(), coords[i].hi_enc());
    set_field(result.params, coords[i].field, coords[i].decode(z));
  }
  result.residuals = residuals(result.params, data, x0, options.target);
  result.sse = 0.0;
  for (double r : result.residuals) result.sse += r * r;
  result.iterations = iterations;
  result.evaluations = evaluations;
  result.converged = converged;
  result.best_sse_history = std::move(history);
  return result;
}

GrowthRegression epidemic_growth_rate(const IncidenceSeries& data, int week_lo,
                                      int week_hi) {
  data.validate();
  if (week_hi <= week_lo)
    throw InvalidBoundsError("regression window must contain at least two weeks");
  const int first = data.week.front();
  const int last = data.week.back();
  if (week_lo < first || week_hi > last)
    throw InvalidBoundsError("regression window exceeds the data span");

  const std::vector<double> cum = data.cumulative();
  std::vector<double> x, y;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.week[i] >= week_lo && data.week[i] <= week_hi) {
      x.push_back(cum[i]);
      y.push_back(data.new_cases[i]);
    }
  }

  const double n = static_cast<double>(x.size());
  const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0)
    throw DegenerateParameterError(
        "regression window degenerate: cumulative cases are constant");

  GrowthRegression g;
  g.slope = sxy / sxx;
  g.intercept = mean_y - g.slope * mean_x;
  g.r_squared = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  return g;
}

ExponentialPhaseR0 r0_from_exponential_phase(const GrowthRegression& growth,
                                             const ParameterSet& p) {
  p.validate();
  const double exit_e = p.progression + p.natural_death;
  const double exit_i =
      p.recovery + p.treatment + p.natural_death + p.disease_death;
  if (exit_i == 0.0)
    throw DegenerateParameterError("infected-class exit rate is zero");
  const double denom = (p.natural_death + p.vaccination_rate) * exit_e * exit_i;

  // Growth rate on the recruitment scale, matching how the regression slope
  // is reported downstream.
  const double g = growth.slope * p.recruitment;

  const double direct =
      p.recruitment * p.progression * p.contact_infected / denom;
  const double mixed =
      p.progression * p.natural_death *
      (g + p.progression + p.natural_death -
       p.contact_exposed * p.recruitment / p.natural_death) *
      (g + exit_i) / denom;
  return {direct + mixed, true};
}

} // namespace epk
