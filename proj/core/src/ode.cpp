#include "epk/ode.hpp"

#include <algorithm>
#include <cmath>

namespace epk {

void TimeGrid::validate() const {
  if (!(tf > t0)) throw ValidationError("time grid requires tf > t0");
  if (n_steps < 1) throw ValidationError("time grid requires n_steps >= 1");
  if (!std::isfinite(t0) || !std::isfinite(tf))
    throw ValidationError("time grid bounds must be finite");
}

Vec6 Trajectory::at_time(double t) const {
  const double h = grid.step();
  double s = (t - grid.t0) / h;
  s = std::clamp(s, 0.0, static_cast<double>(grid.n_steps));
  const int i = std::min(static_cast<int>(s), grid.n_steps - 1);
  const double w = s - i;
  const Vec6& lo = values[static_cast<std::size_t>(i)];
  const Vec6& hi = values[static_cast<std::size_t>(i) + 1];
  Vec6 out;
  for (std::size_t k = 0; k < 6; ++k) out[k] = lo[k] + w * (hi[k] - lo[k]);
  return out;
}

Trajectory integrate_forward(const Rhs6& rhs, const Vec6& x0, const TimeGrid& grid) {
  Trajectory traj;
  traj.grid = grid;
  traj.values = detail::rk4_integrate<6>(rhs, x0, grid);
  return traj;
}

Trajectory integrate_backward(const Rhs6& rhs, const Vec6& xf, const TimeGrid& grid) {
  grid.validate();
  if (!detail::all_finite<6>(xf))
    throw NonFiniteStateError("terminal state is not finite");
  Trajectory traj;
  traj.grid = grid;
  traj.values.resize(static_cast<std::size_t>(grid.n_nodes()));
  traj.values[static_cast<std::size_t>(grid.n_steps)] = xf;
  const double h = -grid.step();
  for (int i = grid.n_steps; i > 0; --i) {
    traj.values[static_cast<std::size_t>(i) - 1] = detail::rk4_step<6>(
        rhs, grid.time_at(i), traj.values[static_cast<std::size_t>(i)], h);
    if (!detail::all_finite<6>(traj.values[static_cast<std::size_t>(i) - 1]))
      throw NonFiniteStateError(
          "backward integration produced a non-finite state at node " +
          std::to_string(i - 1));
  }
  return traj;
}

TrajectoryReport check_positivity(const Trajectory& traj) {
  double x0_norm = 0.0;
  for (double v : traj.values.front()) x0_norm = std::max(x0_norm, std::fabs(v));

  TrajectoryReport report;
  report.tolerance = 1e-9 * std::max(1.0, x0_norm);
  double global_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.values.size(); ++i) {
    for (double v : traj.values[i]) {
      if (v < global_min) {
        global_min = v;
        report.location = static_cast<int>(i);
      }
    }
  }
  report.worst_violation = -global_min; // positive when a component dips below 0
  report.passed = report.worst_violation <= report.tolerance;
  return report;
}

TrajectoryReport check_population_bound(const Trajectory& traj, const ParameterSet& p) {
  p.validate();
  double n0 = 0.0;
  for (double v : traj.values.front()) n0 += v;
  const double cap = std::max(n0, p.recruitment / p.natural_death);

  TrajectoryReport report;
  report.tolerance = 1e-9 * cap;
  report.worst_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.values.size(); ++i) {
    double total = 0.0;
    for (double v : traj.values[i]) total += v;
    const double excess = total - cap;
    if (excess > report.worst_violation) {
      report.worst_violation = excess;
      report.location = static_cast<int>(i);
    }
  }
  report.passed = report.worst_violation <= report.tolerance;
  return report;
}

} // namespace epk
