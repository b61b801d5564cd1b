#ifndef EPK_ODE_HPP
#define EPK_ODE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "epk/errors.hpp"
#include "epk/parameters.hpp"
#include "epk/state.hpp"

namespace epk {

/// Uniform grid on [t0, tf] with n_steps intervals (n_steps + 1 nodes).
struct TimeGrid {
  double t0 = 0.0;
  double tf = 0.0;
  int n_steps = 1;

  double step() const { return (tf - t0) / n_steps; }
  double time_at(int i) const { return t0 + step() * i; }
  int n_nodes() const { return n_steps + 1; }
  void validate() const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

using Vec6 = std::array<double, 6>;
using Rhs6 = std::function<Vec6(double, const Vec6&)>;

/// Node values of a 6-component system on a grid, ascending in time.
struct Trajectory {
  TimeGrid grid;
  std::vector<Vec6> values;

  /// Piecewise-linear value at time t (t clamped into [t0, tf]).
  Vec6 at_time(double t) const;
};

namespace detail {

template <std::size_t N>
using VecN = std::array<double, N>;

template <std::size_t N>
bool all_finite(const VecN<N>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

/// One classical Runge-Kutta step of size h (h may be negative).
template <std::size_t N, typename F>
VecN<N> rk4_step(const F& f, double t, const VecN<N>& x, double h) {
  VecN<N> k1 = f(t, x);
  VecN<N> tmp;
  for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
  VecN<N> k2 = f(t + 0.5 * h, tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
  VecN<N> k3 = f(t + 0.5 * h, tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + h * k3[i];
  VecN<N> k4 = f(t + h, tmp);
  VecN<N> out;
  for (std::size_t i = 0; i < N; ++i)
    out[i] = x[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

/// Fixed-step RK4 over the whole grid; returns all n_steps+1 nodes.
/// Throws NonFiniteStateError as soon as a node degenerates.
template <std::size_t N, typename F>
std::vector<VecN<N>> rk4_integrate(const F& f, const VecN<N>& x0,
                                   const TimeGrid& grid) {
  grid.validate();
  if (!all_finite<N>(x0)) throw NonFiniteStateError("initial state is not finite");
  std::vector<VecN<N>> out(static_cast<std::size_t>(grid.n_nodes()));
  out[0] = x0;
  const double h = grid.step();
  for (int i = 0; i < grid.n_steps; ++i) {
    out[static_cast<std::size_t>(i) + 1] =
        rk4_step<N>(f, grid.time_at(i), out[static_cast<std::size_t>(i)], h);
    if (!all_finite<N>(out[static_cast<std::size_t>(i) + 1]))
      throw NonFiniteStateError("integration produced a non-finite state at step " +
                                std::to_string(i + 1));
  }
  return out;
}

} // namespace detail

/// Integrate x' = rhs(t, x) from grid.t0 to grid.tf; values[0] = x0.
/// Deterministic bit-for-bit for identical inputs.
Trajectory integrate_forward(const Rhs6& rhs, const Vec6& x0, const TimeGrid& grid);

/// Integrate from grid.tf down to grid.t0 with terminal value xf; the
/// returned values are ordered ascending in time, values.back() = xf.
Trajectory integrate_backward(const Rhs6& rhs, const Vec6& xf, const TimeGrid& grid);

/// Outcome of a trajectory-level contract check.
struct TrajectoryReport {
  bool passed = false;
  double worst_violation = 0.0; ///< signed; passed iff <= tolerance
  int location = 0;             ///< node index of the worst violation
  double tolerance = 0.0;
};

/// Componentwise nonnegativity up to a small integrator undershoot:
/// tolerance = 1e-9 * max(1, ||x0||_inf). Undershoot beyond that fails the
/// report; nothing is clamped.
TrajectoryReport check_positivity(const Trajectory& traj);

/// Total-population bound N(t) <= max(N(0), Lambda/mu) * (1 + 1e-9),
/// the comparison bound that follows from N' <= Lambda - mu*N.
TrajectoryReport check_population_bound(const Trajectory& traj, const ParameterSet& p);

} // namespace epk

#endif
