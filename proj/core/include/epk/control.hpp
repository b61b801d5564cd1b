#ifndef EPK_CONTROL_HPP
#define EPK_CONTROL_HPP

#include <vector>

#include "epk/ode.hpp"
#include "epk/parameters.hpp"
#include "epk/state.hpp"

namespace epk {

/// Weights of the running cost
///   a1*E + a2*I + a3*w1^2 + a4*w2^2 + a5*w3^2.
/// The three effort weights must be strictly positive: each optimal control
/// divides by twice its weight, and positivity is what makes the pointwise
/// minimizer unique (d2H/dw2 = 2*a > 0).
struct ControlWeights {
  double exposed_weight = 0.0;     // a1
  double infected_weight = 0.0;    // a2
  double distancing_weight = 0.0;  // a3, effort cost of contact_reduction
  double treatment_weight = 0.0;   // a4, effort cost of treatment_boost
  double recovery_weight = 0.0;    // a5, effort cost of recovery_boost

  void validate() const; ///< throws ZeroEffortWeightError / ValidationError
};

/// Shadow prices of the six compartments (cost per person).
struct AdjointVector {
  double susceptible = 0.0;
  double vaccinated = 0.0;
  double exposed = 0.0;
  double infected = 0.0;
  double recovered = 0.0;
  double treated = 0.0;

  std::array<double, 6> to_array() const {
    return {susceptible, vaccinated, exposed, infected, recovered, treated};
  }
  static AdjointVector from_array(const std::array<double, 6>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5]};
  }
};

/// Node-located control values on a grid; every node lies in [0,1]^3.
struct ControlSchedule {
  TimeGrid grid;
  std::vector<ControlVector> values;

  static ControlSchedule constant(const TimeGrid& grid, const ControlVector& w);

  /// Piecewise-linear control at time t (clamped into the grid span).
  ControlVector at_time(double t) const;
};

struct SweepSettings {
  int max_iterations = 200;
  double convergence_tol = 1e-3; ///< relative, applied jointly to x, psi, w
  double relaxation = 0.5;       ///< new w = theta*candidate + (1-theta)*old
  void validate() const;
};

struct SweepResult {
  Trajectory states;
  Trajectory adjoints;
  ControlSchedule controls;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Running cost integrated with the composite trapezoidal rule over the
/// shared grid. Throws GridMismatchError when the grids differ.
double objective(const Trajectory& states, const ControlSchedule& controls,
                 const ControlWeights& aw);

/// Pointwise Hamiltonian: running cost plus the adjoint-weighted controlled
/// right-hand side.
double hamiltonian(const StateVector& x, const AdjointVector& psi,
                   const ControlVector& w, const ParameterSet& p,
                   const ControlWeights& aw);

/// Costate derivative -dH/dx. The exposed-class equation carries the
/// -a1 source, the infected-class equation the -a2 source; recovered and
/// treated costates decouple as psi' = mu*psi.
AdjointVector adjoint_rhs(const AdjointVector& psi, const StateVector& x,
                          const ControlVector& w, const ParameterSet& p,
                          const ControlWeights& aw);

/// Pointwise minimizer of the Hamiltonian, clamped to [0,1]^3:
///   w1 = clamp((psiE - psiS)*(b1*E + b2*I)*S / (2*a3))
///   w2 = clamp((psiI - psiT)*gamma1*I / (2*a4))
///   w3 = clamp((psiI - psiR)*gamma*I / (2*a5))
ControlVector optimality_update(const StateVector& x, const AdjointVector& psi,
                                const ParameterSet& p, const ControlWeights& aw);

/// Forward-backward sweep for the optimality system: states forward under the
/// current controls, costates backward from zero terminal values, relaxed
/// pointwise control update, until states, adjoints and controls all change
/// by at most convergence_tol (relative) or max_iterations is hit.
/// Non-convergence is reported through the flag, never thrown. The returned
/// controls are the exact pointwise minimizers for the returned state/adjoint
/// pair, so interior nodes satisfy dH/dw = 0 to rounding.
SweepResult forward_backward_sweep(const ParameterSet& p, const ControlWeights& aw,
                                   const StateVector& x0, const TimeGrid& grid,
                                   const SweepSettings& settings);

/// Simulate a fixed (non-optimized) control policy and report it in the same
/// shape as the sweep: states forward, adjoints backward, objective.
SweepResult evaluate_fixed_policy(const ParameterSet& p, const ControlWeights& aw,
                                  const StateVector& x0, const TimeGrid& grid,
                                  const ControlVector& w);

} // namespace epk

#endif
