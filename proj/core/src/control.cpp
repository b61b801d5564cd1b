#include "epk/control.hpp"

#include <algorithm>
#include <cmath>

#include "epk/errors.hpp"
#include "epk/model.hpp"

namespace epk {

void ControlWeights::validate() const {
  if (exposed_weight < 0.0 || infected_weight < 0.0)
    throw ValidationError("state weights must be nonnegative");
  if (!(distancing_weight > 0.0) || !(treatment_weight > 0.0) ||
      !(recovery_weight > 0.0))
    throw ZeroEffortWeightError("effort weights must be strictly positive");
}

void SweepSettings::validate() const {
  if (max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
  if (!(convergence_tol > 0.0))
    throw ValidationError("convergence_tol must be positive");
  if (!(relaxation > 0.0) || relaxation > 1.0)
    throw ValidationError("relaxation must lie in (0, 1]");
}

ControlSchedule ControlSchedule::constant(const TimeGrid& grid,
                                          const ControlVector& w) {
  grid.validate();
  ControlSchedule s;
  s.grid = grid;
  s.values.assign(static_cast<std::size_t>(grid.n_nodes()), w);
  return s;
}

ControlVector ControlSchedule::at_time(double t) const {
  const double h = grid.step();
  double s = (t - grid.t0) / h;
  s = std::clamp(s, 0.0, static_cast<double>(grid.n_steps));
  const int i = std::min(static_cast<int>(s), grid.n_steps - 1);
  const double u = s - i;
  const ControlVector& lo = values[static_cast<std::size_t>(i)];
  const ControlVector& hi = values[static_cast<std::size_t>(i) + 1];
  ControlVector out;
  out.contact_reduction =
      lo.contact_reduction + u * (hi.contact_reduction - lo.contact_reduction);
  out.treatment_boost =
      lo.treatment_boost + u * (hi.treatment_boost - lo.treatment_boost);
  out.recovery_boost =
      lo.recovery_boost + u * (hi.recovery_boost - lo.recovery_boost);
  return out;
}

namespace {

double running_cost(const StateVector& x, const ControlVector& w,
                    const ControlWeights& aw) {
  return aw.exposed_weight * x.exposed + aw.infected_weight * x.infected +
         aw.distancing_weight * w.contact_reduction * w.contact_reduction +
         aw.treatment_weight * w.treatment_boost * w.treatment_boost +
         aw.recovery_weight * w.recovery_boost * w.recovery_boost;
}

} // namespace

double objective(const Trajectory& states, const ControlSchedule& controls,
                 const ControlWeights& aw) {
  if (!(states.grid == controls.grid))
    throw GridMismatchError("states and controls live on different grids");
  const double h = states.grid.step();
  const std::size_t n = states.values.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = running_cost(StateVector::from_array(states.values[i]),
                                  controls.values[i], aw);
    sum += (i == 0 || i + 1 == n) ? 0.5 * g : g;
  }
  return h * sum;
}

double hamiltonian(const StateVector& x, const AdjointVector& psi,
                   const ControlVector& w, const ParameterSet& p,
                   const ControlWeights& aw) {
  const StateVector f = controlled_rhs(x, p, w);
  return running_cost(x, w, aw) + psi.susceptible * f.susceptible +
         psi.vaccinated * f.vaccinated + psi.exposed * f.exposed +
         psi.infected * f.infected + psi.recovered * f.recovered +
         psi.treated * f.treated;
}

AdjointVector adjoint_rhs(const AdjointVector& psi, const StateVector& x,
                          const ControlVector& w, const ParameterSet& p,
                          const ControlWeights& aw) {
  const double b1 = p.contact_exposed;
  const double b2 = p.contact_infected;
  const double mu = p.natural_death;
  const double pressure = b1 * x.exposed + b2 * x.infected;
  const double retain = 1.0 - w.contact_reduction;
  const double lam = p.vaccine_inefficiency();
  const double treat = (1.0 + w.treatment_boost) * p.treatment;
  const double recov = (1.0 + w.recovery_boost) * p.recovery;

  AdjointVector d;
  d.susceptible = psi.susceptible * (retain * pressure + mu + p.vaccination_rate) -
                  psi.vaccinated * p.vaccination_rate -
                  psi.exposed * retain * pressure;
  d.vaccinated = psi.vaccinated * (lam * pressure + mu) -
                 psi.infected * lam * pressure;
  d.exposed = -aw.exposed_weight +
              psi.susceptible * retain * b1 * x.susceptible +
              psi.vaccinated * lam * b1 * x.vaccinated +
              psi.exposed * (-retain * b1 * x.susceptible + p.progression + mu) -
              psi.infected * (p.progression + lam * b1 * x.vaccinated);
  d.infected = -aw.infected_weight +
               psi.susceptible * retain * b2 * x.susceptible +
               psi.vaccinated * lam * b2 * x.vaccinated -
               psi.exposed * retain * b2 * x.susceptible +
               psi.infected *
                   (-lam * b2 * x.vaccinated + mu + p.disease_death + treat + recov) -
               psi.recovered * recov - psi.treated * treat;
  d.recovered = psi.recovered * mu;
  d.treated = psi.treated * mu;
  return d;
}

ControlVector optimality_update(const StateVector& x, const AdjointVector& psi,
                                const ParameterSet& p, const ControlWeights& aw) {
  aw.validate();
  const double pressure = p.contact_exposed * x.exposed +
                          p.contact_infected * x.infected;
  const double w1 = (psi.exposed - psi.susceptible) * pressure * x.susceptible /
                    (2.0 * aw.distancing_weight);
  const double w2 = (psi.infected - psi.treated) * p.treatment * x.infected /
                    (2.0 * aw.treatment_weight);
  const double w3 = (psi.infected - psi.recovered) * p.recovery * x.infected /
                    (2.0 * aw.recovery_weight);
  return ControlVector(w1, w2, w3); // constructor clamps to [0,1]
}

namespace {

Trajectory forward_states(const ParameterSet& p, const StateVector& x0,
                          const ControlSchedule& w) {
  Rhs6 rhs = [&](double t, const Vec6& x) {
    return controlled_rhs(StateVector::from_array(x), p, w.at_time(t)).to_array();
  };
  return integrate_forward(rhs, x0.to_array(), w.grid);
}

Trajectory backward_adjoints(const ParameterSet& p, const ControlWeights& aw,
                             const Trajectory& states, const ControlSchedule& w) {
  // States at the backward half-steps come from linear interpolation of the
  // stored forward nodes; the grids coincide node for node.
  Rhs6 rhs = [&](double t, const Vec6& psi) {
    return adjoint_rhs(AdjointVector::from_array(psi),
                       StateVector::from_array(states.at_time(t)), w.at_time(t),
                       p, aw)
        .to_array();
  };
  return integrate_backward(rhs, Vec6{0.0, 0.0, 0.0, 0.0, 0.0, 0.0}, w.grid);
}

double block_change(const std::vector<Vec6>& prev, const std::vector<Vec6>& next) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i) {
    for (std::size_t k = 0; k < 6; ++k) {
      diff = std::max(diff, std::fabs(next[i][k] - prev[i][k]));
      scale = std::max(scale, std::fabs(next[i][k]));
    }
  }
  return diff / std::max(1.0, scale);
}

double control_change(const std::vector<ControlVector>& prev,
                      const std::vector<ControlVector>& next) {
  double diff = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i) {
    diff = std::max(
        {diff,
         std::fabs(next[i].contact_reduction - prev[i].contact_reduction),
         std::fabs(next[i].treatment_boost - prev[i].treatment_boost),
         std::fabs(next[i].recovery_boost - prev[i].recovery_boost)});
  }
  return diff; // controls already live on the unit scale
}

} // namespace

SweepResult forward_backward_sweep(const ParameterSet& p, const ControlWeights& aw,
                                   const StateVector& x0, const TimeGrid& grid,
                                   const SweepSettings& settings) {
  p.validate();
  aw.validate();
  settings.validate();
  grid.validate();
  if (!x0.nonnegative())
    throw ValidationError("sweep initial state must be nonnegative");

  ControlSchedule w = ControlSchedule::constant(grid, ControlVector{});
  Trajectory states, adjoints;
  std::vector<Vec6> prev_states, prev_adjoints;
  bool converged = false;
  int iterations = 0;

  for (int iter = 1; iter <= settings.max_iterations; ++iter) {
    iterations = iter;
    states = forward_states(p, x0, w);
    adjoints = backward_adjoints(p, aw, states, w);

    std::vector<ControlVector> next(w.values.size());
    for (std::size_t i = 0; i < next.size(); ++i) {
      const ControlVector cand =
          optimality_update(StateVector::from_array(states.values[i]),
                            AdjointVector::from_array(adjoints.values[i]), p, aw);
      const ControlVector& old = w.values[i];
      const double th = settings.relaxation;
      next[i].contact_reduction =
          th * cand.contact_reduction + (1.0 - th) * old.contact_reduction;
      next[i].treatment_boost =
          th * cand.treatment_boost + (1.0 - th) * old.treatment_boost;
      next[i].recovery_boost =
          th * cand.recovery_boost + (1.0 - th) * old.recovery_boost;
    }

    if (iter > 1) {
      const double delta = std::max({block_change(prev_states, states.values),
                                     block_change(prev_adjoints, adjoints.values),
                                     control_change(w.values, next)});
      if (delta <= settings.convergence_tol) {
        w.values = std::move(next);
        converged = true;
        break;
      }
    }
    prev_states = states.values;
    prev_adjoints = adjoints.values;
    w.values = std::move(next);
  }

  // Recompute a consistent triple under the final schedule and report the
  // exact pointwise minimizers, so interior nodes satisfy dH/dw = 0.
  states = forward_states(p, x0, w);
  adjoints = backward_adjoints(p, aw, states, w);
  ControlSchedule out = w;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] =
        optimality_update(StateVector::from_array(states.values[i]),
                          AdjointVector::from_array(adjoints.values[i]), p, aw);

  SweepResult result;
  result.states = std::move(states);
  result.adjoints = std::move(adjoints);
  result.controls = std::move(out);
  result.objective = objective(result.states, result.controls, aw);
  result.iterations = iterations;
  result.converged = converged;
  return result;
}

SweepResult evaluate_fixed_policy(const ParameterSet& p, const ControlWeights& aw,
                                  const StateVector& x0, const TimeGrid& grid,
                                  const ControlVector& w) {
  p.validate();
  aw.validate();
  grid.validate();
  const ControlSchedule schedule = ControlSchedule::constant(grid, w);
  SweepResult result;
  result.states = forward_states(p, x0, schedule);
  result.adjoints = backward_adjoints(p, aw, result.states, schedule);
  result.controls = schedule;
  result.objective = objective(result.states, result.controls, aw);
  result.iterations = 0;
  result.converged = true;
  return result;
}

} // namespace epk
