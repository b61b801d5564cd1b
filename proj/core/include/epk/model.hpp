#ifndef EPK_MODEL_HPP
#define EPK_MODEL_HPP

#include <optional>

#include "epk/parameters.hpp"
#include "epk/state.hpp"

namespace epk {

/// Time derivative of the autonomous SVEIRT system at `state`.
StateVector base_rhs(const StateVector& state, const ParameterSet& p);

/// Time derivative of the controlled system: the infection pressure on
/// susceptibles is scaled by (1 - contact_reduction), recovery by
/// (1 + recovery_boost) and treatment by (1 + treatment_boost). Coincides
/// with base_rhs at zero control.
StateVector controlled_rhs(const StateVector& state, const ParameterSet& p,
                           const ControlVector& w);

/// The infection-free stationary point
///   (Lambda/(mu+phi), phi*Lambda/(mu*(mu+phi)), 0, 0, 0, 0).
/// Throws DegenerateParameterError when natural_death is zero.
StateVector disease_free_equilibrium(const ParameterSet& p);

/// Strictly positive stationary point, or nullopt when none exists.
/// Solved numerically (bisection-bracketed damped Newton on a scalar
/// reduction) and certified: the returned state satisfies
/// ||base_rhs||_inf < 1e-8 * recruitment with exposed, infected > 0.
std::optional<StateVector> endemic_equilibrium(const ParameterSet& p);

/// Basic reproduction number of the uncontrolled system,
///   S0 * [alpha*beta2 + beta1*(gamma+gamma1+mu+delta)]
///   / ((alpha+mu)*(gamma+gamma1+delta+mu)),  S0 = Lambda/(mu+phi).
double r0_without_control(const ParameterSet& p);

/// Reproduction number including vaccine breakthrough, for a population of
/// size `total_population`. Its second summand vanishes for a perfect vaccine.
double r0_with_control(const ParameterSet& p, double total_population);

/// Normalized sensitivity index (elasticity) of r0_without_control with
/// respect to one parameter: (dR0/dP) * (P / R0), in analytic closed form.
/// Throws DegenerateParameterError when R0 is zero.
double local_sensitivity_index(const ParameterSet& p, ParamField which);

} // namespace epk

#endif
