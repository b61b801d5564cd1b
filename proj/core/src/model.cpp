#include "epk/model.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "epk/errors.hpp"

namespace epk {

StateVector controlled_rhs(const StateVector& x, const ParameterSet& p,
                           const ControlVector& w) {
  const double pressure = p.contact_exposed * x.exposed +
                          p.contact_infected * x.infected;
  const double breakthrough = p.vaccine_inefficiency();
  const double incidence_s = (1.0 - w.contact_reduction) * pressure * x.susceptible;
  const double incidence_v = breakthrough * pressure * x.vaccinated;

  StateVector d;
  d.susceptible = p.recruitment - incidence_s -
                  (p.natural_death + p.vaccination_rate) * x.susceptible;
  d.vaccinated = p.vaccination_rate * x.susceptible - incidence_v -
                 p.natural_death * x.vaccinated;
  d.exposed = incidence_s - (p.progression + p.natural_death) * x.exposed;
  d.infected = p.progression * x.exposed + incidence_v -
               (p.natural_death + p.disease_death) * x.infected -
               (1.0 + w.treatment_boost) * p.treatment * x.infected -
               (1.0 + w.recovery_boost) * p.recovery * x.infected;
  d.recovered = (1.0 + w.recovery_boost) * p.recovery * x.infected -
                p.natural_death * x.recovered;
  d.treated = (1.0 + w.treatment_boost) * p.treatment * x.infected -
              p.natural_death * x.treated;
  return d;
}

StateVector base_rhs(const StateVector& x, const ParameterSet& p) {
  // The controlled field at zero control, so the two coincide bit-for-bit.
  return controlled_rhs(x, p, ControlVector{});
}

StateVector disease_free_equilibrium(const ParameterSet& p) {
  p.validate();
  const double s0 = p.recruitment / (p.natural_death + p.vaccination_rate);
  const double v0 = p.vaccination_rate * p.recruitment /
                    (p.natural_death * (p.natural_death + p.vaccination_rate));
  return {s0, v0, 0.0, 0.0, 0.0, 0.0};
}

double r0_without_control(const ParameterSet& p) {
  p.validate();
  const double exit_e = p.progression + p.natural_death;
  const double exit_i =
      p.recovery + p.treatment + p.natural_death + p.disease_death;
  if (exit_i == 0.0)
    throw DegenerateParameterError("infected-class exit rate is zero");
  const double s0 = p.recruitment / (p.natural_death + p.vaccination_rate);
  return s0 *
         (p.progression * p.contact_infected + p.contact_exposed * exit_i) /
         (exit_e * exit_i);
}

double r0_with_control(const ParameterSet& p, double total_population) {
  p.validate();
  if (!(total_population > 0.0))
    throw DegenerateParameterError("total population must be positive");
  const double exit_e = p.progression + p.natural_death;
  const double exit_i =
      p.recovery + p.treatment + p.natural_death + p.disease_death;
  if (exit_i == 0.0)
    throw DegenerateParameterError("infected-class exit rate is zero");
  const double vaccinated_exit = p.natural_death + p.vaccination_rate;
  const double direct =
      p.natural_death * total_population *
      (p.progression * p.contact_infected + p.contact_exposed * exit_i) /
      (vaccinated_exit * exit_e * exit_i);
  const double breakthrough = total_population * p.vaccination_rate *
                              p.contact_infected * p.vaccine_inefficiency() /
                              (vaccinated_exit * exit_i);
  return direct + breakthrough;
}

namespace {

// Stationary state rebuilt from the exposed level, using the force of
// infection lam1(E) = a1*a2*E / (Lambda - a1*E) implied by the E-equation.
struct EquilibriumCandidate {
  StateVector state;
  double i_residual; // residual of the infected-class equation
  bool positive;     // S, V > 0 and E, I strictly positive
};

EquilibriumCandidate candidate_from_exposed(const ParameterSet& p, double e) {
  const double a1 = p.progression + p.natural_death;
  const double a2 = p.natural_death + p.vaccination_rate;
  const double exit_i =
      p.recovery + p.treatment + p.natural_death + p.disease_death;
  const double lam = p.vaccine_inefficiency();

  const double margin = p.recruitment - a1 * e;
  const double force = a1 * a2 * e / margin;
  const double s = margin / a2;
  const double i = (force - p.contact_exposed * e) / p.contact_infected;
  const double v = p.vaccination_rate * s / (p.natural_death + lam * force);
  const double r = p.recovery * i / p.natural_death;
  const double t = p.treatment * i / p.natural_death;

  EquilibriumCandidate c;
  c.state = {s, v, e, i, r, t};
  c.i_residual = p.progression * e + lam * force * v - exit_i * i;
  c.positive = e > 0.0 && i > 0.0 && s > 0.0 && v >= 0.0;
  return c;
}

std::optional<StateVector> certify(const ParameterSet& p, const StateVector& x) {
  if (!(x.exposed > 0.0 && x.infected > 0.0 && x.susceptible > 0.0 &&
        x.vaccinated >= 0.0 && x.recovered >= 0.0 && x.treated >= 0.0))
    return std::nullopt;
  const StateVector d = base_rhs(x, p);
  double worst = 0.0;
  for (double v : d.to_array()) worst = std::max(worst, std::fabs(v));
  if (worst < 1e-8 * p.recruitment) return x;
  return std::nullopt;
}

// Root of the infected-class residual on a bracket: damped Newton with a
// numeric slope, falling back to bisection whenever a step leaves the
// bracket or fails to shrink the residual.
double refine_root(const ParameterSet& p, double lo, double hi, double g_lo) {
  auto g = [&](double e) { return candidate_from_exposed(p, e).i_residual; };
  const double tol_g = 1e-12 * std::max(1.0, p.recruitment);
  double a = lo, b = hi, ga = g_lo;
  double e = 0.5 * (a + b);
  for (int iter = 0; iter < 200; ++iter) {
    const double ge = g(e);
    if (std::fabs(ge) <= tol_g) return e;
    if ((ge < 0.0) == (ga < 0.0)) {
      a = e;
      ga = ge;
    } else {
      b = e;
    }
    if (b - a <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, b))
      return 0.5 * (a + b);
    const double h = std::max(1e-9 * (b - a), 1e-14);
    const double slope = (g(e + h) - g(e - h)) / (2.0 * h);
    double next = e - ge / slope;
    if (!std::isfinite(next) || next <= a || next >= b)
      next = 0.5 * (a + b); // bisect
    e = next;
  }
  return e;
}

} // namespace

std::optional<StateVector> endemic_equilibrium(const ParameterSet& p) {
  p.validate();
  const double a1 = p.progression + p.natural_death;
  const double a2 = p.natural_death + p.vaccination_rate;
  const double exit_i =
      p.recovery + p.treatment + p.natural_death + p.disease_death;
  const double lam = p.vaccine_inefficiency();

  if (p.contact_exposed == 0.0 && p.contact_infected == 0.0)
    return std::nullopt; // no transmission

  if (p.contact_infected == 0.0) {
    // Only exposed-contact transmission: the E-equation pins S* = a1/beta1,
    // the S-equation then fixes E* directly.
    const double e = (p.recruitment * p.contact_exposed - a1 * a2) /
                     (a1 * p.contact_exposed);
    if (!(e > 0.0)) return std::nullopt;
    const double s = a1 / p.contact_exposed;
    const double force = p.contact_exposed * e;
    const double v = p.vaccination_rate * s / (p.natural_death + lam * force);
    const double i = (p.progression * e + lam * force * v) / exit_i;
    if (!(i > 0.0)) return std::nullopt;
    return certify(p, {s, v, e, i, p.recovery * i / p.natural_death,
                       p.treatment * i / p.natural_death});
  }

  // Scan the admissible exposed range (0, Lambda/a1) for sign changes of the
  // infected-class residual; extra log-spaced points catch near-threshold
  // roots that sit arbitrarily close to zero.
  const double e_max = p.recruitment / a1;
  std::vector<double> probes;
  probes.reserve(2048 + 48);
  for (int j = 48; j >= 1; --j) probes.push_back(e_max * std::ldexp(1.0, -j));
  constexpr int kScan = 2048;
  for (int i = 1; i < kScan; ++i)
    probes.push_back(e_max * static_cast<double>(i) / kScan);
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

  std::optional<StateVector> found;
  double prev_e = 0.0;
  double prev_g = 0.0;
  bool have_prev = false;
  for (double e : probes) {
    const double ge = candidate_from_exposed(p, e).i_residual;
    if (!std::isfinite(ge)) {
      have_prev = false;
      continue;
    }
    if (have_prev && (ge < 0.0) != (prev_g < 0.0)) {
      const double root = refine_root(p, prev_e, e, prev_g);
      const auto cand = candidate_from_exposed(p, root);
      if (cand.positive) {
        if (auto ok = certify(p, cand.state)) found = ok; // keep largest root
      }
    }
    prev_e = e;
    prev_g = ge;
    have_prev = true;
  }
  return found;
}

double local_sensitivity_index(const ParameterSet& p, ParamField which) {
  p.validate();
  const double b1 = p.contact_exposed;
  const double b2 = p.contact_infected;
  const double a1 = p.progression + p.natural_death;
  const double a2 = p.natural_death + p.vaccination_rate;
  const double exit_i =
      p.recovery + p.treatment + p.natural_death + p.disease_death;
  const double transmission = p.progression * b2 + b1 * exit_i;
  if (transmission == 0.0 || p.recruitment == 0.0)
    throw DegenerateParameterError("sensitivity index undefined: r0 is zero");

  switch (which) {
    case ParamField::recruitment:
      return 1.0;
    case ParamField::contact_exposed:
      return b1 * exit_i / transmission;
    case ParamField::contact_infected:
      return p.progression * b2 / transmission;
    case ParamField::vaccination_rate:
      return -p.vaccination_rate / a2;
    case ParamField::progression:
      return p.progression * (b2 * p.natural_death - b1 * exit_i) /
             (a1 * transmission);
    case ParamField::recovery:
      return -p.recovery * p.progression * b2 / (exit_i * transmission);
    case ParamField::treatment:
      return -p.treatment * p.progression * b2 / (exit_i * transmission);
    case ParamField::disease_death:
      return -p.disease_death * p.progression * b2 / (exit_i * transmission);
    case ParamField::natural_death:
      return p.natural_death * (-1.0 / a2 + b1 / transmission - 1.0 / a1 -
                                1.0 / exit_i);
    case ParamField::vaccine_efficacy:
      return 0.0; // the uncontrolled reproduction number ignores the vaccine
  }
  throw ValidationError("unknown parameter field");
}

} // namespace epk
