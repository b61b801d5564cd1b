#ifndef EPK_PARAMETERS_HPP
#define EPK_PARAMETERS_HPP

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace epk {

/// All epidemiological rates of the SVEIRT model. Units are per week unless
/// noted; transmission rates are per person per week.
struct ParameterSet {
  double recruitment = 0.0;      ///< inflow into the susceptible class, persons/week
  double contact_exposed = 0.0;  ///< transmission from contact with exposed
  double contact_infected = 0.0; ///< transmission from contact with infected
  double vaccination_rate = 0.0; ///< susceptible -> vaccinated
  double progression = 0.0;      ///< exposed -> infected
  double recovery = 0.0;         ///< infected -> recovered
  double treatment = 0.0;        ///< infected -> treated
  double natural_death = 0.0;    ///< background mortality, must be positive
  double disease_death = 0.0;    ///< additional mortality while infected
  double vaccine_efficacy = 0.0; ///< dimensionless, in [0,1]

  /// Breakthrough factor applied to infection of vaccinated hosts.
  /// Always derived, never stored, so the two can not drift apart.
  double vaccine_inefficiency() const { return 1.0 - vaccine_efficacy; }

  /// Throws ValidationError (negative rates, efficacy outside [0,1]) or
  /// DegenerateParameterError (natural_death == 0, which divides equilibria).
  void validate() const;

  bool is_valid() const noexcept;
};

/// The ten fields of ParameterSet, in preset-file key order.
enum class ParamField {
  recruitment,
  contact_exposed,
  contact_infected,
  vaccination_rate,
  progression,
  recovery,
  treatment,
  natural_death,
  disease_death,
  vaccine_efficacy,
};

inline constexpr std::array<ParamField, 10> all_param_fields = {
    ParamField::recruitment,     ParamField::contact_exposed,
    ParamField::contact_infected, ParamField::vaccination_rate,
    ParamField::progression,     ParamField::recovery,
    ParamField::treatment,       ParamField::natural_death,
    ParamField::disease_death,   ParamField::vaccine_efficacy,
};

/// Preset-file key for a field ("Lambda", "beta1", "beta2", "phi", "alpha",
/// "gamma", "gamma1", "mu", "delta", "epsilon").
std::string_view field_key(ParamField f);

/// Inverse of field_key; throws ValidationError on unknown keys.
ParamField field_from_key(std::string_view key);

double get_field(const ParameterSet& p, ParamField f);
void set_field(ParameterSet& p, ParamField f, double value);

/// Named country calibration bundled with the library.
struct CountryPreset {
  std::string name;
  ParameterSet params;
};

/// The three shipped calibrations (mexico, italy, south_africa). Each carries
/// the documented defaults recruitment = 500 and vaccination_rate = 0.1.
const std::vector<CountryPreset>& country_presets();

/// Lookup by name; throws ValidationError if the name is unknown.
const ParameterSet& country_preset(std::string_view name);

/// Flat key-value parameter files, one `key = value` pair per line with the
/// keys listed under field_key. '#' starts a comment.
ParameterSet load_parameter_file(const std::string& path);
void save_parameter_file(const std::string& path, const ParameterSet& p);
ParameterSet parse_parameter_text(std::string_view text, std::string_view origin);

} // namespace epk

#endif
