#include "epk/parameters.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "epk/errors.hpp"

namespace epk {

namespace {

constexpr std::array<std::string_view, 10> kFieldKeys = {
    "Lambda", "beta1", "beta2", "phi", "alpha",
    "gamma",  "gamma1", "mu",   "delta", "epsilon"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

} // namespace

void ParameterSet::validate() const {
  const struct {
    const char* name;
    double value;
  } rates[] = {
      {"Lambda", recruitment},   {"beta1", contact_exposed},
      {"beta2", contact_infected}, {"phi", vaccination_rate},
      {"alpha", progression},    {"gamma", recovery},
      {"gamma1", treatment},     {"mu", natural_death},
      {"delta", disease_death},  {"epsilon", vaccine_efficacy},
  };
  for (const auto& r : rates) {
    if (!std::isfinite(r.value) || r.value < 0.0)
      throw ValidationError(std::string("parameter ") + r.name +
                            " must be finite and nonnegative");
  }
  if (vaccine_efficacy > 1.0)
    throw ValidationError("parameter epsilon must lie in [0,1]");
  if (natural_death == 0.0)
    throw DegenerateParameterError("parameter mu must be positive");
}

bool ParameterSet::is_valid() const noexcept {
  try {
    validate();
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::string_view field_key(ParamField f) {
  return kFieldKeys[static_cast<std::size_t>(f)];
}

ParamField field_from_key(std::string_view key) {
  for (std::size_t i = 0; i < kFieldKeys.size(); ++i)
    if (kFieldKeys[i] == key) return static_cast<ParamField>(i);
  throw ValidationError("unknown parameter key: " + std::string(key));
}

double get_field(const ParameterSet& p, ParamField f) {
  switch (f) {
    case ParamField::recruitment: return p.recruitment;
    case ParamField::contact_exposed: return p.contact_exposed;
    case ParamField::contact_infected: return p.contact_infected;
    case ParamField::vaccination_rate: return p.vaccination_rate;
    case ParamField::progression: return p.progression;
    case ParamField::recovery: return p.recovery;
    case ParamField::treatment: return p.treatment;
    case ParamField::natural_death: return p.natural_death;
    case ParamField::disease_death: return p.disease_death;
    case ParamField::vaccine_efficacy: return p.vaccine_efficacy;
  }
  throw ValidationError("unknown parameter field");
}

void set_field(ParameterSet& p, ParamField f, double value) {
  switch (f) {
    case ParamField::recruitment: p.recruitment = value; return;
    case ParamField::contact_exposed: p.contact_exposed = value; return;
    case ParamField::contact_infected: p.contact_infected = value; return;
    case ParamField::vaccination_rate: p.vaccination_rate = value; return;
    case ParamField::progression: p.progression = value; return;
    case ParamField::recovery: p.recovery = value; return;
    case ParamField::treatment: p.treatment = value; return;
    case ParamField::natural_death: p.natural_death = value; return;
    case ParamField::disease_death: p.disease_death = value; return;
    case ParamField::vaccine_efficacy: p.vaccine_efficacy = value; return;
  }
  throw ValidationError("unknown parameter field");
}

const std::vector<CountryPreset>& country_presets() {
  // Country calibrations; recruitment and vaccination_rate are the
  // documented defaults shared by all three.
  static const std::vector<CountryPreset> presets = {
      {"mexico",
       {500.0, 0.0055, 0.0055, 0.1, 0.75, 0.65, 0.25, 0.05, 0.30, 0.45}},
      {"italy",
       {500.0, 0.0053, 0.0061, 0.1, 0.67, 0.61, 0.31, 0.03, 0.27, 0.41}},
      {"south_africa",
       {500.0, 0.0075, 0.0081, 0.1, 0.78, 0.63, 0.35, 0.03, 0.29, 0.44}},
  };
  return presets;
}

const ParameterSet& country_preset(std::string_view name) {
  for (const auto& preset : country_presets())
    if (preset.name == name) return preset.params;
  throw ValidationError("unknown preset: " + std::string(name));
}

ParameterSet parse_parameter_text(std::string_view text, std::string_view origin) {
  ParameterSet p;
  std::array<bool, 10> seen{};
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ParseError(std::string(origin) + ":" + std::to_string(lineno) +
                       ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    ParamField f;
    try {
      f = field_from_key(key);
    } catch (const ValidationError& e) {
      throw ParseError(std::string(origin) + ":" + std::to_string(lineno) + ": " +
                       e.what());
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("trailing characters");
      set_field(p, f, v);
    } catch (const std::exception&) {
      throw ParseError(std::string(origin) + ":" + std::to_string(lineno) +
                       ": bad numeric value '" + value + "'");
    }
    seen[static_cast<std::size_t>(f)] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      throw ValidationError(std::string(origin) + ": missing parameter key " +
                            std::string(kFieldKeys[i]));
  p.validate();
  return p;
}

ParameterSet load_parameter_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open parameter file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_parameter_text(buf.str(), path);
}

void save_parameter_file(const std::string& path, const ParameterSet& p) {
  std::ostringstream out;
  char buf[40];
  for (ParamField f : all_param_fields) {
    std::snprintf(buf, sizeof(buf), "%.17g", get_field(p, f));
    out << field_key(f) << " = " << buf << "\n";
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write parameter file: " + path);
  file << out.str();
}

} // namespace epk
