#include "epk/io.hpp"

#include <charconv>
#include <set>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "epk/errors.hpp"

namespace epk {

namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + target.parent_path().string());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(std::string_view text, const std::string& where) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto* begin = t.data();
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError(where + ": bad numeric value '" + t + "'");
  return value;
}

long parse_integer(std::string_view text, const std::string& where) {
  const std::string t = trim(text);
  long value = 0;
  const auto* begin = t.data();
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError(where + ": bad integer value '" + t + "'");
  return value;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

} // namespace

namespace {

DataBundle parse_incidence_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  if (!std::getline(in, line))
    throw ParseError(origin + ":1: empty file, expected header 'week,new_cases'");
  ++lineno;
  if (trim(line) != "week,new_cases")
    throw ParseError(origin + ":1: expected header 'week,new_cases', got '" +
                     trim(line) + "'");

  IncidenceSeries series;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (comma == std::string::npos)
      throw ParseError(where + ": expected 'week,new_cases' row");
    const long week = parse_integer(row.substr(0, comma), where);
    const double cases = parse_number(row.substr(comma + 1), where);
    series.week.push_back(static_cast<int>(week));
    series.new_cases.push_back(cases);
  }
  series.validate(); // atomic: throw before anything is returned

  DataBundle bundle;
  bundle.series = std::move(series);
  bundle.source_path = origin;
  bundle.country_tag = fs::path(origin).stem().string();
  return bundle;
}

} // namespace

DataBundle load_incidence_csv(const std::string& path) {
  return parse_incidence_text(read_file(path), path);
}

void write_incidence_csv(const std::string& path, const IncidenceSeries& s) {
  std::string out = "week,new_cases\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += std::to_string(s.week[i]);
    out += ',';
    out += format_double(s.new_cases[i]);
    out += '\n';
  }
  atomic_write(path, out);
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::string out = "t,S,V,E,I,R,T\n";
  for (int i = 0; i < traj.grid.n_nodes(); ++i) {
    out += format_double(traj.grid.time_at(i));
    for (double v : traj.values[static_cast<std::size_t>(i)]) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  atomic_write(path, out);
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  std::string out = "t,S,V,E,I,R,T,psiS,psiV,psiE,psiI,psiR,psiT,w1,w2,w3\n";
  for (int i = 0; i < result.states.grid.n_nodes(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    out += format_double(result.states.grid.time_at(i));
    for (double v : result.states.values[idx]) {
      out += ',';
      out += format_double(v);
    }
    for (double v : result.adjoints.values[idx]) {
      out += ',';
      out += format_double(v);
    }
    const ControlVector& w = result.controls.values[idx];
    out += ',';
    out += format_double(w.contact_reduction);
    out += ',';
    out += format_double(w.treatment_boost);
    out += ',';
    out += format_double(w.recovery_boost);
    out += '\n';
  }
  atomic_write(path, out);
}

void write_rt_csv(const std::string& path, const RtSeries& rts) {
  std::string out = "week,rt,defined\n";
  for (std::size_t i = 0; i < rts.week.size(); ++i) {
    out += std::to_string(rts.week[i]);
    out += ',';
    out += rts.defined[i] ? format_double(rts.rt[i]) : "nan";
    out += ',';
    out += rts.defined[i] ? '1' : '0';
    out += '\n';
  }
  atomic_write(path, out);
}

void write_prcc_csv(const std::string& path, const PrccResult& result) {
  std::string out = "parameter,prcc,p_value,significant\n";
  for (std::size_t i = 0; i < result.names.size(); ++i) {
    out += result.names[i];
    out += ',';
    out += format_double(result.prcc[i]);
    out += ',';
    out += format_double(result.p_value[i]);
    out += ',';
    out += result.significant[i] ? '1' : '0';
    out += '\n';
  }
  atomic_write(path, out);
}

void write_design_csv(const std::string& path, const SampleMatrix& m,
                      std::span<const double> output) {
  if (static_cast<int>(output.size()) != m.n_samples)
    throw LengthMismatchError("design output length must match the sample count");
  std::string out;
  for (int c = 0; c < m.n_params; ++c) {
    if (c) out += ',';
    out += m.names[static_cast<std::size_t>(c)];
  }
  out += ",output\n";
  for (int r = 0; r < m.n_samples; ++r) {
    for (int c = 0; c < m.n_params; ++c) {
      if (c) out += ',';
      out += format_double(m.at(r, c));
    }
    out += ',';
    out += format_double(output[static_cast<std::size_t>(r)]);
    out += '\n';
  }
  atomic_write(path, out);
}

void write_grid_csv(const std::string& path, const LevelGrid& grid) {
  std::string out = "x,y,r0\n";
  for (std::size_t iy = 0; iy < grid.y.size(); ++iy) {
    for (std::size_t ix = 0; ix < grid.x.size(); ++ix) {
      out += format_double(grid.x[ix]);
      out += ',';
      out += format_double(grid.y[iy]);
      out += ',';
      out += format_double(grid.at(static_cast<int>(iy), static_cast<int>(ix)));
      out += '\n';
    }
  }
  atomic_write(path, out);
}

void write_bias_csv(const std::string& path, const BiasReport& report) {
  std::string out = "bin_low,bin_high,count\n";
  for (std::size_t i = 0; i < report.bin_counts.size(); ++i) {
    out += format_double(report.bin_edges[i]);
    out += ',';
    out += format_double(report.bin_edges[i + 1]);
    out += ',';
    out += std::to_string(report.bin_counts[i]);
    out += '\n';
  }
  atomic_write(path, out);
}

IniFile parse_ini(const std::string& text, const std::string& origin) {
  IniFile ini;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (stripped.front() == '[') {
      if (stripped.back() != ']')
        throw ParseError(where + ": unterminated section header");
      section = trim(stripped.substr(1, stripped.size() - 2));
      if (section.empty()) throw ParseError(where + ": empty section name");
      ini[section]; // section may stay empty
      continue;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ParseError(where + ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) throw ParseError(where + ": empty key");
    if (section.empty())
      throw ParseError(where + ": key outside any [section]");
    ini[section][key] = value;
  }
  return ini;
}

std::vector<ParameterRange> default_sensitivity_ranges() {
  return {
      {"beta1", 0.0025, 0.0065}, {"beta2", 0.0025, 0.0065},
      {"Lambda", 250.0, 750.0},  {"delta", 0.03, 0.045},
      {"lambda", 0.3, 0.85},     {"alpha", 0.35, 0.85},
      {"gamma", 0.45, 0.75},     {"gamma1", 0.15, 0.45},
      {"mu", 0.02, 0.06},
  };
}

ParameterSet RunConfig::resolved_params() const {
  if (preset.has_value() == explicit_params.has_value())
    throw ValidationError(
        "config must set exactly one of a preset or explicit [params]");
  if (preset) {
    // Either a shipped preset name or a parameter file on disk.
    try {
      return country_preset(*preset);
    } catch (const ValidationError&) {
      if (fs::exists(*preset)) return load_parameter_file(*preset);
      throw;
    }
  }
  explicit_params->validate();
  return *explicit_params;
}

namespace {

class ConfigReader {
public:
  ConfigReader(IniFile ini, std::string origin)
      : ini_(std::move(ini)), origin_(std::move(origin)) {}

  bool has(const std::string& section, const std::string& key) const {
    const auto s = ini_.find(section);
    return s != ini_.end() && s->second.count(key) > 0;
  }

  std::string str(const std::string& section, const std::string& key) {
    mark(section, key);
    return ini_.at(section).at(key);
  }

  double num(const std::string& section, const std::string& key) {
    return parse_number(str(section, key), where(section, key));
  }

  long integer(const std::string& section, const std::string& key) {
    return parse_integer(str(section, key), where(section, key));
  }

  std::string where(const std::string& section, const std::string& key) const {
    return origin_ + ": [" + section + "] " + key;
  }

  /// Every key must have been consumed; unknown keys are configuration bugs.
  void check_unused() const {
    for (const auto& [section, entries] : ini_)
      for (const auto& [key, value] : entries)
        if (!used_.count(section + "\n" + key))
          throw ValidationError(origin_ + ": unknown config key [" + section +
                                "] " + key);
  }

  const IniFile& ini() const { return ini_; }

private:
  void mark(const std::string& section, const std::string& key) {
    used_.insert(section + "\n" + key);
  }

  IniFile ini_;
  std::string origin_;
  std::set<std::string> used_;
};

} // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  ConfigReader reader(parse_ini(text, origin), origin);
  RunConfig cfg;

  if (reader.has("run", "preset")) cfg.preset = reader.str("run", "preset");
  if (reader.has("run", "t0")) cfg.grid.t0 = reader.num("run", "t0");
  if (reader.has("run", "tf")) cfg.grid.tf = reader.num("run", "tf");
  if (reader.has("run", "steps"))
    cfg.grid.n_steps = static_cast<int>(reader.integer("run", "steps"));
  if (reader.has("run", "out")) cfg.out_dir = reader.str("run", "out");
  if (reader.has("run", "seed"))
    cfg.seed = static_cast<std::uint64_t>(reader.integer("run", "seed"));
  if (reader.has("run", "data")) cfg.data_path = reader.str("run", "data");
  if (reader.has("run", "country")) cfg.country_tag = reader.str("run", "country");

  if (reader.ini().count("params")) {
    ParameterSet p;
    for (ParamField f : all_param_fields)
      set_field(p, f,
                reader.num("params", std::string(field_key(f))));
    cfg.explicit_params = p;
  }

  if (reader.ini().count("initial")) {
    static constexpr const char* keys[6] = {"S", "V", "E", "I", "R", "T"};
    std::array<double, 6> x = cfg.initial.to_array();
    for (std::size_t i = 0; i < 6; ++i)
      if (reader.has("initial", keys[i])) x[i] = reader.num("initial", keys[i]);
    cfg.initial = StateVector::from_array(x);
  }

  if (reader.ini().count("weights")) {
    if (reader.has("weights", "a1")) cfg.weights.exposed_weight = reader.num("weights", "a1");
    if (reader.has("weights", "a2")) cfg.weights.infected_weight = reader.num("weights", "a2");
    if (reader.has("weights", "a3")) cfg.weights.distancing_weight = reader.num("weights", "a3");
    if (reader.has("weights", "a4")) cfg.weights.treatment_weight = reader.num("weights", "a4");
    if (reader.has("weights", "a5")) cfg.weights.recovery_weight = reader.num("weights", "a5");
  }

  if (reader.ini().count("sweep")) {
    if (reader.has("sweep", "max_iterations"))
      cfg.sweep.max_iterations = static_cast<int>(reader.integer("sweep", "max_iterations"));
    if (reader.has("sweep", "tol")) cfg.sweep.convergence_tol = reader.num("sweep", "tol");
    if (reader.has("sweep", "theta")) cfg.sweep.relaxation = reader.num("sweep", "theta");
  }

  if (reader.ini().count("fit")) {
    if (reader.has("fit", "free")) {
      std::istringstream list(reader.str("fit", "free"));
      std::string item;
      while (std::getline(list, item, ',')) {
        const std::string name = trim(item);
        if (!name.empty()) cfg.fit_free.push_back(name);
      }
    }
    if (reader.has("fit", "target")) {
      const std::string t = reader.str("fit", "target");
      if (t == "cumulative") cfg.fit_target = FitTarget::cumulative;
      else if (t == "weekly") cfg.fit_target = FitTarget::weekly;
      else throw ValidationError(reader.where("fit", "target") +
                                 ": expected cumulative or weekly");
    }
    for (const std::string& name : cfg.fit_free) {
      const std::string lo_key = "lo." + name;
      const std::string hi_key = "hi." + name;
      if (!reader.has("fit", lo_key) || !reader.has("fit", hi_key))
        throw ValidationError(origin + ": [fit] missing " + lo_key + " / " + hi_key);
      cfg.fit_bounds[name] = {reader.num("fit", lo_key), reader.num("fit", hi_key)};
    }
    if (reader.has("fit", "weeks")) {
      const std::string w = reader.str("fit", "weeks");
      const auto colon = w.find(':');
      if (colon == std::string::npos)
        throw ValidationError(reader.where("fit", "weeks") + ": expected a:b");
      cfg.weeks_window = {static_cast<int>(parse_integer(w.substr(0, colon),
                                                         reader.where("fit", "weeks"))),
                          static_cast<int>(parse_integer(w.substr(colon + 1),
                                                         reader.where("fit", "weeks")))};
    }
  }

  if (reader.ini().count("sensitivity")) {
    if (reader.has("sensitivity", "n"))
      cfg.sens_n = static_cast<int>(reader.integer("sensitivity", "n"));
    if (reader.has("sensitivity", "output"))
      cfg.sens_output = reader.str("sensitivity", "output");
    if (reader.has("sensitivity", "grid_x")) cfg.grid_x = reader.str("sensitivity", "grid_x");
    if (reader.has("sensitivity", "grid_y")) cfg.grid_y = reader.str("sensitivity", "grid_y");
    if (reader.has("sensitivity", "grid_resolution"))
      cfg.grid_resolution = static_cast<int>(reader.integer("sensitivity", "grid_resolution"));
    if (reader.has("sensitivity", "bias_low")) cfg.bias_low = reader.num("sensitivity", "bias_low");
    if (reader.has("sensitivity", "bias_high")) cfg.bias_high = reader.num("sensitivity", "bias_high");
    if (reader.has("sensitivity", "bias_bins"))
      cfg.bias_bins = static_cast<int>(reader.integer("sensitivity", "bias_bins"));
    // range.<name> = low:high overrides or extends the default design
    for (const auto& [key, value] : reader.ini().at("sensitivity")) {
      if (key.rfind("range.", 0) != 0) continue;
      const std::string name = key.substr(6);
      const auto colon = value.find(':');
      if (colon == std::string::npos)
        throw ValidationError(reader.where("sensitivity", key) + ": expected low:high");
      const std::string where = reader.where("sensitivity", key);
      cfg.sens_ranges.push_back({name, parse_number(value.substr(0, colon), where),
                                 parse_number(value.substr(colon + 1), where)});
      reader.str("sensitivity", key); // mark consumed
    }
  }

  reader.check_unused();
  cfg.grid.validate();
  if (cfg.preset.has_value() == cfg.explicit_params.has_value())
    throw ValidationError(origin +
                          ": config must set exactly one of [run] preset or [params]");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  return parse_config_text(read_file(path), path);
}

} // namespace epk
