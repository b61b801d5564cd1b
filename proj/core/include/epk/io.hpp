#ifndef EPK_IO_HPP
#define EPK_IO_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "epk/calibration.hpp"
#include "epk/control.hpp"
#include "epk/epi.hpp"
#include "epk/ode.hpp"
#include "epk/sensitivity.hpp"

namespace epk {

/// "%.17g" — enough digits that reading the text back reproduces the double.
std::string format_double(double x);

/// Write `content`, going through a temporary name in the same directory and
/// renaming on completion, so an interrupted run never leaves a partial file
/// under the final name.
void atomic_write(const std::string& path, const std::string& content);

/// A parsed incidence file plus its provenance.
struct DataBundle {
  IncidenceSeries series;
  std::string source_path;
  std::string country_tag; ///< file stem unless overridden by config
};

/// Parse a `week,new_cases` CSV. Rejects negative counts, week gaps and
/// non-monotone weeks; errors carry the offending line number. The load is
/// atomic: either the whole series parses or nothing is returned.
DataBundle load_incidence_csv(const std::string& path);

void write_incidence_csv(const std::string& path, const IncidenceSeries& s);

/// `t,S,V,E,I,R,T`, one row per node, 17 significant digits.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// `t,S,V,E,I,R,T,psiS,psiV,psiE,psiI,psiR,psiT,w1,w2,w3`.
void write_sweep_csv(const std::string& path, const SweepResult& result);

/// `week,rt,defined` with defined in {0,1}.
void write_rt_csv(const std::string& path, const RtSeries& rts);

/// `parameter,prcc,p_value,significant`.
void write_prcc_csv(const std::string& path, const PrccResult& result);

/// One column per design parameter plus `output`.
void write_design_csv(const std::string& path, const SampleMatrix& m,
                      std::span<const double> output);

/// `x,y,r0`, row-major over the grid; degenerate cells are written as nan.
void write_grid_csv(const std::string& path, const LevelGrid& grid);

/// `bin_low,bin_high,count`.
void write_bias_csv(const std::string& path, const BiasReport& report);

/// INI-style sections of key = value pairs; '#' and ';' start comments.
using IniFile = std::map<std::string, std::map<std::string, std::string>>;
IniFile parse_ini(const std::string& text, const std::string& origin);

/// Everything a batch run needs. Exactly one of preset / explicit parameters
/// must be given.
struct RunConfig {
  std::optional<std::string> preset;
  std::optional<ParameterSet> explicit_params;
  StateVector initial{500.0, 1.0, 1.0, 1.0, 0.0, 0.0};
  TimeGrid grid{0.0, 120.0, 1200};
  ControlWeights weights{20.0, 20.0, 45.0, 25.0, 50.0};
  SweepSettings sweep{};
  std::string out_dir;
  std::uint64_t seed = 42;

  std::optional<std::string> data_path; ///< incidence CSV for fit / rt
  std::optional<std::string> country_tag;

  // fit
  std::vector<std::string> fit_free;
  std::map<std::string, std::pair<double, double>> fit_bounds;
  FitTarget fit_target = FitTarget::cumulative;
  std::optional<std::pair<int, int>> weeks_window; ///< regression window

  // sensitivity
  int sens_n = 100;
  std::string sens_output = "r0"; ///< r0 | r0v | peak_infected | cumulative_infected
  std::vector<ParameterRange> sens_ranges; ///< empty = built-in defaults
  std::string grid_x = "beta1";
  std::string grid_y = "gamma";
  int grid_resolution = 41;
  double bias_low = 2.0;
  double bias_high = 3.0;
  int bias_bins = 20;

  /// Resolve preset or explicit parameters; validates.
  ParameterSet resolved_params() const;
};

/// Default LHS ranges: beta1, beta2 in [0.0025, 0.0065]; alpha [0.35, 0.85];
/// gamma [0.45, 0.75]; gamma1 [0.15, 0.45]; mu [0.02, 0.06];
/// delta [0.03, 0.045]; vaccine inefficiency "lambda" [0.3, 0.85];
/// Lambda (recruitment) [250, 750].
std::vector<ParameterRange> default_sensitivity_ranges();

/// Load and validate a config file. Unknown sections or keys are errors.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

} // namespace epk

#endif
