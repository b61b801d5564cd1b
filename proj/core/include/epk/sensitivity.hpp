#ifndef EPK_SENSITIVITY_HPP
#define EPK_SENSITIVITY_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "epk/parameters.hpp"

namespace epk {

/// Closed sampling interval for one named input.
struct ParameterRange {
  std::string name;
  double low = 0.0;
  double high = 0.0;
  void validate() const; ///< throws InvalidBoundsError unless low < high
};

/// Latin hypercube design: n_samples rows by one column per range, each
/// column containing exactly one point in each of its n equal strata.
struct SampleMatrix {
  std::vector<std::string> names;
  int n_samples = 0;
  int n_params = 0;
  std::uint64_t seed = 0;
  std::vector<double> data; ///< row-major, n_samples * n_params

  double at(int row, int col) const {
    return data[static_cast<std::size_t>(row) * n_params + col];
  }
  std::vector<double> column(int col) const;
};

/// Stratified design: per column the strata are permuted by a seeded
/// deterministic generator and one uniform point is drawn inside each.
/// Identical seeds reproduce the matrix exactly.
SampleMatrix lhs_sample(const std::vector<ParameterRange>& ranges, int n,
                        std::uint64_t seed);

struct EvaluationResult {
  std::vector<double> values; ///< NaN marks a row whose evaluation failed
  int n_failed = 0;
};

/// Overlay each row onto `base` (columns matched to parameter fields by
/// name; the key "lambda" maps to vaccine inefficiency, i.e. sets
/// vaccine_efficacy = 1 - value) and evaluate the scalar output. Rows that
/// raise DegenerateParameterError become NaN and are counted, not thrown.
EvaluationResult evaluate_model_over_samples(
    const SampleMatrix& m, const ParameterSet& base,
    const std::function<double(const ParameterSet&)>& output);

/// Ranks 1..N with ties given their mean rank.
std::vector<double> rank_transform(std::span<const double> v);

/// Partial rank correlation of every design column against the output.
struct PrccResult {
  std::vector<std::string> names;
  std::vector<double> prcc;
  std::vector<double> p_value;
  std::vector<bool> significant; ///< |prcc| > 0.5 and p < 0.05
  int n_samples = 0;
};

/// For each column: rank-transform everything, residualize the column and
/// the output on all remaining ranked columns by least squares, and report
/// the Pearson correlation of the residuals. p-values come from
/// t = r * sqrt(df / (1 - r^2)) with df = n - 2 - (k - 1), two-sided.
/// Rows with NaN output are dropped first. Throws InsufficientSamplesError
/// unless n > k + 2 and SingularDesignError when a ranked column is constant.
PrccResult prcc(const SampleMatrix& m, std::span<const double> y);

/// Sample statistics of an output vector against a query interval.
struct BiasReport {
  std::vector<double> bin_edges;  ///< n_bins + 1 edges over [min, max]
  std::vector<int> bin_counts;    ///< sums to n_samples
  double fraction_in_range = 0.0; ///< share of samples inside [lo, hi]
  double variance = 0.0;          ///< two-pass sample variance
  int n_samples = 0;
};

/// Fraction of samples with lo <= y <= hi, plus histogram and variance.
/// Throws ValidationError on an empty input.
BiasReport relative_bias(std::span<const double> y, double lo, double hi,
                         int n_bins = 20);

/// Rectangular evaluation of r0_without_control for contour plotting.
struct LevelGrid {
  std::vector<double> x; ///< resolution values, px.low .. px.high inclusive
  std::vector<double> y;
  std::vector<double> values; ///< row-major over (y, x); NaN = degenerate cell
  int sign_dx = 0; ///< sign of dR0/dx at the grid center (finite difference)
  int sign_dy = 0;

  double at(int iy, int ix) const {
    return values[static_cast<std::size_t>(iy) * x.size() + ix];
  }
};

LevelGrid r0_level_grid(const ParameterRange& px, const ParameterRange& py,
                        const ParameterSet& base, int resolution);

} // namespace epk

#endif
