#include "epk/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "epk/errors.hpp"
#include "epk/model.hpp"
#include "epk/stats.hpp"

namespace epk {

void ParameterRange::validate() const {
  if (name.empty()) throw InvalidBoundsError("parameter range needs a name");
  if (!(low < high) || !std::isfinite(low) || !std::isfinite(high))
    throw InvalidBoundsError("range for " + name + " must satisfy low < high");
}

std::vector<double> SampleMatrix::column(int col) const {
  std::vector<double> out(static_cast<std::size_t>(n_samples));
  for (int r = 0; r < n_samples; ++r) out[static_cast<std::size_t>(r)] = at(r, col);
  return out;
}

SampleMatrix lhs_sample(const std::vector<ParameterRange>& ranges, int n,
                        std::uint64_t seed) {
  if (n < 1) throw InvalidBoundsError("sample count must be >= 1");
  if (ranges.empty()) throw InvalidBoundsError("no parameter ranges given");
  for (const auto& r : ranges) r.validate();

  SampleMatrix m;
  m.n_samples = n;
  m.n_params = static_cast<int>(ranges.size());
  m.seed = seed;
  m.data.assign(static_cast<std::size_t>(n) * ranges.size(), 0.0);
  for (const auto& r : ranges) m.names.push_back(r.name);

  std::mt19937_64 gen(seed);
  for (int col = 0; col < m.n_params; ++col) {
    const auto& r = ranges[static_cast<std::size_t>(col)];
    const double width = (r.high - r.low) / n;
    const std::vector<int> strata = rng::permutation(gen, n);
    for (int row = 0; row < n; ++row) {
      const int k = strata[static_cast<std::size_t>(row)];
      const double u = rng::uniform01(gen);
      double v = r.low + (k + u) * width;
      // Snap into the half-open stratum in the arithmetic the edges use, so
      // stratification stays exhaustively checkable despite rounding.
      const double lo_edge = r.low + k * width;
      const double hi_edge = (k + 1 == n) ? r.high : r.low + (k + 1) * width;
      if (v < lo_edge) v = lo_edge;
      if (v >= hi_edge) v = std::nextafter(hi_edge, lo_edge);
      m.data[static_cast<std::size_t>(row) * m.n_params + col] = v;
    }
  }
  return m;
}

namespace {

void overlay(ParameterSet& p, const std::string& name, double value) {
  // A design column may sample the breakthrough factor directly.
  if (name == "lambda") {
    p.vaccine_efficacy = 1.0 - value;
    return;
  }
  set_field(p, field_from_key(name), value);
}

} // namespace

EvaluationResult evaluate_model_over_samples(
    const SampleMatrix& m, const ParameterSet& base,
    const std::function<double(const ParameterSet&)>& output) {
  EvaluationResult result;
  result.values.assign(static_cast<std::size_t>(m.n_samples),
                       std::numeric_limits<double>::quiet_NaN());
  for (int row = 0; row < m.n_samples; ++row) {
    ParameterSet p = base;
    for (int col = 0; col < m.n_params; ++col)
      overlay(p, m.names[static_cast<std::size_t>(col)], m.at(row, col));
    try {
      result.values[static_cast<std::size_t>(row)] = output(p);
    } catch (const DegenerateParameterError&) {
      ++result.n_failed;
    }
  }
  return result;
}

std::vector<double> rank_transform(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n < 2) throw InsufficientSamplesError("rank transform needs >= 2 values");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });

  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0; // ties share
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

PrccResult prcc(const SampleMatrix& m, std::span<const double> y) {
  if (static_cast<int>(y.size()) != m.n_samples)
    throw LengthMismatchError("output vector length must match the sample count");

  // Drop rows whose evaluation failed.
  std::vector<int> keep;
  for (int r = 0; r < m.n_samples; ++r)
    if (std::isfinite(y[static_cast<std::size_t>(r)])) keep.push_back(r);

  const int n = static_cast<int>(keep.size());
  const int k = m.n_params;
  if (n <= k + 2)
    throw InsufficientSamplesError("prcc needs more than k + 2 usable samples");

  std::vector<std::vector<double>> ranked(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    std::vector<double> col(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r)
      col[static_cast<std::size_t>(r)] = m.at(keep[static_cast<std::size_t>(r)], c);
    ranked[static_cast<std::size_t>(c)] = rank_transform(col);
  }
  std::vector<double> ysub(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r)
    ysub[static_cast<std::size_t>(r)] = y[static_cast<std::size_t>(keep[static_cast<std::size_t>(r)])];
  const std::vector<double> yrank = rank_transform(ysub);

  auto has_variation = [](const std::vector<double>& v) {
    for (double x : v)
      if (x != v[0]) return true;
    return false;
  };
  for (int c = 0; c < k; ++c)
    if (!has_variation(ranked[static_cast<std::size_t>(c)]))
      throw SingularDesignError("design column '" +
                                m.names[static_cast<std::size_t>(c)] +
                                "' is constant after ranking");
  if (!has_variation(yrank))
    throw SingularDesignError("output is constant after ranking");

  const double dof = static_cast<double>(n - 2 - (k - 1));

  PrccResult result;
  result.names = m.names;
  result.n_samples = n;
  result.prcc.resize(static_cast<std::size_t>(k));
  result.p_value.resize(static_cast<std::size_t>(k));
  result.significant.resize(static_cast<std::size_t>(k));

  // Residualize the ranked column and ranked output on all other ranked
  // columns (with intercept); the PRCC is the correlation of the residuals.
  Eigen::MatrixXd design(n, k); // k-1 covariates + intercept
  Eigen::VectorXd target(n), yv(n);
  for (int r = 0; r < n; ++r) yv(r) = yrank[static_cast<std::size_t>(r)];

  for (int j = 0; j < k; ++j) {
    design.col(0).setOnes();
    int out_col = 1;
    for (int c = 0; c < k; ++c) {
      if (c == j) continue;
      for (int r = 0; r < n; ++r)
        design(r, out_col) = ranked[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
      ++out_col;
    }
    for (int r = 0; r < n; ++r)
      target(r) = ranked[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)];

    const auto qr = design.colPivHouseholderQr();
    const Eigen::VectorXd rx = target - design * qr.solve(target);
    const Eigen::VectorXd ry = yv - design * qr.solve(yv);

    const double sxx = rx.squaredNorm();
    const double syy = ry.squaredNorm();
    if (sxx <= 0.0 || syy <= 0.0)
      throw SingularDesignError("residual variance vanished for column '" +
                                m.names[static_cast<std::size_t>(j)] + "'");
    double r = rx.dot(ry) / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);

    double p;
    if (std::fabs(r) >= 1.0) {
      p = 0.0;
    } else {
      const double t = r * std::sqrt(dof / (1.0 - r * r));
      p = student_t_two_sided_p(t, dof);
    }
    result.prcc[static_cast<std::size_t>(j)] = r;
    result.p_value[static_cast<std::size_t>(j)] = p;
    result.significant[static_cast<std::size_t>(j)] = std::fabs(r) > 0.5 && p < 0.05;
  }
  return result;
}

BiasReport relative_bias(std::span<const double> y, double lo, double hi,
                         int n_bins) {
  if (y.empty()) throw ValidationError("relative bias needs a nonempty sample");
  if (!(lo <= hi)) throw InvalidBoundsError("bias interval must satisfy lo <= hi");
  if (n_bins < 1) throw InvalidBoundsError("histogram needs >= 1 bin");

  BiasReport report;
  report.n_samples = static_cast<int>(y.size());

  int inside = 0;
  double min_v = y[0], max_v = y[0];
  for (double v : y) {
    if (v >= lo && v <= hi) ++inside;
    min_v = std::min(min_v, v);
    max_v = std::max(max_v, v);
  }
  report.fraction_in_range = static_cast<double>(inside) / static_cast<double>(y.size());

  // two-pass sample variance
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  report.variance = y.size() > 1 ? ss / static_cast<double>(y.size() - 1) : 0.0;

  report.bin_edges.resize(static_cast<std::size_t>(n_bins) + 1);
  const double span = max_v - min_v;
  for (int i = 0; i <= n_bins; ++i)
    report.bin_edges[static_cast<std::size_t>(i)] =
        min_v + span * static_cast<double>(i) / n_bins;
  report.bin_edges.back() = max_v;
  report.bin_counts.assign(static_cast<std::size_t>(n_bins), 0);
  for (double v : y) {
    int b = (span > 0.0)
                ? static_cast<int>((v - min_v) / span * n_bins)
                : 0;
    b = std::clamp(b, 0, n_bins - 1); // max lands in the last (closed) bin
    ++report.bin_counts[static_cast<std::size_t>(b)];
  }
  return report;
}

LevelGrid r0_level_grid(const ParameterRange& px, const ParameterRange& py,
                        const ParameterSet& base, int resolution) {
  px.validate();
  py.validate();
  if (resolution < 2) throw InvalidBoundsError("grid resolution must be >= 2");

  LevelGrid grid;
  grid.x.resize(static_cast<std::size_t>(resolution));
  grid.y.resize(static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i) {
    const double s = static_cast<double>(i) / (resolution - 1);
    grid.x[static_cast<std::size_t>(i)] = px.low + s * (px.high - px.low);
    grid.y[static_cast<std::size_t>(i)] = py.low + s * (py.high - py.low);
  }
  grid.x.back() = px.high;
  grid.y.back() = py.high;

  grid.values.assign(static_cast<std::size_t>(resolution) * resolution,
                     std::numeric_limits<double>::quiet_NaN());
  for (int iy = 0; iy < resolution; ++iy) {
    for (int ix = 0; ix < resolution; ++ix) {
      ParameterSet p = base;
      overlay(p, px.name, grid.x[static_cast<std::size_t>(ix)]);
      overlay(p, py.name, grid.y[static_cast<std::size_t>(iy)]);
      try {
        grid.values[static_cast<std::size_t>(iy) * resolution + ix] =
            r0_without_control(p);
      } catch (const DegenerateParameterError&) {
        // degenerate cell stays NaN
      }
    }
  }

  // Monotonicity metadata at the grid center, by central finite differences.
  auto center_sign = [&](const ParameterRange& axis, bool along_x) {
    const double cx = 0.5 * (px.low + px.high);
    const double cy = 0.5 * (py.low + py.high);
    const double h = 1e-6 * (axis.high - axis.low);
    ParameterSet center = base;
    overlay(center, px.name, cx);
    overlay(center, py.name, cy);
    ParameterSet plus = center, minus = center;
    overlay(plus, axis.name, (along_x ? cx : cy) + h);
    overlay(minus, axis.name, (along_x ? cx : cy) - h);
    try {
      const double d = r0_without_control(plus) - r0_without_control(minus);
      return (d > 0.0) - (d < 0.0);
    } catch (const DegenerateParameterError&) {
      return 0;
    }
  };
  grid.sign_dx = center_sign(px, true);
  grid.sign_dy = center_sign(py, false);
  return grid;
}

} // namespace epk
