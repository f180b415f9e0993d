#pragma once

// Usual stochastic order decisions. X >=_st Y iff F_X <= F_Y everywhere; a
// verdict names the larger variable. Two routes are offered: a DKW-banded
// comparison of empirical CDFs, and an exact-up-to-discretization convolution
// oracle for weighted sums of independent nonnegative variables.

#include <fftw3.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "stord/distributions.hpp"
#include "stord/error.hpp"
#include "stord/majorization.hpp"
#include "stord/numeric.hpp"

namespace stord {

// CDF tabulated on strictly increasing abscissae. Empirical CDFs are
// right-continuous step functions; convolution CDFs interpolate linearly.
class NumericCDF {
 public:
  enum class Interpolation { kStep, kLinear };

  NumericCDF(std::vector<double> grid, std::vector<double> values, Interpolation interp, double tail_tol = 0.0,
             double step = 0.0)
      : grid_(std::move(grid)), values_(std::move(values)), interp_(interp), tail_tol_(tail_tol), step_(step) {
    if (grid_.empty() || grid_.size() != values_.size()) throw ParameterError("NumericCDF: grid/value size mismatch");
    for (std::size_t i = 1; i < grid_.size(); ++i) {
      if (!(grid_[i] > grid_[i - 1])) throw ParameterError("NumericCDF: grid must be strictly increasing");
      if (values_[i] < values_[i - 1]) throw NumericError("NumericCDF: values must be nondecreasing");
    }
    if (values_.front() < 0.0 || values_.back() > 1.0 + 1e-12 || values_.back() < 1.0 - tail_tol_ - 1e-9)
      throw NumericError("NumericCDF: values leave [0, 1] or miss the recorded tail tolerance");
  }

  [[nodiscard]] const std::vector<double>& grid() const noexcept { return grid_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
  [[nodiscard]] std::size_t size() const noexcept { return grid_.size(); }
  [[nodiscard]] Interpolation interpolation() const noexcept { return interp_; }
  [[nodiscard]] double tail_tol() const noexcept { return tail_tol_; }
  // Uniform spacing, or 0 when the grid is irregular.
  [[nodiscard]] double step() const noexcept { return step_; }

  [[nodiscard]] double at(double x) const {
    if (x < grid_.front()) return 0.0;
    if (x >= grid_.back()) return values_.back();
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - grid_.begin());
    const std::size_t lo = hi - 1;
    if (interp_ == Interpolation::kStep) return values_[lo];
    const double w = (x - grid_[lo]) / (grid_[hi] - grid_[lo]);
    return values_[lo] + w * (values_[hi] - values_[lo]);
  }

  // E[X] for a nonnegative variable, by integrating the survival function.
  [[nodiscard]] double mean() const {
    double m = grid_.front() > 0.0 ? grid_.front() : 0.0;
    for (std::size_t i = 1; i < grid_.size(); ++i) {
      const double dx = grid_[i] - grid_[i - 1];
      if (interp_ == Interpolation::kStep) m += dx * (1.0 - values_[i - 1]);
      else m += 0.5 * dx * ((1.0 - values_[i - 1]) + (1.0 - values_[i]));
    }
    return m;
  }

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
  Interpolation interp_;
  double tail_tol_ = 0.0;
  double step_ = 0.0;
};

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

// Two-column CSV (abscissa, value) with a header row.
inline void write_csv(std::ostream& os, const NumericCDF& cdf) {
  os << "abscissa,value\n";
  for (std::size_t i = 0; i < cdf.size(); ++i) os << format_double(cdf.grid()[i]) << ',' << format_double(cdf.values()[i]) << '\n';
}

inline NumericCDF ecdf(std::vector<double> samples) {
  if (samples.empty()) throw ParameterError("ecdf: samples must be nonempty");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  std::vector<double> grid, values;
  grid.reserve(samples.size());
  values.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) throw ParameterError("ecdf: samples must be finite");
    if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
    grid.push_back(samples[i]);
    values.push_back(static_cast<double>(i + 1) / n);
  }
  values.back() = 1.0;
  return NumericCDF(std::move(grid), std::move(values), NumericCDF::Interpolation::kStep);
}

enum class StRelation { kADominates, kBDominates, kCrossing, kInconclusive };

inline const char* to_string(StRelation r) {
  switch (r) {
    case StRelation::kADominates: return "A_DOMINATES";
    case StRelation::kBDominates: return "B_DOMINATES";
    case StRelation::kCrossing: return "CROSSING";
    case StRelation::kInconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

// max_pos_dev = sup (F_A - F_B), max_neg_dev = sup (F_B - F_A), both >= 0.
// A_DOMINATES means A >=_st B, i.e. F_A <= F_B up to the band.
struct OrderVerdict {
  StRelation relation = StRelation::kInconclusive;
  double max_pos_dev = 0.0;
  double max_neg_dev = 0.0;
  std::optional<int> crossing_count;
  double band = 0.0;
  std::map<std::string, double> meta;
};

inline StRelation classify_deviations(double pos, double neg, double band) {
  const bool pos_big = pos > band, neg_big = neg > band;
  if (pos_big && neg_big) return StRelation::kCrossing;
  if (neg_big) return StRelation::kADominates;
  if (pos_big) return StRelation::kBDominates;
  return StRelation::kInconclusive;
}

// DKW half-width sqrt(ln(2/delta) / (2N)).
inline double dkw_band(std::size_t n, double delta) {
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

namespace detail {

// sup(F_a - F_b) and sup(F_b - F_a) for two empirical CDFs given sorted samples.
inline std::pair<double, double> ecdf_deviations(const std::vector<double>& a, const std::vector<double>& b) {
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double pos = 0.0, neg = 0.0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) x = a[i];
    else x = b[j];
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    const double d = static_cast<double>(i) / na - static_cast<double>(j) / nb;
    pos = std::max(pos, d);
    neg = std::max(neg, -d);
  }
  return {pos, neg};
}

}  // namespace detail

inline OrderVerdict st_compare_empirical(std::vector<double> samples_a, std::vector<double> samples_b, double delta) {
  if (samples_a.empty() || samples_b.empty()) throw ParameterError("st_compare_empirical: samples must be nonempty");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("st_compare_empirical: delta must lie in (0, 1)");
  std::sort(samples_a.begin(), samples_a.end());
  std::sort(samples_b.begin(), samples_b.end());
  auto [pos, neg] = detail::ecdf_deviations(samples_a, samples_b);
  OrderVerdict v;
  v.band = dkw_band(samples_a.size(), delta) + dkw_band(samples_b.size(), delta);
  v.max_pos_dev = pos;
  v.max_neg_dev = neg;
  v.relation = classify_deviations(pos, neg, v.band);
  v.meta["n_a"] = static_cast<double>(samples_a.size());
  v.meta["n_b"] = static_cast<double>(samples_b.size());
  v.meta["delta"] = delta;
  return v;
}

// ---------------------------------------------------------------------------
// Convolution oracle

struct ConvolutionGrid {
  std::size_t initial_points = 1u << 12;
  double refine_tol = 1e-7;
  int max_levels = 8;
  double tail = 1e-9;              // truncation mass per component
  std::optional<double> upper;     // common right end; derived from quantiles when absent
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Linear convolution of nonnegative sequences via real FFTs; the result is
// truncated to `out_len` entries and clamped at zero.
inline std::vector<double> convolve_all(const std::vector<std::vector<double>>& parts, std::size_t out_len) {
  if (parts.size() == 1) {
    std::vector<double> r = parts.front();
    r.resize(out_len, 0.0);
    return r;
  }
  std::size_t full = 1;
  for (const auto& p : parts) full += p.size() - 1;
  std::size_t n = 1;
  while (n < full) n <<= 1;
  const std::size_t nc = n / 2 + 1;

  double* real = fftw_alloc_real(n);
  fftw_complex* spec = fftw_alloc_complex(nc);
  fftw_complex* acc = fftw_alloc_complex(nc);
  fftw_plan fwd, bwd;
  {
    std::lock_guard lock(fftw_planner_mutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, spec, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(static_cast<int>(n), acc, real, FFTW_ESTIMATE);
  }
  for (std::size_t k = 0; k < parts.size(); ++k) {
    std::fill(real, real + n, 0.0);
    std::copy(parts[k].begin(), parts[k].end(), real);
    fftw_execute(fwd);
    for (std::size_t i = 0; i < nc; ++i) {
      if (k == 0) {
        acc[i][0] = spec[i][0];
        acc[i][1] = spec[i][1];
      } else {
        const double re = acc[i][0] * spec[i][0] - acc[i][1] * spec[i][1];
        const double im = acc[i][0] * spec[i][1] + acc[i][1] * spec[i][0];
        acc[i][0] = re;
        acc[i][1] = im;
      }
    }
  }
  fftw_execute(bwd);
  std::vector<double> out(out_len, 0.0);
  for (std::size_t i = 0; i < std::min(out_len, n); ++i) out[i] = std::max(0.0, real[i] / static_cast<double>(n));
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  fftw_free(real);
  fftw_free(spec);
  fftw_free(acc);
  return out;
}

// Irwin-Hall CDF at the integers 0..n.
inline std::vector<double> irwin_hall_at_integers(std::size_t n) {
  std::vector<double> out(n + 1, 0.0);
  double fact = 1.0;
  for (std::size_t i = 2; i <= n; ++i) fact *= static_cast<double>(i);
  for (std::size_t k = 0; k <= n; ++k) {
    double s = 0.0, binom = 1.0;
    for (std::size_t i = 0; i <= k; ++i) {
      if (i > 0) binom = binom * static_cast<double>(n - i + 1) / static_cast<double>(i);
      const double term = binom * std::pow(static_cast<double>(k - i), static_cast<double>(n));
      s += (i % 2 == 0) ? term : -term;
    }
    out[k] = s / fact;
  }
  out[0] = 0.0;
  out[n] = 1.0;
  return out;
}

struct ScaledComponent {
  const DensitySpec* dist;
  double weight;
  double upper;  // truncation point on the scaled axis
};

// CDF of the histogram approximation of sum_i w_i X_i at nodes j*h, j = 0..cells.
// Each component is replaced by the piecewise-uniform variable with the same
// cell masses, so the sum is (lattice sum + Irwin-Hall) * h.
inline std::vector<double> convolve_level(const std::vector<ScaledComponent>& comps, double h, std::size_t cells) {
  std::vector<std::vector<double>> masses;
  masses.reserve(comps.size());
  for (const auto& c : comps) {
    const std::size_t m = std::min(cells, static_cast<std::size_t>(std::ceil(c.upper / h)) + 1);
    std::vector<double> mass(m);
    double prev = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double f = c.dist->cdf(static_cast<double>(k + 1) * h / c.weight);
      mass[k] = std::max(0.0, f - prev);
      prev = std::max(prev, f);
    }
    masses.push_back(std::move(mass));
  }
  const std::size_t n = comps.size();
  const std::vector<double> lattice = convolve_all(masses, cells + 1);
  const std::vector<double> ih = irwin_hall_at_integers(n);

  std::vector<double> cum(cells + 1, 0.0);
  double run = 0.0;
  for (std::size_t j = 0; j <= cells; ++j) {
    run += lattice[j];
    cum[j] = run;
  }
  std::vector<double> F(cells + 1, 0.0);
  for (std::size_t j = 0; j <= cells; ++j) {
    double v = j >= n ? cum[j - n] : 0.0;
    for (std::size_t k = 1; k < n && k <= j; ++k) v += ih[k] * lattice[j - k];
    F[j] = std::min(1.0, v);
  }
  for (std::size_t j = 1; j <= cells; ++j) F[j] = std::max(F[j], F[j - 1]);
  return F;
}

}  // namespace detail

// Right end of the truncated support of sum_i w_i X_i: the sum of each scaled
// component's (1 - tail) quantile.
inline double convolution_upper(const std::vector<DensitySpec>& dists, const WeightVector& weights, double tail) {
  double u = 0.0;
  for (std::size_t i = 0; i < dists.size(); ++i)
    if (weights[i] > 0.0) u += weights[i] * dists[i].quantile(1.0 - tail);
  return u;
}

// CDF of sum_i w_i X_i for independent nonnegative X_i on a uniform grid over
// [0, upper]; the step halves until successive levels agree to refine_tol.
inline NumericCDF convolve_weighted(const std::vector<DensitySpec>& dists, const WeightVector& weights,
                                   const ConvolutionGrid& spec = {}) {
  if (dists.size() != weights.size()) throw DimensionError("convolve_weighted: dists and weights differ in length");
  if (!weights.all_nonnegative()) throw ParameterError("convolve_weighted: weights must be nonnegative");
  std::vector<detail::ScaledComponent> comps;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    if (dists[i].support().lo < 0.0) throw ParameterError("convolve_weighted: components must be nonnegative");
    if (weights[i] > 0.0) comps.push_back({&dists[i], weights[i], weights[i] * dists[i].quantile(1.0 - spec.tail)});
  }
  if (comps.empty()) throw ParameterError("convolve_weighted: at least one weight must be positive");
  if (spec.initial_points < 2) throw ParameterError("convolve_weighted: initial_points must be at least 2");

  double upper = spec.upper.value_or(0.0);
  if (!spec.upper) for (const auto& c : comps) upper += c.upper;
  if (!(upper > 0.0) || !std::isfinite(upper)) throw NumericError("convolve_weighted: invalid grid upper end");
  const double tail_tol = spec.tail * static_cast<double>(comps.size());

  std::size_t cells = spec.initial_points;
  std::vector<double> prev = detail::convolve_level(comps, upper / static_cast<double>(cells), cells);
  // Stops when the estimated error of the finer level drops below refine_tol.
  // With gaps contracting geometrically by r, the remaining error of the finer
  // level is about gap * r / (1 - r); without a clear contraction the raw gap
  // is used.
  double gap = kInf, error = kInf;
  for (int level = 1; level <= spec.max_levels; ++level) {
    const std::size_t fine_cells = cells * 2;
    std::vector<double> cur = detail::convolve_level(comps, upper / static_cast<double>(fine_cells), fine_cells);
    const double last_gap = gap;
    gap = 0.0;
    for (std::size_t j = 0; j <= cells; ++j) gap = std::max(gap, std::abs(cur[2 * j] - prev[j]));
    const double r = std::isfinite(last_gap) && last_gap > 0.0 ? gap / last_gap : 1.0;
    error = r < 0.5 ? gap * r / (1.0 - r) : gap;
    cells = fine_cells;
    prev = std::move(cur);
    if (error < spec.refine_tol) {
      const double h = upper / static_cast<double>(cells);
      std::vector<double> grid(cells + 1);
      for (std::size_t j = 0; j <= cells; ++j) grid[j] = static_cast<double>(j) * h;
      grid.back() = upper;
      return NumericCDF(std::move(grid), std::move(prev), NumericCDF::Interpolation::kLinear, tail_tol, h);
    }
  }
  std::ostringstream os;
  os << "convolve_weighted: refinement did not converge in " << spec.max_levels << " levels (last gap " << gap
     << ", error estimate " << error << ")";
  throw NumericError(os.str());
}

// Both sums on one grid so their CDFs compare node by node.
inline std::pair<NumericCDF, NumericCDF> convolve_pair(const std::vector<DensitySpec>& dists_a,
                                                       const WeightVector& wa,
                                                       const std::vector<DensitySpec>& dists_b,
                                                       const WeightVector& wb, ConvolutionGrid spec = {}) {
  if (!spec.upper)
    spec.upper = std::max(convolution_upper(dists_a, wa, spec.tail), convolution_upper(dists_b, wb, spec.tail));
  return {convolve_weighted(dists_a, wa, spec), convolve_weighted(dists_b, wb, spec)};
}

namespace detail {

// Differences F_A - F_B on a shared grid (union of both when they differ).
inline std::pair<std::vector<double>, std::vector<double>> aligned_difference(const NumericCDF& a, const NumericCDF& b) {
  if (a.grid() == b.grid()) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a.values()[i] - b.values()[i];
    return {a.grid(), std::move(d)};
  }
  std::vector<double> grid;
  grid.reserve(a.size() + b.size());
  std::merge(a.grid().begin(), a.grid().end(), b.grid().begin(), b.grid().end(), std::back_inserter(grid));
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<double> d(grid.size());
  double prev_a = 0.0, prev_b = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double fa = std::max(prev_a, a.at(grid[i]));
    const double fb = std::max(prev_b, b.at(grid[i]));
    prev_a = fa;
    prev_b = fb;
    d[i] = fa - fb;
  }
  return {std::move(grid), std::move(d)};
}

inline int count_sign_changes(const std::vector<double>& d, double tol) {
  int changes = 0, last = 0;
  for (double v : d) {
    const int s = v > tol ? 1 : (v < -tol ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace detail

// Number of sign changes of F_A - F_B, ignoring excursions within tol.
inline int crossing_count(const NumericCDF& a, const NumericCDF& b, double tol) {
  return detail::count_sign_changes(detail::aligned_difference(a, b).second, tol);
}

inline OrderVerdict st_compare_exact(const NumericCDF& a, const NumericCDF& b, double tol) {
  if (!(tol >= 0.0)) throw ParameterError("st_compare_exact: tol must be >= 0");
  const auto [grid, d] = detail::aligned_difference(a, b);
  OrderVerdict v;
  for (double x : d) {
    v.max_pos_dev = std::max(v.max_pos_dev, x);
    v.max_neg_dev = std::max(v.max_neg_dev, -x);
  }
  v.band = tol;
  v.relation = classify_deviations(v.max_pos_dev, v.max_neg_dev, tol);
  v.crossing_count = detail::count_sign_changes(d, tol);
  v.meta["grid_points"] = static_cast<double>(grid.size());
  v.meta["tol"] = tol;
  v.meta["tail_tol"] = std::max(a.tail_tol(), b.tail_tol());
  return v;
}

}  // namespace stord
