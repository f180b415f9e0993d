#pragma once

// Generalized gamma family F_{p,alpha,lambda} with density
//   p lambda^alpha / Gamma(alpha) * x^(alpha p - 1) * exp(-lambda x^p),  x > 0,
// plus generic densities given pointwise, change of variables through a
// Transform, log-concavity classification and likelihood-ratio comparison.

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "stord/error.hpp"
#include "stord/numeric.hpp"
#include "stord/transforms.hpp"

namespace stord {

// Density given pointwise on an interval. Normalization is checked by
// quadrature when the object is built.
class DensitySpec {
 public:
  using Fn = std::function<double(double)>;

  struct Support {
    double lo = 0.0;
    double hi = kInf;
  };

  // `cdf` is optional; without it the CDF is obtained by quadrature.
  // `center` should sit in the bulk of the mass (it splits the quadrature).
  DensitySpec(Fn pdf, Support support, std::string label, Fn cdf = {}, std::optional<double> center = {})
      : pdf_(std::move(pdf)), cdf_(std::move(cdf)), support_(support), label_(std::move(label)) {
    if (!pdf_) throw ParameterError("DensitySpec: pdf is required");
    if (!(support_.hi > support_.lo)) throw ParameterError("DensitySpec: empty support");
    center_ = center.value_or(default_center());
    const double mass = integrate(pdf_, support_.lo, support_.hi, center_);
    if (!(std::abs(mass - 1.0) <= 1e-6)) {
      std::ostringstream os;
      os << "DensitySpec " << label_ << ": integrates to " << mass << ", not 1";
      throw NumericError(os.str());
    }
  }

  [[nodiscard]] double pdf(double x) const {
    if (x <= support_.lo || x >= support_.hi) return 0.0;
    return pdf_(x);
  }
  [[nodiscard]] double log_pdf(double x) const { return std::log(pdf(x)); }

  [[nodiscard]] double cdf(double x) const {
    if (x <= support_.lo) return 0.0;
    if (x >= support_.hi) return 1.0;
    if (cdf_) return std::clamp(cdf_(x), 0.0, 1.0);
    return std::clamp(integrate(pdf_, support_.lo, x, std::min(center_, x - 1.0)), 0.0, 1.0);
  }

  [[nodiscard]] double quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw ParameterError("DensitySpec::quantile: u must lie in (0, 1)");
    double lo = std::isinf(support_.lo) ? center_ - 1.0 : support_.lo;
    double hi = std::isinf(support_.hi) ? center_ + 1.0 : support_.hi;
    for (int i = 0; i < 200 && std::isinf(support_.lo) && cdf(lo) > u; ++i) lo = center_ - 2.0 * (center_ - lo);
    for (int i = 0; i < 200 && std::isinf(support_.hi) && cdf(hi) < u; ++i) hi = center_ + 2.0 * (hi - center_);
    return solve_bracketed([&](double x) { return cdf(x) - u; }, lo, hi);
  }

  [[nodiscard]] const Support& support() const noexcept { return support_; }
  [[nodiscard]] const std::string& label() const noexcept { return label_; }
  [[nodiscard]] double center() const noexcept { return center_; }

 private:
  [[nodiscard]] double default_center() const {
    const bool lo_inf = std::isinf(support_.lo), hi_inf = std::isinf(support_.hi);
    if (!lo_inf && !hi_inf) return 0.5 * (support_.lo + support_.hi);
    if (!lo_inf) return support_.lo + 1.0;
    if (!hi_inf) return support_.hi - 1.0;
    return 0.0;
  }

  Fn pdf_;
  Fn cdf_;
  Support support_;
  std::string label_;
  double center_ = 0.0;
};

class GeneralizedGamma {
 public:
  GeneralizedGamma(double p, double alpha, double lambda) : p_(p), alpha_(alpha), lambda_(lambda) {
    if (!(p > 0.0 && alpha > 0.0 && lambda > 0.0) || !std::isfinite(p) || !std::isfinite(alpha) ||
        !std::isfinite(lambda)) {
      throw ParameterError("GeneralizedGamma: p, alpha and lambda must be positive and finite");
    }
    log_norm_ = std::log(p_) + alpha_ * std::log(lambda_) - std::lgamma(alpha_);
  }

  [[nodiscard]] double p() const noexcept { return p_; }
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] double lambda() const noexcept { return lambda_; }

  [[nodiscard]] double log_density(double x) const {
    if (!(x > 0.0)) throw DomainError("GeneralizedGamma::density: x must be positive");
    return log_norm_ + (alpha_ * p_ - 1.0) * std::log(x) - lambda_ * std::pow(x, p_);
  }

  [[nodiscard]] double cdf(double x) const {
    if (!(x > 0.0)) return 0.0;
    const double t = lambda_ * std::pow(x, p_);
    if (std::isinf(t)) return 1.0;
    return boost::math::gamma_p(alpha_, t);
  }

  [[nodiscard]] double survival(double x) const {
    if (!(x > 0.0)) return 1.0;
    const double t = lambda_ * std::pow(x, p_);
    if (std::isinf(t)) return 0.0;
    return boost::math::gamma_q(alpha_, t);
  }

  [[nodiscard]] double quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw ParameterError("GeneralizedGamma::quantile: u must lie in (0, 1)");
    const double t = u > 0.5 ? boost::math::gamma_q_inv(alpha_, 1.0 - u) : boost::math::gamma_p_inv(alpha_, u);
    return std::pow(t / lambda_, 1.0 / p_);
  }

  // Upper quantile for tiny tail mass without cancellation in 1 - u.
  [[nodiscard]] double upper_quantile(double tail) const {
    if (!(tail > 0.0 && tail < 1.0)) throw ParameterError("GeneralizedGamma::upper_quantile: tail must lie in (0, 1)");
    return std::pow(boost::math::gamma_q_inv(alpha_, tail) / lambda_, 1.0 / p_);
  }

  [[nodiscard]] double mean() const {
    return std::exp(std::lgamma(alpha_ + 1.0 / p_) - std::lgamma(alpha_) - std::log(lambda_) / p_);
  }

  [[nodiscard]] std::string label() const {
    std::ostringstream os;
    os << "gengamma(p=" << p_ << ",alpha=" << alpha_ << ",lambda=" << lambda_ << ")";
    return os.str();
  }

  [[nodiscard]] DensitySpec to_density_spec() const {
    GeneralizedGamma self = *this;
    return DensitySpec([self](double x) { return x > 0.0 && std::isfinite(x) ? std::exp(self.log_density(x)) : 0.0; },
                       {0.0, kInf}, label(), [self](double x) { return x > 0.0 ? self.cdf(x) : 0.0; }, quantile(0.5));
  }

  friend bool operator==(const GeneralizedGamma&, const GeneralizedGamma&) = default;

 private:
  double p_, alpha_, lambda_;
  double log_norm_ = 0.0;
};

// Computed in log space, then exponentiated.
inline double density(const GeneralizedGamma& d, double x) { return std::exp(d.log_density(x)); }

// Draws X = G^(1/p) with G ~ Gamma(alpha, rate lambda). Pure given (n, seed).
inline std::vector<double> sample(const GeneralizedGamma& d, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ParameterError("sample: n must be at least 1");
  std::mt19937_64 gen(seed);
  std::gamma_distribution<double> gamma(d.alpha(), 1.0 / d.lambda());
  const double inv_p = 1.0 / d.p();
  std::vector<double> out(n);
  for (auto& x : out) x = inv_p == 1.0 ? gamma(gen) : std::pow(gamma(gen), inv_p);
  return out;
}

// ---------------------------------------------------------------------------
// Log-concavity

enum class LogConcavity { kLogConcave, kNotLogConcave, kUnknown };

inline const char* to_string(LogConcavity v) {
  switch (v) {
    case LogConcavity::kLogConcave: return "LOG_CONCAVE";
    case LogConcavity::kNotLogConcave: return "NOT_LOG_CONCAVE";
    case LogConcavity::kUnknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

// Which transformed variable is examined: X itself, X^r, or log X.
struct VariableTransform {
  enum class Kind { kIdentity, kPower, kLog };
  Kind kind = Kind::kIdentity;
  double r = 1.0;

  static VariableTransform identity() { return {}; }
  static VariableTransform power(double r) {
    if (r == 0.0 || !std::isfinite(r)) throw ParameterError("VariableTransform::power: r must be finite and nonzero");
    return {Kind::kPower, r};
  }
  static VariableTransform log() { return {Kind::kLog, 0.0}; }

  [[nodiscard]] std::string describe() const {
    std::ostringstream os;
    switch (kind) {
      case Kind::kIdentity: os << "X"; break;
      case Kind::kPower: os << "X^" << r; break;
      case Kind::kLog: os << "log X"; break;
    }
    return os.str();
  }
};

struct LogConcavityResult {
  LogConcavity verdict = LogConcavity::kUnknown;
  std::optional<double> witness;  // abscissa of the transformed variable
  std::string basis;              // "analytic: ..." or "numeric: ..."
};

inline constexpr std::size_t kLogConcavityGridPoints = 512;
inline constexpr double kLogConcavityTol = 1e-7;

namespace detail {

// Largest positive scaled second difference of a sampled log-density; the
// scaling makes it comparable to a plain second difference on uniform grids.
// Near-ties (relative 1e-9) resolve to the leftmost abscissa.
inline std::pair<double, double> worst_convexity(const std::vector<double>& ys, const std::vector<double>& ls) {
  double worst = -kInf, at = ys.empty() ? 0.0 : ys.front();
  for (std::size_t k = 1; k + 1 < ys.size(); ++k) {
    if (!std::isfinite(ls[k - 1]) || !std::isfinite(ls[k]) || !std::isfinite(ls[k + 1])) continue;
    const double s0 = (ls[k] - ls[k - 1]) / (ys[k] - ys[k - 1]);
    const double s1 = (ls[k + 1] - ls[k]) / (ys[k + 1] - ys[k]);
    const double v = (s1 - s0) * 0.5 * (ys[k + 1] - ys[k - 1]);
    if (std::isinf(worst) ? v > worst : v > worst + 1e-9 * std::abs(worst)) {
      worst = v;
      at = ys[k];
    }
  }
  return {worst, at};
}

inline LogConcavityResult numeric_log_concavity(const std::vector<double>& ys, const std::vector<double>& ls,
                                                const std::string& what) {
  auto [worst, at] = worst_convexity(ys, ls);
  LogConcavityResult res;
  if (worst > kLogConcavityTol) {
    res.verdict = LogConcavity::kNotLogConcave;
    res.witness = at;
    std::ostringstream os;
    os << "numeric: positive second difference " << worst << " of log-density of " << what;
    res.basis = os.str();
  } else {
    res.verdict = LogConcavity::kUnknown;
    res.basis = "numeric: no violation found for " + what + " on the grid";
  }
  return res;
}

inline bool same_exponent(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

}  // namespace detail

// Analytic rules for the generalized gamma family: X^p is log-concave for
// alpha >= 1, X^(alpha p) for 0 < alpha < 1, and log X always. Anything else
// is probed numerically, which can refute but never certify.
inline LogConcavityResult log_concavity_classify(const GeneralizedGamma& d, VariableTransform variant) {
  using Kind = VariableTransform::Kind;
  if (variant.kind == Kind::kPower && variant.r == 0.0) throw ParameterError("log_concavity_classify: r must be nonzero");
  if (variant.kind == Kind::kIdentity) variant = {Kind::kPower, 1.0};

  if (variant.kind == Kind::kLog) return {LogConcavity::kLogConcave, std::nullopt, "analytic: log X"};
  if (d.alpha() >= 1.0 && detail::same_exponent(variant.r, d.p()))
    return {LogConcavity::kLogConcave, std::nullopt, "analytic: X^p with alpha >= 1"};
  if (d.alpha() < 1.0 && detail::same_exponent(variant.r, d.alpha() * d.p()))
    return {LogConcavity::kLogConcave, std::nullopt, "analytic: X^(alpha p) with alpha < 1"};

  // Y = X^r: log f_Y(y) = log f_X(y^(1/r)) - log|r| + (1/r - 1) log y.
  const double r = variant.r;
  double x_lo = d.quantile(0.0005), x_hi = d.quantile(0.9995);
  double y_lo = std::pow(x_lo, r), y_hi = std::pow(x_hi, r);
  if (y_lo > y_hi) std::swap(y_lo, y_hi);
  const auto ys = logspace(y_lo, y_hi, kLogConcavityGridPoints);
  std::vector<double> ls(ys.size());
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const double x = std::pow(ys[k], 1.0 / r);
    ls[k] = d.log_density(x) - std::log(std::abs(r)) + (1.0 / r - 1.0) * std::log(ys[k]);
  }
  return detail::numeric_log_concavity(ys, ls, variant.describe());
}

// Numeric probe on an arbitrary density over its central 0.999 mass.
inline LogConcavityResult log_concavity_numeric(const DensitySpec& d) {
  const double lo = d.quantile(0.0005), hi = d.quantile(0.9995);
  const bool positive = lo > 0.0;
  const auto ys = positive ? logspace(lo, hi, kLogConcavityGridPoints) : linspace(lo, hi, kLogConcavityGridPoints);
  std::vector<double> ls(ys.size());
  for (std::size_t k = 0; k < ys.size(); ++k) ls[k] = d.log_pdf(ys[k]);
  return detail::numeric_log_concavity(ys, ls, d.label());
}

// ---------------------------------------------------------------------------
// Change of variables

// Density of Y = psi^-1(X): f_Y(y) = f_X(psi(y)) |psi'(y)|.
inline DensitySpec transformed_density(const GeneralizedGamma& d, const Transform& psi) {
  const double a = psi.inverse(0.0), b = psi.inverse(kInf);
  double lo = std::max(std::min(a, b), psi.domain().lo);
  double hi = std::min(std::max(a, b), psi.domain().hi);
  if (!(hi > lo)) throw NumericError("transformed_density: empty support for " + psi.label());

  const double median = psi.inverse(d.quantile(0.5));
  for (double y : linspace(0.0, 1.0, 65)) {
    const double probe = std::isinf(lo) || std::isinf(hi) ? median + 10.0 * (y - 0.5) * (1.0 + std::abs(median))
                                                          : lo + (hi - lo) * (0.001 + 0.998 * y);
    if (probe <= lo || probe >= hi) continue;
    if (psi.d1(probe) == 0.0) {
      std::ostringstream os;
      os << "transformed_density: derivative of " << psi.label() << " vanishes at " << probe;
      throw NumericError(os.str());
    }
  }

  GeneralizedGamma dist = d;
  auto pdf = [dist, psi](double y) {
    const double x = psi(y);
    if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
    const double fx = std::exp(dist.log_density(x));
    if (fx == 0.0) return 0.0;
    const double v = fx * std::abs(psi.d1(y));
    return std::isfinite(v) ? v : 0.0;
  };
  const bool up = psi.increasing();
  auto cdf = [dist, psi, up](double y) {
    const double x = psi(y);
    return up ? dist.cdf(x) : dist.survival(x);
  };
  return DensitySpec(pdf, {lo, hi}, psi.label() + "^-1(" + d.label() + ")", cdf, median);
}

// ---------------------------------------------------------------------------
// Likelihood ratio order

enum class LrVerdict { kD1Greater, kD2Greater, kNotOrdered, kUnknown };

inline const char* to_string(LrVerdict v) {
  switch (v) {
    case LrVerdict::kD1Greater: return "D1_LR_GREATER";
    case LrVerdict::kD2Greater: return "D2_LR_GREATER";
    case LrVerdict::kNotOrdered: return "NOT_ORDERED";
    case LrVerdict::kUnknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

struct LrResult {
  LrVerdict verdict = LrVerdict::kUnknown;
  std::optional<std::pair<double, double>> witness;  // x1 < x2 with the ratio f1/f2 larger at x1
  std::string basis;
};

namespace detail {

// Scans log f1 - log f2 for a significant rise and a significant fall.
inline LrResult lr_scan(const std::vector<double>& xs, const std::function<double(double)>& log_f1,
                        const std::function<double(double)>& log_f2) {
  constexpr double tol = 1e-7;
  double run_max = -kInf, run_min = kInf;
  std::size_t at_max = 0;
  double best_fall = 0.0, best_rise = 0.0;
  std::pair<double, double> fall_pair{0.0, 0.0};
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double l1 = log_f1(xs[k]), l2 = log_f2(xs[k]);
    if (!std::isfinite(l1) || !std::isfinite(l2)) continue;
    const double r = l1 - l2;
    if (run_max - r > best_fall) {
      best_fall = run_max - r;
      fall_pair = {xs[at_max], xs[k]};
    }
    best_rise = std::max(best_rise, r - run_min);
    if (r > run_max) {
      run_max = r;
      at_max = k;
    }
    run_min = std::min(run_min, r);
  }
  LrResult res;
  if (best_fall > tol && best_rise > tol) {
    res.verdict = LrVerdict::kNotOrdered;
    res.witness = fall_pair;
    res.basis = "numeric: density ratio rises and falls on the grid";
  } else {
    res.verdict = LrVerdict::kUnknown;
    res.basis = best_fall > tol ? "numeric: ratio nonincreasing on grid, not certified"
                                : "numeric: ratio nondecreasing on grid, not certified";
  }
  return res;
}

inline std::vector<double> lr_grid(double lo, double hi) {
  return lo > 0.0 ? logspace(lo, hi, kLogConcavityGridPoints) : linspace(lo, hi, kLogConcavityGridPoints);
}

}  // namespace detail

// Analytic for equal p with a shared alpha (smaller lambda is lr-larger) or a
// shared lambda (larger alpha is lr-larger). Identical parameters resolve to
// D1_LR_GREATER. Other pairs fall back to a grid scan.
inline LrResult lr_compare(const GeneralizedGamma& d1, const GeneralizedGamma& d2) {
  if (d1 == d2) return {LrVerdict::kD1Greater, std::nullopt, "analytic: identical distributions (tie-break)"};
  if (d1.p() == d2.p() && d1.alpha() == d2.alpha()) {
    return {d1.lambda() <= d2.lambda() ? LrVerdict::kD1Greater : LrVerdict::kD2Greater, std::nullopt,
            "analytic: common p and alpha, ordered by lambda"};
  }
  if (d1.p() == d2.p() && d1.lambda() == d2.lambda()) {
    return {d1.alpha() >= d2.alpha() ? LrVerdict::kD1Greater : LrVerdict::kD2Greater, std::nullopt,
            "analytic: common p and lambda, ordered by alpha"};
  }
  const double lo = std::min(d1.quantile(0.0005), d2.quantile(0.0005));
  const double hi = std::max(d1.quantile(0.9995), d2.quantile(0.9995));
  return detail::lr_scan(
      detail::lr_grid(lo, hi), [&](double x) { return d1.log_density(x); },
      [&](double x) { return d2.log_density(x); });
}

inline LrResult lr_compare(const DensitySpec& d1, const DensitySpec& d2) {
  const double lo = std::max(d1.support().lo, d2.support().lo);
  const double hi = std::min(d1.support().hi, d2.support().hi);
  if (!(hi > lo)) throw ParameterError("lr_compare: supports do not overlap");
  double glo = std::min(d1.quantile(0.0005), d2.quantile(0.0005));
  double ghi = std::max(d1.quantile(0.9995), d2.quantile(0.9995));
  glo = std::max(glo, lo);
  ghi = std::min(ghi, hi);
  if (!(ghi > glo)) throw ParameterError("lr_compare: central masses do not overlap");
  return detail::lr_scan(
      detail::lr_grid(glo, ghi), [&](double x) { return d1.log_pdf(x); }, [&](double x) { return d2.log_pdf(x); });
}

}  // namespace stord
