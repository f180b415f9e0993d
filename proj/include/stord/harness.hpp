#pragma once

// Executable theorem instances: a Scenario bundles distributions, the (phi,
// psi) pair, the coefficient vectors and a sampling budget. Hypotheses are
// checked first; a conclusion is only tested when none of them failed, and
// scenarios with unverified hypotheses are skipped rather than asserted.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "stord/distributions.hpp"
#include "stord/error.hpp"
#include "stord/majorization.hpp"
#include "stord/orders.hpp"
#include "stord/transforms.hpp"

namespace stord {

// Seed derivation (SplitMix64 finalizer); keeps per-job streams disjoint.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// A component distribution: a generalized gamma variable X, or its reciprocal
// 1/X (which lets X^p be log-concave for negative p).
class ComponentDist {
 public:
  enum class Kind { kGenGamma, kInvGenGamma };

  static ComponentDist gengamma(double p, double alpha, double lambda) {
    return ComponentDist(Kind::kGenGamma, GeneralizedGamma(p, alpha, lambda));
  }
  static ComponentDist inv_gengamma(double p, double alpha, double lambda) {
    return ComponentDist(Kind::kInvGenGamma, GeneralizedGamma(p, alpha, lambda));
  }

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] const GeneralizedGamma& base() const noexcept { return base_; }

  [[nodiscard]] std::string label() const {
    return kind_ == Kind::kGenGamma ? base_.label() : "inv_" + base_.label();
  }

  [[nodiscard]] std::vector<double> sample(std::size_t n, std::uint64_t seed) const {
    auto xs = stord::sample(base_, n, seed);
    if (kind_ == Kind::kInvGenGamma)
      for (auto& x : xs) x = 1.0 / x;
    return xs;
  }

  [[nodiscard]] DensitySpec density_spec() const {
    if (kind_ == Kind::kGenGamma) return base_.to_density_spec();
    GeneralizedGamma z = base_;
    auto pdf = [z](double x) {
      if (!(x > 0.0) || std::isinf(x)) return 0.0;
      return std::exp(z.log_density(1.0 / x) - 2.0 * std::log(x));
    };
    auto cdf = [z](double x) { return x > 0.0 ? z.survival(1.0 / x) : 0.0; };
    return DensitySpec(pdf, {0.0, kInf}, label(), cdf, 1.0 / z.quantile(0.5));
  }

  // Log-concavity of psi^-1(X).
  [[nodiscard]] LogConcavityResult psi_inverse_log_concavity(const Transform& psi) const {
    const double flip = kind_ == Kind::kGenGamma ? 1.0 : -1.0;
    if (psi.kind() == TransformKind::kPower) {
      // psi(x) = x^s, so psi^-1(X) = X^(1/s) = Z^(flip / s).
      return log_concavity_classify(base_, VariableTransform::power(flip / psi.parameter()));
    }
    if (psi.kind() == TransformKind::kExp) {
      // log X, or -log Z for the reciprocal; negation keeps log-concavity.
      return log_concavity_classify(base_, VariableTransform::log());
    }
    return log_concavity_numeric(transformed(psi));
  }

  friend bool operator==(const ComponentDist&, const ComponentDist&) = default;

 private:
  ComponentDist(Kind kind, GeneralizedGamma base) : kind_(kind), base_(base) {}

  [[nodiscard]] DensitySpec transformed(const Transform& psi) const {
    if (kind_ == Kind::kGenGamma) return transformed_density(base_, psi);
    const DensitySpec x = density_spec();
    const double a = psi.inverse(0.0), b = psi.inverse(kInf);
    const double lo = std::max(std::min(a, b), psi.domain().lo);
    const double hi = std::min(std::max(a, b), psi.domain().hi);
    const bool up = psi.increasing();
    auto pdf = [x, psi](double y) {
      const double fx = x.pdf(psi(y));
      if (fx == 0.0) return 0.0;
      const double v = fx * std::abs(psi.d1(y));
      return std::isfinite(v) ? v : 0.0;
    };
    return DensitySpec(pdf, {lo, hi},
                       psi.label() + "^-1(" + label() + ")",
                       [x, psi, up](double y) { return up ? x.cdf(psi(y)) : 1.0 - x.cdf(psi(y)); },
                       psi.inverse(x.quantile(0.5)));
  }

  Kind kind_;
  GeneralizedGamma base_;
};

// Likelihood ratio comparison between components: analytic within one kind
// (the reciprocal reverses the order), numeric otherwise.
inline LrResult lr_compare(const ComponentDist& d1, const ComponentDist& d2) {
  if (d1.kind() == d2.kind()) {
    LrResult r = lr_compare(d1.base(), d2.base());
    if (d1.kind() == ComponentDist::Kind::kInvGenGamma && !(d1 == d2)) {
      if (r.verdict == LrVerdict::kD1Greater) r.verdict = LrVerdict::kD2Greater;
      else if (r.verdict == LrVerdict::kD2Greater) r.verdict = LrVerdict::kD1Greater;
      r.basis += " (reversed by reciprocal)";
    }
    return r;
  }
  return lr_compare(d1.density_spec(), d2.density_spec());
}

struct Scenario {
  std::string name;
  std::vector<ComponentDist> dists;
  Transform phi;
  Transform psi;
  ConditionVariant variant = ConditionVariant::kConvexCase;
  WeightVector a;
  WeightVector b;
  MajorizationMode premise_mode = MajorizationMode::kFull;
  std::size_t n_samples = 100000;
  std::uint64_t seed = 42;
  double delta = 0.01;

  void validate() const {
    if (dists.empty()) throw ParameterError("Scenario: at least one distribution is required");
    if (a.size() != dists.size() || b.size() != dists.size())
      throw DimensionError("Scenario: a, b and dists must have equal lengths");
    if (n_samples < 1000) throw ParameterError("Scenario: n_samples must be at least 1000");
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("Scenario: delta must lie in (0, 1)");
  }

  [[nodiscard]] bool iid() const {
    return std::all_of(dists.begin(), dists.end(), [&](const ComponentDist& d) { return d == dists.front(); });
  }
};

enum class CheckStatus { kPass, kFail, kUnknown };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::kPass: return "PASS";
    case CheckStatus::kFail: return "FAIL";
    case CheckStatus::kUnknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

struct Check {
  CheckStatus status = CheckStatus::kUnknown;
  std::string witness;
};

struct HypothesisReport {
  Check majorization_ok;
  Check conditions_ok;
  Check logconcavity_ok;
  Check lr_chain_ok;

  [[nodiscard]] bool any(CheckStatus s) const {
    return majorization_ok.status == s || conditions_ok.status == s || logconcavity_ok.status == s ||
           lr_chain_ok.status == s;
  }
  [[nodiscard]] std::optional<std::string> first_failure() const {
    if (majorization_ok.status == CheckStatus::kFail) return "majorization_ok";
    if (conditions_ok.status == CheckStatus::kFail) return "conditions_ok";
    if (logconcavity_ok.status == CheckStatus::kFail) return "logconcavity_ok";
    if (lr_chain_ok.status == CheckStatus::kFail) return "lr_chain_ok";
    return std::nullopt;
  }
};

enum class TheoremStatus { kEvaluated, kSkipped };

struct TheoremReport {
  std::string scenario;
  std::string theorem;  // "iid", "noniid" or "counterexample"
  HypothesisReport hypothesis;
  TheoremStatus status = TheoremStatus::kEvaluated;
  StRelation predicted = StRelation::kADominates;
  std::optional<WeightVector> coeff_a;  // coefficients actually paired with X_1..X_n
  std::optional<WeightVector> coeff_b;
  std::optional<OrderVerdict> verdict;
  std::optional<OrderVerdict> oracle_verdict;
  std::string oracle_note;
  bool consistent = true;
  std::map<std::string, double> extras;
};

inline constexpr double kPremiseTol = 1e-9;
inline constexpr double kOracleTol = 1e-6;
inline constexpr std::size_t kOracleMaxTerms = 4;

// Oracle grid for theorem scenarios: one refinement level beyond the library
// default, for heavy-tailed components whose grids are wide.
inline ConvolutionGrid harness_oracle_grid() {
  ConvolutionGrid g;
  g.max_levels = 9;
  return g;
}

// Weak mode allowed by the direction rule: increasing phi pairs with
// submajorization in the convex case and supmajorization in the concave
// case; decreasing phi swaps them.
inline MajorizationMode admissible_weak_mode(const Transform& phi, ConditionVariant variant) {
  const bool convex = variant == ConditionVariant::kConvexCase;
  return (phi.increasing() == convex) ? MajorizationMode::kWeakSub : MajorizationMode::kWeakSup;
}

inline const char* to_string(MajorizationMode m) {
  switch (m) {
    case MajorizationMode::kFull: return "m";
    case MajorizationMode::kWeakSub: return "sub";
    case MajorizationMode::kWeakSup: return "sup";
  }
  return "m";
}

inline HypothesisReport check_hypotheses(const Scenario& s) {
  s.validate();
  HypothesisReport rep;

  // (i) premise order in transformed coordinates: phi^-1(b) below phi^-1(a).
  const WeightVector ta = s.a.map([&](double x) { return s.phi.inverse_checked(x); });
  const WeightVector tb = s.b.map([&](double x) { return s.phi.inverse_checked(x); });
  if (s.premise_mode != MajorizationMode::kFull && s.premise_mode != admissible_weak_mode(s.phi, s.variant)) {
    rep.majorization_ok = {CheckStatus::kFail, std::string("mode ") + to_string(s.premise_mode) +
                                                   " is not admissible for " + s.phi.label() + " in this case"};
  } else if (check_majorize(tb, ta, s.premise_mode, kPremiseTol)) {
    rep.majorization_ok = {CheckStatus::kPass, ""};
  } else {
    rep.majorization_ok = {CheckStatus::kFail, "phi^-1(b)=" + to_string(tb) + " not " + to_string(s.premise_mode) +
                                                   "-below phi^-1(a)=" + to_string(ta)};
  }

  // (ii) Hessian conditions on the default grid.
  const ConditionReport cond = check_convexity_conditions(s.phi, s.psi, s.variant);
  if (cond.holds()) {
    rep.conditions_ok = {CheckStatus::kPass, "no violation on " + cond.grid_spec};
  } else {
    std::ostringstream os;
    os << "violation " << cond.worst_violation << " at (" << cond.worst_point.first << ", " << cond.worst_point.second
       << ")";
    rep.conditions_ok = {CheckStatus::kFail, os.str()};
  }

  // (iii) psi^-1(X_i) log-concave for every i.
  rep.logconcavity_ok = {CheckStatus::kPass, ""};
  for (std::size_t i = 0; i < s.dists.size(); ++i) {
    const auto lc = s.dists[i].psi_inverse_log_concavity(s.psi);
    if (lc.verdict == LogConcavity::kNotLogConcave) {
      std::ostringstream os;
      os << "component " << i << ": " << lc.basis;
      if (lc.witness) os << " near " << *lc.witness;
      rep.logconcavity_ok = {CheckStatus::kFail, os.str()};
      break;
    }
    if (lc.verdict == LogConcavity::kUnknown && rep.logconcavity_ok.status == CheckStatus::kPass)
      rep.logconcavity_ok = {CheckStatus::kUnknown, "component " + std::to_string(i) + ": " + lc.basis};
  }

  // (iv) X_1 >=_lr X_2 >=_lr ... >=_lr X_n.
  if (s.iid()) {
    rep.lr_chain_ok = {CheckStatus::kPass, "identical distributions"};
  } else {
    rep.lr_chain_ok = {CheckStatus::kPass, ""};
    for (std::size_t i = 0; i + 1 < s.dists.size(); ++i) {
      const LrResult r = lr_compare(s.dists[i], s.dists[i + 1]);
      if (r.verdict == LrVerdict::kD1Greater) continue;
      const std::string where = "components " + std::to_string(i) + "," + std::to_string(i + 1) + ": ";
      if (r.verdict == LrVerdict::kUnknown) {
        if (rep.lr_chain_ok.status == CheckStatus::kPass)
          rep.lr_chain_ok = {CheckStatus::kUnknown, where + r.basis};
        continue;
      }
      rep.lr_chain_ok = {CheckStatus::kFail, where + to_string(r.verdict)};
      break;
    }
  }
  return rep;
}

namespace detail {

inline std::vector<double> sample_weighted_sum(const std::vector<ComponentDist>& dists, const WeightVector& w,
                                               std::size_t n, std::uint64_t seed) {
  std::vector<double> sum(n, 0.0);
  for (std::size_t i = 0; i < dists.size(); ++i) {
    if (w[i] == 0.0) continue;
    const auto xs = dists[i].sample(n, derive_seed(seed, i));
    for (std::size_t k = 0; k < n; ++k) sum[k] += w[i] * xs[k];
  }
  return sum;
}

inline bool agrees_with(StRelation predicted, const OrderVerdict& v) {
  if (predicted == StRelation::kADominates) return v.max_pos_dev <= v.band;
  if (predicted == StRelation::kBDominates) return v.max_neg_dev <= v.band;
  return true;
}

// Runs the empirical test (and the oracle for short sums) on the given
// coefficient pairing and fills verdicts and consistency.
inline void evaluate_conclusion(const Scenario& s, const WeightVector& ca, const WeightVector& cb, TheoremReport& rep) {
  const auto xa = sample_weighted_sum(s.dists, ca, s.n_samples, derive_seed(s.seed, 1000));
  const auto xb = sample_weighted_sum(s.dists, cb, s.n_samples, derive_seed(s.seed, 2000));
  rep.verdict = st_compare_empirical(xa, xb, s.delta);
  bool ok = agrees_with(rep.predicted, *rep.verdict);

  if (s.dists.size() <= kOracleMaxTerms) {
    try {
      std::vector<DensitySpec> specs;
      for (const auto& d : s.dists) specs.push_back(d.density_spec());
      const auto [fa, fb] = convolve_pair(specs, ca, specs, cb, harness_oracle_grid());
      rep.oracle_verdict = st_compare_exact(fa, fb, kOracleTol);
      rep.extras["oracle_mean_a"] = fa.mean();
      rep.extras["oracle_mean_b"] = fb.mean();
      ok = ok && agrees_with(rep.predicted, *rep.oracle_verdict);
    } catch (const NumericError& e) {
      rep.oracle_note = std::string("oracle unavailable: ") + e.what();
    }
  } else {
    rep.oracle_note = "oracle not run: more than 4 terms";
  }
  rep.coeff_a = ca;
  rep.coeff_b = cb;
  rep.consistent = ok;
}

inline void require_no_failure(const HypothesisReport& h, const char* who) {
  if (auto f = h.first_failure()) throw PreconditionError(std::string(who) + ": hypothesis " + *f + " failed");
}

}  // namespace detail

// i.i.d. case: the convex variant predicts sum a_i X_i >=_st sum b_i X_i, the
// concave variant the reverse.
inline TheoremReport verify_iid_theorem(const Scenario& s) {
  if (!s.iid()) throw PreconditionError("verify_iid_theorem: distributions are not identical");
  TheoremReport rep;
  rep.scenario = s.name;
  rep.theorem = "iid";
  rep.hypothesis = check_hypotheses(s);
  rep.predicted = s.variant == ConditionVariant::kConvexCase ? StRelation::kADominates : StRelation::kBDominates;
  detail::require_no_failure(rep.hypothesis, "verify_iid_theorem");
  if (rep.hypothesis.any(CheckStatus::kUnknown)) {
    rep.status = TheoremStatus::kSkipped;
    return rep;
  }
  detail::evaluate_conclusion(s, s.a, s.b, rep);
  return rep;
}

// Coefficients paired with X_1 >=_lr ... >=_lr X_n: the convex variant puts
// the i-th largest coefficient on X_i, the concave variant the i-th smallest.
inline WeightVector pair_coefficients(const WeightVector& w, ConditionVariant variant) {
  std::vector<double> v = sort_increasing(w).to_vector();
  if (variant == ConditionVariant::kConvexCase) std::reverse(v.begin(), v.end());
  return WeightVector(std::move(v));
}

inline TheoremReport verify_noniid_theorem(const Scenario& s) {
  TheoremReport rep;
  rep.scenario = s.name;
  rep.theorem = "noniid";
  rep.hypothesis = check_hypotheses(s);
  rep.predicted = s.variant == ConditionVariant::kConvexCase ? StRelation::kADominates : StRelation::kBDominates;
  if (rep.hypothesis.lr_chain_ok.status != CheckStatus::kPass)
    throw PreconditionError("verify_noniid_theorem: lr chain not verified (" + rep.hypothesis.lr_chain_ok.witness + ")");
  detail::require_no_failure(rep.hypothesis, "verify_noniid_theorem");
  if (rep.hypothesis.any(CheckStatus::kUnknown)) {
    rep.status = TheoremStatus::kSkipped;
    return rep;
  }
  detail::evaluate_conclusion(s, pair_coefficients(s.a, s.variant), pair_coefficients(s.b, s.variant), rep);
  return rep;
}

// Exchange inequality for X_1 >=_lr X_2: with the two coefficients phi(c_1),
// phi(c_2), putting the larger one on X_1 gives the stochastically larger sum.
// Checked through the oracle at the points of t_grid (all grid nodes if empty).
inline bool pairwise_exchange_check(const ComponentDist& d1, const ComponentDist& d2, const WeightVector& c,
                                    const Transform& phi, const std::vector<double>& t_grid = {}) {
  if (c.size() != 2) throw DimensionError("pairwise_exchange_check: c must have length 2");
  const LrResult lr = lr_compare(d1, d2);
  if (lr.verdict != LrVerdict::kD1Greater)
    throw PreconditionError(std::string("pairwise_exchange_check: d1 >=_lr d2 not verified (") + to_string(lr.verdict) +
                            ")");
  const double w1 = phi(c[0]), w2 = phi(c[1]);
  const double hi = std::max(w1, w2), lo = std::min(w1, w2);
  const std::vector<DensitySpec> specs{d1.density_spec(), d2.density_spec()};
  const auto [f_hi_first, f_lo_first] = convolve_pair(specs, WeightVector{hi, lo}, specs, WeightVector{lo, hi});
  auto ok_at = [&](double t) { return f_hi_first.at(t) <= f_lo_first.at(t) + kOracleTol; };
  if (t_grid.empty()) {
    for (std::size_t i = 0; i < f_hi_first.size(); ++i)
      if (f_hi_first.values()[i] > f_lo_first.values()[i] + kOracleTol) return false;
    return true;
  }
  return std::all_of(t_grid.begin(), t_grid.end(), ok_at);
}

// Gamma(alpha, 1) weights that differ in exactly two coordinates with a
// majorizing b: equal means, CDFs cross once, so no stochastic order exists.
inline TheoremReport run_counterexample(double alpha, const WeightVector& a, const WeightVector& b,
                                        std::size_t n_samples = 100000, std::uint64_t seed = 42, double delta = 0.01) {
  if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw ParameterError("run_counterexample: alpha must be >= 1");
  if (a.size() != b.size()) throw DimensionError("run_counterexample: a and b differ in length");
  if (a.size() < 3) throw ParameterError("run_counterexample: need n >= 3");
  if (!a.all_nonnegative() || !b.all_nonnegative()) throw ParameterError("run_counterexample: weights must be nonnegative");
  std::size_t differing = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-12 * (1.0 + std::abs(a[i]))) ++differing;
  if (differing != 2) throw ParameterError("run_counterexample: a and b must differ in exactly two components");
  if (!check_majorize(b, a, MajorizationMode::kFull, kPremiseTol))
    throw ParameterError("run_counterexample: a must majorize b");

  const ComponentDist x = ComponentDist::gengamma(1.0, alpha, 1.0);
  TheoremReport rep;
  rep.scenario = "counterexample";
  rep.theorem = "counterexample";
  rep.predicted = StRelation::kCrossing;
  rep.hypothesis.majorization_ok = {CheckStatus::kPass, "a majorizes b"};
  rep.hypothesis.conditions_ok = {CheckStatus::kFail, "phi = psi = identity: phi'' = 0"};
  const auto lc = log_concavity_classify(x.base(), VariableTransform::identity());
  rep.hypothesis.logconcavity_ok = {lc.verdict == LogConcavity::kLogConcave ? CheckStatus::kPass : CheckStatus::kUnknown,
                                    lc.basis};
  rep.hypothesis.lr_chain_ok = {CheckStatus::kPass, "identical distributions"};
  rep.coeff_a = a;
  rep.coeff_b = b;

  const std::vector<ComponentDist> dists(a.size(), x);
  rep.verdict = st_compare_empirical(detail::sample_weighted_sum(dists, a, n_samples, derive_seed(seed, 1000)),
                                     detail::sample_weighted_sum(dists, b, n_samples, derive_seed(seed, 2000)), delta);

  const std::vector<DensitySpec> specs(a.size(), x.density_spec());
  const auto [fa, fb] = convolve_pair(specs, a, specs, b);
  rep.oracle_verdict = st_compare_exact(fa, fb, kOracleTol);
  const double mean_a = a.sum() * x.base().mean(), mean_b = b.sum() * x.base().mean();
  rep.extras["mean_a"] = mean_a;
  rep.extras["mean_b"] = mean_b;
  rep.extras["oracle_mean_a"] = fa.mean();
  rep.extras["oracle_mean_b"] = fb.mean();
  rep.consistent = rep.oracle_verdict->relation == StRelation::kCrossing && rep.oracle_verdict->crossing_count == 1 &&
                   std::abs(mean_a - mean_b) < 1e-8;
  return rep;
}

// ---------------------------------------------------------------------------
// Presets and scenario generation

enum class Preset {
  kExpExp,        // phi = psi = exp, log X log-concave, i.i.d.
  kPowerA0,       // (p, q) in A0, i.i.d.
  kPowerA1,       // A1, i.i.d.
  kPowerA2,       // A2, i.i.d.
  kPowerA3,       // A3, i.i.d. (concave case)
  kLogShift,      // phi = log(x + e), psi = x^(1/p), p >= 2 (concave case)
  kNonIidExpExp,  // exp/exp over an lr chain
  kNonIidA3,      // A3 over an lr chain
  kNonIidA2,      // A2 over an lr chain
  kNonIidA1,      // A1 over an lr chain
};

inline const std::vector<Preset>& all_presets() {
  static const std::vector<Preset> v{Preset::kExpExp,       Preset::kPowerA0,  Preset::kPowerA1,  Preset::kPowerA2,
                                     Preset::kPowerA3,      Preset::kLogShift, Preset::kNonIidExpExp,
                                     Preset::kNonIidA3,     Preset::kNonIidA2, Preset::kNonIidA1};
  return v;
}

inline const char* to_string(Preset p) {
  switch (p) {
    case Preset::kExpExp: return "exp-exp";
    case Preset::kPowerA0: return "power-a0";
    case Preset::kPowerA1: return "power-a1";
    case Preset::kPowerA2: return "power-a2";
    case Preset::kPowerA3: return "power-a3";
    case Preset::kLogShift: return "logshift";
    case Preset::kNonIidExpExp: return "noniid-exp-exp";
    case Preset::kNonIidA3: return "noniid-a3";
    case Preset::kNonIidA2: return "noniid-a2";
    case Preset::kNonIidA1: return "noniid-a1";
  }
  return "?";
}

inline std::optional<Preset> preset_from_string(const std::string& s) {
  for (Preset p : all_presets())
    if (s == to_string(p)) return p;
  return std::nullopt;
}

inline bool preset_is_iid(Preset p) {
  return p == Preset::kExpExp || p == Preset::kPowerA0 || p == Preset::kPowerA1 || p == Preset::kPowerA2 ||
         p == Preset::kPowerA3 || p == Preset::kLogShift;
}

namespace detail {

struct PresetShape {
  Transform phi;
  Transform psi;
  ConditionVariant variant;
  double p;          // psi exponent is 1/p (NaN for exp)
  bool reciprocal;   // components are 1/Z
};

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

// Random (p, q) strictly inside the preset's region and away from its edges.
inline PresetShape draw_shape(Preset preset, std::mt19937_64& g) {
  const double nan = std::nan("");
  switch (preset) {
    case Preset::kExpExp:
    case Preset::kNonIidExpExp:
      return {make_exp(), make_exp(), ConditionVariant::kConvexCase, nan, false};
    case Preset::kPowerA0: {
      const double p = -uniform(g, 0.5, 3.0), q = -uniform(g, 0.5, 3.0);
      auto [phi, psi] = power_pair(p, q);
      return {phi, psi, ConditionVariant::kConvexCase, p, true};
    }
    case Preset::kPowerA1:
    case Preset::kNonIidA1: {
      // p < 0, 0 < q <= p / (p - 1) keeps 1/p + 1/q >= 1.
      const double p = -uniform(g, 0.5, 3.0);
      const double q = (p / (p - 1.0)) * uniform(g, 0.5, 0.999);
      auto [phi, psi] = power_pair(p, q);
      return {phi, psi, ConditionVariant::kConvexCase, p, true};
    }
    case Preset::kPowerA2:
    case Preset::kNonIidA2: {
      // 0 < p < 1, q <= p / (p - 1) < 0.
      const double p = uniform(g, 0.3, 0.9);
      const double q = (p / (p - 1.0)) * uniform(g, 1.001, 2.0);
      auto [phi, psi] = power_pair(p, q);
      return {phi, psi, ConditionVariant::kConvexCase, p, false};
    }
    case Preset::kPowerA3:
    case Preset::kNonIidA3: {
      // p > 1, q >= p / (p - 1).
      const double p = uniform(g, 1.2, 4.0);
      const double q = (p / (p - 1.0)) * uniform(g, 1.0, 1.5);
      auto [phi, psi] = power_pair(p, q);
      return {phi, psi, ConditionVariant::kConcaveCase, p, false};
    }
    case Preset::kLogShift: {
      const double p = uniform(g, 2.0, 4.0);
      return {make_log_shift(), make_power(1.0 / p), ConditionVariant::kConcaveCase, p, false};
    }
  }
  throw ParameterError("unknown preset");
}

// Components with psi^-1(X) = X^p (or log X) log-concave by the analytic rules.
// Shapes are kept at alpha * p >= 2 so every density vanishes smoothly at the
// origin; the convolution oracle refines slowly near a density singularity.
inline ComponentDist draw_component(const PresetShape& shape, std::mt19937_64& g, double lambda, double alpha) {
  if (std::isnan(shape.p)) {
    const double p = uniform(g, 0.5, 3.0);
    return ComponentDist::gengamma(p, std::max(alpha, 2.0 / p), lambda);
  }
  if (shape.reciprocal) return ComponentDist::inv_gengamma(-shape.p, alpha, lambda);
  return ComponentDist::gengamma(shape.p, std::max(alpha, 2.0 / shape.p), lambda);
}

// b' below a' in transformed coordinates: random T-transforms of a', then
// a weak relaxation when the mode allows one. Values stay inside phi's range
// of inverses (positive for power transforms, >= 0 for log-shift).
inline std::vector<double> draw_premise(const std::vector<double>& ta, MajorizationMode mode, const Transform& phi,
                                        std::mt19937_64& g) {
  const std::size_t n = ta.size();
  std::vector<double> tb = ta;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1), other(1, n - 1);
  const int moves = 1 + static_cast<int>(uniform(g, 0.0, 2.0 * static_cast<double>(n)));
  for (int m = 0; m < moves; ++m) {
    const std::size_t i = pick(g), j = (i + other(g)) % n;
    const double t = uniform(g, 0.0, 1.0);
    const double xi = tb[i], xj = tb[j];
    tb[i] = t * xi + (1.0 - t) * xj;
    tb[j] = t * xj + (1.0 - t) * xi;
  }
  const bool additive = phi.kind() == TransformKind::kExp;
  if (mode == MajorizationMode::kWeakSub) {
    for (auto& v : tb)
      if (uniform(g, 0.0, 1.0) < 0.5) v = additive ? v - uniform(g, 0.0, 0.5) : v * uniform(g, 0.7, 1.0);
  } else if (mode == MajorizationMode::kWeakSup) {
    for (auto& v : tb)
      if (uniform(g, 0.0, 1.0) < 0.5) v = additive ? v + uniform(g, 0.0, 0.5) : v * uniform(g, 1.0, 1.3);
  }
  return tb;
}

}  // namespace detail

// One random scenario for the preset; weights are log-uniform on [0.1, 10]
// (uniform on [1, 3] for log-shift, whose weights must be >= 1).
inline Scenario generate_scenario(Preset preset, std::uint64_t seed, std::size_t n_samples = 100000,
                                  double delta = 0.01) {
  std::mt19937_64 g(derive_seed(seed, 7));
  auto shape = detail::draw_shape(preset, g);
  const std::size_t n = 2 + static_cast<std::size_t>(detail::uniform(g, 0.0, 4.0));  // 2..5

  std::vector<double> a(n);
  for (auto& v : a)
    v = preset == Preset::kLogShift ? detail::uniform(g, 1.0, 3.0) : std::exp(detail::uniform(g, std::log(0.1), std::log(10.0)));
  const bool full = detail::uniform(g, 0.0, 1.0) < 0.5;
  const MajorizationMode mode = full ? MajorizationMode::kFull : admissible_weak_mode(shape.phi, shape.variant);

  std::vector<double> ta(n);
  for (std::size_t i = 0; i < n; ++i) ta[i] = shape.phi.inverse(a[i]);
  const auto tb = detail::draw_premise(ta, mode, shape.phi, g);
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = shape.phi(tb[i]);

  // Reciprocal components need a large shape parameter so the truncated
  // upper tail of 1/Z stays within reach of the convolution grid.
  const double alpha_lo = shape.reciprocal ? 6.0 : 1.0, alpha_hi = shape.reciprocal ? 10.0 : 3.0;
  std::vector<ComponentDist> dists;
  if (preset_is_iid(preset)) {
    dists.assign(n, detail::draw_component(shape, g, detail::uniform(g, 0.5, 2.0), detail::uniform(g, alpha_lo, alpha_hi)));
  } else {
    const double alpha = detail::uniform(g, alpha_lo, alpha_hi);
    std::vector<double> lambdas(n);
    for (auto& l : lambdas) l = detail::uniform(g, 0.5, 3.0);
    // X_1 >=_lr X_2 >=_lr ...: increasing lambda for X, decreasing for Z in 1/Z.
    std::sort(lambdas.begin(), lambdas.end());
    if (shape.reciprocal) std::reverse(lambdas.begin(), lambdas.end());
    const auto first = detail::draw_component(shape, g, lambdas[0], alpha);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& base = first.base();
      dists.push_back(first.kind() == ComponentDist::Kind::kGenGamma
                          ? ComponentDist::gengamma(base.p(), base.alpha(), lambdas[i])
                          : ComponentDist::inv_gengamma(base.p(), base.alpha(), lambdas[i]));
    }
  }

  std::ostringstream name;
  name << to_string(preset) << "#" << seed;
  return Scenario{name.str(),  std::move(dists), shape.phi, shape.psi, shape.variant, WeightVector(a),
                  WeightVector(b), mode,         n_samples, seed,      delta};
}

// Dispatches to the i.i.d. or non-i.i.d. verifier.
inline TheoremReport verify_scenario(const Scenario& s) {
  return s.iid() ? verify_iid_theorem(s) : verify_noniid_theorem(s);
}

struct SuiteConfig {
  std::uint64_t master_seed = 42;
  std::size_t n_samples = 100000;
  double delta = 0.01;
  std::size_t per_preset = 20;
  std::vector<Preset> presets = all_presets();
  unsigned threads = 0;  // 0: hardware concurrency
};

struct SuiteEntry {
  std::optional<TheoremReport> report;
  std::string error;  // precondition or numeric failure, if any
};

struct SuiteResult {
  std::vector<SuiteEntry> entries;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
  std::size_t errors = 0;
  std::size_t inconsistent = 0;
};

inline std::vector<Scenario> suite_scenarios(const SuiteConfig& cfg) {
  std::vector<Scenario> out;
  std::uint64_t k = 0;
  for (Preset p : cfg.presets)
    for (std::size_t i = 0; i < cfg.per_preset; ++i, ++k)
      out.push_back(generate_scenario(p, derive_seed(cfg.master_seed, k), cfg.n_samples, cfg.delta));
  return out;
}

// Runs scenarios as independent jobs; results are collected by index so the
// output depends only on (config, master seed).
inline SuiteResult run_suite(const std::vector<Scenario>& scenarios, unsigned threads = 0) {
  SuiteResult res;
  res.entries.resize(scenarios.size());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(threads ? threads : std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(std::max<std::size_t>(1, scenarios.size()))));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        res.entries[i].report = verify_scenario(scenarios[i]);
      } catch (const Error& e) {
        res.entries[i].error = e.what();
      }
    }
  };
  std::vector<std::future<void>> jobs;
  for (unsigned w = 1; w < workers; ++w) jobs.push_back(std::async(std::launch::async, work));
  work();
  for (auto& j : jobs) j.get();

  for (const auto& e : res.entries) {
    if (!e.report) {
      ++res.errors;
      continue;
    }
    if (e.report->status == TheoremStatus::kSkipped) ++res.skipped;
    else ++res.evaluated;
    if (!e.report->consistent) ++res.inconsistent;
  }
  return res;
}

inline SuiteResult run_suite(const SuiteConfig& cfg) { return run_suite(suite_scenarios(cfg), cfg.threads); }

}  // namespace stord
