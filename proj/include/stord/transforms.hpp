#pragma once

// Strictly monotone scalar transforms used to reparameterize the weights and
// the variables, the Hessian conditions that make phi(u) * psi(v) convex, the
// (p, q) regions for power pairs, and pairwise dominance between transforms.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "stord/error.hpp"
#include "stord/numeric.hpp"

namespace stord {

enum class Monotonicity { kIncreasing, kDecreasing };

enum class TransformKind { kExp, kPower, kLogShift, kCustom };

// Half-open bookkeeping for where a transform is defined; endpoints may be
// infinite. `closed_lo` marks whether lo itself belongs to the set.
struct Interval {
  double lo = -kInf;
  double hi = kInf;
  bool closed_lo = false;

  [[nodiscard]] bool contains(double x) const {
    return (closed_lo ? x >= lo : x > lo) && x < hi;
  }
};

class Transform {
 public:
  using Fn = std::function<double(double)>;

  struct Parts {
    std::string label;
    Fn eval, d1, d2, inverse;
    Monotonicity direction = Monotonicity::kIncreasing;
    Interval domain{0.0, kInf, false};
    Interval range{0.0, kInf, false};
    // Optional closed form of d2 * eval / d1^2; lets condition checks stay
    // finite where eval itself overflows.
    Fn curvature_ratio;
    TransformKind kind = TransformKind::kCustom;
    double parameter = 0.0;
  };

  // Validates monotonicity, inverse round-trip (relative 1e-9) and derivative
  // consistency with central differences (mixed 1e-5) on a grid.
  explicit Transform(Parts parts) : p_(std::move(parts)) {
    if (!p_.eval || !p_.d1 || !p_.d2 || !p_.inverse) throw ParameterError("Transform: missing component function");
    validate();
  }

  // A transform given only by its values; derivatives come from central
  // differences and inherit their 1e-5 accuracy.
  static Transform from_function(std::string label, Fn eval, Fn inverse, Monotonicity direction,
                                 Interval domain = {0.0, kInf, false}, Interval range = {0.0, kInf, false}) {
    Parts parts;
    parts.label = std::move(label);
    parts.d1 = [eval](double x) {
      const double h = 1e-5 * std::max(1.0, std::abs(x));
      return (eval(x + h) - eval(x - h)) / (2.0 * h);
    };
    parts.d2 = [eval](double x) {
      const double h = 1e-4 * std::max(1.0, std::abs(x));
      return (eval(x + h) - 2.0 * eval(x) + eval(x - h)) / (h * h);
    };
    parts.eval = std::move(eval);
    parts.inverse = std::move(inverse);
    parts.direction = direction;
    parts.domain = domain;
    parts.range = range;
    return Transform(std::move(parts));
  }

  [[nodiscard]] double operator()(double x) const { return p_.eval(x); }
  [[nodiscard]] double eval(double x) const { return p_.eval(x); }
  [[nodiscard]] double d1(double x) const { return p_.d1(x); }
  [[nodiscard]] double d2(double x) const { return p_.d2(x); }
  [[nodiscard]] double inverse(double y) const { return p_.inverse(y); }

  // Inverse restricted to the declared range; throws DomainError outside it.
  [[nodiscard]] double inverse_checked(double y) const {
    if (!p_.range.contains(y)) {
      std::ostringstream os;
      os << "transform " << p_.label << ": " << y << " is outside its range";
      throw DomainError(os.str());
    }
    return p_.inverse(y);
  }

  [[nodiscard]] double curvature_ratio(double x) const {
    if (p_.curvature_ratio) return p_.curvature_ratio(x);
    const double g1 = d1(x);
    return d2(x) * eval(x) / (g1 * g1);
  }

  [[nodiscard]] Monotonicity direction() const noexcept { return p_.direction; }
  [[nodiscard]] bool increasing() const noexcept { return p_.direction == Monotonicity::kIncreasing; }
  [[nodiscard]] const std::string& label() const noexcept { return p_.label; }
  [[nodiscard]] const Interval& domain() const noexcept { return p_.domain; }
  [[nodiscard]] const Interval& range() const noexcept { return p_.range; }
  [[nodiscard]] TransformKind kind() const noexcept { return p_.kind; }
  [[nodiscard]] double parameter() const noexcept { return p_.parameter; }

 private:
  void validate() const {
    std::vector<double> xs;
    for (double x : logspace(0.05, 20.0, 24))
      if (p_.domain.contains(x)) xs.push_back(x);
    if (xs.size() < 2) throw ParameterError("Transform " + p_.label + ": domain misses the validation grid");

    auto fail = [&](const std::string& what, double x) {
      std::ostringstream os;
      os << "Transform " << p_.label << ": " << what << " at x=" << x;
      throw NumericError(os.str());
    };
    double prev = p_.eval(xs.front());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double x = xs[i];
      const double y = p_.eval(x);
      if (!std::isfinite(y)) fail("non-finite value", x);
      if (i > 0) {
        const bool up = y > prev, down = y < prev;
        if ((increasing() && !up) || (!increasing() && !down)) fail("not strictly monotone in declared direction", x);
      }
      prev = y;

      const double back = p_.inverse(y);
      if (!(std::abs(back - x) <= 1e-9 * std::abs(x))) fail("inverse round-trip mismatch", x);

      const double h1 = 1e-5 * x;
      const double fd1 = (p_.eval(x + h1) - p_.eval(x - h1)) / (2.0 * h1);
      const double h2 = 3e-4 * x;
      const double fd2 = (p_.eval(x + h2) - 2.0 * y + p_.eval(x - h2)) / (h2 * h2);
      const double a1 = p_.d1(x), a2 = p_.d2(x);
      if (!(std::abs(fd1 - a1) <= 1e-5 * (1.0 + std::abs(a1)))) fail("first derivative disagrees with differences", x);
      if (!(std::abs(fd2 - a2) <= 1e-5 * (1.0 + std::abs(a2)) + 1e-8 * std::abs(y) / (x * x)))
        fail("second derivative disagrees with differences", x);
    }
  }

  Parts p_;
};

inline Transform make_exp() {
  Transform::Parts p;
  p.label = "exp";
  p.eval = [](double x) { return std::exp(x); };
  p.d1 = p.eval;
  p.d2 = p.eval;
  p.inverse = [](double y) { return std::log(y); };
  p.curvature_ratio = [](double) { return 1.0; };
  p.direction = Monotonicity::kIncreasing;
  p.domain = {-kInf, kInf, false};
  p.range = {0.0, kInf, false};
  p.kind = TransformKind::kExp;
  return Transform(std::move(p));
}

// x^r on (0, inf); increasing iff r > 0.
inline Transform make_power(double r) {
  if (r == 0.0 || !std::isfinite(r)) throw ParameterError("make_power: exponent must be finite and nonzero");
  Transform::Parts p;
  std::ostringstream os;
  os << "power(" << r << ")";
  p.label = os.str();
  p.eval = [r](double x) { return std::pow(x, r); };
  p.d1 = [r](double x) { return r * std::pow(x, r - 1.0); };
  p.d2 = [r](double x) { return r * (r - 1.0) * std::pow(x, r - 2.0); };
  p.inverse = [r](double y) { return std::pow(y, 1.0 / r); };
  p.curvature_ratio = [r](double) { return (r - 1.0) / r; };
  p.direction = r > 0.0 ? Monotonicity::kIncreasing : Monotonicity::kDecreasing;
  p.kind = TransformKind::kPower;
  p.parameter = r;
  return Transform(std::move(p));
}

// log(x + e): maps [0, inf) onto [1, inf).
inline Transform make_log_shift() {
  constexpr double e = std::numbers::e;
  Transform::Parts p;
  p.label = "logshift";
  p.eval = [](double x) { return std::log(x + e); };
  p.d1 = [](double x) { return 1.0 / (x + e); };
  p.d2 = [](double x) { return -1.0 / ((x + e) * (x + e)); };
  p.inverse = [](double y) { return std::exp(y) - e; };
  p.curvature_ratio = [](double x) { return -std::log(x + e); };
  p.direction = Monotonicity::kIncreasing;
  p.domain = {0.0, kInf, true};
  p.range = {1.0, kInf, true};
  p.kind = TransformKind::kLogShift;
  return Transform(std::move(p));
}

enum class ConditionVariant {
  kConvexCase,   // phi'' >= 0 with the product condition; a-side dominates
  kConcaveCase,  // phi'' <= 0 with the product condition; b-side dominates
};

// Margins are scale-free: condition (a) uses the sign of phi'' through
// k_phi(u) = phi'' phi / phi'^2, condition (b) is k_phi(u) k_psi(v) >= 1, which
// is the product inequality divided by (phi' psi')^2 > 0.
struct ConditionReport {
  bool condition_a_holds = false;
  bool condition_b_holds = false;
  double worst_violation_a = 0.0;
  double worst_violation_b = 0.0;
  double worst_violation = 0.0;
  std::pair<double, double> worst_point{0.0, 0.0};
  std::string grid_spec;

  [[nodiscard]] bool holds() const noexcept { return condition_a_holds && condition_b_holds; }
};

inline ConditionReport check_convexity_conditions(const Transform& phi, const Transform& psi,
                                                  ConditionVariant variant, const GridAxis& grid = {}) {
  if (!(grid.lo > 0.0)) throw ParameterError("check_convexity_conditions: grid must lie in (0, inf)");
  constexpr double snap = 1e-12;
  const auto nodes = grid.nodes();

  auto ratio_or_throw = [](const Transform& t, double x) {
    const double k = t.curvature_ratio(x);
    if (!std::isfinite(k)) {
      std::ostringstream os;
      os << "check_convexity_conditions: non-finite derivative data for " << t.label() << " at " << x;
      throw NumericError(os.str());
    }
    return k;
  };
  std::vector<double> kphi(nodes.size()), kpsi(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    kphi[i] = ratio_or_throw(phi, nodes[i]);
    kpsi[i] = ratio_or_throw(psi, nodes[i]);
  }

  ConditionReport rep;
  rep.grid_spec = grid.describe();
  rep.worst_violation_a = -kInf;
  rep.worst_violation_b = -kInf;
  rep.worst_violation = -kInf;
  const double sign = variant == ConditionVariant::kConvexCase ? -1.0 : 1.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    double va = sign * kphi[i];
    if (std::abs(va) <= snap) va = 0.0;
    rep.worst_violation_a = std::max(rep.worst_violation_a, va);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      double vb = 1.0 - kphi[i] * kpsi[j];
      if (std::abs(vb) <= snap) vb = 0.0;
      rep.worst_violation_b = std::max(rep.worst_violation_b, vb);
      const double v = std::max(va, vb);
      if (v > rep.worst_violation) {
        rep.worst_violation = v;
        rep.worst_point = {nodes[i], nodes[j]};
      }
    }
  }
  rep.condition_a_holds = rep.worst_violation_a <= 0.0;
  rep.condition_b_holds = rep.worst_violation_b <= 0.0;
  return rep;
}

enum class PQRegion { kA0, kA1, kA2, kA3, kNone };

inline const char* to_string(PQRegion r) {
  switch (r) {
    case PQRegion::kA0: return "A0";
    case PQRegion::kA1: return "A1";
    case PQRegion::kA2: return "A2";
    case PQRegion::kA3: return "A3";
    case PQRegion::kNone: return "NONE";
  }
  return "NONE";
}

// Region of (p, q) for the pair phi = x^(1/q), psi = x^(1/p). Boundaries are
// taken exactly as written (>= 1 for A1/A2, <= 1 for A3).
inline PQRegion classify_pq(double p, double q) {
  if (p == 0.0 || q == 0.0 || !std::isfinite(p) || !std::isfinite(q))
    throw ParameterError("classify_pq: p and q must be finite and nonzero");
  const double s = 1.0 / p + 1.0 / q;
  if (p < 0.0 && q < 0.0) return PQRegion::kA0;
  if (p < 0.0 && q > 0.0 && q < 1.0 && s >= 1.0) return PQRegion::kA1;
  if (p > 0.0 && p < 1.0 && q < 0.0 && s >= 1.0) return PQRegion::kA2;
  if (p > 1.0 && q > 1.0 && s <= 1.0) return PQRegion::kA3;
  return PQRegion::kNone;
}

// phi = x^(1/q) and psi = x^(1/p).
inline std::pair<Transform, Transform> power_pair(double p, double q) {
  return {make_power(1.0 / q), make_power(1.0 / p)};
}

enum class TransformComparison { kPhi2Better, kUndetermined };

inline const char* to_string(TransformComparison c) {
  return c == TransformComparison::kPhi2Better ? "PHI2_BETTER" : "UNDETERMINED";
}

// Checks whether phi2 admits a weaker premise than phi1 for the same psi via
// g = phi2^-1 o phi1 (negated in the concave case) and the four monotone
// cases: same direction needs g convex for increasing pairs, concave for
// decreasing pairs; mixed directions need concave (inc -> dec) or convex
// (dec -> inc).
inline TransformComparison compare_transforms(const Transform& phi1, const Transform& phi2, ConditionVariant variant,
                                              const GridAxis& grid = {1e-2, 1e2, 257, true}) {
  const auto xs = grid.nodes();
  const double sign = variant == ConditionVariant::kConvexCase ? 1.0 : -1.0;
  std::vector<double> g(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double y = phi1(xs[i]);
    if (!std::isfinite(y) || !phi2.range().contains(y)) {
      std::ostringstream os;
      os << "compare_transforms: " << phi1.label() << "(" << xs[i] << ") leaves the range of " << phi2.label();
      throw NumericError(os.str());
    }
    g[i] = sign * phi2.inverse(y);
    if (!std::isfinite(g[i])) throw NumericError("compare_transforms: composition is not finite");
  }

  bool need_convex = false;
  if (phi1.increasing() && phi2.increasing()) need_convex = true;            // (i)
  else if (phi1.increasing() && !phi2.increasing()) need_convex = false;     // (ii)
  else if (!phi1.increasing() && phi2.increasing()) need_convex = true;      // (iii)
  else need_convex = false;                                                  // (iv)

  double prev_slope = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double slope = (g[i + 1] - g[i]) / (xs[i + 1] - xs[i]);
    if (i > 0) {
      const double slack = 1e-9 * (std::abs(slope) + std::abs(prev_slope)) + 1e-12;
      const bool ok = need_convex ? slope >= prev_slope - slack : slope <= prev_slope + slack;
      if (!ok) return TransformComparison::kUndetermined;
    }
    prev_slope = slope;
  }
  return TransformComparison::kPhi2Better;
}

}  // namespace stord
