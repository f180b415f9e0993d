#pragma once

// Majorization preorders on finite real vectors, T-transform chains between
// majorization-comparable vectors, and the componentwise sandwich that turns
// a weak-majorization premise into a full one.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "stord/error.hpp"

namespace stord {

// Finite vector of reals. Nonnegativity is left to the operations that need it
// because transformed coefficients (log a_i, say) are routinely negative.
class WeightVector {
 public:
  WeightVector(std::initializer_list<double> values) : WeightVector(std::vector<double>(values)) {}

  explicit WeightVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw ParameterError("WeightVector: length must be at least 1");
    for (double v : values_) {
      if (!std::isfinite(v)) throw ParameterError("WeightVector: entries must be finite");
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] const std::vector<double>& to_vector() const noexcept { return values_; }
  [[nodiscard]] auto begin() const noexcept { return values_.begin(); }
  [[nodiscard]] auto end() const noexcept { return values_.end(); }

  [[nodiscard]] double sum() const noexcept { return std::accumulate(values_.begin(), values_.end(), 0.0); }
  [[nodiscard]] bool all_nonnegative() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v >= 0.0; });
  }

  template <typename F>
  [[nodiscard]] WeightVector map(F&& f) const {
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(), std::forward<F>(f));
    return WeightVector(std::move(out));
  }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> values_;
};

inline std::string to_string(const WeightVector& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

enum class MajorizationMode {
  kFull,     // x majorized by y
  kWeakSub,  // x weakly submajorized by y: top partial sums of x are smaller
  kWeakSup,  // x weakly supmajorized by y: bottom partial sums of x are larger
};

inline constexpr double kDefaultMajorizationTol = 1e-12;

inline WeightVector sort_increasing(const WeightVector& v) {
  std::vector<double> out = v.to_vector();
  std::stable_sort(out.begin(), out.end());
  return WeightVector(std::move(out));
}

namespace detail {

inline void require_same_length(const WeightVector& x, const WeightVector& y, const char* what) {
  if (x.size() != y.size()) {
    std::ostringstream os;
    os << what << ": length mismatch (" << x.size() << " vs " << y.size() << ")";
    throw DimensionError(os.str());
  }
}

// lhs >= rhs up to tol * (1 + |sum|).
inline bool geq_slack(double lhs, double rhs, double tol) {
  return lhs >= rhs - tol * (1.0 + std::max(std::abs(lhs), std::abs(rhs)));
}

inline bool near(double lhs, double rhs, double tol) {
  return geq_slack(lhs, rhs, tol) && geq_slack(rhs, lhs, tol);
}

// Prefix sums of the increasing arrangement: out[j] = x_(1) + ... + x_(j+1).
inline std::vector<double> bottom_sums(const WeightVector& v) {
  std::vector<double> s = sort_increasing(v).to_vector();
  std::partial_sum(s.begin(), s.end(), s.begin());
  return s;
}

// out[j] = sum of the j+1 largest entries.
inline std::vector<double> top_sums(const WeightVector& v) {
  std::vector<double> s = sort_increasing(v).to_vector();
  std::reverse(s.begin(), s.end());
  std::partial_sum(s.begin(), s.end(), s.begin());
  return s;
}

inline std::vector<std::size_t> argsort_increasing(const WeightVector& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return idx;
}

}  // namespace detail

// True iff x is below y in the given preorder; every partial-sum comparison is
// slackened by tol * (1 + |sum|).
inline bool check_majorize(const WeightVector& x, const WeightVector& y, MajorizationMode mode,
                           double tol = kDefaultMajorizationTol) {
  detail::require_same_length(x, y, "check_majorize");
  if (!(tol >= 0.0)) throw ParameterError("check_majorize: tol must be >= 0");
  const std::size_t n = x.size();
  switch (mode) {
    case MajorizationMode::kWeakSup: {
      auto bx = detail::bottom_sums(x), by = detail::bottom_sums(y);
      for (std::size_t j = 0; j < n; ++j)
        if (!detail::geq_slack(bx[j], by[j], tol)) return false;
      return true;
    }
    case MajorizationMode::kWeakSub: {
      auto tx = detail::top_sums(x), ty = detail::top_sums(y);
      for (std::size_t j = 0; j < n; ++j)
        if (!detail::geq_slack(ty[j], tx[j], tol)) return false;
      return true;
    }
    case MajorizationMode::kFull: {
      auto bx = detail::bottom_sums(x), by = detail::bottom_sums(y);
      for (std::size_t j = 0; j + 1 < n; ++j)
        if (!detail::geq_slack(bx[j], by[j], tol)) return false;
      return detail::near(bx[n - 1], by[n - 1], tol);
    }
  }
  return false;
}

// Sequence of sorted vectors from the lower to the upper end of a majorization
// pair; neighbours differ in at most two coordinates.
struct TChain {
  std::vector<WeightVector> steps;

  [[nodiscard]] std::size_t size() const noexcept { return steps.size(); }
  [[nodiscard]] const WeightVector& front() const { return steps.front(); }
  [[nodiscard]] const WeightVector& back() const { return steps.back(); }
};

// Builds the chain by repeatedly moving mass between the extreme differing
// pair of the upper vector (Marshall-Olkin 2.B.1). Each move makes at least one
// more coordinate agree with the lower vector, so at most n-1 moves happen.
inline TChain t_transform_chain(const WeightVector& x, const WeightVector& y,
                                double tol = kDefaultMajorizationTol) {
  detail::require_same_length(x, y, "t_transform_chain");
  if (!check_majorize(x, y, MajorizationMode::kFull, tol)) {
    throw OrderError("t_transform_chain: " + to_string(x) + " is not majorized by " + to_string(y));
  }
  const std::size_t n = x.size();

  // Work in decreasing order, where the classical construction keeps every
  // intermediate vector sorted.
  std::vector<double> lower = sort_increasing(x).to_vector();
  std::vector<double> cur = sort_increasing(y).to_vector();
  std::reverse(lower.begin(), lower.end());
  std::reverse(cur.begin(), cur.end());

  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max({scale, std::abs(lower[i]), std::abs(cur[i])});
  const double eps = std::max(tol, 1e-15) * scale * static_cast<double>(n);

  auto as_increasing = [](std::vector<double> v) {
    std::reverse(v.begin(), v.end());
    return WeightVector(std::move(v));
  };

  std::vector<WeightVector> down{as_increasing(cur)};
  for (std::size_t iter = 0; iter < n; ++iter) {
    std::size_t j = n;
    for (std::size_t i = n; i-- > 0;) {
      if (cur[i] > lower[i] + eps) {
        j = i;
        break;
      }
    }
    if (j == n) break;
    std::size_t k = n;
    for (std::size_t i = j + 1; i < n; ++i) {
      if (cur[i] < lower[i] - eps) {
        k = i;
        break;
      }
    }
    if (k == n) throw InternalError("t_transform_chain: no receiving coordinate found");
    const double give = cur[j] - lower[j];
    const double take = lower[k] - cur[k];
    if (give <= take) {
      cur[j] = lower[j];
      cur[k] += give;
      if (std::abs(cur[k] - lower[k]) <= eps) cur[k] = lower[k];
    } else {
      cur[k] = lower[k];
      cur[j] -= take;
    }
    down.push_back(as_increasing(cur));
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(cur[i] - lower[i]) > eps)
      throw InternalError("t_transform_chain: construction did not reach the lower vector");
  }
  // Pin the endpoint exactly; intermediate rounding stays within eps.
  if (down.size() == 1) {
    down.front() = as_increasing(lower);
  } else {
    down.back() = as_increasing(lower);
  }

  std::reverse(down.begin(), down.end());
  return TChain{std::move(down)};
}

// Finds c sandwiched between u (componentwise) and v (full majorization):
//   kWeakSub: requires v weakly submajorized by u; returns c <= u, c majorizes v.
//   kWeakSup: requires v weakly supmajorized by u; returns c >= u, c majorizes v.
// The construction lowers (raises) the smallest (largest) coordinates of u,
// clamping each at the matching order statistic of v.
inline WeightVector weak_completion(const WeightVector& u, const WeightVector& v, MajorizationMode mode,
                                    double tol = kDefaultMajorizationTol) {
  detail::require_same_length(u, v, "weak_completion");
  if (mode == MajorizationMode::kFull) throw ParameterError("weak_completion: mode must be weak");

  if (mode == MajorizationMode::kWeakSup) {
    if (!check_majorize(v, u, MajorizationMode::kWeakSup, tol)) {
      throw OrderError("weak_completion: " + to_string(v) + " is not weakly supmajorized by " + to_string(u));
    }
    // Negation swaps the two weak orders and preserves full majorization.
    auto neg = [](double t) { return -t; };
    WeightVector c = weak_completion(u.map(neg), v.map(neg), MajorizationMode::kWeakSub, tol);
    return c.map(neg);
  }

  if (!check_majorize(v, u, MajorizationMode::kWeakSub, tol)) {
    throw OrderError("weak_completion: " + to_string(v) + " is not weakly submajorized by " + to_string(u));
  }
  const std::size_t n = u.size();
  const auto order = detail::argsort_increasing(u);
  const std::vector<double> vs = sort_increasing(v).to_vector();

  std::vector<double> c = u.to_vector();
  double excess = std::max(0.0, u.sum() - v.sum());
  for (std::size_t r = 0; r < n && excess > 0.0; ++r) {
    const std::size_t pos = order[r];
    const double room = std::max(0.0, c[pos] - vs[r]);
    const double take = std::min(room, excess);
    c[pos] -= take;
    excess -= take;
  }
  // Fallback: dump whatever is left onto the smallest coordinate. Always valid
  // in exact arithmetic; only reached through rounding.
  if (excess > 0.0) c[order.front()] -= excess;

  WeightVector result(std::move(c));
  const double check_tol = std::max(tol, 1e-10);
  for (std::size_t i = 0; i < n; ++i) {
    if (!detail::geq_slack(u[i], result[i], check_tol))
      throw InternalError("weak_completion: componentwise bound violated");
  }
  if (!check_majorize(v, result, MajorizationMode::kFull, check_tol))
    throw InternalError("weak_completion: result does not majorize " + to_string(v));
  return result;
}

// The four monotone-transform cases of the weak-majorization preservation
// lemma (Marshall-Olkin 5.A.2), keyed by the shape of g.
enum class PreservationCase {
  kIncreasingConvex,   // x <_w y   =>  g(x) <_w g(y)
  kIncreasingConcave,  // x <^w y   =>  g(x) <^w g(y)
  kDecreasingConvex,   // x <^w y   =>  g(x) <_w g(y)
  kDecreasingConcave,  // x <_w y   =>  g(x) <^w g(y)
};

inline MajorizationMode premise_mode(PreservationCase c) {
  switch (c) {
    case PreservationCase::kIncreasingConvex:
    case PreservationCase::kDecreasingConcave:
      return MajorizationMode::kWeakSub;
    default:
      return MajorizationMode::kWeakSup;
  }
}

inline MajorizationMode conclusion_mode(PreservationCase c) {
  switch (c) {
    case PreservationCase::kIncreasingConvex:
    case PreservationCase::kDecreasingConvex:
      return MajorizationMode::kWeakSub;
    default:
      return MajorizationMode::kWeakSup;
  }
}

// Applies g coordinatewise and tests the concluded order. The premise must
// hold; otherwise the question is meaningless and an OrderError is raised.
template <typename G>
bool check_transform_preservation(G&& g, const WeightVector& x, const WeightVector& y, PreservationCase c,
                                  double tol = 1e-9) {
  detail::require_same_length(x, y, "check_transform_preservation");
  if (!check_majorize(x, y, premise_mode(c), tol)) {
    throw OrderError("check_transform_preservation: premise fails for " + to_string(x) + ", " + to_string(y));
  }
  auto apply = [&](const WeightVector& w) {
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      out[i] = static_cast<double>(g(w[i]));
      if (!std::isfinite(out[i])) throw DomainError("check_transform_preservation: g is not finite on input");
    }
    return WeightVector(std::move(out));
  };
  return check_majorize(apply(x), apply(y), conclusion_mode(c), tol);
}

}  // namespace stord
