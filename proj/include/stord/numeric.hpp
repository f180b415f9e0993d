#pragma once

// Grid builders, quadrature and root bracketing shared by the numeric modules.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/policies/error_handling.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "stord/error.hpp"

namespace stord {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Logarithmically spaced points in [lo, hi], both ends included.
inline std::vector<double> logspace(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi >= lo) || count == 0) throw ParameterError("logspace: need 0 < lo <= hi and count >= 1");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * static_cast<double>(i) / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (!(hi >= lo) || count == 0) throw ParameterError("linspace: need lo <= hi and count >= 1");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  out.back() = hi;
  return out;
}

// Axis of a square evaluation grid; recorded in reports so consumers know the
// scope of a "no violation found" certificate.
struct GridAxis {
  double lo = 1e-3;
  double hi = 1e3;
  std::size_t points = 64;
  bool log_spaced = true;

  [[nodiscard]] std::vector<double> nodes() const {
    return log_spaced ? logspace(lo, hi, points) : linspace(lo, hi, points);
  }
  [[nodiscard]] std::string describe() const {
    std::ostringstream os;
    os << points << (log_spaced ? " log-spaced" : " linear") << " points over [" << lo << ", " << hi << "]";
    return os.str();
  }
};

// Adaptive double-exponential quadrature over [lo, hi] (either end may be
// infinite). `split` separates the two halves when an end is infinite and
// should sit near the bulk of the integrand.
template <typename F>
double integrate(F&& f, double lo, double hi, double split = 1.0, double tol = 1e-10) {
  using boost::math::quadrature::exp_sinh;
  using boost::math::quadrature::tanh_sinh;
  if (!(hi > lo)) return 0.0;
  auto finite = [&](double a, double b) {
    tanh_sinh<double> ts;
    return ts.integrate(f, a, b, tol);
  };
  auto right_tail = [&](double a) {
    exp_sinh<double> es;
    return es.integrate(f, a, kInf, tol);
  };
  auto left_tail = [&](double b) {
    exp_sinh<double> es;
    return es.integrate([&](double t) { return f(-t); }, -b, kInf, tol);
  };
  const bool lo_inf = std::isinf(lo), hi_inf = std::isinf(hi);
  try {
    if (!lo_inf && !hi_inf) return finite(lo, hi);
    if (!lo_inf && hi_inf) {
      const double m = split > lo ? split : lo + 1.0;
      return finite(lo, m) + right_tail(m);
    }
    if (lo_inf && !hi_inf) {
      const double m = split < hi ? split : hi - 1.0;
      return left_tail(m) + finite(m, hi);
    }
    return left_tail(split) + right_tail(split);
  } catch (const boost::math::evaluation_error& e) {
    throw NumericError(std::string("integrate: ") + e.what());
  }
}

// Root of a monotone function on [lo, hi] by TOMS 748; f(lo), f(hi) must
// bracket zero.
template <typename F>
double solve_bracketed(F&& f, double lo, double hi, int bits = 50) {
  std::uintmax_t iters = 200;
  const double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw NumericError("solve_bracketed: interval does not bracket a root");
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(bits),
                                             iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace stord
