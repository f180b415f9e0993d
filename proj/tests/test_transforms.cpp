#include <cmath>
#include <numbers>
#include <random>

#include "catch_amalgamated.hpp"
#include "stord/transforms.hpp"

using namespace stord;
using Catch::Approx;

TEST_CASE("built-in transforms evaluate as documented") {
  CHECK(make_power(0.5).eval(4.0) == Approx(2.0));
  CHECK(make_exp().d2(0.0) == Approx(1.0));
  CHECK(make_log_shift().eval(0.0) == Approx(1.0));
  CHECK(make_log_shift().eval(1e-300) == Approx(1.0));
  CHECK_FALSE(make_power(-2.0).increasing());
  CHECK(make_power(3.0).increasing());
  CHECK_THROWS_AS(make_power(0.0), ParameterError);
}

TEST_CASE("built-in transforms pass their consistency checks across parameters") {
  for (double r : {-10.0, -3.0, -1.0, -0.5, -0.1, 0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 10.0}) {
    const Transform t = make_power(r);
    for (double x : {0.1, 1.0, 7.0}) {
      CHECK(t.inverse(t(x)) == Approx(x).epsilon(1e-12));
      CHECK(t.curvature_ratio(x) == Approx(t.d2(x) * t(x) / (t.d1(x) * t.d1(x))).epsilon(1e-12));
    }
  }
  const Transform ls = make_log_shift();
  for (double x : {0.0, 0.5, 3.0, 40.0}) {
    CHECK(ls.inverse(ls(x)) == Approx(x).margin(1e-12));
    CHECK(ls.curvature_ratio(x) == Approx(ls.d2(x) * ls(x) / (ls.d1(x) * ls.d1(x))).epsilon(1e-12));
  }
}

TEST_CASE("inverse_checked rejects values outside the range") {
  CHECK_THROWS_AS(make_exp().inverse_checked(0.0), DomainError);
  CHECK_THROWS_AS(make_exp().inverse_checked(-1.0), DomainError);
  CHECK_THROWS_AS(make_log_shift().inverse_checked(0.5), DomainError);
  CHECK(make_log_shift().inverse_checked(1.0) == Approx(0.0).margin(1e-15));
  CHECK(make_power(2.0).inverse_checked(9.0) == Approx(3.0));
}

TEST_CASE("custom transforms are validated at construction") {
  const auto cube = Transform::from_function(
      "cube", [](double x) { return x * x * x; }, [](double y) { return std::cbrt(y); }, Monotonicity::kIncreasing);
  CHECK(cube.d1(2.0) == Approx(12.0).epsilon(1e-5));
  CHECK(cube.d2(2.0) == Approx(12.0).epsilon(1e-5));

  // Wrong declared direction.
  CHECK_THROWS_AS(Transform::from_function(
                      "cube", [](double x) { return x * x * x; }, [](double y) { return std::cbrt(y); },
                      Monotonicity::kDecreasing),
                  NumericError);
  // Inverse that does not invert.
  CHECK_THROWS_AS(Transform::from_function(
                      "square", [](double x) { return x * x; }, [](double y) { return y / 2; }, Monotonicity::kIncreasing),
                  NumericError);
  // Analytic derivative that disagrees with differences.
  Transform::Parts bad;
  bad.label = "bad";
  bad.eval = [](double x) { return x * x; };
  bad.d1 = [](double x) { return 3 * x; };
  bad.d2 = [](double) { return 2.0; };
  bad.inverse = [](double y) { return std::sqrt(y); };
  CHECK_THROWS_AS(Transform(bad), NumericError);
}

TEST_CASE("condition check: exp/exp holds with zero product margin") {
  const auto rep = check_convexity_conditions(make_exp(), make_exp(), ConditionVariant::kConvexCase);
  CHECK(rep.condition_a_holds);
  CHECK(rep.condition_b_holds);
  CHECK(rep.worst_violation_b == 0.0);
  CHECK(rep.grid_spec == "64 log-spaced points over [0.001, 1000]");
}

TEST_CASE("condition check: square roots hold in the concave case") {
  const auto rep = check_convexity_conditions(make_power(0.5), make_power(0.5), ConditionVariant::kConcaveCase);
  CHECK(rep.holds());
  CHECK_FALSE(check_convexity_conditions(make_power(0.5), make_power(0.5), ConditionVariant::kConvexCase).holds());
}

TEST_CASE("condition check: identity phi fails the product condition") {
  for (const Transform& psi : {make_exp(), make_power(0.5), make_power(-2.0), make_log_shift()}) {
    const auto rep = check_convexity_conditions(make_power(1.0), psi, ConditionVariant::kConvexCase);
    CHECK(rep.condition_a_holds);
    CHECK_FALSE(rep.condition_b_holds);
    CHECK(rep.worst_violation > 0.0);
  }
}

TEST_CASE("condition check: log-shift with x^(1/p), p >= 2, holds in the concave case") {
  for (double p : {2.0, 3.0, 5.0}) {
    CHECK(check_convexity_conditions(make_log_shift(), make_power(1.0 / p), ConditionVariant::kConcaveCase).holds());
  }
}

TEST_CASE("condition check validates its grid") {
  CHECK_THROWS_AS(check_convexity_conditions(make_exp(), make_exp(), ConditionVariant::kConvexCase, {0.0, 1.0, 8, true}),
                  ParameterError);
}

TEST_CASE("classify_pq worked examples") {
  CHECK(classify_pq(-1, -1) == PQRegion::kA0);
  CHECK(classify_pq(-1, 0.5) == PQRegion::kA1);
  CHECK(classify_pq(2, 2) == PQRegion::kA3);
  CHECK(classify_pq(1.5, 2) == PQRegion::kNone);
  CHECK(classify_pq(0.5, -1) == PQRegion::kA2);
  CHECK(std::string(to_string(classify_pq(2, 2))) == "A3");
  CHECK_THROWS_AS(classify_pq(0, 1), ParameterError);
}

namespace {

// Distance-like margin from every region boundary: p = 0, q = 0, p = 1, q = 1
// and the curve 1/p + 1/q = 1, i.e. (p - 1)(q - 1) = 1.
bool away_from_boundaries(double p, double q, double eps) {
  if (std::abs(p) < eps || std::abs(q) < eps || std::abs(p - 1) < eps || std::abs(q - 1) < eps) return false;
  // Distance to the hyperbola (p-1)(q-1) = 1, bounded below by |h| / |grad h|.
  const double h = (p - 1) * (q - 1) - 1;
  const double grad = std::hypot(q - 1, p - 1);
  return std::abs(h) / grad >= eps;
}

}  // namespace

TEST_CASE("classify_pq agrees with grid-evaluated conditions on 500 random pairs") {
  std::mt19937_64 g(2024);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  int tested = 0, disagreements = 0;
  while (tested < 500) {
    const double p = u(g), q = u(g);
    // Exponents 1/p, 1/q stay within [-10, 10].
    if (std::abs(p) < 0.1 || std::abs(q) < 0.1 || !away_from_boundaries(p, q, 1e-3)) continue;
    ++tested;
    const auto region = classify_pq(p, q);
    const auto [phi, psi] = power_pair(p, q);
    const bool convex = check_convexity_conditions(phi, psi, ConditionVariant::kConvexCase).holds();
    const bool concave = check_convexity_conditions(phi, psi, ConditionVariant::kConcaveCase).holds();
    const bool in_convex_regions = region == PQRegion::kA0 || region == PQRegion::kA1 || region == PQRegion::kA2;
    if (convex != in_convex_regions || concave != (region == PQRegion::kA3)) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("compare_transforms worked examples") {
  // Decreasing power to exp: g(x) = log(x^(1/q)) = q^-1 log x is convex.
  for (double q : {-0.5, -1.0, -3.0})
    CHECK(compare_transforms(make_power(1.0 / q), make_exp(), ConditionVariant::kConvexCase) ==
          TransformComparison::kPhi2Better);

  for (const Transform& t : {make_exp(), make_power(0.5), make_power(-2.0), make_log_shift()}) {
    CHECK(compare_transforms(t, t, ConditionVariant::kConvexCase) == TransformComparison::kPhi2Better);
    CHECK(compare_transforms(t, t, ConditionVariant::kConcaveCase) == TransformComparison::kPhi2Better);
  }

  // (p, q) in A1 with q* = p / (p - 1): g(x) = x^(q*/q) is convex.
  const double p = -2.0, q = 0.4, qstar = p / (p - 1.0);
  REQUIRE(classify_pq(p, q) == PQRegion::kA1);
  CHECK(compare_transforms(make_power(1.0 / q), make_power(1.0 / qstar), ConditionVariant::kConvexCase) ==
        TransformComparison::kPhi2Better);
  // The reverse direction gives a concave g.
  CHECK(compare_transforms(make_power(1.0 / qstar), make_power(1.0 / q), ConditionVariant::kConvexCase) ==
        TransformComparison::kUndetermined);
}

TEST_CASE("compare_transforms is transitive along q chains with fixed p") {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> pd(-4.0, -1.0), frac(0.3, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double p = pd(g), qstar = p / (p - 1.0);
    double qs[3] = {qstar * frac(g), qstar * frac(g), qstar * frac(g)};
    std::sort(std::begin(qs), std::end(qs));
    auto better = [](double qa, double qb) {
      return compare_transforms(make_power(1.0 / qa), make_power(1.0 / qb), ConditionVariant::kConvexCase) ==
             TransformComparison::kPhi2Better;
    };
    REQUIRE(better(qs[0], qs[1]));
    REQUIRE(better(qs[1], qs[2]));
    CHECK(better(qs[0], qs[2]));
  }
}

TEST_CASE("compare_transforms reports compositions that leave the range") {
  // The identity reaches values below 1, where log-shift has no inverse.
  CHECK_THROWS_AS(compare_transforms(make_power(1.0), make_log_shift(), ConditionVariant::kConvexCase), NumericError);
}
