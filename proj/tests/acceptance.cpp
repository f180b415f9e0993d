// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stord/cli.hpp"

using namespace stord;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(const char* id, bool pass, const std::string& detail, double secs) {
  if (!pass) ++failures;
  std::printf("%s %s  %s  [%.2f s]\n", id, pass ? "PASS" : "FAIL", detail.c_str(), secs);
  std::fflush(stdout);
}

template <class F>
void criterion(const char* id, F&& body) {
  const auto t0 = Clock::now();
  try {
    body(t0);
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what(), seconds_since(t0));
  }
}

// Exact integer evaluation of the three orders.
bool brute_majorize(std::vector<int> x, std::vector<int> y, MajorizationMode mode) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const std::size_t n = x.size();
  bool top_ok = true, bottom_ok = true;
  int tx = 0, ty = 0, bx = 0, by = 0;
  for (std::size_t j = 0; j < n; ++j) {
    tx += x[n - 1 - j];
    ty += y[n - 1 - j];
    bx += x[j];
    by += y[j];
    top_ok = top_ok && tx <= ty;
    bottom_ok = bottom_ok && bx >= by;
  }
  switch (mode) {
    case MajorizationMode::kFull: return top_ok && tx == ty;
    case MajorizationMode::kWeakSub: return top_ok;
    case MajorizationMode::kWeakSup: return bottom_ok;
  }
  return false;
}

std::vector<std::vector<int>> all_vectors(std::size_t n) {
  std::vector<std::vector<int>> out;
  std::vector<int> v(n, 0);
  while (true) {
    out.push_back(v);
    std::size_t i = 0;
    while (i < n && ++v[i] > 4) v[i++] = 0;
    if (i == n) break;
  }
  return out;
}

struct CliRun {
  int code;
  std::string out;
};

CliRun cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "stord");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str()};
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

int main() {
  criterion("AC1", [](Clock::time_point t0) {
    std::size_t pairs = 0, disagreements = 0;
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto vs = all_vectors(n);
      std::vector<WeightVector> ws;
      for (const auto& v : vs) ws.emplace_back(std::vector<double>(v.begin(), v.end()));
      for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = 0; j < vs.size(); ++j) {
          ++pairs;
          for (auto mode : {MajorizationMode::kFull, MajorizationMode::kWeakSub, MajorizationMode::kWeakSup})
            if (check_majorize(ws[i], ws[j], mode) != brute_majorize(vs[i], vs[j], mode)) ++disagreements;
        }
    }
    const double secs = seconds_since(t0);
    report("AC1", disagreements == 0 && secs < 60.0,
           "majorization vs integer brute force: " + std::to_string(pairs) + " pairs x 3 modes, " +
               std::to_string(disagreements) + " disagreements (limit 0, < 60 s)",
           secs);
  });

  criterion("AC2", [](Clock::time_point t0) {
    std::mt19937_64 g(2024);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    int tested = 0, disagreements = 0;
    while (tested < 500) {
      const double p = u(g), q = u(g);
      if (std::abs(p) < 0.1 || std::abs(q) < 0.1) continue;  // exponents 1/p, 1/q within [-10, 10]
      const double eps = 1e-3;
      if (std::abs(p) < eps || std::abs(q) < eps || std::abs(p - 1) < eps || std::abs(q - 1) < eps) continue;
      const double h = (p - 1) * (q - 1) - 1;
      if (std::abs(h) / std::hypot(p - 1, q - 1) < eps) continue;
      ++tested;
      const auto region = classify_pq(p, q);
      const auto [phi, psi] = power_pair(p, q);
      const bool convex = check_convexity_conditions(phi, psi, ConditionVariant::kConvexCase).holds();
      const bool concave = check_convexity_conditions(phi, psi, ConditionVariant::kConcaveCase).holds();
      const bool in_convex = region == PQRegion::kA0 || region == PQRegion::kA1 || region == PQRegion::kA2;
      if (convex != in_convex || concave != (region == PQRegion::kA3)) ++disagreements;
    }
    report("AC2", disagreements == 0,
           "region vs grid conditions: 500 pairs, " + std::to_string(disagreements) + " disagreements (limit 0)",
           seconds_since(t0));
  });

  criterion("AC3", [](Clock::time_point t0) {
    const DensitySpec e = GeneralizedGamma(1, 1, 1).to_density_spec();
    const auto [fa, fb] = convolve_pair({e, e}, WeightVector{4, 1}, {e, e}, WeightVector{2, 2});
    double worst = -1.0;
    for (std::size_t i = 0; i < fa.size(); ++i) worst = std::max(worst, fa.values()[i] - fb.values()[i]);
    const double secs = seconds_since(t0);
    report("AC3", worst <= 1e-6 && secs < 5.0,
           "exp weights (4,1) vs (2,2): max(F_a - F_b) = " + fmt(worst) + " over " + std::to_string(fa.size()) +
               " nodes (limit 1e-6, < 5 s)",
           secs);
  });

  criterion("AC4", [](Clock::time_point t0) {
    const auto rep = run_counterexample(1.0, {2, 1, 1}, {1.5, 1.5, 1});
    const double secs = seconds_since(t0);
    const auto& ov = *rep.oracle_verdict;
    const double mean_gap = std::abs(rep.extras.at("mean_a") - rep.extras.at("mean_b"));
    const bool pass =
        ov.relation == StRelation::kCrossing && ov.crossing_count == 1 && mean_gap < 1e-8 && secs < 10.0;
    report("AC4", pass,
           std::string("gamma(1) a=(2,1,1) b=(1.5,1.5,1): ") + to_string(ov.relation) + ", crossings " +
               std::to_string(ov.crossing_count.value_or(-1)) + ", |mean_a - mean_b| = " + fmt(mean_gap) +
               " (oracle means " + fmt(rep.extras.at("oracle_mean_a")) + ", " + fmt(rep.extras.at("oracle_mean_b")) +
               ") (< 10 s)",
           secs);
  });

  std::string suite_out;
  criterion("AC5", [&](Clock::time_point t0) {
    const auto r = cli_run({"suite", "--seed", "42", "--per-preset", "20", "--n-samples", "100000", "--delta", "0.01"});
    const double secs = seconds_since(t0);
    suite_out = r.out;
    const json s = json::parse(r.out)["result"]["summary"];
    const auto evaluated = s["evaluated"].get<std::size_t>(), inconsistent = s["inconsistent"].get<std::size_t>();
    const auto skipped = s["skipped"].get<std::size_t>(), errors = s["errors"].get<std::size_t>();
    const bool pass = r.code == 0 && evaluated >= 200 && inconsistent == 0 && secs < 900.0;
    report("AC5",
           pass,
           "suite: " + std::to_string(s["total"].get<std::size_t>()) + " scenarios, " + std::to_string(evaluated) +
               " evaluated, " + std::to_string(skipped) + " skipped, " + std::to_string(errors) + " errors, " +
               std::to_string(inconsistent) + " inconsistent (need >= 200 evaluated, 0 inconsistent, < 900 s)",
           secs);
  });

  criterion("AC6", [](Clock::time_point t0) {
    std::mt19937_64 g(606);
    std::uniform_real_distribution<double> pu(0.5, 3.0), au(0.5, 4.0), lu(0.5, 3.0);
    int contradictions = 0;
    for (int k = 0; k < 50; ++k) {
      const double p = pu(g), a1 = au(g), a2 = au(g), l1 = lu(g), l2 = lu(g);
      // Odd k share lambda, even k share alpha.
      const GeneralizedGamma d1(p, a1, l1);
      const GeneralizedGamma d2 = k % 2 ? GeneralizedGamma(p, a2, l1) : GeneralizedGamma(p, a1, l2);
      const auto lr = lr_compare(d1, d2);
      if (lr.verdict != LrVerdict::kD1Greater && lr.verdict != LrVerdict::kD2Greater) {
        ++contradictions;
        continue;
      }
      const bool first = lr.verdict == LrVerdict::kD1Greater;
      const auto v = st_compare_empirical(sample(first ? d1 : d2, 100000, 2 * k), sample(first ? d2 : d1, 100000, 2 * k + 1),
                                          0.01);
      if (v.relation == StRelation::kBDominates || v.relation == StRelation::kCrossing) ++contradictions;
    }
    report("AC6", contradictions == 0,
           "lr => st: 50 pairs, " + std::to_string(contradictions) + " contradictions (limit 0)", seconds_since(t0));
  });

  criterion("AC7", [](Clock::time_point t0) {
    const std::size_t n = 100000, nodes = n;
    const double band = dkw_band(n, 1e-3);
    std::mt19937_64 g(707);
    std::uniform_real_distribution<double> pu(0.3, 4.0), au(0.3, 6.0), lu(0.2, 5.0);
    double worst = 0.0;
    int outside = 0;
    for (int k = 0; k < 20; ++k) {
      const GeneralizedGamma d(pu(g), au(g), lu(g));
      auto xs = sample(d, n, 7000 + k);
      std::sort(xs.begin(), xs.end());
      // Quadrature CDF at every order statistic, accumulated interval by interval.
      std::vector<double> grid(nodes + 1), F(nodes + 1);
      for (std::size_t j = 0; j <= nodes; ++j) grid[j] = xs[std::min(n - 1, j * n / nodes)];
      auto pdf = [&](double x) { return x > 0.0 ? std::exp(d.log_density(x)) : 0.0; };
      F[0] = integrate(pdf, 0.0, grid[0], 0.5 * grid[0]);
      for (std::size_t j = 1; j <= nodes; ++j)
        F[j] = F[j - 1] + (grid[j] > grid[j - 1] ? integrate(pdf, grid[j - 1], grid[j], 0.5 * (grid[j - 1] + grid[j])) : 0.0);
      // Sup bound: between nodes both CDFs are monotone.
      auto Fn_below = [&](double x) {
        return static_cast<double>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin()) / static_cast<double>(n);
      };
      auto Fn_at = [&](double x) {
        return static_cast<double>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) / static_cast<double>(n);
      };
      double gap = std::max(Fn_below(grid[0]), F[0]);
      for (std::size_t j = 1; j <= nodes; ++j)
        gap = std::max({gap, Fn_below(grid[j]) - F[j - 1], F[j] - Fn_at(grid[j - 1])});
      gap = std::max(gap, std::abs(1.0 - F[nodes]));
      worst = std::max(worst, gap);
      if (gap > band) ++outside;
    }
    report("AC7", outside == 0,
           "sampler ECDF vs quadrature CDF: 20 sets, worst sup gap " + fmt(worst) + " vs DKW band " + fmt(band) + ", " +
               std::to_string(outside) + " outside",
           seconds_since(t0));
  });

  criterion("AC8", [&](Clock::time_point t0) {
    const auto r = cli_run({"suite", "--seed", "42", "--per-preset", "20", "--n-samples", "100000", "--delta", "0.01"});
    const bool same = !suite_out.empty() && r.out == suite_out;
    report("AC8", same,
           "repeated suite run (seed 42, 200 scenarios): " + std::to_string(r.out.size()) + " bytes, " +
               (same ? "byte-identical" : "differs"),
           seconds_since(t0));
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
