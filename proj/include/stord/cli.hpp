#pragma once

// Command-line front end. Exit codes: 0 success, 1 usage or domain error,
// 2 inconsistent verdict or failed hypothesis.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stord/harness.hpp"
#include "stord/report.hpp"

namespace stord::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRefuted = 2;
inline constexpr const char* kOutputDirEnv = "STORD_OUTPUT_DIR";

// "exp", "logshift", "power:r"
inline Transform parse_transform(const std::string& s, const std::string& field) {
  if (s.rfind("power:", 0) == 0) return decode_transform(json::array({"power", std::stod(s.substr(6))}), field);
  return decode_transform(json(s), field);
}

// "gengamma:p:alpha:lambda" or "invgengamma:p:alpha:lambda"
inline ComponentDist parse_dist(const std::string& s, const std::string& field) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
  if (parts.size() != 4) throw ConfigError("field '" + field + "': expected kind:p:alpha:lambda");
  json j = json::array({parts[0]});
  for (std::size_t i = 1; i < 4; ++i) {
    try {
      j.push_back(std::stod(parts[i]));
    } catch (const std::exception&) {
      throw ConfigError("field '" + field + "': '" + parts[i] + "' is not a number");
    }
  }
  return decode_dist(j, field);
}

inline VariableTransform parse_variable(const std::string& s) {
  if (s == "identity") return VariableTransform::identity();
  if (s == "log") return VariableTransform::log();
  if (s.rfind("power:", 0) == 0) return VariableTransform::power(std::stod(s.substr(6)));
  throw ConfigError("field 'transform': expected identity, log or power:r");
}

inline std::vector<Preset> parse_presets(const std::vector<std::string>& names) {
  if (names.empty()) return all_presets();
  std::vector<Preset> out;
  for (const auto& n : names) {
    auto p = preset_from_string(n);
    if (!p) throw ConfigError("field 'presets': unknown preset '" + n + "'");
    out.push_back(*p);
  }
  return out;
}

struct Output {
  std::string path;  // empty: standard output
  std::string format = "json";
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(int argc, const char* const* argv) {
    CLI::App app{"Majorization and stochastic-order verification toolkit", kToolName};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("-o,--output", output_.path, "Report path (default: $" + std::string(kOutputDirEnv) + "/<command>.<ext> or stdout)");
    format_opt_ = app.add_option("--format", output_.format, "Output format (convolve defaults to csv)")
                      ->check(CLI::IsMember({"json", "csv"}));

    add_major(app);
    add_chain(app);
    add_conditions(app);
    add_classify(app);
    add_logconcave(app);
    add_lr(app);
    add_convolve(app);
    add_verify(app);
    add_counterexample(app);
    add_suite(app);

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out_, err_);
      return code == 0 ? kExitOk : kExitUsage;
    }
    try {
      return action_();
    } catch (const OrderError& e) {
      err_ << "error: " << e.what() << '\n';
      return kExitRefuted;
    } catch (const Error& e) {
      err_ << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::invalid_argument& e) {
      err_ << "error: malformed number (" << e.what() << ")\n";
      return kExitUsage;
    }
  }

 private:
  void emit_json(const std::string& command, const json& config, const json& body) {
    require_format("json", command);
    write(command, "json", envelope(command, config, body).dump(2) + "\n");
  }

  void emit_text(const std::string& command, const std::string& text) { write(command, "txt", text + "\n"); }

  void require_format(const std::string& fmt, const std::string& command) const {
    if (output_.format != fmt) throw ConfigError("field 'format': " + command + " does not support " + output_.format);
  }

  void write(const std::string& command, const std::string& ext, const std::string& text) {
    std::string path = output_.path;
    if (path.empty()) {
      if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir)
        path = (std::filesystem::path(dir) / (command + "." + ext)).string();
    }
    if (path.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("field 'output': cannot write '" + path + "'");
    f << text;
  }

  // major --x 2,2,2 --y 3,2,1 --mode m : is x below y?
  void add_major(CLI::App& app) {
    auto* sub = app.add_subcommand("major", "Test x majorized (m), submajorized (sub) or supmajorized (sup) by y");
    auto o = std::make_shared<MajorOpts>();
    sub->add_option("--x", o->x, "Lower vector")->required()->delimiter(',');
    sub->add_option("--y", o->y, "Upper vector")->required()->delimiter(',');
    sub->add_option("--mode", o->mode, "m, sub or sup")->check(CLI::IsMember({"m", "sub", "sup"}));
    sub->add_option("--tol", o->tol, "Relative tolerance")->check(CLI::Range(0.0, 1e-3));
    sub->callback([this, o] {
      action_ = [this, o] {
        const bool r = check_majorize(WeightVector(o->x), WeightVector(o->y), decode_mode(o->mode, "mode"), o->tol);
        emit_text("major", r ? "true" : "false");
        return kExitOk;
      };
    });
  }

  void add_chain(CLI::App& app) {
    auto* sub = app.add_subcommand("chain", "T-transform chain for x majorized by y, or a weak completion");
    auto o = std::make_shared<ChainOpts>();
    sub->add_option("--x", o->x, "Lower vector (completion: u)")->required()->delimiter(',');
    sub->add_option("--y", o->y, "Upper vector (completion: v)")->required()->delimiter(',');
    sub->add_option("--weak", o->weak, "Build a weak completion instead (sub or sup)")
        ->check(CLI::IsMember({"sub", "sup"}));
    sub->callback([this, o] {
      action_ = [this, o] {
        const WeightVector x(o->x), y(o->y);
        json config{{"x", o->x}, {"y", o->y}, {"weak", o->weak}};
        if (!o->weak.empty()) {
          const WeightVector c = weak_completion(x, y, decode_mode(o->weak, "weak"));
          emit_json("chain", config, {{"completion", encode(c)}});
        } else {
          const TChain chain = t_transform_chain(x, y);
          json steps = json::array();
          for (const auto& s : chain.steps) steps.push_back(encode(s));
          emit_json("chain", config, {{"steps", steps}, {"moves", chain.size() - 1}});
        }
        return kExitOk;
      };
    });
  }

  void add_conditions(CLI::App& app) {
    auto* sub = app.add_subcommand("conditions", "Check the phi/psi Hessian conditions on a grid");
    auto o = std::make_shared<ConditionOpts>();
    sub->add_option("--phi", o->phi, "exp, logshift or power:r")->required();
    sub->add_option("--psi", o->psi, "exp, logshift or power:r")->required();
    sub->add_option("--variant", o->variant, "convex or concave")->check(CLI::IsMember({"convex", "concave"}));
    sub->add_option("--grid-lo", o->grid.lo)->check(CLI::PositiveNumber);
    sub->add_option("--grid-hi", o->grid.hi)->check(CLI::PositiveNumber);
    sub->add_option("--grid-points", o->grid.points)->check(CLI::Range(2, 4096));
    sub->callback([this, o] {
      action_ = [this, o] {
        const auto rep = check_convexity_conditions(parse_transform(o->phi, "phi"), parse_transform(o->psi, "psi"),
                                                    decode_variant(o->variant), o->grid);
        json config{{"phi", o->phi}, {"psi", o->psi}, {"variant", o->variant}, {"grid", o->grid.describe()}};
        emit_json("conditions", config, encode(rep));
        return kExitOk;
      };
    });
  }

  void add_classify(CLI::App& app) {
    auto* sub = app.add_subcommand("classify", "Region A0..A3 of a power pair (p, q)");
    auto o = std::make_shared<std::pair<double, double>>();
    sub->add_option("--p", o->first)->required();
    sub->add_option("--q", o->second)->required();
    sub->callback([this, o] {
      action_ = [this, o] {
        emit_text("classify", to_string(classify_pq(o->first, o->second)));
        return kExitOk;
      };
    });
  }

  void add_logconcave(CLI::App& app) {
    auto* sub = app.add_subcommand("logconcave", "Log-concavity of a transformed generalized gamma variable");
    auto o = std::make_shared<std::pair<std::string, std::string>>("", "identity");
    sub->add_option("--dist", o->first, "gengamma:p:alpha:lambda")->required();
    sub->add_option("--transform", o->second, "identity, log or power:r");
    sub->callback([this, o] {
      action_ = [this, o] {
        const ComponentDist d = parse_dist(o->first, "dist");
        if (d.kind() != ComponentDist::Kind::kGenGamma) throw ConfigError("field 'dist': expected gengamma");
        const auto r = log_concavity_classify(d.base(), parse_variable(o->second));
        emit_json("logconcave", {{"dist", o->first}, {"transform", o->second}}, encode(r));
        return kExitOk;
      };
    });
  }

  void add_lr(CLI::App& app) {
    auto* sub = app.add_subcommand("lr", "Likelihood ratio comparison of two distributions");
    auto o = std::make_shared<std::pair<std::string, std::string>>();
    sub->add_option("--d1", o->first)->required();
    sub->add_option("--d2", o->second)->required();
    sub->callback([this, o] {
      action_ = [this, o] {
        const auto r = lr_compare(parse_dist(o->first, "d1"), parse_dist(o->second, "d2"));
        emit_json("lr", {{"d1", o->first}, {"d2", o->second}}, encode(r));
        return kExitOk;
      };
    });
  }

  void add_convolve(CLI::App& app) {
    auto* sub = app.add_subcommand("convolve", "CDF of a weighted sum of independent variables (CSV by default)");
    auto o = std::make_shared<ConvolveOpts>();
    sub->add_option("--dist", o->dists, "Repeat once per term: gengamma:p:alpha:lambda")->required();
    sub->add_option("--weights", o->weights)->required()->delimiter(',');
    sub->add_option("--refine-tol", o->grid.refine_tol)->check(CLI::Range(1e-12, 1e-2));
    sub->add_option("--initial-points", o->grid.initial_points)->check(CLI::Range(64, 1 << 22));
    sub->callback([this, o] {
      action_ = [this, o] {
        if (o->dists.size() != o->weights.size()) throw ConfigError("field 'weights': one weight per --dist required");
        std::vector<DensitySpec> specs;
        for (std::size_t i = 0; i < o->dists.size(); ++i)
          specs.push_back(parse_dist(o->dists[i], "dist[" + std::to_string(i) + "]").density_spec());
        const NumericCDF cdf = convolve_weighted(specs, WeightVector(o->weights), o->grid);
        if (format_opt_->count() == 0 || output_.format == "csv") {
          std::ostringstream os;
          write_csv(os, cdf);
          write("convolve", "csv", os.str());
        } else {
          json config{{"dists", o->dists}, {"weights", o->weights}, {"refine_tol", o->grid.refine_tol},
                      {"initial_points", o->grid.initial_points}};
          emit_json("convolve", config,
                    {{"abscissa", cdf.grid()}, {"value", cdf.values()}, {"mean", cdf.mean()}, {"tail_tol", cdf.tail_tol()}});
        }
        return kExitOk;
      };
    });
  }

  void add_verify(CLI::App& app) {
    auto* sub = app.add_subcommand("verify", "Check hypotheses and test the conclusion for a scenario file");
    auto o = std::make_shared<VerifyOpts>();
    sub->add_option("scenario", o->path, "Scenario JSON file")->required();
    sub->add_option("--theorem", o->theorem, "auto, iid or noniid")->check(CLI::IsMember({"auto", "iid", "noniid"}));
    sub->add_option("--seed", o->seed);
    sub->add_option("--n-samples", o->n_samples)->check(CLI::Range(std::size_t{1000}, std::size_t{100000000}));
    sub->add_option("--delta", o->delta)->check(CLI::Range(1e-9, 0.5));
    sub->callback([this, o] {
      action_ = [this, o] {
        Scenario s = decode_scenario(read_json_file(o->path));
        if (o->seed) s.seed = *o->seed;
        if (o->n_samples) s.n_samples = *o->n_samples;
        if (o->delta) s.delta = *o->delta;
        json config = encode(s);
        config["theorem"] = o->theorem;
        try {
          TheoremReport r;
          if (o->theorem == "iid") r = verify_iid_theorem(s);
          else if (o->theorem == "noniid") r = verify_noniid_theorem(s);
          else r = verify_scenario(s);
          emit_json("verify", config, encode(r));
          return r.consistent ? kExitOk : kExitRefuted;
        } catch (const PreconditionError& e) {
          emit_json("verify", config, {{"error", e.what()}, {"hypothesis", encode(check_hypotheses(s))}});
          return kExitRefuted;
        }
      };
    });
  }

  void add_counterexample(CLI::App& app) {
    auto* sub = app.add_subcommand("counterexample", "Unique-crossing instance for gamma weighted sums");
    auto o = std::make_shared<CounterOpts>();
    sub->add_option("--alpha", o->alpha)->required();
    sub->add_option("--a", o->a)->required()->delimiter(',');
    sub->add_option("--b", o->b)->required()->delimiter(',');
    sub->add_option("--seed", o->seed);
    sub->add_option("--n-samples", o->n_samples)->check(CLI::Range(std::size_t{1000}, std::size_t{100000000}));
    sub->add_option("--delta", o->delta)->check(CLI::Range(1e-9, 0.5));
    sub->callback([this, o] {
      action_ = [this, o] {
        const auto r = run_counterexample(o->alpha, WeightVector(o->a), WeightVector(o->b), o->n_samples, o->seed, o->delta);
        json config{{"alpha", o->alpha}, {"a", o->a},         {"b", o->b},
                    {"seed", o->seed},   {"n_samples", o->n_samples}, {"delta", o->delta}};
        emit_json("counterexample", config, encode(r));
        return r.consistent ? kExitOk : kExitRefuted;
      };
    });
  }

  void add_suite(CLI::App& app) {
    auto* sub = app.add_subcommand("suite", "Run generated preset scenarios (or the given files) and aggregate reports");
    auto o = std::make_shared<SuiteOpts>();
    sub->add_option("--seed", o->cfg.master_seed, "Master seed");
    sub->add_option("--per-preset", o->cfg.per_preset)->check(CLI::Range(1, 100000));
    sub->add_option("--presets", o->presets, "Comma-separated preset names")->delimiter(',');
    sub->add_option("--n-samples", o->cfg.n_samples)->check(CLI::Range(std::size_t{1000}, std::size_t{100000000}));
    sub->add_option("--delta", o->cfg.delta)->check(CLI::Range(1e-9, 0.5));
    sub->add_option("--threads", o->cfg.threads, "Worker threads (0: all cores)");
    sub->add_option("--scenario", o->files, "Scenario files to run instead of generated presets");
    sub->callback([this, o] {
      action_ = [this, o] {
        SuiteConfig cfg = o->cfg;
        cfg.presets = parse_presets(o->presets);
        std::vector<Scenario> scenarios;
        json config;
        if (o->files.empty()) {
          scenarios = suite_scenarios(cfg);
          std::vector<std::string> names;
          for (Preset p : cfg.presets) names.push_back(to_string(p));
          config = {{"seed", cfg.master_seed}, {"per_preset", cfg.per_preset}, {"presets", names},
                    {"n_samples", cfg.n_samples}, {"delta", cfg.delta}};
        } else {
          for (const auto& f : o->files) scenarios.push_back(decode_scenario(read_json_file(f)));
          config = {{"scenario_files", o->files}};
        }
        const SuiteResult res = run_suite(scenarios, cfg.threads);
        emit_json("suite", config, encode(res, scenarios));
        return res.inconsistent == 0 ? kExitOk : kExitRefuted;
      };
    });
  }

  struct MajorOpts {
    std::vector<double> x, y;
    std::string mode = "m";
    double tol = kDefaultMajorizationTol;
  };
  struct ChainOpts {
    std::vector<double> x, y;
    std::string weak;
  };
  struct ConditionOpts {
    std::string phi, psi, variant = "convex";
    GridAxis grid;
  };
  struct ConvolveOpts {
    std::vector<std::string> dists;
    std::vector<double> weights;
    ConvolutionGrid grid;
  };
  struct VerifyOpts {
    std::string path, theorem = "auto";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n_samples;
    std::optional<double> delta;
  };
  struct CounterOpts {
    double alpha = 1.0;
    std::vector<double> a, b;
    std::uint64_t seed = 42;
    std::size_t n_samples = 100000;
    double delta = 0.01;
  };
  struct SuiteOpts {
    SuiteConfig cfg;
    std::vector<std::string> presets;
    std::vector<std::string> files;
  };

  std::ostream& out_;
  std::ostream& err_;
  Output output_;
  CLI::Option* format_opt_ = nullptr;
  std::function<int()> action_;
};

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return Runner(out, err).run(argc, argv);
}

}  // namespace stord::cli
