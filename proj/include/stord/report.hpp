#pragma once

// JSON encoding of scenarios and reports, and decoding of scenario files.
//
// Transforms are written as "exp", "logshift" or ["power", r]; distributions
// as ["gengamma", p, alpha, lambda] or ["invgengamma", p, alpha, lambda]
// (the reciprocal of a generalized gamma variable).

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "stord/harness.hpp"

namespace stord {

using nlohmann::json;

inline constexpr const char* kToolName = "stord";
inline constexpr const char* kToolVersion = "1.0.0";

class ConfigError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

// ---- encoding ---------------------------------------------------------------

inline json encode(const Transform& t) {
  switch (t.kind()) {
    case TransformKind::kExp: return "exp";
    case TransformKind::kLogShift: return "logshift";
    case TransformKind::kPower: return json::array({"power", t.parameter()});
    case TransformKind::kCustom: return json::array({"custom", t.label()});
  }
  return nullptr;
}

inline json encode(const ComponentDist& d) {
  const auto& g = d.base();
  const char* kind = d.kind() == ComponentDist::Kind::kGenGamma ? "gengamma" : "invgengamma";
  return json::array({kind, g.p(), g.alpha(), g.lambda()});
}

inline json encode(const WeightVector& w) { return w.to_vector(); }

inline const char* variant_name(ConditionVariant v) {
  return v == ConditionVariant::kConvexCase ? "convex" : "concave";
}

inline json encode(const Scenario& s) {
  json dists = json::array();
  for (const auto& d : s.dists) dists.push_back(encode(d));
  return {{"name", s.name},
          {"dists", dists},
          {"phi", encode(s.phi)},
          {"psi", encode(s.psi)},
          {"variant", variant_name(s.variant)},
          {"a", encode(s.a)},
          {"b", encode(s.b)},
          {"premise_mode", to_string(s.premise_mode)},
          {"n_samples", s.n_samples},
          {"seed", s.seed},
          {"delta", s.delta}};
}

inline json encode(const Check& c) { return {{"status", to_string(c.status)}, {"witness", c.witness}}; }

inline json encode(const HypothesisReport& h) {
  return {{"majorization_ok", encode(h.majorization_ok)},
          {"conditions_ok", encode(h.conditions_ok)},
          {"logconcavity_ok", encode(h.logconcavity_ok)},
          {"lr_chain_ok", encode(h.lr_chain_ok)}};
}

inline json encode(const OrderVerdict& v) {
  json j{{"relation", to_string(v.relation)},
         {"max_pos_dev", v.max_pos_dev},
         {"max_neg_dev", v.max_neg_dev},
         {"band", v.band},
         {"crossing_count", nullptr},
         {"meta", v.meta}};
  if (v.crossing_count) j["crossing_count"] = *v.crossing_count;
  return j;
}

inline json encode(const TheoremReport& r) {
  json j{{"scenario", r.scenario},
         {"theorem", r.theorem},
         {"status", r.status == TheoremStatus::kEvaluated ? "EVALUATED" : "SKIPPED"},
         {"predicted", to_string(r.predicted)},
         {"hypothesis", encode(r.hypothesis)},
         {"coeff_a", nullptr},
         {"coeff_b", nullptr},
         {"verdict", nullptr},
         {"oracle_verdict", nullptr},
         {"oracle_note", r.oracle_note},
         {"consistent", r.consistent},
         {"extras", r.extras}};
  if (r.coeff_a) j["coeff_a"] = encode(*r.coeff_a);
  if (r.coeff_b) j["coeff_b"] = encode(*r.coeff_b);
  if (r.verdict) j["verdict"] = encode(*r.verdict);
  if (r.oracle_verdict) j["oracle_verdict"] = encode(*r.oracle_verdict);
  return j;
}

inline json encode(const ConditionReport& c) {
  return {{"holds", c.holds()},
          {"condition_a_holds", c.condition_a_holds},
          {"condition_b_holds", c.condition_b_holds},
          {"worst_violation_a", c.worst_violation_a},
          {"worst_violation_b", c.worst_violation_b},
          {"worst_violation", c.worst_violation},
          {"worst_point", {c.worst_point.first, c.worst_point.second}},
          {"grid", c.grid_spec}};
}

inline json encode(const LogConcavityResult& r) {
  json j{{"verdict", to_string(r.verdict)}, {"basis", r.basis}, {"witness", nullptr}};
  if (r.witness) j["witness"] = *r.witness;
  return j;
}

inline json encode(const LrResult& r) {
  json j{{"verdict", to_string(r.verdict)}, {"basis", r.basis}, {"witness", nullptr}};
  if (r.witness) j["witness"] = {r.witness->first, r.witness->second};
  return j;
}

inline json encode(const SuiteResult& res, const std::vector<Scenario>& scenarios) {
  json entries = json::array();
  for (std::size_t i = 0; i < res.entries.size(); ++i) {
    json e{{"scenario", encode(scenarios[i])}, {"report", nullptr}, {"error", res.entries[i].error}};
    if (res.entries[i].report) e["report"] = encode(*res.entries[i].report);
    entries.push_back(std::move(e));
  }
  return {{"summary",
           {{"total", res.entries.size()},
            {"evaluated", res.evaluated},
            {"skipped", res.skipped},
            {"errors", res.errors},
            {"inconsistent", res.inconsistent}}},
          {"entries", entries}};
}

// Report envelope: tool identity, the resolved configuration, and the body.
inline json envelope(const std::string& command, const json& config, const json& body) {
  return {{"tool", kToolName}, {"version", kToolVersion}, {"command", command}, {"config", config}, {"result", body}};
}

// ---- decoding ---------------------------------------------------------------

namespace detail {

[[noreturn]] inline void config_fail(const std::string& field, const std::string& what) {
  throw ConfigError("field '" + field + "': " + what);
}

inline double number_at(const json& j, const std::string& field) {
  if (!j.is_number()) config_fail(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) config_fail(field, "must be finite");
  return v;
}

}  // namespace detail

inline Transform decode_transform(const json& j, const std::string& field) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "exp") return make_exp();
    if (s == "logshift") return make_log_shift();
    detail::config_fail(field, "unknown transform '" + s + "'");
  }
  if (j.is_array() && j.size() == 2 && j[0].is_string() && j[0].get<std::string>() == "power") {
    try {
      return make_power(detail::number_at(j[1], field));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      detail::config_fail(field, e.what());
    }
  }
  detail::config_fail(field, "expected \"exp\", \"logshift\" or [\"power\", r]");
}

inline ComponentDist decode_dist(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 4 || !j[0].is_string())
    detail::config_fail(field, "expected [\"gengamma\", p, alpha, lambda]");
  const auto kind = j[0].get<std::string>();
  const double p = detail::number_at(j[1], field), alpha = detail::number_at(j[2], field),
               lambda = detail::number_at(j[3], field);
  try {
    if (kind == "gengamma") return ComponentDist::gengamma(p, alpha, lambda);
    if (kind == "invgengamma") return ComponentDist::inv_gengamma(p, alpha, lambda);
  } catch (const Error& e) {
    detail::config_fail(field, e.what());
  }
  detail::config_fail(field, "unknown distribution '" + kind + "'");
}

inline WeightVector decode_weights(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) detail::config_fail(field, "expected a nonempty array of numbers");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(detail::number_at(j[i], field + "[" + std::to_string(i) + "]"));
  return WeightVector(std::move(v));
}

inline ConditionVariant decode_variant(const std::string& s, const std::string& field = "variant") {
  if (s == "convex") return ConditionVariant::kConvexCase;
  if (s == "concave") return ConditionVariant::kConcaveCase;
  detail::config_fail(field, "expected \"convex\" or \"concave\"");
}

inline MajorizationMode decode_mode(const std::string& s, const std::string& field = "premise_mode") {
  if (s == "m") return MajorizationMode::kFull;
  if (s == "sub") return MajorizationMode::kWeakSub;
  if (s == "sup") return MajorizationMode::kWeakSup;
  detail::config_fail(field, "expected \"m\", \"sub\" or \"sup\"");
}

// Missing optional fields take the documented defaults.
inline Scenario decode_scenario(const json& j) {
  if (!j.is_object()) throw ConfigError("scenario: expected a JSON object");
  for (const char* f : {"dists", "phi", "psi", "variant", "a", "b"})
    if (!j.contains(f)) detail::config_fail(f, "missing");
  if (!j["dists"].is_array() || j["dists"].empty()) detail::config_fail("dists", "expected a nonempty array");
  std::vector<ComponentDist> dists;
  for (std::size_t i = 0; i < j["dists"].size(); ++i)
    dists.push_back(decode_dist(j["dists"][i], "dists[" + std::to_string(i) + "]"));
  if (!j["variant"].is_string()) detail::config_fail("variant", "expected a string");

  Scenario s{j.value("name", std::string("scenario")),
             std::move(dists),
             decode_transform(j["phi"], "phi"),
             decode_transform(j["psi"], "psi"),
             decode_variant(j["variant"].get<std::string>()),
             decode_weights(j["a"], "a"),
             decode_weights(j["b"], "b")};
  if (j.contains("premise_mode")) {
    if (!j["premise_mode"].is_string()) detail::config_fail("premise_mode", "expected a string");
    s.premise_mode = decode_mode(j["premise_mode"].get<std::string>());
  }
  if (j.contains("n_samples")) {
    if (!j["n_samples"].is_number_unsigned()) detail::config_fail("n_samples", "expected a nonnegative integer");
    s.n_samples = j["n_samples"].get<std::size_t>();
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) detail::config_fail("seed", "expected a nonnegative integer");
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("delta")) s.delta = detail::number_at(j["delta"], "delta");
  try {
    s.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  return s;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace stord
