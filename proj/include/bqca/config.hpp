#ifndef BQCA_CONFIG_HPP
#define BQCA_CONFIG_HPP

// Experiment configuration: a JSON document describing lattice, boundary,
// initial state, program (rule / channel / sequence preset), step count and
// requested outputs.  docs/config.schema.json carries the formal schema;
// validation errors report the offending field path.

#include "bqca/channel.hpp"
#include "bqca/io.hpp"
#include "bqca/sequence.hpp"

#include <json.hpp>

#include <filesystem>
#include <set>
#include <variant>

namespace bqca {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class Engine { Pure, Density };

enum class OutputKind {
  P1Diagram,
  EntropyDiagram,
  RSeries,
  MixednessSeries,
  TangleSeries,
  SchmidtHistogram,
  Schedule
};

struct InitialTokens {
  std::string tokens;  // one of {0,1,+,-} per site
};
struct InitialSeed {
  int site = 0;
  Eigen::Vector2cd state{1, 0};
};

struct RuleProgram {
  Rule rule;
  std::string label;  // preset name or "custom"
};
struct ChannelProgram {
  NeighborhoodChannel channel;
  std::string label;
};
struct SequencePreset {
  std::string name;
};

struct ExperimentConfig {
  int n = 0;
  BoundaryConditions boundary;
  std::variant<InitialTokens, InitialSeed> initial;
  Engine engine = Engine::Pure;
  std::variant<RuleProgram, ChannelProgram, SequencePreset> program;
  int steps = 0;
  std::vector<OutputKind> outputs;
  nlohmann::json source;  // the parsed document, for hashing
};

inline const std::vector<std::pair<std::string, OutputKind>>& output_names() {
  static const std::vector<std::pair<std::string, OutputKind>> names = {
      {"p1-diagram", OutputKind::P1Diagram},
      {"entropy-diagram", OutputKind::EntropyDiagram},
      {"R-series", OutputKind::RSeries},
      {"mixedness-series", OutputKind::MixednessSeries},
      {"tangle-series", OutputKind::TangleSeries},
      {"schmidt-histogram", OutputKind::SchmidtHistogram},
      {"schedule", OutputKind::Schedule}};
  return names;
}

namespace cfg_detail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path.empty() ? "$" : path, msg);
}

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() || path == "$" ? key : path + "." + key;
}

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(join(path, key), "missing required field");
  return *it;
}

inline int require_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

inline double require_num(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

inline std::string require_str(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

inline void reject_unknown(const json& j, const std::set<std::string>& known,
                           const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) fail(join(path, it.key()), "unknown field");
  }
}

inline RotationSpec parse_rotation_spec(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected {gamma, theta, phi}");
  reject_unknown(j, {"gamma", "theta", "phi"}, path);
  RotationSpec s;
  s.gamma = require_num(require(j, "gamma", path), path + ".gamma");
  s.theta = require_num(require(j, "theta", path), path + ".theta");
  s.phi = require_num(require(j, "phi", path), path + ".phi");
  return s;
}

inline Rule parse_rule(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected a rule object");
  if (j.contains("preset")) {
    reject_unknown(j, {"preset"}, path);
    std::string name = require_str(j.at("preset"), path + ".preset");
    if (name == "M1") return rule_m1();
    if (name == "M2") return rule_m2();
    if (name == "cluster-rule") return rule_cluster();
    fail(path + ".preset", "unknown rule preset '" + name + "' (M1, M2, cluster-rule)");
  }
  reject_unknown(j, {"u00", "u01", "u10", "u11"}, path);
  Rule r;
  r.u00 = parse_rotation_spec(require(j, "u00", path), path + ".u00").unitary();
  r.u01 = parse_rotation_spec(require(j, "u01", path), path + ".u01").unitary();
  r.u10 = parse_rotation_spec(require(j, "u10", path), path + ".u10").unitary();
  r.u11 = parse_rotation_spec(require(j, "u11", path), path + ".u11").unitary();
  return r;
}

inline Eigen::Matrix2cd parse_effect_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected a 2x2 matrix of [re, im] pairs");
  Eigen::Matrix2cd m;
  for (int r = 0; r < 2; ++r) {
    const json& row = j.at(r);
    if (!row.is_array() || row.size() != 2) fail(path, "expected a 2x2 matrix of [re, im] pairs");
    for (int c = 0; c < 2; ++c) {
      const json& cell = row.at(c);
      if (!cell.is_array() || cell.size() != 2) {
        fail(path, "expected each entry as [re, im]");
      }
      m(r, c) = cx(require_num(cell.at(0), path), require_num(cell.at(1), path));
    }
  }
  return m;
}

inline ChannelProgram parse_channel(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected a channel object");
  if (j.contains("preset")) {
    reject_unknown(j, {"preset", "p"}, path);
    std::string name = require_str(j.at("preset"), path + ".preset");
    if (name == "rule110") return {rule110_channel(), "rule110"};
    if (name == "rule108") return {rule108_channel(), "rule108"};
    if (name == "mixed") {
      double p = require_num(require(j, "p", path), path + ".p");
      if (p < 0 || p > 1) fail(path + ".p", "p must lie in [0, 1]");
      return {mixed_rule(p), "mixed(" + format_double(p) + ")"};
    }
    fail(path + ".preset", "unknown channel preset '" + name + "' (rule110, rule108, mixed)");
  }
  reject_unknown(j, {"effects", "pre_unitary"}, path);
  NeighborhoodChannel ch;
  const json& eff = require(j, "effects", path);
  static const char* keys[4] = {"00", "01", "10", "11"};
  for (int ab = 0; ab < 4; ++ab) {
    const json& list = require(eff, keys[ab], path + ".effects");
    std::string p2 = path + ".effects." + keys[ab];
    if (!list.is_array() || list.empty()) fail(p2, "expected a nonempty array of matrices");
    for (size_t mu = 0; mu < list.size(); ++mu) {
      ch.effects[ab].push_back(
          parse_effect_matrix(list.at(mu), p2 + "[" + std::to_string(mu) + "]"));
    }
  }
  if (j.contains("pre_unitary")) {
    ch.pre_unitary = parse_rule(j.at("pre_unitary"), path + ".pre_unitary");
  }
  try {
    ch.validate();
  } catch (const std::exception& e) {
    fail(path + ".effects", e.what());
  }
  return {std::move(ch), "custom"};
}

}  // namespace cfg_detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  using namespace cfg_detail;
  if (!j.is_object()) fail("$", "config must be a JSON object");
  reject_unknown(j, {"n", "boundary", "initial", "engine", "program", "steps", "outputs"}, "$");

  ExperimentConfig cfg;
  cfg.source = j;
  cfg.n = require_int(require(j, "n", "$"), "n");
  if (cfg.n < 2 || cfg.n % 2 != 0) fail("n", "n must be even and >= 2");

  const json& bj = require(j, "boundary", "$");
  if (bj.is_string() && bj.get<std::string>() == "periodic") {
    cfg.boundary = BoundaryConditions::periodic();
    if (cfg.n < 4) fail("boundary", "periodic chains require n >= 4");
  } else if (bj.is_object() && bj.contains("fixed")) {
    reject_unknown(bj, {"fixed"}, "boundary");
    const json& f = bj.at("fixed");
    reject_unknown(f, {"sigma_l", "sigma_r"}, "boundary.fixed");
    int sl = require_int(require(f, "sigma_l", "boundary.fixed"), "boundary.fixed.sigma_l");
    int sr = require_int(require(f, "sigma_r", "boundary.fixed"), "boundary.fixed.sigma_r");
    if (sl != 0 && sl != 1) fail("boundary.fixed.sigma_l", "must be 0 or 1");
    if (sr != 0 && sr != 1) fail("boundary.fixed.sigma_r", "must be 0 or 1");
    cfg.boundary = BoundaryConditions::fixed(sl, sr);
  } else {
    fail("boundary", "expected \"periodic\" or {\"fixed\": {\"sigma_l\", \"sigma_r\"}}");
  }

  const json& ej = require(j, "engine", "$");
  std::string engine = require_str(ej, "engine");
  if (engine == "pure") {
    cfg.engine = Engine::Pure;
  } else if (engine == "density") {
    cfg.engine = Engine::Density;
  } else {
    fail("engine", "expected \"pure\" or \"density\"");
  }

  const json& ij = require(j, "initial", "$");
  if (!ij.is_object()) fail("initial", "expected {tokens} or {seed}");
  if (ij.contains("tokens")) {
    reject_unknown(ij, {"tokens"}, "initial");
    std::string t = require_str(ij.at("tokens"), "initial.tokens");
    if (static_cast<int>(t.size()) != cfg.n) {
      fail("initial.tokens", "expected " + std::to_string(cfg.n) + " site tokens");
    }
    for (char c : t) {
      if (c != '0' && c != '1' && c != '+' && c != '-') {
        fail("initial.tokens", std::string("invalid site token '") + c + "' (0, 1, +, -)");
      }
    }
    cfg.initial = InitialTokens{t};
  } else if (ij.contains("seed")) {
    reject_unknown(ij, {"seed"}, "initial");
    const json& s = ij.at("seed");
    reject_unknown(s, {"site", "state"}, "initial.seed");
    InitialSeed seed;
    seed.site = require_int(require(s, "site", "initial.seed"), "initial.seed.site");
    if (seed.site < 0 || seed.site >= cfg.n) fail("initial.seed.site", "site out of range");
    const json& st = require(s, "state", "initial.seed");
    if (st.is_string()) {
      std::string tok = st.get<std::string>();
      if (tok == "0") {
        seed.state = {1, 0};
      } else if (tok == "1") {
        seed.state = {0, 1};
      } else if (tok == "+") {
        seed.state = Eigen::Vector2cd{1, 1} / std::sqrt(2.0);
      } else if (tok == "-") {
        seed.state = Eigen::Vector2cd{1, -1} / std::sqrt(2.0);
      } else {
        fail("initial.seed.state", "invalid token '" + tok + "' (0, 1, +, -)");
      }
    } else if (st.is_array() && st.size() == 4) {
      seed.state = {cx(require_num(st.at(0), "initial.seed.state"),
                       require_num(st.at(1), "initial.seed.state")),
                    cx(require_num(st.at(2), "initial.seed.state"),
                       require_num(st.at(3), "initial.seed.state"))};
      if (std::abs(seed.state.norm() - 1.0) > 1e-9) {
        fail("initial.seed.state", "amplitudes must be normalized");
      }
    } else {
      fail("initial.seed.state", "expected a token or [re0, im0, re1, im1]");
    }
    cfg.initial = seed;
  } else {
    fail("initial", "expected {tokens} or {seed}");
  }

  const json& pj = require(j, "program", "$");
  if (!pj.is_object()) fail("program", "expected {rule} | {channel} | {sequence}");
  int kinds = pj.contains("rule") + pj.contains("channel") + pj.contains("sequence");
  if (kinds != 1) fail("program", "expected exactly one of rule, channel, sequence");
  reject_unknown(pj, {"rule", "channel", "sequence"}, "program");
  if (pj.contains("rule")) {
    const json& rj = pj.at("rule");
    std::string label = (rj.is_object() && rj.contains("preset"))
                            ? rj.at("preset").get<std::string>()
                            : std::string("custom");
    Rule rule = cfg_detail::parse_rule(rj, "program.rule");
    try {
      rule.validate(1e-9);
    } catch (const std::exception& e) {
      fail("program.rule", e.what());
    }
    cfg.program = RuleProgram{rule, label};
  } else if (pj.contains("channel")) {
    if (cfg.engine != Engine::Density) {
      fail("engine", "channel programs require the density engine");
    }
    cfg.program = cfg_detail::parse_channel(pj.at("channel"), "program.channel");
  } else {
    const json& sj = pj.at("sequence");
    reject_unknown(sj, {"preset"}, "program.sequence");
    std::string name = require_str(require(sj, "preset", "program.sequence"),
                                   "program.sequence.preset");
    if (name != "transport" && name != "swap" && name != "bell" && name != "ghz" &&
        name != "cluster") {
      fail("program.sequence.preset", "unknown sequence preset '" + name + "'");
    }
    if (cfg.engine != Engine::Pure) {
      fail("engine", "sequence programs require the pure engine");
    }
    if (!cfg.boundary.is_periodic() &&
        (cfg.boundary.sigma_l != 0 || cfg.boundary.sigma_r != 0)) {
      fail("boundary", "sequence presets are defined for fixed (0,0) boundaries");
    }
    if (cfg.boundary.is_periodic()) {
      fail("boundary", "sequence presets are defined for fixed (0,0) boundaries");
    }
    if ((name == "bell" || name == "ghz") && cfg.n < 4) {
      fail("n", "bell and ghz require n >= 4");
    }
    cfg.program = SequencePreset{name};
  }

  if (j.contains("steps")) {
    cfg.steps = require_int(j.at("steps"), "steps");
    if (cfg.steps < 0) fail("steps", "steps must be >= 0");
  } else if (!std::holds_alternative<SequencePreset>(cfg.program)) {
    fail("steps", "missing required field");
  }

  const json& oj = require(j, "outputs", "$");
  if (!oj.is_array() || oj.empty()) fail("outputs", "expected a nonempty array");
  for (size_t i = 0; i < oj.size(); ++i) {
    std::string path = "outputs[" + std::to_string(i) + "]";
    std::string name = require_str(oj.at(i), path);
    bool found = false;
    for (const auto& [nm, kind] : output_names()) {
      if (nm == name) {
        cfg.outputs.push_back(kind);
        found = true;
      }
    }
    if (!found) fail(path, "unknown output '" + name + "'");
  }
  for (OutputKind k : cfg.outputs) {
    if ((k == OutputKind::RSeries || k == OutputKind::SchmidtHistogram) &&
        cfg.engine != Engine::Pure) {
      fail("outputs", "R-series and schmidt-histogram require the pure engine");
    }
    if (k == OutputKind::MixednessSeries && cfg.engine != Engine::Density) {
      fail("outputs", "mixedness-series requires the density engine");
    }
    if (k == OutputKind::Schedule && std::holds_alternative<ChannelProgram>(cfg.program)) {
      fail("outputs", "schedules are only defined for rule and sequence programs");
    }
  }
  if (std::holds_alternative<ChannelProgram>(cfg.program) && cfg.engine != Engine::Density) {
    fail("engine", "channel programs require the density engine");
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("$", "cannot open config file " + file.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace bqca

#endif
