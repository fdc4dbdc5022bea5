#include "pdlogic/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "pdlogic/error.hpp"

namespace pdl {

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const ordered_json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  [[nodiscard]] bool has(const std::string& key) const { return obj_.contains(key); }

  double number(const std::string& key) {
    if (!has(key)) throw ConfigError(where(key) + ": required");
    return as_number(key);
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? as_number(key) : (used_.insert(key), fallback);
  }
  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    if (!has(key)) return fallback;
    used_.insert(key);
    const auto& v = obj_.at(key);
    if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
    return v.get<std::int64_t>();
  }
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    used_.insert(key);
    const auto& v = obj_.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                   v.get<std::int64_t>() < 0)) {
      throw ConfigError(where(key) + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    used_.insert(key);
    if (!obj_.at(key).is_boolean()) throw ConfigError(where(key) + ": expected true/false");
    return obj_.at(key).get<bool>();
  }
  std::string text(const std::string& key) {
    if (!has(key)) throw ConfigError(where(key) + ": required");
    used_.insert(key);
    if (!obj_.at(key).is_string()) throw ConfigError(where(key) + ": expected a string");
    return obj_.at(key).get<std::string>();
  }
  std::string text(const std::string& key, const std::string& fallback) {
    return has(key) ? text(key) : fallback;
  }
  const ordered_json& raw(const std::string& key) {
    used_.insert(key);
    return obj_.at(key);
  }
  Section child(const std::string& key) {
    used_.insert(key);
    return Section(obj_.at(key), where(key));
  }

  [[nodiscard]] std::string where(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!used_.count(key)) throw ConfigError(where(key) + ": unknown key");
    }
  }

 private:
  double as_number(const std::string& key) {
    used_.insert(key);
    const auto& v = obj_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(where(key) + ": must be finite");
    return d;
  }

  const ordered_json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

Axis read_axis(Section s, bool require_two) {
  Axis a;
  a.min = s.number("min");
  a.max = s.number("max");
  const std::int64_t count = s.integer("count", -1);
  if (count < 0) throw ConfigError(s.where("count") + ": required");
  if (count < (require_two ? 2 : 1)) throw ConfigError(s.where("count") + ": must be >= 2");
  if (!(a.max >= a.min)) throw ConfigError(s.where("max") + ": must be >= min");
  a.count = static_cast<std::size_t>(count);
  s.finish();
  return a;
}

ordered_json axis_json(const Axis& a) {
  return ordered_json{{"min", a.min}, {"max", a.max}, {"count", a.count}};
}

Bit read_bit(const ordered_json& v, const std::string& where) {
  if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
    throw ConfigError(where + ": bits are 0 or 1");
  }
  return bit_from_int(v.get<int>());
}

ModelParams read_model(Section s) {
  const std::string type = s.text("type");
  if (type == "dpo") {
    DpoParams p;
    p.Omega = s.number("Omega");
    p.A = s.number("A");
    p.Omega_d = s.number("Omega_d");
    p.gamma = s.number("gamma");
    p.T_tilde = s.number("T_tilde");
    s.finish();
    return p;
  }
  if (type == "kpo") {
    KpoParams p;
    p.Delta = s.number("Delta");
    p.chi = s.number("chi");
    p.p0 = s.number("p0");
    p.A0 = s.number("A0");
    p.omega_mod = s.number("omega_mod");
    p.kappa = s.number("kappa");
    p.N = s.number("N");
    p.quantum_noise = s.boolean("twa", false);
    s.finish();
    return p;
  }
  if (type == "dlm") {
    DlmParams p;
    p.omega = s.number("omega");
    p.omega0 = s.number("omega0");
    p.A1 = s.number("A1");
    p.omega_d = s.number("omega_d");
    p.kappa = s.number("kappa");
    p.N = s.number("N");
    p.quantum_noise = s.boolean("twa", false);
    const std::string form = s.text("lambda_c_form", "printed");
    if (form == "printed") {
      p.lambda_c_form = LambdaCriticalForm::Printed;
    } else if (form == "standard") {
      p.lambda_c_form = LambdaCriticalForm::Standard;
    } else {
      throw ConfigError(s.where("lambda_c_form") + ": expected printed|standard");
    }
    const bool absolute = s.has("lambda0");
    const bool relative = s.has("lambda0_over_lambda_c");
    if (absolute == relative) {
      throw ConfigError(s.where("lambda0") + ": give exactly one of lambda0, lambda0_over_lambda_c");
    }
    p.lambda0 = absolute ? s.number("lambda0")
                         : s.number("lambda0_over_lambda_c") * lambda_critical(p);
    s.finish();
    return p;
  }
  throw ConfigError(s.where("type") + ": expected dpo|kpo|dlm");
}

ordered_json model_json(const ModelParams& params) {
  struct {
    ordered_json operator()(const DpoParams& p) const {
      return {{"type", "dpo"},        {"Omega", p.Omega}, {"A", p.A}, {"Omega_d", p.Omega_d},
              {"gamma", p.gamma}, {"T_tilde", p.T_tilde}};
    }
    ordered_json operator()(const KpoParams& p) const {
      return {{"type", "kpo"},   {"Delta", p.Delta}, {"chi", p.chi},
              {"p0", p.p0},      {"A0", p.A0},       {"omega_mod", p.omega_mod},
              {"kappa", p.kappa}, {"N", p.N},        {"twa", p.quantum_noise}};
    }
    ordered_json operator()(const DlmParams& p) const {
      return {{"type", "dlm"},
              {"omega", p.omega},
              {"omega0", p.omega0},
              {"lambda0", p.lambda0},
              {"A1", p.A1},
              {"omega_d", p.omega_d},
              {"kappa", p.kappa},
              {"N", p.N},
              {"twa", p.quantum_noise},
              {"lambda_c_form",
               p.lambda_c_form == LambdaCriticalForm::Printed ? "printed" : "standard"}};
    }
  } visitor;
  return std::visit(visitor, params);
}

}  // namespace

RunConfig parse_config(const ordered_json& doc) {
  Section root(doc, "");
  RunConfig cfg;
  if (!root.has("model")) throw ConfigError("model: required");
  cfg.model = read_model(root.child("model"));
  validate(cfg.model);

  if (root.has("integration")) {
    Section s = root.child("integration");
    cfg.protocol.timing.steps_per_period = static_cast<int>(s.integer("steps_per_period", 512));
    cfg.protocol.timing.samples_per_subharmonic =
        static_cast<int>(s.integer("samples_per_subharmonic", 64));
    cfg.seed = s.unsigned_integer("seed", 1);
    s.finish();
  }
  const ProtocolTiming& t0 = cfg.protocol.timing;
  if (t0.steps_per_period < 16 || t0.samples_per_subharmonic < 32 ||
      (2 * t0.steps_per_period) % t0.samples_per_subharmonic != 0) {
    throw ConfigError(
        "integration: need steps_per_period >= 16, samples_per_subharmonic >= 32 dividing "
        "2 * steps_per_period");
  }

  ProtocolSection& p = cfg.protocol;
  p.coupling = kUnset;
  p.tq = kUnset;
  p.reset_coupling = kUnset;
  p.tq_reset = kUnset;
  if (root.has("protocol")) {
    Section s = root.child("protocol");
    const std::string gate = s.text("gate", "NAND");
    if (gate != "NAND" && gate != "NOR") throw ConfigError(s.where("gate") + ": expected NAND|NOR");
    p.gate = gate == "NAND" ? GateKind::Nand : GateKind::Nor;
    if (s.has("inputs")) {
      const auto& in = s.raw("inputs");
      if (!in.is_array() || in.size() != 2) throw ConfigError(s.where("inputs") + ": expected [b1, b2]");
      p.inputs = {read_bit(in[0], s.where("inputs")), read_bit(in[1], s.where("inputs"))};
    }
    p.coupling = s.number("coupling", kUnset);
    p.tq = s.number("Tq", kUnset);
    if (s.has("flip_bit")) p.flip_bit = read_bit(s.raw("flip_bit"), s.where("flip_bit"));
    p.reset_coupling = s.number("reset_coupling", kUnset);
    p.tq_reset = s.number("Tq_reset", kUnset);
    const std::string policy = s.text("count_policy", "output");
    if (policy != "output" && policy != "strict") {
      throw ConfigError(s.where("count_policy") + ": expected output|strict");
    }
    p.count_policy = policy == "strict" ? CountPolicy::Strict : CountPolicy::OutputOnly;
    p.timing.relax_before = s.number("relax_before", 60.0);
    p.timing.relax_after = s.number("relax_after", 100.0);
    p.timing.pulse_offset = s.number("pulse_offset", 0.0);
    p.timing.quench = s.number("quench", 60.0);
    p.timing.readout_windows = static_cast<int>(s.integer("readout_windows", 8));
    p.timing.r_min_fraction = s.number("r_min_fraction", 0.05);
    s.finish();
  }

  if (root.has("sweep")) {
    Section s = root.child("sweep");
    if (s.has("coupling")) cfg.sweep.coupling.axis = read_axis(s.child("coupling"), true);
    if (s.has("Tq")) cfg.sweep.tq.axis = read_axis(s.child("Tq"), true);
    const std::int64_t n = s.integer("realizations", 20);
    if (n < 1) throw ConfigError(s.where("realizations") + ": must be >= 1");
    cfg.sweep.realizations = static_cast<std::size_t>(n);
    cfg.sweep.base_seed = s.unsigned_integer("base_seed", 1);
    const std::string mode = s.text("mode", "probability");
    if (mode != "probability" && mode != "classify") {
      throw ConfigError(s.where("mode") + ": expected probability|classify");
    }
    cfg.sweep.mode = mode == "classify" ? SweepMode::Classify : SweepMode::Probability;
    s.finish();
  }

  if (root.has("basins")) {
    Section s = root.child("basins");
    const std::string frame = s.text("frame", "lab");
    if (frame != "lab" && frame != "rotating") {
      throw ConfigError(s.where("frame") + ": expected lab|rotating");
    }
    cfg.basins.frame = frame == "lab" ? BasinFrame::Lab : BasinFrame::Rotating;
    if (s.has("x")) cfg.basins.x = read_axis(s.child("x"), false);
    if (s.has("y")) cfg.basins.y = read_axis(s.child("y"), false);
    BasinOptions& o = cfg.basins.options;
    o.final_periods = s.number("final_periods", 150.0);
    o.steps_per_period = static_cast<int>(s.integer("steps_per_period", 256));
    o.readout_windows = static_cast<int>(s.integer("readout_windows", 8));
    o.r_min = s.number("r_min", -1.0);
    if (s.has("seed_theta")) o.seed_theta = read_axis(s.child("seed_theta"), true);
    if (s.has("seed_theta_dot")) o.seed_theta_dot = read_axis(s.child("seed_theta_dot"), true);
    if (o.steps_per_period < 16 || o.final_periods < 2.0 * o.readout_windows + 2.0) {
      throw ConfigError(s.where("final_periods") + ": too short for the readout windows");
    }
    s.finish();
  }

  if (root.has("output")) {
    Section s = root.child("output");
    cfg.output.dir = s.text("dir", "out");
    cfg.output.prefix = s.text("prefix", "run");
    s.finish();
  }
  root.finish();

  const ProtocolTiming& t = p.timing;
  if (t.relax_before < 2.0 * t.readout_windows + 2.0 || t.relax_after < 2.0 * t.readout_windows + 2.0 ||
      t.readout_windows < 1 || t.pulse_offset < 0.0 || t.quench < 0.0 || t.r_min_fraction <= 0.0) {
    throw ConfigError("protocol: relaxation times must cover the readout windows");
  }
  cfg.resolved = to_json(cfg);
  return cfg;
}

ordered_json to_json(const RunConfig& cfg) {
  ordered_json doc;
  doc["model"] = model_json(cfg.model);

  const ProtocolSection& p = cfg.protocol;
  ordered_json proto;
  proto["gate"] = std::string(to_string(p.gate));
  proto["inputs"] = {static_cast<int>(p.inputs[0]), static_cast<int>(p.inputs[1])};
  if (std::isfinite(p.coupling)) proto["coupling"] = p.coupling;
  if (std::isfinite(p.tq)) proto["Tq"] = p.tq;
  proto["flip_bit"] = static_cast<int>(p.flip_bit);
  if (std::isfinite(p.reset_coupling)) proto["reset_coupling"] = p.reset_coupling;
  if (std::isfinite(p.tq_reset)) proto["Tq_reset"] = p.tq_reset;
  proto["count_policy"] = p.count_policy == CountPolicy::Strict ? "strict" : "output";
  proto["relax_before"] = p.timing.relax_before;
  proto["relax_after"] = p.timing.relax_after;
  proto["pulse_offset"] = p.timing.pulse_offset;
  proto["quench"] = p.timing.quench;
  proto["readout_windows"] = p.timing.readout_windows;
  proto["r_min_fraction"] = p.timing.r_min_fraction;
  doc["protocol"] = proto;

  doc["sweep"] = {{"coupling", axis_json(cfg.sweep.coupling.axis)},
                  {"Tq", axis_json(cfg.sweep.tq.axis)},
                  {"realizations", cfg.sweep.realizations},
                  {"base_seed", cfg.sweep.base_seed},
                  {"mode", cfg.sweep.mode == SweepMode::Classify ? "classify" : "probability"}};

  const BasinOptions& o = cfg.basins.options;
  doc["basins"] = {{"frame", cfg.basins.frame == BasinFrame::Lab ? "lab" : "rotating"},
                   {"x", axis_json(cfg.basins.x)},
                   {"y", axis_json(cfg.basins.y)},
                   {"final_periods", o.final_periods},
                   {"steps_per_period", o.steps_per_period},
                   {"readout_windows", o.readout_windows},
                   {"r_min", o.r_min},
                   {"seed_theta", axis_json(o.seed_theta)},
                   {"seed_theta_dot", axis_json(o.seed_theta_dot)}};

  doc["integration"] = {{"steps_per_period", p.timing.steps_per_period},
                        {"samples_per_subharmonic", p.timing.samples_per_subharmonic},
                        {"seed", cfg.seed}};
  doc["output"] = {{"dir", cfg.output.dir}, {"prefix", cfg.output.prefix}};
  return doc;
}

ordered_json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void apply_override(ordered_json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like key.path=value: " + assignment);
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  ordered_json value;
  try {
    value = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    value = text;
  }
  ordered_json* node = &doc;
  std::stringstream ss(path);
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(ss, key, '.')) keys.push_back(key);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i].empty()) throw ConfigError("empty key in override " + path);
    if (!node->is_object()) throw ConfigError("override path crosses a non-object: " + path);
    if (i + 1 == keys.size()) {
      (*node)[keys[i]] = value;
    } else {
      node = &(*node)[keys[i]];
      if (node->is_null()) *node = ordered_json::object();
    }
  }
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  ordered_json doc = load_json(path);
  for (const auto& o : overrides) apply_override(doc, o);
  return parse_config(doc);
}

}  // namespace pdl
