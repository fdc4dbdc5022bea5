#pragma once

// Run configuration: one JSON document with sections model, protocol, sweep,
// basins, integration and output. Physical parameters have no defaults and
// unknown keys are rejected; numerical knobs fall back to documented defaults.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pdlogic/analysis.hpp"
#include "pdlogic/models.hpp"
#include "pdlogic/protocols.hpp"

namespace pdl {

using ordered_json = nlohmann::ordered_json;

struct ProtocolSection {
  GateKind gate = GateKind::Nand;
  std::array<Bit, 2> inputs{Bit::One, Bit::One};
  double coupling = 0.0;        // j (DPO) or J (KPO/DLM)
  double tq = 0.0;              // pulse duration, drive periods
  Bit flip_bit = Bit::One;      // initial bit of both sites in the flip protocol
  double reset_coupling = 0.0;  // j_R
  double tq_reset = 0.0;        // drive periods
  CountPolicy count_policy = CountPolicy::OutputOnly;
  ProtocolTiming timing;
};

enum class SweepMode { Probability, Classify };

struct NamedAxis {
  std::string name;
  Axis axis;
};

struct SweepSection {
  NamedAxis coupling{"coupling", {0.0, 0.5, 21}};
  NamedAxis tq{"Tq", {0.5, 20.0, 21}};  // drive periods
  std::size_t realizations = 20;
  std::uint64_t base_seed = 1;
  SweepMode mode = SweepMode::Probability;
};

struct BasinSection {
  BasinFrame frame = BasinFrame::Lab;
  Axis x{-3.0, 3.0, 101};
  Axis y{-3.0, 3.0, 101};
  BasinOptions options;
};

struct OutputSection {
  std::string dir = "out";
  std::string prefix = "run";
};

struct RunConfig {
  ModelParams model;
  ProtocolSection protocol;
  SweepSection sweep;
  BasinSection basins;
  std::uint64_t seed = 1;  // integration noise seed for single runs
  OutputSection output;
  ordered_json resolved;   // every section with defaults filled in

  [[nodiscard]] ModelKind kind() const noexcept { return kind_of(model); }
};

// Throws ConfigError with the offending key path.
[[nodiscard]] RunConfig parse_config(const ordered_json& doc);
[[nodiscard]] ordered_json load_json(const std::filesystem::path& path);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path,
                                    const std::vector<std::string>& overrides = {});

// Applies "a.b.c=value"; value is parsed as JSON when possible, else taken as a string.
void apply_override(ordered_json& doc, const std::string& assignment);

// Serializes a config back to the document form accepted by parse_config.
[[nodiscard]] ordered_json to_json(const RunConfig& cfg);

}  // namespace pdl
