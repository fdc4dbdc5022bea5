#pragma once

// CSV results plus a JSON metadata sidecar. Output is a pure function of the
// result and the metadata passed in, so re-exporting gives identical bytes.

#include <filesystem>
#include <string>

#include "pdlogic/analysis.hpp"
#include "pdlogic/config.hpp"
#include "pdlogic/integrator.hpp"
#include "pdlogic/protocols.hpp"
#include "pdlogic/sweep.hpp"

namespace pdl {

struct ExportMeta {
  std::string command;     // e.g. "gate-scan"
  ordered_json config;     // resolved RunConfig
  ordered_json seeds = ordered_json::object();
  double wall_time_s = 0.0;
  ordered_json extra = ordered_json::object();  // command-specific summary
};

[[nodiscard]] std::string code_version();

// Shortest "%.9g" rendering; nan for missing values.
[[nodiscard]] std::string format_number(double v);

// Writes <stem>.csv and <stem>.json. Throws std::runtime_error on I/O failure.
void export_grid(const SweepGrid& grid, const std::filesystem::path& stem, const ExportMeta& meta);
void export_basins(const BasinMap& map, const std::filesystem::path& stem, const ExportMeta& meta);
void export_reset(const ResetTable& table, const std::filesystem::path& stem, const ExportMeta& meta);
// One row per input pair: in1,in2,output,expected,in1_after,in2_after,class.
void export_truth_table(const TruthTableResult& table, const std::filesystem::path& stem,
                        const ExportMeta& meta);
// Columns t, then every state component per site.
void export_trajectory(const Trajectory& traj, const std::filesystem::path& stem,
                       const ExportMeta& meta);

// The sidecar document alone (what export_* writes to <stem>.json).
[[nodiscard]] ordered_json metadata_json(const ExportMeta& meta);

}  // namespace pdl
