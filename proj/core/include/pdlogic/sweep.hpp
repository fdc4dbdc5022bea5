#pragma once

// Parameter sweeps over (coupling, T_q) with per-cell deterministic seeding,
// parallel evaluation over cells x realizations and checkpoint/resume.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pdlogic/config.hpp"

namespace pdl {

enum class SweepKind { Flip, Gate };

[[nodiscard]] std::string_view to_string(SweepKind kind) noexcept;

struct SweepGrid {
  SweepKind kind = SweepKind::Gate;
  ModelKind model = ModelKind::Dpo;
  NamedAxis coupling;
  NamedAxis tq;  // drive periods
  SweepMode mode = SweepMode::Probability;
  std::size_t realizations = 1;  // actually evaluated per cell (1 when noiseless)
  std::uint64_t base_seed = 1;
  // Row-major, T_q fastest: cell = i_coupling * tq.count + i_tq.
  // Probability in [0, 1], or a Classification coded 0/1/2. NaN when failed.
  std::vector<double> values;
  std::vector<std::uint8_t> done;
  std::vector<std::uint8_t> failed;
  std::vector<std::string> failure_messages;  // "cell: message"
  ordered_json config;                        // resolved RunConfig echo

  [[nodiscard]] std::size_t cells() const noexcept { return values.size(); }
  [[nodiscard]] std::size_t index(std::size_t i_coupling, std::size_t i_tq) const noexcept {
    return i_coupling * tq.axis.count + i_tq;
  }
  [[nodiscard]] double at(std::size_t i_coupling, std::size_t i_tq) const {
    return values[index(i_coupling, i_tq)];
  }
  [[nodiscard]] bool complete() const noexcept;
  [[nodiscard]] std::uint64_t cell_seed(std::size_t cell) const noexcept;
};

struct SweepOptions {
  // Completed cells are appended here and skipped when the sweep is rerun.
  std::filesystem::path checkpoint;
  // Stop after this many newly computed cells (the grid is then incomplete).
  std::size_t max_new_cells = std::numeric_limits<std::size_t>::max();
  // Called after each finished cell with (finished, total); serialized.
  std::function<void(std::size_t, std::size_t)> progress;
};

// Two DPO-like sites prepared in protocol.flip_bit and coupled with height j for T_q.
// Noiseless: success 0/1. Noisy: fraction over sweep.realizations.
[[nodiscard]] SweepGrid sweep_flip(const RunConfig& cfg, const SweepOptions& options = {});

// Truth table per cell. Probability mode counts successes under protocol.count_policy;
// classify mode stores the aggregate classification of realization 0.
[[nodiscard]] SweepGrid sweep_gate(const RunConfig& cfg, const SweepOptions& options = {});

struct ResetTable {
  std::vector<double> tq;          // drive periods
  std::vector<double> delta_phi;   // NaN when undefined or failed
  std::vector<double> quench_residual;
  std::vector<std::string> failure_messages;
  double coupling = 0.0;
  std::uint64_t seed = 0;
  ordered_json config;
};

// Delta phi over sweep.Tq at protocol.reset_coupling.
[[nodiscard]] ResetTable sweep_reset(const RunConfig& cfg);

// FNV-1a of the resolved config minus the output section, plus the sweep kind.
[[nodiscard]] std::uint64_t sweep_fingerprint(const RunConfig& cfg, SweepKind kind);

}  // namespace pdl
