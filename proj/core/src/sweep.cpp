#include "pdlogic/sweep.hpp"

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>

#include "pdlogic/error.hpp"
#include "pdlogic/parallel.hpp"
#include "pdlogic/protocols.hpp"
#include "pdlogic/rng.hpp"

namespace pdl {

std::string_view to_string(SweepKind kind) noexcept {
  return kind == SweepKind::Flip ? "flip" : "gate";
}

bool SweepGrid::complete() const noexcept {
  for (auto d : done) {
    if (!d) return false;
  }
  return true;
}

std::uint64_t SweepGrid::cell_seed(std::size_t cell) const noexcept {
  return rng::derive_seed(base_seed, cell);
}

std::uint64_t sweep_fingerprint(const RunConfig& cfg, SweepKind kind) {
  ordered_json doc = cfg.resolved.is_null() ? to_json(cfg) : cfg.resolved;
  doc.erase("output");
  const std::string text = std::string(to_string(kind)) + "\n" + doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string fingerprint_line(std::uint64_t fp) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "# pdlogic-checkpoint %016" PRIx64, fp);
  return buf;
}

// Loads finished cells from a checkpoint written for the same fingerprint.
// A checkpoint for a different configuration is an error rather than being overwritten.
void load_checkpoint(const std::filesystem::path& path, std::uint64_t fp, SweepGrid& grid) {
  std::ifstream in(path);
  if (!in) return;
  std::string line;
  if (!std::getline(in, line)) return;
  if (line != fingerprint_line(fp)) {
    throw ConfigError("checkpoint " + path.string() + " belongs to a different configuration");
  }
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::size_t cell = 0;
    std::string value;
    // A torn final line from an interrupted write is ignored.
    if (!(ls >> cell >> value) || cell >= grid.cells()) continue;
    if (value == "failed") {
      grid.values[cell] = std::nan("");
      grid.failed[cell] = 1;
    } else {
      char* end = nullptr;
      const double v = std::strtod(value.c_str(), &end);
      if (end == value.c_str() || *end != '\0') continue;
      grid.values[cell] = v;
    }
    grid.done[cell] = 1;
  }
}

class CheckpointWriter {
 public:
  CheckpointWriter(const std::filesystem::path& path, std::uint64_t fp) {
    if (path.empty()) return;
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::app);
    if (!out_) throw std::runtime_error("cannot open checkpoint " + path.string());
    if (fresh) out_ << fingerprint_line(fp) << '\n' << std::flush;
  }

  void record(std::size_t cell, double value, bool failed) {
    if (!out_.is_open()) return;
    char buf[64];
    if (failed) {
      std::snprintf(buf, sizeof buf, "%zu failed\n", cell);
    } else {
      std::snprintf(buf, sizeof buf, "%zu %.17g\n", cell, value);
    }
    out_ << buf << std::flush;
  }

 private:
  std::ofstream out_;
};

// One pure evaluation: cell, realization seed -> score.
using CellTask = std::function<double(std::size_t cell, std::size_t realization, std::uint64_t seed)>;
// Combines per-realization scores into the cell value.
using Reduce = std::function<double(const std::vector<double>&)>;

void run_cells(SweepGrid& grid, std::size_t realizations, const CellTask& task, const Reduce& reduce,
               const SweepOptions& options, std::uint64_t fp) {
  if (!options.checkpoint.empty()) load_checkpoint(options.checkpoint, fp, grid);

  std::vector<std::size_t> pending;
  for (std::size_t c = 0; c < grid.cells() && pending.size() < options.max_new_cells; ++c) {
    if (!grid.done[c]) pending.push_back(c);
  }
  std::size_t finished = grid.cells();
  for (auto d : grid.done) finished -= d ? 0 : 1;

  CheckpointWriter writer(options.checkpoint, fp);
  std::mutex side_channel;
  const std::size_t total = grid.cells();

  std::vector<double> scores(pending.size() * realizations, 0.0);
  std::vector<std::string> errors(pending.size());
  std::unique_ptr<std::atomic<std::size_t>[]> remaining(new std::atomic<std::size_t>[pending.size()]);
  for (std::size_t i = 0; i < pending.size(); ++i) remaining[i] = realizations;
  std::vector<std::once_flag> error_once(pending.size());

  parallel_for(pending.size() * realizations, [&](std::size_t flat) {
    const std::size_t p = flat / realizations;
    const std::size_t k = flat % realizations;
    const std::size_t cell = pending[p];
    try {
      const std::uint64_t seed = rng::derive_seed(grid.cell_seed(cell), k);
      scores[flat] = task(cell, k, seed);
    } catch (const NumericalError& e) {
      std::call_once(error_once[p], [&] { errors[p] = e.what(); });
    }
    if (remaining[p].fetch_sub(1) != 1) return;

    // Last realization of this cell: reduce and publish.
    const bool failed = !errors[p].empty();
    double value = std::nan("");
    if (!failed) {
      std::vector<double> cell_scores(scores.begin() + static_cast<std::ptrdiff_t>(p * realizations),
                                      scores.begin() + static_cast<std::ptrdiff_t>((p + 1) * realizations));
      value = reduce(cell_scores);
    }
    grid.values[cell] = value;
    grid.failed[cell] = failed ? 1 : 0;
    grid.done[cell] = 1;
    std::lock_guard lock(side_channel);
    writer.record(cell, value, failed);
    ++finished;
    if (options.progress) options.progress(finished, total);
  });

  for (std::size_t p = 0; p < pending.size(); ++p) {
    if (!errors[p].empty()) {
      grid.failure_messages.push_back(std::to_string(pending[p]) + ": " + errors[p]);
    }
  }
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void require_axes(const RunConfig& cfg) {
  if (cfg.sweep.coupling.axis.count < 2 || cfg.sweep.tq.axis.count < 2) {
    throw ConfigError("sweep: axis counts must be >= 2");
  }
  if (cfg.sweep.tq.axis.min < 0.0) throw ConfigError("sweep.Tq.min: must be >= 0");
}

SweepGrid make_grid(const RunConfig& cfg, SweepKind kind, bool noiseless) {
  SweepGrid grid;
  grid.kind = kind;
  grid.model = cfg.kind();
  grid.coupling = cfg.sweep.coupling;
  grid.tq = cfg.sweep.tq;
  grid.mode = cfg.sweep.mode;
  grid.realizations =
      (noiseless || cfg.sweep.mode == SweepMode::Classify) ? 1 : cfg.sweep.realizations;
  grid.base_seed = cfg.sweep.base_seed;
  const std::size_t n = grid.coupling.axis.count * grid.tq.axis.count;
  grid.values.assign(n, std::nan(""));
  grid.done.assign(n, 0);
  grid.failed.assign(n, 0);
  grid.config = cfg.resolved.is_null() ? to_json(cfg) : cfg.resolved;
  return grid;
}

}  // namespace

SweepGrid sweep_flip(const RunConfig& cfg, const SweepOptions& options) {
  require_axes(cfg);
  if (cfg.kind() != ModelKind::Dpo) throw ConfigError("flip-scan: model.type must be dpo");
  if (cfg.protocol.flip_bit == Bit::Undefined) throw ConfigError("protocol.flip_bit: 0 or 1");
  const ProtocolContext ctx(cfg.model, cfg.protocol.timing);
  SweepGrid grid = make_grid(cfg, SweepKind::Flip, ctx.noiseless());
  if (grid.mode == SweepMode::Classify) throw ConfigError("sweep.mode: flip-scan is probability only");
  const double period = ctx.drive_period();
  const Bit initial = cfg.protocol.flip_bit;

  const CellTask task = [&](std::size_t cell, std::size_t, std::uint64_t seed) {
    const double j = grid.coupling.axis.at(cell / grid.tq.axis.count);
    const double tq = grid.tq.axis.at(cell % grid.tq.axis.count) * period;
    return run_flip(ctx, j, tq, seed, initial).success ? 1.0 : 0.0;
  };
  run_cells(grid, grid.realizations, task, mean, options, sweep_fingerprint(cfg, SweepKind::Flip));
  return grid;
}

SweepGrid sweep_gate(const RunConfig& cfg, const SweepOptions& options) {
  require_axes(cfg);
  const ProtocolContext ctx(cfg.model, cfg.protocol.timing);
  SweepGrid grid = make_grid(cfg, SweepKind::Gate, ctx.noiseless());
  const double period = ctx.drive_period();
  const GateKind kind = cfg.protocol.gate;
  const CountPolicy policy = cfg.protocol.count_policy;
  const bool classify = grid.mode == SweepMode::Classify;

  const CellTask task = [&](std::size_t cell, std::size_t, std::uint64_t seed) {
    const double j = grid.coupling.axis.at(cell / grid.tq.axis.count);
    const double tq = grid.tq.axis.at(cell % grid.tq.axis.count) * period;
    const TruthTableResult t = run_truth_table(ctx, kind, j, tq, seed);
    if (classify) return static_cast<double>(static_cast<int>(t.aggregate));
    return t.success(policy) ? 1.0 : 0.0;
  };
  run_cells(grid, grid.realizations, task, mean, options, sweep_fingerprint(cfg, SweepKind::Gate));
  return grid;
}

ResetTable sweep_reset(const RunConfig& cfg) {
  if (cfg.kind() != ModelKind::Dpo) throw ConfigError("reset-scan: model.type must be dpo");
  if (!std::isfinite(cfg.protocol.reset_coupling)) {
    throw ConfigError("protocol.reset_coupling: required for reset-scan");
  }
  if (cfg.sweep.tq.axis.count < 2) throw ConfigError("sweep.Tq.count: must be >= 2");
  const ProtocolContext ctx(cfg.model, cfg.protocol.timing);
  const double period = ctx.drive_period();
  const Axis& axis = cfg.sweep.tq.axis;

  ResetTable table;
  table.coupling = cfg.protocol.reset_coupling;
  table.seed = cfg.seed;
  table.config = cfg.resolved.is_null() ? to_json(cfg) : cfg.resolved;
  table.tq.resize(axis.count);
  table.delta_phi.assign(axis.count, std::nan(""));
  table.quench_residual.assign(axis.count, std::nan(""));
  std::vector<std::string> errors(axis.count);

  parallel_for(axis.count, [&](std::size_t i) {
    table.tq[i] = axis.at(i);
    try {
      const ResetOutcome r = run_reset(ctx, table.coupling, axis.at(i) * period,
                                       rng::derive_seed(cfg.seed, i));
      table.delta_phi[i] = r.delta_phi;
      table.quench_residual[i] = r.quench_residual;
    } catch (const NumericalError& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < axis.count; ++i) {
    if (!errors[i].empty()) table.failure_messages.push_back(std::to_string(i) + ": " + errors[i]);
  }
  return table;
}

}  // namespace pdl
