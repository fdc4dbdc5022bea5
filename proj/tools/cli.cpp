#include "cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "pdlogic/config.hpp"
#include "pdlogic/error.hpp"
#include "pdlogic/export.hpp"
#include "pdlogic/parallel.hpp"
#include "pdlogic/protocols.hpp"
#include "pdlogic/sweep.hpp"

namespace pdl {

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNumericalError = 2;

struct CommonOptions {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::string> out;
  bool full = false;
  std::size_t max_cells = 0;  // 0: unlimited
  std::string frame;          // basins only
};

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--config", o.config, "run configuration (JSON)")->required();
  sub->add_option("--set", o.sets, "override, e.g. sweep.Tq.count=3 (repeatable)");
  sub->add_option("--seed", o.seed, "integration seed and sweep base seed");
  sub->add_option("--threads", o.threads, "worker threads (default: $PDLOGIC_THREADS or all cores)");
  sub->add_option("--out", o.out, "output directory");
}

RunConfig load(const CommonOptions& o, bool sweep) {
  std::vector<std::string> sets;
  if (sweep && o.full) {
    sets = {"sweep.coupling.count=41", "sweep.Tq.count=41", "sweep.realizations=100"};
  }
  if (o.seed) {
    sets.push_back("integration.seed=" + std::to_string(*o.seed));
    if (sweep) sets.push_back("sweep.base_seed=" + std::to_string(*o.seed));
  }
  if (o.out) sets.push_back("output.dir=\"" + *o.out + "\"");
  // Explicit --set wins over the convenience flags above.
  sets.insert(sets.end(), o.sets.begin(), o.sets.end());
  return load_config(o.config, sets);
}

std::optional<std::size_t> thread_count(const CommonOptions& o) {
  if (o.threads) {
    if (*o.threads == 0) throw ConfigError("--threads: must be >= 1");
    return o.threads;
  }
  if (const char* env = std::getenv("PDLOGIC_THREADS"); env && *env) {
    char* end = nullptr;
    const unsigned long n = std::strtoul(env, &end, 10);
    if (*end != '\0' || n == 0) throw ConfigError("PDLOGIC_THREADS: expected a positive integer");
    return n;
  }
  return std::nullopt;
}

std::filesystem::path stem(const RunConfig& cfg, const std::string& tag) {
  return std::filesystem::path(cfg.output.dir) / (cfg.output.prefix + "_" + tag);
}

double tq_periods(double tq, const char* key) {
  if (!std::isfinite(tq)) throw ConfigError(std::string(key) + ": required for this command");
  if (tq < 0.0) throw ConfigError(std::string(key) + ": must be >= 0");
  return tq;
}

double required(double v, const char* key) {
  if (!std::isfinite(v)) throw ConfigError(std::string(key) + ": required for this command");
  return v;
}

class Clock {
 public:
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::function<void(std::size_t, std::size_t)> progress_printer(std::ostream& err) {
  if (!isatty(STDERR_FILENO)) return {};
  return [&err](std::size_t done, std::size_t total) {
    err << "\r  " << done << "/" << total << " cells" << (done == total ? "\n" : "") << std::flush;
  };
}

std::string bit_text(Bit b) { return std::string(to_string(b)); }

int finish_sweep(const SweepGrid& grid, const RunConfig& cfg, const std::string& command,
                 const std::string& tag, double wall, std::ostream& out, std::ostream& err,
                 const std::filesystem::path& checkpoint) {
  if (!grid.complete()) {
    out << "stopped with " << std::count(grid.done.begin(), grid.done.end(), 1) << "/"
        << grid.cells() << " cells done; rerun to resume from " << checkpoint.string() << "\n";
    return kOk;
  }
  ExportMeta meta;
  meta.command = command;
  meta.config = cfg.resolved;
  meta.seeds = {{"base_seed", grid.base_seed},
                {"cell_seed", "derive_seed(base_seed, i_coupling * Tq.count + i_Tq)"},
                {"realization_seed", "derive_seed(cell_seed, k)"},
                {"realizations", grid.realizations}};
  meta.wall_time_s = wall;
  std::size_t failed = 0;
  for (auto f : grid.failed) failed += f;
  meta.extra = {{"cells", grid.cells()}, {"failed_cells", failed}};
  const auto path = stem(cfg, tag);
  export_grid(grid, path, meta);
  std::filesystem::remove(checkpoint);
  out << "wrote " << path.string() << ".csv (" << grid.cells() << " cells, " << failed
      << " failed)\n";
  for (const auto& m : grid.failure_messages) err << "cell " << m << "\n";
  return failed ? kNumericalError : kOk;
}

int cmd_validate(const CommonOptions& o, std::ostream& out) {
  const RunConfig cfg = load(o, true);
  out << cfg.resolved.dump(2) << "\n";
  return kOk;
}

int cmd_simulate(const CommonOptions& o, std::ostream& out) {
  const RunConfig cfg = load(o, false);
  const Clock clock;
  const ProtocolContext ctx(cfg.model, cfg.protocol.timing);
  GateSpec spec;
  spec.kind = cfg.protocol.gate;
  spec.inputs = cfg.protocol.inputs;
  spec.coupling = required(cfg.protocol.coupling, "protocol.coupling");
  spec.tq = tq_periods(cfg.protocol.tq, "protocol.Tq") * ctx.drive_period();
  const GateOutcome g = run_gate(ctx, spec, cfg.seed, true);

  ExportMeta meta;
  meta.command = "simulate";
  meta.config = cfg.resolved;
  meta.seeds = {{"integration_seed", cfg.seed}};
  meta.wall_time_s = clock.seconds();
  ordered_json sites = ordered_json::array();
  for (std::size_t i = 0; i < g.amplitude_after.size(); ++i) {
    sites.push_back({{"r_before", std::abs(g.amplitude_before[i])},
                     {"phi_before", std::arg(g.amplitude_before[i])},
                     {"r_after", std::abs(g.amplitude_after[i])},
                     {"phi_after", std::arg(g.amplitude_after[i])},
                     {"bit_after", static_cast<int>(classify_bit(g.amplitude_after[i], ctx.r_min()))}});
  }
  meta.extra = {{"pulse_start", g.pulse_start}, {"Tq_time", g.tq}, {"omega_R", ctx.omega_R()},
                {"r_min", ctx.r_min()}, {"sites", sites}};
  const auto path = stem(cfg, "simulate");
  export_trajectory(*g.trajectory, path, meta);

  static constexpr const char* kRole[] = {"I1", "I2", "O", "R"};
  out << "site  r_before   phi_before  r_after    phi_after  bit\n";
  for (std::size_t i = 0; i < g.amplitude_after.size(); ++i) {
    char line[128];
    std::snprintf(line, sizeof line, "%-4s  %-9.4g  %+-10.4f  %-9.4g  %+-10.4f %s\n", kRole[i],
                  std::abs(g.amplitude_before[i]), std::arg(g.amplitude_before[i]),
                  std::abs(g.amplitude_after[i]), std::arg(g.amplitude_after[i]),
                  bit_text(classify_bit(g.amplitude_after[i], ctx.r_min())).c_str());
    out << line;
  }
  out << "wrote " << path.string() << ".csv\n";
  return kOk;
}

int cmd_gate(const CommonOptions& o, std::ostream& out) {
  const RunConfig cfg = load(o, false);
  const Clock clock;
  const ProtocolContext ctx(cfg.model, cfg.protocol.timing);
  const double j = required(cfg.protocol.coupling, "protocol.coupling");
  const double tq = tq_periods(cfg.protocol.tq, "protocol.Tq") * ctx.drive_period();
  const TruthTableResult t = run_truth_table(ctx, cfg.protocol.gate, j, tq, cfg.seed);

  out << to_string(t.kind) << " j=" << j << " Tq=" << cfg.protocol.tq << " T_d\n";
  out << "I1 I2 | O  expected | I1' I2' | class\n";
  for (const GateOutcome& row : t.rows) {
    out << ' ' << bit_text(row.inputs[0]) << "  " << bit_text(row.inputs[1]) << " | "
        << bit_text(row.output) << "  " << bit_text(row.expected) << "        | "
        << bit_text(row.inputs_after[0]) << "   " << bit_text(row.inputs_after[1]) << "   | "
        << to_string(row.classification) << "\n";
  }
  out << "classification: " << to_string(t.aggregate) << "\n";

  ExportMeta meta;
  meta.command = "gate";
  meta.config = cfg.resolved;
  meta.seeds = {{"integration_seed", cfg.seed}};
  meta.wall_time_s = clock.seconds();
  meta.extra = {{"classification", to_string(t.aggregate)}};
  export_truth_table(t, stem(cfg, "gate"), meta);
  return kOk;
}

int cmd_sweep(const CommonOptions& o, SweepKind kind, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load(o, true);
  const Clock clock;
  const std::string tag = kind == SweepKind::Flip ? "flip" : "gate_scan";
  SweepOptions opts;
  opts.checkpoint = stem(cfg, tag).string() + ".ckpt";
  if (o.max_cells > 0) opts.max_new_cells = o.max_cells;
  opts.progress = progress_printer(err);
  const SweepGrid grid = kind == SweepKind::Flip ? sweep_flip(cfg, opts) : sweep_gate(cfg, opts);
  return finish_sweep(grid, cfg, kind == SweepKind::Flip ? "flip-scan" : "gate-scan", tag,
                      clock.seconds(), out, err, opts.checkpoint);
}

int cmd_basins(const CommonOptions& o, std::ostream& out) {
  CommonOptions opts = o;
  opts.sets.insert(opts.sets.begin(), "basins.frame=\"" + o.frame + "\"");
  const RunConfig cfg = load(opts, false);
  if (cfg.kind() != ModelKind::Dpo) throw ConfigError("basins: model.type must be dpo");
  const Clock clock;
  const auto& p = std::get<DpoParams>(cfg.model);
  const BasinMap map = cfg.basins.frame == BasinFrame::Lab
                           ? basin_scan_lab(p, cfg.basins.x, cfg.basins.y, cfg.basins.options)
                           : basin_scan_rotating(p, cfg.basins.x, cfg.basins.y, cfg.basins.options);
  std::size_t zeros = 0, ones = 0, undefined = 0, unreachable = 0;
  for (CellLabel l : map.labels) {
    zeros += l == CellLabel::Zero;
    ones += l == CellLabel::One;
    undefined += l == CellLabel::Undefined;
    unreachable += l == CellLabel::Unreachable;
  }
  ExportMeta meta;
  meta.command = "basins";
  meta.config = cfg.resolved;
  meta.wall_time_s = clock.seconds();
  meta.extra = {{"r_min", map.r_min},         {"zero", zeros},
                {"one", ones},                {"undefined", undefined},
                {"unreachable", unreachable}, {"unreachable_fraction", map.unreachable_fraction}};
  const auto path = stem(cfg, std::string("basins_") + o.frame);
  export_basins(map, path, meta);
  out << "0-bit " << zeros << "  1-bit " << ones << "  undefined " << undefined;
  if (map.frame == BasinFrame::Rotating) out << "  unreachable " << unreachable;
  out << "\nwrote " << path.string() << ".csv\n";
  return kOk;
}

int cmd_reset(const CommonOptions& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load(o, true);
  const Clock clock;
  const ResetTable table = sweep_reset(cfg);
  ExportMeta meta;
  meta.command = "reset-scan";
  meta.config = cfg.resolved;
  meta.seeds = {{"integration_seed", cfg.seed}, {"point_seed", "derive_seed(seed, i_Tq)"}};
  meta.wall_time_s = clock.seconds();
  std::size_t sync = 0, anti = 0, other = 0;
  for (double d : table.delta_phi) {
    if (std::abs(d) < 0.05) {
      ++sync;
    } else if (std::abs(d - M_PI) < 0.05) {
      ++anti;
    } else {
      ++other;
    }
  }
  meta.extra = {{"synchronized", sync}, {"anti_synchronized", anti}, {"other", other}};
  const auto path = stem(cfg, "reset");
  export_reset(table, path, meta);
  out << "delta_phi = 0: " << sync << "  delta_phi = pi: " << anti << "  other: " << other
      << "\nwrote " << path.string() << ".csv\n";
  for (const auto& m : table.failure_messages) err << "point " << m << "\n";
  return table.failure_messages.empty() ? kOk : kNumericalError;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"pdlogic: logic gates on period-doubled oscillator networks"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  CommonOptions o;
  struct Sub {
    const char* name;
    const char* help;
    bool sweep;
  };
  const Sub subs[] = {
      {"simulate", "one gate trajectory: dump samples and demodulated amplitudes", false},
      {"flip-scan", "bit-flip success over (coupling, Tq)", true},
      {"gate", "single truth table", false},
      {"gate-scan", "gate success probability or classification over (coupling, Tq)", true},
      {"basins", "basin-of-attraction map (lab | rotating)", false},
      {"reset-scan", "reset delta phi over Tq", true},
      {"validate-config", "parse a config and print it with defaults resolved", true},
  };
  std::map<std::string, CLI::App*> apps;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, o);
    if (s.sweep && std::string(s.name) != "validate-config") {
      sub->add_flag("--full", o.full, "41x41 grid, 100 realizations");
      sub->add_option("--max-cells", o.max_cells)->group("");
    }
    apps[s.name] = sub;
  }
  apps["basins"]->add_option("frame", o.frame, "lab or rotating")
      ->required()
      ->check(CLI::IsMember({"lab", "rotating"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    std::optional<ThreadLimit> limit;
    if (const auto n = thread_count(o)) limit.emplace(*n);
    if (apps["validate-config"]->parsed()) return cmd_validate(o, out);
    if (apps["simulate"]->parsed()) return cmd_simulate(o, out);
    if (apps["gate"]->parsed()) return cmd_gate(o, out);
    if (apps["flip-scan"]->parsed()) return cmd_sweep(o, SweepKind::Flip, out, err);
    if (apps["gate-scan"]->parsed()) return cmd_sweep(o, SweepKind::Gate, out, err);
    if (apps["basins"]->parsed()) return cmd_basins(o, out);
    if (apps["reset-scan"]->parsed()) return cmd_reset(o, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical failure at t = " << e.time() << ": " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

}  // namespace pdl
