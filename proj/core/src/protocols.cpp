#include "pdlogic/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pdlogic/error.hpp"
#include "pdlogic/rng.hpp"

namespace pdl {

namespace {

SystemState single_state(ModelKind kind, cplx a, cplx b = {}) {
  SystemState s(kind, 1);
  if (kind == ModelKind::Dpo) {
    s.set_dpo(0, a.real(), a.imag());
  } else {
    s.set_a(0, a);
    if (kind == ModelKind::Dlm) s.set_b(0, b);
  }
  return s;
}

// Places single-site states side by side.
SystemState assemble(ModelKind kind, const std::vector<SystemState>& sites) {
  SystemState out(kind, sites.size());
  const std::size_t per = components_per_site(kind);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    std::copy(sites[i].values().begin(), sites[i].values().end(),
              out.values().begin() + static_cast<std::ptrdiff_t>(i * per));
  }
  return out;
}

// Step-aligned boundaries for a stage starting at t0.
struct StageGrid {
  double t0;
  double dt;
  [[nodiscard]] double at(std::int64_t k) const { return t0 + static_cast<double>(k) * dt; }
};

Schedule pulse_on_grid(const StageGrid& grid, std::int64_t start, std::int64_t length,
                       double value) {
  return Schedule::pulse(grid.at(start), grid.at(start + length), value, 0.0);
}

bool same_bit(Bit a, Bit b) { return a == b && a != Bit::Undefined; }

}  // namespace

std::string_view to_string(GateKind kind) noexcept {
  return kind == GateKind::Nand ? "NAND" : "NOR";
}

std::string_view to_string(Classification c) noexcept {
  switch (c) {
    case Classification::Full: return "full";
    case Classification::Pseudo: return "pseudo";
    case Classification::Fail: return "fail";
  }
  return "fail";
}

Bit expected_output(GateKind kind, Bit in1, Bit in2) noexcept {
  const bool a = in1 == Bit::One;
  const bool b = in2 == Bit::One;
  return kind == GateKind::Nand ? bit_from_int(!(a && b)) : bit_from_int(!(a || b));
}

SeedPair default_seeds(ModelKind kind) {
  switch (kind) {
    case ModelKind::Dpo:
      return {single_state(kind, {0.5, 0.0}), single_state(kind, {-0.5, 0.0})};
    case ModelKind::Kpo:
      return {single_state(kind, {0.1, 0.0}), single_state(kind, {0.0, 0.1})};
    case ModelKind::Dlm:
      return {single_state(kind, {0.1, 0.0}, {0.1, 0.0}),
              single_state(kind, {0.0, 0.1}, {0.0, 0.1})};
  }
  return {};
}

ProtocolContext::ProtocolContext(ModelParams params, ProtocolTiming timing)
    : params_(std::move(params)), timing_(timing) {
  validate(params_);
  if (timing_.relax_before <= 0.0 || timing_.relax_after <= 0.0 || timing_.quench < 0.0 ||
      timing_.pulse_offset < 0.0 || timing_.readout_windows < 1 ||
      timing_.relax_after < 2.0 * timing_.readout_windows + 2.0 ||
      timing_.relax_before < 2.0 * timing_.readout_windows + 2.0) {
    throw ConfigError("protocol timing: relaxation must cover the readout windows");
  }
  period_ = pdl::drive_period(params_);

  // Calibration: relax both seeds on an isolated, noiseless site.
  const ModelKind kind = kind_of(params_);
  const ModelParams single = with_network(params_, Network(1));
  const SeedPair seeds = default_seeds(kind);
  const auto relax = [&](const SystemState& init) {
    IntegrationConfig cfg =
        make_config(single, 0.0, (timing_.relax_before + timing_.relax_after) * period_,
                    timing_.steps_per_period, timing_.samples_per_subharmonic);
    cfg.record_from = cfg.tf - (2 * timing_.readout_windows + 1) * 2.0 * period_;
    const Trajectory traj = integrate(single, {}, init, cfg);
    const int w = timing_.readout_windows;
    const cplx late = readout(traj, omega_R(), w).amplitude[0];
    // A decaying transient is not a period-doubled state: the readout one
    // block earlier has to agree.
    const cplx early = demodulate(traj, omega_R(), traj.times.back() - 2 * w * 2.0 * period_)
                           .amplitude[0];
    const bool steady = std::abs(late - early) < 0.1 * std::abs(late);
    return std::pair{late, steady};
  };
  const auto [ref, ref_steady] = relax(seeds.reference);
  const auto [partner, partner_steady] = relax(seeds.partner);
  calibration_.steady_amplitude = std::abs(ref);
  calibration_.r_min = timing_.r_min_fraction * calibration_.steady_amplitude;
  calibration_.reference_bit = classify_bit(ref, calibration_.r_min);
  if (!ref_steady || !partner_steady || calibration_.reference_bit == Bit::Undefined ||
      calibration_.steady_amplitude <= 0.0) {
    throw InitializationError("no steady period-doubled response from the seeds");
  }
  if (classify_bit(partner, calibration_.r_min) != complement(calibration_.reference_bit)) {
    throw InitializationError("the two seeds do not relax to complementary bits");
  }
}

double ProtocolContext::omega_R() const noexcept { return std::numbers::pi / period_; }

bool ProtocolContext::noiseless() const { return noise_amplitudes(params_).silent(); }

SystemState ProtocolContext::seed(Bit bit) const {
  if (bit == Bit::Undefined) throw ConfigError("cannot seed an undefined bit");
  const SeedPair seeds = default_seeds(kind_of(params_));
  return bit == calibration_.reference_bit ? seeds.reference : seeds.partner;
}

double ProtocolContext::round_duration(double duration) const noexcept {
  return static_cast<double>(steps_for(duration, dt())) * dt();
}

IntegrationConfig ProtocolContext::config(double t0, double tf) const {
  IntegrationConfig cfg;
  cfg.dt = dt();
  cfg.t0 = t0;
  cfg.tf = tf;
  cfg.sample_stride =
      static_cast<std::size_t>(2 * timing_.steps_per_period / timing_.samples_per_subharmonic);
  return cfg;
}

const InitResult& ProtocolContext::initial(const std::vector<Bit>& targets) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(targets); it != cache_.end()) return *it->second;
  }
  auto result = std::make_unique<InitResult>(initialize_bits(*this, targets, timing_.relax_before));
  std::lock_guard lock(mutex_);
  auto [it, inserted] = cache_.try_emplace(targets, std::move(result));
  return *it->second;
}

InitResult initialize_bits(const ProtocolContext& ctx, const std::vector<Bit>& targets,
                           double relax) {
  if (targets.empty()) throw ConfigError("initialize_bits needs at least one site");
  const ModelKind kind = kind_of(ctx.params());
  const ModelParams uncoupled = with_network(ctx.params(), Network(targets.size()));
  std::vector<SystemState> seeds;
  for (Bit b : targets) seeds.push_back(ctx.seed(b));

  IntegrationConfig cfg = ctx.config(0.0, relax * ctx.drive_period());
  cfg.record_from = cfg.tf - (ctx.timing().readout_windows + 1) * 2.0 * ctx.drive_period();
  const Trajectory traj = integrate(uncoupled, {}, assemble(kind, seeds), cfg);

  InitResult out;
  out.state = traj.final_state;
  out.time = traj.final_time;
  out.demod = readout(traj, ctx.omega_R(), ctx.timing().readout_windows);
  out.bits = classify_bit(out.demod, ctx.r_min());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (out.bits[i] != targets[i]) {
      throw InitializationError("site " + std::to_string(i) + " relaxed to bit " +
                                    std::string(to_string(out.bits[i])) + " instead of " +
                                    std::string(to_string(targets[i])),
                                out.time);
    }
  }
  return out;
}

namespace {

// Couples a prepared network for a single pulse and relaxes it.
struct PulseRun {
  Trajectory traj;
  DemodResult after;
  double tq = 0.0;
  double pulse_start = 0.0;
};

PulseRun pulse_and_relax(const ProtocolContext& ctx, const InitResult& init, Network network,
                         const std::vector<double>& edge_values, double tq, std::uint64_t seed,
                         bool keep_trajectory) {
  const double period = ctx.drive_period();
  const StageGrid grid{init.time, ctx.dt()};
  const std::int64_t offset = steps_for(ctx.timing().pulse_offset * period, grid.dt);
  const std::int64_t pulse = steps_for(std::max(tq, 0.0), grid.dt);
  const std::int64_t after = steps_for(ctx.timing().relax_after * period, grid.dt);

  ScheduleSet sched;
  for (double v : edge_values) sched.edges.push_back(pulse_on_grid(grid, offset, pulse, v));

  IntegrationConfig cfg = ctx.config(grid.t0, grid.at(offset + pulse + after));
  cfg.rng_seed = seed;
  cfg.noise_enabled_from = grid.at(offset);
  if (!keep_trajectory) {
    cfg.record_from = cfg.tf - (ctx.timing().readout_windows + 1) * 2.0 * period;
  }
  const ModelParams params = with_network(ctx.params(), std::move(network));
  PulseRun run;
  run.traj = integrate(params, sched, init.state, cfg);
  run.after = readout(run.traj, ctx.omega_R(), ctx.timing().readout_windows);
  run.tq = static_cast<double>(pulse) * grid.dt;
  run.pulse_start = grid.at(offset);
  return run;
}

}  // namespace

FlipOutcome run_flip(const ProtocolContext& ctx, double j, double tq, std::uint64_t seed,
                     Bit initial) {
  const InitResult& init = ctx.initial({initial, initial});
  const PulseRun run =
      pulse_and_relax(ctx, init, Network(2, {{0, 1, j}}), {1.0}, tq, seed, false);
  const auto bits = classify_bit(run.after, ctx.r_min());
  FlipOutcome out;
  out.initial = initial;
  out.final_bits = {bits[0], bits[1]};
  out.tq = run.tq;
  out.success = same_bit(bits[0], complement(initial)) && same_bit(bits[1], complement(initial));
  return out;
}

Network gate_network(double j, std::array<double, 2> edge_scale, double j_reference) {
  return Network(4, {{kInput1, kOutput, j * edge_scale[0]},
                     {kInput2, kOutput, j * edge_scale[1]},
                     {kReference, kOutput, j_reference}});
}

GateOutcome run_gate(const ProtocolContext& ctx, const GateSpec& spec, std::uint64_t seed,
                     bool keep_trajectory) {
  const Bit out_init = spec.kind == GateKind::Nand ? Bit::One : Bit::Zero;
  const InitResult& init = ctx.initial({spec.inputs[0], spec.inputs[1], out_init, out_init});
  PulseRun run = pulse_and_relax(ctx, init, gate_network(spec.coupling, spec.edge_scale),
                                 {1.0, 1.0, 0.0}, spec.tq, seed, keep_trajectory);
  const auto bits = classify_bit(run.after, ctx.r_min());

  GateOutcome out;
  out.inputs = spec.inputs;
  out.output = bits[kOutput];
  out.expected = expected_output(spec.kind, spec.inputs[0], spec.inputs[1]);
  out.inputs_after = {bits[kInput1], bits[kInput2]};
  for (std::size_t i = 0; i < 2; ++i) out.input_flipped[i] = !same_bit(bits[i], spec.inputs[i]);
  const bool correct = same_bit(out.output, out.expected);
  const bool flipped = out.input_flipped[0] || out.input_flipped[1];
  out.classification = !correct ? Classification::Fail
                       : flipped ? Classification::Pseudo
                                 : Classification::Full;
  out.amplitude_before = init.demod.amplitude;
  out.amplitude_after = run.after.amplitude;
  out.tq = run.tq;
  out.pulse_start = run.pulse_start;
  out.seed = seed;
  if (keep_trajectory) out.trajectory = std::move(run.traj);
  return out;
}

bool TruthTableResult::outputs_correct() const noexcept {
  return aggregate != Classification::Fail;
}

bool TruthTableResult::success(CountPolicy policy) const noexcept {
  return policy == CountPolicy::Strict ? aggregate == Classification::Full : outputs_correct();
}

TruthTableResult run_truth_table(const ProtocolContext& ctx, GateKind kind, double j, double tq,
                                 std::uint64_t seed) {
  TruthTableResult result;
  result.kind = kind;
  result.aggregate = Classification::Full;
  for (int row = 0; row < 4; ++row) {
    GateSpec spec;
    spec.kind = kind;
    spec.inputs = {bit_from_int(row >> 1), bit_from_int(row & 1)};
    spec.coupling = j;
    spec.tq = tq;
    result.rows[row] = run_gate(ctx, spec, seed);
    result.aggregate = std::min(result.aggregate, result.rows[row].classification);
  }
  return result;
}

double success_probability(const ProtocolContext& ctx, GateKind kind, double j, double tq,
                           std::size_t realizations, std::uint64_t base_seed, CountPolicy policy) {
  if (realizations == 0) throw ConfigError("success_probability needs at least one realization");
  if (ctx.noiseless()) {
    return run_truth_table(ctx, kind, j, tq, base_seed).success(policy) ? 1.0 : 0.0;
  }
  std::size_t successes = 0;
  for (std::size_t k = 0; k < realizations; ++k) {
    const std::uint64_t seed = rng::derive_seed(base_seed, k);
    if (run_truth_table(ctx, kind, j, tq, seed).success(policy)) ++successes;
  }
  return static_cast<double>(successes) / static_cast<double>(realizations);
}

ResetOutcome run_reset(const ProtocolContext& ctx, double j_reset, double tq, std::uint64_t seed,
                       Bit output_initial, Bit reference_initial) {
  const double period = ctx.drive_period();
  const int windows = ctx.timing().readout_windows;
  const InitResult& init = ctx.initial({output_initial, reference_initial});
  const ModelParams params = with_network(ctx.params(), Network(2, {{0, 1, j_reset}}));

  // Quench: output undriven and uncoupled.
  const StageGrid quench_grid{init.time, ctx.dt()};
  const std::int64_t quench_steps =
      std::max<std::int64_t>(steps_for(ctx.timing().quench * period, quench_grid.dt),
                             steps_for(2.0 * period, quench_grid.dt));
  ScheduleSet quench;
  quench.edges = {Schedule::constant(0.0)};
  quench.drives = {Schedule::constant(0.0), Schedule::constant(1.0)};
  IntegrationConfig qcfg = ctx.config(quench_grid.t0, quench_grid.at(quench_steps));
  qcfg.record_from = qcfg.tf - 2.0 * 2.0 * period;
  const Trajectory quenched = integrate(params, quench, init.state, qcfg);
  const DemodResult residual = readout(quenched, ctx.omega_R(), 1);

  // Re-drive the output while pulsing the reference coupling.
  const StageGrid grid{quenched.final_time, ctx.dt()};
  const std::int64_t pulse = steps_for(std::max(tq, 0.0), grid.dt);
  const std::int64_t after = steps_for(ctx.timing().relax_after * period, grid.dt);
  ScheduleSet redrive;
  redrive.edges = {pulse_on_grid(grid, 0, pulse, 1.0)};
  IntegrationConfig cfg = ctx.config(grid.t0, grid.at(pulse + after));
  cfg.rng_seed = seed;
  cfg.noise_enabled_from = grid.t0;
  cfg.record_from = cfg.tf - (windows + 1) * 2.0 * period;
  const Trajectory traj = integrate(params, redrive, quenched.final_state, cfg);
  const DemodResult d = readout(traj, ctx.omega_R(), windows);
  const auto bits = classify_bit(d, ctx.r_min());

  ResetOutcome out;
  out.quench_residual = residual.r(0);
  out.quenched = out.quench_residual < ctx.r_min();
  out.output = bits[0];
  out.reference = bits[1];
  out.tq = static_cast<double>(pulse) * grid.dt;
  out.delta_phi = (bits[0] == Bit::Undefined || bits[1] == Bit::Undefined)
                      ? std::numeric_limits<double>::quiet_NaN()
                      : delta_phi(d.phi(0), d.phi(1));
  return out;
}

}  // namespace pdl
