#pragma once

// Pulse protocols on period-doubled bits: initialization, bit flip, NAND/NOR
// gates with pseudo-gate detection, the reset protocol and Monte Carlo success
// probabilities.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

#include "pdlogic/analysis.hpp"
#include "pdlogic/integrator.hpp"
#include "pdlogic/models.hpp"

namespace pdl {

// Durations are in drive periods T_d.
struct ProtocolTiming {
  double relax_before = 60.0;
  double relax_after = 100.0;
  double pulse_offset = 0.0;  // extra uncoupled time between initialization and pulse
  double quench = 60.0;       // reset: time with the output's drive switched off
  int readout_windows = 8;
  int steps_per_period = 512;
  int samples_per_subharmonic = 64;
  double r_min_fraction = 0.05;
};

enum class GateKind { Nand, Nor };
enum class Classification { Fail = 0, Pseudo = 1, Full = 2 };
enum class CountPolicy { OutputOnly, Strict };

[[nodiscard]] std::string_view to_string(GateKind kind) noexcept;
[[nodiscard]] std::string_view to_string(Classification c) noexcept;
[[nodiscard]] Bit expected_output(GateKind kind, Bit in1, Bit in2) noexcept;

// The two seeds used to initialize bits: the reference seed and its partner
// (DPO: (0.5, 0) and its negation; KPO: a = 0.1 and 0.1i; DLM: {a, b} = {0.1, 0.1}
// and {0.1i, 0.1i}).
struct SeedPair {
  SystemState reference;
  SystemState partner;
};
[[nodiscard]] SeedPair default_seeds(ModelKind kind);

struct Calibration {
  Bit reference_bit = Bit::Undefined;  // what the reference seed relaxes to
  double steady_amplitude = 0.0;
  double r_min = 0.0;
};

struct InitResult {
  SystemState state;  // uncoupled network state after relaxation
  double time = 0.0;
  std::vector<Bit> bits;
  DemodResult demod;
};

// Parameter set plus everything derived from it once: time step, readout
// threshold, seed-to-bit assignment and cached initial states. Thread-safe.
class ProtocolContext {
 public:
  explicit ProtocolContext(ModelParams params, ProtocolTiming timing = {});

  [[nodiscard]] const ModelParams& params() const noexcept { return params_; }
  [[nodiscard]] const ProtocolTiming& timing() const noexcept { return timing_; }
  [[nodiscard]] const Calibration& calibration() const noexcept { return calibration_; }
  [[nodiscard]] double drive_period() const noexcept { return period_; }
  [[nodiscard]] double omega_R() const noexcept;
  [[nodiscard]] double dt() const noexcept { return period_ / timing_.steps_per_period; }
  [[nodiscard]] double r_min() const noexcept { return calibration_.r_min; }
  [[nodiscard]] bool noiseless() const;

  // Single-site seed that relaxes to `bit`.
  [[nodiscard]] SystemState seed(Bit bit) const;
  // Duration snapped to a whole number of steps.
  [[nodiscard]] double round_duration(double duration) const noexcept;
  [[nodiscard]] IntegrationConfig config(double t0, double tf) const;

  // Cached initialize_bits(targets, relax_before) for this context.
  [[nodiscard]] const InitResult& initial(const std::vector<Bit>& targets) const;

 private:
  ModelParams params_;
  ProtocolTiming timing_;
  double period_ = 0.0;
  Calibration calibration_;
  mutable std::mutex mutex_;
  mutable std::map<std::vector<Bit>, std::unique_ptr<InitResult>> cache_;
};

// Relaxes uncoupled, noiseless sites from their seeds for `relax` periods and
// checks every site holds its target. Throws InitializationError otherwise.
[[nodiscard]] InitResult initialize_bits(const ProtocolContext& ctx,
                                         const std::vector<Bit>& targets, double relax);

struct FlipOutcome {
  bool success = false;
  Bit initial = Bit::One;
  std::array<Bit, 2> final_bits{Bit::Undefined, Bit::Undefined};
  double tq = 0.0;  // rounded pulse duration (time units)
};

// Two sites prepared in the same bit, coupled with height j for T_q (time units).
[[nodiscard]] FlipOutcome run_flip(const ProtocolContext& ctx, double j, double tq,
                                   std::uint64_t seed = 0, Bit initial = Bit::One);

// Site roles in the four-site gate network (star around O).
inline constexpr std::size_t kInput1 = 0;
inline constexpr std::size_t kInput2 = 1;
inline constexpr std::size_t kOutput = 2;
inline constexpr std::size_t kReference = 3;

[[nodiscard]] Network gate_network(double j, std::array<double, 2> edge_scale = {1.0, 1.0},
                                   double j_reference = 0.0);

struct GateSpec {
  GateKind kind = GateKind::Nand;
  std::array<Bit, 2> inputs{Bit::One, Bit::One};
  double coupling = 0.0;
  double tq = 0.0;                          // time units
  std::array<double, 2> edge_scale{1.0, 1.0};  // per-input multipliers of `coupling`
};

struct GateOutcome {
  std::array<Bit, 2> inputs{};
  Bit output = Bit::Undefined;
  Bit expected = Bit::Undefined;
  std::array<Bit, 2> inputs_after{Bit::Undefined, Bit::Undefined};
  std::array<bool, 2> input_flipped{false, false};
  Classification classification = Classification::Fail;
  std::vector<cplx> amplitude_before;
  std::vector<cplx> amplitude_after;
  double tq = 0.0;
  double pulse_start = 0.0;
  std::uint64_t seed = 0;
  std::optional<Trajectory> trajectory;  // pulse + relaxation, when requested
};

[[nodiscard]] GateOutcome run_gate(const ProtocolContext& ctx, const GateSpec& spec,
                                   std::uint64_t seed = 0, bool keep_trajectory = false);

struct TruthTableResult {
  GateKind kind = GateKind::Nand;
  std::array<GateOutcome, 4> rows;  // inputs 00, 01, 10, 11
  Classification aggregate = Classification::Fail;

  [[nodiscard]] bool outputs_correct() const noexcept;
  [[nodiscard]] bool success(CountPolicy policy) const noexcept;
};

[[nodiscard]] TruthTableResult run_truth_table(const ProtocolContext& ctx, GateKind kind, double j,
                                               double tq, std::uint64_t seed = 0);

// Fraction of realizations (seed derive_seed(base_seed, k)) whose truth table
// succeeds under `policy`. A noiseless context is evaluated once.
[[nodiscard]] double success_probability(const ProtocolContext& ctx, GateKind kind, double j,
                                         double tq, std::size_t realizations,
                                         std::uint64_t base_seed,
                                         CountPolicy policy = CountPolicy::OutputOnly);

struct ResetOutcome {
  double delta_phi = 0.0;  // NaN when either site ends undefined
  Bit output = Bit::Undefined;
  Bit reference = Bit::Undefined;
  double quench_residual = 0.0;  // output amplitude just before re-driving
  bool quenched = false;         // residual below r_min
  double tq = 0.0;
};

// Two sites (O = 0, R = 1): O's drive is gated off for `quench` periods, then
// re-enabled together with a coupling pulse of height j_R for T_q (time units).
[[nodiscard]] ResetOutcome run_reset(const ProtocolContext& ctx, double j_reset, double tq,
                                     std::uint64_t seed = 0, Bit output_initial = Bit::Zero,
                                     Bit reference_initial = Bit::One);

}  // namespace pdl
