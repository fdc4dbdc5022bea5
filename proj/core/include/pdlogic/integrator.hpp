#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "pdlogic/models.hpp"
#include "pdlogic/schedule.hpp"

namespace pdl {

struct IntegrationConfig {
  double dt = 0.0;
  double t0 = 0.0;
  double tf = 0.0;  // snapped to t0 + round((tf - t0) / dt) * dt
  std::size_t sample_stride = 1;
  std::uint64_t rng_seed = 0;
  // Noise increments are zero for steps starting before this time.
  double noise_enabled_from = std::numeric_limits<double>::infinity();
  // Samples before this time are not stored (the uniform grid is kept).
  double record_from = -std::numeric_limits<double>::infinity();
};

// dt = T_d / steps_per_period with sample_stride giving `samples_per_subharmonic`
// samples per subharmonic period 2 T_d.
[[nodiscard]] IntegrationConfig make_config(const ModelParams& params, double t0, double tf,
                                            int steps_per_period = 512,
                                            int samples_per_subharmonic = 64);

struct Diagnostics {
  // DLM only: |b|^2 / N reached 0.5 somewhere (Holstein-Primakoff expansion
  // no longer small).
  bool normal_phase_violation = false;
  double first_violation_time = 0.0;
};

class Trajectory {
 public:
  ModelKind model = ModelKind::Dpo;
  std::size_t sites = 0;
  std::size_t dim = 0;
  std::vector<double> times;
  std::vector<double> data;  // samples x dim, row-major
  IntegrationConfig config;
  SystemState final_state;
  double final_time = 0.0;
  Diagnostics diagnostics;

  [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
  [[nodiscard]] std::span<const double> row(std::size_t sample) const {
    return std::span<const double>(data).subspan(sample * dim, dim);
  }
  [[nodiscard]] SystemState state(std::size_t sample) const;
  [[nodiscard]] double sample_interval() const noexcept {
    return config.dt * static_cast<double>(config.sample_stride);
  }
};

// RK4 on steps without active noise, stochastic Heun on steps with noise.
// Deterministic in (params, sched, init, cfg). Throws ConfigError for invalid
// input and NumericalError (carrying the time) when the state stops being finite.
[[nodiscard]] Trajectory integrate(const ModelParams& params, const ScheduleSet& sched,
                                   const SystemState& init, const IntegrationConfig& cfg);

// Integer number of steps that best approximates a duration.
[[nodiscard]] std::int64_t steps_for(double duration, double dt) noexcept;

}  // namespace pdl
