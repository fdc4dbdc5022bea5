#include "pdlogic/integrator.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pdlogic/error.hpp"
#include "pdlogic/rng.hpp"

namespace pdl {

namespace {

struct DpoField {
  const DpoParams& p;
  void operator()(std::span<const double> y, double t, const ScheduleSet& s,
                  std::span<double> out) const noexcept {
    dpo_drift(y, t, p, s, out);
  }
};
struct KpoField {
  const KpoParams& p;
  void operator()(std::span<const double> y, double t, const ScheduleSet& s,
                  std::span<double> out) const noexcept {
    kpo_drift(y, t, p, s, out);
  }
};
struct DlmField {
  const DlmParams& p;
  void operator()(std::span<const double> y, double t, const ScheduleSet& s,
                  std::span<double> out) const noexcept {
    dlm_drift(y, t, p, s, out);
  }
};

bool all_finite(std::span<const double> y) noexcept {
  double acc = 0.0;
  for (double v : y) acc += v * 0.0;
  return acc == 0.0;
}

// Adds this step's noise increment to `w` (zeroed by the caller).
void noise_increment(const NoiseChannel& noise, std::size_t per_site, std::uint64_t seed,
                     std::uint64_t step, double sqrt_dt, std::span<double> w) {
  const std::size_t sites = noise.amplitude.size();
  for (std::size_t i = 0; i < sites; ++i) {
    const double amp = noise.amplitude[i];
    if (amp == 0.0) continue;
    const auto n = rng::normal_pair(seed, step, static_cast<std::uint32_t>(i), 0u);
    if (noise.kind == NoiseKind::RealAdditive) {
      w[i * per_site + 1] = amp * sqrt_dt * n[0];
    } else {
      // da += -i * amp * dW with dW = (n0 + i n1) sqrt(dt / 2).
      const double s = amp * sqrt_dt * std::numbers::sqrt2 * 0.5;
      w[i * per_site] = s * n[1];
      w[i * per_site + 1] = -s * n[0];
    }
  }
}

template <typename Field>
Trajectory run(const Field& field, const ModelParams& params, const ScheduleSet& sched,
               const SystemState& init, const IntegrationConfig& cfg) {
  const std::size_t dim = init.values().size();
  const std::size_t per_site = components_per_site(init.model());
  const std::int64_t steps = steps_for(cfg.tf - cfg.t0, cfg.dt);
  const NoiseChannel noise = noise_amplitudes(params);
  const bool noisy = !noise.silent() && std::isfinite(cfg.noise_enabled_from);
  const double sqrt_dt = std::sqrt(cfg.dt);
  const auto* dlm = std::get_if<DlmParams>(&params);

  Trajectory traj;
  traj.model = init.model();
  traj.sites = init.sites();
  traj.dim = dim;
  traj.config = cfg;
  traj.config.tf = cfg.t0 + static_cast<double>(steps) * cfg.dt;

  std::vector<double> y(init.values().begin(), init.values().end());
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim), w(dim);

  const auto record = [&](std::int64_t k, double t) {
    if (k % static_cast<std::int64_t>(cfg.sample_stride) != 0) return;
    if (t < cfg.record_from - 1e-9 * cfg.dt) return;
    traj.times.push_back(t);
    traj.data.insert(traj.data.end(), y.begin(), y.end());
  };
  const auto check_dlm = [&](double t) {
    if (dlm == nullptr || traj.diagnostics.normal_phase_violation) return;
    for (std::size_t i = 0; i < init.sites(); ++i) {
      const double b2 = y[4 * i + 2] * y[4 * i + 2] + y[4 * i + 3] * y[4 * i + 3];
      if (b2 / dlm->N >= 0.5) {
        traj.diagnostics.normal_phase_violation = true;
        traj.diagnostics.first_violation_time = t;
        return;
      }
    }
  };

  record(0, cfg.t0);
  check_dlm(cfg.t0);
  const double half = 0.5 * cfg.dt;
  for (std::int64_t k = 0; k < steps; ++k) {
    const double t = cfg.t0 + static_cast<double>(k) * cfg.dt;
    const double t_next = cfg.t0 + static_cast<double>(k + 1) * cfg.dt;
    field(y, t, sched, k1);
    if (noisy && t >= cfg.noise_enabled_from) {
      std::fill(w.begin(), w.end(), 0.0);
      noise_increment(noise, per_site, cfg.rng_seed, static_cast<std::uint64_t>(k), sqrt_dt, w);
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + cfg.dt * k1[i] + w[i];
      field(tmp, t_next, sched, k2);
      for (std::size_t i = 0; i < dim; ++i) y[i] += half * (k1[i] + k2[i]) + w[i];
    } else {
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + half * k1[i];
      field(tmp, t + half, sched, k2);
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + half * k2[i];
      field(tmp, t + half, sched, k3);
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + cfg.dt * k3[i];
      field(tmp, t_next, sched, k4);
      const double sixth = cfg.dt / 6.0;
      for (std::size_t i = 0; i < dim; ++i) {
        y[i] += sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
      }
    }
    if (!all_finite(y)) {
      throw NumericalError("state became non-finite at t = " + std::to_string(t_next), t_next);
    }
    check_dlm(t_next);
    record(k + 1, t_next);
  }

  traj.final_state = init;
  std::copy(y.begin(), y.end(), traj.final_state.values().begin());
  traj.final_time = traj.config.tf;
  return traj;
}

}  // namespace

std::int64_t steps_for(double duration, double dt) noexcept {
  return static_cast<std::int64_t>(std::llround(duration / dt));
}

IntegrationConfig make_config(const ModelParams& params, double t0, double tf,
                              int steps_per_period, int samples_per_subharmonic) {
  if (steps_per_period <= 0 || samples_per_subharmonic <= 0 ||
      (2 * steps_per_period) % samples_per_subharmonic != 0) {
    throw ConfigError("samples_per_subharmonic must divide 2 * steps_per_period");
  }
  IntegrationConfig cfg;
  cfg.dt = drive_period(params) / steps_per_period;
  cfg.t0 = t0;
  cfg.tf = tf;
  cfg.sample_stride =
      static_cast<std::size_t>(2 * steps_per_period / samples_per_subharmonic);
  return cfg;
}

SystemState Trajectory::state(std::size_t sample) const {
  SystemState s(model, sites);
  const auto r = row(sample);
  std::copy(r.begin(), r.end(), s.values().begin());
  return s;
}

Trajectory integrate(const ModelParams& params, const ScheduleSet& sched,
                     const SystemState& init, const IntegrationConfig& cfg) {
  validate(params);
  const Network& net = network_of(params);
  if (init.model() != kind_of(params) || init.sites() != net.sites()) {
    throw ConfigError("initial state does not match the model variant or site count");
  }
  if (!init.finite()) throw NumericalError("initial state is not finite", cfg.t0);
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("dt must be > 0");
  if (!(cfg.tf > cfg.t0)) throw ConfigError("tf must exceed t0");
  if (cfg.sample_stride == 0) throw ConfigError("sample_stride must be >= 1");
  const double max_interval = 2.0 * drive_period(params) / 32.0;
  if (cfg.dt * static_cast<double>(cfg.sample_stride) > max_interval * (1.0 + 1e-12)) {
    throw ConfigError("sample interval exceeds 1/32 of the subharmonic period");
  }
  sched.validate(net);

  return std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, DpoParams>) {
          return run(DpoField{p}, params, sched, init, cfg);
        } else if constexpr (std::is_same_v<P, KpoParams>) {
          return run(KpoField{p}, params, sched, init, cfg);
        } else {
          return run(DlmField{p}, params, sched, init, cfg);
        }
      },
      params);
}

}  // namespace pdl
