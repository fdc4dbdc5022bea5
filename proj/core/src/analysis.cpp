#include "pdlogic/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pdlogic/error.hpp"
#include "pdlogic/parallel.hpp"

namespace pdl {

namespace {

constexpr double kPi = std::numbers::pi;

double interpolate(std::span<const double> times, std::span<const double> values, double t) {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return values.front();
  if (it == times.end()) return values.back();
  const std::size_t hi = static_cast<std::size_t>(it - times.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times[lo]) / (times[hi] - times[lo]);
  return values[lo] + w * (values[hi] - values[lo]);
}

}  // namespace

std::string_view to_string(Bit b) noexcept {
  switch (b) {
    case Bit::Zero: return "0";
    case Bit::One: return "1";
    case Bit::Undefined: return "?";
  }
  return "?";
}

Observable default_observable(ModelKind kind) {
  const std::size_t stride = components_per_site(kind);
  return [stride](std::span<const double> row, std::size_t site) { return row[site * stride]; };
}

double DemodResult::r(std::size_t site) const { return std::abs(amplitude.at(site)); }
double DemodResult::phi(std::size_t site) const { return std::arg(amplitude.at(site)); }

cplx demodulate_series(std::span<const double> times, std::span<const double> values,
                       double omega_R, double t_start) {
  if (times.size() != values.size() || times.size() < 2) {
    throw NumericalError("demodulation needs matching sample arrays");
  }
  if (!(omega_R > 0.0)) throw NumericalError("demodulation needs omega_R > 0");
  const double period = 2.0 * kPi / omega_R;
  const double t_end = t_start + period;
  const double h = times[1] - times[0];
  const double eps = 1e-9 * std::max(std::abs(h), 1e-300);
  if (times.front() > t_start + eps || times.back() < t_end - eps) {
    throw NumericalError("demodulation window exceeds the trajectory", t_start);
  }

  // Nodes: window start, interior samples, window end.
  auto first = std::lower_bound(times.begin(), times.end(), t_start - eps);
  auto last = std::upper_bound(times.begin(), times.end(), t_end + eps);
  std::size_t lo = static_cast<std::size_t>(first - times.begin());
  std::size_t hi = static_cast<std::size_t>(last - times.begin());
  if (hi - lo < 32) throw NumericalError("fewer than 32 samples in the demodulation window");

  cplx sum{0.0, 0.0};
  double prev_t = t_start;
  double prev_v = std::abs(times[lo] - t_start) <= eps ? values[lo] : interpolate(times, values, t_start);
  if (std::abs(times[lo] - t_start) <= eps) ++lo;
  const auto kernel = [omega_R](double t, double v) { return std::polar(v, omega_R * t); };
  cplx prev_f = kernel(prev_t, prev_v);
  for (std::size_t i = lo; i < hi; ++i) {
    const double t = times[i];
    if (t >= t_end - eps) break;
    const cplx f = kernel(t, values[i]);
    sum += 0.5 * (t - prev_t) * (prev_f + f);
    prev_t = t;
    prev_f = f;
  }
  const cplx f_end = kernel(t_end, interpolate(times, values, t_end));
  sum += 0.5 * (t_end - prev_t) * (prev_f + f_end);
  return sum * (omega_R / kPi);
}

DemodResult demodulate(const Trajectory& traj, double omega_R, double t_start,
                       const Observable& observable) {
  DemodResult out;
  out.omega_R = omega_R;
  out.t_start = t_start;
  out.t_end = t_start + 2.0 * kPi / omega_R;
  out.amplitude.resize(traj.sites);
  std::vector<double> series(traj.size());
  for (std::size_t site = 0; site < traj.sites; ++site) {
    for (std::size_t k = 0; k < traj.size(); ++k) series[k] = observable(traj.row(k), site);
    out.amplitude[site] = demodulate_series(traj.times, series, omega_R, t_start);
  }
  return out;
}

DemodResult demodulate(const Trajectory& traj, double omega_R, double t_start) {
  return demodulate(traj, omega_R, t_start, default_observable(traj.model));
}

DemodResult readout(const Trajectory& traj, double omega_R, int windows) {
  if (windows < 1) throw NumericalError("readout needs at least one window");
  if (traj.times.empty()) throw NumericalError("readout of an empty trajectory");
  const double period = 2.0 * kPi / omega_R;
  const double end = traj.times.back();
  const std::size_t stride = components_per_site(traj.model);
  DemodResult out;
  out.omega_R = omega_R;
  out.t_start = end - windows * period;
  out.t_end = end;
  out.amplitude.assign(traj.sites, cplx{});

  // Window starts sit on the sample grid when the period is a whole number of samples.
  const double h = traj.sample_interval();
  const double per_window = period / h;
  const bool aligned = std::abs(per_window - std::round(per_window)) < 1e-9 * per_window;
  std::vector<double> series(traj.size());
  for (std::size_t site = 0; site < traj.sites; ++site) {
    for (std::size_t k = 0; k < traj.size(); ++k) series[k] = traj.row(k)[site * stride];
    cplx acc{};
    for (int w = 0; w < windows; ++w) {
      double start = end - (windows - w) * period;
      if (aligned) {
        const auto back = static_cast<std::int64_t>(std::llround((windows - w) * per_window));
        const auto idx = static_cast<std::int64_t>(traj.size()) - 1 - back;
        if (idx < 0) throw NumericalError("readout windows exceed the trajectory", start);
        start = traj.times[static_cast<std::size_t>(idx)];
      }
      acc += demodulate_series(traj.times, series, omega_R, start);
    }
    out.amplitude[site] = acc / static_cast<double>(windows);
  }
  return out;
}

Bit classify_bit(cplx amplitude, double r_min) noexcept {
  if (!(std::abs(amplitude) >= r_min)) return Bit::Undefined;
  const double phi = std::arg(amplitude);
  if (phi < 0.0) return Bit::One;
  if (phi > 0.0) return Bit::Zero;
  return Bit::Undefined;
}

std::vector<Bit> classify_bit(const DemodResult& d, double r_min) {
  std::vector<Bit> bits;
  bits.reserve(d.amplitude.size());
  for (cplx a : d.amplitude) bits.push_back(classify_bit(a, r_min));
  return bits;
}

FramePoint rotating_frame_point(cplx amplitude) noexcept {
  return {amplitude.real(), amplitude.imag()};
}

std::vector<FramePoint> rotating_frame_point(const DemodResult& d) {
  std::vector<FramePoint> out;
  out.reserve(d.amplitude.size());
  for (cplx a : d.amplitude) out.push_back(rotating_frame_point(a));
  return out;
}

double delta_phi(double phi1, double phi2) noexcept {
  const double d = std::fmod(std::abs(phi1 - phi2), 2.0 * kPi);
  return std::min(d, 2.0 * kPi - d);
}

// ---------------------------------------------------------------------------

namespace {

DpoParams single_site(DpoParams p) {
  p.network = Network(1);
  p.T_tilde = 0.0;
  return p;
}

Trajectory relax_single(const DpoParams& single, double theta, double theta_dot, double periods,
                        int steps_per_period) {
  const ModelParams params = single;
  IntegrationConfig cfg = make_config(params, 0.0, periods * drive_period(params),
                                      steps_per_period, std::min(64, 2 * steps_per_period));
  SystemState init(ModelKind::Dpo, 1);
  init.set_dpo(0, theta, theta_dot);
  return integrate(params, {}, init, cfg);
}

CellLabel to_label(Bit b) { return static_cast<CellLabel>(static_cast<std::int8_t>(b)); }

}  // namespace

double dpo_steady_amplitude(const DpoParams& params, int steps_per_period) {
  const DpoParams single = single_site(params);
  const Trajectory traj = relax_single(single, 0.5, 0.0, 160.0, steps_per_period);
  return readout(traj, subharmonic_frequency(ModelParams{single}), 8).r(0);
}

CellLabel basin_label(const DpoParams& single, double theta, double theta_dot,
                      const BasinOptions& options, double r_min) {
  try {
    const Trajectory traj =
        relax_single(single, theta, theta_dot, options.final_periods, options.steps_per_period);
    const DemodResult d =
        readout(traj, subharmonic_frequency(ModelParams{single}), options.readout_windows);
    return to_label(classify_bit(d.amplitude[0], r_min));
  } catch (const NumericalError&) {
    return CellLabel::Undefined;
  }
}

BasinMap basin_scan_lab(const DpoParams& params, const Axis& theta, const Axis& theta_dot,
                        const BasinOptions& options) {
  const DpoParams single = single_site(params);
  BasinMap map;
  map.frame = BasinFrame::Lab;
  map.x = theta;
  map.y = theta_dot;
  map.r_min = options.r_min >= 0.0 ? options.r_min
                                   : 0.05 * dpo_steady_amplitude(single, options.steps_per_period);
  map.labels.assign(theta.count * theta_dot.count, CellLabel::Undefined);
  parallel_for(map.labels.size(), [&](std::size_t cell) {
    const std::size_t ix = cell % theta.count;
    const std::size_t iy = cell / theta.count;
    map.labels[cell] = basin_label(single, theta.at(ix), theta_dot.at(iy), options, map.r_min);
  });
  return map;
}

BasinMap basin_scan_rotating(const DpoParams& params, const Axis& X, const Axis& Y,
                             const BasinOptions& options) {
  const DpoParams single = single_site(params);
  const ModelParams model{single};
  const double omega_R = subharmonic_frequency(model);
  BasinMap map;
  map.frame = BasinFrame::Rotating;
  map.x = X;
  map.y = Y;
  map.r_min = options.r_min >= 0.0 ? options.r_min
                                   : 0.05 * dpo_steady_amplitude(single, options.steps_per_period);

  const Axis& st = options.seed_theta;
  const Axis& sv = options.seed_theta_dot;
  const std::size_t seeds = st.count * sv.count;
  std::vector<cplx> start(seeds);
  std::vector<CellLabel> final_label(seeds, CellLabel::Undefined);
  parallel_for(seeds, [&](std::size_t k) {
    const double theta = st.at(k % st.count);
    const double theta_dot = sv.at(k / st.count);
    try {
      const Trajectory traj =
          relax_single(single, theta, theta_dot, options.final_periods, options.steps_per_period);
      start[k] = demodulate(traj, omega_R, 0.0).amplitude[0];
      final_label[k] =
          to_label(classify_bit(readout(traj, omega_R, options.readout_windows).amplitude[0],
                                map.r_min));
    } catch (const NumericalError&) {
      start[k] = cplx{std::numeric_limits<double>::quiet_NaN(), 0.0};
    }
  });

  // Each seed lands in the target cell nearest its achieved point; per cell keep
  // the seed closest to the cell centre.
  const std::size_t cells = X.count * Y.count;
  map.labels.assign(cells, CellLabel::Unreachable);
  map.achieved.assign(cells, FramePoint{std::numeric_limits<double>::quiet_NaN(),
                                        std::numeric_limits<double>::quiet_NaN()});
  map.achieved_amplitude.assign(cells, cplx{});
  std::vector<double> best(cells, std::numeric_limits<double>::infinity());
  const double hx = X.step();
  const double hy = Y.step();
  for (std::size_t k = 0; k < seeds; ++k) {
    const FramePoint p = rotating_frame_point(start[k]);
    if (!std::isfinite(p.X)) continue;
    const double fx = hx > 0.0 ? (p.X - X.min) / hx : 0.0;
    const double fy = hy > 0.0 ? (p.Y - Y.min) / hy : 0.0;
    const double ix = std::round(fx);
    const double iy = std::round(fy);
    if (ix < 0 || iy < 0 || ix >= static_cast<double>(X.count) ||
        iy >= static_cast<double>(Y.count)) {
      continue;
    }
    const std::size_t cell = static_cast<std::size_t>(iy) * X.count + static_cast<std::size_t>(ix);
    const double dist = std::hypot(p.X - X.at(static_cast<std::size_t>(ix)),
                                   p.Y - Y.at(static_cast<std::size_t>(iy)));
    if (dist < best[cell]) {
      best[cell] = dist;
      map.labels[cell] = final_label[k];
      map.achieved[cell] = p;
      map.achieved_amplitude[cell] = start[k];
    }
  }
  const auto unreachable = std::count(map.labels.begin(), map.labels.end(), CellLabel::Unreachable);
  map.unreachable_fraction = static_cast<double>(unreachable) / static_cast<double>(cells);
  return map;
}

}  // namespace pdl
