#pragma once

// Absolute-time-phase demodulation, bit classification and basin-of-attraction maps.

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "pdlogic/integrator.hpp"
#include "pdlogic/models.hpp"

namespace pdl {

enum class Bit : std::int8_t { Zero = 0, One = 1, Undefined = -1 };

[[nodiscard]] constexpr Bit complement(Bit b) noexcept {
  return b == Bit::Zero ? Bit::One : b == Bit::One ? Bit::Zero : Bit::Undefined;
}
[[nodiscard]] constexpr Bit bit_from_int(int v) noexcept { return v == 0 ? Bit::Zero : Bit::One; }
[[nodiscard]] std::string_view to_string(Bit b) noexcept;

// Scalar per site demodulated from a sample row.
using Observable = std::function<double(std::span<const double> row, std::size_t site)>;

// theta for the DPO, Re a for KPO and DLM.
[[nodiscard]] Observable default_observable(ModelKind kind);

struct DemodResult {
  double omega_R = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  std::vector<cplx> amplitude;  // r e^{i phi} per site

  [[nodiscard]] double r(std::size_t site) const;
  [[nodiscard]] double phi(std::size_t site) const;
};

// (omega_R / pi) * integral over [t_start, t_start + 2 pi / omega_R] of
// e^{i omega_R tau} s(tau), trapezoidal on the samples with linear
// interpolation at window edges that fall between samples.
// Throws NumericalError if the window is not covered or has < 32 samples.
[[nodiscard]] cplx demodulate_series(std::span<const double> times, std::span<const double> values,
                                     double omega_R, double t_start);

[[nodiscard]] DemodResult demodulate(const Trajectory& traj, double omega_R, double t_start,
                                     const Observable& observable);
[[nodiscard]] DemodResult demodulate(const Trajectory& traj, double omega_R, double t_start);

// Mean complex amplitude over the last `windows` subharmonic periods of the trajectory.
[[nodiscard]] DemodResult readout(const Trajectory& traj, double omega_R, int windows = 8);

// Undefined when r < r_min or phi == 0; phi < 0 is the 1-bit, phi > 0 the 0-bit.
[[nodiscard]] Bit classify_bit(cplx amplitude, double r_min) noexcept;
[[nodiscard]] std::vector<Bit> classify_bit(const DemodResult& d, double r_min);

struct FramePoint {
  double X = 0.0;
  double Y = 0.0;
};
[[nodiscard]] FramePoint rotating_frame_point(cplx amplitude) noexcept;
[[nodiscard]] std::vector<FramePoint> rotating_frame_point(const DemodResult& d);

// Circular distance between two phases, in [0, pi].
[[nodiscard]] double delta_phi(double phi1, double phi2) noexcept;

// ---------------------------------------------------------------------------
// Basins of attraction

struct Axis {
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 2;

  [[nodiscard]] double at(std::size_t i) const noexcept {
    return count < 2 ? min : min + (max - min) * static_cast<double>(i) / (count - 1);
  }
  [[nodiscard]] double step() const noexcept {
    return count < 2 ? 0.0 : (max - min) / static_cast<double>(count - 1);
  }
};

enum class BasinFrame { Lab, Rotating };

// Cell label for basin maps: a Bit value, or Unreachable for rotating-frame
// cells that no lab-frame seed lands in.
enum class CellLabel : std::int8_t { Zero = 0, One = 1, Undefined = -1, Unreachable = -2 };

struct BasinOptions {
  double final_periods = 150.0;  // t_f in drive periods
  int steps_per_period = 256;
  int readout_windows = 8;
  double r_min = -1.0;  // < 0: 5% of the steady-state amplitude
  // Rotating frame only: the lab grid searched for seeds.
  Axis seed_theta{-3.0, 3.0, 201};
  Axis seed_theta_dot{-3.0, 3.0, 201};
};

struct BasinMap {
  BasinFrame frame = BasinFrame::Lab;
  Axis x;  // theta or X
  Axis y;  // theta_dot or Y
  std::vector<CellLabel> labels;  // row-major, x fastest
  // Rotating frame: the achieved (X, Y) and (r, phi) at t = 0 of the seed used per cell.
  std::vector<FramePoint> achieved;
  std::vector<cplx> achieved_amplitude;
  double r_min = 0.0;
  double unreachable_fraction = 0.0;

  [[nodiscard]] CellLabel at(std::size_t ix, std::size_t iy) const {
    return labels[iy * x.count + ix];
  }
};

// Steady-state amplitude of a single uncoupled noiseless site relaxed from the
// reference seed (theta, theta_dot) = (0.5, 0).
[[nodiscard]] double dpo_steady_amplitude(const DpoParams& params, int steps_per_period = 512);

// Final bit of a single noiseless DPO started from (theta, theta_dot).
[[nodiscard]] CellLabel basin_label(const DpoParams& single, double theta, double theta_dot,
                                    const BasinOptions& options, double r_min);

[[nodiscard]] BasinMap basin_scan_lab(const DpoParams& params, const Axis& theta,
                                      const Axis& theta_dot, const BasinOptions& options = {});
[[nodiscard]] BasinMap basin_scan_rotating(const DpoParams& params, const Axis& X, const Axis& Y,
                                           const BasinOptions& options = {});

}  // namespace pdl
