#pragma once

// Parameters, state layout, drift fields and noise channels for the three
// period-doubling systems: the dissipative parametric oscillator (DPO) network,
// the Kerr parametric oscillator (KPO) network and the Dicke lattice model (DLM).
// All frequencies are in units of the model's reference frequency.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "pdlogic/schedule.hpp"

namespace pdl {

using cplx = std::complex<double>;

enum class ModelKind { Dpo, Kpo, Dlm };

[[nodiscard]] std::string_view to_string(ModelKind kind) noexcept;

// Undirected edge with a base coupling (j for the DPO, J for KPO/DLM).
struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;
  double coupling = 0.0;
};

class Network {
 public:
  Network() = default;
  explicit Network(std::size_t sites, std::vector<Edge> edges = {});

  // Open chain 0-1-...-(n-1); missing neighbours contribute nothing.
  static Network chain(std::size_t sites, double coupling);
  // Every leaf connected to `hub`.
  static Network star(std::size_t sites, std::size_t hub,
                      const std::vector<std::size_t>& leaves, double coupling);

  [[nodiscard]] std::size_t sites() const noexcept { return sites_; }
  [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
  void set_coupling(std::size_t edge, double coupling);

 private:
  std::size_t sites_ = 1;
  std::vector<Edge> edges_;
};

struct DpoParams {
  double Omega = 1.0;    // natural frequency
  double A = 0.0;        // drive amplitude
  double Omega_d = 2.0;  // drive frequency
  double gamma = 0.0;    // damping
  double T_tilde = 0.0;  // dimensionless temperature
  Network network;
};

struct KpoParams {
  double Delta = 1.0;      // detuning
  double chi = 1.0;        // Kerr strength
  double p0 = 0.0;         // two-photon pump
  double A0 = 0.0;         // pump modulation depth
  double omega_mod = 1.0;  // pump modulation frequency
  double kappa = 0.0;      // single-photon loss
  double N = 1.0;          // particle-number scale of the truncated Wigner noise
  bool quantum_noise = false;
  Network network;
};

enum class LambdaCriticalForm {
  Printed,   // 1/2 sqrt((w0/w)(kappa + w^2))
  Standard,  // 1/2 sqrt((w0/w)(kappa^2 + w^2))
};

struct DlmParams {
  double omega = 1.0;    // photon frequency
  double omega0 = 1.0;   // spin frequency
  double lambda0 = 0.0;  // base light-matter coupling
  double A1 = 0.0;       // coupling modulation depth
  double omega_d = 1.0;  // modulation frequency
  double kappa = 0.0;    // photon loss
  double N = 1.0;        // spins per site
  bool quantum_noise = false;
  LambdaCriticalForm lambda_c_form = LambdaCriticalForm::Printed;
  Network network;
};

using ModelParams = std::variant<DpoParams, KpoParams, DlmParams>;

[[nodiscard]] ModelKind kind_of(const ModelParams& params) noexcept;
[[nodiscard]] const Network& network_of(const ModelParams& params) noexcept;
void set_network(ModelParams& params, Network network);
[[nodiscard]] ModelParams with_network(ModelParams params, Network network);

// Period of the parametric modulation and the subharmonic response frequency.
[[nodiscard]] double drive_period(const ModelParams& params) noexcept;
[[nodiscard]] double subharmonic_frequency(const ModelParams& params) noexcept;

[[nodiscard]] double lambda_critical(const DlmParams& params, LambdaCriticalForm form);
// Uses params.lambda_c_form.
[[nodiscard]] double lambda_critical(const DlmParams& params);

// Throws ConfigError on invariant violations.
void validate(const ModelParams& params);

// Real state components per site: DPO (theta, theta_dot); KPO (Re a, Im a);
// DLM (Re a, Im a, Re b, Im b).
[[nodiscard]] constexpr std::size_t components_per_site(ModelKind kind) noexcept {
  return kind == ModelKind::Dlm ? 4 : 2;
}

class SystemState {
 public:
  SystemState() = default;
  SystemState(ModelKind kind, std::size_t sites)
      : kind_(kind), sites_(sites), values_(sites * components_per_site(kind), 0.0) {}

  [[nodiscard]] ModelKind model() const noexcept { return kind_; }
  [[nodiscard]] std::size_t sites() const noexcept { return sites_; }
  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  [[nodiscard]] double theta(std::size_t i) const { return values_[2 * i]; }
  [[nodiscard]] double theta_dot(std::size_t i) const { return values_[2 * i + 1]; }
  void set_dpo(std::size_t i, double theta, double theta_dot) {
    values_[2 * i] = theta;
    values_[2 * i + 1] = theta_dot;
  }

  [[nodiscard]] cplx a(std::size_t i) const {
    const std::size_t k = i * components_per_site(kind_);
    return {values_[k], values_[k + 1]};
  }
  void set_a(std::size_t i, cplx v) {
    const std::size_t k = i * components_per_site(kind_);
    values_[k] = v.real();
    values_[k + 1] = v.imag();
  }
  [[nodiscard]] cplx b(std::size_t i) const { return {values_[4 * i + 2], values_[4 * i + 3]}; }
  void set_b(std::size_t i, cplx v) {
    values_[4 * i + 2] = v.real();
    values_[4 * i + 3] = v.imag();
  }

  [[nodiscard]] bool finite() const noexcept;

  friend bool operator==(const SystemState&, const SystemState&) = default;

 private:
  ModelKind kind_ = ModelKind::Dpo;
  std::size_t sites_ = 0;
  std::vector<double> values_;
};

// Drift fields on the flat state layout. `y` and `dydt` have
// sites * components_per_site entries; schedules must already be validated.
void dpo_drift(std::span<const double> y, double t, const DpoParams& p,
               const ScheduleSet& sched, std::span<double> dydt) noexcept;
void kpo_drift(std::span<const double> y, double t, const KpoParams& p,
               const ScheduleSet& sched, std::span<double> dydt) noexcept;
void dlm_drift(std::span<const double> y, double t, const DlmParams& p,
               const ScheduleSet& sched, std::span<double> dydt) noexcept;

// Checked drift: throws ConfigError on a model/state mismatch and
// NumericalError on a non-finite state.
[[nodiscard]] SystemState drift(const ModelParams& params, const SystemState& state, double t,
                                const ScheduleSet& sched);

enum class NoiseKind {
  RealAdditive,     // DPO: white force on theta_dot
  ComplexAdditive,  // KPO/DLM: complex white noise on the photon amplitude a
};

struct NoiseChannel {
  NoiseKind kind = NoiseKind::RealAdditive;
  std::vector<double> amplitude;  // one per site

  [[nodiscard]] bool silent() const noexcept;
};

[[nodiscard]] NoiseChannel noise_amplitudes(const ModelParams& params);

}  // namespace pdl
