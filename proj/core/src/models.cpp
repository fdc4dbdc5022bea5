#include "pdlogic/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pdlogic/error.hpp"

namespace pdl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

// Calls fn(a, b, j) for every edge whose effective coupling j(t) is nonzero.
template <typename Fn>
inline void for_each_edge(const Network& net, const ScheduleSet& sched, double t, Fn&& fn) {
  const auto& edges = net.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double j = edges[e].coupling * sched.edge_gate(e, t);
    if (j != 0.0) fn(edges[e].a, edges[e].b, j);
  }
}

}  // namespace

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::Dpo: return "dpo";
    case ModelKind::Kpo: return "kpo";
    case ModelKind::Dlm: return "dlm";
  }
  return "?";
}

Network::Network(std::size_t sites, std::vector<Edge> edges)
    : sites_(sites), edges_(std::move(edges)) {
  require(sites_ >= 1, "network needs at least one site");
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    require(e.a < sites_ && e.b < sites_, "edge references a missing site");
    require(e.a != e.b, "self-edges are not allowed");
    require(std::isfinite(e.coupling), "edge coupling must be finite");
    for (std::size_t k = 0; k < i; ++k) {
      const Edge& f = edges_[k];
      require(!((f.a == e.a && f.b == e.b) || (f.a == e.b && f.b == e.a)),
              "duplicate edge");
    }
  }
}

Network Network::chain(std::size_t sites, double coupling) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < sites; ++i) edges.push_back({i, i + 1, coupling});
  return Network(sites, std::move(edges));
}

Network Network::star(std::size_t sites, std::size_t hub, const std::vector<std::size_t>& leaves,
                      double coupling) {
  std::vector<Edge> edges;
  for (std::size_t leaf : leaves) edges.push_back({leaf, hub, coupling});
  return Network(sites, std::move(edges));
}

void Network::set_coupling(std::size_t edge, double coupling) {
  require(edge < edges_.size(), "edge index out of range");
  edges_[edge].coupling = coupling;
}

ModelKind kind_of(const ModelParams& params) noexcept {
  return static_cast<ModelKind>(params.index());
}

const Network& network_of(const ModelParams& params) noexcept {
  return std::visit([](const auto& p) -> const Network& { return p.network; }, params);
}

void set_network(ModelParams& params, Network network) {
  std::visit([&](auto& p) { p.network = std::move(network); }, params);
}

ModelParams with_network(ModelParams params, Network network) {
  set_network(params, std::move(network));
  return params;
}

double drive_period(const ModelParams& params) noexcept {
  struct {
    double operator()(const DpoParams& p) const { return kTwoPi / p.Omega_d; }
    double operator()(const KpoParams& p) const { return kTwoPi / p.omega_mod; }
    double operator()(const DlmParams& p) const { return kTwoPi / p.omega_d; }
  } period;
  return std::visit(period, params);
}

double subharmonic_frequency(const ModelParams& params) noexcept {
  return std::numbers::pi / drive_period(params);
}

double lambda_critical(const DlmParams& p, LambdaCriticalForm form) {
  require(p.omega > 0.0, "lambda_critical needs omega > 0");
  const double loss = form == LambdaCriticalForm::Printed ? p.kappa : p.kappa * p.kappa;
  return 0.5 * std::sqrt(p.omega0 / p.omega * (loss + p.omega * p.omega));
}

double lambda_critical(const DlmParams& p) { return lambda_critical(p, p.lambda_c_form); }

void validate(const ModelParams& params) {
  struct {
    void operator()(const DpoParams& p) const {
      require(std::isfinite(p.Omega) && p.Omega > 0.0, "dpo: Omega must be > 0");
      require(std::isfinite(p.Omega_d) && p.Omega_d > 0.0, "dpo: Omega_d must be > 0");
      require(std::isfinite(p.A), "dpo: A must be finite");
      require(std::isfinite(p.gamma) && p.gamma >= 0.0, "dpo: gamma must be >= 0");
      require(std::isfinite(p.T_tilde) && p.T_tilde >= 0.0, "dpo: T_tilde must be >= 0");
    }
    void operator()(const KpoParams& p) const {
      require(std::isfinite(p.Delta) && std::isfinite(p.chi) && std::isfinite(p.p0) &&
                  std::isfinite(p.A0),
              "kpo: parameters must be finite");
      require(std::isfinite(p.omega_mod) && p.omega_mod > 0.0, "kpo: omega_mod must be > 0");
      require(std::isfinite(p.kappa) && p.kappa >= 0.0, "kpo: kappa must be >= 0");
      require(p.N > 0.0, "kpo: N must be > 0");
    }
    void operator()(const DlmParams& p) const {
      require(std::isfinite(p.omega) && p.omega > 0.0, "dlm: omega must be > 0");
      require(std::isfinite(p.omega0) && p.omega0 > 0.0, "dlm: omega0 must be > 0");
      require(std::isfinite(p.omega_d) && p.omega_d > 0.0, "dlm: omega_d must be > 0");
      require(std::isfinite(p.lambda0) && std::isfinite(p.A1), "dlm: lambda0, A1 must be finite");
      require(std::isfinite(p.kappa) && p.kappa >= 0.0, "dlm: kappa must be >= 0");
      require(std::isfinite(p.N) && p.N > 0.0, "dlm: N must be > 0");
      require(p.lambda0 < lambda_critical(p), "dlm: lambda0 must be below lambda_c");
    }
  } check;
  std::visit(check, params);
}

bool SystemState::finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void dpo_drift(std::span<const double> y, double t, const DpoParams& p, const ScheduleSet& sched,
               std::span<double> dydt) noexcept {
  const std::size_t m = p.network.sites();
  const double w2 = p.Omega * p.Omega;
  const double drive = p.A * std::cos(p.Omega_d * t);
  for (std::size_t i = 0; i < m; ++i) {
    const double theta = y[2 * i];
    const double theta_dot = y[2 * i + 1];
    dydt[2 * i] = theta_dot;
    dydt[2 * i + 1] =
        -w2 * (1.0 - sched.drive_gate(i, t) * drive) * std::sin(theta) - p.gamma * theta_dot;
  }
  for_each_edge(p.network, sched, t, [&](std::size_t a, std::size_t b, double j) {
    dydt[2 * a + 1] += j * y[2 * b];
    dydt[2 * b + 1] += j * y[2 * a];
  });
}

void kpo_drift(std::span<const double> y, double t, const KpoParams& p, const ScheduleSet& sched,
               std::span<double> dydt) noexcept {
  const std::size_t m = p.network.sites();
  const double modulation = p.A0 * std::sin(p.omega_mod * t);
  // h = -Delta a - chi |a|^2 a + p(t) a*; da/dt = -i (h - sum_J) - kappa a.
  for (std::size_t i = 0; i < m; ++i) {
    const cplx a{y[2 * i], y[2 * i + 1]};
    const double pump = p.p0 * (1.0 + sched.drive_gate(i, t) * modulation);
    const cplx h = -p.Delta * a - p.chi * std::norm(a) * a + pump * std::conj(a);
    const cplx da = cplx{0.0, -1.0} * h - p.kappa * a;
    dydt[2 * i] = da.real();
    dydt[2 * i + 1] = da.imag();
  }
  // -i * (-J a_nb) = i J a_nb
  for_each_edge(p.network, sched, t, [&](std::size_t a, std::size_t b, double j) {
    dydt[2 * a] -= j * y[2 * b + 1];
    dydt[2 * a + 1] += j * y[2 * b];
    dydt[2 * b] -= j * y[2 * a + 1];
    dydt[2 * b + 1] += j * y[2 * a];
  });
}

void dlm_drift(std::span<const double> y, double t, const DlmParams& p, const ScheduleSet& sched,
               std::span<double> dydt) noexcept {
  const std::size_t m = p.network.sites();
  const double modulation = p.A1 * std::sin(p.omega_d * t);
  const double inv_2n = 0.5 / p.N;
  for (std::size_t i = 0; i < m; ++i) {
    const cplx a{y[4 * i], y[4 * i + 1]};
    const cplx b{y[4 * i + 2], y[4 * i + 3]};
    const double lambda = p.lambda0 * (1.0 + sched.drive_gate(i, t) * modulation);
    const double b2 = std::norm(b);
    const cplx ha = p.omega * a + lambda * (2.0 * b.real()) * (1.0 - b2 * inv_2n);
    const cplx hb = p.omega0 * b + lambda * (2.0 * a.real()) * (1.0 - (2.0 * b2 + b * b) * inv_2n);
    const cplx da = cplx{0.0, -1.0} * ha - p.kappa * a;
    const cplx db = cplx{0.0, -1.0} * hb;
    dydt[4 * i] = da.real();
    dydt[4 * i + 1] = da.imag();
    dydt[4 * i + 2] = db.real();
    dydt[4 * i + 3] = db.imag();
  }
  for_each_edge(p.network, sched, t, [&](std::size_t a, std::size_t b, double j) {
    dydt[4 * a] -= j * y[4 * b + 1];
    dydt[4 * a + 1] += j * y[4 * b];
    dydt[4 * b] -= j * y[4 * a + 1];
    dydt[4 * b + 1] += j * y[4 * a];
  });
}

SystemState drift(const ModelParams& params, const SystemState& state, double t,
                  const ScheduleSet& sched) {
  const Network& net = network_of(params);
  if (state.model() != kind_of(params) || state.sites() != net.sites()) {
    throw ConfigError("state does not match the model variant or site count");
  }
  if (!state.finite()) throw NumericalError("non-finite state passed to drift", t);
  sched.validate(net);
  SystemState out(state.model(), state.sites());
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, DpoParams>) {
          dpo_drift(state.values(), t, p, sched, out.values());
        } else if constexpr (std::is_same_v<P, KpoParams>) {
          kpo_drift(state.values(), t, p, sched, out.values());
        } else {
          dlm_drift(state.values(), t, p, sched, out.values());
        }
      },
      params);
  return out;
}

bool NoiseChannel::silent() const noexcept {
  return std::all_of(amplitude.begin(), amplitude.end(), [](double a) { return a == 0.0; });
}

NoiseChannel noise_amplitudes(const ModelParams& params) {
  struct {
    NoiseChannel operator()(const DpoParams& p) const {
      require(p.gamma >= 0.0 && p.T_tilde >= 0.0, "noise: negative rate");
      const double s = std::sqrt(2.0 * p.T_tilde * p.Omega * p.Omega * p.gamma);
      return {NoiseKind::RealAdditive, std::vector<double>(p.network.sites(), s)};
    }
    NoiseChannel operator()(const KpoParams& p) const {
      require(p.kappa >= 0.0 && p.N > 0.0, "noise: negative rate");
      const double s = p.quantum_noise ? std::sqrt(p.kappa / p.N) : 0.0;
      return {NoiseKind::ComplexAdditive, std::vector<double>(p.network.sites(), s)};
    }
    NoiseChannel operator()(const DlmParams& p) const {
      require(p.kappa >= 0.0, "noise: negative rate");
      const double s = p.quantum_noise ? std::sqrt(p.kappa) : 0.0;
      return {NoiseKind::ComplexAdditive, std::vector<double>(p.network.sites(), s)};
    }
  } channel;
  return std::visit(channel, params);
}

}  // namespace pdl
