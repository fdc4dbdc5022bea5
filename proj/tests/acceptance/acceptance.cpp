// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: pdlogic_acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "pdlogic/analysis.hpp"
#include "pdlogic/config.hpp"
#include "pdlogic/error.hpp"
#include "pdlogic/integrator.hpp"
#include "pdlogic/parallel.hpp"
#include "pdlogic/protocols.hpp"
#include "pdlogic/rng.hpp"
#include "pdlogic/sweep.hpp"

using namespace pdl;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DpoParams dpo(double gamma, double T = 0.0) { return {1.0, 0.5, 2.0, gamma, T, Network(1)}; }

KpoParams kpo(double omega_mod, double N = 1e3, bool twa = false) {
  KpoParams p;
  p.Delta = 1.0;
  p.chi = 1.0;
  p.p0 = 2.5;
  p.A0 = 0.6;
  p.omega_mod = omega_mod;
  p.kappa = 0.4;
  p.N = N;
  p.quantum_noise = twa;
  return p;
}

DlmParams dlm() {
  DlmParams p;
  p.omega = 1.0;
  p.omega0 = 1.0;
  p.A1 = 0.5;
  p.omega_d = 0.8;
  p.kappa = 1.0;
  p.N = 1e3;
  p.lambda0 = 0.9 * lambda_critical(p);
  return p;
}

RunConfig sweep_config(ModelParams model, Axis coupling, Axis tq, SweepMode mode,
                       std::size_t realizations = 1, std::uint64_t base_seed = 1) {
  RunConfig cfg;
  cfg.model = std::move(model);
  cfg.protocol.coupling = std::nan("");
  cfg.protocol.tq = std::nan("");
  cfg.protocol.reset_coupling = std::nan("");
  cfg.protocol.tq_reset = std::nan("");
  cfg.sweep.coupling.axis = coupling;
  cfg.sweep.tq.axis = tq;
  cfg.sweep.mode = mode;
  cfg.sweep.realizations = realizations;
  cfg.sweep.base_seed = base_seed;
  cfg.resolved = to_json(cfg);
  return cfg;
}

// Runs of consecutive true values.
std::vector<std::pair<std::size_t, std::size_t>> runs(const std::vector<bool>& v) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < v.size();) {
    if (!v[i]) {
      ++i;
      continue;
    }
    std::size_t k = i;
    while (k < v.size() && v[k]) ++k;
    out.emplace_back(i, k - 1);
    i = k;
  }
  return out;
}

// ---------------------------------------------------------------------------

Verdict c1_demodulation() {
  const double w = 1.0, h = 2 * kPi / w / 256;
  double worst_r = 0, worst_phi = 0, harmonic = 0;
  for (double r0 : {0.01, 0.7, 3.0}) {
    for (double phi0 : {-3.0, -1.2, 0.0, 0.4, 2.9}) {
      for (double t0 : {0.0, 0.37, 11.1}) {
        std::vector<double> t, s, s2;
        for (int k = 0; k <= 256; ++k) {
          t.push_back(t0 + k * h);
          s.push_back(r0 * std::cos(w * t.back() - phi0));
          s2.push_back(r0 * std::cos(2 * w * t.back() - phi0));
        }
        const cplx c = demodulate_series(t, s, w, t0);
        worst_r = std::max(worst_r, std::abs(std::abs(c) - r0) / r0);
        worst_phi = std::max(worst_phi, std::abs(std::arg(c) - phi0));
        harmonic = std::max(harmonic, std::abs(demodulate_series(t, s2, w, t0)));
      }
    }
  }
  return {worst_r < 1e-6 && worst_phi < 1e-6 && harmonic < 1e-6,
          fmt("max |dr|/r0 = %.2e, max |dphi| = %.2e, drive-harmonic r = %.2e", worst_r,
              worst_phi, harmonic)};
}

Verdict c2_onset() {
  const DpoParams p = dpo(0.2);
  const double Td = drive_period(p), wR = subharmonic_frequency(p);
  auto relax = [&](double th) {
    SystemState s(ModelKind::Dpo, 1);
    s.set_dpo(0, th, 0.0);
    IntegrationConfig cfg = make_config(p, 0.0, 160 * Td);
    cfg.record_from = 120 * Td;
    return integrate(p, {}, s, cfg);
  };
  const Trajectory plus = relax(0.5), minus = relax(-0.5);
  const cplx a = readout(plus, wR, 8).amplitude[0];
  // Steadiness: the amplitude 16 T_d earlier agrees.
  const cplx earlier = demodulate(plus, wR, 140 * Td).amplitude[0];
  const cplx b = readout(minus, wR, 8).amplitude[0];
  const double r = std::abs(a), r_min = 0.05 * r;
  const double steady = std::abs(a - earlier) / r;
  const double shift = std::abs(delta_phi(std::arg(a), std::arg(b)) - kPi);
  const bool ok = r > 10 * r_min && r > 0.1 && steady < 1e-3 && shift < 0.05 &&
                  classify_bit(a, r_min) == complement(classify_bit(b, r_min));
  return {ok, fmt("r = %.4f (r_min = %.4f), drift over 16 T_d = %.1e, phi(+) = %+.4f, "
                  "phi(-) = %+.4f, |shift - pi| = %.1e",
                  r, r_min, steady, std::arg(a), std::arg(b), shift)};
}

// Noiseless flip success along T_q = 0.25 .. 20 T_d.
std::vector<bool> flip_row(const ProtocolContext& ctx, double j, std::vector<double>& tq_axis) {
  const int n = 80;
  std::vector<char> ok(n);
  tq_axis.resize(n);
  for (int i = 0; i < n; ++i) tq_axis[i] = 0.25 * (i + 1);
  parallel_for(n, [&](std::size_t i) {
    ok[i] = run_flip(ctx, j, tq_axis[i] * ctx.drive_period()).success;
  });
  return {ok.begin(), ok.end()};
}

Verdict c3_flip_map() {
  const ProtocolContext ctx(dpo(0.2));
  std::vector<double> tq;
  const auto low = flip_row(ctx, 0.1, tq);
  const auto high = flip_row(ctx, 0.3, tq);
  const auto low_count = std::count(low.begin(), low.end(), true);
  const auto bands = runs(high);
  std::string where;
  for (auto [a, b] : bands) where += fmt(" [%.2f, %.2f]", tq[a], tq[b]);
  return {low_count == 0 && !bands.empty(),
          fmt("j = 0.1: %ld successes of 80; j = 0.3: %zu band(s) in T_q/T_d:%s", low_count,
              bands.size(), where.c_str())};
}

Verdict c4_nand() {
  const ProtocolContext ctx(dpo(0.2));
  const double Td = ctx.drive_period();
  // Scan T_q at j = 0.3 and take the centre of the first Full run.
  std::vector<double> tq(40);
  std::vector<char> full(40);
  for (int i = 0; i < 40; ++i) tq[i] = 0.25 * (i + 1);
  parallel_for(40, [&](std::size_t i) {
    full[i] = run_truth_table(ctx, GateKind::Nand, 0.3, tq[i] * Td).aggregate == Classification::Full;
  });
  const auto bands = runs({full.begin(), full.end()});
  if (bands.empty()) return {false, "no Full T_q at j = 0.3 in (0, 10] T_d"};
  const double chosen = tq[(bands[0].first + bands[0].second) / 2];

  const TruthTableResult nand = run_truth_table(ctx, GateKind::Nand, 0.3, chosen * Td);
  const TruthTableResult nor = run_truth_table(ctx, GateKind::Nor, 0.3, chosen * Td);
  bool dual = true;
  for (int row = 0; row < 4; ++row) {
    // NOR row with complemented inputs is row 3 - row.
    dual = dual && nor.rows[3 - row].output == complement(nand.rows[row].output);
  }
  std::string table;
  for (const auto& r : nand.rows) {
    table += fmt(" %d%d->%d", int(r.inputs[0]), int(r.inputs[1]), int(r.output));
  }
  return {nand.outputs_correct() && nor.outputs_correct() && dual,
          fmt("T_q = %.2f T_d (Full band [%.2f, %.2f]); NAND%s (%s); NOR %s; dual %s", chosen,
              tq[bands[0].first], tq[bands[0].second], table.c_str(),
              std::string(to_string(nand.aggregate)).c_str(),
              std::string(to_string(nor.aggregate)).c_str(), dual ? "ok" : "broken")};
}

// Shared between C5 and C7.
SweepGrid pseudo_map;

Verdict c5_pseudo() {
  const RunConfig cfg = sweep_config(dpo(0.1), {0.0, 0.5, 21}, {0.5, 20.0, 21}, SweepMode::Classify);
  pseudo_map = sweep_gate(cfg);
  std::size_t full = 0, pseudo = 0, failed = 0;
  for (std::size_t c = 0; c < pseudo_map.cells(); ++c) {
    failed += pseudo_map.failed[c];
    full += pseudo_map.values[c] == 2.0;
    pseudo += pseudo_map.values[c] == 1.0;
  }
  return {full > 0 && pseudo > 0 && failed == 0,
          fmt("21x21 grid: %zu Full, %zu Pseudo, %zu Fail, %zu numerical failures", full, pseudo,
              pseudo_map.cells() - full - pseudo, failed)};
}

Verdict c6_reset() {
  RunConfig cfg = sweep_config(dpo(0.1), {0.0, 0.5, 2}, {0.05, 20.0, 80}, SweepMode::Probability);
  cfg.protocol.reset_coupling = 0.3;
  cfg.resolved = to_json(cfg);
  const ResetTable t = sweep_reset(cfg);
  std::size_t sync = 0, anti = 0, stray = 0;
  double worst = 0;
  for (double d : t.delta_phi) {
    const double dist = std::isnan(d) ? kPi : std::min(d, std::abs(kPi - d));
    worst = std::max(worst, dist);
    if (dist >= 0.05) {
      ++stray;
    } else if (d < 0.05) {
      ++sync;
    } else {
      ++anti;
    }
  }
  return {stray == 0 && sync > 0 && anti > 0,
          fmt("80 T_q values in [0.05, 20] T_d: %zu at 0, %zu at pi, %zu elsewhere/undefined; "
              "max distance to {0, pi} = %.1e",
              sync, anti, stray, worst)};
}

Verdict c7_thermal() {
  if (pseudo_map.cells() == 0) (void)c5_pseudo();
  // Interior point: a Full cell whose four grid neighbours are Full; among
  // those, the deepest one (largest d with every cell within Manhattan
  // distance d Full), ties broken by grid order.
  const std::size_t nj = pseudo_map.coupling.axis.count, nt = pseudo_map.tq.axis.count;
  auto is_full = [&](long i, long k) {
    return i >= 0 && k >= 0 && i < long(nj) && k < long(nt) && pseudo_map.at(i, k) == 2.0;
  };
  long best_i = -1, best_k = -1, best_depth = 0;
  for (long i = 0; i < long(nj); ++i) {
    for (long k = 0; k < long(nt); ++k) {
      if (!is_full(i, k)) continue;
      long depth = 0;
      while (true) {
        const long d = depth + 1;
        bool ring = true;
        for (long di = -d; di <= d && ring; ++di) {
          const long rest = d - std::abs(di);
          ring = is_full(i + di, k + rest) && is_full(i + di, k - rest);
        }
        if (!ring) break;
        depth = d;
      }
      if (depth > best_depth) {
        best_depth = depth;
        best_i = i;
        best_k = k;
      }
    }
  }
  if (best_i < 0) return {false, "no Full cell with four Full neighbours in the 21x21 map"};
  const double j = pseudo_map.coupling.axis.at(best_i), tq = pseudo_map.tq.axis.at(best_k);
  const std::size_t n = 50;
  auto probability = [&](double T) {
    const ProtocolContext ctx(dpo(0.1, T));
    std::vector<char> ok(n);
    parallel_for(n, [&](std::size_t k) {
      ok[k] = run_truth_table(ctx, GateKind::Nand, j, tq * ctx.drive_period(),
                              rng::derive_seed(2024, k))
                  .success(CountPolicy::OutputOnly);
    });
    return std::count(ok.begin(), ok.end(), 1) / double(n);
  };
  const double p4 = probability(1e-4), p3 = probability(1e-3);
  return {p4 >= p3 - 2.0 / std::sqrt(double(n)) && p4 >= 0.9,
          fmt("point j = %.3f, T_q = %.3f T_d (depth %ld); P(1e-4) = %.2f, P(1e-3) = %.2f, n = %zu",
              j, tq, best_depth, p4, p3, n)};
}

// Two bit states that are initializable and related by the a -> -a symmetry.
std::string bit_states(const ProtocolContext& ctx, bool& ok) {
  const InitResult init = initialize_bits(ctx, {Bit::Zero, Bit::One}, 60.0);
  const cplx a = init.demod.amplitude[0], b = init.demod.amplitude[1];
  const double shift = std::abs(delta_phi(std::arg(a), std::arg(b)) - kPi);
  const double ratio = std::abs(a) / std::abs(b);
  ok = init.bits[0] == Bit::Zero && init.bits[1] == Bit::One && shift < 0.05 &&
       std::abs(ratio - 1) < 0.01;
  return fmt("bits r = %.3f/%.3f, phi = %+.3f/%+.3f", std::abs(a), std::abs(b), std::arg(a),
             std::arg(b));
}

Verdict c8_kpo_dlm() {
  // omega_mod scan: single-site response from both seeds, relaxed 160 drive periods.
  std::vector<double> omegas;
  for (double w = 3.0; w <= 9.01; w += 0.25) omegas.push_back(w);
  std::vector<char> works(omegas.size());
  parallel_for(omegas.size(), [&](std::size_t i) {
    try {
      const ProtocolContext ctx(kpo(omegas[i]));
      works[i] = ctx.calibration().steady_amplitude > 1.0;
    } catch (const NumericalError&) {
      works[i] = 0;
    }
  });
  auto bands = runs({works.begin(), works.end()});
  if (bands.empty()) return {false, "no omega_mod with two complementary bit states"};
  auto widest = *std::max_element(bands.begin(), bands.end(), [](auto a, auto b) {
    return a.second - a.first < b.second - b.first;
  });
  const double w_mod = omegas[(widest.first + widest.second) / 2];

  bool kpo_states = false, dlm_states = false;
  const std::string kpo_bits = bit_states(ProtocolContext(kpo(w_mod)), kpo_states);
  const std::string dlm_bits = bit_states(ProtocolContext(dlm()), dlm_states);

  auto first_full = [](const SweepGrid& g, double& j, double& tq) {
    for (std::size_t c = 0; c < g.cells(); ++c) {
      if (g.values[c] == 2.0) {
        j = g.coupling.axis.at(c / g.tq.axis.count);
        tq = g.tq.axis.at(c % g.tq.axis.count);
        return true;
      }
    }
    return false;
  };
  const SweepGrid kg = sweep_gate(
      sweep_config(kpo(w_mod), {0.0, 1.0, 21}, {0.25, 10.0, 40}, SweepMode::Classify));
  const SweepGrid dg =
      sweep_gate(sweep_config(dlm(), {0.0, 1.0, 11}, {0.25, 10.0, 40}, SweepMode::Classify));
  double kj = 0, ktq = 0, dj = 0, dtq = 0;
  const bool kfull = first_full(kg, kj, ktq), dfull = first_full(dg, dj, dtq);
  return {kpo_states && dlm_states && kfull && dfull,
          fmt("omega_mod = %.2f (working band [%.2f, %.2f]); KPO %s, Full at J = %.2f, T_q = %.2f "
              "T_d%s; DLM %s, Full at J = %.2f, T_q = %.2f T_d%s",
              w_mod, omegas[widest.first], omegas[widest.second], kpo_bits.c_str(), kj, ktq,
              kfull ? "" : " (none)", dlm_bits.c_str(), dj, dtq, dfull ? "" : " (none)")};
}

Verdict c9_twa() {
  const Axis J{0.25, 0.75, 11}, tq{0.5, 5.5, 11};
  const SweepGrid mf = sweep_gate(sweep_config(kpo(5.5), J, tq, SweepMode::Probability));
  auto l1 = [&](double N) {
    const SweepGrid g =
        sweep_gate(sweep_config(kpo(5.5, N, true), J, tq, SweepMode::Probability, 20, 1));
    double d = 0;
    for (std::size_t c = 0; c < g.cells(); ++c) d += std::abs(g.values[c] - mf.values[c]);
    return d;
  };
  const double d3 = l1(1e3), d4 = l1(1e4);
  return {d4 < d3, fmt("11x11 grid, 20 realizations: L1(N = 1e3) = %.2f, L1(N = 1e4) = %.2f", d3, d4)};
}

Verdict c10_hygiene() {
  std::string detail;
  bool ok = true;

  {  // energy
    const DpoParams p{1.0, 0.0, 2.0, 0.0, 0.0, Network(1)};
    SystemState s(ModelKind::Dpo, 1);
    s.set_dpo(0, 1.2, 0.3);
    const Trajectory tr = integrate(p, {}, s, make_config(p, 0.0, 100 * drive_period(p)));
    auto E = [](const SystemState& x) {
      return 0.5 * x.theta_dot(0) * x.theta_dot(0) + 1 - std::cos(x.theta(0));
    };
    const double per_period = std::abs(E(tr.final_state) - E(s)) / 100;
    ok = ok && per_period < 1e-8;
    detail += fmt("energy drift %.1e/period; ", per_period);
  }
  {  // step halving
    DpoParams p{1.0, 0.5, 2.0, 0.2, 0.0, Network(2, {{0, 1, 0.3}})};
    SystemState s(ModelKind::Dpo, 2);
    s.set_dpo(0, 0.9, -0.4);
    s.set_dpo(1, -0.6, 0.8);
    const double tf = 10 * drive_period(p);
    auto fin = [&](int spp) { return integrate(p, {}, s, make_config(p, 0, tf, spp, 32)).final_state; };
    const SystemState ref = fin(4096);
    auto err = [&](int spp) {
      const SystemState x = fin(spp);
      double e = 0;
      for (std::size_t k = 0; k < 4; ++k) e = std::max(e, std::abs(x.values()[k] - ref.values()[k]));
      return e;
    };
    const double order = std::log2(err(64) / err(128));
    ok = ok && order >= 3.5;
    detail += fmt("step-halving order %.2f; ", order);
  }
  {  // thread count
    const RunConfig cfg =
        sweep_config(dpo(0.1, 1e-3), {0.1, 0.3, 3}, {1.0, 5.0, 3}, SweepMode::Probability, 4, 7);
    SweepGrid one, four;
    {
      ThreadLimit limit(1);
      one = sweep_gate(cfg);
    }
    {
      ThreadLimit limit(4);
      four = sweep_gate(cfg);
    }
    const bool same = one.values == four.values;
    ok = ok && same;
    detail += same ? "1 vs 4 threads bit-identical; " : "1 vs 4 threads DIFFER; ";
  }
  {  // basin antisymmetry
    const Axis ax{-3.0, 3.0, 21};
    const BasinMap map = basin_scan_lab(dpo(0.2), ax, ax);
    std::size_t defined = 0, bad = 0;
    for (std::size_t i = 0; i < ax.count; ++i) {
      for (std::size_t k = 0; k < ax.count; ++k) {
        const CellLabel a = map.at(i, k), b = map.at(ax.count - 1 - i, ax.count - 1 - k);
        if (a == CellLabel::Undefined || b == CellLabel::Undefined) continue;
        ++defined;
        bad += int(a) + int(b) != 1;
      }
    }
    ok = ok && bad == 0 && defined > 0;
    detail += fmt("basin antisymmetry %zu violations on %zu defined cells", bad, defined);
  }
  return {ok, detail};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "demodulation oracle", 1, c1_demodulation},
      {2, "period-doubling onset", 5, c2_onset},
      {3, "bit-flip map structure", 120, c3_flip_map},
      {4, "noiseless NAND truth table + NOR dual", 120, c4_nand},
      {5, "pseudo-gate three-way map", 900, c5_pseudo},
      {6, "reset protocol clusters", 120, c6_reset},
      {7, "thermal robustness", 600, c7_thermal},
      {8, "KPO/DLM validity", 1800, c8_kpo_dlm},
      {9, "TWA convergence", 1800, c9_twa},
      {10, "numerical hygiene", 300, c10_hygiene},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = s < c.budget_s;
    const bool pass = v.pass && in_time;
    failures += !pass;
    std::printf("%s C%d %s: %s [%.2f s of %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str(), s, c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
