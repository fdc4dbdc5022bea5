#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <fstream>
#include <sstream>

#include "pdlogic/config.hpp"
#include "pdlogic/error.hpp"
#include "pdlogic/export.hpp"
#include "pdlogic/parallel.hpp"
#include "pdlogic/sweep.hpp"

using namespace pdl;
namespace fs = std::filesystem;

namespace {

RunConfig small_flip() {
  ordered_json doc = ordered_json::parse(R"({
    "model": {"type": "dpo", "Omega": 1.0, "A": 0.5, "Omega_d": 2.0, "gamma": 0.2, "T_tilde": 0.0},
    "protocol": {"flip_bit": 1, "relax_before": 30, "relax_after": 40},
    "sweep": {"coupling": {"min": 0.0, "max": 0.3, "count": 2},
              "Tq": {"min": 4.0, "max": 6.0, "count": 2}}
  })");
  return parse_config(doc);
}

RunConfig small_noisy_gate() {
  ordered_json doc = ordered_json::parse(R"({
    "model": {"type": "dpo", "Omega": 1.0, "A": 0.5, "Omega_d": 2.0, "gamma": 0.2, "T_tilde": 0.002},
    "protocol": {"gate": "NAND", "relax_before": 30, "relax_after": 40},
    "integration": {"steps_per_period": 128},
    "sweep": {"coupling": {"min": 0.2, "max": 0.3, "count": 2},
              "Tq": {"min": 1.0, "max": 3.0, "count": 3},
              "realizations": 3, "base_seed": 17}
  })");
  return parse_config(doc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pdlogic_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExportMeta meta_for(const SweepGrid& g) {
  ExportMeta m;
  m.command = "test";
  m.config = g.config;
  m.seeds = {{"base_seed", g.base_seed}};
  m.wall_time_s = 1.25;
  return m;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("flip sweep: zero coupling row never succeeds; 2x2 export has 5 lines") {
    const SweepGrid g = sweep_flip(small_flip());
    REQUIRE(g.complete());
    CHECK(g.at(0, 0) == 0.0);
    CHECK(g.at(0, 1) == 0.0);
    const fs::path dir = scratch("export");
    export_grid(g, dir / "grid", meta_for(g));
    const std::string csv = slurp(dir / "grid.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK(csv.rfind("coupling,Tq,P\n", 0) == 0);

    SUBCASE("re-export is byte-identical") {
      const std::string json = slurp(dir / "grid.json");
      export_grid(g, dir / "grid", meta_for(g));
      CHECK(slurp(dir / "grid.csv") == csv);
      CHECK(slurp(dir / "grid.json") == json);
    }
    SUBCASE("metadata round-trips through the config loader") {
      const ordered_json meta = ordered_json::parse(slurp(dir / "grid.json"));
      CHECK(meta["code_version"] == code_version());
      const RunConfig back = parse_config(meta["config"]);
      CHECK(back.resolved == g.config);
    }
  }

  TEST_CASE("nine significant digits") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333");
    CHECK(format_number(std::nan("")) == "nan");
  }

  TEST_CASE("grid results do not depend on the thread count") {
    const RunConfig cfg = small_noisy_gate();
    SweepGrid one, many;
    {
      ThreadLimit limit(1);
      one = sweep_gate(cfg);
    }
    {
      ThreadLimit limit(4);
      many = sweep_gate(cfg);
    }
    CHECK(one.realizations == 3);
    CHECK(one.values == many.values);
  }

  TEST_CASE("interrupted sweeps resume to the same file") {
    const RunConfig cfg = small_noisy_gate();
    const fs::path dir = scratch("resume");
    const SweepGrid full = sweep_gate(cfg);
    export_grid(full, dir / "full", meta_for(full));

    SweepOptions opt;
    opt.checkpoint = dir / "part.ckpt";
    opt.max_new_cells = 2;
    const SweepGrid partial = sweep_gate(cfg, opt);
    CHECK_FALSE(partial.complete());
    CHECK(std::count(partial.done.begin(), partial.done.end(), 1) == 2);

    std::size_t computed = 0;
    opt.max_new_cells = std::numeric_limits<std::size_t>::max();
    opt.progress = [&](std::size_t, std::size_t) { ++computed; };
    const SweepGrid resumed = sweep_gate(cfg, opt);
    CHECK(computed == full.cells() - 2);
    REQUIRE(resumed.complete());
    export_grid(resumed, dir / "resumed", meta_for(resumed));
    CHECK(slurp(dir / "resumed.csv") == slurp(dir / "full.csv"));
    CHECK(slurp(dir / "resumed.json") == slurp(dir / "full.json"));
  }

  TEST_CASE("a checkpoint from another configuration is refused") {
    const fs::path dir = scratch("foreign");
    SweepOptions opt;
    opt.checkpoint = dir / "c.ckpt";
    opt.max_new_cells = 1;
    (void)sweep_flip(small_flip(), opt);
    RunConfig other = small_flip();
    ordered_json doc = other.resolved;
    doc["sweep"]["Tq"]["max"] = 7.0;
    CHECK_THROWS_AS((void)sweep_flip(parse_config(doc), opt), ConfigError);
    CHECK(sweep_fingerprint(small_flip(), SweepKind::Flip) !=
          sweep_fingerprint(small_flip(), SweepKind::Gate));
  }

  TEST_CASE("reset table and export") {
    ordered_json doc = ordered_json::parse(R"({
      "model": {"type": "dpo", "Omega": 1.0, "A": 0.5, "Omega_d": 2.0, "gamma": 0.1, "T_tilde": 0.0},
      "protocol": {"reset_coupling": 0.3},
      "sweep": {"Tq": {"min": 0.2, "max": 3.0, "count": 2}}
    })");
    const RunConfig cfg = parse_config(doc);
    const ResetTable t = sweep_reset(cfg);
    REQUIRE(t.delta_phi.size() == 2);
    CHECK(t.delta_phi[0] < 0.05);
    CHECK(std::abs(t.delta_phi[1] - M_PI) < 0.05);
    const fs::path dir = scratch("reset");
    ExportMeta m;
    m.config = t.config;
    export_reset(t, dir / "r", m);
    CHECK(slurp(dir / "r.csv").rfind("Tq,delta_phi\n0.2,", 0) == 0);
  }

  TEST_CASE("flip sweeps are dpo-only") {
    ordered_json doc = ordered_json::parse(R"({
      "model": {"type": "kpo", "Delta": 1, "chi": 1, "p0": 2.5, "A0": 0.6, "omega_mod": 5.5,
                "kappa": 0.4, "N": 1000}
    })");
    CHECK_THROWS_AS((void)sweep_flip(parse_config(doc)), ConfigError);
  }
}
