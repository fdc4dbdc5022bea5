#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "pdlogic/config.hpp"

using namespace pdl;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "pdlogic");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string preset(const char* name) { return std::string(PDLOGIC_PRESET_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pdlogic_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("validate-config accepts every shipped preset") {
    for (const auto& entry : fs::directory_iterator(PDLOGIC_PRESET_DIR)) {
      CAPTURE(entry.path().string());
      CHECK(cli({"validate-config", "--config", entry.path().string()}).code == 0);
    }
  }

  TEST_CASE("usage errors exit 1") {
    CHECK(cli({}).code == 1);
    const Run r = cli({"gate", "--config", preset("nand_dpo.json"), "--bogus"});
    CHECK(r.code == 1);
    CHECK(cli({"frobnicate"}).code == 1);
    CHECK(cli({"basins", "sideways", "--config", preset("sm_basins.json")}).code == 1);
    CHECK(cli({"--help"}).code == 0);
  }

  TEST_CASE("config errors exit 1") {
    CHECK(cli({"gate", "--config", "/nonexistent.json"}).code == 1);
    const Run r = cli({"validate-config", "--config", preset("nand_dpo.json"), "--set", "model.gama=0.1"});
    CHECK(r.code == 1);
    CHECK(r.err.find("model.gama") != std::string::npos);
    // Tq missing for a command that needs it.
    CHECK(cli({"gate", "--config", preset("fig1e.json")}).code == 1);
  }

  TEST_CASE("numerical failures exit 2") {
    const fs::path dir = scratch("blowup");
    fs::create_directories(dir);
    std::ofstream(dir / "c.json") << R"({
      "model": {"type": "kpo", "Delta": 0, "chi": 0, "p0": 50, "A0": 0, "omega_mod": 1,
                "kappa": 0, "N": 1},
      "protocol": {"coupling": 0.1, "Tq": 1}
    })";
    CHECK(cli({"gate", "--config", (dir / "c.json").string()}).code == 2);
  }

  TEST_CASE("gate prints a four-row truth table and its classification") {
    const fs::path dir = scratch("gate");
    const Run r = cli({"gate", "--config", preset("nand_dpo.json"), "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("classification: full") != std::string::npos);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 7);
    CHECK(fs::exists(dir / "nand_dpo_gate.csv"));
  }

  TEST_CASE("overrides are echoed in the sidecar") {
    const fs::path dir = scratch("echo");
    const Run r = cli({"flip-scan", "--config", preset("fig1e.json"), "--out", dir.string(),
                       "--set", "sweep.coupling.count=2", "--set", "sweep.Tq.count=3",
                       "--set", "protocol.relax_before=30", "--set", "protocol.relax_after=40",
                       "--threads", "2"});
    REQUIRE(r.code == 0);
    std::ifstream in(dir / "fig1e_flip.json");
    const ordered_json meta = ordered_json::parse(in);
    CHECK(meta["config"]["sweep"]["Tq"]["count"] == 3);
    CHECK(meta["config"]["output"]["dir"] == dir.string());
    CHECK_FALSE(fs::exists(dir / "fig1e_flip.ckpt"));
  }

  TEST_CASE("an interrupted scan resumes from its checkpoint") {
    const fs::path dir = scratch("resume");
    const std::vector<std::string> base = {
        "flip-scan", "--config", preset("fig1e.json"), "--out", dir.string(), "--set",
        "sweep.coupling.count=2", "--set", "sweep.Tq.count=3", "--set",
        "protocol.relax_before=30", "--set", "protocol.relax_after=40"};
    auto args = base;
    args.insert(args.end(), {"--max-cells", "4"});
    const Run first = cli(args);
    CHECK(first.code == 0);
    CHECK(first.out.find("stopped with 4/6") != std::string::npos);
    CHECK(fs::exists(dir / "fig1e_flip.ckpt"));
    CHECK_FALSE(fs::exists(dir / "fig1e_flip.csv"));
    CHECK(cli(base).code == 0);
    CHECK(fs::exists(dir / "fig1e_flip.csv"));
  }

  TEST_CASE("thread count from the environment must be valid") {
    setenv("PDLOGIC_THREADS", "zero", 1);
    CHECK(cli({"validate-config", "--config", preset("nand_dpo.json")}).code == 1);
    setenv("PDLOGIC_THREADS", "1", 1);
    CHECK(cli({"validate-config", "--config", preset("nand_dpo.json")}).code == 0);
    unsetenv("PDLOGIC_THREADS");
  }
}
