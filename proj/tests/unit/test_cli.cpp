#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <string>

#include "crd/experiments/csv.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

// Runs the CLI with stdout and stderr captured in files under `dir`.
Run run_cli(const std::string& args, const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + CRD_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                          err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = crd::read_file(out);
  r.err = crd::read_file(err);
  return r;
}

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("crd_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("usage errors exit nonzero with a message") {
  const auto dir = scratch("usage");
  const auto none = run_cli("", dir);
  CHECK(none.status != 0);
  const auto unknown_flag = run_cli("spectrum --frobnicate 3", dir);
  CHECK(unknown_flag.status != 0);
  CHECK(unknown_flag.err.find("frobnicate") != std::string::npos);
  const auto unknown_cmd = run_cli("teleport", dir);
  CHECK(unknown_cmd.status != 0);
  const auto missing = run_cli("spectrum --config /nonexistent/x.cfg", dir);
  CHECK(missing.status != 0);
  const auto help = run_cli("--help", dir);
  CHECK(help.status == 0);
  for (const char* sub : {"spectrum", "singvals", "success", "phase", "mse", "verify", "delta"}) {
    CHECK(help.out.find(sub) != std::string::npos);
  }
}

TEST_CASE("config errors name the file and line and write nothing") {
  const auto dir = scratch("badcfg");
  crd::write_file_atomic(dir / "bad.cfg", "seed = 3\nW = 64\ntrials = lots\n");
  const auto r = run_cli("success --config \"" + (dir / "bad.cfg").string() + "\" --out \"" + (dir / "o").string() + "\"", dir);
  CHECK(r.status == 2);
  CHECK(r.err.find("bad.cfg:3: trials") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "o" / "success.csv"));

  const auto grid = run_cli("success --W 100 --R 30 --out \"" + (dir / "o").string() + "\"", dir);
  CHECK(grid.status == 2);
  CHECK(grid.err.find("does not divide") != std::string::npos);
}

TEST_CASE("flags override config values") {
  const auto dir = scratch("override");
  crd::write_file_atomic(dir / "s.cfg", "families = rcs:1\nW = 64\nseed = 1\n");
  const auto r = run_cli("spectrum --config \"" + (dir / "s.cfg").string() + "\" --W 32 --seed 8 --out \"" +
                             (dir / "o").string() + "\"",
                         dir);
  REQUIRE(r.status == 0);
  const auto manifest = nlohmann::json::parse(crd::read_file(dir / "o" / "spectrum.manifest.json"));
  CHECK(manifest["config"]["W"] == "32");
  CHECK(manifest["config"]["families"] == "rcs:1");
  CHECK(manifest["seed"] == 8);
}

TEST_CASE("spectrum subcommand writes one row per tone plus a plot script") {
  const auto dir = scratch("spectrum");
  const auto r = run_cli("spectrum --family mrs --d 1 --k 20 --W 512 --out \"" + dir.string() + "\"", dir);
  REQUIRE(r.status == 0);
  const std::string csv = crd::read_file(dir / "spectrum.csv");
  CHECK(line_count(csv) == 513);
  CHECK(csv.rfind("family,W,omega,trials,seed,frequency,spectrum,reduced_spectrum\n", 0) == 0);
  CHECK(fs::exists(dir / "plot_spectrum.py"));
  CHECK(fs::exists(dir / "spectrum.manifest.json"));
}

TEST_CASE("verify with a fixed seed is byte-identical across runs") {
  const auto dir = scratch("verify");
  const std::string args = "verify --family rademacher --W 512 --R 64 --seed 7 --out ";
  REQUIRE(run_cli(args + "\"" + (dir / "a").string() + "\"", dir).status == 0);
  REQUIRE(run_cli(args + "\"" + (dir / "b").string() + "\"", dir).status == 0);
  const std::string a = crd::read_file(dir / "a" / "verify.csv");
  CHECK(a == crd::read_file(dir / "b" / "verify.csv"));
  CHECK(line_count(a) == 4);
  const auto manifest = nlohmann::json::parse(crd::read_file(dir / "a" / "verify.manifest.json"));
  CHECK(manifest["config"]["entry_W"] == "512");
  CHECK(manifest["config"]["entry_R"] == "64");
}

TEST_CASE("phase smoke run produces a 12 x 12 grid") {
  const auto dir = scratch("phase");
  const auto r = run_cli("phase --preset crd-matched --scale 0.01 --out \"" + dir.string() + "\"", dir);
  REQUIRE(r.status == 0);
  CHECK(line_count(crd::read_file(dir / "phase.csv")) == 1 + 144);
  const auto manifest = nlohmann::json::parse(crd::read_file(dir / "phase.manifest.json"));
  CHECK(manifest["cells"] == 144);
  CHECK(manifest["config"]["presets"] == "crd-matched");
}
