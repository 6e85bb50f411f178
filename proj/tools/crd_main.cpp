#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "crd/experiments/config.hpp"
#include "crd/experiments/studies.hpp"

namespace {

struct Subcommand {
  crd::ExperimentKind kind;
  const char* help;
};

constexpr Subcommand kSubcommands[] = {
    {crd::ExperimentKind::spectrum, "autocorrelation and reduced power spectrum of a sequence family"},
    {crd::ExperimentKind::singvals, "extreme singular values of random S-column submatrices versus R"},
    {crd::ExperimentKind::success, "basis-pursuit recovery probability versus sparsity"},
    {crd::ExperimentKind::phase, "recovery phase-transition lattice over (S/R, R/W)"},
    {crd::ExperimentKind::mse, "noisy or leaky recovery MSE lattice over (S/R, R/W)"},
    {crd::ExperimentKind::verify, "statistical self-checks of the sensing model"},
    {crd::ExperimentKind::delta, "Gram deviation bounds, coherence and related diagnostics"},
};

struct Invocation {
  std::string config_path;
  std::string out_dir = "out";
  std::map<std::string, std::string> overrides;
};

int run(crd::ExperimentKind kind, const Invocation& inv) {
  crd::KeyValues kv;
  if (!inv.config_path.empty()) kv = crd::load_key_values(inv.config_path);
  for (const auto& [key, value] : inv.overrides) kv.set(key, value, "--" + key);
  crd::ExperimentConfig config = crd::make_config(kind, kv);
  config.validate();

  const auto start = std::chrono::steady_clock::now();
  const crd::ExperimentGrid grid = crd::run_experiment(config);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const crd::OutputFiles files = crd::write_outputs(grid, inv.out_dir, wall);
  for (const auto& [name, note] : grid.notes) fmt::print(stderr, "{}: {}\n", name, note);
  fmt::print("{} cells in {:.2f} s\n{}\n{}\n{}\n", grid.cells.size(), wall, files.csv.string(),
             files.manifest.string(), files.plot_script.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained random demodulator experiment harness"};
  app.set_version_flag("--version", std::string(crd::kVersion));
  app.require_subcommand(1);

  // Values are kept as text; make_config parses and reports them with the flag name.
  std::map<std::string, Invocation> invocations;
  std::map<std::string, std::map<std::string, std::string>> raw;
  std::vector<std::pair<CLI::App*, crd::ExperimentKind>> subs;
  for (const auto& sc : kSubcommands) {
    const std::string name = crd::kind_name(sc.kind);
    CLI::App* sub = app.add_subcommand(name, sc.help);
    Invocation& inv = invocations[name];
    sub->add_option("--config", inv.config_path, "key=value config file")->check(CLI::ExistingFile);
    sub->add_option("--out", inv.out_dir, "output directory")->capture_default_str();
    for (const auto& key : crd::config_keys()) {
      if (key == "kind") continue;
      sub->add_option("--" + key, raw[name][key], "overrides config key '" + key + "'");
    }
    subs.emplace_back(sub, sc.kind);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  for (const auto& [sub, kind] : subs) {
    if (!sub->parsed()) continue;
    const std::string name = crd::kind_name(kind);
    Invocation& inv = invocations[name];
    for (const auto& [key, value] : raw[name]) {
      if (sub->count("--" + key) > 0) inv.overrides[key] = value;
    }
    try {
      return run(kind, inv);
    } catch (const crd::ConfigError& e) {
      fmt::print(stderr, "crd {}: config error: {}\n", name, e.what());
      return 2;
    } catch (const std::exception& e) {
      fmt::print(stderr, "crd {}: {}\n", name, e.what());
      return 1;
    }
  }
  return 1;
}
