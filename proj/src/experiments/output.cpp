#include <chrono>
#include <ctime>

#include <fmt/format.h>
#include <json.hpp>

#include "crd/experiments/csv.hpp"
#include "crd/experiments/studies.hpp"
#include "crd/kernels/kernels.hpp"

namespace crd {

namespace {

constexpr const char* kPlotPrelude = R"py(#!/usr/bin/env python3
# Renders {kind}.csv from the same directory. Usage: python3 plot_{kind}.py [csv] [out.png]
import csv
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
src = Path(sys.argv[1]) if len(sys.argv) > 1 else here / "{kind}.csv"
out = Path(sys.argv[2]) if len(sys.argv) > 2 else src.with_suffix(".png")
with open(src, newline="") as fh:
    rows = list(csv.DictReader(fh))
)py";

constexpr const char* kPlotSpectrum = R"py(
series = defaultdict(list)
for r in rows:
    series[(r["family"], r["W"])].append((float(r["frequency"]), float(r["reduced_spectrum"])))
fig, ax = plt.subplots(figsize=(6, 4))
for (fam, W), pts in sorted(series.items()):
    pts.sort()
    ax.plot([p[0] for p in pts], [p[1] for p in pts], label=f"{fam} W={W}")
ax.set_xlabel("normalized frequency")
ax.set_ylabel("reduced spectrum")
ax.axhline(0.0, color="gray", lw=0.5)
ax.legend()
)py";

constexpr const char* kPlotSingvals = R"py(
series = defaultdict(list)
for r in rows:
    series[r["family"]].append((int(r["R"]), float(r["mean_sigma_min"]), float(r["std_sigma_min"]),
                                float(r["mean_sigma_max"]), float(r["std_sigma_max"])))
fig, axes = plt.subplots(1, len(series), figsize=(5 * len(series), 4), squeeze=False)
for ax, (fam, pts) in zip(axes[0], sorted(series.items())):
    pts.sort()
    R = [p[0] for p in pts]
    ax.errorbar(R, [p[1] for p in pts], yerr=[2 * p[2] for p in pts], label="sigma_min", capsize=3)
    ax.errorbar(R, [p[3] for p in pts], yerr=[2 * p[4] for p in pts], label="sigma_max", capsize=3)
    ax.set_xscale("log", base=2)
    ax.set_title(fam)
    ax.set_xlabel("R")
    ax.legend()
)py";

constexpr const char* kPlotSuccess = R"py(
series = defaultdict(list)
for r in rows:
    series[(r["family"], int(r["W"]))].append((int(r["S"]), float(r["success_rate"])))
fams = sorted({k[0] for k in series})
fig, axes = plt.subplots(1, len(fams), figsize=(5 * len(fams), 4), squeeze=False)
for ax, fam in zip(axes[0], fams):
    for (f, W), pts in sorted(series.items()):
        if f != fam:
            continue
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", ms=3, label=f"W={W}")
    ax.set_title(fam)
    ax.set_xlabel("S")
    ax.set_ylabel("success rate")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
)py";

constexpr const char* kPlotLattice = R"py(
value = "{value}"
grids = defaultdict(dict)
for r in rows:
    grids[r["preset"]][(float(r["sr"]), float(r["rw"]))] = float(r[value])
vals = [v for g in grids.values() for v in g.values()]
lo, hi = min(vals), max(vals)
fig, axes = plt.subplots(1, len(grids), figsize=(4.5 * len(grids), 4), squeeze=False)
for ax, (preset, g) in zip(axes[0], sorted(grids.items())):
    srs = sorted({k[0] for k in g})
    rws = sorted({k[1] for k in g})
    img = [[g.get((s, w), float("nan")) for s in srs] for w in rws]
    im = ax.imshow(img, origin="lower", aspect="auto", vmin=lo, vmax=hi,
                   extent=(srs[0], srs[-1], rws[0], rws[-1]))
    ax.set_title(preset)
    ax.set_xlabel("S/R")
    ax.set_ylabel("R/W")
fig.colorbar(im, ax=axes[0].tolist())
fig.suptitle(f"{value} (color range {lo:.3g} .. {hi:.3g})")
)py";

constexpr const char* kPlotTable = R"py(
fig, ax = plt.subplots(figsize=(10, 0.4 * len(rows) + 1))
ax.axis("off")
cols = list(rows[0].keys()) if rows else []
ax.table(cellText=[[r[c] for c in cols] for r in rows], colLabels=cols, loc="center")
)py";

constexpr const char* kPlotFooter = R"py(
fig.tight_layout()
fig.savefig(out, dpi=150)
print(out)
)py";

std::string substitute(std::string text, const std::string& key, const std::string& value) {
  const std::string pattern = "{" + key + "}";
  for (std::size_t pos = text.find(pattern); pos != std::string::npos; pos = text.find(pattern, pos + value.size())) {
    text.replace(pos, pattern.size(), value);
  }
  return text;
}

}  // namespace

std::string plot_script(const std::string& kind) {
  std::string body;
  if (kind == "spectrum") {
    body = kPlotSpectrum;
  } else if (kind == "singvals") {
    body = kPlotSingvals;
  } else if (kind == "success") {
    body = kPlotSuccess;
  } else if (kind == "phase") {
    body = substitute(kPlotLattice, "value", "success_rate");
  } else if (kind == "mse") {
    body = substitute(kPlotLattice, "value", "mse_db");
  } else {
    body = kPlotTable;
  }
  return substitute(kPlotPrelude, "kind", kind) + body + kPlotFooter;
}

OutputFiles write_outputs(const ExperimentGrid& grid, const std::filesystem::path& out_dir, double wall_seconds) {
  std::filesystem::create_directories(out_dir);
  OutputFiles files;
  files.csv = out_dir / (grid.kind + ".csv");
  files.manifest = out_dir / (grid.kind + ".manifest.json");
  files.plot_script = out_dir / ("plot_" + grid.kind + ".py");

  write_file_atomic(files.csv, grid.csv());
  nlohmann::json extra = nlohmann::json::array();
  for (const auto& [stem, content] : grid.extra_tables) {
    write_file_atomic(out_dir / (stem + ".csv"), content);
    extra.push_back(stem + ".csv");
  }

  nlohmann::json m;
  m["kind"] = grid.kind;
  m["version"] = kVersion;
  m["seed"] = grid.seed;
  m["csv"] = files.csv.filename().string();
  m["extra_csv"] = extra;
  m["columns"] = {{"keys", grid.key_names}, {"values", grid.value_names}};
  m["cells"] = grid.cells.size();
  m["config"] = grid.config;
  m["notes"] = grid.notes;
  m["wall_seconds"] = wall_seconds;
  m["kernels"] = std::string(kernels::backend_name(kernels::active_backend()));
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  m["created_utc"] = fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", utc.tm_year + 1900, utc.tm_mon + 1, utc.tm_mday,
                                 utc.tm_hour, utc.tm_min, utc.tm_sec);
  write_file_atomic(files.manifest, m.dump(2) + "\n");
  write_file_atomic(files.plot_script, plot_script(grid.kind));
  std::filesystem::permissions(files.plot_script, std::filesystem::perms::owner_exec, std::filesystem::perm_options::add);
  return files;
}

}  // namespace crd
