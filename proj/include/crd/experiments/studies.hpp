#pragma once

#include <filesystem>
#include <string>

#include "crd/experiments/config.hpp"
#include "crd/experiments/grid.hpp"
#include "crd/sequences/sequence.hpp"

namespace crd {

inline constexpr const char* kVersion = "0.1.0";

/// Source for a family, honoring config.mrs_switch_probs for MRS chains.
SequenceSource make_source(const SequenceFamily& family, const ExperimentConfig& config);

/// S = ceil(fraction * R), guarded against roundoff just above an integer.
std::size_t sparsity_for(double fraction, std::size_t R);

ExperimentGrid run_spectrum(const ExperimentConfig& config);
ExperimentGrid run_singular_value_study(const ExperimentConfig& config);
ExperimentGrid run_success_probability(const ExperimentConfig& config);
ExperimentGrid run_phase_transition(const ExperimentConfig& config);
ExperimentGrid run_mse_grid(const ExperimentConfig& config);
ExperimentGrid run_verifications(const ExperimentConfig& config);
ExperimentGrid run_delta_study(const ExperimentConfig& config);

/// Dispatches on config.kind.
ExperimentGrid run_experiment(const ExperimentConfig& config);

struct OutputFiles {
  std::filesystem::path csv;
  std::filesystem::path manifest;
  std::filesystem::path plot_script;
};

/// Writes <kind>.csv, <kind>.manifest.json, plot_<kind>.py and every extra table into
/// out_dir. CSVs are written to a temporary name and renamed.
OutputFiles write_outputs(const ExperimentGrid& grid, const std::filesystem::path& out_dir, double wall_seconds);

/// The matplotlib script that renders a grid of this kind from its CSV.
std::string plot_script(const std::string& kind);

}  // namespace crd
