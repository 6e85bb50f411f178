#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace crd {

/// One Monte-Carlo cell: its coordinates (as text), trial count, stream id and aggregates.
struct GridCell {
  std::vector<std::string> keys;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<double> values;
};

/// Result of a study: a table of cells plus free-form summary notes and extra tables.
struct ExperimentGrid {
  std::string kind;
  std::uint64_t seed = 0;
  std::vector<std::string> key_names;
  std::vector<std::string> value_names;
  std::vector<GridCell> cells;
  std::map<std::string, std::string> config;
  /// Scalar summaries (e.g. "mrs:1:20.max_reduced"), recorded in the manifest.
  std::map<std::string, std::string> notes;
  /// Additional CSV tables by file stem (e.g. per-trial rows).
  std::map<std::string, std::string> extra_tables;

  /// Header: key names, trials, seed, value names; values printed with 17 significant digits.
  [[nodiscard]] std::string csv() const;
  [[nodiscard]] std::size_t value_index(const std::string& name) const;
  [[nodiscard]] double value(const GridCell& cell, const std::string& name) const;
  /// First cell whose keys equal `keys`; throws when absent.
  [[nodiscard]] const GridCell& find(const std::vector<std::string>& keys) const;
};

}  // namespace crd
