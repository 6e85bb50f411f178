#include "crd/experiments/grid.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

#include "crd/experiments/csv.hpp"

namespace crd {

std::string ExperimentGrid::csv() const {
  std::vector<std::string> header = key_names;
  header.emplace_back("trials");
  header.emplace_back("seed");
  header.insert(header.end(), value_names.begin(), value_names.end());
  CsvTable table(header);
  for (const auto& c : cells) {
    std::vector<std::string> row = c.keys;
    row.push_back(std::to_string(c.trials));
    row.push_back(std::to_string(c.seed));
    for (double v : c.values) row.push_back(fmt::format("{:.17g}", v));
    table.add_row(std::move(row));
  }
  return table.str();
}

std::size_t ExperimentGrid::value_index(const std::string& name) const {
  const auto it = std::find(value_names.begin(), value_names.end(), name);
  if (it == value_names.end()) throw std::out_of_range(fmt::format("grid has no value column '{}'", name));
  return static_cast<std::size_t>(it - value_names.begin());
}

double ExperimentGrid::value(const GridCell& cell, const std::string& name) const {
  return cell.values.at(value_index(name));
}

const GridCell& ExperimentGrid::find(const std::vector<std::string>& keys) const {
  for (const auto& c : cells) {
    if (c.keys == keys) return c;
  }
  throw std::out_of_range(fmt::format("grid has no cell ({})", fmt::join(keys, ", ")));
}

}  // namespace crd
