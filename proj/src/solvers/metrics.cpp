#include <cmath>

#include <fmt/format.h>

#include "crd/solvers/solvers.hpp"

namespace crd {

bool recovery_success(std::span<const cplx> alpha, std::span<const cplx> estimate, double threshold) {
  if (alpha.size() != estimate.size()) throw std::invalid_argument("recovery_success: length mismatch");
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (!(std::abs(alpha[i] - estimate[i]) <= threshold)) return false;
  }
  return true;
}

double mse_db(std::span<const cplx> alpha, std::span<const cplx> estimate) {
  if (alpha.size() != estimate.size()) throw std::invalid_argument("mse_db: length mismatch");
  if (alpha.empty()) throw std::invalid_argument("mse_db: empty vectors");
  double err = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) err += std::norm(alpha[i] - estimate[i]);
  err /= static_cast<double>(alpha.size());
  if (err == 0.0) return kMseFloorDb;
  return std::max(10.0 * std::log10(err), kMseFloorDb);
}

double lasso_lambda(double noise_power, std::size_t W) {
  return 1.9 * std::sqrt(2.0 * noise_power * std::log(static_cast<double>(W)));
}

std::string history_csv(const SolverResult& result) {
  std::string out = "iteration,residual,objective\n";
  for (const auto& h : result.history) out += fmt::format("{},{:.17g},{:.17g}\n", h.iteration, h.residual, h.objective);
  return out;
}

}  // namespace crd
