#include "crd/demodulator/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "crd/demodulator/sensing_operator.hpp"
#include "crd/experiments/csv.hpp"
#include "crd/numerics/hermitian_eig.hpp"
#include "crd/numerics/parallel.hpp"

namespace crd {

SingularExtrema column_submatrix_extrema(const DemodulatorModel& model, const std::vector<std::size_t>& columns) {
  if (columns.empty()) throw std::invalid_argument("column_submatrix_extrema: no columns");
  if (columns.size() > model.R()) {
    throw std::invalid_argument(
        fmt::format("column_submatrix_extrema: S = {} exceeds R = {}", columns.size(), model.R()));
  }
  const SensingOperator op(model);
  std::vector<CVector> cols;
  cols.reserve(columns.size());
  for (std::size_t c : columns) cols.push_back(op.column(c));
  const std::size_t s = cols.size();
  CMatrix g(s, s);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = i; j < s; ++j) {
      const cplx v = inner(cols[i], cols[j]);
      g(i, j) = v;
      g(j, i) = std::conj(v);
    }
  }
  const auto eig = hermitian_eig(g);
  return {std::sqrt(std::max(eig.values.back(), 0.0)), std::sqrt(std::max(eig.values.front(), 0.0))};
}

ExtremaSummary submatrix_extrema(const SequenceSource& source, std::size_t W, std::size_t R, std::size_t S,
                                 std::size_t trials, const RngStream& rng, unsigned threads) {
  if (S == 0) throw std::invalid_argument("submatrix_extrema: S must be >= 1");
  if (S > R) throw std::invalid_argument(fmt::format("submatrix_extrema: S = {} > R = {} is rank-deficient", S, R));
  if (S > W) throw std::invalid_argument("submatrix_extrema: S exceeds W");
  ExtremaSummary out;
  out.trials.resize(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    RngStream stream = rng.split(t);
    DemodulatorModel model(W, R, source.draw(W, stream));
    std::vector<std::size_t> pool(W);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < S; ++i) std::swap(pool[i], pool[i + stream.uniform_index(W - i)]);
    pool.resize(S);
    out.trials[t] = column_submatrix_extrema(model, pool);
  });
  if (trials == 0) return out;
  const double n = static_cast<double>(trials);
  for (const auto& e : out.trials) {
    out.mean_min += e.sigma_min;
    out.mean_max += e.sigma_max;
  }
  out.mean_min /= n;
  out.mean_max /= n;
  for (const auto& e : out.trials) {
    out.std_min += (e.sigma_min - out.mean_min) * (e.sigma_min - out.mean_min);
    out.std_max += (e.sigma_max - out.mean_max) * (e.sigma_max - out.mean_max);
  }
  out.std_min = std::sqrt(out.std_min / n);
  out.std_max = std::sqrt(out.std_max / n);
  return out;
}

double coherence(const CMatrix& phi) {
  const std::size_t W = phi.cols();
  const std::size_t R = phi.rows();
  std::vector<CVector> cols(W, CVector(R));
  RVector norms(W);
  for (std::size_t w = 0; w < W; ++w) {
    for (std::size_t r = 0; r < R; ++r) cols[w][r] = phi(r, w);
    norms[w] = norm2(cols[w]);
  }
  double mu = 0.0;
  for (std::size_t a = 0; a < W; ++a) {
    for (std::size_t w = a + 1; w < W; ++w) {
      if (norms[a] == 0.0 || norms[w] == 0.0) continue;
      mu = std::max(mu, std::abs(inner(cols[a], cols[w])) / (norms[a] * norms[w]));
    }
  }
  return mu;
}

double column_norm_deviation(const CMatrix& phi) {
  double dev = 0.0;
  for (std::size_t w = 0; w < phi.cols(); ++w) {
    double s = 0.0;
    for (std::size_t r = 0; r < phi.rows(); ++r) s += std::norm(phi(r, w));
    dev = std::max(dev, std::abs(s - 1.0));
  }
  return dev;
}

double max_entry(const CMatrix& phi) { return max_abs(phi.data()); }

double componentwise_bound(std::size_t mdd, std::size_t W, std::size_t R) {
  return std::sqrt(10.0 * static_cast<double>(mdd) * std::log(static_cast<double>(W)) / static_cast<double>(R));
}

CoherenceModelTerms coherence_model_terms(std::size_t mdd, std::size_t W, std::size_t R, double gamma_norm) {
  const double l = static_cast<double>(mdd);
  const double logw = std::log(static_cast<double>(W));
  CoherenceModelTerms t;
  t.lead = l * std::sqrt(logw / static_cast<double>(R));
  t.tail = logw / std::sqrt(static_cast<double>(W)) * 16.0 * std::sqrt(std::max(l - 1.0, 0.0)) * gamma_norm * gamma_norm;
  return t;
}

std::string extrema_csv(const std::string& family, std::size_t W, std::size_t R, std::size_t S,
                        const ExtremaSummary& summary) {
  std::string out = "family,W,R,S,trial,sigma_min,sigma_max\n";
  for (std::size_t t = 0; t < summary.trials.size(); ++t) {
    out += fmt::format("{},{},{},{},{},{:.17g},{:.17g}\n", csv_escape(family), W, R, S, t, summary.trials[t].sigma_min,
                       summary.trials[t].sigma_max);
  }
  return out;
}

}  // namespace crd
