#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "crd/demodulator/model.hpp"
#include "crd/numerics/rng.hpp"
#include "crd/numerics/types.hpp"

namespace crd {

struct SingularExtrema {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

/// Extreme singular values of the R x |columns| submatrix, from its Gram eigenvalues.
SingularExtrema column_submatrix_extrema(const DemodulatorModel& model, const std::vector<std::size_t>& columns);

struct ExtremaSummary {
  std::vector<SingularExtrema> trials;
  double mean_min = 0.0;
  double std_min = 0.0;
  double mean_max = 0.0;
  double std_max = 0.0;
};

/// Per trial: a fresh sequence from `source`, S distinct uniform columns, and the
/// singular extrema of that column submatrix. Trial t uses rng.split(t).
ExtremaSummary submatrix_extrema(const SequenceSource& source, std::size_t W, std::size_t R, std::size_t S,
                                 std::size_t trials, const RngStream& rng, unsigned threads = 0);

/// Largest |<phi_a, phi_w>| / (||phi_a|| ||phi_w||) over distinct columns.
double coherence(const CMatrix& phi);
/// max_w | ||phi_w||^2 - 1 |
double column_norm_deviation(const CMatrix& phi);
/// max |phi_{r w}|
double max_entry(const CMatrix& phi);

/// sqrt(10 l ln W / R), the componentwise bound on ||Phi||_max.
double componentwise_bound(std::size_t mdd, std::size_t W, std::size_t R);

/// Coherence model mu ~ C * lead + tail with lead = l sqrt(ln W / R) and
/// tail = (ln W / sqrt W) 16 sqrt(l - 1) ||Gamma||^2.
struct CoherenceModelTerms {
  double lead = 0.0;
  double tail = 0.0;
  /// C that makes the model equal to mu.
  [[nodiscard]] double fitted_constant(double mu) const { return lead > 0.0 ? (mu - tail) / lead : 0.0; }
};
CoherenceModelTerms coherence_model_terms(std::size_t mdd, std::size_t W, std::size_t R, double gamma_norm);

/// "family,W,R,S,trial,sigma_min,sigma_max" rows (with header).
std::string extrema_csv(const std::string& family, std::size_t W, std::size_t R, std::size_t S,
                        const ExtremaSummary& summary);

}  // namespace crd
