#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "crd/demodulator/model.hpp"
#include "crd/demodulator/sensing_operator.hpp"
#include "crd/numerics/linalg.hpp"
#include "crd/numerics/linear_operator.hpp"
#include "crd/numerics/rng.hpp"
#include "crd/signals/signals.hpp"
#include "crd/solvers/solvers.hpp"

using namespace crd;

namespace {

CMatrix gaussian(std::size_t r, std::size_t c, RngStream& rng) {
  CMatrix m(r, c);
  for (auto& x : m.data()) x = cplx(rng.normal(), rng.normal()) / std::sqrt(2.0 * static_cast<double>(r));
  return m;
}

CVector sparse(std::size_t n, std::size_t s, RngStream& rng) {
  return gen_sparse_signal(n, s, ToneDistribution::uniform(n), rng).alpha;
}

CVector measure(const LinearOperator& a, std::span<const cplx> x) {
  CVector y(a.rows());
  a.apply(x, y);
  return y;
}

// Lasso optimality: A^*(y - A x) equals lambda sign(x) on the support and has modulus at most
// lambda elsewhere.
double lasso_kkt_violation(const LinearOperator& a, std::span<const cplx> y, std::span<const cplx> x, double lambda) {
  CVector r = measure(a, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - r[i];
  CVector g(a.cols());
  a.adjoint(r, g);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > 1e-9) {
      worst = std::max(worst, std::abs(g[i] - lambda * x[i] / std::abs(x[i])) / lambda);
    } else {
      worst = std::max(worst, std::abs(g[i]) / lambda - 1.0);
    }
  }
  return worst;
}

}  // namespace

TEST_SUITE("solvers") {
  TEST_CASE("basis pursuit recovers sparse vectors through a dense operator") {
    RngStream rng(1);
    const DenseOperator a(gaussian(40, 100, rng));
    for (int t = 0; t < 5; ++t) {
      const CVector x = sparse(100, 5, rng);
      const auto res = basis_pursuit(a, measure(a, x));
      CHECK(res.converged);
      CHECK(res.certified);
      CHECK(recovery_success(x, res.estimate));
      CHECK(res.residual < 1e-8);
    }
  }

  TEST_CASE("basis pursuit recovers through the fast sensing operator") {
    RngStream rng(2);
    for (auto [W, R, S] : {std::tuple<std::size_t, std::size_t, std::size_t>{128, 32, 4}, {480, 120, 12}, {512, 64, 6}}) {
      CAPTURE(W);
      const DemodulatorModel m(W, R, gen_rademacher(W, rng));
      const SensingOperator op(m);
      const CVector x = sparse(W, S, rng);
      const auto res = basis_pursuit(op, measure(op, x));
      CHECK(recovery_success(x, res.estimate));
      CHECK(res.certified);
    }
  }

  TEST_CASE("basis pursuit beats every feasible point it is shown") {
    // Beyond the recovery threshold the minimizer differs from the planted vector, but it must
    // remain feasible and have no larger l1 norm.
    RngStream rng(3);
    const DemodulatorModel m(120, 24, gen_rademacher(120, rng));
    const SensingOperator op(m);
    for (int t = 0; t < 3; ++t) {
      const CVector x = sparse(120, 16, rng);
      const CVector y = measure(op, x);
      const auto res = basis_pursuit(op, y);
      CHECK(res.converged);
      CHECK(res.residual <= 1e-7 * norm2(y));
      CHECK(res.objective <= norm1(x) * (1.0 + 1e-6));
    }
  }

  TEST_CASE("basis pursuit agrees with the exhaustive oracle on small unique problems") {
    RngStream rng(4);
    int compared = 0;
    for (int t = 0; t < 60 && compared < 20; ++t) {
      const DemodulatorModel m(16, 8, gen_rademacher(16, rng));
      const CMatrix phi = build_explicit(m);
      const CVector x = sparse(16, 1 + t % 2, rng);
      const CVector y = matvec(phi, x);
      const auto oracle = exhaustive_oracle(phi, y, 3);
      if (oracle.status != OracleStatus::unique) continue;
      const auto res = basis_pursuit(DenseOperator(phi), y);
      double diff = 0.0;
      for (std::size_t i = 0; i < 16; ++i) diff = std::max(diff, std::abs(res.estimate[i] - oracle.estimate[i]));
      CHECK(diff < 1e-6);
      ++compared;
    }
    CHECK(compared == 20);
  }

  TEST_CASE("basis pursuit input validation and trivial inputs") {
    RngStream rng(5);
    const DenseOperator a(gaussian(4, 10, rng));
    const auto zero = basis_pursuit(a, CVector(4));
    CHECK(zero.converged);
    CHECK(norm1(zero.estimate) == 0.0);
    CHECK_THROWS_AS(basis_pursuit(a, CVector(3)), std::invalid_argument);
    CVector bad(4);
    bad[1] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(basis_pursuit(a, bad), SolverDivergence);
    SolverOptions opts;
    opts.tol = 0.0;
    CHECK_THROWS_AS(basis_pursuit(a, CVector(4, 1.0), opts), std::invalid_argument);
    opts = {};
    opts.max_iter = 3;
    opts.record_history = true;
    const auto capped = basis_pursuit(a, measure(a, sparse(10, 3, rng)), opts);
    CHECK(capped.history.size() <= 3);
    CHECK(history_csv(capped).rfind("iteration,residual,objective\n1,", 0) == 0);
  }

  TEST_CASE("lasso solutions satisfy the optimality conditions") {
    RngStream rng(6);
    const DemodulatorModel m(256, 64, gen_rademacher(256, rng));
    const SensingOperator op(m);
    const CVector x = sparse(256, 6, rng);
    const CVector clean = measure(op, x);
    const double p = noise_power_for_snr(clean, 20.0);
    const CVector y = add_noise(clean, p, rng);
    const double lambda = lasso_lambda(p, 256);
    SolverOptions opts;
    opts.tol = 1e-10;
    const auto res = lasso(op, y, lambda, opts);
    CHECK(res.converged);
    CHECK(lasso_kkt_violation(op, y, res.estimate, lambda) < 1e-4);
    const auto objective = [&](std::span<const cplx> v) {
      CVector r = measure(op, v);
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) s += std::norm(r[i] - y[i]);
      return 0.5 * s + lambda * norm1(v);
    };
    CHECK(res.objective == doctest::Approx(objective(res.estimate)).epsilon(1e-10));
    CHECK(res.objective <= objective(x) + 1e-9);
    CHECK(mse_db(x, res.estimate) < -15.0);
  }

  TEST_CASE("lasso returns zero when lambda dominates the correlations") {
    RngStream rng(7);
    const DenseOperator a(gaussian(10, 30, rng));
    const CVector y = measure(a, sparse(30, 2, rng));
    CVector aty(30);
    a.adjoint(y, aty);
    const auto res = lasso(a, y, max_abs(aty) * 1.01);
    CHECK(norm1(res.estimate) == 0.0);
    CHECK_THROWS(lasso(a, y, -1.0));
  }

  TEST_CASE("metrics") {
    const CVector a{1.0, cplx(0, 1)}, b{1.0 + 1e-7, cplx(0, 1)};
    CHECK(recovery_success(a, b));
    CHECK_FALSE(recovery_success(a, CVector{1.0, 0.0}));
    CHECK(mse_db(a, a) == kMseFloorDb);
    CHECK(mse_db(a, CVector{0.0, cplx(0, 1)}) == doctest::Approx(10.0 * std::log10(0.5)));
    CHECK(lasso_lambda(0.5, 100) == doctest::Approx(1.9 * std::sqrt(std::log(100.0))));
  }

  TEST_CASE("exhaustive oracle classifies uniqueness and infeasibility") {
    CMatrix phi(2, 4);
    phi(0, 0) = 1.0;
    phi(1, 1) = 1.0;
    phi(0, 2) = 1.0;  // duplicate of column 0
    phi(0, 3) = 1.0;
    phi(1, 3) = 1.0;
    const auto dup = exhaustive_oracle(phi, CVector{2.0, 0.0}, 2);
    CHECK(dup.status == OracleStatus::not_unique);
    CHECK(dup.fitting_supports == 2);
    const auto uniq = exhaustive_oracle(phi, CVector{0.0, 3.0}, 2);
    CHECK(uniq.status == OracleStatus::unique);
    CHECK(uniq.support == std::vector<std::size_t>{1});
    CHECK(std::abs(uniq.estimate[1] - 3.0) < 1e-12);
    const auto zero = exhaustive_oracle(phi, CVector{0.0, 0.0}, 2);
    CHECK(zero.sparsity == 0);
    CMatrix tall(3, 2);
    tall(0, 0) = 1.0;
    tall(1, 1) = 1.0;
    CHECK(exhaustive_oracle(tall, CVector{0.0, 0.0, 1.0}, 2).status == OracleStatus::infeasible);
    CHECK(oracle_status_name(OracleStatus::not_unique) == "not_unique");
    CHECK_THROWS(exhaustive_oracle(CMatrix(2, 21), CVector(2), 1));
    CHECK_THROWS(exhaustive_oracle(phi, CVector(2), 4));
  }
}
