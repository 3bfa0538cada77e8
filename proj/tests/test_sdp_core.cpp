#include "doctest.h"

#include <cmath>
#include <random>

#include "cmsbudget/errors.hpp"
#include "cmsbudget/sdp.hpp"

using namespace cmsbudget;
using namespace cmsbudget::sdp;

namespace {

Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = Complex(gauss(rng), gauss(rng));
  }
  return 0.5 * (a + a.adjoint());
}

/// Independent feasibility route: complex eigensolver on G(x), no embedding.
bool feasible_by_eig(const DiagonalLmiProblem& prob, const Eigen::VectorXd& x, double slack) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) < prob.lower_bounds(i)) return false;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(prob.constraint_at(x),
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0) >= prob.strictness - slack;
}

/// Brute-force oracle on a uniform grid over [lo, hi]^s at the given step.
double grid_search_oracle(const DiagonalLmiProblem& prob, double lo, double hi, double step) {
  const Eigen::Index s = prob.variable_count();
  REQUIRE(s <= 3);
  double best = std::numeric_limits<double>::infinity();
  const int count = static_cast<int>(std::round((hi - lo) / step)) + 1;
  Eigen::VectorXd x(s);
  auto visit = [&](auto&& self, Eigen::Index level) -> void {
    if (level == s) {
      if (feasible_by_eig(prob, x, 1e-12)) {
        best = std::min(best, prob.objective.dot(x));
      }
      return;
    }
    for (int i = 0; i < count; ++i) {
      x(level) = lo + i * step;
      self(self, level + 1);
    }
  };
  visit(visit, 0);
  return best;
}

}  // namespace

TEST_CASE("embed_hermitian basics") {
  SUBCASE("identity doubles to identity") {
    const Eigen::MatrixXd e = embed_hermitian(Eigen::MatrixXcd::Identity(2, 2));
    CHECK((e - Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0);
  }
  SUBCASE("Pauli-Y spectrum is duplicated") {
    Eigen::MatrixXcd h(2, 2);
    h << 0.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 0.0;
    const Eigen::MatrixXd e = embed_hermitian(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    CHECK(ev(0) == doctest::Approx(-1.0));
    CHECK(ev(1) == doctest::Approx(-1.0));
    CHECK(ev(2) == doctest::Approx(1.0));
    CHECK(ev(3) == doctest::Approx(1.0));
  }
  SUBCASE("random spectrum duplication") {
    std::mt19937_64 rng(31);
    const Eigen::MatrixXcd h = random_hermitian(rng, 3);
    const Eigen::MatrixXd e = embed_hermitian(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ec(h, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> er(e, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < 3; ++i) {
      CHECK(er.eigenvalues()(2 * i) == doctest::Approx(ec.eigenvalues()(i)).epsilon(1e-10));
      CHECK(er.eigenvalues()(2 * i + 1) == doctest::Approx(ec.eigenvalues()(i)).epsilon(1e-10));
    }
  }
  SUBCASE("non-Hermitian input is rejected") {
    Eigen::MatrixXcd h(2, 2);
    h << 1.0, 2.0, 3.0, 4.0;
    CHECK_THROWS_AS(embed_hermitian(h), NotHermitian);
  }
}

TEST_CASE("solve: schur scalar bound [[x,1],[1,x]] >= 0") {
  DiagonalLmiProblem prob;
  prob.objective = Eigen::VectorXd::Ones(1);
  prob.constant_term = Eigen::MatrixXcd::Zero(2, 2);
  prob.constant_term(0, 1) = 1.0;
  prob.constant_term(1, 0) = 1.0;
  prob.variables = {{{0, 1.0}, {1, 1.0}}};  // x on both diagonal entries
  prob.strictness = 0.0;
  prob.lower_bounds = Eigen::VectorXd::Constant(1, 1e-9);
  const SdpSolution sol = solve(prob, 1e-8);
  CHECK(sol.status == SdpStatus::optimal);
  CHECK(std::abs(sol.x(0) - 1.0) < 1e-6);
  CHECK(sol.min_eigenvalue >= -1e-9);
}

TEST_CASE("solve: diag(x1, x2) >= I") {
  DiagonalLmiProblem prob;
  prob.objective = Eigen::VectorXd::Ones(2);
  prob.constant_term = -Eigen::MatrixXcd::Identity(2, 2);
  prob.variables = {{{0, 1.0}}, {{1, 1.0}}};
  prob.strictness = 0.0;
  prob.lower_bounds = Eigen::VectorXd::Constant(2, 1e-9);
  const SdpSolution sol = solve(prob, 1e-9);
  CHECK(sol.status == SdpStatus::optimal);
  CHECK(std::abs(sol.x(0) - 1.0) < 1e-6);
  CHECK(std::abs(sol.x(1) - 1.0) < 1e-6);
}

TEST_CASE("solve: off-diagonal coupling vs grid oracle") {
  DiagonalLmiProblem prob;
  prob.objective = Eigen::VectorXd::Ones(2);
  prob.constant_term = Eigen::MatrixXcd::Zero(2, 2);
  prob.constant_term(0, 1) = 2.0;
  prob.constant_term(1, 0) = 2.0;
  prob.variables = {{{0, 1.0}}, {{1, 1.0}}};
  prob.strictness = 0.0;
  prob.lower_bounds = Eigen::VectorXd::Constant(2, 1e-9);
  const SdpSolution sol = solve(prob, 1e-8);
  CHECK(sol.status == SdpStatus::optimal);
  CHECK(std::abs(sol.objective_value - 4.0) < 1e-5);
  CHECK(std::abs(sol.x(0) - 2.0) < 1e-4);
  CHECK(std::abs(sol.x(1) - 2.0) < 1e-4);
  const double oracle = grid_search_oracle(prob, 0.001, 4.0, 1e-3);
  CHECK(sol.objective_value <= oracle * 1.02);
  CHECK(sol.objective_value >= oracle - 2e-3);  // oracle grid resolution
}

TEST_CASE("solve: infeasible problem is detected") {
  // G(x) = diag(-1, x): never PSD regardless of x
  DiagonalLmiProblem prob;
  prob.objective = Eigen::VectorXd::Ones(1);
  prob.constant_term = Eigen::MatrixXcd::Zero(2, 2);
  prob.constant_term(0, 0) = -1.0;
  prob.variables = {{{1, 1.0}}};
  prob.strictness = 0.0;
  prob.lower_bounds = Eigen::VectorXd::Constant(1, 1e-9);
  const SdpSolution sol = solve(prob, 1e-8);
  CHECK(sol.status == SdpStatus::infeasible);
}

TEST_CASE("solve: complex Hermitian constraint data") {
  // minimize x1 + x2 s.t. [[x1, 1+2i], [1-2i, x2]] >= 0; optimum x1 = x2 = sqrt(5)
  DiagonalLmiProblem prob;
  prob.objective = Eigen::VectorXd::Ones(2);
  prob.constant_term = Eigen::MatrixXcd::Zero(2, 2);
  prob.constant_term(0, 1) = Complex(1.0, 2.0);
  prob.constant_term(1, 0) = Complex(1.0, -2.0);
  prob.variables = {{{0, 1.0}}, {{1, 1.0}}};
  prob.strictness = 0.0;
  prob.lower_bounds = Eigen::VectorXd::Constant(2, 1e-9);
  const SdpSolution sol = solve(prob, 1e-8);
  CHECK(sol.status == SdpStatus::optimal);
  CHECK(std::abs(sol.objective_value - 2.0 * std::sqrt(5.0)) < 1e-4);
}

TEST_CASE("solve: strictness margin is honored") {
  DiagonalLmiProblem prob;
  prob.objective = Eigen::VectorXd::Ones(1);
  prob.constant_term = Eigen::MatrixXcd::Zero(1, 1);
  prob.variables = {{{0, 1.0}}};
  prob.strictness = 0.5;
  prob.lower_bounds = Eigen::VectorXd::Constant(1, 1e-9);
  const SdpSolution sol = solve(prob, 1e-9);
  CHECK(sol.status == SdpStatus::optimal);
  CHECK(sol.x(0) >= 0.5);
  CHECK(std::abs(sol.x(0) - 0.5) < 1e-6);
  CHECK(sol.min_eigenvalue >= 0.5 - 1e-9);
}

TEST_CASE("solve: scaling the objective leaves the optimum unchanged") {
  DiagonalLmiProblem prob;
  prob.objective = Eigen::VectorXd::Ones(2);
  prob.constant_term = Eigen::MatrixXcd::Zero(2, 2);
  prob.constant_term(0, 1) = 1.5;
  prob.constant_term(1, 0) = 1.5;
  prob.variables = {{{0, 1.0}}, {{1, 1.0}}};
  prob.strictness = 0.0;
  prob.lower_bounds = Eigen::VectorXd::Constant(2, 1e-9);
  const SdpSolution base = solve(prob, 1e-9);
  DiagonalLmiProblem scaled = prob;
  scaled.objective *= 7.5;
  const SdpSolution sol = solve(scaled, 1e-9);
  CHECK((sol.x - base.x).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("solve: warm start skips to the same optimum") {
  DiagonalLmiProblem prob;
  prob.objective = Eigen::VectorXd::Ones(2);
  prob.constant_term = Eigen::MatrixXcd::Zero(2, 2);
  prob.constant_term(0, 1) = 2.0;
  prob.constant_term(1, 0) = 2.0;
  prob.variables = {{{0, 1.0}}, {{1, 1.0}}};
  prob.strictness = 0.0;
  prob.lower_bounds = Eigen::VectorXd::Constant(2, 1e-9);
  const SdpSolution cold = solve(prob, 1e-8);
  Eigen::VectorXd start = Eigen::VectorXd::Constant(2, 5.0);
  const SdpSolution warm = solve(prob, 1e-8, &start);
  CHECK(warm.status == SdpStatus::optimal);
  CHECK(std::abs(warm.objective_value - cold.objective_value) < 1e-5);
}

TEST_CASE("solve: constraint residual certificate") {
  // random 3-variable problem; check the invariant min_eig(G(x*)) >= -1e-9 scale
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 4; ++trial) {
    DiagonalLmiProblem prob;
    prob.objective = Eigen::VectorXd::Ones(3);
    Eigen::MatrixXcd h = random_hermitian(rng, 3);
    h.diagonal().setZero();
    prob.constant_term = h;
    prob.variables = {{{0, 1.0}}, {{1, 1.0}}, {{2, 1.0}}};
    prob.strictness = 0.0;
    prob.lower_bounds = Eigen::VectorXd::Constant(3, 1e-9);
    const SdpSolution sol = solve(prob, 1e-8);
    REQUIRE(sol.status == SdpStatus::optimal);
    const double scale = prob.constraint_at(sol.x).norm();
    CHECK(sol.min_eigenvalue >= -1e-9 * std::max(1.0, scale));
    // oracle comparison at modest resolution
    const double oracle = grid_search_oracle(prob, 0.01, 4.0, 0.05);
    if (std::isfinite(oracle)) {
      CHECK(sol.objective_value <= oracle + 0.08);
    }
  }
}
