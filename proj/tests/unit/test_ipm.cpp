#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "sbc/conic.hpp"

using namespace sbc;

namespace {

AffineRow row(double constant, std::vector<LinTerm> terms) { return AffineRow{constant, std::move(terms)}; }

}  // namespace

TEST_CASE("LP with bounds") {
  ConicProgram cp;
  cp.num_vars = 2;
  cp.objective = Vec::Ones(2);
  cp.nonneg = {row(-1, {{0, 1}}), row(-2, {{1, 1}}), row(10, {{0, -1}})};
  const ConicSolution s = solve_conic(cp);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK_FALSE(s.inaccurate);
  CHECK(s.primal_objective == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(s.dual_objective == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(s.x(0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("second-order cone") {
  ConicProgram cp;
  cp.num_vars = 2;
  cp.objective = -Vec::Ones(2);
  cp.soc = {{row(1, {}), row(0, {{0, 1}}), row(0, {{1, 1}})}};
  const ConicSolution s = solve_conic(cp);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.primal_objective == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-7));
  CHECK(s.x(0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("2x2 PSD block with fixed corner") {
  // vars: W01, W11. min W11 s.t. [[1, W01], [W01, W11]] PSD, W11 >= 0.25.
  ConicProgram cp;
  cp.num_vars = 2;
  cp.objective = Vec::Zero(2);
  cp.objective(1) = 1.0;
  cp.nonneg = {row(-0.25, {{1, 1}})};
  cp.psd = {PsdBlock{2, {row(1, {}), row(0, {{0, 1}}), row(0, {{1, 1}})}}};
  const ConicSolution s = solve_conic(cp);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.primal_objective == doctest::Approx(0.25).epsilon(1e-7));
}

TEST_CASE("trace-constrained SDP gives the minimum eigenvalue") {
  std::mt19937 rng(1);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 4;
    Mat C(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) C(i, j) = nd(rng);
    C = 0.5 * (C + C.transpose()).eval();
    ConicProgram cp;
    cp.num_vars = k * (k + 1) / 2;
    cp.objective = Vec::Zero(cp.num_vars);
    PsdBlock blk;
    blk.order = k;
    AffineRow trace{-1.0, {}};
    int v = 0;
    for (int j = 0; j < k; ++j) {
      for (int i = j; i < k; ++i, ++v) {
        blk.entries.push_back(row(0, {{v, 1}}));
        cp.objective(v) = (i == j) ? C(i, i) : 2.0 * C(i, j);
        if (i == j) trace.terms.push_back({v, 1.0});
      }
    }
    cp.psd = {blk};
    cp.eq = {trace};
    const ConicSolution s = solve_conic(cp);
    REQUIRE(s.status == SolveStatus::optimal);
    Eigen::SelfAdjointEigenSolver<Mat> es(C);
    CHECK(std::abs(s.primal_objective - es.eigenvalues()(0)) <= 1e-6);
    CHECK(cp.max_violation(s.x) <= 1e-6);
  }
}

TEST_CASE("mixed cones with equalities") {
  // min x0 + x1 + t s.t. x0 + x1 = 1, ||(x0 - x1)|| <= t, [[x0, 0.3],[0.3, x1]] PSD.
  ConicProgram cp;
  cp.num_vars = 3;
  cp.objective = Vec::Ones(3);
  cp.eq = {row(-1, {{0, 1}, {1, 1}})};
  cp.soc = {{row(0, {{2, 1}}), row(0, {{0, 1}, {1, -1}})}};
  cp.psd = {PsdBlock{2, {row(0, {{0, 1}}), row(0.3, {}), row(0, {{1, 1}})}}};
  const ConicSolution s = solve_conic(cp);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.primal_objective == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("infeasible bounds are detected") {
  ConicProgram cp;
  cp.num_vars = 1;
  cp.objective = Vec::Ones(1);
  cp.nonneg = {row(-1, {{0, 1}}), row(0, {{0, -1}})};
  const ConicSolution s = solve_conic(cp);
  CHECK(s.status == SolveStatus::infeasible);
}

TEST_CASE("infeasible PSD program is detected") {
  // [[x, 1], [1, x]] PSD needs x >= 1, but x <= 0.5.
  ConicProgram cp;
  cp.num_vars = 1;
  cp.objective = Vec::Ones(1);
  cp.nonneg = {row(0.5, {{0, -1}})};
  cp.psd = {PsdBlock{2, {row(0, {{0, 1}}), row(1, {}), row(0, {{0, 1}})}}};
  const ConicSolution s = solve_conic(cp);
  CHECK(s.status == SolveStatus::infeasible);
}
