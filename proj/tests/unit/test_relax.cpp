#include <cmath>
#include <random>

#include "doctest.h"
#include "sbc/cuts.hpp"
#include "sbc/relax.hpp"

using namespace sbc;

namespace {

ComplexVector random_vector(int n, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  ComplexVector v(n);
  for (int i = 0; i < n; ++i) v.set(i, Complex(nd(rng), nd(rng)));
  return v;
}

/// Max entry error of a against b after aligning the global phase on the largest entry of b.
double phase_aligned_error(const ComplexVector& a, const ComplexVector& b) {
  int k = 0;
  for (int i = 1; i < b.size(); ++i) {
    if (std::abs(b[i]) > std::abs(b[k])) k = i;
  }
  const Complex rot = std::abs(a[k]) > 0 ? b[k] / a[k] : Complex(1.0);
  const Complex unit = rot / std::abs(rot);
  double err = 0.0;
  for (int i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i] * unit - b[i]));
  return err;
}

/// Random connected graph: a random spanning tree plus extra edges.
std::vector<std::pair<int, int>> random_graph(int n, int extra, std::mt19937& rng) {
  std::vector<std::pair<int, int>> e;
  for (int v = 1; v < n; ++v) e.emplace_back(std::uniform_int_distribution<int>(0, v - 1)(rng), v);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int k = 0; k < extra; ++k) {
    const int a = pick(rng), b = pick(rng);
    if (a != b) e.emplace_back(a, b);
  }
  return e;
}

ComplexQcqp path_instance(int n, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  ComplexQcqp p;
  p.n = n;
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    q(i, i) = nd(rng);
    if (i + 1 < n) q(i, i + 1) = Complex(nd(rng), nd(rng));
  }
  p.objective.q = HermitianMatrix::from_complex(q + q.adjoint());
  p.objective.c = random_vector(n, rng);
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) g(i, i + 1) = Complex(nd(rng), nd(rng));
  QuadraticFunction con;
  con.q = HermitianMatrix::from_complex(g + g.adjoint());
  con.c = ComplexVector(n);
  con.b = -1.0;
  p.constraints.push_back(con);
  p.lb = ComplexVector(Vec::Constant(n, 1.0), Vec::Constant(n, 1.0));
  p.ub = ComplexVector(Vec::Constant(n, 2.0), Vec::Constant(n, 2.0));
  return p;
}

}  // namespace

TEST_CASE("AffineForm orientation and canonical form") {
  AffineForm f;
  f.add_t(2, 1, 3.0).add_t(1, 2, 1.0).add_t(1, 1, 5.0).add_w(2, 1, 1.0).add_w(1, 2, -1.0);
  f.canonicalize();
  REQUIRE(f.terms.size() == 1);
  CHECK(f.terms[0].var == LVar::t(1, 2));
  CHECK(f.terms[0].coef == -2.0);
  AffineForm g;
  g.add_im(3, 2.0);
  CHECK(g.coefficient(LVar::t(0, 3)) == -2.0);
}

TEST_CASE("chordal decomposition examples") {
  const CliqueTree path = chordal_decompose(3, {{0, 1}, {1, 2}});
  REQUIRE(path.cliques.size() == 2);
  CHECK(path.cliques[0] == std::vector<int>{0, 1});
  CHECK(path.cliques[1] == std::vector<int>{1, 2});
  CHECK(path.separator(0, 1) == std::vector<int>{1});

  const CliqueTree cycle = chordal_decompose(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  REQUIRE(cycle.cliques.size() == 2);
  CHECK(cycle.cliques[0].size() == 3);
  CHECK(cycle.cliques[1].size() == 3);
  // Exactly one fill edge: 5 distinct pairs in total.
  CHECK(cycle.pairs().size() == 5);
  CHECK(cycle.running_intersection());

  const CliqueTree dense = chordal_decompose(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  REQUIRE(dense.cliques.size() == 1);
  CHECK(dense.cliques[0] == std::vector<int>{0, 1, 2, 3});

  const CliqueTree isolated = chordal_decompose(3, {});
  CHECK(isolated.cliques.size() == 3);
  CHECK(isolated.edges.size() == 2);
  CHECK(isolated.running_intersection());
}

TEST_CASE("chordal decomposition of random graphs satisfies running intersection") {
  std::mt19937 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 11;
    const auto edges = random_graph(n, n / 2, rng);
    const CliqueTree ct = chordal_decompose(n, edges);
    CHECK(ct.running_intersection());
    // Every original edge is covered by a clique.
    const auto pairs = ct.pairs();
    for (auto [a, b] : edges) {
      CHECK(std::find(pairs.begin(), pairs.end(), LiftedIndex(a, b)) != pairs.end());
    }
  }
}

TEST_CASE("rank-one completion recovers random vectors") {
  std::mt19937 rng(9);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 11;
    const CliqueTree ct = chordal_decompose(n, random_graph(n, trial % 4, rng));
    const ComplexVector x = random_vector(n, rng);
    const auto blocks = clique_blocks(ct, HermitianMatrix::outer(x));
    const ComplexVector y = rank_one_complete(ct, blocks, n);
    worst = std::max(worst, phase_aligned_error(y, x) / std::max(1.0, x.norm()));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("rank-one completion on two cliques and failure reporting") {
  CliqueTree ct;
  ct.cliques = {{0, 1}, {1, 2}};
  ct.edges = {{0, 1}};
  std::mt19937 rng(1);
  const ComplexVector x = random_vector(3, rng);
  const auto blocks = clique_blocks(ct, HermitianMatrix::outer(x));
  const ComplexVector y = rank_one_complete(ct, blocks, 3);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(y[i]) == doctest::Approx(std::abs(x[i])));
  CHECK(std::arg(y[0] * std::conj(y[2])) == doctest::Approx(std::arg(x[0] * std::conj(x[2]))));

  // Scale the second block so the shared entry magnitude disagrees.
  auto bad = blocks;
  ComplexVector z(2);
  z.set(0, 2.0 * x[1]);
  z.set(1, x[2]);
  bad[1] = HermitianMatrix::outer(z);
  try {
    (void)rank_one_complete(ct, bad, 3);
    FAIL("expected CompletionError");
  } catch (const CompletionError& e) {
    CHECK(e.clique_a == 0);
    CHECK(e.clique_b == 1);
  }
  CHECK_NOTHROW((void)rank_one_complete(ct, bad, 3, true));

  // Zero separator entry: the second part's phase is free but magnitudes still match.
  ComplexVector x0 = x;
  x0.set(1, 0.0);
  const ComplexVector y0 = rank_one_complete(ct, clique_blocks(ct, HermitianMatrix::outer(x0)), 3);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(y0[i]) == doctest::Approx(std::abs(x0[i])));
}

TEST_CASE("one-variable relaxation structure") {
  ComplexQcqp p;
  p.n = 1;
  p.objective.q = HermitianMatrix(Mat::Constant(1, 1, 1.0), Mat::Zero(1, 1));
  p.objective.c = ComplexVector(Vec::Constant(1, 0.5), Vec::Constant(1, -0.25));
  p.lb = ComplexVector(Vec::Constant(1, 1.0), Vec::Constant(1, 1.0));
  p.ub = ComplexVector(Vec::Constant(1, 2.0), Vec::Constant(1, 2.0));
  const LiftedModel m = lift_qcqp(p);
  const VarMap vm = make_var_map(m);
  const ConicProgram cp = build_csdp(m, m.root_bounds, {}, vm);
  REQUIRE(cp.psd.size() == 1);
  CHECK(cp.psd[0].order == 4);
  // Variables: W11, W01, T01.
  CHECK(cp.num_vars == 3);
  CHECK(cp.objective(vm.w(1, 1)) == 1.0);
  CHECK(cp.objective(vm.w(0, 1)) == 0.5);
  CHECK(cp.objective(vm.t(0, 1)) == 0.25);

  // Convex: the relaxation is exact at x = 1 + i.
  const RelaxationSolution sol = solve_relaxation(m, m.root_bounds, Relaxation::sdp);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.value == doctest::Approx(2.0 + 0.5 - 0.25).epsilon(1e-6));
}

TEST_CASE("BoxQP-style real model uses real blocks") {
  ComplexQcqp p;
  p.n = 2;
  p.real = true;
  Mat q(2, 2);
  q << -1, 0.5, 0.5, -2;
  p.objective.q = HermitianMatrix(q, Mat::Zero(2, 2));
  p.objective.c = ComplexVector(Vec::Constant(2, 0.1), Vec::Zero(2));
  p.lb = ComplexVector(Vec::Constant(2, 1.0), Vec::Zero(2));
  p.ub = ComplexVector(Vec::Constant(2, 2.0), Vec::Zero(2));
  const LiftedModel m = lift_qcqp(p);
  const VarMap vm = make_var_map(m);
  const ConicProgram cp = build_csdp(m, m.root_bounds, generate_cuts(m, m.root_bounds, Relaxation::sdp_rlt), vm);
  REQUIRE(cp.psd.size() == 1);
  CHECK(cp.psd[0].order == 3);
  CHECK((vm.t.array() == -1).all());
  const RelaxationSolution sol = solve_relaxation(m, m.root_bounds, Relaxation::sdp_rlt);
  REQUIRE(sol.status == SolveStatus::optimal);
  CHECK(sol.Y.T().norm() == 0.0);
}

TEST_CASE("decomposed and monolithic relaxations agree") {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexQcqp p = path_instance(4, rng);
    const LiftedModel dec = lift_qcqp(p);
    REQUIRE(dec.cliques.cliques.size() == 3);
    LiftedModel mono = dec;
    mono.cliques.cliques = {{0, 1, 2, 3, 4}};
    mono.cliques.edges.clear();
    const RelaxationSolution a = solve_relaxation(dec, dec.root_bounds, Relaxation::sdp);
    const RelaxationSolution b = solve_relaxation(mono, dec.root_bounds, Relaxation::sdp);
    REQUIRE(a.status == SolveStatus::optimal);
    REQUIRE(b.status == SolveStatus::optimal);
    CHECK(std::abs(a.value - b.value) <= 1e-5 * std::max(1.0, std::abs(b.value)));
  }
}

TEST_CASE("relaxation value bounds feasible points") {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u12(1.0, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexQcqp p = path_instance(3, rng);
    const LiftedModel m = lift_qcqp(p);
    const RelaxationSolution sol = solve_relaxation(m, m.root_bounds, Relaxation::sdp_cvi);
    REQUIRE(sol.status == SolveStatus::optimal);
    for (int s = 0; s < 200; ++s) {
      ComplexVector x(3);
      for (int k = 0; k < 3; ++k) x.set(k, Complex(u12(rng), u12(rng)));
      const Evaluation ev = evaluate(p, x);
      if (ev.max_violation <= 0.0) CHECK(sol.value <= ev.objective + 1e-6);
    }
  }
}

TEST_CASE("empty bounds are infeasible without a solve") {
  std::mt19937 rng(1);
  const ComplexQcqp p = path_instance(2, rng);
  const LiftedModel m = lift_qcqp(p);
  BoundsState b = m.root_bounds;
  b.eb.set(LiftedIndex(1, 1), 3.0, 2.0);
  CHECK(b.empty());
  const RelaxationSolution sol = solve_relaxation(m, b, Relaxation::sdp);
  CHECK(sol.status == SolveStatus::infeasible);
  CHECK(sol.iterations == 0);
}

TEST_CASE("relaxation names") {
  for (Relaxation r : {Relaxation::sdp, Relaxation::sdp_rlt, Relaxation::sdp_cvi}) {
    CHECK(parse_relaxation(to_string(r)) == r);
  }
  CHECK_THROWS_AS(parse_relaxation("lp"), PreconditionError);
}
