#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "instances.hpp"
#include "sbc/acopf.hpp"
#include "sbc/boxqp.hpp"
#include "sbc/cuts.hpp"
#include "sbc/tighten.hpp"

using namespace sbc;

namespace {

std::string data_path(const std::string& name) { return std::string(SBC_DATA_DIR) + "/" + name; }

ComplexQcqp one_var_disc() {
  // min |x|^2 with 0 <= Re x, Im x <= 1.
  ComplexQcqp p;
  p.n = 1;
  p.objective.q = HermitianMatrix(Mat::Identity(1, 1), Mat::Zero(1, 1));
  p.objective.c = ComplexVector(1);
  p.lb = ComplexVector(1);
  p.ub = ComplexVector(Vec::Ones(1), Vec::Ones(1));
  return p;
}

ComplexQcqp box_instance(double lo, double hi, int n, bool real) {
  ComplexQcqp p;
  p.n = n;
  p.real = real;
  p.objective.q = HermitianMatrix(n);
  p.objective.c = ComplexVector(n);
  p.lb = ComplexVector(Vec::Constant(n, lo), real ? Vec::Zero(n) : Vec::Constant(n, lo));
  p.ub = ComplexVector(Vec::Constant(n, hi), real ? Vec::Zero(n) : Vec::Constant(n, hi));
  return p;
}

ComplexVector random_point(const ComplexQcqp& p, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ComplexVector x(p.n);
  for (int i = 0; i < p.n; ++i) {
    x.re(i) = p.lb.re(i) + u(rng) * (p.ub.re(i) - p.lb.re(i));
    x.im(i) = p.lb.im(i) + u(rng) * (p.ub.im(i) - p.lb.im(i));
  }
  return x;
}

double root_value(const LiftedModel& m, Relaxation r) {
  BoundsState b = m.root_bounds;
  REQUIRE_FALSE(tighten_bounds(m, b).infeasible);
  const RelaxationSolution s = solve_relaxation(m, b, r);
  REQUIRE(s.status == SolveStatus::optimal);
  return s.value;
}

}  // namespace

TEST_CASE("affine shift is the identity when the lower bound is e + ie") {
  ComplexQcqp p = box_instance(1.0, 3.0, 2, false);
  const ShiftedQcqp s = affine_shift_positive(p);
  CHECK(s.shift.re.isZero());
  CHECK(s.shift.im.isZero());
}

TEST_CASE("shifted one-variable problem maps its optimum back to zero") {
  const ComplexQcqp p = one_var_disc();
  const ShiftedQcqp s = affine_shift_positive(p);
  CHECK(s.problem.lb.re(0) >= 1.0);
  CHECK(s.problem.lb.im(0) >= 1.0);
  double best = kInf;
  ComplexVector arg(1);
  for (int a = 0; a <= 100; ++a) {
    for (int b = 0; b <= 100; ++b) {
      ComplexVector q(1);
      q.re(0) = s.problem.lb.re(0) + a / 100.0;
      q.im(0) = s.problem.lb.im(0) + b / 100.0;
      const double v = s.problem.objective.value(q);
      if (v < best) {
        best = v;
        arg = q;
      }
    }
  }
  const ComplexVector x = s.to_original(arg);
  CHECK(std::abs(x[0]) < 1e-12);
  CHECK(best == doctest::Approx(0.0));
}

TEST_CASE("shifted objective and constraints agree at paired points") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexQcqp p = testing::random_complex_path(2, rng);
    const ShiftedQcqp s = affine_shift_positive(p);
    for (int k = 0; k < 100; ++k) {
      const ComplexVector x = random_point(p, rng);
      const ComplexVector q = s.to_shifted(x);
      for (int f = 0; f <= p.num_constraints(); ++f) {
        const double a = p.function(f).value(x), b = s.problem.function(f).value(q);
        CHECK(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(a)));
      }
      const ComplexVector back = s.to_original(q);
      CHECK((back.re - x.re).norm() + (back.im - x.im).norm() < 1e-14);
      CHECK(std::abs(evaluate(p, x).max_violation - evaluate(s.problem, q).max_violation) < 1e-9);
    }
  }
}

TEST_CASE("initial entry bounds examples") {
  SUBCASE("fixed components") {
    const ComplexQcqp p = box_instance(1.0, 1.0, 2, false);
    const EntryBounds eb = initial_entry_bounds(p);
    CHECK(eb.L(0, 0) == 1.0);
    CHECK(eb.U(0, 0) == 1.0);
    CHECK(eb.U(1, 1) == 2.0);
    CHECK(eb.U(1, 2) == 0.0);
    CHECK(eb.L(1, 2) == 0.0);
  }
  SUBCASE("components in [1, 2]") {
    const ComplexQcqp p = box_instance(1.0, 2.0, 2, false);
    const EntryBounds eb = initial_entry_bounds(p);
    CHECK(eb.U(1, 1) == 8.0);
    CHECK(eb.U(1, 2) == doctest::Approx(std::sqrt(15.0)).epsilon(1e-15));
    CHECK(eb.L(1, 2) == doctest::Approx(-std::sqrt(15.0)).epsilon(1e-15));
    CHECK(eb.consistent());
  }
  SUBCASE("real case fixes the ratio at zero") {
    const ComplexQcqp p = box_instance(1.0, 2.0, 3, true);
    const EntryBounds eb = initial_entry_bounds(p);
    for (int i = 0; i <= 3; ++i) {
      for (int j = i + 1; j <= 3; ++j) {
        CHECK(eb.L(i, j) == 0.0);
        CHECK(eb.U(i, j) == 0.0);
      }
    }
  }
  SUBCASE("unshifted bounds are rejected") {
    const ComplexQcqp p = box_instance(0.0, 1.0, 2, false);
    CHECK_THROWS_AS(initial_entry_bounds(p), PreconditionError);
  }
}

TEST_CASE("initial entry bounds satisfy the J_C preconditions") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexQcqp p = testing::random_complex_path(1 + trial % 4, rng);
    const EntryBounds eb = initial_entry_bounds(affine_shift_positive(p).problem);
    CHECK(eb.consistent());
    for (int i = 0; i < eb.dim(); ++i) CHECK(eb.L(i, i) >= 0.0);
  }
}

TEST_CASE("evaluate reports objective and bound violation") {
  ComplexQcqp p = box_instance(1.0, 2.0, 2, false);
  p.objective.b = 3.5;
  const Evaluation e = evaluate(p, ComplexVector(2));
  CHECK(e.objective == 3.5);
  CHECK(e.max_violation == doctest::Approx(1.0));
  std::mt19937 rng(2);
  CHECK(evaluate(p, random_point(p, rng)).max_violation == 0.0);
}

TEST_CASE("JSON instances load, symmetrize and round trip") {
  const std::string text = R"({
    "n": 2,
    "lb": {"re": [0, 0], "im": [-1, -1]},
    "ub": {"re": [1, 2], "im": [1, 1]},
    "objective": {"Q": {"dense": {"re": [[1, 2], [0, 3]], "im": [[0, 1], [0, 0]]}}, "c": {"re": [1, 0]}, "b": 2},
    "constraints": [{"Q": {"triplets": [[0, 0, 1], [1, 1, 1]]}, "b": -1}]
  })";
  const ComplexQcqp p = load_qcqp_json(text);
  CHECK(p.n == 2);
  CHECK_FALSE(p.real);
  CHECK(p.objective.q.w(0, 1) == 1.0);
  CHECK(p.objective.q.w(1, 0) == 1.0);
  CHECK(p.objective.q.t(0, 1) == 0.5);
  CHECK(p.objective.q.t(1, 0) == -0.5);
  CHECK(p.objective.b == 2.0);
  CHECK(p.num_constraints() == 1);
  CHECK(p.constraints[0].b == -1.0);
  const ComplexQcqp q = load_qcqp_json(qcqp_to_json(p));
  CHECK(qcqp_to_json(q) == qcqp_to_json(p));
  CHECK(q.objective.q.W() == p.objective.q.W());
  CHECK(q.objective.q.T() == p.objective.q.T());
  CHECK(q.ub.re == p.ub.re);

  CHECK_THROWS_AS(load_qcqp_json("{"), PreconditionError);
  CHECK_THROWS_AS(load_qcqp_json(R"({"n": 1, "lb": {"re": [0]}, "ub": {"re": [1]}})"), PreconditionError);
  CHECK_THROWS_AS(load_qcqp_json(R"({"n": 1, "lb": {"re": [2]}, "ub": {"re": [1]},
                                     "objective": {"Q": {"triplets": []}}})"),
                  PreconditionError);
  CHECK_THROWS_AS(load_qcqp_json(R"({"n": 1, "lb": {"re": [0]}, "ub": {"re": [1]},
                                     "objective": {"Q": {"triplets": [[0, 3, 1]]}}})"),
                  PreconditionError);
}

TEST_CASE("SDPA export layout") {
  const BoxQpInstance b = parse_boxqp("2\n1 -1\n-2 1\n1 3\n");
  const LiftedModel m = lift_qcqp(affine_shift_positive(boxqp_to_model(b)).problem);
  const ConicProgram cp = build_csdp(m, m.root_bounds, {}, make_var_map(m));
  const std::string s = to_sdpa(cp);
  CHECK(s == to_sdpa(cp));
  std::istringstream in(s);
  std::string comment;
  std::getline(in, comment);
  CHECK(comment.rfind("\"objective constant", 0) == 0);
  int nvars = 0, nblocks = 0;
  in >> nvars >> nblocks;
  CHECK(nvars == cp.num_vars);
  CHECK(nblocks == static_cast<int>(cp.psd.size() + cp.soc.size()) + 1);
  int first = 0;
  in >> first;
  CHECK(first == cp.psd[0].order);
}

TEST_CASE("SDPA exports match an independent SDP solver") {
  // Values from tests/oracles/sdpa_oracle.py (cvxpy/Clarabel) on files written by `sbc export-sdpa`.
  const LiftedModel toy = lift_qcqp(affine_shift_positive(boxqp_to_model(load_boxqp_file(data_path("boxqp/toy3.spar")))).problem);
  CHECK(root_value(toy, Relaxation::sdp) == doctest::Approx(-17.964101607137607).epsilon(1e-7));
  CHECK(root_value(toy, Relaxation::sdp_rlt) == doctest::Approx(-5.0).epsilon(1e-6));
  CHECK(root_value(toy, Relaxation::sdp_cvi) == doctest::Approx(-5.0).epsilon(1e-6));
  const LiftedAcopf a = build_lacopf(load_matpower_file(data_path("case3_lmbd.m")));
  CHECK(root_value(a.model, Relaxation::sdp) == doctest::Approx(5789.913963178546).epsilon(1e-6));
  CHECK(root_value(a.model, Relaxation::sdp_cvi) == doctest::Approx(5790.5426232310765).epsilon(1e-6));
}
