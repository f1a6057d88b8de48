#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "instances.hpp"
#include "json.hpp"
#include "sbc/driver.hpp"

using namespace sbc;

namespace {

/// Grid minimum of a BoxQP over {0, 1/g, ..., 1}^n.
double boxqp_grid(const ComplexQcqp& p, int g) {
  const int n = p.n;
  std::vector<int> idx(static_cast<size_t>(n), 0);
  double best = kInf;
  while (true) {
    ComplexVector x(n);
    for (int i = 0; i < n; ++i) x.re(i) = idx[static_cast<size_t>(i)] / static_cast<double>(g);
    best = std::min(best, p.objective.value(x));
    int k = 0;
    while (k < n && ++idx[static_cast<size_t>(k)] > g) idx[static_cast<size_t>(k++)] = 0;
    if (k == n) break;
  }
  return best;
}

}  // namespace

TEST_CASE("gap and prune test examples") {
  CHECK(relative_gap(100.0, 99.0) == doctest::Approx(0.01));
  CHECK(relative_gap(-100.0, -101.0) == doctest::Approx(0.01));
  CHECK(relative_gap(0.0, -1e-12) == doctest::Approx(1e-3));
  CHECK(std::isinf(relative_gap(kInf, 0.0)));
  CHECK(prune_test(99.95, 100.0, 1e-3));
  CHECK_FALSE(prune_test(99.8, 100.0, 1e-3));
  CHECK(prune_test(100.0, 100.0, 0.0));
  CHECK_FALSE(prune_test(1e300, kInf, 1e-3));
  CHECK(prune_test(kInf, kInf, 1e-3));
}

TEST_CASE("local solver projects onto a disc") {
  LocalProblem lp;
  lp.n = 2;
  lp.lo = Vec::Constant(2, -2.0);
  lp.hi = Vec::Constant(2, 2.0);
  // (z1 - 2)^2 + (z2 - 1)^2 s.t. z1^2 + z2^2 <= 1.
  lp.objective = RealQuadForm::from_dense(Mat::Identity(2, 2), Vec(Eigen::Vector2d(-4.0, -2.0)), 5.0);
  lp.ineq.push_back(RealQuadForm::from_dense(Mat::Identity(2, 2), Vec::Zero(2), -1.0));
  const LocalResult r = solve_local(lp, Vec::Zero(2));
  const Eigen::Vector2d expect = Eigen::Vector2d(2.0, 1.0).normalized();
  CHECK(r.max_violation <= 1e-8);
  CHECK((r.z - expect).norm() < 1e-5);
}

TEST_CASE("local solver handles equality constraints") {
  LocalProblem lp;
  lp.n = 2;
  lp.lo = Vec::Constant(2, -3.0);
  lp.hi = Vec::Constant(2, 3.0);
  // min z1 + z2 s.t. z1^2 + z2^2 = 2: optimum (-1, -1).
  lp.objective = RealQuadForm::from_dense(Mat::Zero(2, 2), Vec::Ones(2), 0.0);
  lp.eq.push_back(RealQuadForm::from_dense(Mat::Identity(2, 2), Vec::Zero(2), -2.0));
  const LocalResult r = solve_local(lp, Vec(Eigen::Vector2d(0.5, -0.2)));
  CHECK(r.max_violation <= 1e-8);
  CHECK(r.objective == doctest::Approx(-2.0).epsilon(1e-6));
}

TEST_CASE("BoxQP instances reach the grid optimum under every rule") {
  std::mt19937 rng(1);
  for (int inst = 0; inst < 3; ++inst) {
    const ComplexQcqp p = testing::random_boxqp(4, rng);
    const double grid = boxqp_grid(p, 20);
    for (auto rel : {Relaxation::sdp_rlt, Relaxation::sdp_cvi}) {
      for (auto rule : {BranchRule::mvsb, BranchRule::mvwb, BranchRule::rbeb}) {
        SolverConfig cfg;
        cfg.relaxation = rel;
        cfg.rule = rule;
        cfg.gap = 1e-4;
        const SearchResult r = solve_qcqp(p, cfg);
        CAPTURE(inst);
        CHECK(r.status == SearchStatus::optimal);
        REQUIRE(r.incumbent);
        CHECK(r.incumbent->max_violation <= 1e-6);
        // The grid is a feasible sample: gub cannot be worse than it by more than the gap.
        CHECK(r.gub <= grid + 1e-4 * std::abs(grid) + 1e-9);
        CHECK(r.glb <= grid + 1e-9);
        CHECK(r.glb <= r.gub);
      }
    }
  }
}

TEST_CASE("complex instances close the gap and bound sampled points") {
  std::mt19937 rng(1);
  std::mt19937 sampler(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int inst = 0; inst < 4; ++inst) {
    const ComplexQcqp p = testing::random_complex_path(3, rng);
    SolverConfig cfg;
    cfg.rule = BranchRule::mvsb;
    const SearchResult r = solve_qcqp(p, cfg);
    CHECK(r.status == SearchStatus::optimal);
    CHECK(r.gap <= cfg.gap);
    REQUIRE(r.incumbent);
    const Evaluation ev = evaluate(p, r.incumbent->x);
    CHECK(ev.max_violation <= 1e-6);
    CHECK(ev.objective == doctest::Approx(r.gub).epsilon(1e-9));
    for (int s = 0; s < 2000; ++s) {
      ComplexVector x(p.n);
      for (int k = 0; k < p.n; ++k) x.set(k, Complex(u(sampler), u(sampler)));
      const Evaluation e = evaluate(p, x);
      if (e.max_violation <= 0.0) CHECK(e.objective >= r.glb - 1e-7);
    }
  }
}

TEST_CASE("event logs are deterministic across runs and thread counts") {
  std::mt19937 rng(1);
  ComplexQcqp p;
  for (int k = 0; k < 3; ++k) p = testing::random_complex_path(3, rng);
  for (auto rule : {BranchRule::mvsb, BranchRule::mvwb, BranchRule::rbeb}) {
    SolverConfig cfg;
    cfg.rule = rule;
    cfg.node_limit = 20;
    std::ostringstream a, b, c;
    solve_qcqp(p, cfg, &a);
    solve_qcqp(p, cfg, &b);
    cfg.threads = 3;
    solve_qcqp(p, cfg, &c);
    CHECK(a.str() == b.str());
    CHECK(a.str() == c.str());
    CHECK(a.str().size() > 100);
  }
}

TEST_CASE("depth limit leaves the run uncertified") {
  std::mt19937 rng(1);
  const ComplexQcqp p = testing::random_boxqp(4, rng);
  SolverConfig cfg;
  cfg.relaxation = Relaxation::sdp;
  cfg.max_depth = 2;
  const SearchResult r = solve_qcqp(p, cfg);
  CHECK_FALSE(r.certified);
  CHECK(r.status == SearchStatus::uncertified);
  CHECK_FALSE(r.warnings.empty());
  CHECK(r.glb <= r.gub);
}

TEST_CASE("child order explores the lower value first") {
  std::mt19937 rng(1);
  ComplexQcqp p;
  for (int k = 0; k < 3; ++k) p = testing::random_complex_path(3, rng);
  SolverConfig cfg;
  cfg.rule = BranchRule::mvwb;
  cfg.node_limit = 15;
  std::ostringstream ev;
  solve_qcqp(p, cfg, &ev);
  std::istringstream in(ev.str());
  std::string line;
  std::vector<nlohmann::json> events;
  while (std::getline(in, line)) events.push_back(nlohmann::json::parse(line));
  int checked = 0;
  for (size_t k = 0; k + 1 < events.size(); ++k) {
    const auto& e = events[k];
    if (e["event"] != "branch") continue;
    // Children of this branch follow as node events; the next branch or prune names the popped node.
    std::vector<nlohmann::json> kids;
    size_t t = k + 1;
    for (; t < events.size() && kids.size() < 2; ++t) {
      if (events[t]["event"] == "node") kids.push_back(events[t]);
    }
    if (kids.size() < 2 || kids[0]["status"] != "open" || kids[1]["status"] != "open") continue;
    for (; t < events.size(); ++t) {
      const auto& f = events[t];
      if ((f["event"] == "branch" && f.contains("node")) || f["event"] == "prune") break;
    }
    if (t == events.size()) continue;
    const int popped = events[t].contains("node") ? events[t]["node"].get<int>() : events[t]["id"].get<int>();
    const double vu = kids[0]["value"], vd = kids[1]["value"];
    const int expect = vu < vd ? kids[0]["id"].get<int>() : kids[1]["id"].get<int>();
    CHECK(popped == expect);
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("report contains the run fields") {
  std::mt19937 rng(1);
  const SearchResult r = solve_qcqp(testing::random_boxqp(3, rng), SolverConfig{});
  const auto j = nlohmann::json::parse(report_json(r));
  for (const char* k : {"status", "glb", "gub", "gap", "nodes", "depth", "lbtime", "ubtime", "time"}) {
    CHECK(j.contains(k));
  }
  CHECK(j["status"] == "optimal");
}

TEST_CASE("infeasible instance") {
  ComplexQcqp p = testing::boxqp(Mat::Identity(2, 2), Vec::Zero(2));
  QuadraticFunction c;
  c.q = HermitianMatrix(Mat::Zero(2, 2), Mat::Zero(2, 2));
  c.c = ComplexVector(Vec::Constant(2, -1.0), Vec::Zero(2));
  c.b = 3.0;  // x1 + x2 >= 3 on the unit box
  p.constraints.push_back(c);
  const SearchResult r = solve_qcqp(p, SolverConfig{});
  CHECK(r.status == SearchStatus::infeasible);
  CHECK_FALSE(r.incumbent);
}
