#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sbc/branch.hpp"
#include "sbc/local_solver.hpp"
#include "sbc/model.hpp"
#include "sbc/relax.hpp"

namespace sbc {

struct SolverConfig {
  Relaxation relaxation = Relaxation::sdp_cvi;
  BranchRule rule = BranchRule::mvwb;
  /// Relative optimality gap limit.
  double gap = 1e-3;
  int node_limit = 10000;
  /// Seconds; infinite by default.
  double time_limit = kInf;
  int max_depth = 100;
  double mu = 0.15;
  int eta = 1;
  int threads = 1;
  unsigned seed = 0;
  /// A pair is violated when lambda_min > violation_tol * (1 + W_ii + W_jj).
  double violation_tol = 1e-6;
  bool tighten = true;
  IpmOptions ipm;
};

struct Incumbent {
  /// Point in the frontend's variable space (shifted variables for QCQP, voltages for ACOPF).
  ComplexVector x;
  /// Frontend-specific extra values (generator dispatch for ACOPF).
  Vec extra;
  double objective = 0.0;
  double max_violation = 0.0;
  std::string source;
};

/// Produces feasible points from node relaxations. Called from the search thread only.
class PrimalOracle {
 public:
  virtual ~PrimalOracle() = default;
  virtual std::optional<Incumbent> propose(const BoundsState& bounds, const RelaxationSolution& sol) = 0;
};

enum class SearchStatus { optimal, infeasible, node_limit, time_limit, uncertified, failed };
std::string to_string(SearchStatus s);

struct SearchResult {
  SearchStatus status = SearchStatus::failed;
  std::optional<Incumbent> incumbent;
  double glb = -kInf;
  double gub = kInf;
  double gap = kInf;
  double root_value = -kInf;
  int nodes = 0;
  int max_depth = 0;
  int relaxations = 0;
  double lbtime = 0.0;
  double ubtime = 0.0;
  double time = 0.0;
  /// False when a depth-pruned node left the gap above the limit.
  bool certified = true;
  std::vector<std::string> warnings;
  std::string message;
};

/// (gub - glb) / max(|gub|, 1e-9).
double relative_gap(double gub, double glb);

/// value >= gub - gap * max(|gub|, 1e-9).
bool prune_test(double value, double gub, double gap);

/// Depth-first spatial branch-and-cut. Events are written as newline-delimited JSON without timings.
SearchResult branch_and_cut(const LiftedModel& m, PrimalOracle& oracle, const SolverConfig& cfg,
                            std::ostream* events = nullptr);

/// Rank-one rounding of the relaxation followed by local polish on the shifted CQCQP.
class QcqpOracle : public PrimalOracle {
 public:
  QcqpOracle(const ComplexQcqp& shifted, const LiftedModel& m);
  std::optional<Incumbent> propose(const BoundsState& bounds, const RelaxationSolution& sol) override;
  /// Polishes a start point and returns it when feasible within 1e-6.
  std::optional<Incumbent> polish(const ComplexVector& x0, const std::string& source);

 private:
  const ComplexQcqp& p_;
  const LiftedModel& m_;
  LocalProblem local_;
};

/// Shifts, lifts and searches a CQCQP. The incumbent is reported in the original variables.
SearchResult solve_qcqp(const ComplexQcqp& p, const SolverConfig& cfg, std::ostream* events = nullptr);

/// Run report with the fields status, glb, gub, gap, nodes, depth, lbtime, ubtime, time.
std::string report_json(const SearchResult& r);

}  // namespace sbc
