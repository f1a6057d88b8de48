#pragma once

#include <string>
#include <vector>

#include "sbc/driver.hpp"

namespace sbc {

/// Powers are per unit on base_mva; voltages per unit; angles in degrees.
struct Bus {
  int id = 0;
  int type = 1;
  double pd = 0.0;
  double qd = 0.0;
  double gs = 0.0;
  double bs = 0.0;
  int area = 1;
  double vm = 1.0;
  double va = 0.0;
  double base_kv = 0.0;
  int zone = 1;
  double vmax = 1.1;
  double vmin = 0.9;
};

struct Generator {
  int bus = 0;
  double pg = 0.0;
  double qg = 0.0;
  double qmax = 0.0;
  double qmin = 0.0;
  double vg = 1.0;
  double mbase = 100.0;
  int status = 1;
  double pmax = 0.0;
  double pmin = 0.0;
  /// Cost in per-unit power: c2 * P^2 + c1 * P + c0.
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;
  double startup = 0.0;
  double shutdown = 0.0;
};

struct Branch {
  int from = 0;
  int to = 0;
  double r = 0.0;
  double x = 0.0;
  double b = 0.0;
  /// Apparent power limit (per unit); 0 means unlimited.
  double rate_a = 0.0;
  double rate_b = 0.0;
  double rate_c = 0.0;
  /// Off-nominal tap ratio; 0 means 1.
  double ratio = 0.0;
  /// Phase shift in degrees.
  double angle = 0.0;
  int status = 1;
  /// Angle difference limits in degrees; +-360 means unspecified.
  double angmin = -360.0;
  double angmax = 360.0;
};

struct PowerCase {
  std::string name;
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Generator> generators;
  std::vector<Branch> branches;
  /// Fields present in the file but not used.
  std::vector<std::string> warnings;

  /// Position of a bus id in `buses`; throws PreconditionError if absent.
  [[nodiscard]] int bus_index(int id) const;
};

/// Parses the bus/gen/branch/gencost matrices of a MATPOWER case. Throws PreconditionError with a
/// line number on malformed rows, a missing gencost table or piecewise-linear costs.
PowerCase parse_matpower(const std::string& text);
PowerCase load_matpower_file(const std::string& path);
std::string to_matpower(const PowerCase& pc);

/// Branch pi-model admittances of an in-service branch.
struct BranchAdmittance {
  int branch = 0;
  int f = 0;
  int t = 0;
  Complex yff, yft, ytf, ytt;
};

struct Admittances {
  Mat G, B;
  /// k x n matrices over in-service branches.
  Mat Gf, Bf, Gt, Bt;
  Mat Cf, Ct;
  std::vector<BranchAdmittance> branches;
};

/// Standard MATPOWER branch model with tap ratio, phase shift, line charging and bus shunts.
/// Throws PreconditionError on a zero-impedance branch.
Admittances build_admittances(const PowerCase& pc);

/// The lifted ACOPF model and the location of its auxiliary variables.
struct LiftedAcopf {
  LiftedModel model;
  Admittances adm;
  /// Auxiliary indices of generator P, Q and cost epigraph s (-1 when c2 = 0).
  std::vector<int> p_aux, q_aux, s_aux;
  /// In-service generators in case order.
  std::vector<int> gens;
  /// Angle difference limits in radians per entry of adm.branches (from minus to).
  std::vector<double> angle_lo, angle_hi;
};

/// Builds the lifted ACOPF: power balance and generator limits over (W, T, P, Q), squared voltage
/// bounds, angle ratio bounds, SOC line limits and PSD blocks from the chordal decomposition of the
/// network. default_angle_deg applies to branches without an angle limit.
LiftedAcopf build_lacopf(const PowerCase& pc, double default_angle_deg = 30.0);

struct AcopfPoint {
  ComplexVector v;
  Vec pg;
  Vec qg;
};

struct AcopfEvaluation {
  double objective = 0.0;
  double max_violation = 0.0;
};

/// Objective and worst constraint violation of a voltage/dispatch point, by direct complex arithmetic.
AcopfEvaluation evaluate_acopf(const LiftedAcopf& a, const PowerCase& pc, const AcopfPoint& x);

/// Bus injections S = diag(V) conj(Y V).
Eigen::VectorXcd bus_injections(const Admittances& adm, const ComplexVector& v);

/// Rounds node relaxations to voltages and polishes them on the rectangular-coordinate ACOPF.
class AcopfOracle : public PrimalOracle {
 public:
  AcopfOracle(const PowerCase& pc, const LiftedAcopf& a);
  std::optional<Incumbent> propose(const BoundsState& bounds, const RelaxationSolution& sol) override;
  /// Local solve from voltages v (dispatch taken from the power balance).
  std::optional<Incumbent> polish(const ComplexVector& v, const std::string& source);

 private:
  const PowerCase& pc_;
  const LiftedAcopf& a_;
  LocalProblem local_;
  int nb_ = 0;
  int ng_ = 0;
  int ref_ = 0;
};

/// Builds, searches and reports an ACOPF. The incumbent holds voltages and extra = (Pg, Qg).
SearchResult solve_acopf(const PowerCase& pc, const SolverConfig& cfg, std::ostream* events = nullptr,
                         double default_angle_deg = 30.0);

}  // namespace sbc
