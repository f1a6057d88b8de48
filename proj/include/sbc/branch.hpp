#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sbc/relax.hpp"
#include "sbc/tighten.hpp"

namespace sbc {

enum class BranchRule { mvsb, mvwb, rbeb };
std::string to_string(BranchRule r);
BranchRule parse_branch_rule(const std::string& s);

struct PairViolation {
  LiftedIndex pair;
  double lambda_min = 0.0;
};

/// Smallest eigenvalue of every 2x2 principal submatrix of Y on the given pairs.
std::vector<PairViolation> measure_violation(const HermitianMatrix& Y, const std::vector<LiftedIndex>& pairs);

/// A pair is violated when lambda_min exceeds tol * (1 + W_ii + W_jj).
bool is_violated(const PairViolation& v, const HermitianMatrix& Y, double tol);

/// Largest lambda_min among violated pairs; ties go to the lowest (i, j).
std::optional<PairViolation> most_violated(const std::vector<PairViolation>& v, const HermitianMatrix& Y, double tol);

/// Bound interval of a lifted entry: W_ii for diagonals, the ratio T_ij / W_ij otherwise.
Interval entry_interval(const BoundsState& b, LiftedIndex e);

/// (i,i), (j,j), (i,j) for c* = (i,j), dropping fixed, invalid or non-finite intervals.
std::vector<LiftedIndex> candidate_entries(LiftedIndex cstar, const BoundsState& b, double min_width = 1e-9);

/// Bisection at the midpoint: (up child with L' = mid, down child with U' = mid).
std::pair<BoundsState, BoundsState> apply_branch(const BoundsState& b, LiftedIndex entry);

/// mu * max(-lam+, -lam-) + (1 - mu) * min(-lam+, -lam-); an infeasible child (nullopt) counts as +inf.
double mvsb_score(std::optional<double> lam_up, std::optional<double> lam_down, double mu);

/// Worst-case eigenvalue bound: max lambda s.t. ||(Wii - Wjj, 2Wij, 2Tij)|| <= Wii + Wjj - 2 lambda over
/// the J_C bounds of the pair and its two hull cuts. nullopt when the bound set is infeasible.
std::optional<double> solve_wev(LiftedIndex pair, const BoundsState& b, bool real, const IpmOptions& options = {});

/// Running averages of per-unit objective gains per entry and side.
class PseudocostTable {
 public:
  struct Record {
    double sum_up = 0.0;
    double sum_down = 0.0;
    int n_up = 0;
    int n_down = 0;
  };

  void record(LiftedIndex e, bool up, double per_unit);
  [[nodiscard]] int count(LiftedIndex e, bool up) const;
  [[nodiscard]] double phi(LiftedIndex e, bool up) const;
  [[nodiscard]] bool reliable(LiftedIndex e, int eta) const { return count(e, true) >= eta && count(e, false) >= eta; }
  [[nodiscard]] const std::map<LiftedIndex, Record>& records() const { return records_; }

 private:
  std::map<LiftedIndex, Record> records_;
};

/// Per-unit gain of a child: delta / ((U - L) / 2).
double per_unit_gain(double delta, double width);

/// (mu * max(phi+, phi-) + (1 - mu) * min(phi+, phi-)) * width / 2.
double rbeb_score(double phi_up, double phi_down, double width, double mu);

}  // namespace sbc
