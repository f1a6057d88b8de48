#pragma once

#include <string>
#include <vector>

#include "sbc/model.hpp"
#include "sbc/relax.hpp"

namespace sbc {

enum class CutKind { vi1, vi2, rlt, rlt_diag };

std::string to_string(CutKind k);

/// lhs >= 0 over lifted variables.
struct LinearCut {
  LiftedIndex pair;
  AffineForm lhs;
  CutKind kind = CutKind::vi1;
  /// Position within the RLT family (1-based); 0 for vi cuts.
  int index = 0;

  /// lhs evaluated on a lifted point (Y entries, homogenizing corner included in Y).
  [[nodiscard]] double evaluate(const HermitianMatrix& Y) const;
};

/// (sqrt(1 + x^2) - 1) / x with f(0) = 0.
double sigmoid_f(double x);

struct PiCoefficients {
  double pi0 = 0.0;
  double pi1 = 0.0;
  double pi2 = 0.0;
  double pi3 = 0.0;
  double pi4 = 0.0;
};

/// Throws PreconditionError unless Lii <= Uii, Ljj <= Ujj, Lij <= Uij and Lii, Ljj >= 0.
PiCoefficients pi_coefficients(double lii, double uii, double ljj, double ujj, double lij, double uij);

/// The two hull inequalities for pair (i, j), i < j. Empty when a diagonal upper bound is zero.
std::vector<LinearCut> generate_cvi(LiftedIndex pair, const EntryBounds& eb);

/// Rectangle bounds on Re and Im of one complex component.
struct ComponentBox {
  double wl = 0.0;
  double wu = 0.0;
  double tl = 0.0;
  double tu = 0.0;
};

/// McCormick cuts on W_ij (and T_ij unless real) for lifted indices i, j >= 1 of a homogenizing model.
/// Real: four cuts (three when i == j). Complex: the composite sums of the envelopes of
/// w_i w_j + t_i t_j and t_i w_j - w_i t_j, expanded into linear pieces.
std::vector<LinearCut> generate_rlt(int i, int j, const ComponentBox& bi, const ComponentBox& bj, bool real);

enum class HullClass { in_jc, in_hull_only, outside };

std::string to_string(HullClass h);

/// Classifies a 2x2 point against J_C and its hull for the given bounds.
HullClass hull_membership(double wii, double wjj, double wij, double tij, double lii, double uii, double ljj,
                          double ujj, double lij, double uij, double tol = 1e-9);

/// All cuts of the relaxation variant at the given bounds.
std::vector<LinearCut> generate_cuts(const LiftedModel& m, const BoundsState& bounds, Relaxation variant);

}  // namespace sbc
