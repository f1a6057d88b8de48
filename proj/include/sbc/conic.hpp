#pragma once

#include <string>
#include <vector>

#include "sbc/numerics.hpp"

namespace sbc {

struct LinTerm {
  int var = 0;
  double coef = 0.0;
};

/// constant + sum coef * x[var].
struct AffineRow {
  double constant = 0.0;
  std::vector<LinTerm> terms;

  [[nodiscard]] double value(const Vec& x) const;
};

/// Symmetric matrix of order `order` with affine entries, constrained to be PSD.
/// `entries` holds the lower triangle column by column: (j, j), (j+1, j), ..., (order-1, j) for j = 0, 1, ...
struct PsdBlock {
  int order = 0;
  std::vector<AffineRow> entries;

  [[nodiscard]] Mat value(const Vec& x) const;
};

/// min objective'x + objective_constant subject to
///   eq rows == 0, nonneg rows >= 0, soc[k][0] >= ||soc[k][1:]||, psd blocks PSD.
struct ConicProgram {
  int num_vars = 0;
  Vec objective;
  double objective_constant = 0.0;
  std::vector<AffineRow> eq;
  std::vector<AffineRow> nonneg;
  std::vector<std::vector<AffineRow>> soc;
  std::vector<PsdBlock> psd;

  /// Largest violation of any constraint at x (PSD blocks measured by -lambda_min).
  [[nodiscard]] double max_violation(const Vec& x) const;
};

enum class SolveStatus { optimal, infeasible, numerical_failure };

std::string to_string(SolveStatus s);

struct ConicSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  /// Optimal status reached only through the relaxed fallback tolerance.
  bool inaccurate = false;
  Vec x;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
  std::string message;

  /// Bound usable for pruning: min of primal and dual objective.
  [[nodiscard]] double lower_bound() const { return std::min(primal_objective, dual_objective); }
};

struct IpmOptions {
  double feastol = 1e-7;
  double reltol = 1e-7;
  double abstol = 1e-7;
  int max_iterations = 200;
  /// Residual and gap level accepted (flagged inaccurate) when progress stalls.
  double fallback_tol = 1e-5;
  /// Primal infeasibility certificate residual accepted (flagged inaccurate) when nothing better is found.
  double infeasible_fallback_tol = 1e-4;
};

enum class BackendId { builtin };

/// Homogeneous self-dual primal-dual interior-point method with Nesterov-Todd scaling.
ConicSolution solve_conic(const ConicProgram& cp, BackendId backend = BackendId::builtin,
                          const IpmOptions& options = {});

/// SDPA sparse format. Blocks: PSD blocks in order, each SOC as an arrow matrix, then one
/// diagonal block holding nonnegative rows followed by each equality as a pair of rows.
std::string to_sdpa(const ConicProgram& cp);

}  // namespace sbc
