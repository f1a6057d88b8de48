#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "sbc/numerics.hpp"

namespace sbc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// x*Qx + Re(c*x) + b.
struct QuadraticFunction {
  HermitianMatrix q;
  ComplexVector c;
  double b = 0.0;

  [[nodiscard]] double value(const ComplexVector& x) const;
  /// Gradient with respect to (Re x, Im x).
  [[nodiscard]] ComplexVector gradient(const ComplexVector& x) const;
};

/// min f0(x) s.t. fi(x) <= 0, lb <= x <= ub (componentwise on real and imaginary parts).
struct ComplexQcqp {
  int n = 0;
  QuadraticFunction objective;
  std::vector<QuadraticFunction> constraints;
  ComplexVector lb;
  ComplexVector ub;
  /// Real special case: imaginary parts are fixed at zero.
  bool real = false;

  [[nodiscard]] int num_constraints() const { return static_cast<int>(constraints.size()); }
  /// Index 0 is the objective, 1..m the constraints.
  [[nodiscard]] const QuadraticFunction& function(int k) const {
    return k == 0 ? objective : constraints[static_cast<size_t>(k - 1)];
  }
  /// Checks dimensions, finiteness and ordering of bounds; throws PreconditionError.
  void validate() const;
};

/// Entry (i, j) of the lifted matrix Y = [1 x*; x X], with i <= j. Index 0 is the homogenizing 1.
struct LiftedIndex {
  int i = 0;
  int j = 0;

  LiftedIndex() = default;
  LiftedIndex(int a, int b) : i(std::min(a, b)), j(std::max(a, b)) {}
  [[nodiscard]] bool diagonal() const { return i == j; }
  auto operator<=>(const LiftedIndex&) const = default;
};

/// Bounds L <= U on the lifted matrix. Diagonal entries bound W_ii; an off-diagonal entry (i, j)
/// with i < j bounds the ratio T_ij / W_ij. The (j, i) orientation is [-U_ij, -L_ij].
struct EntryBounds {
  Mat L;
  Mat U;

  EntryBounds() = default;
  explicit EntryBounds(int dim);

  [[nodiscard]] int dim() const { return static_cast<int>(L.rows()); }
  [[nodiscard]] double lo(LiftedIndex e) const { return L(e.i, e.j); }
  [[nodiscard]] double hi(LiftedIndex e) const { return U(e.i, e.j); }
  void set(LiftedIndex e, double lo, double hi);

  /// Ratio bounds T_ab / W_ab in the (a, b) orientation.
  [[nodiscard]] std::pair<double, double> ratio(int a, int b) const;
  void set_ratio(int a, int b, double lo, double hi);

  /// L <= U elementwise and L_ii >= 0.
  [[nodiscard]] bool consistent(double tol = 0.0) const;
};

struct ShiftedQcqp {
  ComplexQcqp problem;
  /// x = q + shift maps a shifted point q back to the original variables.
  ComplexVector shift;

  [[nodiscard]] ComplexVector to_original(const ComplexVector& q) const;
  [[nodiscard]] ComplexVector to_shifted(const ComplexVector& x) const;
};

/// Substitutes q = x - lb + e (+ ie unless real) so every component of q is at least 1.
ShiftedQcqp affine_shift_positive(const ComplexQcqp& p);

/// Root bounds for a shifted problem. Requires W- = wL_i wL_j + tL_i tL_j > 0 for every pair.
EntryBounds initial_entry_bounds(const ComplexQcqp& p);

struct Evaluation {
  double objective = 0.0;
  double max_violation = 0.0;
};

Evaluation evaluate(const ComplexQcqp& p, const ComplexVector& x);

// JSON instance format (see docs/instance_format.md).
ComplexQcqp load_qcqp_json(const std::string& text);
ComplexQcqp load_qcqp_file(const std::string& path);
std::string qcqp_to_json(const ComplexQcqp& p);

}  // namespace sbc
