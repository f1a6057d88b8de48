#pragma once

#include <vector>

#include <Eigen/Sparse>

#include "sbc/numerics.hpp"

namespace sbc {

/// z'Dz + b'z + c with D symmetric.
struct RealQuadForm {
  Eigen::SparseMatrix<double> D;
  Vec b;
  double c = 0.0;

  [[nodiscard]] double value(const Vec& z) const { return z.dot(D * z) + b.dot(z) + c; }
  [[nodiscard]] Vec gradient(const Vec& z) const { return 2.0 * (D * z) + b; }
  static RealQuadForm from_dense(const Mat& d, const Vec& b, double c);
};

/// min f(z) s.t. g_k(z) <= 0, h_k(z) = 0, lo <= z <= hi.
struct LocalProblem {
  int n = 0;
  Vec lo;
  Vec hi;
  RealQuadForm objective;
  std::vector<RealQuadForm> ineq;
  std::vector<RealQuadForm> eq;

  [[nodiscard]] double max_violation(const Vec& z) const;
};

struct LocalOptions {
  int max_outer = 60;
  int max_inner = 100;
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
};

struct LocalResult {
  Vec z;
  double objective = 0.0;
  double max_violation = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
};

/// Powell-Hestenes-Rockafellar augmented Lagrangian; each subproblem is solved over the box by
/// projected Newton. Finishes with Gauss-Newton steps on the active constraints to reduce the
/// residual further.
LocalResult solve_local(const LocalProblem& p, const Vec& z0, const LocalOptions& options = {});

}  // namespace sbc
