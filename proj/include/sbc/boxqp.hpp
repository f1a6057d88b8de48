#pragma once

#include <iosfwd>
#include <string>

#include "sbc/driver.hpp"

namespace sbc {

/// min 1/2 x'Qx + f'x over [0, 1]^n.
struct BoxQpInstance {
  int n = 0;
  /// Symmetric.
  Mat Q;
  Vec f;
  /// Fraction of nonzero off-diagonal entries of Q (0 when n = 1).
  double density = 0.0;

  [[nodiscard]] double objective(const Vec& x) const { return 0.5 * x.dot(Q * x) + f.dot(x); }
};

/// Whitespace-separated tokens: n, then the n entries of f, then the n rows of Q. Q is replaced by
/// (Q + Q')/2. Throws PreconditionError on a wrong token count or a non-numeric token.
BoxQpInstance parse_boxqp(const std::string& text);
BoxQpInstance load_boxqp_file(const std::string& path);
std::string to_spar(const BoxQpInstance& b);

/// Real CQCQP with objective q = Q/2, c = f and box [0, 1].
ComplexQcqp boxqp_to_model(const BoxQpInstance& b);

/// SDP with RLT inequalities and a 0.01% gap.
SolverConfig boxqp_default_config();

/// Incumbent x is in the original [0, 1] variables.
SearchResult solve_boxqp(const BoxQpInstance& b, const SolverConfig& cfg, std::ostream* events = nullptr);

}  // namespace sbc
