#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sbc/conic.hpp"
#include "sbc/model.hpp"
#include "sbc/numerics.hpp"

namespace sbc {

/// A variable of a lifted model: an entry W_ij or T_ij of the lifted matrix, or an auxiliary scalar.
struct LVar {
  enum class Kind { W, T, Aux };
  Kind kind = Kind::W;
  int i = 0;
  int j = 0;

  static LVar w(int a, int b) { return {Kind::W, std::min(a, b), std::max(a, b)}; }
  /// T_ab with a < b; callers use AffineForm::add_t for orientation handling.
  static LVar t(int a, int b) { return {Kind::T, a, b}; }
  static LVar aux(int k) { return {Kind::Aux, k, 0}; }
  auto operator<=>(const LVar&) const = default;
};

struct LTerm {
  LVar var;
  double coef = 0.0;
};

/// constant + sum coef * var.
struct AffineForm {
  double constant = 0.0;
  std::vector<LTerm> terms;

  AffineForm& add_w(int i, int j, double c);
  /// Adds c * T_ij for any orientation (T_ji = -T_ij, T_ii = 0).
  AffineForm& add_t(int i, int j, double c);
  AffineForm& add_aux(int k, double c);
  /// Adds c * Re(x_k) or c * Im(x_k) for lifted index k of a homogenizing model.
  AffineForm& add_re(int k, double c) { return add_w(0, k, c); }
  AffineForm& add_im(int k, double c) { return add_t(0, k, -c); }
  /// Coefficient of a variable after merging duplicates.
  [[nodiscard]] double coefficient(const LVar& v) const;
  /// Merges duplicate terms and drops zeros; result sorted by variable.
  void canonicalize();
};

struct CliqueTree {
  std::vector<std::vector<int>> cliques;
  /// Tree edges (a, b) between clique indices, listed in breadth-first order from clique 0.
  std::vector<std::pair<int, int>> edges;

  [[nodiscard]] std::vector<int> separator(int a, int b) const;
  /// Every vertex's cliques form a connected subtree.
  [[nodiscard]] bool running_intersection() const;
  /// All pairs (i < j) sharing a clique, each listed once in order of first appearance.
  [[nodiscard]] std::vector<LiftedIndex> pairs() const;
};

/// Minimum-degree symbolic elimination of the graph on vertices 0..n-1 followed by a
/// maximum-weight spanning tree on clique intersections.
CliqueTree chordal_decompose(int n, const std::vector<std::pair<int, int>>& edges);

class CompletionError : public NumericalError {
 public:
  CompletionError(const std::string& msg, int clique_a, int clique_b)
      : NumericalError(msg), clique_a(clique_a), clique_b(clique_b) {}
  int clique_a;
  int clique_b;
};

/// Stitches rank-one clique blocks into a vector y with (yy*)_c = X_c for every clique.
/// blocks[k] is indexed by the vertices of cliques[k] in order. In lenient mode blocks need not
/// be rank one or consistent; the principal component of each block is used.
ComplexVector rank_one_complete(const CliqueTree& ct, const std::vector<HermitianMatrix>& blocks, int n,
                                bool lenient = false, double tol = 1e-6);

/// Bounds carried by a search node.
struct BoundsState {
  EntryBounds eb;
  /// Per pair: ratio bounds and W_ij >= 0 are valid (J_C applies). Stored for i < j at i * dim + j.
  std::vector<char> ratio_valid;
  /// Rectangle bounds on Re/Im of lifted index k >= 1 in homogenizing models; sized dim.
  Vec wl, wu, tl, tu;

  [[nodiscard]] int dim() const { return eb.dim(); }
  [[nodiscard]] bool valid_pair(int i, int j) const {
    return ratio_valid[static_cast<size_t>(std::min(i, j) * dim() + std::max(i, j))] != 0;
  }
  void set_valid_pair(int i, int j, bool v) {
    ratio_valid[static_cast<size_t>(std::min(i, j) * dim() + std::max(i, j))] = v ? 1 : 0;
  }
  /// Any interval empty beyond tol.
  [[nodiscard]] bool empty(double tol = 1e-9) const;
  bool operator==(const BoundsState&) const;
};

/// Real quadratic z'Dz + b'z + c <= 0 over the real components z = (Re x, Im x) of a
/// homogenizing model; used for bound tightening.
struct RealQuadratic {
  Mat D;
  Vec b;
  double c = 0.0;
};

/// The lifted problem the search operates on.
struct LiftedModel {
  int dim = 0;
  /// Index 0 is the constant 1 and W_0k, T_0k encode x_k.
  bool homogenizing = false;
  /// T is identically zero.
  bool real = false;
  /// Homogenizing components are shifted to be >= 1, so the rectangle bounds are positive.
  bool positive_components = false;

  int num_aux = 0;
  std::vector<double> aux_lo;
  std::vector<double> aux_hi;

  AffineForm objective;
  std::vector<AffineForm> le;
  std::vector<AffineForm> eq;
  std::vector<std::vector<AffineForm>> soc;

  CliqueTree cliques;
  std::vector<LiftedIndex> tracked_pairs;

  /// Original constraints (objective first) in real components, homogenizing models only.
  std::vector<RealQuadratic> real_quadratics;

  BoundsState root_bounds;
};

/// Lifts a shifted CQCQP: index 0 homogenizing, cliques from the aggregate sparsity of all Q_i.
LiftedModel lift_qcqp(const ComplexQcqp& shifted);

enum class Relaxation { sdp, sdp_rlt, sdp_cvi };
std::string to_string(Relaxation r);
Relaxation parse_relaxation(const std::string& s);

/// Map between lifted variables and conic program columns.
struct VarMap {
  int dim = 0;
  Eigen::MatrixXi w;  // -1 absent, -2 constant 1 (homogenizing corner)
  Eigen::MatrixXi t;  // column of T_ij for i < j, -1 absent
  int aux_offset = 0;
  int num_vars = 0;

  /// Appends coef * v to row; returns false when v is not a program variable.
  bool add(AffineRow& row, const LVar& v, double coef) const;
  [[nodiscard]] AffineRow convert(const AffineForm& f) const;
};

VarMap make_var_map(const LiftedModel& m);

struct LinearCut;

/// CSDP with entry-bound constraints and the supplied cuts (each cut is lhs >= 0).
ConicProgram build_csdp(const LiftedModel& m, const BoundsState& bounds, const std::vector<LinearCut>& cuts,
                        const VarMap& vm);

struct RelaxationSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  bool inaccurate = false;
  /// Lower bound on the node (min of primal and dual objective).
  double value = 0.0;
  double primal_value = 0.0;
  HermitianMatrix Y;
  Vec aux;
  int iterations = 0;
  std::string message;
};

/// Builds cuts for the variant, solves, and extracts Y.
RelaxationSolution solve_relaxation(const LiftedModel& m, const BoundsState& bounds, Relaxation variant,
                                    const IpmOptions& options = {});

/// Extracts the clique blocks of Y in clique order.
std::vector<HermitianMatrix> clique_blocks(const CliqueTree& ct, const HermitianMatrix& Y);

}  // namespace sbc
