#include "sbc/relax.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sbc/cuts.hpp"

namespace sbc {

AffineForm& AffineForm::add_w(int i, int j, double c) {
  terms.push_back({LVar::w(i, j), c});
  return *this;
}

AffineForm& AffineForm::add_t(int i, int j, double c) {
  if (i == j) return *this;
  if (i < j) {
    terms.push_back({LVar::t(i, j), c});
  } else {
    terms.push_back({LVar::t(j, i), -c});
  }
  return *this;
}

AffineForm& AffineForm::add_aux(int k, double c) {
  terms.push_back({LVar::aux(k), c});
  return *this;
}

double AffineForm::coefficient(const LVar& v) const {
  double s = 0.0;
  for (const auto& t : terms) {
    if (t.var == v) s += t.coef;
  }
  return s;
}

void AffineForm::canonicalize() {
  std::sort(terms.begin(), terms.end(), [](const LTerm& a, const LTerm& b) { return a.var < b.var; });
  std::vector<LTerm> merged;
  for (const auto& t : terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const LTerm& t) { return t.coef == 0.0; });
  terms = std::move(merged);
}

bool BoundsState::empty(double tol) const {
  const int d = dim();
  for (int i = 0; i < d; ++i) {
    if (eb.L(i, i) > eb.U(i, i) + tol) return true;
    for (int j = i + 1; j < d; ++j) {
      if (valid_pair(i, j) && eb.L(i, j) > eb.U(i, j) + tol) return true;
    }
  }
  for (Eigen::Index k = 0; k < wl.size(); ++k) {
    if (wl(k) > wu(k) + tol || tl(k) > tu(k) + tol) return true;
  }
  return false;
}

bool BoundsState::operator==(const BoundsState& o) const {
  return eb.L == o.eb.L && eb.U == o.eb.U && ratio_valid == o.ratio_valid && wl == o.wl && wu == o.wu &&
         tl == o.tl && tu == o.tu;
}

std::string to_string(Relaxation r) {
  switch (r) {
    case Relaxation::sdp:
      return "sdp";
    case Relaxation::sdp_rlt:
      return "sdp+rlt";
    case Relaxation::sdp_cvi:
      return "sdp+cvi";
  }
  return "unknown";
}

Relaxation parse_relaxation(const std::string& s) {
  if (s == "sdp") return Relaxation::sdp;
  if (s == "sdp+rlt" || s == "sdp_rlt" || s == "rlt") return Relaxation::sdp_rlt;
  if (s == "sdp+cvi" || s == "sdp_cvi" || s == "cvi") return Relaxation::sdp_cvi;
  throw PreconditionError("unknown relaxation '" + s + "' (expected sdp, sdp+rlt or sdp+cvi)");
}

namespace {

/// Adds <Q, X> + Re(c* x) + b for a shifted problem whose x_k sits at lifted index k + 1.
AffineForm lift_function(const QuadraticFunction& f) {
  AffineForm out;
  out.constant = f.b;
  const int n = f.q.size();
  for (int i = 0; i < n; ++i) {
    if (f.q.w(i, i) != 0.0) out.add_w(i + 1, i + 1, f.q.w(i, i));
    for (int j = i + 1; j < n; ++j) {
      if (f.q.w(i, j) != 0.0) out.add_w(i + 1, j + 1, 2.0 * f.q.w(i, j));
      if (f.q.t(i, j) != 0.0) out.add_t(i + 1, j + 1, 2.0 * f.q.t(i, j));
    }
    if (f.c.re(i) != 0.0) out.add_re(i + 1, f.c.re(i));
    if (f.c.im(i) != 0.0) out.add_im(i + 1, f.c.im(i));
  }
  out.canonicalize();
  return out;
}

RealQuadratic real_quadratic(const QuadraticFunction& f) {
  const int n = f.q.size();
  RealQuadratic rq;
  rq.D = Mat::Zero(2 * n, 2 * n);
  rq.D.topLeftCorner(n, n) = f.q.W();
  rq.D.bottomRightCorner(n, n) = f.q.W();
  rq.D.topRightCorner(n, n) = -f.q.T();
  rq.D.bottomLeftCorner(n, n) = f.q.T();
  rq.b = Vec::Zero(2 * n);
  rq.b.head(n) = f.c.re;
  rq.b.tail(n) = f.c.im;
  rq.c = f.b;
  return rq;
}

}  // namespace

LiftedModel lift_qcqp(const ComplexQcqp& p) {
  p.validate();
  LiftedModel m;
  m.dim = p.n + 1;
  m.homogenizing = true;
  m.real = p.real;
  m.positive_components = true;
  for (int k = 0; k < p.n; ++k) {
    if (p.lb.re(k) < 1.0 - 1e-12 || (!p.real && p.lb.im(k) < 1.0 - 1e-12)) {
      m.positive_components = false;
    }
  }

  m.objective = lift_function(p.objective);
  for (const auto& f : p.constraints) m.le.push_back(lift_function(f));
  for (int k = 0; k <= p.num_constraints(); ++k) m.real_quadratics.push_back(real_quadratic(p.function(k)));

  std::set<std::pair<int, int>> edges;
  for (int k = 0; k <= p.num_constraints(); ++k) {
    const HermitianMatrix& q = p.function(k).q;
    for (int i = 0; i < p.n; ++i) {
      for (int j = i + 1; j < p.n; ++j) {
        if (q.w(i, j) != 0.0 || q.t(i, j) != 0.0) edges.insert({i, j});
      }
    }
  }
  const CliqueTree base = chordal_decompose(p.n, {edges.begin(), edges.end()});
  for (const auto& c : base.cliques) {
    std::vector<int> lifted{0};
    for (int v : c) lifted.push_back(v + 1);
    m.cliques.cliques.push_back(std::move(lifted));
  }
  m.cliques.edges = base.edges;
  m.tracked_pairs = m.cliques.pairs();

  BoundsState& b = m.root_bounds;
  b.eb = initial_entry_bounds(p);
  b.ratio_valid.assign(static_cast<size_t>(m.dim * m.dim), 0);
  for (const auto& pr : m.tracked_pairs) b.set_valid_pair(pr.i, pr.j, true);
  b.wl = Vec::Zero(m.dim);
  b.wu = Vec::Zero(m.dim);
  b.tl = Vec::Zero(m.dim);
  b.tu = Vec::Zero(m.dim);
  b.wl(0) = b.wu(0) = 1.0;
  b.wl.tail(p.n) = p.lb.re;
  b.wu.tail(p.n) = p.ub.re;
  if (!p.real) {
    b.tl.tail(p.n) = p.lb.im;
    b.tu.tail(p.n) = p.ub.im;
  }
  return m;
}

bool VarMap::add(AffineRow& row, const LVar& v, double coef) const {
  int col = -1;
  switch (v.kind) {
    case LVar::Kind::W:
      col = w(v.i, v.j);
      if (col == -2) {
        row.constant += coef;
        return true;
      }
      break;
    case LVar::Kind::T:
      if (v.i == v.j) return true;
      col = t(v.i, v.j);
      break;
    case LVar::Kind::Aux:
      col = aux_offset + v.i;
      if (v.i < 0 || col >= num_vars) col = -1;
      break;
  }
  if (col < 0) return false;
  row.terms.push_back({col, coef});
  return true;
}

AffineRow VarMap::convert(const AffineForm& f) const {
  AffineRow row;
  row.constant = f.constant;
  for (const auto& t : f.terms) {
    if (t.coef == 0.0) continue;
    if (!add(row, t.var, t.coef)) {
      // T entries of a real model are identically zero.
      if (t.var.kind == LVar::Kind::T && t.var.j < dim && w(t.var.i, t.var.j) != -1) continue;
      throw PreconditionError("VarMap::convert: form references an entry outside the clique pattern");
    }
  }
  return row;
}

VarMap make_var_map(const LiftedModel& m) {
  VarMap vm;
  vm.dim = m.dim;
  vm.w = Eigen::MatrixXi::Constant(m.dim, m.dim, -1);
  vm.t = Eigen::MatrixXi::Constant(m.dim, m.dim, -1);
  int next = 0;
  if (m.homogenizing) vm.w(0, 0) = -2;
  for (int i = 0; i < m.dim; ++i) {
    if (vm.w(i, i) == -1) vm.w(i, i) = next++;
  }
  for (const auto& p : m.cliques.pairs()) {
    if (vm.w(p.i, p.j) == -1) {
      vm.w(p.i, p.j) = next++;
      vm.w(p.j, p.i) = vm.w(p.i, p.j);
    }
    if (!m.real && vm.t(p.i, p.j) == -1) vm.t(p.i, p.j) = next++;
  }
  vm.aux_offset = next;
  vm.num_vars = next + m.num_aux;
  return vm;
}

ConicProgram build_csdp(const LiftedModel& m, const BoundsState& bounds, const std::vector<LinearCut>& cuts,
                        const VarMap& vm) {
  ConicProgram cp;
  cp.num_vars = vm.num_vars;
  cp.objective = Vec::Zero(vm.num_vars);
  {
    const AffineRow obj = vm.convert(m.objective);
    cp.objective_constant = obj.constant;
    for (const auto& t : obj.terms) cp.objective(t.var) += t.coef;
  }
  for (const auto& f : m.le) {
    AffineRow r = vm.convert(f);
    r.constant = -r.constant;
    for (auto& t : r.terms) t.coef = -t.coef;
    cp.nonneg.push_back(std::move(r));
  }
  for (const auto& f : m.eq) cp.eq.push_back(vm.convert(f));
  for (const auto& cone : m.soc) {
    std::vector<AffineRow> rows;
    for (const auto& f : cone) rows.push_back(vm.convert(f));
    cp.soc.push_back(std::move(rows));
  }

  // PSD blocks: real embedding [[W, -T], [T, W]] of each clique (W alone when real).
  for (const auto& c : m.cliques.cliques) {
    const int k = static_cast<int>(c.size());
    PsdBlock blk;
    blk.order = m.real ? k : 2 * k;
    auto entry = [&](int r, int col) {
      AffineRow row;
      if (r < k && col < k) {
        vm.add(row, LVar::w(c[r], c[col]), 1.0);
      } else if (r >= k && col >= k) {
        vm.add(row, LVar::w(c[r - k], c[col - k]), 1.0);
      } else {
        // Lower-left block: T(a, b) with a = c[r - k], b = c[col].
        const int a = c[r - k], b = c[col];
        if (a < b) {
          vm.add(row, LVar::t(a, b), 1.0);
        } else if (a > b) {
          vm.add(row, LVar::t(b, a), -1.0);
        }
      }
      return row;
    };
    for (int col = 0; col < blk.order; ++col) {
      for (int r = col; r < blk.order; ++r) blk.entries.push_back(entry(r, col));
    }
    cp.psd.push_back(std::move(blk));
  }

  auto bound_row = [&](const LVar& v, double coef, double constant) {
    AffineRow row;
    row.constant = constant;
    if (vm.add(row, v, coef) && !row.terms.empty()) cp.nonneg.push_back(std::move(row));
  };
  const EntryBounds& eb = bounds.eb;
  for (int i = 0; i < m.dim; ++i) {
    if (vm.w(i, i) < 0) continue;
    if (std::isfinite(eb.L(i, i)) && eb.L(i, i) > 0.0) bound_row(LVar::w(i, i), 1.0, -eb.L(i, i));
    if (std::isfinite(eb.U(i, i))) bound_row(LVar::w(i, i), -1.0, eb.U(i, i));
  }
  for (int i = 0; i < m.dim; ++i) {
    for (int j = i + 1; j < m.dim; ++j) {
      if (!bounds.valid_pair(i, j) || vm.w(i, j) < 0) continue;
      bound_row(LVar::w(i, j), 1.0, 0.0);
      if (m.real) continue;
      const double lo = eb.L(i, j), hi = eb.U(i, j);
      if (std::isfinite(lo)) {
        AffineRow row;  // T - L W >= 0
        vm.add(row, LVar::t(i, j), 1.0);
        vm.add(row, LVar::w(i, j), -lo);
        cp.nonneg.push_back(std::move(row));
      }
      if (std::isfinite(hi)) {
        AffineRow row;  // U W - T >= 0
        vm.add(row, LVar::t(i, j), -1.0);
        vm.add(row, LVar::w(i, j), hi);
        cp.nonneg.push_back(std::move(row));
      }
    }
  }
  if (m.homogenizing && bounds.wl.size() == m.dim) {
    for (int k = 1; k < m.dim; ++k) {
      if (vm.w(0, k) < 0) continue;
      if (std::isfinite(bounds.wl(k))) bound_row(LVar::w(0, k), 1.0, -bounds.wl(k));
      if (std::isfinite(bounds.wu(k))) bound_row(LVar::w(0, k), -1.0, bounds.wu(k));
      if (m.real) continue;
      // Im x_k = -T_0k.
      if (std::isfinite(bounds.tl(k))) bound_row(LVar::t(0, k), -1.0, -bounds.tl(k));
      if (std::isfinite(bounds.tu(k))) bound_row(LVar::t(0, k), 1.0, bounds.tu(k));
    }
  }
  for (int a = 0; a < m.num_aux; ++a) {
    if (std::isfinite(m.aux_lo[a])) bound_row(LVar::aux(a), 1.0, -m.aux_lo[a]);
    if (std::isfinite(m.aux_hi[a])) bound_row(LVar::aux(a), -1.0, m.aux_hi[a]);
  }
  for (const auto& cut : cuts) cp.nonneg.push_back(vm.convert(cut.lhs));
  return cp;
}

RelaxationSolution solve_relaxation(const LiftedModel& m, const BoundsState& bounds, Relaxation variant,
                                    const IpmOptions& options) {
  RelaxationSolution out;
  if (bounds.empty()) {
    out.status = SolveStatus::infeasible;
    out.value = kInf;
    out.primal_value = kInf;
    out.message = "empty bound interval";
    return out;
  }
  const VarMap vm = make_var_map(m);
  const std::vector<LinearCut> cuts = generate_cuts(m, bounds, variant);
  const ConicProgram cp = build_csdp(m, bounds, cuts, vm);
  ConicSolution sol = solve_conic(cp, BackendId::builtin, options);
  if (sol.status == SolveStatus::numerical_failure) {
    // Infeasible nodes with a large objective scale often stall before the certificate converges;
    // the pure feasibility problem certifies them cleanly.
    ConicProgram feas = cp;
    feas.objective.setZero();
    feas.objective_constant = 0.0;
    const ConicSolution fs = solve_conic(feas, BackendId::builtin, options);
    if (fs.status == SolveStatus::infeasible) {
      sol.status = SolveStatus::infeasible;
      sol.message = "infeasible (feasibility re-solve)";
    }
  }
  out.status = sol.status;
  out.inaccurate = sol.inaccurate;
  out.iterations = sol.iterations;
  out.message = sol.message;
  if (sol.status == SolveStatus::infeasible) {
    out.value = kInf;
    out.primal_value = kInf;
    return out;
  }
  out.value = sol.lower_bound();
  out.primal_value = sol.primal_objective;
  if (sol.x.size() != vm.num_vars) return out;
  Mat W = Mat::Zero(m.dim, m.dim), T = Mat::Zero(m.dim, m.dim);
  for (int i = 0; i < m.dim; ++i) {
    for (int j = i; j < m.dim; ++j) {
      const int cw = vm.w(i, j);
      if (cw == -2) {
        W(i, j) = 1.0;
      } else if (cw >= 0) {
        W(i, j) = W(j, i) = sol.x(cw);
      }
      const int ct = j > i ? vm.t(i, j) : -1;
      if (ct >= 0) {
        T(i, j) = sol.x(ct);
        T(j, i) = -sol.x(ct);
      }
    }
  }
  out.Y = HermitianMatrix(W, T);
  out.aux = sol.x.segment(vm.aux_offset, m.num_aux);
  return out;
}

}  // namespace sbc
