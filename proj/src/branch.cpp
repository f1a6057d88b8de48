#include "sbc/branch.hpp"

#include <algorithm>
#include <cmath>

#include "sbc/cuts.hpp"

namespace sbc {

std::string to_string(BranchRule r) {
  switch (r) {
    case BranchRule::mvsb:
      return "mvsb";
    case BranchRule::mvwb:
      return "mvwb";
    case BranchRule::rbeb:
      return "rbeb";
  }
  return "unknown";
}

BranchRule parse_branch_rule(const std::string& s) {
  if (s == "mvsb") return BranchRule::mvsb;
  if (s == "mvwb") return BranchRule::mvwb;
  if (s == "rbeb") return BranchRule::rbeb;
  throw PreconditionError("unknown branching rule '" + s + "' (expected mvsb, mvwb or rbeb)");
}

std::vector<PairViolation> measure_violation(const HermitianMatrix& Y, const std::vector<LiftedIndex>& pairs) {
  std::vector<PairViolation> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.push_back({p, min_eigenvalue_2x2(Y.w(p.i, p.i), Y.w(p.j, p.j), Y.w(p.i, p.j), Y.t(p.i, p.j))});
  }
  return out;
}

bool is_violated(const PairViolation& v, const HermitianMatrix& Y, double tol) {
  return v.lambda_min > tol * (1.0 + std::abs(Y.w(v.pair.i, v.pair.i)) + std::abs(Y.w(v.pair.j, v.pair.j)));
}

std::optional<PairViolation> most_violated(const std::vector<PairViolation>& v, const HermitianMatrix& Y, double tol) {
  std::optional<PairViolation> best;
  for (const auto& pv : v) {
    if (!is_violated(pv, Y, tol)) continue;
    if (!best || pv.lambda_min > best->lambda_min ||
        (pv.lambda_min == best->lambda_min && pv.pair < best->pair)) {
      best = pv;
    }
  }
  return best;
}

Interval entry_interval(const BoundsState& b, LiftedIndex e) { return {b.eb.L(e.i, e.j), b.eb.U(e.i, e.j)}; }

std::vector<LiftedIndex> candidate_entries(LiftedIndex cstar, const BoundsState& b, double min_width) {
  if (cstar.diagonal()) throw PreconditionError("candidate_entries: c* must be an off-diagonal pair");
  std::vector<LiftedIndex> out;
  for (LiftedIndex e : {LiftedIndex(cstar.i, cstar.i), LiftedIndex(cstar.j, cstar.j), cstar}) {
    if (!e.diagonal() && !b.valid_pair(e.i, e.j)) continue;
    const Interval iv = entry_interval(b, e);
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi)) continue;
    if (iv.hi - iv.lo <= min_width * (1.0 + std::abs(iv.lo) + std::abs(iv.hi))) continue;
    out.push_back(e);
  }
  return out;
}

std::pair<BoundsState, BoundsState> apply_branch(const BoundsState& b, LiftedIndex e) {
  const Interval iv = entry_interval(b, e);
  if (!(iv.lo < iv.hi)) throw PreconditionError("apply_branch: degenerate interval");
  const double mid = 0.5 * (iv.lo + iv.hi);
  BoundsState up = b, down = b;
  up.eb.set(e, mid, iv.hi);
  down.eb.set(e, iv.lo, mid);
  return {std::move(up), std::move(down)};
}

double mvsb_score(std::optional<double> lam_up, std::optional<double> lam_down, double mu) {
  const double a = lam_up ? -*lam_up : kInf;
  const double b = lam_down ? -*lam_down : kInf;
  const double hi = std::max(a, b), lo = std::min(a, b);
  if (std::isinf(hi) && mu == 0.0) return lo;
  return mu * hi + (1.0 - mu) * lo;
}

std::optional<double> solve_wev(LiftedIndex pair, const BoundsState& b, bool real, const IpmOptions& options) {
  const int i = pair.i, j = pair.j;
  if (i == j) throw PreconditionError("solve_wev: pair must be off-diagonal");
  // Variables: Wii, Wjj, Wij, Tij, lambda.
  enum { kWii, kWjj, kWij, kTij, kLam, kN };
  ConicProgram cp;
  cp.num_vars = kN;
  cp.objective = Vec::Zero(kN);
  cp.objective(kLam) = -1.0;
  auto row = [](double c, std::initializer_list<LinTerm> t) { return AffineRow{c, std::vector<LinTerm>(t)}; };
  const EntryBounds& eb = b.eb;
  if (eb.L(i, i) > eb.U(i, i) || eb.L(j, j) > eb.U(j, j)) return std::nullopt;
  auto bound = [&](int v, double lo, double hi) {
    if (lo == hi) {
      cp.eq.push_back(row(-lo, {{v, 1.0}}));
      return;
    }
    if (std::isfinite(lo)) cp.nonneg.push_back(row(-lo, {{v, 1.0}}));
    if (std::isfinite(hi)) cp.nonneg.push_back(row(hi, {{v, -1.0}}));
  };
  bound(kWii, eb.L(i, i), eb.U(i, i));
  bound(kWjj, eb.L(j, j), eb.U(j, j));
  const bool valid = b.valid_pair(i, j);
  if (real) cp.eq.push_back(row(0.0, {{kTij, 1.0}}));
  if (valid) {
    if (eb.L(i, j) > eb.U(i, j)) return std::nullopt;
    cp.nonneg.push_back(row(0.0, {{kWij, 1.0}}));
    if (!real) {
      cp.nonneg.push_back(row(0.0, {{kTij, 1.0}, {kWij, -eb.L(i, j)}}));
      cp.nonneg.push_back(row(0.0, {{kTij, -1.0}, {kWij, eb.U(i, j)}}));
    }
    EntryBounds local(2);
    local.set(LiftedIndex(0, 0), eb.L(i, i), eb.U(i, i));
    local.set(LiftedIndex(1, 1), eb.L(j, j), eb.U(j, j));
    local.set(LiftedIndex(0, 1), eb.L(i, j), eb.U(i, j));
    if (eb.L(i, i) >= 0.0 && eb.L(j, j) >= 0.0 && std::isfinite(eb.U(i, i)) && std::isfinite(eb.U(j, j))) {
      for (const auto& cut : generate_cvi(LiftedIndex(0, 1), local)) {
        AffineRow r;
        r.constant = cut.lhs.constant;
        for (const auto& t : cut.lhs.terms) {
          const int v = t.var.kind == LVar::Kind::T ? kTij : (t.var.i != t.var.j ? kWij : (t.var.i == 0 ? kWii : kWjj));
          r.terms.push_back({v, t.coef});
        }
        cp.nonneg.push_back(std::move(r));
      }
    }
  }
  // Wii + Wjj - 2 lambda >= ||(Wii - Wjj, 2 Wij, 2 Tij)||.
  cp.soc.push_back({row(0.0, {{kWii, 1.0}, {kWjj, 1.0}, {kLam, -2.0}}), row(0.0, {{kWii, 1.0}, {kWjj, -1.0}}),
                    row(0.0, {{kWij, 2.0}}), row(0.0, {{kTij, 2.0}})});
  const ConicSolution sol = solve_conic(cp, BackendId::builtin, options);
  if (sol.status == SolveStatus::infeasible) return std::nullopt;
  if (sol.status != SolveStatus::optimal) {
    // Conservative fallback: the trace bound (Wii + Wjj) / 2 over the box.
    return 0.5 * (eb.U(i, i) + eb.U(j, j));
  }
  return std::max(-sol.primal_objective, -sol.dual_objective);
}

void PseudocostTable::record(LiftedIndex e, bool up, double per_unit) {
  Record& r = records_[e];
  if (up) {
    r.sum_up += per_unit;
    ++r.n_up;
  } else {
    r.sum_down += per_unit;
    ++r.n_down;
  }
}

int PseudocostTable::count(LiftedIndex e, bool up) const {
  const auto it = records_.find(e);
  if (it == records_.end()) return 0;
  return up ? it->second.n_up : it->second.n_down;
}

double PseudocostTable::phi(LiftedIndex e, bool up) const {
  const auto it = records_.find(e);
  if (it == records_.end()) return 0.0;
  const Record& r = it->second;
  if (up) return r.n_up ? r.sum_up / r.n_up : 0.0;
  return r.n_down ? r.sum_down / r.n_down : 0.0;
}

double per_unit_gain(double delta, double width) {
  if (!(width > 0.0)) throw PreconditionError("per_unit_gain: width must be positive");
  return delta / (0.5 * width);
}

double rbeb_score(double phi_up, double phi_down, double width, double mu) {
  return (mu * std::max(phi_up, phi_down) + (1.0 - mu) * std::min(phi_up, phi_down)) * 0.5 * width;
}

}  // namespace sbc
