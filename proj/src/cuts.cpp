#include "sbc/cuts.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace sbc {

std::string to_string(CutKind k) {
  switch (k) {
    case CutKind::vi1:
      return "vi1";
    case CutKind::vi2:
      return "vi2";
    case CutKind::rlt:
      return "rlt";
    case CutKind::rlt_diag:
      return "rlt-diag";
  }
  return "unknown";
}

std::string to_string(HullClass h) {
  switch (h) {
    case HullClass::in_jc:
      return "in_jc";
    case HullClass::in_hull_only:
      return "in_hull_only";
    case HullClass::outside:
      return "outside";
  }
  return "unknown";
}

double LinearCut::evaluate(const HermitianMatrix& Y) const {
  double v = lhs.constant;
  for (const auto& t : lhs.terms) {
    switch (t.var.kind) {
      case LVar::Kind::W:
        v += t.coef * Y.w(t.var.i, t.var.j);
        break;
      case LVar::Kind::T:
        v += t.coef * Y.t(t.var.i, t.var.j);
        break;
      case LVar::Kind::Aux:
        throw PreconditionError("LinearCut::evaluate: cut references an auxiliary variable");
    }
  }
  return v;
}

double sigmoid_f(double x) {
  if (x == 0.0) return 0.0;
  // x / (sqrt(1 + x^2) + 1) avoids cancellation for small |x|.
  return x / (std::sqrt(1.0 + x * x) + 1.0);
}

namespace {

double safe_sqrt(double v) { return std::sqrt(std::max(0.0, v)); }

}  // namespace

PiCoefficients pi_coefficients(double lii, double uii, double ljj, double ujj, double lij, double uij) {
  if (!(lii <= uii && ljj <= ujj && lij <= uij) || lii < 0.0 || ljj < 0.0) {
    throw PreconditionError("pi_coefficients: bounds must satisfy L <= U and Lii, Ljj >= 0");
  }
  PiCoefficients p;
  const double fl = sigmoid_f(lij), fu = sigmoid_f(uij);
  const double den = 1.0 + fl * fu;
  const double pre = (safe_sqrt(lii) + safe_sqrt(uii)) * (safe_sqrt(ljj) + safe_sqrt(ujj));
  p.pi0 = -safe_sqrt(lii * ljj * uii * ujj);
  p.pi1 = -safe_sqrt(ljj * ujj);
  p.pi2 = -safe_sqrt(lii * uii);
  p.pi3 = pre * (1.0 - fl * fu) / den;
  p.pi4 = pre * (fl + fu) / den;
  return p;
}

std::vector<LinearCut> generate_cvi(LiftedIndex pair, const EntryBounds& eb) {
  const int i = pair.i, j = pair.j;
  if (i == j) throw PreconditionError("generate_cvi: pair must be off-diagonal");
  const double lii = eb.L(i, i), uii = eb.U(i, i), ljj = eb.L(j, j), ujj = eb.U(j, j);
  const double lij = eb.L(i, j), uij = eb.U(i, j);
  if (uii <= 0.0 || ujj <= 0.0) return {};
  const PiCoefficients p = pi_coefficients(std::max(0.0, lii), uii, std::max(0.0, ljj), ujj, lij, uij);

  auto make = [&](double rii, double rjj, double rc, CutKind kind) {
    LinearCut cut;
    cut.pair = pair;
    cut.kind = kind;
    cut.lhs.constant = p.pi0 + rc;
    cut.lhs.add_w(i, i, p.pi1 - rii);
    cut.lhs.add_w(j, j, p.pi2 - rjj);
    cut.lhs.add_w(i, j, p.pi3);
    if (p.pi4 != 0.0) cut.lhs.add_t(i, j, p.pi4);
    return cut;
  };
  // Right-hand sides: Ujj Wii + Uii Wjj - Uii Ujj and Ljj Wii + Lii Wjj - Lii Ljj.
  return {make(ujj, uii, uii * ujj, CutKind::vi1),
          make(std::max(0.0, ljj), std::max(0.0, lii), std::max(0.0, lii) * std::max(0.0, ljj), CutKind::vi2)};
}

namespace {

/// Linear estimator c_a * a + c_b * b + c0 of a product a * b.
struct Estimator {
  double ca = 0.0;
  double cb = 0.0;
  double c0 = 0.0;
};

// McCormick envelopes of a * b for a in [al, au], b in [bl, bu].
std::array<Estimator, 2> over(double al, double au, double bl, double bu) {
  return {Estimator{bu, al, -al * bu}, Estimator{bl, au, -au * bl}};
}

std::array<Estimator, 2> under(double al, double au, double bl, double bu) {
  return {Estimator{bl, al, -al * bl}, Estimator{bu, au, -au * bu}};
}

/// Component handle: Re or Im of lifted index k.
struct Comp {
  int k;
  bool im;
};

void add_comp(AffineForm& f, Comp c, double coef) {
  if (c.im) {
    f.add_im(c.k, coef);
  } else {
    f.add_re(c.k, coef);
  }
}

}  // namespace

std::vector<LinearCut> generate_rlt(int i, int j, const ComponentBox& bi, const ComponentBox& bj, bool real) {
  if (i < 1 || j < 1) throw PreconditionError("generate_rlt: indices must be original components (>= 1)");
  std::vector<LinearCut> cuts;
  const LiftedIndex pair(i, j);
  auto push = [&](AffineForm f, CutKind kind) {
    LinearCut c;
    c.pair = pair;
    c.kind = kind;
    c.index = static_cast<int>(cuts.size()) + 1;
    c.lhs = std::move(f);
    cuts.push_back(std::move(c));
  };
  const Comp wi{i, false}, ti{i, true}, wj{j, false}, tj{j, true};

  if (real) {
    if (i == j) {
      const double l = bi.wl, u = bi.wu;
      AffineForm d1;  // Wii <= (u + l) w - l u
      d1.add_w(i, i, -1.0);
      add_comp(d1, wi, u + l);
      d1.constant = -l * u;
      push(d1, CutKind::rlt_diag);
      AffineForm d2;  // Wii >= 2 l w - l^2
      d2.add_w(i, i, 1.0);
      add_comp(d2, wi, -2.0 * l);
      d2.constant = l * l;
      push(d2, CutKind::rlt_diag);
      AffineForm d3;  // Wii >= 2 u w - u^2
      d3.add_w(i, i, 1.0);
      add_comp(d3, wi, -2.0 * u);
      d3.constant = u * u;
      push(d3, CutKind::rlt_diag);
      return cuts;
    }
    for (const Estimator& e : over(bi.wl, bi.wu, bj.wl, bj.wu)) {
      AffineForm f;  // e(w) - Wij >= 0
      f.add_w(i, j, -1.0);
      add_comp(f, wi, e.ca);
      add_comp(f, wj, e.cb);
      f.constant = e.c0;
      push(f, CutKind::rlt);
    }
    for (const Estimator& e : under(bi.wl, bi.wu, bj.wl, bj.wu)) {
      AffineForm f;  // Wij - e(w) >= 0
      f.add_w(i, j, 1.0);
      add_comp(f, wi, -e.ca);
      add_comp(f, wj, -e.cb);
      f.constant = -e.c0;
      push(f, CutKind::rlt);
    }
    return cuts;
  }

  // Sum of two products p1 = a1 * b1 (sign s1) and p2 = a2 * b2 (sign s2) bounding an entry.
  struct Product {
    Comp a, b;
    double al, au, bl, bu;
    double sign;
  };
  auto composite = [&](const Product& p1, const Product& p2, LVar entry, double entry_sign, CutKind kind) {
    // Upper bound on s1 p1 + s2 p2: over-estimator where sign > 0, negated under-estimator otherwise.
    auto upper = [](const Product& p) {
      std::array<Estimator, 2> e = p.sign > 0 ? over(p.al, p.au, p.bl, p.bu) : under(p.al, p.au, p.bl, p.bu);
      for (auto& x : e) {
        x.ca *= p.sign;
        x.cb *= p.sign;
        x.c0 *= p.sign;
      }
      return e;
    };
    auto lower = [](const Product& p) {
      std::array<Estimator, 2> e = p.sign > 0 ? under(p.al, p.au, p.bl, p.bu) : over(p.al, p.au, p.bl, p.bu);
      for (auto& x : e) {
        x.ca *= p.sign;
        x.cb *= p.sign;
        x.c0 *= p.sign;
      }
      return e;
    };
    auto entry_term = [&](AffineForm& f, double c) {
      if (entry.kind == LVar::Kind::W) {
        f.add_w(entry.i, entry.j, c * entry_sign);
      } else {
        f.add_t(entry.i, entry.j, c * entry_sign);
      }
    };
    for (const Estimator& e1 : upper(p1)) {
      for (const Estimator& e2 : upper(p2)) {
        AffineForm f;  // e1 + e2 - entry >= 0
        entry_term(f, -1.0);
        add_comp(f, p1.a, e1.ca);
        add_comp(f, p1.b, e1.cb);
        add_comp(f, p2.a, e2.ca);
        add_comp(f, p2.b, e2.cb);
        f.constant = e1.c0 + e2.c0;
        f.canonicalize();
        push(f, kind);
      }
    }
    for (const Estimator& e1 : lower(p1)) {
      for (const Estimator& e2 : lower(p2)) {
        AffineForm f;  // entry - e1 - e2 >= 0
        entry_term(f, 1.0);
        add_comp(f, p1.a, -e1.ca);
        add_comp(f, p1.b, -e1.cb);
        add_comp(f, p2.a, -e2.ca);
        add_comp(f, p2.b, -e2.cb);
        f.constant = -(e1.c0 + e2.c0);
        f.canonicalize();
        push(f, kind);
      }
    }
  };

  if (i == j) {
    // Wii = w^2 + t^2.
    AffineForm up;
    up.add_w(i, i, -1.0);
    add_comp(up, wi, bi.wu + bi.wl);
    add_comp(up, ti, bi.tu + bi.tl);
    up.constant = -bi.wl * bi.wu - bi.tl * bi.tu;
    push(up, CutKind::rlt_diag);
    for (double lw : {bi.wl, bi.wu}) {
      for (double lt : {bi.tl, bi.tu}) {
        AffineForm f;  // Wii - (2 lw w - lw^2) - (2 lt t - lt^2) >= 0
        f.add_w(i, i, 1.0);
        add_comp(f, wi, -2.0 * lw);
        add_comp(f, ti, -2.0 * lt);
        f.constant = lw * lw + lt * lt;
        f.canonicalize();
        push(f, CutKind::rlt_diag);
      }
    }
    return cuts;
  }
  // Wij = wi wj + ti tj.
  composite(Product{wi, wj, bi.wl, bi.wu, bj.wl, bj.wu, 1.0}, Product{ti, tj, bi.tl, bi.tu, bj.tl, bj.tu, 1.0},
            LVar::w(i, j), 1.0, CutKind::rlt);
  // Tij = ti wj - wi tj, oriented for i < j.
  const double tsign = i < j ? 1.0 : -1.0;
  composite(Product{ti, wj, bi.tl, bi.tu, bj.wl, bj.wu, 1.0}, Product{wi, tj, bi.wl, bi.wu, bj.tl, bj.tu, -1.0},
            LVar::t(std::min(i, j), std::max(i, j)), tsign, CutKind::rlt);
  return cuts;
}

HullClass hull_membership(double wii, double wjj, double wij, double tij, double lii, double uii, double ljj,
                          double ujj, double lij, double uij, double tol) {
  const double scale = 1.0 + std::max({std::abs(uii), std::abs(ujj), 1.0}) * std::max(1.0, std::abs(uij));
  const double t = tol * scale;
  const bool bounds_ok = wii >= lii - t && wii <= uii + t && wjj >= ljj - t && wjj <= ujj + t &&
                         tij >= lij * wij - t && tij <= uij * wij + t && wij >= -t;
  if (!bounds_ok) return HullClass::outside;
  const double minor = wii * wjj - wij * wij - tij * tij;
  const double mscale = tol * (1.0 + uii * ujj);
  if (std::abs(minor) <= mscale) return HullClass::in_jc;
  if (minor < -mscale) return HullClass::outside;
  EntryBounds eb(2);
  eb.set(LiftedIndex(0, 0), lii, uii);
  eb.set(LiftedIndex(1, 1), ljj, ujj);
  eb.set(LiftedIndex(0, 1), lij, uij);
  HermitianMatrix y(2);
  y.set(0, 0, wii);
  y.set(1, 1, wjj);
  y.set(0, 1, Complex(wij, tij));
  for (const auto& c : generate_cvi(LiftedIndex(0, 1), eb)) {
    if (c.evaluate(y) < -t) return HullClass::outside;
  }
  return HullClass::in_hull_only;
}

std::vector<LinearCut> generate_cuts(const LiftedModel& m, const BoundsState& bounds, Relaxation variant) {
  std::vector<LinearCut> cuts;
  if (variant == Relaxation::sdp_cvi) {
    for (const auto& p : m.tracked_pairs) {
      if (!bounds.valid_pair(p.i, p.j)) continue;
      auto c = generate_cvi(p, bounds.eb);
      cuts.insert(cuts.end(), c.begin(), c.end());
    }
  } else if (variant == Relaxation::sdp_rlt) {
    if (!m.homogenizing) throw PreconditionError("generate_cuts: RLT requires a homogenizing model");
    auto box = [&](int k) { return ComponentBox{bounds.wl(k), bounds.wu(k), bounds.tl(k), bounds.tu(k)}; };
    for (int k = 1; k < m.dim; ++k) {
      auto c = generate_rlt(k, k, box(k), box(k), m.real);
      cuts.insert(cuts.end(), c.begin(), c.end());
    }
    for (const auto& p : m.tracked_pairs) {
      if (p.i == 0) continue;
      auto c = generate_rlt(p.i, p.j, box(p.i), box(p.j), m.real);
      cuts.insert(cuts.end(), c.begin(), c.end());
    }
  }
  return cuts;
}

}  // namespace sbc
