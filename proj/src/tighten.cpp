#include "sbc/tighten.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace sbc {

namespace {

/// Smallest value of a z^2 + b z over [lo, hi].
double quad_min(double a, double b, double lo, double hi) {
  auto f = [&](double z) { return a * z * z + b * z; };
  double m = std::min(f(lo), f(hi));
  if (a > 0.0) {
    const double z = -b / (2.0 * a);
    if (z > lo && z < hi) m = std::min(m, f(z));
  }
  return m;
}

double prod_min(double al, double au, double bl, double bu) {
  return std::min({al * bl, al * bu, au * bl, au * bu});
}

double prod_max(double al, double au, double bl, double bu) {
  return std::max({al * bl, al * bu, au * bl, au * bu});
}

void hull_add(std::optional<Interval>& acc, double lo, double hi) {
  if (lo > hi) return;
  if (!acc) {
    acc = Interval{lo, hi};
  } else {
    acc->lo = std::min(acc->lo, lo);
    acc->hi = std::max(acc->hi, hi);
  }
}

std::optional<Interval> tighten_linear(double c, double ly, double uy) {
  // Exists y in [ly, uy] with q y + c <= 0, split by the sign of q.
  std::optional<Interval> out;
  // q >= 0: q ly <= -c.
  if (ly > 0.0) {
    hull_add(out, 0.0, -c / ly);
  } else if (ly == 0.0) {
    if (c <= 0.0) hull_add(out, 0.0, kInf);
  } else {
    hull_add(out, std::max(0.0, -c / ly), kInf);
  }
  // q <= 0: q uy <= -c.
  if (uy > 0.0) {
    hull_add(out, -kInf, std::min(0.0, -c / uy));
  } else if (uy == 0.0) {
    if (c <= 0.0) hull_add(out, -kInf, 0.0);
  } else {
    hull_add(out, -kInf, -c / uy);
  }
  return out;
}

}  // namespace

std::optional<Interval> tighten_quadratic(const QuadConstraint1D& qc) {
  if (qc.ly > qc.uy) throw PreconditionError("tighten_quadratic: empty y-range");
  const double a = qc.a, c = qc.c;
  if (a == 0.0) return tighten_linear(c, qc.ly, qc.uy);
  if (a < 0.0) return Interval{};
  auto r_minus = [&](double y) { return (-y - std::sqrt(std::max(0.0, y * y - 4.0 * a * c))) / (2.0 * a); };
  auto r_plus = [&](double y) { return (-y + std::sqrt(std::max(0.0, y * y - 4.0 * a * c))) / (2.0 * a); };
  const double k = -4.0 * a * c;
  if (k >= 0.0) {
    // Both roots decrease in y.
    return Interval{r_minus(qc.uy), r_plus(qc.ly)};
  }
  const double s = std::sqrt(-k);
  std::vector<double> ys;
  for (double y : {qc.ly, qc.uy}) {
    if (std::abs(y) >= s) ys.push_back(y);
  }
  for (double y : {-s, s}) {
    if (y >= qc.ly && y <= qc.uy) ys.push_back(y);
  }
  if (ys.empty()) return std::nullopt;
  Interval out{kInf, -kInf};
  for (double y : ys) {
    out.lo = std::min(out.lo, r_minus(y));
    out.hi = std::max(out.hi, r_plus(y));
  }
  return out;
}

QuadConstraint1D aggregate_to_1d(const RealQuadratic& rq, const Vec& zl, const Vec& zu, int k) {
  const int n = static_cast<int>(rq.b.size());
  if (k < 0 || k >= n) throw PreconditionError("aggregate_to_1d: component out of range");
  QuadConstraint1D out;
  out.a = rq.D(k, k);
  out.ly = out.uy = rq.b(k);
  double rest = rq.c;
  for (int i = 0; i < n; ++i) {
    if (i == k) continue;
    const double dki = 2.0 * rq.D(k, i);
    if (dki != 0.0) {
      out.ly += std::min(dki * zl(i), dki * zu(i));
      out.uy += std::max(dki * zl(i), dki * zu(i));
    }
    rest += quad_min(rq.D(i, i), rq.b(i), zl(i), zu(i));
    for (int j = i + 1; j < n; ++j) {
      if (j == k || rq.D(i, j) == 0.0) continue;
      const double d = 2.0 * rq.D(i, j);
      rest += d > 0.0 ? d * prod_min(zl(i), zu(i), zl(j), zu(j)) : d * prod_max(zl(i), zu(i), zl(j), zu(j));
    }
  }
  out.c = rest;
  return out;
}

EntryBounds tighten_cycle(const std::vector<int>& cycle, const EntryBounds& eb) {
  EntryBounds out = eb;
  const int len = static_cast<int>(cycle.size());
  if (len < 3) return out;
  constexpr double kLimit = std::numbers::pi / 2.0 - 1e-9;
  for (int e = 0; e < len; ++e) {
    const int a = cycle[e], b = cycle[(e + 1) % len];
    double slo = 0.0, shi = 0.0;
    for (int f = 0; f < len; ++f) {
      if (f == e) continue;
      const auto [lo, hi] = out.ratio(cycle[f], cycle[(f + 1) % len]);
      slo += std::atan(lo);
      shi += std::atan(hi);
    }
    // Angle of edge (a, b) equals minus the sum of the others.
    auto [lo, hi] = out.ratio(a, b);
    if (std::abs(shi) < kLimit) lo = std::max(lo, -std::tan(shi));
    if (std::abs(slo) < kLimit) hi = std::min(hi, -std::tan(slo));
    out.set_ratio(a, b, lo, hi);
  }
  return out;
}

std::vector<std::array<int, 3>> tracked_triangles(const LiftedModel& m) {
  std::set<std::pair<int, int>> edges;
  std::vector<std::vector<int>> adj(m.dim);
  for (const auto& p : m.tracked_pairs) {
    if (p.i == p.j) continue;
    if (edges.insert({p.i, p.j}).second) {
      adj[p.i].push_back(p.j);
      adj[p.j].push_back(p.i);
    }
  }
  std::vector<std::array<int, 3>> out;
  for (auto [i, j] : edges) {
    for (int k : adj[j]) {
      if (k > j && edges.contains({i, k})) out.push_back({i, j, k});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

constexpr double kEps = 1e-9;

struct Tracker {
  BoundsState& b;
  int changes = 0;
  bool infeasible = false;

  double tol(double v) const { return kEps * (1.0 + std::abs(v)); }

  void raise(double& lo, double hi, double v) {
    if (!(v > lo + tol(lo))) return;
    if (v > hi + tol(hi)) {
      infeasible = true;
      return;
    }
    lo = std::min(v, hi);
    ++changes;
  }
  void lower(double lo, double& hi, double v) {
    if (!(v < hi - tol(hi))) return;
    if (v < lo - tol(lo)) {
      infeasible = true;
      return;
    }
    hi = std::max(v, lo);
    ++changes;
  }
  void meet_ratio(int i, int j, double lo, double hi) {
    auto [cl, ch] = b.eb.ratio(i, j);
    raise(cl, ch, lo);
    lower(cl, ch, hi);
    b.eb.set_ratio(i, j, cl, ch);
  }
};

/// Angle interval of component k, which must have positive real part.
std::optional<Interval> angle_interval(const BoundsState& b, int k) {
  if (!(b.wl(k) > 0.0)) return std::nullopt;
  const double rmin = b.tl(k) >= 0.0 ? b.tl(k) / b.wu(k) : b.tl(k) / b.wl(k);
  const double rmax = b.tu(k) >= 0.0 ? b.tu(k) / b.wl(k) : b.tu(k) / b.wu(k);
  return Interval{std::atan(rmin), std::atan(rmax)};
}

void quadratic_pass(const LiftedModel& m, Tracker& tr, double cutoff) {
  BoundsState& b = tr.b;
  const int n = m.dim - 1;
  Vec zl(2 * n), zu(2 * n);
  for (size_t q = 0; q < m.real_quadratics.size(); ++q) {
    RealQuadratic rq = m.real_quadratics[q];
    if (q == 0) {
      if (!std::isfinite(cutoff)) continue;
      rq.c -= cutoff;
    }
    for (int k = 0; k < 2 * n; ++k) {
      if (m.real && k >= n) continue;
      zl.head(n) = b.wl.tail(n);
      zu.head(n) = b.wu.tail(n);
      zl.tail(n) = b.tl.tail(n);
      zu.tail(n) = b.tu.tail(n);
      const auto iv = tighten_quadratic(aggregate_to_1d(rq, zl, zu, k));
      if (!iv) {
        tr.infeasible = true;
        return;
      }
      double& lo = k < n ? b.wl(k + 1) : b.tl(k - n + 1);
      double& hi = k < n ? b.wu(k + 1) : b.tu(k - n + 1);
      tr.raise(lo, hi, iv->lo);
      tr.lower(lo, hi, iv->hi);
      if (tr.infeasible) return;
    }
  }
}

void rectangle_pass(const LiftedModel& m, Tracker& tr) {
  BoundsState& b = tr.b;
  EntryBounds& eb = b.eb;
  for (int k = 1; k < m.dim; ++k) {
    // Rectangle to magnitude.
    auto sq_min = [](double lo, double hi) { return lo > 0.0 ? lo * lo : (hi < 0.0 ? hi * hi : 0.0); };
    auto sq_max = [](double lo, double hi) { return std::max(lo * lo, hi * hi); };
    const double mag_lo = sq_min(b.wl(k), b.wu(k)) + sq_min(b.tl(k), b.tu(k));
    const double mag_hi = sq_max(b.wl(k), b.wu(k)) + sq_max(b.tl(k), b.tu(k));
    tr.raise(eb.L(k, k), eb.U(k, k), mag_lo);
    tr.lower(eb.L(k, k), eb.U(k, k), mag_hi);
    if (tr.infeasible) return;
    // Magnitude to rectangle.
    const double r = std::sqrt(std::max(0.0, eb.U(k, k)));
    tr.raise(b.wl(k), b.wu(k), -r);
    tr.lower(b.wl(k), b.wu(k), r);
    tr.raise(b.tl(k), b.tu(k), -r);
    tr.lower(b.tl(k), b.tu(k), r);
    const double lw = std::sqrt(std::max(0.0, eb.L(k, k) - sq_max(b.tl(k), b.tu(k))));
    const double lt = std::sqrt(std::max(0.0, eb.L(k, k) - sq_max(b.wl(k), b.wu(k))));
    if (b.wl(k) >= 0.0) tr.raise(b.wl(k), b.wu(k), lw);
    if (b.wu(k) <= 0.0) tr.lower(b.wl(k), b.wu(k), -lw);
    if (!m.real) {
      if (b.tl(k) >= 0.0) tr.raise(b.tl(k), b.tu(k), lt);
      if (b.tu(k) <= 0.0) tr.lower(b.tl(k), b.tu(k), -lt);
    }
    if (tr.infeasible) return;
  }
  if (m.real) return;
  for (int k = 1; k < m.dim; ++k) {
    if (!b.valid_pair(0, k) || !(b.wl(k) > 0.0)) continue;
    // Ratio (0, k) is -t_k / w_k.
    const auto [rl, ru] = eb.ratio(0, k);
    const double tlo = std::min(-ru * b.wl(k), -ru * b.wu(k));
    const double thi = std::max(-rl * b.wl(k), -rl * b.wu(k));
    tr.raise(b.tl(k), b.tu(k), tlo);
    tr.lower(b.tl(k), b.tu(k), thi);
    if (tr.infeasible) return;
    if (const auto th = angle_interval(b, k)) tr.meet_ratio(0, k, std::tan(-th->hi), std::tan(-th->lo));
    if (tr.infeasible) return;
  }
  for (const auto& p : m.tracked_pairs) {
    if (p.i == 0 || p.i == p.j || !b.valid_pair(p.i, p.j)) continue;
    const auto ti = angle_interval(b, p.i), tj = angle_interval(b, p.j);
    if (!ti || !tj) continue;
    // arg Y_ij = theta_i - theta_j.
    const double dlo = ti->lo - tj->hi, dhi = ti->hi - tj->lo;
    if (dlo > -std::numbers::pi / 2 && dhi < std::numbers::pi / 2) tr.meet_ratio(p.i, p.j, std::tan(dlo), std::tan(dhi));
    if (tr.infeasible) return;
  }
}

void cycle_pass(const LiftedModel& m, const std::vector<std::array<int, 3>>& triangles, Tracker& tr) {
  if (m.real) return;
  for (const auto& t : triangles) {
    BoundsState& b = tr.b;
    if (!b.valid_pair(t[0], t[1]) || !b.valid_pair(t[1], t[2]) || !b.valid_pair(t[0], t[2])) continue;
    const EntryBounds next = tighten_cycle({t[0], t[1], t[2]}, b.eb);
    for (auto [i, j] : {std::pair{t[0], t[1]}, std::pair{t[1], t[2]}, std::pair{t[0], t[2]}}) {
      tr.meet_ratio(i, j, next.L(i, j), next.U(i, j));
      if (tr.infeasible) return;
    }
  }
}

}  // namespace

TightenStats tighten_bounds(const LiftedModel& m, BoundsState& b, double cutoff, int max_passes) {
  TightenStats st;
  Tracker tr{b};
  const bool rect = m.homogenizing && b.wl.size() == m.dim;
  const auto triangles = tracked_triangles(m);
  for (int pass = 0; pass < max_passes; ++pass) {
    const int before = tr.changes;
    ++st.passes;
    if (rect) quadratic_pass(m, tr, cutoff);
    if (!tr.infeasible && rect) rectangle_pass(m, tr);
    if (!tr.infeasible) cycle_pass(m, triangles, tr);
    if (tr.infeasible || tr.changes == before) break;
  }
  st.changes = tr.changes;
  st.infeasible = tr.infeasible || b.empty();
  return st;
}

}  // namespace sbc
