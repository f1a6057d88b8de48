#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "sbc/conic.hpp"

namespace sbc {
namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kUnbounded = std::numeric_limits<double>::infinity();

int svec_size(int k) { return k * (k + 1) / 2; }

Mat smat(const Eigen::Ref<const Vec>& v, int k) {
  Mat m(k, k);
  int idx = 0;
  for (int j = 0; j < k; ++j) {
    for (int i = j; i < k; ++i) {
      const double val = v(idx++);
      if (i == j) {
        m(i, i) = val;
      } else {
        m(i, j) = m(j, i) = val / kSqrt2;
      }
    }
  }
  return m;
}

void svec(const Mat& m, Eigen::Ref<Vec> out) {
  const int k = static_cast<int>(m.rows());
  int idx = 0;
  for (int j = 0; j < k; ++j) {
    for (int i = j; i < k; ++i) out(idx++) = (i == j) ? m(i, i) : kSqrt2 * 0.5 * (m(i, j) + m(j, i));
  }
}

struct ConeDims {
  int nl = 0;
  std::vector<int> q;
  std::vector<int> s;
  std::vector<int> qstart;
  std::vector<int> sstart;
  int dim = 0;
  double degree = 0.0;

  void finalize() {
    int off = nl;
    for (int m : q) {
      qstart.push_back(off);
      off += m;
    }
    for (int k : s) {
      sstart.push_back(off);
      off += svec_size(k);
    }
    dim = off;
    degree = nl + static_cast<double>(q.size());
    for (int k : s) degree += k;
  }
};

Vec identity(const ConeDims& d) {
  Vec e = Vec::Zero(d.dim);
  e.head(d.nl).setOnes();
  for (size_t b = 0; b < d.q.size(); ++b) e(d.qstart[b]) = 1.0;
  for (size_t b = 0; b < d.s.size(); ++b) svec(Mat::Identity(d.s[b], d.s[b]), e.segment(d.sstart[b], svec_size(d.s[b])));
  return e;
}

/// max over blocks of -lambda_min(u); negative means u is interior.
double max_step_unscaled(const ConeDims& d, const Vec& u) {
  double t = -kUnbounded;
  if (d.nl > 0) t = std::max(t, -u.head(d.nl).minCoeff());
  for (size_t b = 0; b < d.q.size(); ++b) {
    const auto seg = u.segment(d.qstart[b], d.q[b]);
    t = std::max(t, seg.tail(d.q[b] - 1).norm() - seg(0));
  }
  for (size_t b = 0; b < d.s.size(); ++b) {
    Eigen::SelfAdjointEigenSolver<Mat> es(smat(u.segment(d.sstart[b], svec_size(d.s[b])), d.s[b]),
                                          Eigen::EigenvaluesOnly);
    t = std::max(t, -es.eigenvalues()(0));
  }
  return t;
}

Vec jordan(const ConeDims& d, const Vec& u, const Vec& v) {
  Vec w(d.dim);
  w.head(d.nl) = u.head(d.nl).cwiseProduct(v.head(d.nl));
  for (size_t b = 0; b < d.q.size(); ++b) {
    const int o = d.qstart[b], m = d.q[b];
    w(o) = u.segment(o, m).dot(v.segment(o, m));
    w.segment(o + 1, m - 1) = u(o) * v.segment(o + 1, m - 1) + v(o) * u.segment(o + 1, m - 1);
  }
  for (size_t b = 0; b < d.s.size(); ++b) {
    const int o = d.sstart[b], k = d.s[b], n = svec_size(k);
    const Mat U = smat(u.segment(o, n), k), V = smat(v.segment(o, n), k);
    svec(0.5 * (U * V + V * U), w.segment(o, n));
  }
  return w;
}

struct Scaling {
  Vec d;
  std::vector<double> beta;
  std::vector<Vec> v;
  std::vector<Mat> r;
  std::vector<Mat> rinv;
  Vec lambda;
  std::vector<Vec> lpsd;
};

enum class Op { W, Wt, Winv, Wtinv };

Vec apply(const ConeDims& d, const Scaling& sc, const Vec& x, Op op) {
  Vec y(d.dim);
  const bool inverse = (op == Op::Winv || op == Op::Wtinv);
  if (inverse) {
    y.head(d.nl) = x.head(d.nl).cwiseQuotient(sc.d);
  } else {
    y.head(d.nl) = x.head(d.nl).cwiseProduct(sc.d);
  }
  for (size_t b = 0; b < d.q.size(); ++b) {
    const int o = d.qstart[b], m = d.q[b];
    const Vec& v = sc.v[b];
    Vec jx = x.segment(o, m);
    jx.tail(m - 1) *= -1.0;
    if (!inverse) {
      y.segment(o, m) = sc.beta[b] * (2.0 * v.dot(x.segment(o, m)) * v - jx);
    } else {
      Vec jv = v;
      jv.tail(m - 1) *= -1.0;
      y.segment(o, m) = (2.0 * jv.dot(x.segment(o, m)) * jv - jx) / sc.beta[b];
    }
  }
  for (size_t b = 0; b < d.s.size(); ++b) {
    const int o = d.sstart[b], k = d.s[b], n = svec_size(k);
    const Mat X = smat(x.segment(o, n), k);
    const Mat& R = sc.r[b];
    const Mat& Ri = sc.rinv[b];
    Mat Y;
    switch (op) {
      case Op::W:
        Y = R.transpose() * X * R;
        break;
      case Op::Wt:
        Y = R * X * R.transpose();
        break;
      case Op::Winv:
        Y = Ri.transpose() * X * Ri;
        break;
      case Op::Wtinv:
        Y = Ri * X * Ri.transpose();
        break;
    }
    svec(Y, y.segment(o, n));
  }
  return y;
}

bool compute_scaling(const ConeDims& d, const Vec& s, const Vec& z, Scaling& sc) {
  sc.lambda.resize(d.dim);
  sc.beta.clear();
  sc.v.clear();
  sc.r.clear();
  sc.rinv.clear();
  sc.lpsd.clear();
  const Vec sl = s.head(d.nl), zl = z.head(d.nl);
  if (d.nl > 0 && (sl.minCoeff() <= 0.0 || zl.minCoeff() <= 0.0)) return false;
  sc.d = (sl.cwiseQuotient(zl)).cwiseSqrt();
  sc.lambda.head(d.nl) = (sl.cwiseProduct(zl)).cwiseSqrt();

  for (size_t b = 0; b < d.q.size(); ++b) {
    const int o = d.qstart[b], m = d.q[b];
    const Vec sb = s.segment(o, m), zb = z.segment(o, m);
    const double sjs = sb(0) * sb(0) - sb.tail(m - 1).squaredNorm();
    const double zjz = zb(0) * zb(0) - zb.tail(m - 1).squaredNorm();
    if (!(sjs > 0.0 && zjz > 0.0 && sb(0) > 0.0 && zb(0) > 0.0)) return false;
    const Vec sbar = sb / std::sqrt(sjs), zbar = zb / std::sqrt(zjz);
    const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
    Vec wbar(m);
    wbar(0) = (sbar(0) + zbar(0)) / (2.0 * gamma);
    wbar.tail(m - 1) = (sbar.tail(m - 1) - zbar.tail(m - 1)) / (2.0 * gamma);
    Vec v = wbar;
    v(0) += 1.0;
    v /= std::sqrt(2.0 * (wbar(0) + 1.0));
    sc.beta.push_back(std::pow(sjs / zjz, 0.25));
    sc.v.push_back(v);
  }
  for (size_t b = 0; b < d.s.size(); ++b) {
    const int o = d.sstart[b], k = d.s[b], n = svec_size(k);
    Eigen::LLT<Mat> ls(smat(s.segment(o, n), k));
    Eigen::LLT<Mat> lz(smat(z.segment(o, n), k));
    if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
    const Mat Ls = ls.matrixL();
    const Mat Lz = lz.matrixL();
    Eigen::JacobiSVD<Mat> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec l = svd.singularValues();
    if (!(l.minCoeff() > 0.0)) return false;
    const Mat R = Ls * svd.matrixV() * l.cwiseSqrt().cwiseInverse().asDiagonal();
    const Mat Ri = l.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() *
                   Ls.triangularView<Eigen::Lower>().solve(Mat::Identity(k, k));
    sc.r.push_back(R);
    sc.rinv.push_back(Ri);
    sc.lpsd.push_back(l);
  }
  // SOC lambda from W z; LP and PSD parts set directly.
  const Vec wz = apply(d, sc, z, Op::W);
  for (size_t b = 0; b < d.q.size(); ++b) sc.lambda.segment(d.qstart[b], d.q[b]) = wz.segment(d.qstart[b], d.q[b]);
  for (size_t b = 0; b < d.s.size(); ++b) {
    svec(Mat(sc.lpsd[b].asDiagonal()), sc.lambda.segment(d.sstart[b], svec_size(d.s[b])));
  }
  return true;
}

/// Solves lambda o u = w.
Vec jordan_div(const ConeDims& d, const Scaling& sc, const Vec& w) {
  Vec u(d.dim);
  u.head(d.nl) = w.head(d.nl).cwiseQuotient(sc.lambda.head(d.nl));
  for (size_t b = 0; b < d.q.size(); ++b) {
    const int o = d.qstart[b], m = d.q[b];
    const auto l = sc.lambda.segment(o, m);
    const auto wb = w.segment(o, m);
    const double rho = l(0) * l(0) - l.tail(m - 1).squaredNorm();
    const double u0 = (l(0) * wb(0) - l.tail(m - 1).dot(wb.tail(m - 1))) / rho;
    u(o) = u0;
    u.segment(o + 1, m - 1) = (wb.tail(m - 1) - u0 * l.tail(m - 1)) / l(0);
  }
  for (size_t b = 0; b < d.s.size(); ++b) {
    const int o = d.sstart[b], k = d.s[b], n = svec_size(k);
    const Vec& l = sc.lpsd[b];
    Mat W = smat(w.segment(o, n), k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) W(i, j) *= 2.0 / (l(i) + l(j));
    }
    svec(W, u.segment(o, n));
  }
  return u;
}

/// Largest alpha with lambda + alpha * delta in the cone (lambda in scaled form).
double max_step_scaled(const ConeDims& d, const Scaling& sc, const Vec& delta) {
  double alpha = kUnbounded;
  for (int i = 0; i < d.nl; ++i) {
    if (delta(i) < 0.0) alpha = std::min(alpha, -sc.lambda(i) / delta(i));
  }
  for (size_t b = 0; b < d.q.size(); ++b) {
    const int o = d.qstart[b], m = d.q[b];
    const auto l = sc.lambda.segment(o, m);
    const auto dl = delta.segment(o, m);
    const double a = dl(0) * dl(0) - dl.tail(m - 1).squaredNorm();
    const double bb = l(0) * dl(0) - l.tail(m - 1).dot(dl.tail(m - 1));
    const double c = l(0) * l(0) - l.tail(m - 1).squaredNorm();
    const double disc = bb * bb - a * c;
    if (disc < 0.0) continue;
    const double den = -bb + std::sqrt(disc);
    if (den > 0.0) alpha = std::min(alpha, c / den);
  }
  for (size_t b = 0; b < d.s.size(); ++b) {
    const int o = d.sstart[b], k = d.s[b], n = svec_size(k);
    const Vec& l = sc.lpsd[b];
    Mat D = smat(delta.segment(o, n), k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) D(i, j) /= std::sqrt(l(i) * l(j));
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(D, Eigen::EigenvaluesOnly);
    const double emin = es.eigenvalues()(0);
    if (emin < 0.0) alpha = std::min(alpha, -1.0 / emin);
  }
  return alpha;
}

class KktSolver {
 public:
  KktSolver(const Mat& A, const Mat& G) : A_(A), G_(G) {}

  /// Factors for scaling sc; identity scaling when sc is null.
  void factor(const ConeDims& d, const Scaling* sc) {
    sc_ = sc;
    d_ = &d;
    const int nv = static_cast<int>(G_.cols());
    const int ne = static_cast<int>(A_.rows());
    if (sc == nullptr) {
      Gs_ = G_;
    } else {
      Gs_.resize(G_.rows(), nv);
      for (int j = 0; j < nv; ++j) Gs_.col(j) = apply(d, *sc, G_.col(j), Op::Wtinv);
    }
    const Mat H = Gs_.transpose() * Gs_;
    const double scale = std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
    const double reg = 1e-11 * scale;
    K_ = Mat::Zero(nv + ne, nv + ne);
    K_.topLeftCorner(nv, nv) = H;
    K_.topRightCorner(nv, ne) = A_.transpose();
    K_.bottomLeftCorner(ne, nv) = A_;
    Mat Kreg = K_;
    Kreg.topLeftCorner(nv, nv).diagonal().array() += reg;
    Kreg.bottomRightCorner(ne, ne).diagonal().array() -= reg;
    lu_.compute(Kreg);
  }

  /// Solves [0 A' G'; A 0 0; G 0 -W'W] [x; y; z] = [bx; by; bz].
  void solve(const Vec& bx, const Vec& by, const Vec& bz, Vec& x, Vec& y, Vec& z) const {
    const int nv = static_cast<int>(G_.cols());
    const int ne = static_cast<int>(A_.rows());
    const Vec wbz = sc_ ? apply(*d_, *sc_, bz, Op::Wtinv) : bz;
    Vec rhs(nv + ne);
    rhs.head(nv) = bx + Gs_.transpose() * wbz;
    rhs.tail(ne) = by;
    Vec sol = lu_.solve(rhs);
    for (int it = 0; it < 2; ++it) {
      const Vec res = rhs - K_ * sol;
      sol += lu_.solve(res);
    }
    x = sol.head(nv);
    y = sol.tail(ne);
    const Vec t = Gs_ * x - wbz;
    z = sc_ ? apply(*d_, *sc_, t, Op::Winv) : t;
  }

 private:
  const Mat& A_;
  const Mat& G_;
  Mat Gs_;
  Mat K_;
  Eigen::PartialPivLU<Mat> lu_;
  const Scaling* sc_ = nullptr;
  const ConeDims* d_ = nullptr;
};

struct Iterate {
  Vec x, y, z, s;
  double tau = 1.0, kappa = 1.0;
};

}  // namespace

ConicSolution solve_conic(const ConicProgram& cp, BackendId /*backend*/, const IpmOptions& opt) {
  ConicSolution out;
  const int nv = cp.num_vars;
  if (cp.objective.size() != nv) throw PreconditionError("solve_conic: objective size mismatch");

  // Equality rows, scaled by their largest coefficient.
  std::vector<std::pair<Vec, double>> eq_rows;
  for (const auto& r : cp.eq) {
    Vec a = Vec::Zero(nv);
    for (const auto& t : r.terms) a(t.var) += t.coef;
    const double amax = a.cwiseAbs().maxCoeff();
    if (amax == 0.0) {
      if (std::abs(r.constant) > opt.feastol) {
        out.status = SolveStatus::infeasible;
        out.message = "constant equality row violated";
        return out;
      }
      continue;
    }
    eq_rows.emplace_back(a / amax, -r.constant / amax);
  }
  const int ne = static_cast<int>(eq_rows.size());
  Mat A(ne, nv);
  Vec b(ne);
  for (int i = 0; i < ne; ++i) {
    A.row(i) = eq_rows[i].first.transpose();
    b(i) = eq_rows[i].second;
  }

  ConeDims dims;
  std::vector<const AffineRow*> lp_rows;
  for (const auto& r : cp.nonneg) {
    if (r.terms.empty()) {
      if (r.constant < -opt.feastol) {
        out.status = SolveStatus::infeasible;
        out.message = "constant inequality row violated";
        return out;
      }
      continue;
    }
    lp_rows.push_back(&r);
  }
  dims.nl = static_cast<int>(lp_rows.size());
  for (const auto& c : cp.soc) dims.q.push_back(static_cast<int>(c.size()));
  for (const auto& p : cp.psd) dims.s.push_back(p.order);
  dims.finalize();

  Mat G = Mat::Zero(dims.dim, nv);
  Vec h = Vec::Zero(dims.dim);
  auto fill_row = [&](int p, const AffineRow& r, double mult) {
    for (const auto& t : r.terms) G(p, t.var) -= mult * t.coef;
    h(p) = mult * r.constant;
  };
  auto normalize_block = [&](int o, int n) {
    const double gmax = G.middleRows(o, n).cwiseAbs().maxCoeff();
    if (gmax > 0.0) {
      G.middleRows(o, n) /= gmax;
      h.segment(o, n) /= gmax;
    }
  };
  for (int i = 0; i < dims.nl; ++i) {
    fill_row(i, *lp_rows[i], 1.0);
    normalize_block(i, 1);
  }
  for (size_t bidx = 0; bidx < cp.soc.size(); ++bidx) {
    const int o = dims.qstart[bidx];
    for (size_t k = 0; k < cp.soc[bidx].size(); ++k) fill_row(o + static_cast<int>(k), cp.soc[bidx][k], 1.0);
    normalize_block(o, dims.q[bidx]);
  }
  for (size_t bidx = 0; bidx < cp.psd.size(); ++bidx) {
    const int o = dims.sstart[bidx], k = dims.s[bidx];
    if (static_cast<int>(cp.psd[bidx].entries.size()) != svec_size(k)) {
      throw PreconditionError("solve_conic: PSD block entry count mismatch");
    }
    int idx = 0;
    for (int j = 0; j < k; ++j) {
      for (int i = j; i < k; ++i, ++idx) fill_row(o + idx, cp.psd[bidx].entries[idx], i == j ? 1.0 : kSqrt2);
    }
    normalize_block(o, svec_size(k));
  }

  const double cmax = nv > 0 ? cp.objective.cwiseAbs().maxCoeff() : 0.0;
  const double cscale = cmax > 0.0 ? 1.0 / cmax : 1.0;
  const Vec c = cp.objective * cscale;

  const double resx0 = std::max(1.0, c.norm());
  const double resy0 = std::max(1.0, b.norm());
  const double resz0 = std::max(1.0, h.norm());
  const Vec e = identity(dims);

  KktSolver kkt(A, G);
  Iterate it;
  it.y = Vec::Zero(ne);
  try {
    kkt.factor(dims, nullptr);
    Vec tx, ty, tz;
    kkt.solve(Vec::Zero(nv), b, h, tx, ty, tz);
    it.x = tx;
    it.s = -tz;
    kkt.solve(-c, Vec::Zero(ne), Vec::Zero(dims.dim), tx, ty, tz);
    it.y = ty;
    it.z = tz;
  } catch (const std::exception& ex) {
    out.message = std::string("initialization failed: ") + ex.what();
    return out;
  }
  if (!it.x.allFinite() || !it.s.allFinite() || !it.z.allFinite()) {
    out.message = "initialization produced non-finite values";
    return out;
  }
  {
    const double ts = max_step_unscaled(dims, it.s);
    if (ts >= -1e-8 * std::max(it.s.norm(), 1.0)) it.s += (1.0 + ts) * e;
    const double tz = max_step_unscaled(dims, it.z);
    if (tz >= -1e-8 * std::max(it.z.norm(), 1.0)) it.z += (1.0 + tz) * e;
  }

  Scaling sc;
  if (!compute_scaling(dims, it.s, it.z, sc)) {
    out.message = "initial point not interior";
    return out;
  }

  bool have_fallback = false;
  double fallback_score = kUnbounded;
  Iterate fallback;
  int stalled = 0;
  bool have_certificate = false;
  double certificate_score = kUnbounded;
  Iterate certificate;

  auto finish = [&](const Iterate& f, SolveStatus status, bool inaccurate, const std::string& msg) {
    out.status = status;
    out.inaccurate = inaccurate;
    out.message = msg;
    out.x = f.x / f.tau;
    out.primal_objective = c.dot(f.x) / f.tau / cscale + cp.objective_constant;
    out.dual_objective = -(b.dot(f.y) + h.dot(f.z)) / f.tau / cscale + cp.objective_constant;
  };

  for (int iter = 0; iter <= opt.max_iterations; ++iter) {
    out.iterations = iter;
    const Vec hrx = A.transpose() * it.y + G.transpose() * it.z;
    const Vec rx = hrx + c * it.tau;
    const Vec hry = A * it.x;
    const Vec ry = -hry + b * it.tau;
    const Vec hrz = G * it.x + it.s;
    const Vec rz = -hrz + h * it.tau;
    const double cx = c.dot(it.x), by = b.dot(it.y), hz = h.dot(it.z);
    const double rt = -cx - by - hz - it.kappa;
    const double gap = it.s.dot(it.z);
    const double mu = (gap + it.tau * it.kappa) / (dims.degree + 1.0);
    const double pcost = cx / it.tau, dcost = -(by + hz) / it.tau;
    const double pres = std::max(ry.norm() / resy0, rz.norm() / resz0) / it.tau;
    const double dres = rx.norm() / resx0 / it.tau;
    const double gapn = gap / (it.tau * it.tau);
    const double relgap = std::max(gapn, std::abs(pcost - dcost)) / std::max(1.0, std::abs(pcost));

    if (pres <= opt.feastol && dres <= opt.feastol && relgap <= opt.reltol) {
      finish(it, SolveStatus::optimal, false, "converged");
      return out;
    }
    if (hz + by < 0.0) {
      const double pinfres = hrx.norm() / resx0 / (-hz - by);
      if (pinfres <= opt.feastol) {
        finish(it, SolveStatus::infeasible, false, "primal infeasibility certificate");
        return out;
      }
      if (pinfres <= opt.infeasible_fallback_tol && pinfres < certificate_score) {
        certificate_score = pinfres;
        certificate = it;
        have_certificate = true;
      }
    }
    if (cx < 0.0) {
      const double dinfres = std::max(hry.norm() / resy0, hrz.norm() / resz0) / (-cx);
      if (dinfres <= opt.feastol) {
        finish(it, SolveStatus::numerical_failure, false, "dual infeasibility certificate (unbounded)");
        return out;
      }
    }
    const double score = std::max({pres, dres, relgap});
    if (score <= opt.fallback_tol && score < fallback_score) {
      fallback_score = score;
      fallback = it;
      have_fallback = true;
    }
    if (iter == opt.max_iterations) break;

    try {
      kkt.factor(dims, &sc);
    } catch (const std::exception&) {
      break;
    }
    Vec x2, y2, z2;
    kkt.solve(-c, b, h, x2, y2, z2);
    const double pu2 = c.dot(x2) + b.dot(y2) + h.dot(z2);

    struct Step {
      Vec dx, dy, dz, dst, dzt;
      double dtau = 0.0, dkappa = 0.0;
    };
    auto newton = [&](double gamma, const Vec& ds, double dk) {
      Step st;
      const Vec lds = jordan_div(dims, sc, ds);
      const Vec bz = (1.0 - gamma) * rz - apply(dims, sc, lds, Op::Wt);
      Vec x1, y1, z1;
      kkt.solve(-(1.0 - gamma) * rx, (1.0 - gamma) * ry, bz, x1, y1, z1);
      const double pu1 = c.dot(x1) + b.dot(y1) + h.dot(z1);
      st.dtau = (-(1.0 - gamma) * rt + pu1 + dk / it.tau) / (it.kappa / it.tau - pu2);
      st.dx = x1 + st.dtau * x2;
      st.dy = y1 + st.dtau * y2;
      st.dz = z1 + st.dtau * z2;
      st.dkappa = (dk - it.kappa * st.dtau) / it.tau;
      st.dzt = apply(dims, sc, st.dz, Op::W);
      st.dst = lds - st.dzt;
      return st;
    };
    auto step_length = [&](const Step& st) {
      double a = std::min(max_step_scaled(dims, sc, st.dst), max_step_scaled(dims, sc, st.dzt));
      if (st.dtau < 0.0) a = std::min(a, -it.tau / st.dtau);
      if (st.dkappa < 0.0) a = std::min(a, -it.kappa / st.dkappa);
      return a;
    };

    const Vec ll = jordan(dims, sc.lambda, sc.lambda);
    const Step aff = newton(0.0, -ll, -it.tau * it.kappa);
    const double alpha_aff = std::min(1.0, step_length(aff));
    const double sigma = std::pow(1.0 - alpha_aff, 3);
    const Vec ds = -ll - jordan(dims, aff.dst, aff.dzt) + sigma * mu * e;
    const double dk = -it.tau * it.kappa - aff.dtau * aff.dkappa + sigma * mu;
    const Step st = newton(sigma, ds, dk);
    const double alpha = std::min(1.0, 0.99 * step_length(st));
    if (!std::isfinite(alpha) || !st.dx.allFinite()) break;

    it.x += alpha * st.dx;
    it.y += alpha * st.dy;
    it.s = apply(dims, sc, sc.lambda + alpha * st.dst, Op::Wt);
    it.z = apply(dims, sc, sc.lambda + alpha * st.dzt, Op::Winv);
    it.tau += alpha * st.dtau;
    it.kappa += alpha * st.dkappa;
    if (!(it.tau > 0.0) || !compute_scaling(dims, it.s, it.z, sc)) break;
    stalled = alpha < 1e-9 ? stalled + 1 : 0;
    if (stalled >= 3 || it.tau < 1e-20) break;
  }

  if (have_fallback) {
    finish(fallback, SolveStatus::optimal, true, "accepted at relaxed tolerance");
  } else if (have_certificate) {
    finish(certificate, SolveStatus::infeasible, true, "primal infeasibility certificate at relaxed tolerance");
  } else {
    finish(it, SolveStatus::numerical_failure, false, "no convergence");
  }
  return out;
}

}  // namespace sbc
