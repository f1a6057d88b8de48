#include "sbc/model.hpp"

#include <algorithm>
#include <cmath>

namespace sbc {

double QuadraticFunction::value(const ComplexVector& x) const {
  const Eigen::VectorXcd xc = x.to_complex();
  const Complex quad = xc.dot(q.to_complex() * xc);  // dot conjugates the first argument
  return quad.real() + c.re.dot(x.re) + c.im.dot(x.im) + b;
}

ComplexVector QuadraticFunction::gradient(const ComplexVector& x) const {
  const Eigen::VectorXcd qx = q.to_complex() * x.to_complex();
  return ComplexVector(2.0 * qx.real() + c.re, 2.0 * qx.imag() + c.im);
}

void ComplexQcqp::validate() const {
  auto check_fn = [&](const QuadraticFunction& f, const std::string& what) {
    if (f.q.size() != n || f.c.size() != n) throw PreconditionError(what + ": dimension mismatch");
  };
  check_fn(objective, "objective");
  for (size_t k = 0; k < constraints.size(); ++k) check_fn(constraints[k], "constraint " + std::to_string(k + 1));
  if (lb.size() != n || ub.size() != n) throw PreconditionError("bounds: dimension mismatch");
  for (int i = 0; i < n; ++i) {
    for (double v : {lb.re(i), lb.im(i), ub.re(i), ub.im(i)}) {
      if (!std::isfinite(v)) throw PreconditionError("bounds must be finite");
    }
    if (lb.re(i) > ub.re(i) || lb.im(i) > ub.im(i)) throw PreconditionError("lower bound exceeds upper bound");
    if (real && (lb.im(i) != 0.0 || ub.im(i) != 0.0)) {
      throw PreconditionError("real problem with nonzero imaginary bounds");
    }
  }
}

EntryBounds::EntryBounds(int dim) : L(Mat::Zero(dim, dim)), U(Mat::Zero(dim, dim)) {}

void EntryBounds::set(LiftedIndex e, double lo, double hi) {
  L(e.i, e.j) = L(e.j, e.i) = lo;
  U(e.i, e.j) = U(e.j, e.i) = hi;
}

std::pair<double, double> EntryBounds::ratio(int a, int b) const {
  if (a < b) return {L(a, b), U(a, b)};
  return {-U(b, a), -L(b, a)};
}

void EntryBounds::set_ratio(int a, int b, double lo, double hi) {
  if (a < b) {
    set(LiftedIndex(a, b), lo, hi);
  } else {
    set(LiftedIndex(a, b), -hi, -lo);
  }
}

bool EntryBounds::consistent(double tol) const {
  for (int i = 0; i < dim(); ++i) {
    if (L(i, i) < -tol) return false;
    for (int j = i; j < dim(); ++j) {
      if (L(i, j) > U(i, j) + tol * (1.0 + std::abs(U(i, j)))) return false;
    }
  }
  return true;
}

ComplexVector ShiftedQcqp::to_original(const ComplexVector& q) const {
  return ComplexVector(q.re + shift.re, q.im + shift.im);
}

ComplexVector ShiftedQcqp::to_shifted(const ComplexVector& x) const {
  return ComplexVector(x.re - shift.re, x.im - shift.im);
}

namespace {

QuadraticFunction shift_function(const QuadraticFunction& f, const ComplexVector& s) {
  QuadraticFunction out;
  out.q = f.q;
  const Eigen::VectorXcd sc = s.to_complex();
  const Eigen::VectorXcd qs = f.q.to_complex() * sc;
  out.c = ComplexVector(f.c.re + 2.0 * qs.real(), f.c.im + 2.0 * qs.imag());
  out.b = f.b + sc.dot(qs).real() + f.c.re.dot(s.re) + f.c.im.dot(s.im);
  return out;
}

}  // namespace

ShiftedQcqp affine_shift_positive(const ComplexQcqp& p) {
  p.validate();
  ShiftedQcqp out;
  out.shift = ComplexVector(p.n);
  for (int i = 0; i < p.n; ++i) {
    out.shift.re(i) = p.lb.re(i) - 1.0;
    out.shift.im(i) = p.real ? 0.0 : p.lb.im(i) - 1.0;
  }
  ComplexQcqp& q = out.problem;
  q.n = p.n;
  q.real = p.real;
  q.objective = shift_function(p.objective, out.shift);
  for (const auto& f : p.constraints) q.constraints.push_back(shift_function(f, out.shift));
  q.lb = out.to_shifted(p.lb);
  q.ub = out.to_shifted(p.ub);
  return out;
}

EntryBounds initial_entry_bounds(const ComplexQcqp& p) {
  const int d = p.n + 1;
  EntryBounds eb(d);
  // Component bounds of y = (1, x).
  Vec wl(d), tl(d);
  wl(0) = 1.0;
  tl(0) = 0.0;
  wl.tail(p.n) = p.lb.re;
  tl.tail(p.n) = p.lb.im;

  eb.set(LiftedIndex(0, 0), 1.0, 1.0);
  for (int i = 1; i < d; ++i) {
    const int k = i - 1;
    if (p.lb.re(k) < 0.0 || p.lb.im(k) < 0.0) {
      throw PreconditionError("initial_entry_bounds: problem is not shifted to nonnegative components");
    }
    const double lo = p.lb.re(k) * p.lb.re(k) + p.lb.im(k) * p.lb.im(k);
    const double hi = p.ub.re(k) * p.ub.re(k) + p.ub.im(k) * p.ub.im(k);
    eb.set(LiftedIndex(i, i), lo, hi);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const double wminus = wl(i) * wl(j) + tl(i) * tl(j);
      if (!(wminus > 0.0)) {
        throw PreconditionError("initial_entry_bounds: W- <= 0 for pair (" + std::to_string(i) + "," +
                                std::to_string(j) + "); apply affine_shift_positive first");
      }
      if (p.real) {
        eb.set(LiftedIndex(i, j), 0.0, 0.0);
        continue;
      }
      const double r = eb.U(i, i) * eb.U(j, j) / (wminus * wminus) - 1.0;
      const double u = std::sqrt(std::max(0.0, r));
      eb.set(LiftedIndex(i, j), -u, u);
    }
  }
  return eb;
}

Evaluation evaluate(const ComplexQcqp& p, const ComplexVector& x) {
  if (x.size() != p.n) throw PreconditionError("evaluate: dimension mismatch");
  Evaluation ev;
  ev.objective = p.objective.value(x);
  double viol = 0.0;
  for (const auto& f : p.constraints) viol = std::max(viol, f.value(x));
  for (int i = 0; i < p.n; ++i) {
    viol = std::max({viol, p.lb.re(i) - x.re(i), x.re(i) - p.ub.re(i), p.lb.im(i) - x.im(i), x.im(i) - p.ub.im(i)});
  }
  ev.max_violation = viol;
  return ev;
}

}  // namespace sbc
