#pragma once

#include <random>

#include "sbc/model.hpp"

namespace sbc::testing {

/// min 0.5 x'Qx + f'x over [0, 1]^n as a real CQCQP.
inline ComplexQcqp boxqp(const Mat& Q, const Vec& f) {
  const int n = static_cast<int>(f.size());
  ComplexQcqp p;
  p.n = n;
  p.real = true;
  p.objective.q = HermitianMatrix(0.5 * Q, Mat::Zero(n, n));
  p.objective.c = ComplexVector(f, Vec::Zero(n));
  p.lb = ComplexVector(Vec::Zero(n), Vec::Zero(n));
  p.ub = ComplexVector(Vec::Ones(n), Vec::Zero(n));
  return p;
}

/// Integer entries in [-50, 50], dense.
inline ComplexQcqp random_boxqp(int n, std::mt19937& rng) {
  std::uniform_int_distribution<int> u(-50, 50);
  Mat Q(n, n);
  Vec f(n);
  for (int i = 0; i < n; ++i) {
    f(i) = u(rng);
    for (int j = i; j < n; ++j) Q(i, j) = Q(j, i) = u(rng);
  }
  return boxqp(Q, f);
}

/// Nonconvex complex QCQP on a path graph with one coupling constraint and a ball constraint.
inline ComplexQcqp random_complex_path(int n, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  ComplexQcqp p;
  p.n = n;
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    q(i, i) = -std::abs(nd(rng));
    if (i + 1 < n) q(i, i + 1) = Complex(nd(rng), nd(rng));
  }
  p.objective.q = HermitianMatrix::from_complex(q + q.adjoint());
  p.objective.c = ComplexVector(n);
  for (int i = 0; i < n; ++i) p.objective.c.set(i, Complex(nd(rng), nd(rng)));
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) g(i, i + 1) = Complex(nd(rng), nd(rng));
  QuadraticFunction con;
  con.q = HermitianMatrix::from_complex(g + g.adjoint());
  con.c = ComplexVector(n);
  con.b = -0.5;
  p.constraints.push_back(con);
  QuadraticFunction ball;
  ball.q = HermitianMatrix(Mat::Identity(n, n), Mat::Zero(n, n));
  ball.c = ComplexVector(n);
  ball.b = -1.0 * n;
  p.constraints.push_back(ball);
  p.lb = ComplexVector(Vec::Constant(n, -1.0), Vec::Constant(n, -1.0));
  p.ub = ComplexVector(Vec::Constant(n, 1.0), Vec::Constant(n, 1.0));
  return p;
}

}  // namespace sbc::testing
