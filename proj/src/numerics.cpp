#include "sbc/numerics.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace sbc {

ComplexVector::ComplexVector(Vec real, Vec imag) : re(std::move(real)), im(std::move(imag)) {
  if (re.size() != im.size()) {
    throw PreconditionError("ComplexVector: real and imaginary parts differ in length");
  }
}

Eigen::VectorXcd ComplexVector::to_complex() const {
  Eigen::VectorXcd v(size());
  for (int i = 0; i < size(); ++i) v(i) = (*this)[i];
  return v;
}

ComplexVector ComplexVector::from_complex(const Eigen::VectorXcd& v) {
  return ComplexVector(v.real(), v.imag());
}

HermitianMatrix::HermitianMatrix(Mat w, Mat t) : w_(std::move(w)), t_(std::move(t)) {
  if (w_.rows() != w_.cols() || t_.rows() != t_.cols() || w_.rows() != t_.rows()) {
    throw PreconditionError("HermitianMatrix: W and T must be square and of equal size");
  }
  const double scale = 1.0 + std::max(w_.cwiseAbs().maxCoeff(), t_.size() ? t_.cwiseAbs().maxCoeff() : 0.0);
  if ((w_ - w_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale ||
      (t_ + t_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw PreconditionError("HermitianMatrix: W must be symmetric and T skew-symmetric");
  }
}

HermitianMatrix HermitianMatrix::from_complex(const Eigen::MatrixXcd& q) {
  const Eigen::MatrixXcd h = 0.5 * (q + q.adjoint());
  Mat w = h.real();
  Mat t = h.imag();
  t.diagonal().setZero();
  return HermitianMatrix(0.5 * (w + w.transpose()), 0.5 * (t - t.transpose()));
}

HermitianMatrix HermitianMatrix::outer(const ComplexVector& y) {
  const int n = y.size();
  HermitianMatrix h(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) h.set(i, j, y[i] * std::conj(y[j]));
  }
  return h;
}

void HermitianMatrix::set(int i, int j, Complex v) {
  if (i == j) {
    w_(i, i) = v.real();
    return;
  }
  w_(i, j) = w_(j, i) = v.real();
  t_(i, j) = v.imag();
  t_(j, i) = -v.imag();
}

Eigen::MatrixXcd HermitianMatrix::to_complex() const {
  Eigen::MatrixXcd m(size(), size());
  m.real() = w_;
  m.imag() = t_;
  return m;
}

HermitianMatrix HermitianMatrix::principal(std::span<const int> idx) const {
  const int k = static_cast<int>(idx.size());
  HermitianMatrix sub(k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      sub.w_(a, b) = w_(idx[a], idx[b]);
      sub.t_(a, b) = t_(idx[a], idx[b]);
    }
  }
  return sub;
}

double min_eigenvalue_2x2(double wii, double wjj, double wij, double tij) {
  const double d = wii - wjj;
  return 0.5 * (wii + wjj - std::sqrt(d * d + 4.0 * wij * wij + 4.0 * tij * tij));
}

Mat real_embedding(const HermitianMatrix& h) {
  const int n = h.size();
  Mat e(2 * n, 2 * n);
  e.topLeftCorner(n, n) = h.W();
  e.topRightCorner(n, n) = -h.T();
  e.bottomLeftCorner(n, n) = h.T();
  e.bottomRightCorner(n, n) = h.W();
  return e;
}

Vec hermitian_eigenvalues(const HermitianMatrix& h) {
  const int n = h.size();
  Eigen::SelfAdjointEigenSolver<Mat> es(real_embedding(h), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("hermitian_eigenvalues: eigensolver failed");
  Vec out(n);
  for (int k = 0; k < n; ++k) out(k) = 0.5 * (es.eigenvalues()(2 * k) + es.eigenvalues()(2 * k + 1));
  return out;
}

PrincipalEigen principal_eigvec(const HermitianMatrix& h) {
  const int n = h.size();
  if (n == 0) throw PreconditionError("principal_eigvec: empty matrix");
  Eigen::SelfAdjointEigenSolver<Mat> es(real_embedding(h));
  if (es.info() != Eigen::Success) throw NumericalError("principal_eigvec: eigensolver did not converge");
  const Vec top = es.eigenvectors().col(2 * n - 1);
  PrincipalEigen out;
  out.value = es.eigenvalues()(2 * n - 1);
  out.vector = ComplexVector(top.head(n), top.tail(n));
  const double len = out.vector.norm();
  out.vector.re /= len;
  out.vector.im /= len;

  const Eigen::VectorXcd v = out.vector.to_complex();
  const double residual = (h.to_complex() * v - out.value * v).norm();
  if (residual > 1e-8 * std::max(1.0, h.norm())) {
    throw NumericalError("principal_eigvec: residual " + std::to_string(residual) + " above tolerance");
  }
  return out;
}

bool is_psd(const Mat& a, double tol) {
  const double shift = tol * (1.0 + std::abs(a.trace()));
  Eigen::LLT<Mat> llt(a + shift * Mat::Identity(a.rows(), a.cols()));
  return llt.info() == Eigen::Success;
}

}  // namespace sbc
