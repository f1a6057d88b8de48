#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "sbc/numerics.hpp"

using namespace sbc;

namespace {

HermitianMatrix random_hermitian(int n, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = Complex(nd(rng), nd(rng));
  }
  return HermitianMatrix::from_complex(m);
}

double complex_min_eig(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.to_complex(), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

TEST_CASE("min_eigenvalue_2x2 closed form") {
  CHECK(min_eigenvalue_2x2(1, 1, 1, 0) == doctest::Approx(0.0));
  CHECK(min_eigenvalue_2x2(1, 1, 0, 0) == doctest::Approx(1.0));
  // [[1, 1-i], [1+i, 4]]: characteristic polynomial l^2 - 5l + 2.
  CHECK(min_eigenvalue_2x2(1, 4, 1, 1) == doctest::Approx(0.5 * (5.0 - std::sqrt(17.0))).epsilon(1e-14));
}

TEST_CASE("min_eigenvalue_2x2 agrees with a dense eigensolver") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double a = u(rng), d = u(rng), w = u(rng), t = u(rng);
    HermitianMatrix h(2);
    h.set(0, 0, a);
    h.set(1, 1, d);
    h.set(0, 1, Complex(w, t));
    worst = std::max(worst, std::abs(min_eigenvalue_2x2(a, d, w, t) - complex_min_eig(h)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("real embedding") {
  HermitianMatrix id(Mat::Identity(2, 2), Mat::Zero(2, 2));
  CHECK(real_embedding(id).isApprox(Mat::Identity(4, 4)));

  Mat t(2, 2);
  t << 0, 1, -1, 0;
  HermitianMatrix h(Mat::Identity(2, 2), t);
  Eigen::SelfAdjointEigenSolver<Mat> es(real_embedding(h));
  const Vec ev = es.eigenvalues();
  CHECK(ev(0) == doctest::Approx(0.0));
  CHECK(ev(1) == doctest::Approx(0.0));
  CHECK(ev(2) == doctest::Approx(2.0));
  CHECK(ev(3) == doctest::Approx(2.0));

  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const HermitianMatrix r = random_hermitian(4, rng);
    Eigen::SelfAdjointEigenSolver<Mat> er(real_embedding(r), Eigen::EigenvaluesOnly);
    CHECK(std::abs(er.eigenvalues()(0) - complex_min_eig(r)) <= 1e-10);
    const Vec he = hermitian_eigenvalues(r);
    CHECK(std::abs(he(0) - complex_min_eig(r)) <= 1e-10);
  }
}

TEST_CASE("real embedding preserves PSD status") {
  std::mt19937 rng(3);
  int psd_count = 0;
  for (int trial = 0; trial < 500; ++trial) {
    HermitianMatrix r = random_hermitian(3, rng);
    // Shift so roughly half of the samples are PSD.
    const double lmin = complex_min_eig(r);
    const double shift = -lmin + ((trial % 2 == 0) ? 0.05 : -0.05);
    Mat w = r.W() + shift * Mat::Identity(3, 3);
    HermitianMatrix s(w, r.T());
    Eigen::LLT<Eigen::MatrixXcd> cplx(s.to_complex());
    const bool complex_psd = cplx.info() == Eigen::Success;
    CHECK(complex_psd == is_psd(real_embedding(s)));
    psd_count += complex_psd ? 1 : 0;
  }
  CHECK(psd_count == 250);
}

TEST_CASE("principal eigenvector") {
  HermitianMatrix d(2);
  d.set(0, 0, 3.0);
  d.set(1, 1, 1.0);
  const PrincipalEigen pe = principal_eigvec(d);
  CHECK(pe.value == doctest::Approx(3.0));
  CHECK(std::abs(pe.vector[0]) == doctest::Approx(1.0));
  CHECK(std::abs(pe.vector[1]) == doctest::Approx(0.0));

  ComplexVector x(Vec::Zero(3), Vec::Zero(3));
  x.set(0, Complex(1.0, 2.0));
  x.set(1, Complex(-0.5, 0.25));
  x.set(2, Complex(0.0, -1.0));
  const PrincipalEigen r1 = principal_eigvec(HermitianMatrix::outer(x));
  CHECK(r1.value == doctest::Approx(x.norm() * x.norm()));
  // Equal up to phase: |<v, x/|x|>| = 1.
  const Complex overlap = r1.vector.to_complex().dot(x.to_complex()) / x.norm();
  CHECK(std::abs(overlap) == doctest::Approx(1.0));

  std::mt19937 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const HermitianMatrix h = random_hermitian(4, rng);
    const PrincipalEigen p = principal_eigvec(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.to_complex());
    CHECK(std::abs(p.value - es.eigenvalues()(3)) <= 1e-8);
    CHECK(std::abs(std::abs(es.eigenvectors().col(3).dot(p.vector.to_complex())) - 1.0) <= 1e-8);
  }
}

TEST_CASE("HermitianMatrix rejects non-Hermitian input") {
  Mat w(2, 2);
  w << 1, 2, 3, 4;
  CHECK_THROWS_AS(HermitianMatrix(w, Mat::Zero(2, 2)), PreconditionError);
}
