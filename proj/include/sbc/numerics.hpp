#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sbc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Complex = std::complex<double>;

/// Eigenvalues (and 2x2 minors) below this fraction of the trace count as zero.
inline constexpr double kRankTolerance = 1e-7;

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Complex vector held as separate real and imaginary parts.
struct ComplexVector {
  Vec re;
  Vec im;

  ComplexVector() = default;
  explicit ComplexVector(int n) : re(Vec::Zero(n)), im(Vec::Zero(n)) {}
  ComplexVector(Vec real, Vec imag);

  [[nodiscard]] int size() const { return static_cast<int>(re.size()); }
  [[nodiscard]] Complex operator[](int i) const { return {re(i), im(i)}; }
  void set(int i, Complex v) {
    re(i) = v.real();
    im(i) = v.imag();
  }
  [[nodiscard]] double norm() const { return std::sqrt(re.squaredNorm() + im.squaredNorm()); }
  [[nodiscard]] Eigen::VectorXcd to_complex() const;
  static ComplexVector from_complex(const Eigen::VectorXcd& v);
};

/// Hermitian matrix W + iT with W symmetric and T skew-symmetric.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(int n) : w_(Mat::Zero(n, n)), t_(Mat::Zero(n, n)) {}
  /// Throws PreconditionError unless W is symmetric and T skew-symmetric (to 1e-12 relative).
  HermitianMatrix(Mat w, Mat t);

  /// Projects an arbitrary complex matrix onto the Hermitian part (Q + Q*)/2.
  static HermitianMatrix from_complex(const Eigen::MatrixXcd& q);
  /// y y*.
  static HermitianMatrix outer(const ComplexVector& y);

  [[nodiscard]] int size() const { return static_cast<int>(w_.rows()); }
  [[nodiscard]] const Mat& W() const { return w_; }
  [[nodiscard]] const Mat& T() const { return t_; }
  [[nodiscard]] double w(int i, int j) const { return w_(i, j); }
  [[nodiscard]] double t(int i, int j) const { return t_(i, j); }
  [[nodiscard]] Complex operator()(int i, int j) const { return {w_(i, j), t_(i, j)}; }

  /// Sets entry (i,j) to v and (j,i) to conj(v). Diagonal entries keep only the real part.
  void set(int i, int j, Complex v);

  [[nodiscard]] Eigen::MatrixXcd to_complex() const;
  [[nodiscard]] HermitianMatrix principal(std::span<const int> idx) const;
  [[nodiscard]] double trace() const { return w_.trace(); }
  /// Frobenius norm of the complex matrix.
  [[nodiscard]] double norm() const { return std::sqrt(w_.squaredNorm() + t_.squaredNorm()); }

 private:
  Mat w_;
  Mat t_;
};

/// Smallest eigenvalue of [[Wii, Wij + iTij], [Wij - iTij, Wjj]].
double min_eigenvalue_2x2(double wii, double wjj, double wij, double tij);

/// The real symmetric 2n x 2n matrix [[W, -T], [T, W]].
Mat real_embedding(const HermitianMatrix& h);

/// Eigenvalues of h in ascending order, recovered from the doubled spectrum of the embedding.
Vec hermitian_eigenvalues(const HermitianMatrix& h);

struct PrincipalEigen {
  double value = 0.0;
  ComplexVector vector;
};

/// Largest eigenvalue and a unit eigenvector (defined up to a complex phase).
/// Throws NumericalError if the eigensolver fails or the residual check does not hold.
PrincipalEigen principal_eigvec(const HermitianMatrix& h);

/// Cholesky-based PSD test of a real symmetric matrix, shifted by `tol` times (1 + trace).
bool is_psd(const Mat& a, double tol = 0.0);

}  // namespace sbc
