#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "sbc/conic.hpp"

namespace sbc {

double AffineRow::value(const Vec& x) const {
  double v = constant;
  for (const auto& t : terms) v += t.coef * x(t.var);
  return v;
}

Mat PsdBlock::value(const Vec& x) const {
  Mat m(order, order);
  size_t k = 0;
  for (int j = 0; j < order; ++j) {
    for (int i = j; i < order; ++i) {
      m(i, j) = m(j, i) = entries[k++].value(x);
    }
  }
  return m;
}

double ConicProgram::max_violation(const Vec& x) const {
  double viol = 0.0;
  for (const auto& r : eq) viol = std::max(viol, std::abs(r.value(x)));
  for (const auto& r : nonneg) viol = std::max(viol, -r.value(x));
  for (const auto& cone : soc) {
    double tail = 0.0;
    for (size_t k = 1; k < cone.size(); ++k) tail += std::pow(cone[k].value(x), 2);
    viol = std::max(viol, std::sqrt(tail) - cone[0].value(x));
  }
  for (const auto& b : psd) {
    Eigen::SelfAdjointEigenSolver<Mat> es(b.value(x), Eigen::EigenvaluesOnly);
    viol = std::max(viol, -es.eigenvalues()(0));
  }
  return viol;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::infeasible:
      return "infeasible";
    case SolveStatus::numerical_failure:
      return "numerical_failure";
  }
  return "unknown";
}

}  // namespace sbc
