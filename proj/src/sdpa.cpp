#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include "sbc/conic.hpp"

namespace sbc {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// (matrix, block, row, col) with row <= col, 1-based as in the file.
using Key = std::tuple<int, int, int, int>;

void put(std::map<Key, double>& entries, int block, int r, int c, const AffineRow& row) {
  if (r > c) std::swap(r, c);
  // The file states sum_k F_k x_k - F_0 >= 0, so F_0 holds the negated constant.
  if (row.constant != 0.0) entries[{0, block, r, c}] -= row.constant;
  for (const auto& t : row.terms) entries[{t.var + 1, block, r, c}] += t.coef;
}

}  // namespace

std::string to_sdpa(const ConicProgram& cp) {
  std::map<Key, double> entries;
  std::vector<int> sizes;
  int block = 0;
  for (const auto& p : cp.psd) {
    ++block;
    sizes.push_back(p.order);
    size_t k = 0;
    for (int c = 0; c < p.order; ++c) {
      for (int r = c; r < p.order; ++r) put(entries, block, r + 1, c + 1, p.entries[k++]);
    }
  }
  for (const auto& cone : cp.soc) {
    ++block;
    const int order = static_cast<int>(cone.size());
    sizes.push_back(order);
    for (int i = 0; i < order; ++i) put(entries, block, i + 1, i + 1, cone[0]);
    for (int i = 1; i < order; ++i) put(entries, block, 1, i + 1, cone[static_cast<size_t>(i)]);
  }
  const int lp = static_cast<int>(cp.nonneg.size() + 2 * cp.eq.size());
  if (lp > 0) {
    ++block;
    sizes.push_back(-lp);
    int r = 0;
    for (const auto& row : cp.nonneg) {
      ++r;
      put(entries, block, r, r, row);
    }
    for (const auto& row : cp.eq) {
      ++r;
      put(entries, block, r, r, row);
      AffineRow neg = row;
      neg.constant = -neg.constant;
      for (auto& t : neg.terms) t.coef = -t.coef;
      ++r;
      put(entries, block, r, r, neg);
    }
  }

  std::ostringstream out;
  out << "\"objective constant " << fmt(cp.objective_constant) << "\n";
  out << cp.num_vars << "\n" << sizes.size() << "\n";
  for (size_t b = 0; b < sizes.size(); ++b) out << (b ? " " : "") << sizes[b];
  out << "\n";
  for (int i = 0; i < cp.num_vars; ++i) out << (i ? " " : "") << fmt(cp.objective(i));
  out << "\n";
  for (const auto& [key, v] : entries) {
    if (v == 0.0) continue;
    const auto [m, b, r, c] = key;
    out << m << " " << b << " " << r << " " << c << " " << fmt(v) << "\n";
  }
  return out.str();
}

}  // namespace sbc
