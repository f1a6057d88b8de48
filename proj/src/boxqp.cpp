#include "sbc/boxqp.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sbc {

BoxQpInstance parse_boxqp(const std::string& text) {
  std::istringstream in(text);
  std::vector<double> vals;
  std::string tok;
  while (in >> tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') throw PreconditionError("spar: malformed value '" + tok + "'");
    vals.push_back(v);
  }
  if (vals.empty()) throw PreconditionError("spar: empty input");
  const double nd = vals[0];
  if (nd < 1 || nd != static_cast<double>(static_cast<int>(nd))) {
    throw PreconditionError("spar: dimension must be a positive integer");
  }
  BoxQpInstance b;
  b.n = static_cast<int>(nd);
  const size_t n = static_cast<size_t>(b.n);
  if (vals.size() != 1 + n + n * n) {
    throw PreconditionError("spar: expected " + std::to_string(1 + n + n * n) + " values for n = " +
                            std::to_string(n) + ", found " + std::to_string(vals.size()));
  }
  b.f = Vec::Map(vals.data() + 1, b.n);
  Mat q(b.n, b.n);
  for (int i = 0; i < b.n; ++i) {
    for (int j = 0; j < b.n; ++j) q(i, j) = vals[1 + n + static_cast<size_t>(i) * n + static_cast<size_t>(j)];
  }
  b.Q = 0.5 * (q + q.transpose());
  if (b.n > 1) {
    int nnz = 0;
    for (int i = 0; i < b.n; ++i) {
      for (int j = 0; j < b.n; ++j) nnz += (i != j && b.Q(i, j) != 0.0) ? 1 : 0;
    }
    b.density = nnz / static_cast<double>(b.n * (b.n - 1));
  }
  return b;
}

BoxQpInstance load_boxqp_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw PreconditionError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_boxqp(ss.str());
}

std::string to_spar(const BoxQpInstance& b) {
  std::ostringstream out;
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  out << b.n << "\n";
  for (int i = 0; i < b.n; ++i) {
    if (i) out << ' ';
    put(b.f(i));
  }
  out << "\n";
  for (int i = 0; i < b.n; ++i) {
    for (int j = 0; j < b.n; ++j) {
      if (j) out << ' ';
      put(b.Q(i, j));
    }
    out << "\n";
  }
  return out.str();
}

ComplexQcqp boxqp_to_model(const BoxQpInstance& b) {
  ComplexQcqp p;
  p.n = b.n;
  p.real = true;
  p.objective.q = HermitianMatrix(0.5 * b.Q, Mat::Zero(b.n, b.n));
  p.objective.c = ComplexVector(b.f, Vec::Zero(b.n));
  p.lb = ComplexVector(b.n);
  p.ub = ComplexVector(Vec::Ones(b.n), Vec::Zero(b.n));
  p.validate();
  return p;
}

SolverConfig boxqp_default_config() {
  SolverConfig cfg;
  cfg.relaxation = Relaxation::sdp_rlt;
  cfg.gap = 1e-4;
  return cfg;
}

SearchResult solve_boxqp(const BoxQpInstance& b, const SolverConfig& cfg, std::ostream* events) {
  return solve_qcqp(boxqp_to_model(b), cfg, events);
}

}  // namespace sbc
