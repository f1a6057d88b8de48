#include <fstream>
#include <sstream>

#include "json.hpp"

#include "sbc/model.hpp"

namespace sbc {

using nlohmann::json;

namespace {

Vec read_vec(const json& j, int n, const char* what) {
  Vec v = Vec::Zero(n);
  if (j.is_null()) return v;
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw PreconditionError(std::string("instance: '") + what + "' must be an array of length " + std::to_string(n));
  }
  for (int i = 0; i < n; ++i) v(i) = j[i].get<double>();
  return v;
}

ComplexVector read_cvec(const json& j, int n, const char* what) {
  if (j.is_null()) return ComplexVector(n);
  return ComplexVector(read_vec(j.value("re", json()), n, what), read_vec(j.value("im", json()), n, what));
}

HermitianMatrix read_matrix(const json& j, int n) {
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(n, n);
  if (j.is_null()) return HermitianMatrix(n);
  if (j.contains("dense")) {
    const json& d = j["dense"];
    for (const char* part : {"re", "im"}) {
      if (!d.contains(part)) continue;
      const json& rows = d[part];
      if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
        throw PreconditionError("instance: dense matrix must have n rows");
      }
      for (int r = 0; r < n; ++r) {
        if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != n) {
          throw PreconditionError("instance: dense matrix row " + std::to_string(r) + " must have n entries");
        }
        for (int c = 0; c < n; ++c) {
          const double v = rows[r][c].get<double>();
          q(r, c) += part[0] == 'r' ? Complex(v, 0.0) : Complex(0.0, v);
        }
      }
    }
  } else if (j.contains("triplets")) {
    for (const json& t : j["triplets"]) {
      if (!t.is_array() || t.size() < 3 || t.size() > 4) {
        throw PreconditionError("instance: triplet must be [i, j, re] or [i, j, re, im]");
      }
      const int r = t[0].get<int>(), c = t[1].get<int>();
      if (r < 0 || c < 0 || r >= n || c >= n) throw PreconditionError("instance: triplet index out of range");
      q(r, c) += Complex(t[2].get<double>(), t.size() == 4 ? t[3].get<double>() : 0.0);
    }
  } else {
    throw PreconditionError("instance: matrix needs 'dense' or 'triplets'");
  }
  // Symmetrize as (Q + Q*) / 2.
  return HermitianMatrix::from_complex(q);
}

QuadraticFunction read_function(const json& j, int n) {
  QuadraticFunction f;
  f.q = read_matrix(j.value("Q", json()), n);
  f.c = read_cvec(j.value("c", json()), n, "c");
  f.b = j.value("b", 0.0);
  return f;
}

json write_vec(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json write_cvec(const ComplexVector& v) { return {{"re", write_vec(v.re)}, {"im", write_vec(v.im)}}; }

json write_function(const QuadraticFunction& f) {
  json trip = json::array();
  const int n = f.q.size();
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (f.q.w(r, c) != 0.0 || f.q.t(r, c) != 0.0) trip.push_back({r, c, f.q.w(r, c), f.q.t(r, c)});
    }
  }
  return {{"Q", {{"triplets", trip}}}, {"c", write_cvec(f.c)}, {"b", f.b}};
}

}  // namespace

ComplexQcqp load_qcqp_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw PreconditionError(std::string("instance: invalid JSON: ") + e.what());
  }
  try {
    ComplexQcqp p;
    p.n = j.at("n").get<int>();
    if (p.n <= 0) throw PreconditionError("instance: n must be positive");
    p.real = j.value("real", false);
    p.lb = read_cvec(j.at("lb"), p.n, "lb");
    p.ub = read_cvec(j.at("ub"), p.n, "ub");
    p.objective = read_function(j.at("objective"), p.n);
    for (const json& c : j.value("constraints", json::array())) p.constraints.push_back(read_function(c, p.n));
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("instance: ") + e.what());
  }
}

ComplexQcqp load_qcqp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open instance file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_qcqp_json(ss.str());
}

std::string qcqp_to_json(const ComplexQcqp& p) {
  json j;
  j["n"] = p.n;
  j["real"] = p.real;
  j["lb"] = write_cvec(p.lb);
  j["ub"] = write_cvec(p.ub);
  j["objective"] = write_function(p.objective);
  j["constraints"] = json::array();
  for (const auto& f : p.constraints) j["constraints"].push_back(write_function(f));
  return j.dump(2);
}

}  // namespace sbc
