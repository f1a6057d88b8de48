#include "sbc/acopf.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace sbc {

namespace {

struct RawMatrix {
  std::vector<std::vector<double>> rows;
  std::vector<int> lines;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void parse_error(int line, const std::string& msg) {
  throw PreconditionError("matpower line " + std::to_string(line) + ": " + msg);
}

void add_rows(RawMatrix& m, const std::string& content, int line, const std::string& name) {
  std::stringstream segs(content);
  std::string seg;
  while (std::getline(segs, seg, ';')) {
    for (char& ch : seg) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream toks(seg);
    std::string tok;
    std::vector<double> row;
    while (toks >> tok) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') parse_error(line, "malformed value '" + tok + "' in mpc." + name);
      row.push_back(v);
    }
    if (!row.empty()) {
      m.rows.push_back(std::move(row));
      m.lines.push_back(line);
    }
  }
}

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

/// Resolved angle-difference limits in radians.
std::pair<double, double> angle_limits(const Branch& br, double default_deg, int line_no) {
  const bool lo_set = br.angmin > -360.0 && !(br.angmin == 0.0 && br.angmax == 0.0);
  const bool hi_set = br.angmax < 360.0 && !(br.angmin == 0.0 && br.angmax == 0.0);
  double lo = -default_deg, hi = default_deg;
  if (lo_set && hi_set) {
    lo = br.angmin;
    hi = br.angmax;
  } else if (hi_set) {
    lo = -br.angmax;
    hi = br.angmax;
  } else if (lo_set) {
    lo = br.angmin;
    hi = -br.angmin;
  }
  if (std::abs(lo) >= 90.0 || std::abs(hi) >= 90.0) {
    throw PreconditionError("branch " + std::to_string(line_no) + ": angle limit of 90 degrees or more");
  }
  if (lo > hi) throw PreconditionError("branch " + std::to_string(line_no) + ": angmin > angmax");
  return {deg2rad(lo), deg2rad(hi)};
}

/// Accumulates z'Dz + b'z + c in triplet form over z = (Re V, Im V, extra...).
class FormBuilder {
 public:
  FormBuilder(int nvars, int nb) : n_(nvars), nb_(nb), b_(Vec::Zero(nvars)) {}

  void product(int u, int v, double c) {
    if (c == 0.0) return;
    if (u == v) {
      trip_.emplace_back(u, u, c);
    } else {
      trip_.emplace_back(u, v, 0.5 * c);
      trip_.emplace_back(v, u, 0.5 * c);
    }
  }
  /// Adds Re(conj(V_i) a V_j).
  void re_entry(int i, int j, Complex a) {
    const int ei = i, fi = nb_ + i, ej = j, fj = nb_ + j;
    product(ei, ej, a.real());
    product(fi, fj, a.real());
    product(ei, fj, -a.imag());
    product(fi, ej, a.imag());
  }
  void linear(int u, double c) { b_(u) += c; }
  void constant(double c) { c_ += c; }

  RealQuadForm build() const {
    RealQuadForm f;
    f.D.resize(n_, n_);
    f.D.setFromTriplets(trip_.begin(), trip_.end());
    f.b = b_;
    f.c = c_;
    return f;
  }

 private:
  int n_;
  int nb_;
  std::vector<Eigen::Triplet<double>> trip_;
  Vec b_;
  double c_ = 0.0;
};

}  // namespace

int PowerCase::bus_index(int id) const {
  for (size_t k = 0; k < buses.size(); ++k) {
    if (buses[k].id == id) return static_cast<int>(k);
  }
  throw PreconditionError("unknown bus id " + std::to_string(id));
}

PowerCase parse_matpower(const std::string& text) {
  PowerCase pc;
  std::map<std::string, RawMatrix> mats;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  std::string current;
  bool in_cell = false;
  bool have_base = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw.substr(0, raw.find('%'));
    s = trim(s);
    if (s.empty()) continue;
    if (in_cell) {
      if (s.find('}') != std::string::npos) in_cell = false;
      continue;
    }
    if (!current.empty()) {
      const auto close = s.find(']');
      add_rows(mats[current], s.substr(0, close), line, current);
      if (close != std::string::npos) current.clear();
      continue;
    }
    if (s.rfind("function", 0) == 0) {
      const auto eq = s.find('=');
      pc.name = trim(eq == std::string::npos ? s.substr(8) : s.substr(eq + 1));
      continue;
    }
    if (s.rfind("mpc.", 0) != 0) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) parse_error(line, "expected '=' after field name");
    const std::string name = trim(s.substr(4, eq - 4));
    const std::string rest = trim(s.substr(eq + 1));
    if (!rest.empty() && rest[0] == '[') {
      if (mats.count(name)) parse_error(line, "duplicate matrix mpc." + name);
      mats[name];
      const auto close = rest.find(']');
      add_rows(mats[name], rest.substr(1, close == std::string::npos ? std::string::npos : close - 1), line, name);
      if (close == std::string::npos) current = name;
    } else if (!rest.empty() && rest[0] == '{') {
      pc.warnings.push_back("mpc." + name + " ignored");
      if (rest.find('}') == std::string::npos) in_cell = true;
    } else if (name == "baseMVA") {
      std::string v = rest;
      if (!v.empty() && v.back() == ';') v.pop_back();
      char* end = nullptr;
      pc.base_mva = std::strtod(v.c_str(), &end);
      if (end == v.c_str() || !(pc.base_mva > 0)) parse_error(line, "malformed baseMVA");
      have_base = true;
    } else if (name != "version") {
      pc.warnings.push_back("mpc." + name + " ignored");
    }
  }
  if (!current.empty()) parse_error(line, "unterminated matrix mpc." + current);
  if (!have_base) throw PreconditionError("matpower: missing baseMVA");
  for (const char* req : {"bus", "gen", "branch", "gencost"}) {
    if (!mats.count(req)) throw PreconditionError(std::string("matpower: missing mpc.") + req);
  }
  for (const auto& [name, m] : mats) {
    if (name != "bus" && name != "gen" && name != "branch" && name != "gencost") {
      pc.warnings.push_back("mpc." + name + " ignored");
    }
  }
  const double base = pc.base_mva;
  auto need = [](const RawMatrix& m, size_t k, size_t cols, const char* name) {
    if (m.rows[k].size() < cols) {
      parse_error(m.lines[k], std::string("mpc.") + name + " row has " + std::to_string(m.rows[k].size()) +
                                  " columns, expected at least " + std::to_string(cols));
    }
  };
  auto extra_cols = [&](const RawMatrix& m, size_t used, const char* name) {
    for (const auto& r : m.rows) {
      if (r.size() > used) {
        pc.warnings.push_back(std::string("mpc.") + name + " columns beyond " + std::to_string(used) + " ignored");
        return;
      }
    }
  };

  const RawMatrix& bm = mats["bus"];
  for (size_t k = 0; k < bm.rows.size(); ++k) {
    need(bm, k, 13, "bus");
    const auto& r = bm.rows[k];
    Bus b;
    b.id = static_cast<int>(r[0]);
    b.type = static_cast<int>(r[1]);
    b.pd = r[2] / base;
    b.qd = r[3] / base;
    b.gs = r[4] / base;
    b.bs = r[5] / base;
    b.area = static_cast<int>(r[6]);
    b.vm = r[7];
    b.va = r[8];
    b.base_kv = r[9];
    b.zone = static_cast<int>(r[10]);
    b.vmax = r[11];
    b.vmin = r[12];
    if (b.vmin > b.vmax || b.vmin < 0) parse_error(bm.lines[k], "invalid voltage limits");
    pc.buses.push_back(b);
  }
  extra_cols(bm, 13, "bus");

  const RawMatrix& gm = mats["gen"];
  for (size_t k = 0; k < gm.rows.size(); ++k) {
    need(gm, k, 10, "gen");
    const auto& r = gm.rows[k];
    Generator g;
    g.bus = static_cast<int>(r[0]);
    g.pg = r[1] / base;
    g.qg = r[2] / base;
    g.qmax = r[3] / base;
    g.qmin = r[4] / base;
    g.vg = r[5];
    g.mbase = r[6];
    g.status = static_cast<int>(r[7]);
    g.pmax = r[8] / base;
    g.pmin = r[9] / base;
    (void)pc.bus_index(g.bus);
    pc.generators.push_back(g);
  }
  extra_cols(gm, 10, "gen");

  const RawMatrix& cm = mats["gencost"];
  if (cm.rows.size() < pc.generators.size()) {
    throw PreconditionError("matpower: mpc.gencost has fewer rows than mpc.gen");
  }
  if (cm.rows.size() > pc.generators.size()) pc.warnings.push_back("reactive power costs ignored");
  for (size_t k = 0; k < pc.generators.size(); ++k) {
    need(cm, k, 4, "gencost");
    const auto& r = cm.rows[k];
    if (r[0] == 1) parse_error(cm.lines[k], "piecewise linear costs are not supported");
    if (r[0] != 2) parse_error(cm.lines[k], "unknown cost model");
    const int nc = static_cast<int>(r[3]);
    need(cm, k, static_cast<size_t>(4 + nc), "gencost");
    Generator& g = pc.generators[k];
    g.startup = r[1];
    g.shutdown = r[2];
    // Coefficients c_{nc-1} ... c_0.
    for (int p = nc - 1; p >= 0; --p) {
      const double c = r[static_cast<size_t>(4 + (nc - 1 - p))];
      if (p > 2 && c != 0.0) parse_error(cm.lines[k], "cost polynomials above degree 2 are not supported");
      if (p == 2) g.c2 = c * base * base;
      if (p == 1) g.c1 = c * base;
      if (p == 0) g.c0 = c;
    }
    if (g.c2 < 0) parse_error(cm.lines[k], "negative quadratic cost");
  }

  const RawMatrix& rm = mats["branch"];
  for (size_t k = 0; k < rm.rows.size(); ++k) {
    need(rm, k, 11, "branch");
    const auto& r = rm.rows[k];
    Branch br;
    br.from = static_cast<int>(r[0]);
    br.to = static_cast<int>(r[1]);
    br.r = r[2];
    br.x = r[3];
    br.b = r[4];
    br.rate_a = r[5] / base;
    br.rate_b = r[6] / base;
    br.rate_c = r[7] / base;
    br.ratio = r[8];
    br.angle = r[9];
    br.status = static_cast<int>(r[10]);
    if (r.size() >= 13) {
      br.angmin = r[11];
      br.angmax = r[12];
    }
    (void)pc.bus_index(br.from);
    (void)pc.bus_index(br.to);
    pc.branches.push_back(br);
  }
  extra_cols(rm, 13, "branch");
  return pc;
}

PowerCase load_matpower_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw PreconditionError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_matpower(ss.str());
}

std::string to_matpower(const PowerCase& pc) {
  const double base = pc.base_mva;
  std::string out;
  char buf[512];
  auto put = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out += buf;
  };
  out += "function mpc = " + (pc.name.empty() ? std::string("case") : pc.name) + "\n";
  out += "mpc.version = '2';\n";
  put("mpc.baseMVA = %.17g;\n", base);
  out += "mpc.bus = [\n";
  for (const auto& b : pc.buses) {
    put("\t%d\t%d\t%.17g\t%.17g\t%.17g\t%.17g\t%d\t%.17g\t%.17g\t%.17g\t%d\t%.17g\t%.17g;\n", b.id, b.type, b.pd * base,
        b.qd * base, b.gs * base, b.bs * base, b.area, b.vm, b.va, b.base_kv, b.zone, b.vmax, b.vmin);
  }
  out += "];\nmpc.gen = [\n";
  for (const auto& g : pc.generators) {
    put("\t%d\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%d\t%.17g\t%.17g;\n", g.bus, g.pg * base, g.qg * base,
        g.qmax * base, g.qmin * base, g.vg, g.mbase, g.status, g.pmax * base, g.pmin * base);
  }
  out += "];\nmpc.gencost = [\n";
  for (const auto& g : pc.generators) {
    put("\t2\t%.17g\t%.17g\t3\t%.17g\t%.17g\t%.17g;\n", g.startup, g.shutdown, g.c2 / (base * base), g.c1 / base,
        g.c0);
  }
  out += "];\nmpc.branch = [\n";
  for (const auto& br : pc.branches) {
    put("\t%d\t%d\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%d\t%.17g\t%.17g;\n", br.from, br.to, br.r,
        br.x, br.b, br.rate_a * base, br.rate_b * base, br.rate_c * base, br.ratio, br.angle, br.status, br.angmin,
        br.angmax);
  }
  out += "];\n";
  return out;
}

Admittances build_admittances(const PowerCase& pc) {
  const int nb = static_cast<int>(pc.buses.size());
  Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(nb, nb);
  Admittances a;
  for (size_t r = 0; r < pc.branches.size(); ++r) {
    const Branch& br = pc.branches[r];
    if (br.status == 0) continue;
    const Complex z(br.r, br.x);
    if (std::abs(z) == 0.0) throw PreconditionError("branch " + std::to_string(r + 1) + " has zero impedance");
    const Complex ys = 1.0 / z;
    const double tau = br.ratio == 0.0 ? 1.0 : br.ratio;
    const Complex tap = std::polar(tau, deg2rad(br.angle));
    const Complex ych(0.0, 0.5 * br.b);
    BranchAdmittance ba;
    ba.branch = static_cast<int>(r);
    ba.f = pc.bus_index(br.from);
    ba.t = pc.bus_index(br.to);
    ba.yff = (ys + ych) / (tau * tau);
    ba.yft = -ys / std::conj(tap);
    ba.ytf = -ys / tap;
    ba.ytt = ys + ych;
    Y(ba.f, ba.f) += ba.yff;
    Y(ba.f, ba.t) += ba.yft;
    Y(ba.t, ba.f) += ba.ytf;
    Y(ba.t, ba.t) += ba.ytt;
    a.branches.push_back(ba);
  }
  for (int k = 0; k < nb; ++k) Y(k, k) += Complex(pc.buses[static_cast<size_t>(k)].gs, pc.buses[static_cast<size_t>(k)].bs);
  a.G = Y.real();
  a.B = Y.imag();
  const int nr = static_cast<int>(a.branches.size());
  a.Gf = a.Bf = a.Gt = a.Bt = a.Cf = a.Ct = Mat::Zero(nr, nb);
  for (int r = 0; r < nr; ++r) {
    const auto& ba = a.branches[static_cast<size_t>(r)];
    a.Gf(r, ba.f) += ba.yff.real();
    a.Bf(r, ba.f) += ba.yff.imag();
    a.Gf(r, ba.t) += ba.yft.real();
    a.Bf(r, ba.t) += ba.yft.imag();
    a.Gt(r, ba.f) += ba.ytf.real();
    a.Bt(r, ba.f) += ba.ytf.imag();
    a.Gt(r, ba.t) += ba.ytt.real();
    a.Bt(r, ba.t) += ba.ytt.imag();
    a.Cf(r, ba.f) = 1.0;
    a.Ct(r, ba.t) = 1.0;
  }
  return a;
}

Eigen::VectorXcd bus_injections(const Admittances& adm, const ComplexVector& v) {
  const Eigen::MatrixXcd Y = adm.G.cast<Complex>() + Complex(0.0, 1.0) * adm.B.cast<Complex>();
  const Eigen::VectorXcd vc = v.to_complex();
  return vc.cwiseProduct((Y * vc).conjugate());
}

LiftedAcopf build_lacopf(const PowerCase& pc, double default_angle_deg) {
  LiftedAcopf a;
  a.adm = build_admittances(pc);
  const int nb = static_cast<int>(pc.buses.size());
  if (nb == 0) throw PreconditionError("build_lacopf: case has no buses");
  LiftedModel& m = a.model;
  m.dim = nb;
  m.homogenizing = false;
  m.real = false;

  // Generator auxiliaries.
  AffineForm obj;
  std::vector<std::vector<int>> at_bus(static_cast<size_t>(nb));
  for (size_t g = 0; g < pc.generators.size(); ++g) {
    const Generator& gen = pc.generators[g];
    if (gen.status == 0) continue;
    const int gi = static_cast<int>(a.gens.size());
    a.gens.push_back(static_cast<int>(g));
    at_bus[static_cast<size_t>(pc.bus_index(gen.bus))].push_back(gi);
    auto add_aux = [&](double lo, double hi) {
      m.aux_lo.push_back(lo);
      m.aux_hi.push_back(hi);
      return m.num_aux++;
    };
    a.p_aux.push_back(add_aux(gen.pmin, gen.pmax));
    a.q_aux.push_back(add_aux(gen.qmin, gen.qmax));
    obj.constant += gen.c0;
    obj.add_aux(a.p_aux.back(), gen.c1);
    if (gen.c2 > 0.0) {
      const double pmax2 = std::max(gen.pmin * gen.pmin, gen.pmax * gen.pmax);
      const int s = add_aux(0.0, pmax2);
      a.s_aux.push_back(s);
      obj.add_aux(s, gen.c2);
      // s >= P^2 as ||(2P, s - 1)|| <= s + 1.
      AffineForm t0, t1, t2;
      t0.add_aux(s, 1.0).constant = 1.0;
      t1.add_aux(a.p_aux.back(), 2.0);
      t2.add_aux(s, 1.0).constant = -1.0;
      m.soc.push_back({t0, t1, t2});
    } else {
      a.s_aux.push_back(-1);
    }
  }
  obj.canonicalize();
  m.objective = obj;

  // Power balance: sum of generation - demand = injection(W, T).
  for (int k = 0; k < nb; ++k) {
    const Bus& bus = pc.buses[static_cast<size_t>(k)];
    AffineForm p, q;
    p.constant = -bus.pd;
    q.constant = -bus.qd;
    for (int gi : at_bus[static_cast<size_t>(k)]) {
      p.add_aux(a.p_aux[static_cast<size_t>(gi)], 1.0);
      q.add_aux(a.q_aux[static_cast<size_t>(gi)], 1.0);
    }
    for (int j = 0; j < nb; ++j) {
      const double g = a.adm.G(k, j), b = a.adm.B(k, j);
      if (g == 0.0 && b == 0.0) continue;
      p.add_w(k, j, -g).add_t(k, j, -b);
      q.add_w(k, j, b).add_t(k, j, -g);
    }
    p.canonicalize();
    q.canonicalize();
    m.eq.push_back(p);
    m.eq.push_back(q);
  }

  // Line limits and angle bounds.
  std::set<std::pair<int, int>> edges;
  std::map<std::pair<int, int>, std::pair<double, double>> pair_angle;
  for (const auto& ba : a.adm.branches) {
    const Branch& br = pc.branches[static_cast<size_t>(ba.branch)];
    const auto [lo, hi] = angle_limits(br, default_angle_deg, ba.branch + 1);
    a.angle_lo.push_back(lo);
    a.angle_hi.push_back(hi);
    if (ba.f == ba.t) continue;
    edges.insert({std::min(ba.f, ba.t), std::max(ba.f, ba.t)});
    // Stored in the (min, max) orientation.
    const auto key = std::pair{std::min(ba.f, ba.t), std::max(ba.f, ba.t)};
    const auto oriented = ba.f < ba.t ? std::pair{lo, hi} : std::pair{-hi, -lo};
    auto it = pair_angle.find(key);
    if (it == pair_angle.end()) {
      pair_angle[key] = oriented;
    } else {
      it->second.first = std::max(it->second.first, oriented.first);
      it->second.second = std::min(it->second.second, oriented.second);
    }
    if (br.rate_a > 0.0) {
      AffineForm s;
      s.constant = br.rate_a;
      // S_f = conj(yff) W_ff + conj(yft) (W_ft + i T_ft).
      AffineForm pf, qf, pt, qt;
      pf.add_w(ba.f, ba.f, ba.yff.real()).add_w(ba.f, ba.t, ba.yft.real()).add_t(ba.f, ba.t, ba.yft.imag());
      qf.add_w(ba.f, ba.f, -ba.yff.imag()).add_w(ba.f, ba.t, -ba.yft.imag()).add_t(ba.f, ba.t, ba.yft.real());
      pt.add_w(ba.t, ba.t, ba.ytt.real()).add_w(ba.t, ba.f, ba.ytf.real()).add_t(ba.t, ba.f, ba.ytf.imag());
      qt.add_w(ba.t, ba.t, -ba.ytt.imag()).add_w(ba.t, ba.f, -ba.ytf.imag()).add_t(ba.t, ba.f, ba.ytf.real());
      for (auto* f : {&pf, &qf, &pt, &qt}) f->canonicalize();
      m.soc.push_back({s, pf, qf});
      m.soc.push_back({s, pt, qt});
    }
  }

  m.cliques = chordal_decompose(nb, {edges.begin(), edges.end()});
  m.tracked_pairs = m.cliques.pairs();

  BoundsState& b = m.root_bounds;
  b.eb = EntryBounds(nb);
  b.ratio_valid.assign(static_cast<size_t>(nb * nb), 0);
  for (int k = 0; k < nb; ++k) {
    const Bus& bus = pc.buses[static_cast<size_t>(k)];
    b.eb.set(LiftedIndex(k, k), bus.vmin * bus.vmin, bus.vmax * bus.vmax);
  }
  // Adjacency for angle sums along shortest paths (fill pairs).
  std::vector<std::vector<int>> adj(static_cast<size_t>(nb));
  for (auto [i, j] : edges) {
    adj[static_cast<size_t>(i)].push_back(j);
    adj[static_cast<size_t>(j)].push_back(i);
  }
  auto oriented_angle = [&](int i, int j) {
    const auto& v = pair_angle.at({std::min(i, j), std::max(i, j)});
    return i < j ? v : std::pair{-v.second, -v.first};
  };
  for (const auto& pr : m.tracked_pairs) {
    std::pair<double, double> ang;
    if (pair_angle.count({pr.i, pr.j})) {
      ang = pair_angle[{pr.i, pr.j}];
    } else {
      // Breadth-first path pr.i -> pr.j; the angle difference is the sum along the path.
      std::vector<int> parent(static_cast<size_t>(nb), -1);
      std::deque<int> queue{pr.i};
      parent[static_cast<size_t>(pr.i)] = pr.i;
      while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int w : adj[static_cast<size_t>(u)]) {
          if (parent[static_cast<size_t>(w)] < 0) {
            parent[static_cast<size_t>(w)] = u;
            queue.push_back(w);
          }
        }
      }
      if (parent[static_cast<size_t>(pr.j)] < 0) {
        b.eb.set(pr, -kInf, kInf);
        continue;
      }
      ang = {0.0, 0.0};
      for (int w = pr.j; w != pr.i; w = parent[static_cast<size_t>(w)]) {
        const auto e = oriented_angle(parent[static_cast<size_t>(w)], w);
        ang.first += e.first;
        ang.second += e.second;
      }
    }
    if (ang.first > -std::numbers::pi / 2 && ang.second < std::numbers::pi / 2) {
      b.eb.set(pr, std::tan(ang.first), std::tan(ang.second));
      b.set_valid_pair(pr.i, pr.j, true);
    } else {
      b.eb.set(pr, -kInf, kInf);
    }
  }
  return a;
}

AcopfEvaluation evaluate_acopf(const LiftedAcopf& a, const PowerCase& pc, const AcopfPoint& x) {
  AcopfEvaluation ev;
  const int nb = static_cast<int>(pc.buses.size());
  const Eigen::VectorXcd s = bus_injections(a.adm, x.v);
  Eigen::VectorXcd net = Eigen::VectorXcd::Zero(nb);
  for (size_t gi = 0; gi < a.gens.size(); ++gi) {
    const Generator& g = pc.generators[static_cast<size_t>(a.gens[gi])];
    const double p = x.pg(static_cast<Eigen::Index>(gi)), q = x.qg(static_cast<Eigen::Index>(gi));
    ev.objective += g.c2 * p * p + g.c1 * p + g.c0;
    net(pc.bus_index(g.bus)) += Complex(p, q);
    ev.max_violation = std::max({ev.max_violation, g.pmin - p, p - g.pmax, g.qmin - q, q - g.qmax});
  }
  for (int k = 0; k < nb; ++k) {
    const Bus& bus = pc.buses[static_cast<size_t>(k)];
    const Complex r = net(k) - Complex(bus.pd, bus.qd) - s(k);
    ev.max_violation = std::max({ev.max_violation, std::abs(r.real()), std::abs(r.imag())});
    const double mag = std::abs(x.v[k]);
    ev.max_violation = std::max({ev.max_violation, bus.vmin - mag, mag - bus.vmax});
  }
  for (size_t r = 0; r < a.adm.branches.size(); ++r) {
    const auto& ba = a.adm.branches[r];
    const Branch& br = pc.branches[static_cast<size_t>(ba.branch)];
    const Complex vf = x.v[ba.f], vt = x.v[ba.t];
    if (br.rate_a > 0.0) {
      const Complex sf = vf * std::conj(ba.yff * vf + ba.yft * vt);
      const Complex st = vt * std::conj(ba.ytf * vf + ba.ytt * vt);
      ev.max_violation = std::max({ev.max_violation, std::abs(sf) - br.rate_a, std::abs(st) - br.rate_a});
    }
    if (ba.f != ba.t) {
      const double d = std::arg(vf * std::conj(vt));
      ev.max_violation = std::max({ev.max_violation, a.angle_lo[r] - d, d - a.angle_hi[r]});
    }
  }
  ev.max_violation = std::max(ev.max_violation, 0.0);
  return ev;
}

AcopfOracle::AcopfOracle(const PowerCase& pc, const LiftedAcopf& a) : pc_(pc), a_(a) {
  nb_ = static_cast<int>(pc.buses.size());
  ng_ = static_cast<int>(a.gens.size());
  ref_ = 0;
  for (int k = 0; k < nb_; ++k) {
    if (pc.buses[static_cast<size_t>(k)].type == 3) {
      ref_ = k;
      break;
    }
  }
  std::vector<int> limited;
  for (size_t r = 0; r < a.adm.branches.size(); ++r) {
    if (pc.branches[static_cast<size_t>(a.adm.branches[r].branch)].rate_a > 0.0) limited.push_back(static_cast<int>(r));
  }
  // z = (Re V, Im V, Pg, Qg, then Pf, Qf, Pt, Qt per limited branch).
  const int pg0 = 2 * nb_, qg0 = pg0 + ng_, fl0 = qg0 + ng_;
  const int n = fl0 + 4 * static_cast<int>(limited.size());
  LocalProblem& lp = local_;
  lp.n = n;
  lp.lo = Vec::Zero(n);
  lp.hi = Vec::Zero(n);
  for (int k = 0; k < nb_; ++k) {
    const double vmax = pc.buses[static_cast<size_t>(k)].vmax;
    lp.lo(k) = lp.lo(nb_ + k) = -vmax;
    lp.hi(k) = lp.hi(nb_ + k) = vmax;
  }
  lp.lo(ref_) = 0.0;
  lp.lo(nb_ + ref_) = lp.hi(nb_ + ref_) = 0.0;
  FormBuilder obj(n, nb_);
  for (int gi = 0; gi < ng_; ++gi) {
    const Generator& g = pc.generators[static_cast<size_t>(a.gens[static_cast<size_t>(gi)])];
    lp.lo(pg0 + gi) = g.pmin;
    lp.hi(pg0 + gi) = g.pmax;
    lp.lo(qg0 + gi) = g.qmin;
    lp.hi(qg0 + gi) = g.qmax;
    obj.product(pg0 + gi, pg0 + gi, g.c2);
    obj.linear(pg0 + gi, g.c1);
    obj.constant(g.c0);
  }
  lp.objective = obj.build();
  for (int k = 0; k < nb_; ++k) {
    const Bus& bus = pc.buses[static_cast<size_t>(k)];
    FormBuilder p(n, nb_), q(n, nb_);
    p.constant(-bus.pd);
    q.constant(-bus.qd);
    for (int gi = 0; gi < ng_; ++gi) {
      if (pc.bus_index(pc.generators[static_cast<size_t>(a.gens[static_cast<size_t>(gi)])].bus) != k) continue;
      p.linear(pg0 + gi, 1.0);
      q.linear(qg0 + gi, 1.0);
    }
    for (int j = 0; j < nb_; ++j) {
      const Complex y(a.adm.G(k, j), a.adm.B(k, j));
      if (y == Complex(0.0)) continue;
      // P_k = Re(conj(V_k) Y_kj V_j); Q_k = Re(conj(V_k) (i Y_kj) V_j).
      p.re_entry(k, j, -y);
      q.re_entry(k, j, -Complex(0.0, 1.0) * y);
    }
    lp.eq.push_back(p.build());
    lp.eq.push_back(q.build());
    FormBuilder lo(n, nb_), hi(n, nb_);
    lo.re_entry(k, k, -1.0);
    lo.constant(bus.vmin * bus.vmin);
    hi.re_entry(k, k, 1.0);
    hi.constant(-bus.vmax * bus.vmax);
    lp.ineq.push_back(lo.build());
    lp.ineq.push_back(hi.build());
  }
  const Complex I(0.0, 1.0);
  for (size_t r = 0; r < a.adm.branches.size(); ++r) {
    const auto& ba = a.adm.branches[r];
    if (ba.f == ba.t) continue;
    // V_f conj(V_t) = conj(V_t) * 1 * V_f.
    FormBuilder c1(n, nb_), c2(n, nb_), c3(n, nb_);
    c1.re_entry(ba.t, ba.f, std::tan(a.angle_lo[r]) + I);
    c2.re_entry(ba.t, ba.f, -std::tan(a.angle_hi[r]) - I);
    c3.re_entry(ba.t, ba.f, -1.0);
    lp.ineq.push_back(c1.build());
    lp.ineq.push_back(c2.build());
    lp.ineq.push_back(c3.build());
  }
  for (size_t l = 0; l < limited.size(); ++l) {
    const auto& ba = a.adm.branches[static_cast<size_t>(limited[l])];
    const double rate = pc.branches[static_cast<size_t>(ba.branch)].rate_a;
    const int base = fl0 + 4 * static_cast<int>(l);
    for (int c = 0; c < 4; ++c) {
      lp.lo(base + c) = -rate;
      lp.hi(base + c) = rate;
    }
    FormBuilder pf(n, nb_), qf(n, nb_), pt(n, nb_), qt(n, nb_);
    pf.linear(base, 1.0);
    pf.re_entry(ba.f, ba.f, -ba.yff);
    pf.re_entry(ba.f, ba.t, -ba.yft);
    qf.linear(base + 1, 1.0);
    qf.re_entry(ba.f, ba.f, -I * ba.yff);
    qf.re_entry(ba.f, ba.t, -I * ba.yft);
    pt.linear(base + 2, 1.0);
    pt.re_entry(ba.t, ba.t, -ba.ytt);
    pt.re_entry(ba.t, ba.f, -ba.ytf);
    qt.linear(base + 3, 1.0);
    qt.re_entry(ba.t, ba.t, -I * ba.ytt);
    qt.re_entry(ba.t, ba.f, -I * ba.ytf);
    for (auto* f : {&pf, &qf, &pt, &qt}) lp.eq.push_back(f->build());
    FormBuilder sf(n, nb_), st(n, nb_);
    sf.product(base, base, 1.0);
    sf.product(base + 1, base + 1, 1.0);
    sf.constant(-rate * rate);
    st.product(base + 2, base + 2, 1.0);
    st.product(base + 3, base + 3, 1.0);
    st.constant(-rate * rate);
    lp.ineq.push_back(sf.build());
    lp.ineq.push_back(st.build());
  }
}

std::optional<Incumbent> AcopfOracle::polish(const ComplexVector& v0, const std::string& source) {
  ComplexVector v = v0;
  // Rotate so the reference bus is real and positive.
  if (std::abs(v[ref_]) > 0.0) {
    const Complex rot = std::conj(v[ref_]) / std::abs(v[ref_]);
    for (int k = 0; k < nb_; ++k) v.set(k, v[k] * rot);
  }
  const int pg0 = 2 * nb_, qg0 = pg0 + ng_, fl0 = qg0 + ng_;
  Vec z = Vec::Zero(local_.n);
  z.head(nb_) = v.re;
  z.segment(nb_, nb_) = v.im;
  const Eigen::VectorXcd s = bus_injections(a_.adm, v);
  std::vector<int> count(static_cast<size_t>(nb_), 0);
  for (int gi = 0; gi < ng_; ++gi) {
    ++count[static_cast<size_t>(pc_.bus_index(pc_.generators[static_cast<size_t>(a_.gens[static_cast<size_t>(gi)])].bus))];
  }
  for (int gi = 0; gi < ng_; ++gi) {
    const int k = pc_.bus_index(pc_.generators[static_cast<size_t>(a_.gens[static_cast<size_t>(gi)])].bus);
    const Bus& bus = pc_.buses[static_cast<size_t>(k)];
    const double share = 1.0 / count[static_cast<size_t>(k)];
    z(pg0 + gi) = share * (s(k).real() + bus.pd);
    z(qg0 + gi) = share * (s(k).imag() + bus.qd);
  }
  int l = 0;
  for (const auto& ba : a_.adm.branches) {
    if (pc_.branches[static_cast<size_t>(ba.branch)].rate_a <= 0.0) continue;
    const Complex vf = v[ba.f], vt = v[ba.t];
    const Complex sf = vf * std::conj(ba.yff * vf + ba.yft * vt);
    const Complex st = vt * std::conj(ba.ytf * vf + ba.ytt * vt);
    const int base = fl0 + 4 * l++;
    z(base) = sf.real();
    z(base + 1) = sf.imag();
    z(base + 2) = st.real();
    z(base + 3) = st.imag();
  }
  z = z.cwiseMax(local_.lo).cwiseMin(local_.hi);
  const LocalResult r = solve_local(local_, z);
  AcopfPoint x{ComplexVector(r.z.head(nb_), r.z.segment(nb_, nb_)), r.z.segment(pg0, ng_), r.z.segment(qg0, ng_)};
  const AcopfEvaluation ev = evaluate_acopf(a_, pc_, x);
  if (ev.max_violation > 1e-6) return std::nullopt;
  Incumbent inc;
  inc.x = x.v;
  inc.extra = Vec(2 * ng_);
  inc.extra << x.pg, x.qg;
  inc.objective = ev.objective;
  inc.max_violation = ev.max_violation;
  inc.source = source;
  return inc;
}

std::optional<Incumbent> AcopfOracle::propose(const BoundsState&, const RelaxationSolution& sol) {
  const LiftedModel& m = a_.model;
  const ComplexVector y = rank_one_complete(m.cliques, clique_blocks(m.cliques, sol.Y), m.dim, true);
  auto best = polish(y, "eigen");
  // Second start: completion angles with the relaxation's diagonal magnitudes.
  ComplexVector w(nb_);
  for (int k = 0; k < nb_; ++k) {
    const double mag = std::sqrt(std::max(0.0, sol.Y.w(k, k)));
    const double ang = std::abs(y[k]) > 0 ? std::arg(y[k]) : 0.0;
    w.set(k, std::polar(mag, ang));
  }
  auto alt = polish(w, "diag");
  if (alt && (!best || alt->objective < best->objective)) best = std::move(alt);
  return best;
}

SearchResult solve_acopf(const PowerCase& pc, const SolverConfig& cfg, std::ostream* events,
                         double default_angle_deg) {
  const LiftedAcopf a = build_lacopf(pc, default_angle_deg);
  AcopfOracle oracle(pc, a);
  return branch_and_cut(a.model, oracle, cfg, events);
}

}  // namespace sbc
