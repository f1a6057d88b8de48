#include "sbc/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <ostream>

#include "json.hpp"

namespace sbc {

using json = nlohmann::json;

std::string to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::optimal:
      return "optimal";
    case SearchStatus::infeasible:
      return "infeasible";
    case SearchStatus::node_limit:
      return "node_limit";
    case SearchStatus::time_limit:
      return "time_limit";
    case SearchStatus::uncertified:
      return "uncertified";
    case SearchStatus::failed:
      return "failed";
  }
  return "unknown";
}

double relative_gap(double gub, double glb) {
  if (!std::isfinite(gub) || !std::isfinite(glb)) return kInf;
  return std::max(0.0, (gub - glb) / std::max(std::abs(gub), 1e-9));
}

bool prune_test(double value, double gub, double gap) {
  if (std::isinf(value) && value > 0) return true;
  if (!std::isfinite(gub)) return false;
  return value >= gub - gap * std::max(std::abs(gub), 1e-9);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

json entry_json(LiftedIndex e) { return json::array({e.i, e.j}); }

/// A bound change relative to a parent snapshot.
struct BoundChange {
  enum class Kind { L, U, WL, WU, TL, TU } kind;
  int i = 0;
  int j = 0;
  double value = 0.0;
};

/// Node bounds stored as the parent's snapshot plus the entries that differ.
struct DeltaBounds {
  std::shared_ptr<const BoundsState> base;
  std::vector<BoundChange> changes;

  static DeltaBounds diff(std::shared_ptr<const BoundsState> base, const BoundsState& child) {
    DeltaBounds d;
    const BoundsState& p = *base;
    const int n = p.dim();
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        if (child.eb.L(i, j) != p.eb.L(i, j)) d.changes.push_back({BoundChange::Kind::L, i, j, child.eb.L(i, j)});
        if (child.eb.U(i, j) != p.eb.U(i, j)) d.changes.push_back({BoundChange::Kind::U, i, j, child.eb.U(i, j)});
      }
    }
    for (Eigen::Index k = 0; k < p.wl.size(); ++k) {
      const int kk = static_cast<int>(k);
      if (child.wl(k) != p.wl(k)) d.changes.push_back({BoundChange::Kind::WL, kk, 0, child.wl(k)});
      if (child.wu(k) != p.wu(k)) d.changes.push_back({BoundChange::Kind::WU, kk, 0, child.wu(k)});
      if (child.tl(k) != p.tl(k)) d.changes.push_back({BoundChange::Kind::TL, kk, 0, child.tl(k)});
      if (child.tu(k) != p.tu(k)) d.changes.push_back({BoundChange::Kind::TU, kk, 0, child.tu(k)});
    }
    d.base = std::move(base);
    return d;
  }

  [[nodiscard]] BoundsState materialize() const {
    BoundsState b = *base;
    for (const auto& c : changes) {
      switch (c.kind) {
        case BoundChange::Kind::L:
          b.eb.L(c.i, c.j) = b.eb.L(c.j, c.i) = c.value;
          break;
        case BoundChange::Kind::U:
          b.eb.U(c.i, c.j) = b.eb.U(c.j, c.i) = c.value;
          break;
        case BoundChange::Kind::WL:
          b.wl(c.i) = c.value;
          break;
        case BoundChange::Kind::WU:
          b.wu(c.i) = c.value;
          break;
        case BoundChange::Kind::TL:
          b.tl(c.i) = c.value;
          break;
        case BoundChange::Kind::TU:
          b.tu(c.i) = c.value;
          break;
      }
    }
    return b;
  }
};

struct Node {
  int id = 0;
  int depth = 0;
  DeltaBounds bounds;
  RelaxationSolution sol;
  double value = -kInf;
};

struct Child {
  BoundsState bounds;
  bool infeasible = false;
  bool solved = false;
  RelaxationSolution sol;
  double value = kInf;
  double seconds = 0.0;
  int relaxations = 0;
};

json child_json(const Child& c, LiftedIndex cstar) {
  json j;
  if (c.infeasible) {
    j["status"] = "infeasible";
    return j;
  }
  j["status"] = to_string(c.sol.status);
  j["value"] = c.value;
  if (c.sol.Y.size() > 0) {
    j["lambda"] = min_eigenvalue_2x2(c.sol.Y.w(cstar.i, cstar.i), c.sol.Y.w(cstar.j, cstar.j),
                                     c.sol.Y.w(cstar.i, cstar.j), c.sol.Y.t(cstar.i, cstar.j));
  }
  return j;
}

std::optional<double> child_lambda(const Child& c, LiftedIndex cstar) {
  if (c.infeasible || c.sol.Y.size() == 0) return std::nullopt;
  return min_eigenvalue_2x2(c.sol.Y.w(cstar.i, cstar.i), c.sol.Y.w(cstar.j, cstar.j), c.sol.Y.w(cstar.i, cstar.j),
                            c.sol.Y.t(cstar.i, cstar.j));
}

class Search {
 public:
  Search(const LiftedModel& m, PrimalOracle& oracle, const SolverConfig& cfg, std::ostream* events)
      : m_(m), oracle_(oracle), cfg_(cfg), events_(events) {}

  SearchResult run();

 private:
  struct Candidate {
    LiftedIndex entry;
    Interval interval;
    std::string mode;
    double score = -kInf;
    std::optional<Child> up, down;
    std::optional<double> wev_up, wev_down;
    double phi_up = 0.0, phi_down = 0.0;
  };

  void emit(const json& j) {
    if (events_) *events_ << j.dump() << "\n";
  }

  Child make_child(const BoundsState& parent, LiftedIndex e, bool up, double parent_value, double cutoff) const {
    const auto t0 = Clock::now();
    Child c;
    auto [u, d] = apply_branch(parent, e);
    c.bounds = up ? std::move(u) : std::move(d);
    if (cfg_.tighten && tighten_bounds(m_, c.bounds, cutoff).infeasible) {
      c.infeasible = true;
      c.seconds = seconds_since(t0);
      return c;
    }
    c.sol = solve_relaxation(m_, c.bounds, cfg_.relaxation, cfg_.ipm);
    c.relaxations = 1;
    c.solved = true;
    if (c.sol.status == SolveStatus::infeasible) {
      c.infeasible = true;
    } else if (c.sol.status == SolveStatus::optimal) {
      c.value = std::max(c.sol.value, parent_value);
    } else {
      c.value = parent_value;
    }
    c.seconds = seconds_since(t0);
    return c;
  }

  /// Runs make_child for every (candidate, side) task, in parallel when configured.
  void evaluate_children(const BoundsState& parent, double parent_value, std::vector<Candidate>& cands,
                         const std::vector<size_t>& which) {
    struct Task {
      size_t cand;
      bool up;
    };
    std::vector<Task> tasks;
    for (size_t k : which) {
      tasks.push_back({k, true});
      tasks.push_back({k, false});
    }
    std::vector<Child> out(tasks.size());
    const double cutoff = gub_;
    if (cfg_.threads > 1) {
      for (size_t start = 0; start < tasks.size(); start += static_cast<size_t>(cfg_.threads)) {
        std::vector<std::future<Child>> fs;
        const size_t end = std::min(tasks.size(), start + static_cast<size_t>(cfg_.threads));
        for (size_t t = start; t < end; ++t) {
          fs.push_back(std::async(std::launch::async, [&, t] {
            return make_child(parent, cands[tasks[t].cand].entry, tasks[t].up, parent_value, cutoff);
          }));
        }
        for (size_t t = start; t < end; ++t) out[t] = fs[t - start].get();
      }
    } else {
      for (size_t t = 0; t < tasks.size(); ++t) {
        out[t] = make_child(parent, cands[tasks[t].cand].entry, tasks[t].up, parent_value, cutoff);
      }
    }
    for (size_t t = 0; t < tasks.size(); ++t) {
      res_.lbtime += out[t].seconds;
      res_.relaxations += out[t].relaxations;
      (tasks[t].up ? cands[tasks[t].cand].up : cands[tasks[t].cand].down) = std::move(out[t]);
    }
  }

  void record_pseudocost(LiftedIndex e, bool up, const Child& c, double parent_value, double width) {
    if (c.infeasible || c.sol.status != SolveStatus::optimal) return;
    const double delta = c.value - parent_value;
    const double pu = per_unit_gain(delta, width);
    pc_.record(e, up, pu);
    emit({{"event", "pseudocost"},
          {"entry", entry_json(e)},
          {"side", up ? "up" : "down"},
          {"delta", delta},
          {"width", width},
          {"per_unit", pu},
          {"count", pc_.count(e, up)},
          {"phi", pc_.phi(e, up)}});
  }

  void consider_incumbent(const BoundsState& b, const RelaxationSolution& sol, int node_id) {
    if (sol.Y.size() == 0) return;
    const auto t0 = Clock::now();
    std::optional<Incumbent> cand;
    try {
      cand = oracle_.propose(b, sol);
    } catch (const NumericalError&) {
      cand.reset();
    }
    res_.ubtime += seconds_since(t0);
    if (!cand || cand->max_violation > 1e-6) return;
    if (cand->objective < gub_) {
      gub_ = cand->objective;
      res_.incumbent = *cand;
      emit({{"event", "incumbent"}, {"node", node_id}, {"objective", gub_}, {"source", cand->source}});
    }
  }

  double current_glb() const {
    double g = std::min(unresolved_, gub_);
    for (const auto& n : stack_) g = std::min(g, n.value);
    return g;
  }

  const LiftedModel& m_;
  PrimalOracle& oracle_;
  const SolverConfig& cfg_;
  std::ostream* events_;
  SearchResult res_;
  PseudocostTable pc_;
  std::vector<Node> stack_;
  double gub_ = kInf;
  double unresolved_ = kInf;
  int next_id_ = 0;
};

SearchResult Search::run() {
  const auto t0 = Clock::now();
  BoundsState root = m_.root_bounds;
  emit({{"event", "start"},
        {"relaxation", to_string(cfg_.relaxation)},
        {"rule", to_string(cfg_.rule)},
        {"gap", cfg_.gap},
        {"dim", m_.dim},
        {"tracked_pairs", m_.tracked_pairs.size()}});
  auto finish = [&](SearchStatus s) {
    res_.status = s;
    res_.gub = gub_;
    res_.time = seconds_since(t0);
    emit({{"event", "done"},
          {"status", to_string(s)},
          {"glb", res_.glb},
          {"gub", gub_},
          {"nodes", res_.nodes},
          {"certified", res_.certified}});
    return res_;
  };
  if (cfg_.tighten && tighten_bounds(m_, root, kInf).infeasible) {
    res_.message = "root bounds are inconsistent";
    res_.glb = kInf;
    return finish(SearchStatus::infeasible);
  }
  Node rn;
  rn.id = next_id_++;
  {
    const auto ts = Clock::now();
    rn.sol = solve_relaxation(m_, root, cfg_.relaxation, cfg_.ipm);
    res_.lbtime += seconds_since(ts);
    ++res_.relaxations;
  }
  if (rn.sol.status == SolveStatus::infeasible) {
    res_.glb = kInf;
    res_.message = "root relaxation infeasible";
    emit({{"event", "node"}, {"id", rn.id}, {"depth", 0}, {"status", "infeasible"}});
    return finish(SearchStatus::infeasible);
  }
  if (rn.sol.status != SolveStatus::optimal) {
    res_.message = "root relaxation failed: " + rn.sol.message;
    emit({{"event", "node"}, {"id", rn.id}, {"depth", 0}, {"status", to_string(rn.sol.status)}});
    return finish(SearchStatus::failed);
  }
  rn.value = rn.sol.value;
  res_.root_value = rn.value;
  res_.nodes = 1;
  res_.glb = rn.value;
  emit({{"event", "node"}, {"id", rn.id}, {"depth", 0}, {"status", "open"}, {"value", rn.value}});
  auto root_ptr = std::make_shared<const BoundsState>(root);
  rn.bounds = DeltaBounds::diff(root_ptr, root);
  consider_incumbent(root, rn.sol, rn.id);
  stack_.push_back(std::move(rn));

  while (true) {
    res_.glb = std::max(res_.glb, current_glb());
    res_.gap = relative_gap(gub_, res_.glb);
    if (std::isfinite(gub_) && res_.gap <= cfg_.gap) return finish(SearchStatus::optimal);
    if (stack_.empty()) {
      if (!std::isfinite(gub_) && !std::isfinite(unresolved_)) {
        res_.glb = kInf;
        return finish(SearchStatus::infeasible);
      }
      res_.certified = false;
      res_.warnings.push_back("search exhausted with the gap above the limit");
      return finish(SearchStatus::uncertified);
    }
    if (res_.nodes >= cfg_.node_limit) return finish(SearchStatus::node_limit);
    if (seconds_since(t0) >= cfg_.time_limit) return finish(SearchStatus::time_limit);

    Node node = std::move(stack_.back());
    stack_.pop_back();
    if (node.depth > 0) ++res_.nodes;
    res_.max_depth = std::max(res_.max_depth, node.depth);
    if (prune_test(node.value, gub_, cfg_.gap)) {
      emit({{"event", "prune"}, {"id", node.id}, {"reason", "bound"}, {"value", node.value}});
      continue;
    }
    const BoundsState bounds = node.bounds.materialize();
    const HermitianMatrix& Y = node.sol.Y;
    const auto viol = measure_violation(Y, m_.tracked_pairs);

    // Violated pairs in decreasing lambda_min order (ties by index); c* is the first with a candidate.
    std::vector<PairViolation> violated;
    for (const auto& v : viol) {
      if (is_violated(v, Y, cfg_.violation_tol)) violated.push_back(v);
    }
    std::sort(violated.begin(), violated.end(), [](const PairViolation& a, const PairViolation& b) {
      if (a.lambda_min != b.lambda_min) return a.lambda_min > b.lambda_min;
      return a.pair < b.pair;
    });
    std::optional<PairViolation> cstar;
    for (const auto& v : violated) {
      if (!candidate_entries(v.pair, bounds).empty()) {
        cstar = v;
        break;
      }
    }
    if (!cstar) {
      unresolved_ = std::min(unresolved_, node.value);
      emit({{"event", "prune"},
            {"id", node.id},
            {"reason", violated.empty() ? "rank-one" : "no-candidate"},
            {"value", node.value}});
      continue;
    }
    if (node.depth >= cfg_.max_depth) {
      unresolved_ = std::min(unresolved_, node.value);
      if (res_.certified) res_.warnings.push_back("depth limit reached; gap certificate not guaranteed");
      res_.certified = false;
      emit({{"event", "prune"}, {"id", node.id}, {"reason", "depth"}, {"value", node.value}});
      continue;
    }

    // Candidate entries and scores.
    std::vector<Candidate> cands;
    auto add_candidates = [&](LiftedIndex pair) {
      for (LiftedIndex e : candidate_entries(pair, bounds)) {
        if (std::any_of(cands.begin(), cands.end(), [&](const Candidate& c) { return c.entry == e; })) continue;
        cands.push_back({e, entry_interval(bounds, e), "", -kInf, {}, {}, {}, {}, 0.0, 0.0});
      }
    };
    if (cfg_.rule == BranchRule::rbeb) {
      for (const auto& v : violated) add_candidates(v.pair);
    } else {
      add_candidates(cstar->pair);
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.entry < b.entry; });

    std::vector<size_t> strong;
    for (size_t k = 0; k < cands.size(); ++k) {
      Candidate& c = cands[k];
      if (cfg_.rule == BranchRule::mvsb) {
        c.mode = "strong";
        strong.push_back(k);
      } else if (cfg_.rule == BranchRule::mvwb) {
        c.mode = "wev";
        const auto ts = Clock::now();
        auto [u, d] = apply_branch(bounds, c.entry);
        auto wev_for = [&](BoundsState& b) -> std::optional<double> {
          if (cfg_.tighten && tighten_bounds(m_, b, gub_).infeasible) return std::nullopt;
          return solve_wev(cstar->pair, b, m_.real, cfg_.ipm);
        };
        c.wev_up = wev_for(u);
        c.wev_down = wev_for(d);
        res_.lbtime += seconds_since(ts);
        c.score = mvsb_score(c.wev_up, c.wev_down, cfg_.mu);
      } else if (pc_.reliable(c.entry, cfg_.eta)) {
        c.mode = "pseudocost";
        c.phi_up = pc_.phi(c.entry, true);
        c.phi_down = pc_.phi(c.entry, false);
        c.score = rbeb_score(c.phi_up, c.phi_down, c.interval.hi - c.interval.lo, cfg_.mu);
      } else {
        c.mode = "strong";
        strong.push_back(k);
      }
    }
    evaluate_children(bounds, node.value, cands, strong);
    for (size_t k : strong) {
      Candidate& c = cands[k];
      if (cfg_.rule == BranchRule::mvsb) {
        c.score = mvsb_score(child_lambda(*c.up, cstar->pair), child_lambda(*c.down, cstar->pair), cfg_.mu);
      } else {
        const double width = c.interval.hi - c.interval.lo;
        record_pseudocost(c.entry, true, *c.up, node.value, width);
        record_pseudocost(c.entry, false, *c.down, node.value, width);
        const double du = c.up->infeasible ? kInf : c.up->value - node.value;
        const double dd = c.down->infeasible ? kInf : c.down->value - node.value;
        c.score = mvsb_score(std::isinf(du) ? std::nullopt : std::optional<double>(-du),
                             std::isinf(dd) ? std::nullopt : std::optional<double>(-dd), cfg_.mu);
      }
    }
    size_t best = 0;
    for (size_t k = 1; k < cands.size(); ++k) {
      if (cands[k].score > cands[best].score) best = k;
    }
    Candidate& chosen = cands[best];

    json jc = json::array();
    for (const auto& c : cands) {
      json x{{"entry", entry_json(c.entry)}, {"lo", c.interval.lo}, {"hi", c.interval.hi}, {"mode", c.mode},
             {"score", c.score}};
      if (c.up) x["up"] = child_json(*c.up, cstar->pair);
      if (c.down) x["down"] = child_json(*c.down, cstar->pair);
      if (c.mode == "wev") {
        x["wev_up"] = c.wev_up ? json(*c.wev_up) : json(nullptr);
        x["wev_down"] = c.wev_down ? json(*c.wev_down) : json(nullptr);
      }
      if (c.mode == "pseudocost") {
        x["phi_up"] = c.phi_up;
        x["phi_down"] = c.phi_down;
      }
      jc.push_back(std::move(x));
    }
    emit({{"event", "branch"},
          {"node", node.id},
          {"depth", node.depth},
          {"value", node.value},
          {"rule", to_string(cfg_.rule)},
          {"mu", cfg_.mu},
          {"cstar", entry_json(cstar->pair)},
          {"lambda", cstar->lambda_min},
          {"candidates", jc},
          {"chosen", entry_json(chosen.entry)}});

    if (!chosen.up) {
      std::vector<size_t> one{best};
      evaluate_children(bounds, node.value, cands, one);
      if (cfg_.rule == BranchRule::rbeb) {
        const double width = chosen.interval.hi - chosen.interval.lo;
        record_pseudocost(chosen.entry, true, *chosen.up, node.value, width);
        record_pseudocost(chosen.entry, false, *chosen.down, node.value, width);
      }
    }

    auto parent_ptr = std::make_shared<const BoundsState>(bounds);
    std::vector<Node> kids;
    for (bool up : {true, false}) {
      Child& c = up ? *chosen.up : *chosen.down;
      const int id = next_id_++;
      json ev{{"event", "node"},
              {"id", id},
              {"parent", node.id},
              {"depth", node.depth + 1},
              {"entry", entry_json(chosen.entry)},
              {"side", up ? "up" : "down"}};
      if (c.infeasible) {
        ev["status"] = "infeasible";
        emit(ev);
        continue;
      }
      ev["status"] = c.sol.status == SolveStatus::optimal ? "open" : "unresolved";
      ev["value"] = c.value;
      if (const auto lam = child_lambda(c, cstar->pair)) ev["lambda_cstar"] = *lam;
      emit(ev);
      if (c.sol.status != SolveStatus::optimal) {
        // The parent's solution stays a valid (weaker) relaxation of the child and still violates at
        // c*, so the child keeps branching instead of being closed as rank-one.
        c.sol = node.sol;
      } else {
        consider_incumbent(c.bounds, c.sol, id);
      }
      if (c.sol.Y.size() == 0) {
        unresolved_ = std::min(unresolved_, c.value);
        continue;
      }
      Node kid;
      kid.id = id;
      kid.depth = node.depth + 1;
      kid.value = c.value;
      kid.bounds = DeltaBounds::diff(parent_ptr, c.bounds);
      kid.sol = std::move(c.sol);
      kids.push_back(std::move(kid));
    }
    // Lower value explored first; on ties the down child (pushed last) goes first.
    if (kids.size() == 2 && kids[1].value > kids[0].value) std::swap(kids[0], kids[1]);
    for (auto& k : kids) stack_.push_back(std::move(k));
  }
}

}  // namespace

SearchResult branch_and_cut(const LiftedModel& m, PrimalOracle& oracle, const SolverConfig& cfg,
                            std::ostream* events) {
  if (cfg.relaxation == Relaxation::sdp_rlt && !m.homogenizing) {
    throw PreconditionError("branch_and_cut: RLT cuts need a homogenizing model");
  }
  Search s(m, oracle, cfg, events);
  return s.run();
}

QcqpOracle::QcqpOracle(const ComplexQcqp& shifted, const LiftedModel& m) : p_(shifted), m_(m) {
  const int n = p_.n;
  local_.n = 2 * n;
  local_.lo = Vec(2 * n);
  local_.hi = Vec(2 * n);
  local_.lo << p_.lb.re, p_.lb.im;
  local_.hi << p_.ub.re, p_.ub.im;
  const auto& rq = m_.real_quadratics;
  local_.objective = RealQuadForm::from_dense(rq[0].D, rq[0].b, rq[0].c);
  for (size_t k = 1; k < rq.size(); ++k) local_.ineq.push_back(RealQuadForm::from_dense(rq[k].D, rq[k].b, rq[k].c));
}

std::optional<Incumbent> QcqpOracle::polish(const ComplexVector& x0, const std::string& source) {
  const int n = p_.n;
  Vec z0(2 * n);
  z0 << x0.re, x0.im;
  const LocalResult r = solve_local(local_, z0);
  ComplexVector x(r.z.head(n), r.z.tail(n));
  const Evaluation ev = evaluate(p_, x);
  if (ev.max_violation > 1e-6) return std::nullopt;
  Incumbent inc;
  inc.x = x;
  inc.objective = ev.objective;
  inc.max_violation = ev.max_violation;
  inc.source = source;
  return inc;
}

std::optional<Incumbent> QcqpOracle::propose(const BoundsState&, const RelaxationSolution& sol) {
  const int n = p_.n;
  std::vector<std::pair<ComplexVector, std::string>> starts;
  // Linear part of the lifted matrix.
  ComplexVector lin(n);
  for (int k = 0; k < n; ++k) lin.set(k, Complex(sol.Y.w(0, k + 1), -sol.Y.t(0, k + 1)));
  starts.emplace_back(lin, "linear");
  // Stitched principal eigenvectors, normalized by the homogenizing entry.
  const ComplexVector y = rank_one_complete(m_.cliques, clique_blocks(m_.cliques, sol.Y), m_.dim, true);
  if (std::abs(y[0]) > 1e-9) {
    ComplexVector r(n);
    for (int k = 0; k < n; ++k) r.set(k, y[k + 1] / y[0]);
    starts.emplace_back(r, "eigen");
  }
  std::optional<Incumbent> best;
  for (auto& [x, src] : starts) {
    for (int k = 0; k < n; ++k) {
      x.re(k) = std::clamp(x.re(k), p_.lb.re(k), p_.ub.re(k));
      x.im(k) = std::clamp(x.im(k), p_.lb.im(k), p_.ub.im(k));
    }
    auto inc = polish(x, src);
    if (inc && (!best || inc->objective < best->objective)) best = std::move(inc);
  }
  return best;
}

SearchResult solve_qcqp(const ComplexQcqp& p, const SolverConfig& cfg, std::ostream* events) {
  const ShiftedQcqp s = affine_shift_positive(p);
  const LiftedModel m = lift_qcqp(s.problem);
  QcqpOracle oracle(s.problem, m);
  SearchResult r = branch_and_cut(m, oracle, cfg, events);
  if (r.incumbent) {
    r.incumbent->x = s.to_original(r.incumbent->x);
    const Evaluation ev = evaluate(p, r.incumbent->x);
    r.incumbent->max_violation = ev.max_violation;
  }
  return r;
}

std::string report_json(const SearchResult& r) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j{{"status", to_string(r.status)},
         {"glb", num(r.glb)},
         {"gub", num(r.gub)},
         {"gap", num(r.gap)},
         {"root", num(r.root_value)},
         {"nodes", r.nodes},
         {"depth", r.max_depth},
         {"relaxations", r.relaxations},
         {"lbtime", r.lbtime},
         {"ubtime", r.ubtime},
         {"time", r.time},
         {"certified", r.certified},
         {"warnings", r.warnings}};
  if (!r.message.empty()) j["message"] = r.message;
  return j.dump(2);
}

}  // namespace sbc
