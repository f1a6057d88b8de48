#include "sbc/batch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "sbc/acopf.hpp"
#include "sbc/boxqp.hpp"

namespace sbc {

using json = nlohmann::json;

void ConfigOverrides::apply(SolverConfig& cfg) const {
  if (relaxation) cfg.relaxation = *relaxation;
  if (rule) cfg.rule = *rule;
  if (gap) cfg.gap = *gap;
  if (node_limit) cfg.node_limit = *node_limit;
  if (time_limit) cfg.time_limit = *time_limit;
  if (max_depth) cfg.max_depth = *max_depth;
  if (seed) cfg.seed = *seed;
  if (threads) cfg.threads = *threads;
}

std::string to_string(InstanceKind k) {
  switch (k) {
    case InstanceKind::boxqp: return "boxqp";
    case InstanceKind::acopf: return "acopf";
    case InstanceKind::qcqp: return "qcqp";
  }
  return "?";
}

InstanceKind parse_instance_kind(const std::string& s) {
  if (s == "boxqp") return InstanceKind::boxqp;
  if (s == "acopf") return InstanceKind::acopf;
  if (s == "qcqp") return InstanceKind::qcqp;
  throw PreconditionError("unknown instance type '" + s + "' (expected boxqp, acopf or qcqp)");
}

InstanceKind infer_instance_kind(const std::string& path) {
  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".m") return InstanceKind::acopf;
  if (ext == ".json") return InstanceKind::qcqp;
  return InstanceKind::boxqp;
}

namespace {

ConfigOverrides read_overrides(const json& j) {
  static const char* known[] = {"name", "relax", "rule", "gap", "nodes", "time", "depth", "seed", "threads"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw PreconditionError("manifest: unknown config key '" + key + "'");
    }
  }
  ConfigOverrides o;
  if (j.contains("relax")) o.relaxation = parse_relaxation(j["relax"].get<std::string>());
  if (j.contains("rule")) o.rule = parse_branch_rule(j["rule"].get<std::string>());
  if (j.contains("gap")) o.gap = j["gap"].get<double>();
  if (j.contains("nodes")) o.node_limit = j["nodes"].get<int>();
  if (j.contains("time")) o.time_limit = j["time"].get<double>();
  if (j.contains("depth")) o.max_depth = j["depth"].get<int>();
  if (j.contains("seed")) o.seed = j["seed"].get<unsigned>();
  if (j.contains("threads")) o.threads = j["threads"].get<int>();
  return o;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string fmt(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Manifest parse_manifest(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw PreconditionError(std::string("manifest: ") + e.what());
  }
  Manifest m;
  try {
    if (!j.contains("instances") || !j["instances"].is_array()) {
      throw PreconditionError("manifest: missing instances array");
    }
    const std::filesystem::path base(base_dir);
    for (const auto& e : j["instances"]) {
      BatchInstance inst;
      std::string path;
      if (e.is_string()) {
        path = e.get<std::string>();
      } else {
        path = e.at("path").get<std::string>();
        if (e.contains("name")) inst.name = e["name"].get<std::string>();
        if (e.contains("type")) inst.kind = parse_instance_kind(e["type"].get<std::string>());
      }
      if (!e.is_object() || !e.contains("type")) inst.kind = infer_instance_kind(path);
      const std::filesystem::path p(path);
      inst.path = p.is_absolute() ? path : (base / p).lexically_normal().string();
      if (inst.name.empty()) inst.name = p.stem().string();
      m.instances.push_back(std::move(inst));
    }
    if (j.contains("configs")) {
      for (const auto& c : j["configs"]) {
        BatchConfig bc;
        bc.name = c.at("name").get<std::string>();
        bc.overrides = read_overrides(c);
        m.configs.push_back(std::move(bc));
      }
    }
    if (m.configs.empty()) m.configs.push_back({"default", {}});
    if (j.contains("workers")) m.workers = std::max(1, j["workers"].get<int>());
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("manifest: ") + e.what());
  }
  for (size_t a = 0; a < m.configs.size(); ++a) {
    for (size_t b = a + 1; b < m.configs.size(); ++b) {
      if (m.configs[a].name == m.configs[b].name) {
        throw PreconditionError("manifest: duplicate config name '" + m.configs[a].name + "'");
      }
    }
  }
  return m;
}

Manifest load_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw PreconditionError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_manifest(ss.str(), std::filesystem::path(path).parent_path().string());
}

SolverConfig default_config(InstanceKind k) {
  return k == InstanceKind::boxqp ? boxqp_default_config() : SolverConfig{};
}

SearchResult solve_instance(const BatchInstance& inst, const ConfigOverrides& o, std::ostream* events) {
  SolverConfig cfg = default_config(inst.kind);
  o.apply(cfg);
  switch (inst.kind) {
    case InstanceKind::boxqp: return solve_boxqp(load_boxqp_file(inst.path), cfg, events);
    case InstanceKind::acopf: return solve_acopf(load_matpower_file(inst.path), cfg, events);
    case InstanceKind::qcqp: return solve_qcqp(load_qcqp_file(inst.path), cfg, events);
  }
  throw PreconditionError("solve_instance: unknown kind");
}

double ProfileCurve::at(double x) const {
  double v = 0.0;
  for (const auto& p : points) {
    if (p.log2_ratio <= x) v = p.fraction;
  }
  return v;
}

std::vector<ProfileCurve> performance_profile(const std::vector<std::string>& configs,
                                              const std::vector<std::vector<std::optional<double>>>& metric,
                                              double floor) {
  const size_t nc = configs.size();
  const size_t ni = metric.size();
  std::vector<std::vector<double>> ratios(nc);
  for (const auto& row : metric) {
    if (row.size() != nc) throw PreconditionError("performance_profile: row size differs from config count");
    double best = kInf;
    for (const auto& v : row) {
      if (v) best = std::min(best, std::max(*v, floor));
    }
    for (size_t c = 0; c < nc; ++c) {
      if (row[c]) ratios[c].push_back(std::log2(std::max(*row[c], floor) / best));
    }
  }
  std::vector<ProfileCurve> out;
  for (size_t c = 0; c < nc; ++c) {
    ProfileCurve curve;
    curve.config = configs[c];
    if (ni > 0) {
      auto& r = ratios[c];
      std::sort(r.begin(), r.end());
      const double denom = static_cast<double>(ni);
      size_t k = 0;
      while (k < r.size() && r[k] <= 0.0) ++k;
      curve.points.push_back({0.0, static_cast<double>(k) / denom});
      while (k < r.size()) {
        const double x = r[k];
        while (k < r.size() && r[k] == x) ++k;
        curve.points.push_back({x, static_cast<double>(k) / denom});
      }
    }
    out.push_back(std::move(curve));
  }
  return out;
}

BatchReport summarize(const std::vector<std::string>& instances, const std::vector<std::string>& configs,
                      std::vector<BatchRun> runs) {
  const size_t ni = instances.size(), nc = configs.size();
  if (runs.size() != ni * nc) throw PreconditionError("summarize: run count differs from instances x configs");
  BatchReport r;
  r.instances = instances;
  r.configs = configs;
  r.runs = std::move(runs);
  std::vector<std::vector<std::optional<double>>> times(ni, std::vector<std::optional<double>>(nc));
  auto nodes = times;
  for (size_t c = 0; c < nc; ++c) {
    ConfigSummary s;
    s.config = configs[c];
    for (size_t i = 0; i < ni; ++i) {
      const BatchRun& run = r.runs[i * nc + c];
      ++s.runs;
      if (!run.solved()) continue;
      ++s.solved;
      s.mean_time += run.result.time;
      s.mean_nodes += run.result.nodes;
      s.mean_depth += run.result.max_depth;
      s.mean_lbtime += run.result.lbtime;
      s.mean_ubtime += run.result.ubtime;
      times[i][c] = run.result.time;
      nodes[i][c] = run.result.nodes;
    }
    for (double* v : {&s.mean_time, &s.mean_nodes, &s.mean_depth, &s.mean_lbtime, &s.mean_ubtime}) {
      *v = s.solved > 0 ? *v / s.solved : nan();
    }
    r.summaries.push_back(s);
  }
  r.time_profile = performance_profile(configs, times, 1e-6);
  r.node_profile = performance_profile(configs, nodes, 1.0);
  return r;
}

BatchReport run_batch(const Manifest& m) {
  std::vector<std::string> instances, configs;
  for (const auto& i : m.instances) instances.push_back(i.name);
  for (const auto& c : m.configs) configs.push_back(c.name);
  const size_t nc = configs.size();
  std::vector<BatchRun> runs(instances.size() * nc);
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t k = next++; k < runs.size(); k = next++) {
      const BatchInstance& inst = m.instances[k / nc];
      const BatchConfig& bc = m.configs[k % nc];
      BatchRun& run = runs[k];
      run.instance = inst.name;
      run.config = bc.name;
      try {
        run.result = solve_instance(inst, bc.overrides);
        run.ok = true;
      } catch (const std::exception& e) {
        run.ok = false;
        run.error = e.what();
      }
    }
  };
  const int nw = std::max(1, std::min<int>(m.workers, static_cast<int>(runs.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < nw; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return summarize(instances, configs, std::move(runs));
}

std::string batch_report_json(const BatchReport& r) {
  json runs = json::array();
  for (const auto& run : r.runs) {
    json j{{"instance", run.instance}, {"config", run.config}, {"ok", run.ok}};
    if (run.ok) {
      j["report"] = json::parse(report_json(run.result));
    } else {
      j["error"] = run.error;
    }
    runs.push_back(j);
  }
  json summaries = json::array();
  for (const auto& s : r.summaries) {
    summaries.push_back({{"config", s.config},
                         {"runs", s.runs},
                         {"solved", s.solved},
                         {"mean_time", num(s.mean_time)},
                         {"mean_nodes", num(s.mean_nodes)},
                         {"mean_depth", num(s.mean_depth)},
                         {"mean_lbtime", num(s.mean_lbtime)},
                         {"mean_ubtime", num(s.mean_ubtime)}});
  }
  auto curves = [](const std::vector<ProfileCurve>& cs) {
    json out = json::object();
    for (const auto& c : cs) {
      json pts = json::array();
      for (const auto& p : c.points) pts.push_back({p.log2_ratio, p.fraction});
      out[c.config] = pts;
    }
    return out;
  };
  const json j{{"instances", r.instances},
               {"configs", r.configs},
               {"runs", runs},
               {"summaries", summaries},
               {"profiles", {{"time", curves(r.time_profile)}, {"nodes", curves(r.node_profile)}}}};
  return j.dump(2);
}

std::string profile_csv(const BatchReport& r) {
  std::ostringstream out;
  out << "metric,config,log2_ratio,fraction\n";
  auto emit = [&](const char* metric, const std::vector<ProfileCurve>& cs) {
    for (const auto& c : cs) {
      for (const auto& p : c.points) out << metric << ',' << c.config << ',' << fmt(p.log2_ratio) << ',' << fmt(p.fraction) << '\n';
    }
  };
  emit("time", r.time_profile);
  emit("nodes", r.node_profile);
  return out.str();
}

std::string runs_csv(const BatchReport& r) {
  std::ostringstream out;
  out << "instance,config,status,glb,gub,gap,nodes,depth,lbtime,ubtime,time,error\n";
  for (const auto& run : r.runs) {
    out << run.instance << ',' << run.config << ',';
    if (run.ok) {
      const SearchResult& s = run.result;
      out << to_string(s.status) << ',' << fmt(s.glb) << ',' << fmt(s.gub) << ',' << fmt(s.gap) << ',' << s.nodes << ','
          << s.max_depth << ',' << fmt(s.lbtime) << ',' << fmt(s.ubtime) << ',' << fmt(s.time) << ",\n";
    } else {
      std::string msg = run.error;
      std::replace(msg.begin(), msg.end(), '"', '\'');
      out << "error,,,,,,,,,\"" << msg << "\"\n";
    }
  }
  return out.str();
}

}  // namespace sbc
