#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"
#include "sbc/acopf.hpp"
#include "sbc/batch.hpp"
#include "sbc/boxqp.hpp"
#include "sbc/cuts.hpp"
#include "sbc/tighten.hpp"

using namespace sbc;
using nlohmann::json;

namespace {

constexpr int kExitNotOptimal = 1;
constexpr int kExitError = 2;

/// Flag values shared by the solve subcommands; unset flags keep the instance defaults.
struct Flags {
  std::string relax, rule;
  double gap = 0.0, time = 0.0;
  int nodes = 0, depth = 0, threads = 0;
  unsigned seed = 0;
  CLI::Option *o_relax = nullptr, *o_rule = nullptr, *o_gap = nullptr, *o_time = nullptr, *o_nodes = nullptr,
              *o_depth = nullptr, *o_threads = nullptr, *o_seed = nullptr;

  void add(CLI::App* app) {
    o_relax = app->add_option("--relax", relax, "Relaxation")
                  ->check(CLI::IsMember({"sdp", "sdp+rlt", "sdp+cvi"}));
    o_rule = app->add_option("--rule", rule, "Branching rule")->check(CLI::IsMember({"mvsb", "mvwb", "rbeb"}));
    o_gap = app->add_option("--gap", gap, "Relative optimality gap limit")->check(CLI::NonNegativeNumber);
    o_nodes = app->add_option("--nodes", nodes, "Explored node limit")->check(CLI::PositiveNumber);
    o_time = app->add_option("--time", time, "Time limit in seconds")->check(CLI::PositiveNumber);
    o_depth = app->add_option("--depth", depth, "Maximum tree depth")->check(CLI::NonNegativeNumber);
    o_seed = app->add_option("--seed", seed, "Random seed");
    o_threads = app->add_option("--threads", threads, "Worker threads for child solves")->check(CLI::PositiveNumber);
  }

  [[nodiscard]] ConfigOverrides overrides() const {
    ConfigOverrides o;
    if (o_relax->count()) o.relaxation = parse_relaxation(relax);
    if (o_rule->count()) o.rule = parse_branch_rule(rule);
    if (o_gap->count()) o.gap = gap;
    if (o_nodes->count()) o.node_limit = nodes;
    if (o_time->count()) o.time_limit = time;
    if (o_depth->count()) o.max_depth = depth;
    if (o_seed->count()) o.seed = seed;
    if (o_threads->count()) o.threads = threads;
    return o;
  }
};

/// Output files shared by the solve subcommands.
struct Outputs {
  std::string events, solution;

  void add(CLI::App* app) {
    app->add_option("--events", events, "Write the node trace as newline-delimited JSON");
    app->add_option("--solution", solution, "Write the incumbent as JSON");
  }
};

std::unique_ptr<std::ofstream> open_out(const std::string& path) {
  if (path.empty()) return nullptr;
  auto f = std::make_unique<std::ofstream>(path);
  if (!*f) throw PreconditionError("cannot write " + path);
  return f;
}

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

int finish(const SearchResult& r, const std::string& solution_path, const json& solution) {
  std::cout << report_json(r) << "\n";
  if (!solution_path.empty()) {
    auto f = open_out(solution_path);
    *f << solution.dump(2) << "\n";
  }
  return r.status == SearchStatus::optimal ? 0 : kExitNotOptimal;
}

int solve_acopf_cmd(const std::string& path, const Flags& flags, const Outputs& outs, double angle) {
  const PowerCase pc = load_matpower_file(path);
  for (const auto& w : pc.warnings) std::cerr << "warning: " << w << "\n";
  SolverConfig cfg = default_config(InstanceKind::acopf);
  flags.overrides().apply(cfg);
  auto ev = open_out(outs.events);
  const SearchResult r = solve_acopf(pc, cfg, ev.get(), angle);
  json sol = json::object();
  if (r.incumbent) {
    const ComplexVector& v = r.incumbent->x;
    json buses = json::array();
    for (int k = 0; k < v.size(); ++k) {
      buses.push_back({{"bus", pc.buses[static_cast<size_t>(k)].id},
                       {"vm", std::abs(v[k])},
                       {"va_deg", std::arg(v[k]) * 180.0 / 3.141592653589793}});
    }
    const int ng = static_cast<int>(r.incumbent->extra.size() / 2);
    sol = {{"objective", r.incumbent->objective},
           {"max_violation", r.incumbent->max_violation},
           {"buses", buses},
           {"pg", vec_json(r.incumbent->extra.head(ng))},
           {"qg", vec_json(r.incumbent->extra.tail(ng))}};
  }
  return finish(r, outs.solution, sol);
}

int solve_generic_cmd(const std::string& path, InstanceKind kind, const Flags& flags, const Outputs& outs) {
  auto ev = open_out(outs.events);
  const BatchInstance inst{std::filesystem::path(path).stem().string(), kind, path};
  const SearchResult r = solve_instance(inst, flags.overrides(), ev.get());
  json sol = json::object();
  if (r.incumbent) {
    sol = {{"objective", r.incumbent->objective},
           {"max_violation", r.incumbent->max_violation},
           {"x_re", vec_json(r.incumbent->x.re)},
           {"x_im", vec_json(r.incumbent->x.im)}};
  }
  return finish(r, outs.solution, sol);
}

int batch_cmd(const std::string& path, const std::string& out_dir, int workers) {
  Manifest m = load_manifest(path);
  if (workers > 0) m.workers = workers;
  const BatchReport r = run_batch(m);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  *open_out((dir / "report.json").string()) << batch_report_json(r) << "\n";
  *open_out((dir / "runs.csv").string()) << runs_csv(r);
  *open_out((dir / "profiles.csv").string()) << profile_csv(r);
  bool all = true;
  for (const auto& run : r.runs) {
    all = all && run.solved();
    std::cout << run.instance << " " << run.config << " "
              << (run.ok ? to_string(run.result.status) : "error: " + run.error) << "\n";
  }
  for (const auto& s : r.summaries) {
    std::cout << s.config << ": solved " << s.solved << "/" << s.runs << ", mean time " << s.mean_time
              << " s, mean nodes " << s.mean_nodes << "\n";
  }
  return all ? 0 : kExitNotOptimal;
}

int export_sdpa_cmd(const std::string& path, const std::string& type, const std::string& relax,
                    const std::string& out, bool tighten) {
  const InstanceKind kind = type.empty() ? infer_instance_kind(path) : parse_instance_kind(type);
  const Relaxation variant = relax.empty() ? default_config(kind).relaxation : parse_relaxation(relax);
  LiftedModel m;
  if (kind == InstanceKind::acopf) {
    m = build_lacopf(load_matpower_file(path)).model;
  } else {
    const ComplexQcqp p = kind == InstanceKind::boxqp ? boxqp_to_model(load_boxqp_file(path)) : load_qcqp_file(path);
    m = lift_qcqp(affine_shift_positive(p).problem);
  }
  if (variant == Relaxation::sdp_rlt && !m.homogenizing) {
    throw PreconditionError("sdp+rlt needs a homogenizing model (not available for ACOPF)");
  }
  BoundsState b = m.root_bounds;
  if (tighten && tighten_bounds(m, b).infeasible) throw PreconditionError("root bounds are infeasible");
  const ConicProgram cp = build_csdp(m, b, generate_cuts(m, b, variant), make_var_map(m));
  if (out.empty()) {
    std::cout << to_sdpa(cp);
  } else {
    *open_out(out) << to_sdpa(cp);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial branch-and-cut for complex QCQP, ACOPF and BoxQP"};
  app.require_subcommand(1);

  std::string input;
  Flags f_acopf, f_boxqp, f_qcqp;
  Outputs outs;

  auto* acopf = app.add_subcommand("solve-acopf", "Solve a MATPOWER case");
  acopf->add_option("case", input, "MATPOWER .m file")->required();
  double angle = 30.0;
  acopf->add_option("--angle-default", angle, "Angle difference limit (degrees) for unlimited branches")
      ->check(CLI::Range(0.0, 89.999));
  f_acopf.add(acopf);
  outs.add(acopf);

  auto* boxqp = app.add_subcommand("solve-boxqp", "Solve a spar-format BoxQP");
  boxqp->add_option("file", input, "spar file")->required();
  f_boxqp.add(boxqp);
  outs.add(boxqp);

  auto* qcqp = app.add_subcommand("solve-qcqp", "Solve a JSON CQCQP instance");
  qcqp->add_option("file", input, "JSON instance")->required();
  f_qcqp.add(qcqp);
  outs.add(qcqp);

  auto* batch = app.add_subcommand("batch", "Run a manifest of instances and configurations");
  batch->add_option("manifest", input, "JSON manifest")->required();
  std::string out_dir = ".";
  int workers = 0;
  batch->add_option("--out", out_dir, "Directory for report.json, runs.csv and profiles.csv");
  batch->add_option("--workers", workers, "Concurrent instance runs (overrides the manifest)")
      ->check(CLI::PositiveNumber);

  auto* sdpa = app.add_subcommand("export-sdpa", "Write the root relaxation in SDPA sparse format");
  sdpa->add_option("instance", input, "Instance file (.m, .json or spar)")->required();
  std::string type, relax, out;
  bool no_tighten = false;
  sdpa->add_option("--type", type, "Instance type")->check(CLI::IsMember({"boxqp", "acopf", "qcqp"}));
  sdpa->add_option("--relax", relax, "Relaxation")->check(CLI::IsMember({"sdp", "sdp+rlt", "sdp+cvi"}));
  sdpa->add_option("-o,--output", out, "Output file (default stdout)");
  sdpa->add_flag("--no-tighten", no_tighten, "Skip root bound tightening");

  CLI11_PARSE(app, argc, argv);

  try {
    if (acopf->parsed()) return solve_acopf_cmd(input, f_acopf, outs, angle);
    if (boxqp->parsed()) return solve_generic_cmd(input, InstanceKind::boxqp, f_boxqp, outs);
    if (qcqp->parsed()) return solve_generic_cmd(input, InstanceKind::qcqp, f_qcqp, outs);
    if (batch->parsed()) return batch_cmd(input, out_dir, workers);
    if (sdpa->parsed()) return export_sdpa_cmd(input, type, relax, out, !no_tighten);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
