// Command line front end: solve, classify, sumrule.
//
// Exit codes: 0 success, 2 bad configuration or arguments, 3 numerical or
// I/O failure during the run.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <spuridium/spuridium.hpp>

namespace {

spuridium::RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw spuridium::ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw spuridium::ConfigError("config parse: " + std::string(ex.what()));
  }
  return spuridium::config_from_json(j);
}

spuridium::MapKind parse_map(const std::string& s) {
  if (s == "identity")
    return spuridium::MapKind::Identity;
  if (s == "rational")
    return spuridium::MapKind::Rational;
  throw spuridium::ConfigError("unknown map kind: " + s);
}

spuridium::SolverKind parse_solver(const std::string& s) {
  if (s == "dense")
    return spuridium::SolverKind::Dense;
  if (s == "lanczos")
    return spuridium::SolverKind::Lanczos;
  throw spuridium::ConfigError("unknown solver kind: " + s);
}

spuridium::StartKind parse_start(const std::string& s) {
  if (s == "ones")
    return spuridium::StartKind::Ones;
  if (s == "random")
    return spuridium::StartKind::Random;
  throw spuridium::ConfigError("unknown start kind: " + s);
}

spuridium::OutputFormat parse_format(const std::string& s) {
  if (s == "csv")
    return spuridium::OutputFormat::Csv;
  if (s == "json")
    return spuridium::OutputFormat::Json;
  throw spuridium::ConfigError("unknown output format: " + s);
}

// One bag of flag storage per run-style subcommand. Option pointers let the
// precedence rule work: defaults, then config file, then flags the user
// actually typed.
struct RunFlags {
  std::string config_path;
  std::string problem;
  double omega = 1.0;
  double z = 1.0;
  unsigned ell = 0;
  double soft_core = 0.0;
  double lambda = 4.0;
  double a = 1.0;
  double v0 = 5.0;
  double width = 2.0;
  int kappa = -1;
  double light_speed = 137.035999;
  std::vector<std::size_t> scan;
  std::size_t n_basis = 200;
  double box = 20.0;
  std::string map;
  double map_strength = 0.0;
  std::string solver;
  std::size_t max_iter = 100;
  std::string start;
  std::uint64_t seed = 1;
  double tol_bound = 1e-6;
  double plateau_factor = 2.0;
  std::size_t oversampling = 6;
  std::string out;
  std::string format;

  CLI::Option* o_problem = nullptr;
  CLI::Option* o_omega = nullptr;
  CLI::Option* o_z = nullptr;
  CLI::Option* o_ell = nullptr;
  CLI::Option* o_soft_core = nullptr;
  CLI::Option* o_lambda = nullptr;
  CLI::Option* o_a = nullptr;
  CLI::Option* o_v0 = nullptr;
  CLI::Option* o_width = nullptr;
  CLI::Option* o_kappa = nullptr;
  CLI::Option* o_light_speed = nullptr;
  CLI::Option* o_scan = nullptr;
  CLI::Option* o_n = nullptr;
  CLI::Option* o_box = nullptr;
  CLI::Option* o_map = nullptr;
  CLI::Option* o_map_strength = nullptr;
  CLI::Option* o_solver = nullptr;
  CLI::Option* o_max_iter = nullptr;
  CLI::Option* o_start = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_tol_bound = nullptr;
  CLI::Option* o_plateau_factor = nullptr;
  CLI::Option* o_oversampling = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_format = nullptr;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file; flags override its values");
  f.o_problem = cmd->add_option(
      "--problem", f.problem, "harmonic | hydrogen | poschl_teller | square_well | dirac_coulomb");
  f.o_omega = cmd->add_option("--omega", f.omega, "oscillator frequency");
  f.o_z = cmd->add_option("--z", f.z, "nuclear charge");
  f.o_ell = cmd->add_option("--ell", f.ell, "orbital angular momentum");
  f.o_soft_core = cmd->add_option("--soft-core", f.soft_core, "Coulomb soft-core radius");
  f.o_lambda = cmd->add_option("--lambda", f.lambda, "well depth parameter (lambda > 1)");
  f.o_a = cmd->add_option("--a", f.a, "inverse well width");
  f.o_v0 = cmd->add_option("--v0", f.v0, "square well depth");
  f.o_width = cmd->add_option("--width", f.width, "square well width");
  f.o_kappa = cmd->add_option("--kappa", f.kappa, "relativistic angular quantum number");
  f.o_light_speed = cmd->add_option("--light-speed", f.light_speed, "speed of light (atomic units)");
  f.o_scan = cmd->add_option("--scan", f.scan, "basis sizes, strictly increasing")->delimiter(',');
  f.o_n = cmd->add_option("--n", f.n_basis, "single basis size (one-point scan)");
  f.o_n->excludes(f.o_scan);
  f.o_scan->excludes(f.o_n);
  f.o_box = cmd->add_option("--box", f.box, "box length");
  f.o_map = cmd->add_option("--map", f.map, "identity | rational");
  f.o_map_strength = cmd->add_option("--map-strength", f.map_strength, "rational map parameter");
  f.o_solver = cmd->add_option("--solver", f.solver, "dense | lanczos");
  f.o_max_iter = cmd->add_option("--max-iter", f.max_iter, "Lanczos step budget");
  f.o_start = cmd->add_option("--start", f.start, "ones | random");
  f.o_seed = cmd->add_option("--seed", f.seed, "seed for the random start vector");
  f.o_tol_bound = cmd->add_option("--tol-bound", f.tol_bound, "delta_rel threshold for a bound verdict");
  f.o_plateau_factor =
      cmd->add_option("--plateau-factor", f.plateau_factor, "spread factor that still counts as flat");
  f.o_oversampling =
      cmd->add_option("--oversampling", f.oversampling, "quadrature nodes per basis function");
  f.o_out = cmd->add_option("--out", f.out, "output path (default: stdout)");
  f.o_format = cmd->add_option("--format", f.format, "csv | json");
}

spuridium::RunConfig build_config(const RunFlags& f) {
  spuridium::RunConfig cfg;
  if (!f.config_path.empty())
    cfg = load_config_file(f.config_path);
  if (f.o_problem->count())
    cfg.problem = spuridium::detail::problem_from_string(f.problem);
  if (f.o_omega->count())
    cfg.omega = f.omega;
  if (f.o_z->count())
    cfg.z = f.z;
  if (f.o_ell->count())
    cfg.ell = f.ell;
  if (f.o_soft_core->count())
    cfg.soft_core = f.soft_core;
  if (f.o_lambda->count())
    cfg.lambda = f.lambda;
  if (f.o_a->count())
    cfg.a = f.a;
  if (f.o_v0->count())
    cfg.v0 = f.v0;
  if (f.o_width->count())
    cfg.width = f.width;
  if (f.o_kappa->count())
    cfg.kappa = f.kappa;
  if (f.o_light_speed->count())
    cfg.light_speed = f.light_speed;
  if (f.o_scan->count())
    cfg.scan = f.scan;
  if (f.o_n->count())
    cfg.scan = {f.n_basis};
  if (f.o_box->count())
    cfg.box_length = f.box;
  if (f.o_map->count())
    cfg.map = parse_map(f.map);
  if (f.o_map_strength->count())
    cfg.map_strength = f.map_strength;
  if (f.o_solver->count())
    cfg.solver = parse_solver(f.solver);
  if (f.o_max_iter->count())
    cfg.max_iter = f.max_iter;
  if (f.o_start->count())
    cfg.start = parse_start(f.start);
  if (f.o_seed->count())
    cfg.seed = f.seed;
  if (f.o_tol_bound->count())
    cfg.tol_bound = f.tol_bound;
  if (f.o_plateau_factor->count())
    cfg.plateau_factor = f.plateau_factor;
  if (f.o_oversampling->count())
    cfg.oversampling = f.oversampling;
  if (f.o_out->count())
    cfg.out_path = f.out;
  if (f.o_format->count())
    cfg.format = parse_format(f.format);
  return cfg;
}

struct ClassifyFlags {
  std::string report_path;
  double tol_bound = 1e-6;
  double plateau_factor = 2.0;
  std::string out;
  std::string format;
  CLI::Option* o_tol_bound = nullptr;
  CLI::Option* o_plateau_factor = nullptr;
  CLI::Option* o_format = nullptr;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-basis spectral solver with a squared-operator spurious-state diagnostic"};
  app.require_subcommand(1);

  RunFlags solve_flags;
  CLI::App* solve =
      app.add_subcommand("solve", "scan basis sizes or Lanczos steps, track states, diagnose");
  add_run_flags(solve, solve_flags);

  ClassifyFlags cf;
  CLI::App* classify =
      app.add_subcommand("classify", "recompute verdicts for an existing report file");
  classify->add_option("report", cf.report_path, "report file (csv or json)")->required();
  cf.o_tol_bound =
      classify->add_option("--tol-bound", cf.tol_bound, "delta_rel threshold for a bound verdict");
  cf.o_plateau_factor = classify->add_option("--plateau-factor", cf.plateau_factor,
                                             "spread factor that still counts as flat");
  classify->add_option("--out", cf.out, "output path (default: stdout)");
  cf.o_format = classify->add_option("--format", cf.format, "csv | json");

  RunFlags sum_flags;
  CLI::App* sumrule =
      app.add_subcommand("sumrule", "dipole sum rule saturation as a basis adequacy check");
  add_run_flags(sumrule, sum_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (solve->parsed())
      return spuridium::cmd_solve(build_config(solve_flags), std::cout, std::cerr);
    if (classify->parsed()) {
      spuridium::ClassifyOptions opt;
      if (cf.o_tol_bound->count())
        opt.tol_bound = cf.tol_bound;
      if (cf.o_plateau_factor->count())
        opt.plateau_factor = cf.plateau_factor;
      opt.out_path = cf.out;
      if (cf.o_format->count())
        opt.format = parse_format(cf.format);
      return spuridium::cmd_classify(cf.report_path, opt, std::cout, std::cerr);
    }
    if (sumrule->parsed())
      return spuridium::cmd_sumrule(build_config(sum_flags), std::cout, std::cerr);
  } catch (const spuridium::ConfigError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  }
  return 2;
}
