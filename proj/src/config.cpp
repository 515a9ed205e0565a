#include "edg/config.hpp"

#include "edg/assembly.hpp"
#include "edg/errors.hpp"
#include "edg/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

namespace edg {
namespace {

CLI::Option* configure_app(CLI::App& app, RunConfig& cfg, double& tau2_tmp) {
  app.footer("exit status:\n"
             "  0  success\n"
             "  1  other failure\n"
             "  2  usage error\n"
             "  3  stabilization condition violated\n"
             "  4  factorization or condensation failure\n"
             "  5  I/O error");
  app.allow_config_extras(false);
  app.set_config("--config", "", "key=value file; flags override its values");

  app.add_option("--problem", cfg.problem, "built-in problem name")
      ->capture_default_str()
      ->check(CLI::IsMember(problem_names()));
  app.add_option("--k", cfg.k, "polynomial degree parameter (flux degree)")
      ->capture_default_str()
      ->check(CLI::Range(0, 9));
  app.add_option("--approach", cfg.approach, "solution path")
      ->capture_default_str()
      ->check(CLI::IsMember({"od", "do", "both"}));
  app.add_option("--levels", cfg.levels,
                 "comma-separated mesh subdivisions, ascending")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  app.add_option("--gamma", cfg.gamma, "control regularization weight")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--tau1", cfg.tau1, "state stabilization constant")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  CLI::Option* t2 = app.add_option(
      "--tau2-override", tau2_tmp,
      "force a constant adjoint stabilization instead of tau1 - beta.n");
  app.add_option("--output", cfg.output, "report file (default: stdout)");
  app.add_option("--format", cfg.format, "report format")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--dump-matrices", cfg.dump_matrices,
                 "directory for per-level block dumps");
  app.add_option("--dump-mesh", cfg.dump_mesh,
                 "directory for per-level mesh dumps");
  return t2;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.levels.empty())
    throw UsageError("levels must be nonempty");
  for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
    if (cfg.levels[i] < 1)
      throw UsageError("levels must be >= 1");
    if (i > 0 && cfg.levels[i] <= cfg.levels[i - 1])
      throw UsageError("levels must be strictly ascending");
  }
  if (!(cfg.gamma > 0.0))
    throw UsageError("gamma must be positive");
  if (!(cfg.tau1 > 0.0))
    throw UsageError("tau1 must be positive");
}

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream f(path);
  if (!f.is_open())
    throw IoError("cannot open file for writing: " + path);
  return f;
}

void dump_vector(const Vec& v, std::ostream& os) {
  os.precision(17);
  for (int i = 0; i < v.size(); ++i)
    os << i << ' ' << v(i) << '\n';
}

void write_dumps(const RunConfig& cfg) {
  if (cfg.dump_mesh.empty() && cfg.dump_matrices.empty())
    return;

  ProblemSpec spec = make_problem(cfg.problem);
  spec.gamma = cfg.gamma;
  spec.tau1 = cfg.tau1;
  const ProblemData data = derive_data(spec);
  EdgParams params = params_from(spec);
  params.tau2_override = cfg.tau2_override;

  for (int n : cfg.levels) {
    const Mesh mesh = build_structured(n);
    const std::string suffix = "_n" + std::to_string(n) + ".txt";
    if (!cfg.dump_mesh.empty()) {
      std::ofstream f = open_or_throw(cfg.dump_mesh + "/mesh" + suffix);
      mesh.dump(f);
    }
    if (!cfg.dump_matrices.empty()) {
      const SpaceSet sp = build_trace_dofmap(mesh, cfg.k);
      const BlockSystem bs = assemble_blocks(mesh, sp, params, data);
      const std::pair<const char*, const SpMat*> mats[] = {
          {"A1", &bs.A1}, {"A2", &bs.A2}, {"A3", &bs.A3}, {"A4", &bs.A4},
          {"A5", &bs.A5}, {"A6", &bs.A6}, {"A7", &bs.A7}, {"A8", &bs.A8}};
      for (const auto& [name, m] : mats) {
        std::ofstream f = open_or_throw(cfg.dump_matrices + "/" + name + suffix);
        dump_matrix(*m, f);
      }
      const std::pair<const char*, const Vec*> vecs[] = {
          {"b1", &bs.b1}, {"b2", &bs.b2}, {"b3", &bs.b3}, {"b4", &bs.b4},
          {"b_trace", &bs.b_trace}};
      for (const auto& [name, v] : vecs) {
        std::ofstream f = open_or_throw(cfg.dump_matrices + "/" + name + suffix);
        dump_vector(*v, f);
      }
    }
  }
}

void write_report(const ConvergenceReport& rep, const std::string& format,
                  std::ostream& os) {
  if (format == "json")
    write_json(rep, os);
  else
    write_csv(rep, os);
}

} // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  double tau2_tmp = 0.0;
  CLI::App app{"EDG convection-diffusion optimal control solver"};
  CLI::Option* t2 = configure_app(app, cfg, tau2_tmp);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    throw UsageError(std::string("argument parsing failed: ") + e.what());
  }
  if (t2->count() > 0)
    cfg.tau2_override = tau2_tmp;
  validate_config(cfg);
  return cfg;
}

int run_main(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate_config(config);
    write_dumps(config);
    const ConvergenceReport rep = run_convergence(config);
    print_table(rep, out);
    if (config.output.empty()) {
      out << '\n';
      write_report(rep, config.format, out);
    } else {
      std::ofstream f = open_or_throw(config.output);
      write_report(rep, config.format, f);
      if (!f.good())
        throw IoError("failed while writing: " + config.output);
    }
    return 0;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidProblemError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const UnsupportedDegreeError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const StabilizationError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const FactorizationError& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  } catch (const CondensationError& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 5;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cli_main(int argc, const char* const* argv) {
  RunConfig cfg;
  double tau2_tmp = 0.0;
  CLI::App app{"EDG convection-diffusion optimal control solver"};
  CLI::Option* t2 = configure_app(app, cfg, tau2_tmp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (t2->count() > 0)
    cfg.tau2_override = tau2_tmp;
  try {
    validate_config(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return run_main(cfg, std::cout, std::cerr);
}

} // namespace edg
