// Command-line front end: evaluate the memory functional, classify kernels,
// check sensitivity axioms and run the verification suite.
//
// Exit status: 0 success, 1 verification failures, 2 config or parse error,
// 3 numerical failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "memfun/config.hpp"
#include "memfun/csv.hpp"
#include "memfun/functional.hpp"
#include "memfun/verify.hpp"

namespace fs = std::filesystem;
using memfun::json;

namespace {

enum Exit { ok = 0, verification_failed = 1, config_error = 2, numerical_error = 3 };

struct CommonOptions {
  std::string config;
  std::uint64_t seed = 42;
  std::string out = ".";
  std::optional<std::size_t> grid;
  std::optional<double> tol;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool config_required) {
  auto* config = cmd->add_option("--config", opts.config, "JSON configuration file");
  if (config_required) config->required();
  cmd->add_option("--seed", opts.seed, "Seed for random probes and trajectories")->capture_default_str();
  cmd->add_option("--out", opts.out, "Output directory")->capture_default_str();
  cmd->add_option("--grid", opts.grid, "Override the grid size N (odd, >= 3)");
  cmd->add_option("--tol", opts.tol, "Override the quadrature tolerance");
}

json load_config(const CommonOptions& opts) {
  if (opts.config.empty()) return json::object();
  return memfun::load_json(opts.config);
}

fs::path config_dir(const CommonOptions& opts) {
  return opts.config.empty() ? fs::path{} : fs::absolute(opts.config).parent_path();
}

fs::path output_path(const CommonOptions& opts, const std::string& name) {
  fs::create_directories(opts.out);
  return fs::path(opts.out) / name;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw memfun::ConfigError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

const json& section(const json& config, const char* key) {
  if (!config.contains(key)) throw memfun::ConfigError(std::string("config: missing '") + key + "'");
  return config.at(key);
}

json admissibility_json(const memfun::AdmissibilityReport& r) {
  json failures = json::array();
  for (const auto& f : r.failures) failures.push_back({{"condition", memfun::to_string(f.condition)}, {"message", f.message}});
  const auto& m = r.measurements;
  return {{"class_math", r.class_math},
          {"class_regular", r.class_regular},
          {"class_generalized", r.class_generalized},
          {"lipschitz_empirical", r.lipschitz_empirical},
          {"measurements",
           {{"integral", m.integral},
            {"min_value", m.min_value},
            {"max_value", m.max_value},
            {"lipschitz_estimate", m.lipschitz_estimate},
            {"total_variation_estimate", m.total_variation_estimate},
            {"abs_integral", m.abs_integral}}},
          {"failures", failures}};
}

int cmd_eval(const CommonOptions& opts) {
  const json config = load_config(opts);
  const auto run = memfun::parse_run_config(config, config_dir(opts), opts.grid, opts.tol);
  section(config, "kernel");
  section(config, "sensitivity");
  section(config, "trajectory");
  const auto kernel = run.make_kernel();
  const auto sensitivity = run.make_sensitivity();
  const auto f = run.make_trajectory();

  memfun::FunctionalOptions fopts;
  fopts.quadrature.rel_tol = run.grid.tolerance;
  fopts.induce.quadrature.rel_tol = run.grid.tolerance;
  const memfun::MemoryFunctional functional(kernel, sensitivity, fopts);
  const auto rep = functional.compute_S(f);

  json breakpoints = json::array();
  for (const auto& b : rep.breakpoints) breakpoints.push_back({{"t", b.t}, {"M_left", b.left}, {"M_right", b.right}});
  json report = {{"kernel", kernel.name()},
                 {"sensitivity", sensitivity.name()},
                 {"horizon", rep.horizon},
                 {"grid", rep.nodes.size()},
                 {"S_value", rep.S_value},
                 {"argmax_t", rep.argmax_t},
                 {"argmax_interior", rep.argmax_interior},
                 {"sup_norm_f", rep.sup_norm_f},
                 {"sup_norm_argmax", rep.sup_norm_argmax},
                 {"lambda_inf", rep.lambda_inf},
                 {"kappa_inf", rep.kappa_inf},
                 {"lower_bound", rep.lower_bound},
                 {"upper_bound", rep.upper_bound},
                 {"member", rep.member},
                 {"quadrature_tolerance", rep.quadrature_tolerance},
                 {"max_error_estimate", rep.max_error_estimate},
                 {"fast_path", rep.fast_path},
                 {"operator_mode", rep.operator_mode},
                 {"jump_convention", rep.jump_convention},
                 {"breakpoints", breakpoints},
                 {"nodes", rep.nodes},
                 {"J_values", rep.J_values},
                 {"M_values", rep.M_values}};
  write_json(output_path(opts, "report.json"), report);

  std::ofstream plot(output_path(opts, "plot.csv"));
  plot << "t,abs_f,J,M\n";
  for (std::size_t i = 0; i < rep.nodes.size(); ++i) {
    plot << memfun::format_double(rep.nodes[i]) << ',' << memfun::format_double(std::abs(f(rep.nodes[i]))) << ','
         << memfun::format_double(rep.J_values[i]) << ',' << memfun::format_double(rep.M_values[i]) << '\n';
  }

  std::cout << "S = " << memfun::format_double(rep.S_value) << '\n'
            << "sup_norm_f = " << memfun::format_double(rep.sup_norm_f) << '\n'
            << "upper_bound = " << memfun::format_double(rep.upper_bound) << '\n'
            << "argmax_t = " << memfun::format_double(rep.argmax_t) << (rep.argmax_interior ? " (interior)" : "")
            << '\n';
  if (rep.operator_mode) std::cout << "note: operator-sensitivity mode (beta0 > 0)\n";
  return ok;
}

int cmd_classify(const CommonOptions& opts) {
  const json config = load_config(opts);
  const auto run = memfun::parse_run_config(config, config_dir(opts), opts.grid, opts.tol);
  const auto kernel = memfun::parse_kernel(section(config, "kernel"), run.domain(), run.base);
  memfun::ClassifyTolerances tol;
  tol.quadrature.rel_tol = run.grid.tolerance;
  const auto report = memfun::classify(kernel, tol);
  json out = admissibility_json(report);
  out["kernel"] = kernel.name();
  write_json(output_path(opts, "classification.json"), out);

  std::cout << "kernel " << kernel.name() << '\n'
            << "math: " << std::boolalpha << report.class_math << '\n'
            << "regular: " << report.class_regular << '\n'
            << "generalized: " << report.class_generalized << '\n';
  for (const auto& f : report.failures) std::cout << "failed " << memfun::to_string(f.condition) << ": " << f.message << '\n';
  return ok;
}

int cmd_verify_sensitivity(const CommonOptions& opts) {
  const json config = load_config(opts);
  const auto run = memfun::parse_run_config(config, config_dir(opts), opts.grid, opts.tol);
  const auto model = memfun::parse_sensitivity(section(config, "sensitivity"), run.domain(), run.base);
  memfun::ProbePlan plan;
  plan.seed = opts.seed;
  const auto report = memfun::verify_axioms(run.domain(), model, plan);

  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"axiom", c.axiom},
                      {"passed", c.passed},
                      {"trials", c.trials},
                      {"worst_margin", std::isfinite(c.worst_margin) ? json(c.worst_margin) : json(nullptr)},
                      {"witness", c.witness},
                      {"note", c.note}});
    std::cout << c.axiom << ' ' << (c.passed ? "pass" : "FAIL");
    if (!c.witness.empty()) std::cout << " (" << c.witness << ')';
    std::cout << '\n';
  }
  json out = {{"sensitivity", model.name()},
              {"seed", opts.seed},
              {"state_range", {report.state_lo, report.state_hi}},
              {"declared_lipschitz", model.lipschitz()},
              {"operator_mode", model.operator_mode()},
              {"checks", checks},
              {"passed", report.all_passed()}};
  if (model.is_historical()) {
    out["operator_lipschitz"] = memfun::lipschitz_constant(model);
    std::cout << "operator L_Lambda = " << memfun::format_double(memfun::lipschitz_constant(model)) << '\n';
  }
  write_json(output_path(opts, "axioms.json"), out);
  return report.all_passed() ? ok : verification_failed;
}

int cmd_verify(const CommonOptions& opts) {
  const auto config = memfun::parse_suite_config(load_config(opts), config_dir(opts), opts.grid, opts.tol);
  const auto report = memfun::run_suite(config, opts.seed);
  write_json(output_path(opts, "verification.json"), memfun::to_json(report));
  for (const auto& e : report.entries) {
    std::cout << (e.failures == 0 ? "pass " : "FAIL ") << e.theorem_id << "  trials=" << e.trials
              << " failures=" << e.failures << '\n';
  }
  std::cout << (report.passed() ? "all checks passed" : "verification failures present") << '\n';
  return report.passed() ? ok : verification_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive memory functional toolkit"};
  app.require_subcommand(1);
  CommonOptions eval_opts, classify_opts, sensitivity_opts, verify_opts;
  auto* eval = app.add_subcommand("eval", "Compute J_f, M_f and S(f) for a configured trajectory");
  add_common(eval, eval_opts, true);
  auto* classify = app.add_subcommand("classify-kernel", "Classify a kernel into the admissibility classes");
  add_common(classify, classify_opts, true);
  auto* sensitivity = app.add_subcommand("verify-sensitivity", "Probe a sensitivity model against its axioms");
  add_common(sensitivity, sensitivity_opts, true);
  auto* verify = app.add_subcommand("verify", "Run the randomized inequality suite");
  add_common(verify, verify_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ok : config_error;
  }

  try {
    if (*eval) return cmd_eval(eval_opts);
    if (*classify) return cmd_classify(classify_opts);
    if (*sensitivity) return cmd_verify_sensitivity(sensitivity_opts);
    return cmd_verify(verify_opts);
  } catch (const memfun::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const memfun::InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const memfun::UnsupportedKernelClass& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return numerical_error;
  }
}
