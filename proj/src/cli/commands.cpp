#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "memkit/mittag_leffler.hpp"
#include "memkit/resolvent.hpp"
#include "problem.hpp"
#include "report.hpp"

namespace memkit::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Flat key = value files (INI/TOML style) or a flat JSON object.
class FileConfig : public CLI::ConfigBase {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::stringstream buffer;
    buffer << input.rdbuf();
    const std::string text = buffer.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text[first] != '{') {
      std::istringstream rest(text);
      return CLI::ConfigBase::from_config(rest);
    }
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError("config", std::string("invalid JSON config: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : doc.items()) {
      CLI::ConfigItem item;
      item.name = key;
      auto as_text = [](const nlohmann::json& v) {
        return v.is_string() ? v.get<std::string>() : v.dump();
      };
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(as_text(v));
      } else {
        item.inputs.push_back(as_text(value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }
};

// Raw option values shared by the solver subcommands.
struct ProblemFlags {
  std::string kernel = "exponential";
  double rho = 1.5;
  double decay = 2.0;
  std::size_t N = 100;
  double T = 1.0;
  std::size_t M = 128;
  std::string f = "sin";
  double f_const = 0.0;
  std::string u0 = "poly4x1mx";
  std::size_t u0_mode = 1;
  std::vector<double> u0_coeffs;
  double fp_tol = 1e-12;
  std::size_t fp_max_iters = 50;
  std::string scheme = "trapezoidal";
};

void add_config(CLI::App* app, std::string& config_path) {
  app->add_option("--config", config_path,
                  "Configuration file (key = value lines or a JSON object); flags take precedence");
}

void add_common(CLI::App* app, std::string& config_path, std::string& out_dir) {
  add_config(app, config_path);
  app->add_option("--out", out_dir, "Output directory")->capture_default_str();
}

// CLI11 only reads config files for the top-level app, so subcommands load
// theirs here: each entry fills an option the command line left unset.
void apply_config(CLI::App* app, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::vector<CLI::ConfigItem> items;
  try {
    items = FileConfig().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  for (const auto& item : items) {
    // CLI11 marks section boundaries with "++" and "--" entries.
    if (item.inputs.empty() || item.name == "++" || item.name == "--") continue;
    std::string name = item.name;
    CLI::Option* opt = app->get_option_no_throw("--" + name);
    if (!opt) {
      std::replace(name.begin(), name.end(), '_', '-');
      opt = app->get_option_no_throw("--" + name);
    }
    if (!opt || item.name == "config") {
      throw ConfigError(path + ": unknown key '" + item.name + "' for " + app->get_name());
    }
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    try {
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
}

void add_kernel_options(CLI::App* app, ProblemFlags& p) {
  app->add_option("--kernel", p.kernel, "Memory kernel: riesz or exponential")
      ->capture_default_str();
  app->add_option("--rho", p.rho, "Riesz exponent rho, 1 < rho < 2")->capture_default_str();
  app->add_option("--decay", p.decay, "Exponential kernel decay a, 0 < a <= 2")
      ->capture_default_str();
}

void add_problem_options(CLI::App* app, ProblemFlags& p, bool with_steps) {
  add_kernel_options(app, p);
  app->add_option("--N", p.N, "Number of sine modes")->capture_default_str();
  app->add_option("--T", p.T, "Final time")->capture_default_str();
  if (with_steps) app->add_option("--M", p.M, "Number of time steps")->capture_default_str();
  app->add_option("--f", p.f, "Nonlinearity: sin, zero, const or cubic")->capture_default_str();
  app->add_option("--c,--f-const,--f_const", p.f_const, "Value of the constant nonlinearity")
      ->capture_default_str();
  app->add_option("--u0", p.u0, "Initial condition: poly4x1mx, mode or coeffs")
      ->capture_default_str();
  app->add_option("--u0-mode,--u0_mode", p.u0_mode, "Mode index for --u0 mode")
      ->capture_default_str();
  app->add_option("--u0-coeffs,--u0_coeffs", p.u0_coeffs, "Modal coefficients for --u0 coeffs");
  app->add_option("--fp-tol,--fp_tol", p.fp_tol, "Fixed-point tolerance (modal sup-norm)")
      ->capture_default_str();
  app->add_option("--fp-max-iters,--fp_max_iters", p.fp_max_iters, "Fixed-point iteration cap")
      ->capture_default_str();
  app->add_option("--scheme", p.scheme, "Time stepper: trapezoidal or euler")
      ->capture_default_str();
}

Problem resolve(const ProblemFlags& flags) {
  Problem p;
  p.solver.kernel = make_kernel(flags.kernel, flags.rho, flags.decay);
  p.solver.N = flags.N;
  p.solver.T = flags.T;
  p.solver.M = flags.M;
  p.solver.fp_tol = flags.fp_tol;
  p.solver.fp_max_iters = flags.fp_max_iters;
  p.f = flags.f;
  p.f_const = flags.f_const;
  p.u0 = flags.u0;
  p.u0_mode = flags.u0_mode;
  p.u0_coeffs = flags.u0_coeffs;
  p.scheme = parse_scheme(flags.scheme);
  validate(p);
  return p;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return file;
}

void write_json(const fs::path& path, const Json& doc) {
  auto file = open_output(path);
  file << doc.dump(2) << '\n';
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir.empty() ? "." : dir);
  fs::create_directories(p);
  return p;
}

int cmd_run(const ProblemFlags& flags, const std::string& out_dir, std::ostream& out) {
  const Problem problem = resolve(flags);
  const fs::path dir = prepare_dir(out_dir);
  Json echo = {{"command", "run"}, {"problem", to_json(problem)}};
  write_json(dir / "config.json", echo);

  const Trajectory traj = solve(problem);
  const SpectralBasis basis(problem.solver.N);

  {
    auto csv = open_output(dir / "solution.csv");
    csv << 't';
    for (std::size_t j = 1; j <= basis.size(); ++j) csv << ",u_" << j;
    csv << '\n';
    for (std::size_t m = 0; m < traj.states.size(); ++m) {
      const NodalField v = basis.synthesize(traj.states[m]);
      csv << format_number(traj.times[m]);
      for (std::size_t j = 0; j < v.size(); ++j) csv << ',' << format_number(v[j]);
      csv << '\n';
    }
  }
  {
    auto csv = open_output(dir / "diagnostics.csv");
    csv << "step,t,iterations,residual\n";
    for (std::size_t m = 1; m <= traj.steps.size(); ++m) {
      const auto& s = traj.steps[m - 1];
      csv << m << ',' << format_number(traj.times[m]) << ',' << s.iterations << ','
          << format_number(s.residual) << '\n';
    }
  }
  const NodalField final_nodal = basis.synthesize(traj.final_state());
  {
    auto csv = open_output(dir / "final.csv");
    csv << "x,value\n";
    for (std::size_t j = 0; j < final_nodal.size(); ++j) {
      csv << format_number(basis.node(j)) << ',' << format_number(final_nodal[j]) << '\n';
    }
  }
  const double norm = discrete_l2_error(final_nodal, NodalField(final_nodal.size()));
  out << "final discrete L2 norm at T=" << format_number(problem.solver.T) << ": "
      << format_number(norm) << '\n';
  return kOk;
}

struct SweepFlags {
  std::size_t M_min = 16;
  std::size_t M_max = 1024;
  std::size_t ref_factor = 8;
  std::string preset = "none";
};

int cmd_converge(const ProblemFlags& flags, const SweepFlags& sweep, const std::string& out_dir,
                 std::ostream& out) {
  if (sweep.preset != "none" && sweep.preset != "benchmark") {
    throw ConfigError("unknown preset '" + sweep.preset + "' (expected none or benchmark)");
  }
  const std::vector<std::size_t> steps = dyadic_steps(sweep.M_min, sweep.M_max);
  std::vector<Problem> problems;
  if (sweep.preset == "benchmark") {
    for (const auto& kernel : benchmark_kernels()) {
      ProblemFlags f = flags;
      Problem p = resolve(f);
      p.solver.kernel = kernel;
      problems.push_back(p);
    }
  } else {
    problems.push_back(resolve(flags));
  }
  const fs::path dir = prepare_dir(out_dir);
  Json echo = {{"command", "converge"},
               {"preset", sweep.preset},
               {"M_min", sweep.M_min},
               {"M_max", sweep.M_max},
               {"ref_factor", sweep.ref_factor},
               {"problems", Json::array()}};
  for (const auto& p : problems) {
    Json item = to_json(p);
    item.erase("M");
    echo["problems"].push_back(std::move(item));
  }
  write_json(dir / "config.json", echo);

  std::vector<ConvergenceReport> reports;
  for (const auto& p : problems) {
    const std::string name = problems.size() == 1
                                 ? std::string("convergence.csv")
                                 : "convergence_" + kernel_label(p.solver.kernel) + ".csv";
    auto csv = open_output(dir / name);
    write_csv_header(csv);
    csv.flush();
    ConvergenceReport report = run_sweep(p, steps, sweep.ref_factor, [&](const ConvergenceRow& row) {
      write_csv_row(csv, row);
      csv.flush();
    });
    out << report.label << " (" << scheme_name(p.scheme) << ", reference M=" << report.reference_M
        << ")\n";
    out << "  h                      error                  observed_order  fp_iters\n";
    for (const auto& row : report.rows) {
      std::ostringstream line;
      line << "  " << std::left << std::setw(22) << format_number(row.h) << ' ' << std::setw(22)
           << format_number(row.error) << ' ' << std::setw(15)
           << (row.observed_order ? format_number(*row.observed_order).substr(0, 8) : "")
           << ' ' << row.max_iterations;
      out << line.str() << '\n';
    }
    out << "  fitted slope: " << format_number(report.fitted_slope) << '\n';
    reports.push_back(std::move(report));
  }
  auto svg = open_output(dir / "convergence.svg");
  write_svg(svg, reports, echo);
  return kOk;
}

int cmd_ml(double a, double b, const std::vector<double>& zs, std::ostream& out) {
  if (zs.empty()) throw ConfigError("ml needs at least one --z value");
  const MLParams params{a, b};
  validate(params);
  out << "z,value\n";
  for (const double z : zs) out << format_number(z) << ',' << format_number(ml(params, z)) << '\n';
  return kOk;
}

int cmd_resolvent_check(const ProblemFlags& flags, std::vector<double> lambdas,
                        std::size_t samples, double step, double tol_factor, std::ostream& out) {
  const KernelSpec spec = make_kernel(flags.kernel, flags.rho, flags.decay);
  if (lambdas.empty()) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    lambdas = {pi2, 4.0 * pi2, 100.0 * pi2};
  }
  if (samples == 0) throw ConfigError("--samples must be at least 1");
  for (const double l : lambdas) {
    if (!(l > 0.0)) throw ConfigError("eigenvalues must be positive (got " + format_number(l) + ")");
  }
  std::vector<double> times(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    times[i] = static_cast<double>(i + 1) / static_cast<double>(samples);
  }
  bool ok = true;
  out << "lambda,max_residual,tolerance,status\n";
  for (const double lambda : lambdas) {
    const auto rows = volterra_residual(spec, lambda, times, step);
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.residual);
    const double tol = tol_factor * lambda;
    const bool pass = worst <= tol;
    ok = ok && pass;
    out << format_number(lambda) << ',' << format_number(worst) << ',' << format_number(tol) << ','
        << (pass ? "ok" : "FAIL") << '\n';
  }
  return ok ? kOk : kCheckFailure;
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"memkit: integro-differential equations with memory kernels"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  ProblemFlags run_flags;
  auto* run = app.add_subcommand("run", "Solve one problem and write the trajectory");
  add_common(run, config_path, out_dir);
  add_problem_options(run, run_flags, true);

  ProblemFlags conv_flags;
  SweepFlags sweep;
  auto* conv = app.add_subcommand("converge", "Dyadic step-size sweep against a fine reference");
  add_common(conv, config_path, out_dir);
  add_problem_options(conv, conv_flags, false);
  conv->add_option("--M-min,--M_min", sweep.M_min, "Smallest step count (power of two)")
      ->capture_default_str();
  conv->add_option("--M-max,--M_max", sweep.M_max, "Largest step count (power of two)")
      ->capture_default_str();
  conv->add_option("--ref-factor,--ref_factor", sweep.ref_factor,
                   "Reference uses ref-factor * M_max steps")
      ->capture_default_str();
  conv->add_option("--preset", sweep.preset,
                   "none, or benchmark (exponential a=2, Riesz rho=1.25 and 1.75)")
      ->capture_default_str();

  double ml_a = 1.0;
  double ml_b = 1.0;
  std::vector<double> ml_z;
  auto* mlc = app.add_subcommand("ml", "Evaluate the Mittag-Leffler function E_{a,b}(z)");
  add_config(mlc, config_path);
  mlc->add_option("--a", ml_a, "Parameter a, 0 < a <= 2")->capture_default_str();
  mlc->add_option("--b", ml_b, "Parameter b > 0")->capture_default_str();
  mlc->add_option("--z", ml_z, "Arguments z <= 0 (at least one)");

  ProblemFlags res_flags;
  std::vector<double> lambdas;
  std::size_t samples = 20;
  double step = 1e-4;
  double tol_factor = 1e-3;
  auto* res = app.add_subcommand("resolvent-check",
                                 "Residual of the scalar resolvent's Volterra equation");
  add_config(res, config_path);
  add_kernel_options(res, res_flags);
  res->add_option("--lambda", lambdas, "Eigenvalues (default pi^2, 4 pi^2, 100 pi^2)");
  res->add_option("--samples", samples, "Sample times i/samples, i = 1..samples")
      ->capture_default_str();
  res->add_option("--step", step, "Product-integration step")->capture_default_str();
  res->add_option("--tol-factor,--tol_factor", tol_factor, "Tolerance is tol-factor * lambda")
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    for (CLI::App* sub : {run, conv, mlc, res}) {
      if (sub->parsed()) apply_config(sub, config_path);
    }
    if (run->parsed()) return cmd_run(run_flags, out_dir, out);
    if (conv->parsed()) return cmd_converge(conv_flags, sweep, out_dir, out);
    if (mlc->parsed()) return cmd_ml(ml_a, ml_b, ml_z, out);
    if (res->parsed()) return cmd_resolvent_check(res_flags, lambdas, samples, step, tol_factor, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return kSolverError;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::domain_error& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSolverError;
  }
  return kConfigError;
}

}  // namespace memkit::cli
