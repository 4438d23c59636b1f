#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "commands.hpp"
#include "memkit/integrator.hpp"
#include "oracles/ml_series_oracle.hpp"
#include "report.hpp"

namespace fs = std::filesystem;
using memkit::cli::main;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = main(args, out, err);
  return {code, out.str(), err.str()};
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("memkit_cli_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// Elements anywhere below node whose class attribute equals cls.
int count_class(const boost::property_tree::ptree& node, const std::string& tag,
                const std::string& cls) {
  int n = 0;
  for (const auto& [name, child] : node) {
    if (name == tag && child.get<std::string>("<xmlattr>.class", "") == cls) ++n;
    n += count_class(child, tag, cls);
  }
  return n;
}

std::vector<double> split_numbers(const std::string& line) {
  std::vector<double> out;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) {
    out.push_back(cell.empty() ? std::nan("") : std::stod(cell));
  }
  return out;
}

}  // namespace

TEST_CASE("ml subcommand prints 17 significant digits") {
  auto r = invoke({"ml", "--a", "1", "--b", "1", "--z", "-1"});
  CHECK(r.code == 0);
  CHECK(r.out == "z,value\n-1,0.36787944117144233\n");

  r = invoke({"ml", "--a", "2", "--b", "1", "--z", "-2.4674011002723395"});
  CHECK(r.code == 0);
  const auto row = split_numbers(lines(r.out).at(1));
  CHECK(std::fabs(row.at(1)) <= 1e-14);

  r = invoke({"ml", "--a", "1.5", "--b", "2", "--z", "-9.8696", "--z", "-0.5"});
  CHECK(r.code == 0);
  const memkit::oracle::MLSeriesOracle oracle(3, 2, 2.0, 10.0);
  const auto out = lines(r.out);
  REQUIRE(out.size() == 3);
  CHECK(split_numbers(out[1]).at(1) == doctest::Approx(oracle(-9.8696)).epsilon(1e-13));
  CHECK(split_numbers(out[2]).at(1) == doctest::Approx(oracle(-0.5)).epsilon(1e-14));
}

TEST_CASE("ml subcommand rejects invalid parameters") {
  CHECK(invoke({"ml", "--a", "3", "--z", "-1"}).code == 2);
  CHECK(invoke({"ml", "--a", "1", "--z", "1"}).code == 2);
  CHECK(invoke({"ml", "--a", "1"}).code == 2);
}

TEST_CASE("resolvent-check passes for both kernels and rejects lambda = 0") {
  auto r = invoke({"resolvent-check", "--kernel", "exponential", "--decay", "2"});
  CHECK(r.code == 0);
  CHECK(lines(r.out).at(0) == "lambda,max_residual,tolerance,status");
  CHECK(lines(r.out).size() == 4);
  r = invoke({"resolvent-check", "--kernel", "riesz", "--rho", "1.5", "--lambda", "9.869604401089358"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  r = invoke({"resolvent-check", "--kernel", "riesz", "--lambda", "0"});
  CHECK(r.code == 2);
  // An impossible tolerance is reported as a check failure.
  r = invoke({"resolvent-check", "--kernel", "riesz", "--lambda", "9.869604401089358",
              "--tol-factor", "1e-30"});
  CHECK(r.code == 4);
  CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("run writes trajectory, diagnostics and final state") {
  TempDir dir;
  const auto r = invoke({"run", "--kernel", "exponential", "--decay", "2", "--N", "100", "--T", "1",
                         "--M", "128", "--f", "sin", "--u0", "poly4x1mx", "--out", dir.str()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("final discrete L2 norm") != std::string::npos);
  const auto sol = lines(slurp(dir.path() / "solution.csv"));
  REQUIRE(sol.size() == 1 + 129);
  CHECK(sol[0].rfind("t,u_1,u_2,", 0) == 0);
  CHECK(sol[0].substr(sol[0].size() - 6) == ",u_100");
  CHECK(split_numbers(sol[1]).size() == 101);
  CHECK(split_numbers(sol.back()).at(0) == 1.0);
  const auto diag = lines(slurp(dir.path() / "diagnostics.csv"));
  REQUIRE(diag.size() == 1 + 128);
  CHECK(diag[0] == "step,t,iterations,residual");
  for (std::size_t i = 1; i < diag.size(); ++i) {
    const auto v = split_numbers(diag[i]);
    CHECK(v.at(2) >= 1);
    CHECK(v.at(3) <= 1e-12);
  }
  const auto fin = lines(slurp(dir.path() / "final.csv"));
  CHECK(fin.size() == 101);
  CHECK(fin[0] == "x,value");
  const auto config = nlohmann::json::parse(slurp(dir.path() / "config.json"));
  CHECK(config["command"] == "run");
  CHECK(config["problem"]["M"] == 128);
}

TEST_CASE("run with f = 0 reproduces the truncated spectral solution") {
  TempDir dir;
  const auto r = invoke({"run", "--kernel", "riesz", "--rho", "1.5", "--N", "20", "--M", "16",
                         "--f", "zero", "--out", dir.str()});
  REQUIRE(r.code == 0);
  const memkit::SpectralBasis basis(20);
  const memkit::ModalField u0 =
      basis.project_initial([](double x) { return 4.0 * x * (1.0 - x); });
  memkit::ModalField exact(20);
  for (std::size_t k = 0; k < 20; ++k) {
    exact[k] = memkit::s_eval(memkit::RieszKernel{1.5}, memkit::eigenvalue(k + 1), 1.0) * u0[k];
  }
  const memkit::NodalField nodal = basis.synthesize(exact);
  const auto fin = lines(slurp(dir.path() / "final.csv"));
  REQUIRE(fin.size() == 21);
  for (std::size_t j = 0; j < 20; ++j) {
    const auto v = split_numbers(fin[j + 1]);
    CHECK(std::fabs(v.at(1) - nodal[j]) <= 1e-10);
  }
}

TEST_CASE("configuration errors exit with code 2 and say what to change") {
  TempDir dir;
  auto r = invoke({"run", "--kernel", "riesz", "--rho", "2.5", "--out", dir.str()});
  CHECK(r.code == 2);
  CHECK(r.err.find("rho") != std::string::npos);
  r = invoke({"run", "--kernel", "gauss", "--out", dir.str()});
  CHECK(r.code == 2);
  CHECK(r.err.find("riesz") != std::string::npos);
  r = invoke({"run", "--kernel", "exponential", "--decay", "3", "--out", dir.str()});
  CHECK(r.code == 2);
  r = invoke({"run", "--f", "tanh", "--out", dir.str()});
  CHECK(r.code == 2);
  r = invoke({"run", "--M", "1", "--T", "2", "--N", "4", "--out", dir.str()});
  CHECK(r.code == 2);
  CHECK(r.err.find("increase M") != std::string::npos);
  r = invoke({"run", "--no-such-flag"});
  CHECK(r.code == 2);
  r = invoke({});
  CHECK(r.code == 2);
  r = invoke({"converge", "--M-min", "16", "--M-max", "48", "--out", dir.str()});
  CHECK(r.code == 2);
  r = invoke({"--help"});
  CHECK(r.code == 0);
}

TEST_CASE("solver errors exit with code 3") {
  TempDir dir;
  // One fixed-point iteration cannot reach fp_tol = 1e-12.
  const auto r = invoke({"run", "--N", "8", "--M", "16", "--f", "sin", "--fp-max-iters", "1",
                         "--out", dir.str()});
  CHECK(r.code == 3);
  CHECK(r.err.find("solver error") != std::string::npos);
}

TEST_CASE("config files in INI and JSON form, flags take precedence") {
  TempDir dir;
  const fs::path ini = dir.path() / "problem.ini";
  std::ofstream(ini) << "# solver setup\nkernel = riesz\nrho = 1.75\nN = 8\nM = 16\nf = cubic\n";
  auto r = invoke({"run", "--config", ini.string(), "--M", "32", "--out", dir.str()});
  REQUIRE(r.code == 0);
  auto config = nlohmann::json::parse(slurp(dir.path() / "config.json"));
  CHECK(config["problem"]["M"] == 32);
  CHECK(config["problem"]["N"] == 8);
  CHECK(config["problem"]["f"] == "cubic");
  CHECK(config["problem"]["kernel"]["type"] == "riesz");
  CHECK(lines(slurp(dir.path() / "solution.csv")).size() == 1 + 33);

  const fs::path json = dir.path() / "problem.json";
  std::ofstream(json) << R"({"kernel": "exponential", "decay": 1.5, "N": 6, "M": 8, "f": "zero"})";
  r = invoke({"run", "--config", json.string(), "--out", dir.str()});
  REQUIRE(r.code == 0);
  config = nlohmann::json::parse(slurp(dir.path() / "config.json"));
  CHECK(config["problem"]["M"] == 8);
  CHECK(config["problem"]["kernel"]["decay"] == 1.5);

  const fs::path bad = dir.path() / "bad.ini";
  std::ofstream(bad) << "kernel = riesz\nrho = 0.5\n";
  CHECK(invoke({"run", "--config", bad.string(), "--out", dir.str()}).code == 2);
  CHECK(invoke({"run", "--config", (dir.path() / "missing.ini").string()}).code == 2);
  const fs::path unknown = dir.path() / "unknown.ini";
  std::ofstream(unknown) << "kernel = riesz\nbogus = 1\n";
  const auto rejected = invoke({"run", "--config", unknown.string(), "--out", dir.str()});
  CHECK(rejected.code == 2);
  CHECK(rejected.err.find("bogus") != std::string::npos);
}

TEST_CASE("converge writes CSV, SVG and echo; output is deterministic") {
  TempDir a;
  TempDir b;
  const std::vector<std::string> args = {"converge", "--kernel", "riesz", "--rho", "1.5", "--N",
                                         "16", "--M-min", "16", "--M-max", "64", "--ref-factor", "4"};
  auto with_out = [&](const TempDir& d) {
    auto v = args;
    v.push_back("--out");
    v.push_back(d.str());
    return v;
  };
  REQUIRE(invoke(with_out(a)).code == 0);
  REQUIRE(invoke(with_out(b)).code == 0);
  const std::string csv = slurp(a.path() / "convergence.csv");
  CHECK(csv == slurp(b.path() / "convergence.csv"));
  CHECK(slurp(a.path() / "convergence.svg") == slurp(b.path() / "convergence.svg"));
  const auto rows = lines(csv);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "h,error,observed_order");
  CHECK(split_numbers(rows[1]).at(0) == 1.0 / 16);
  CHECK(rows[1].back() == ',');
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const auto v = split_numbers(rows[i]);
    CHECK(v.at(2) > 1.0);
  }

  const auto config = nlohmann::json::parse(slurp(a.path() / "config.json"));
  CHECK(config["command"] == "converge");
  CHECK(config["problems"].size() == 1);
  CHECK_FALSE(config["problems"][0].contains("M"));

  boost::property_tree::ptree tree;
  std::istringstream svg(slurp(a.path() / "convergence.svg"));
  REQUIRE_NOTHROW(boost::property_tree::read_xml(svg, tree));
  const auto& root = tree.get_child("svg");
  CHECK(root.get<std::string>("<xmlattr>.version") == "1.1");
  CHECK(count_class(root, "polyline", "data") == 1);
  CHECK(count_class(root, "line", "guide") == 1);
  const auto meta = nlohmann::json::parse(root.get<std::string>("metadata"));
  CHECK(meta == config);
}

TEST_CASE("benchmark preset writes one CSV per kernel and one polyline each") {
  TempDir dir;
  const auto r = invoke({"converge", "--preset", "benchmark", "--N", "8", "--M-min", "16", "--M-max",
                         "32", "--ref-factor", "2", "--out", dir.str()});
  REQUIRE(r.code == 0);
  for (const char* name : {"convergence_exponential_a2.csv", "convergence_riesz_rho1.25.csv",
                           "convergence_riesz_rho1.75.csv"}) {
    CAPTURE(name);
    CHECK(lines(slurp(dir.path() / name)).size() == 3);
  }
  boost::property_tree::ptree tree;
  std::istringstream svg(slurp(dir.path() / "convergence.svg"));
  boost::property_tree::read_xml(svg, tree);
  CHECK(count_class(tree.get_child("svg"), "polyline", "data") == 3);
  CHECK(count_class(tree.get_child("svg"), "line", "guide") == 1);
}

TEST_CASE("f = 0 sweeps sit at the tolerance floor") {
  TempDir dir;
  const auto r = invoke({"converge", "--kernel", "exponential", "--N", "32", "--f", "zero",
                         "--M-min", "16", "--M-max", "64", "--out", dir.str()});
  REQUIRE(r.code == 0);
  const auto rows = lines(slurp(dir.path() / "convergence.csv"));
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(split_numbers(rows[i]).at(1) <= 1e-11);
}

TEST_CASE("observed orders track the fitted slope on the exponential configuration") {
  const auto problem = memkit::cli::benchmark_problem(memkit::ExponentialKernel{2.0}, 16);
  const auto report =
      memkit::cli::run_sweep(problem, memkit::cli::dyadic_steps(16, 1024), 8);
  CHECK(report.reference_M == 8192);
  CHECK(report.fitted_slope >= 1.8);
  CHECK(report.fitted_slope <= 2.2);
  for (const auto& row : report.rows) {
    if (row.observed_order) CHECK(std::fabs(*row.observed_order - report.fitted_slope) <= 0.5);
  }
}

TEST_CASE("report helpers") {
  using memkit::cli::ConvergenceRow;
  std::vector<ConvergenceRow> rows;
  for (int i = 0; i < 4; ++i) {
    ConvergenceRow r;
    r.h = std::pow(0.5, i + 4);
    r.error = 3.0 * r.h * r.h;
    rows.push_back(r);
  }
  memkit::cli::fill_observed_orders(rows);
  CHECK_FALSE(rows[0].observed_order.has_value());
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(*rows[i].observed_order == doctest::Approx(2.0));
  CHECK(memkit::cli::fit_slope(rows, 0.0) == doctest::Approx(2.0));
  CHECK(std::isnan(memkit::cli::fit_slope(rows, 1.0)));
  rows[3].error = 1e-13;
  CHECK(memkit::cli::fit_slope(rows, 1e-10) == doctest::Approx(2.0));

  CHECK(memkit::cli::dyadic_steps(16, 128) == std::vector<std::size_t>{16, 32, 64, 128});
  CHECK_THROWS_AS(memkit::cli::dyadic_steps(16, 16), memkit::ConfigError);
  CHECK_THROWS_AS(memkit::cli::dyadic_steps(12, 64), memkit::ConfigError);
  CHECK_THROWS_AS(memkit::cli::dyadic_steps(64, 16), memkit::ConfigError);

  CHECK(memkit::cli::format_number(0.1) == "0.10000000000000001");
  CHECK(memkit::cli::format_number(1.0) == "1");
  CHECK(memkit::cli::kernel_label(memkit::RieszKernel{1.25}) == "riesz_rho1.25");
  CHECK(memkit::cli::kernel_label(memkit::ExponentialKernel{2.0}) == "exponential_a2");
}
