#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "problem.hpp"

namespace memkit::cli {

struct ConvergenceRow {
  std::size_t M = 0;
  double h = 0.0;
  double error = 0.0;
  std::optional<double> observed_order;  // absent for the first row
  std::size_t max_iterations = 0;        // fixed-point iterations, worst step
  double max_residual = 0.0;             // fixed-point residual, worst step
};

struct ConvergenceReport {
  std::string label;
  std::vector<ConvergenceRow> rows;  // decreasing h
  double fitted_slope = 0.0;         // NaN when fewer than two rows qualify
  std::size_t reference_M = 0;
  NodalField reference;              // reference solution at T
  std::vector<NodalField> finals;    // solution at T for each row
  nlohmann::ordered_json config_echo;
};

/// Least-squares slope of log(error) against log(h) over rows with
/// error > floor; NaN if fewer than two rows qualify.
double fit_slope(const std::vector<ConvergenceRow>& rows, double floor);

/// log(e[i-1]/e[i]) / log(h[i-1]/h[i]) for every row but the first.
void fill_observed_orders(std::vector<ConvergenceRow>& rows);

/// Dyadic list {M_min, 2 M_min, ..., M_max}; throws ConfigError unless both
/// are powers of two with M_min < M_max.
std::vector<std::size_t> dyadic_steps(std::size_t M_min, std::size_t M_max);

/// Solves `problem` at every M in `steps` (sorted ascending) and at
/// ref_factor * max(steps) with the same scheme, and measures the discrete
/// L2 error at T against the latter. on_row is called as soon as each row is
/// complete, so callers can stream partial output.
ConvergenceReport run_sweep(const Problem& problem, const std::vector<std::size_t>& steps,
                            std::size_t ref_factor,
                            const std::function<void(const ConvergenceRow&)>& on_row = {});

/// "%.17g".
std::string format_number(double v);

/// Header `h,error,observed_order` and one line per row.
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const ConvergenceRow& row);
void write_csv(std::ostream& out, const ConvergenceReport& report);

/// Standalone SVG 1.1 log-log plot: one polyline per report, a slope-2 guide,
/// decade ticks, and the configuration in a metadata element.
void write_svg(std::ostream& out, const std::vector<ConvergenceReport>& reports,
               const nlohmann::ordered_json& config_echo);

}  // namespace memkit::cli
