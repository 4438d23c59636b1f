#include "report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace memkit::cli {
namespace {

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v, int decimals = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace

double fit_slope(const std::vector<ConvergenceRow>& rows, double floor) {
  double sx = 0.0;
  double sy = 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (!(r.error > floor)) continue;
    const double x = std::log(r.h);
    const double y = std::log(r.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

void fill_observed_orders(std::vector<ConvergenceRow>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i == 0) {
      rows[i].observed_order.reset();
      continue;
    }
    rows[i].observed_order = std::log(rows[i - 1].error / rows[i].error) /
                             std::log(rows[i - 1].h / rows[i].h);
  }
}

std::vector<std::size_t> dyadic_steps(std::size_t M_min, std::size_t M_max) {
  if (!is_power_of_two(M_min) || !is_power_of_two(M_max) || !(M_min < M_max)) {
    std::ostringstream msg;
    msg << "sweep bounds must be powers of two with M_min < M_max (got " << M_min << ", "
        << M_max << ")";
    throw ConfigError(msg.str());
  }
  std::vector<std::size_t> out;
  for (std::size_t m = M_min; m <= M_max; m *= 2) out.push_back(m);
  return out;
}

ConvergenceReport run_sweep(const Problem& problem, const std::vector<std::size_t>& steps,
                            std::size_t ref_factor,
                            const std::function<void(const ConvergenceRow&)>& on_row) {
  if (steps.empty()) throw ConfigError("sweep needs at least one step count");
  if (!std::is_sorted(steps.begin(), steps.end())) {
    throw ConfigError("sweep step counts must be ascending");
  }
  if (ref_factor < 2) throw ConfigError("reference refinement factor must be at least 2");
  validate(problem);

  const SpectralBasis basis(problem.solver.N);
  ConvergenceReport report;
  report.label = kernel_label(problem.solver.kernel);
  report.reference_M = ref_factor * steps.back();

  auto final_nodal = [&](std::size_t M, ConvergenceRow* row) {
    Problem p = problem;
    p.solver.M = M;
    const Trajectory traj = solve(p);
    if (row) {
      for (const auto& s : traj.steps) {
        row->max_iterations = std::max(row->max_iterations, s.iterations);
        row->max_residual = std::max(row->max_residual, s.residual);
      }
    }
    return basis.synthesize(traj.final_state());
  };

  report.reference = final_nodal(report.reference_M, nullptr);
  for (const std::size_t M : steps) {
    ConvergenceRow row;
    row.M = M;
    row.h = problem.solver.T / static_cast<double>(M);
    NodalField u = final_nodal(M, &row);
    row.error = discrete_l2_error(u, report.reference);
    if (!report.rows.empty()) {
      const auto& prev = report.rows.back();
      row.observed_order = std::log(prev.error / row.error) / std::log(prev.h / row.h);
    }
    report.rows.push_back(row);
    report.finals.push_back(std::move(u));
    if (on_row) on_row(row);
  }
  report.fitted_slope = fit_slope(report.rows, 100.0 * problem.solver.fp_tol);

  report.config_echo = to_json(problem);
  report.config_echo.erase("M");
  report.config_echo["sweep_M"] = steps;
  report.config_echo["reference_M"] = report.reference_M;
  return report;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv_header(std::ostream& out) { out << "h,error,observed_order\n"; }

void write_csv_row(std::ostream& out, const ConvergenceRow& row) {
  out << format_number(row.h) << ',' << format_number(row.error) << ',';
  if (row.observed_order) out << format_number(*row.observed_order);
  out << '\n';
}

void write_csv(std::ostream& out, const ConvergenceReport& report) {
  write_csv_header(out);
  for (const auto& row : report.rows) write_csv_row(out, row);
}

void write_svg(std::ostream& out, const std::vector<ConvergenceReport>& reports,
               const nlohmann::ordered_json& config_echo) {
  constexpr double kWidth = 720.0;
  constexpr double kHeight = 540.0;
  constexpr double kLeft = 90.0;
  constexpr double kRight = 200.0;
  constexpr double kTop = 40.0;
  constexpr double kBottom = 70.0;
  static constexpr std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c",
                                                         "#9467bd", "#ff7f0e", "#8c564b"};

  // Data range in log10, including the guide segment.
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin;
  double ymin = xmin;
  double ymax = -xmin;
  auto include = [&](double h, double e) {
    if (!(h > 0.0) || !(e > 0.0)) return;
    xmin = std::min(xmin, std::log10(h));
    xmax = std::max(xmax, std::log10(h));
    ymin = std::min(ymin, std::log10(e));
    ymax = std::max(ymax, std::log10(e));
  };
  for (const auto& r : reports) {
    for (const auto& row : r.rows) include(row.h, row.error);
  }

  // Slope-2 guide through a point half a decade below the first data point.
  struct Guide {
    double h0, e0, h1, e1;
  };
  std::optional<Guide> guide;
  for (const auto& r : reports) {
    if (r.rows.size() < 2 || !(r.rows.front().error > 0.0)) continue;
    const double h0 = r.rows.front().h;
    const double h1 = r.rows.back().h;
    const double e0 = r.rows.front().error / std::sqrt(10.0);
    guide = Guide{h0, e0, h1, e0 * (h1 / h0) * (h1 / h0)};
    include(guide->h0, guide->e0);
    include(guide->h1, guide->e1);
    break;
  }
  if (!std::isfinite(xmin)) {
    xmin = -3.0;
    xmax = 0.0;
    ymin = -12.0;
    ymax = 0.0;
  }
  xmin = std::floor(xmin);
  xmax = std::max(std::ceil(xmax), xmin + 1.0);
  ymin = std::floor(ymin);
  ymax = std::max(std::ceil(ymax), ymin + 1.0);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double h) { return kLeft + (std::log10(h) - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double e) { return kTop + (ymax - std::log10(e)) / (ymax - ymin) * plot_h; };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<metadata>" << xml_escape(config_echo.dump()) << "</metadata>\n"
      << "<title>Temporal convergence</title>\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n"
      << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";

  out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (double d = xmin; d <= xmax + 0.5; d += 1.0) {
    const double x = kLeft + (d - xmin) / (xmax - xmin) * plot_w;
    out << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(kTop + plot_h) << "\" x2=\""
        << fixed(x) << "\" y2=\"" << fixed(kTop + plot_h + 6) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(kTop + plot_h + 22)
        << "\" text-anchor=\"middle\">1e" << static_cast<int>(d) << "</text>\n";
  }
  for (double d = ymin; d <= ymax + 0.5; d += 1.0) {
    const double y = kTop + (ymax - d) / (ymax - ymin) * plot_h;
    out << "<line x1=\"" << fixed(kLeft - 6) << "\" y1=\"" << fixed(y) << "\" x2=\""
        << fixed(kLeft) << "\" y2=\"" << fixed(y) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << fixed(kLeft - 10) << "\" y=\"" << fixed(y + 4)
        << "\" text-anchor=\"end\">1e" << static_cast<int>(d) << "</text>\n";
  }
  out << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"" << fixed(kHeight - 20)
      << "\" text-anchor=\"middle\">time step h</text>\n"
      << "<text x=\"20\" y=\"" << fixed(kTop + plot_h / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << fixed(kTop + plot_h / 2)
      << ")\">discrete L2 error at T</text>\n";

  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    const char* color = kColors[i % kColors.size()];
    out << "<polyline class=\"data\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (const auto& row : r.rows) {
      if (!(row.error > 0.0)) continue;
      out << (first ? "" : " ") << fixed(px(row.h)) << ',' << fixed(py(row.error));
      first = false;
    }
    out << "\"/>\n";
    for (const auto& row : r.rows) {
      if (!(row.error > 0.0)) continue;
      out << "<circle cx=\"" << fixed(px(row.h)) << "\" cy=\"" << fixed(py(row.error))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 20.0 + 20.0 * static_cast<double>(i);
    const double lx = kLeft + plot_w + 15.0;
    out << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(lx + 20)
        << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << fixed(lx + 26) << "\" y=\"" << fixed(ly + 4) << "\">"
        << xml_escape(r.label) << " (slope "
        << (std::isfinite(r.fitted_slope) ? fixed(r.fitted_slope) : std::string("n/a"))
        << ")</text>\n";
  }
  if (guide) {
    const double ly = kTop + 20.0 + 20.0 * static_cast<double>(reports.size());
    const double lx = kLeft + plot_w + 15.0;
    out << "<line class=\"guide\" x1=\"" << fixed(px(guide->h0)) << "\" y1=\""
        << fixed(py(guide->e0)) << "\" x2=\"" << fixed(px(guide->h1)) << "\" y2=\""
        << fixed(py(guide->e1)) << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n"
        << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(lx + 20)
        << "\" y2=\"" << fixed(ly) << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n"
        << "<text x=\"" << fixed(lx + 26) << "\" y=\"" << fixed(ly + 4) << "\">slope 2</text>\n";
  }
  out << "</g>\n</svg>\n";
}

}  // namespace memkit::cli
