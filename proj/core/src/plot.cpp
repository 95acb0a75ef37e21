#include "adaptobs/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <limits>
#include <sstream>

namespace adaptobs {

namespace {

constexpr std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c",
                                                "#9467bd", "#ff7f0e", "#17becf"};

bool usable(double v, bool log_y) { return std::isfinite(v) && (!log_y || v > 0.0); }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v) {
  if (v == 0.0) return "0";
  const double a = std::abs(v);
  if (a >= 1e4 || a < 1e-2) return fmt::format("{:.0e}", v);
  return fmt::format("{:.3g}", v);
}

void draw_panel(std::ostringstream& svg, const Panel& p, double x0, double y0, double w, double h,
                double x_min, double x_max, const std::string& x_label) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : p.series)
    for (double v : s.y)
      if (usable(v, p.log_y)) {
        const double t = p.log_y ? std::log10(v) : v;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
      }
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  if (p.log_y) {
    lo = std::floor(lo);
    hi = std::ceil(hi);
  }
  if (hi - lo < 1e-300) hi = lo + 1.0;
  const double pad = p.log_y ? 0.0 : 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  const double left = x0 + 80.0, right = x0 + w - 150.0, top = y0 + 30.0, bottom = y0 + h - 45.0;
  const auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * (right - left); };
  const auto py = [&](double v) { return bottom - (v - lo) / (hi - lo) * (bottom - top); };

  svg << fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#444"/>)", left,
                     top, right - left, bottom - top)
      << '\n';
  svg << fmt::format(R"(<text x="{}" y="{}" font-size="14" text-anchor="middle">{}</text>)",
                     (left + right) / 2, y0 + 20, escape(p.title))
      << '\n';
  svg << fmt::format(
             R"svg(<text x="{}" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 {} {})">{}</text>)svg",
             x0 + 18, (top + bottom) / 2, x0 + 18, (top + bottom) / 2, escape(p.y_label))
      << '\n';
  svg << fmt::format(R"(<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>)",
                     (left + right) / 2, bottom + 38, escape(x_label))
      << '\n';

  const int n_ticks = 5;
  for (int i = 0; i <= n_ticks; ++i) {
    const double xv = x_min + (x_max - x_min) * i / n_ticks;
    svg << fmt::format(R"(<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="#ddd"/>)", px(xv), top, bottom)
        << fmt::format(R"(<text x="{}" y="{}" font-size="11" text-anchor="middle">{}</text>)", px(xv),
                       bottom + 16, tick_label(xv))
        << '\n';
  }
  const int y_ticks = p.log_y ? static_cast<int>(std::min(hi - lo, 8.0)) : n_ticks;
  for (int i = 0; i <= y_ticks; ++i) {
    const double v = lo + (hi - lo) * i / std::max(y_ticks, 1);
    const std::string label = p.log_y ? fmt::format("1e{:.0f}", v) : tick_label(v);
    svg << fmt::format(R"(<line x1="{1}" y1="{0}" x2="{2}" y2="{0}" stroke="#ddd"/>)", py(v), left, right)
        << fmt::format(R"(<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>)", left - 5,
                       py(v) + 4, label)
        << '\n';
  }

  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    const char* color = kColors[k % kColors.size()];
    std::string points;
    const auto flush = [&] {
      if (!points.empty())
        svg << fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="1.3" points="{}"/>)", color,
                           points)
            << '\n';
      points.clear();
    };
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.y[i], p.log_y) || !std::isfinite(s.x[i])) {
        flush();
        continue;
      }
      const double v = std::clamp(p.log_y ? std::log10(s.y[i]) : s.y[i], lo, hi);
      points += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(v));
    }
    flush();
    const double ly = top + 14.0 + 18.0 * static_cast<double>(k);
    svg << fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="2"/>)", right + 10,
                       ly, right + 30, ly, color)
        << fmt::format(R"(<text x="{}" y="{}" font-size="12">{}</text>)", right + 35, ly + 4,
                       escape(s.label))
        << '\n';
  }
}

bool has_data(const std::vector<double>& v) {
  return std::any_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace

std::string render_svg(const std::vector<Panel>& panels, const std::string& x_label, double width,
                       double panel_height) {
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  for (const auto& p : panels)
    for (const auto& s : p.series)
      for (double x : s.x)
        if (std::isfinite(x)) x_min = std::min(x_min, x), x_max = std::max(x_max, x);
  if (!std::isfinite(x_min)) x_min = 0.0, x_max = 1.0;
  if (x_max <= x_min) x_max = x_min + 1.0;

  const double height = panel_height * static_cast<double>(std::max<std::size_t>(panels.size(), 1));
  std::ostringstream svg;
  svg << fmt::format(
             R"(<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{1}" viewBox="0 0 {0} {1}" font-family="sans-serif">)",
             width, height)
      << '\n'
      << fmt::format(R"(<rect width="{}" height="{}" fill="white"/>)", width, height) << '\n';
  for (std::size_t i = 0; i < panels.size(); ++i)
    draw_panel(svg, panels[i], 0.0, panel_height * static_cast<double>(i), width, panel_height, x_min, x_max,
               x_label);
  svg << "</svg>\n";
  return svg.str();
}

std::vector<std::string> emit_plots(const Trace& trace, const std::string& out_dir) {
  const auto t = trace.column("t");
  const auto series = [&](const std::string& label, const std::string& col) {
    return Series{label, t, trace.column(col)};
  };

  std::vector<Panel> fig1 = {
      {"measured q_bar vs regression phi_bar^T eta", "value", false,
       {series("q_bar", "q_bar"), series("phi^T eta (true)", "phi_eta_true")}},
      {"excitation level", "lambda_min (window)", true, {series("lambda_min window", "lambda_min_window")}}};
  const auto hat = trace.column("phi_eta_hat");
  if (has_data(hat)) fig1[0].series.push_back(Series{"phi^T eta (estimate)", t, hat});

  const std::vector<Panel> fig2 = {{"parameter estimation errors", "norm", true,
                                    {series("|psi_a err|", "psi_a_err"), series("|psi_b err|", "psi_b_err"),
                                     series("|O_Gamma err|", "o_gamma_err"), series("|T_I err|", "t_i_err")}}};

  Panel fig3{"state estimation error", "|x_tilde|", true, {}};
  for (const auto& [label, col] : {std::pair{"proposed", "xtilde_norm"}, {"baseline", "xtilde_bl_norm"}}) {
    auto s = series(label, col);
    if (has_data(s.y)) fig3.series.push_back(std::move(s));
  }

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::vector<std::pair<std::string, std::vector<Panel>>> figures = {
      {"regression.svg", fig1}, {"parameter_errors.svg", fig2}, {"state_errors.svg", {fig3}}};
  std::vector<std::string> paths;
  for (const auto& [name, panels] : figures) {
    const std::string path = (fs::path(out_dir) / name).string();
    write_file(path, render_svg(panels, "t [s]"));
    paths.push_back(path);
  }
  return paths;
}

std::vector<std::string> emit_plots(const std::string& run_dir) {
  const auto trace = read_trace_csv((std::filesystem::path(run_dir) / "trace.csv").string());
  return emit_plots(trace, run_dir);
}

}  // namespace adaptobs
