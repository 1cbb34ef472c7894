#include "identlink/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace identlink {

namespace {

constexpr double kPanelW = 360.0, kPanelH = 130.0;
constexpr double kMarginL = 42.0, kMarginR = 12.0, kMarginT = 26.0, kMarginB = 24.0;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

double silverman_bandwidth(const Vector& x, double sd) {
  Vector sorted = x;
  std::sort(sorted.begin(), sorted.end());
  double q1 = sorted[static_cast<std::size_t>(0.25 * (sorted.size() - 1))];
  double q3 = sorted[static_cast<std::size_t>(0.75 * (sorted.size() - 1))];
  double iqr = q3 - q1;
  double spread = sd;
  if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
  return 0.9 * spread * std::pow(static_cast<double>(sorted.size()), -0.2);
}

}  // namespace

void emit_density_svg(const std::vector<DensityPanel>& panels, std::size_t n_cols,
                      const std::string& title, const std::string& path) {
  if (panels.empty()) throw std::invalid_argument("emit_density_svg: no panels");
  if (n_cols == 0) n_cols = 1;
  std::size_t n_rows = (panels.size() + n_cols - 1) / n_cols;
  double width = kPanelW * static_cast<double>(n_cols);
  double height = kPanelH * static_cast<double>(n_rows) + 22.0;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
      << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(width / 2) << "\" y=\"15\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"13\">"
      << title << "</text>\n";

  for (std::size_t idx = 0; idx < panels.size(); ++idx) {
    const DensityPanel& panel = panels[idx];
    double ox = kPanelW * static_cast<double>(idx % n_cols);
    double oy = 22.0 + kPanelH * static_cast<double>(idx / n_cols);
    out << "<g transform=\"translate(" << num(ox) << ',' << num(oy) << ")\">\n";
    double x0 = kMarginL, x1 = kPanelW - kMarginR;
    double y0 = kPanelH - kMarginB, y1 = kMarginT;
    out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1)
        << "\" y2=\"" << num(y0) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << num(x0) << "\" y=\"" << num(y1 - 8.0)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << panel.label << "</text>\n";

    if (panel.samples.empty()) {
      out << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num((y0 + y1) / 2)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
             "fill=\"gray\">no data</text>\n</g>\n";
      continue;
    }

    double mean = 0.0;
    for (double v : panel.samples) mean += v;
    mean /= static_cast<double>(panel.samples.size());
    double var = 0.0;
    for (double v : panel.samples) var += (v - mean) * (v - mean);
    var /= static_cast<double>(panel.samples.size());
    double sd = std::sqrt(var);

    auto lo_it = std::min_element(panel.samples.begin(), panel.samples.end());
    auto hi_it = std::max_element(panel.samples.begin(), panel.samples.end());
    double lo = *lo_it, hi = *hi_it;

    // include annotation lines in the x-range
    if (panel.dotted_line) {
      lo = std::min(lo, *panel.dotted_line);
      hi = std::max(hi, *panel.dotted_line);
    }
    if (panel.solid_line) {
      lo = std::min(lo, *panel.solid_line);
      hi = std::max(hi, *panel.solid_line);
    }

    auto x_of = [&](double v, double vlo, double vhi) {
      if (vhi <= vlo) return (x0 + x1) / 2.0;
      return x0 + (v - vlo) / (vhi - vlo) * (x1 - x0);
    };

    if (sd == 0.0) {
      // degenerate sample: a spike at the single value
      double pad = std::max(1.0, std::abs(mean)) * 0.2;
      double vlo = lo - pad, vhi = hi + pad;
      double xs = x_of(mean, vlo, vhi);
      out << "<line x1=\"" << num(xs) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(xs)
          << "\" y2=\"" << num(y1) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
      out << "</g>\n";
      continue;
    }

    double bw = silverman_bandwidth(panel.samples, sd);
    if (!(bw > 0.0)) bw = sd > 0.0 ? sd : 1.0;
    double vlo = lo - 3.0 * bw, vhi = hi + 3.0 * bw;
    constexpr std::size_t kGrid = 200;
    Vector dens(kGrid, 0.0);
    double dmax = 0.0;
    for (std::size_t g = 0; g < kGrid; ++g) {
      double xg = vlo + (vhi - vlo) * static_cast<double>(g) / (kGrid - 1);
      double s = 0.0;
      for (double v : panel.samples) {
        double zrel = (xg - v) / bw;
        s += std::exp(-0.5 * zrel * zrel);
      }
      dens[g] = s;
      dmax = std::max(dmax, s);
    }

    out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.2\" points=\"";
    for (std::size_t g = 0; g < kGrid; ++g) {
      double xg = vlo + (vhi - vlo) * static_cast<double>(g) / (kGrid - 1);
      double yg = y0 - (dmax > 0.0 ? dens[g] / dmax : 0.0) * (y0 - y1);
      out << num(x_of(xg, vlo, vhi)) << ',' << num(yg) << ' ';
    }
    out << "\"/>\n";

    if (panel.dotted_line) {
      double xs = x_of(*panel.dotted_line, vlo, vhi);
      out << "<line x1=\"" << num(xs) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(xs)
          << "\" y2=\"" << num(y1)
          << "\" stroke=\"blue\" stroke-width=\"1\" stroke-dasharray=\"4,3\"/>\n";
    }
    if (panel.solid_line) {
      double xs = x_of(*panel.solid_line, vlo, vhi);
      out << "<line x1=\"" << num(xs) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(xs)
          << "\" y2=\"" << num(y1) << "\" stroke=\"red\" stroke-width=\"1\"/>\n";
    }
    // x-axis end labels
    out << "<text x=\"" << num(x0) << "\" y=\"" << num(y0 + 14.0)
        << "\" font-family=\"sans-serif\" font-size=\"9\">" << num(vlo) << "</text>\n";
    out << "<text x=\"" << num(x1) << "\" y=\"" << num(y0 + 14.0)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"9\">" << num(vhi)
        << "</text>\n";
    out << "</g>\n";
  }
  out << "</svg>\n";
}

}  // namespace identlink
