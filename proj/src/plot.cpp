#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "erfreg/experiments.hpp"

namespace erfreg {

void write_gnuplot_data(const std::string& path, const std::vector<PlotSeries>& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  // One index block per series, separated by two blank lines.
  for (const auto& s : series) {
    out << "# " << s.label << '\n';
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      out << format_number(s.x[i]) << ' ' << format_number(s.y[i]) << '\n';
    out << "\n\n";
  }
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string r;
  for (char c : s) {
    switch (c) {
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      case '&': r += "&amp;"; break;
      default: r += c;
    }
  }
  return r;
}

}  // namespace

void write_svg_loglog(const std::string& path, const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<PlotSeries>& series) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0) || !(s.y[i] > 0)) continue;
      xmin = std::min(xmin, std::log10(s.x[i]));
      xmax = std::max(xmax, std::log10(s.x[i]));
      ymin = std::min(ymin, std::log10(s.y[i]));
      ymax = std::max(ymax, std::log10(s.y[i]));
    }
  if (!(xmax >= xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  xmin = std::floor(xmin * 10) / 10 - 0.05;
  xmax = std::ceil(xmax * 10) / 10 + 0.05;
  ymin = std::floor(ymin) - 0.1;
  ymax = std::ceil(ymax) + 0.1;

  const double W = 640, H = 480, L = 80, R = 160, T = 40, B = 60;
  auto px = [&](double lx) { return L + (lx - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double ly) { return H - B - (ly - ymin) / (ymax - ymin) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2",
                                 "#7f7f7f"};

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int d = int(std::ceil(ymin)); d <= int(std::floor(ymax)); ++d)
    out << "<text x=\"" << L - 8 << "\" y=\"" << py(d) + 4 << "\" font-size=\"11\" text-anchor=\"end\">1e" << d
        << "</text>\n";
  char buf[32];
  for (int i = 0; i <= 4; ++i) {
    const double lx = xmin + (xmax - xmin) * i / 4.0;
    std::snprintf(buf, sizeof buf, "%.3g", std::pow(10.0, lx));
    out << "<text x=\"" << px(lx) << "\" y=\"" << H - B + 16 << "\" font-size=\"11\" text-anchor=\"middle\">" << buf
        << "</text>\n";
  }
  out << "<text x=\"" << W / 2 << "\" y=\"22\" font-size=\"14\" text-anchor=\"middle\">" << escape_xml(title)
      << "</text>\n";
  out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 16 << "\" font-size=\"12\" text-anchor=\"middle\">"
      << escape_xml(xlabel) << "</text>\n";
  out << "<text x=\"18\" y=\"" << H / 2 << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << H / 2 << ")\">" << escape_xml(ylabel) << "</text>\n";
  for (std::size_t n = 0; n < series.size(); ++n) {
    const auto& s = series[n];
    const char* c = colors[n % 8];
    out << "<polyline fill=\"none\" stroke=\"" << c << "\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (s.x[i] > 0 && s.y[i] > 0) out << px(std::log10(s.x[i])) << ',' << py(std::log10(s.y[i])) << ' ';
    out << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (s.x[i] > 0 && s.y[i] > 0)
        out << "<circle cx=\"" << px(std::log10(s.x[i])) << "\" cy=\"" << py(std::log10(s.y[i]))
            << "\" r=\"3\" fill=\"" << c << "\"/>\n";
    out << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 + 16 * n << "\" font-size=\"11\" fill=\"" << c << "\">"
        << escape_xml(s.label) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace erfreg
