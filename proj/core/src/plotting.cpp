#include "reldiff/plotting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "reldiff/error.hpp"

namespace reldiff {

void write_plot_data(std::ostream& os, const Series& series, const std::string& x_label, const std::string& y_label) {
  if (series.x.size() != series.y.size()) throw ValidationError("plot series has mismatched x and y lengths");
  char buf[64];
  os << "# " << x_label << ' ' << y_label << '\n';
  for (std::size_t i = 0; i < series.x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", series.x[i], series.y[i]);
    os << buf;
  }
}

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

std::string render_svg(const std::vector<Series>& series, const ChartOptions& o) {
  auto tx = [&](double v) { return o.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return o.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!o.log_x || x > 0.0) && (!o.log_y || y > 0.0);
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw ValidationError("plot series has mismatched x and y lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!(x1 >= x0)) x0 = 0.0, x1 = 1.0;
  if (!(y1 >= y0)) y0 = 0.0, y1 = 1.0;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;

  const double ml = 70, mr = 20, mt = 36, mb = 50;
  const double pw = o.width - ml - mr, ph = o.height - mt - mb;
  auto px = [&](double v) { return ml + (tx(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return mt + (1.0 - (ty(v) - y0) / (y1 - y0)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\"" << o.height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << o.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(o.title)
     << "</text>\n";
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
    const double lx = o.log_x ? std::pow(10.0, fx) : fx, ly = o.log_y ? std::pow(10.0, fy) : fy;
    os << "<text x=\"" << ml + pw * i / 4.0 << "\" y=\"" << mt + ph + 16 << "\" text-anchor=\"middle\">" << fmt(lx)
       << "</text>\n";
    os << "<text x=\"" << ml - 6 << "\" y=\"" << mt + ph * (1.0 - i / 4.0) + 4 << "\" text-anchor=\"end\">" << fmt(ly)
       << "</text>\n";
  }
  os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << o.height - 10 << "\" text-anchor=\"middle\">" << escape(o.x_label)
     << "</text>\n";
  os << "<text x=\"14\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << mt + ph / 2
     << ")\">" << escape(o.y_label) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kColors[k % (sizeof kColors / sizeof *kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (usable(s.x[i], s.y[i])) os << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << ml + 8 << "\" y=\"" << mt + 16 + 14 * k << "\" fill=\"" << color << "\">"
       << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace reldiff
