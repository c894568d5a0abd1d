#include "ensemble/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

namespace ens {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s == "-0" ? "0" : s;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_surface_svg(const SurfaceGrid& grid, const LabeledDataset* training, const std::string& title) {
  const int size = SvgPalette::kCanvas;
  const int r = grid.resolution;
  if (r < 1 || grid.labels.rows() != r || grid.labels.cols() != r) throw InvalidInput("grid is empty or inconsistent");
  const double cell = static_cast<double>(size) / r;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << ' ' << size << "\" shape-rendering=\"crispEdges\">\n";
  if (!title.empty()) out << "<title>" << escape(title) << "</title>\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << size << "\" height=\"" << size << "\" fill=\"" << SvgPalette::kPlusRegion
      << "\"/>\n";
  out << "<g fill=\"" << SvgPalette::kMinusRegion << "\">\n";
  for (int iy = 0; iy < r; ++iy) {
    // Row iy = 0 is the bottom of the square.
    const double top = (r - 1 - iy) * cell;
    for (int ix = 0; ix < r;) {
      if (grid.labels(iy, ix) != kNegative) {
        ++ix;
        continue;
      }
      int end = ix;
      while (end < r && grid.labels(iy, end) == kNegative) ++end;
      out << "<rect x=\"" << num(ix * cell) << "\" y=\"" << num(top) << "\" width=\"" << num((end - ix) * cell)
          << "\" height=\"" << num(cell) << "\"/>\n";
      ix = end;
    }
  }
  out << "</g>\n";
  if (training != nullptr && training->dim() == 2) {
    const Bounds& b = grid.bounds;
    for (Index i = 0; i < training->size(); ++i) {
      const double x = training->features()(i, 0);
      const double y = training->features()(i, 1);
      if (x < b.x0 || x > b.x1 || y < b.y0 || y > b.y1) continue;
      const double px = (x - b.x0) / (b.x1 - b.x0) * size;
      const double py = (1.0 - (y - b.y0) / (b.y1 - b.y0)) * size;
      out << "<circle cx=\"" << num(px) << "\" cy=\"" << num(py) << "\" r=\"3\" fill=\""
          << (training->label(i) == kPositive ? SvgPalette::kPlusPoint : SvgPalette::kMinusPoint) << "\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_curves_svg(const std::vector<CurveSeries>& series, const std::string& title,
                              const std::string& x_label, const std::string& y_label) {
  const int size = SvgPalette::kCanvas;
  const double left = 70;
  const double right = size - 20;
  const double top = 40;
  const double bottom = size - 50;
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y1 = 0.0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw InvalidInput("curve series needs matching x and y");
    for (double v : s.x) {
      x0 = std::min(x0, v);
      x1 = std::max(x1, v);
    }
    for (double v : s.y) y1 = std::max(y1, v);
  }
  if (!(x1 > x0)) {
    x0 = 0.0;
    x1 = std::max(1.0, x1);
  }
  if (!(y1 > 0.0)) y1 = 1.0;
  y1 *= 1.05;
  auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * (right - left); };
  auto py = [&](double v) { return bottom - v / y1 * (bottom - top); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
      << size << ' ' << size << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << size << "\" height=\"" << size << "\" fill=\"#FFFFFF\"/>\n";
  out << "<text x=\"" << size / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title) << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\"" << bottom
      << "\" stroke=\"#000000\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom
      << "\" stroke=\"#000000\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0;
    const double yv = y1 * t / 4.0;
    out << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(bottom + 16) << "\" text-anchor=\"middle\">" << num(xv)
        << "</text>\n";
    out << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
        << "</text>\n";
  }
  out << "<text x=\"" << num((left + right) / 2) << "\" y=\"" << size - 12 << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << num((top + bottom) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num((top + bottom) / 2) << ")\">" << escape(y_label) << "</text>\n";
  int legend = 0;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < s.x.size(); ++k) out << (k ? " " : "") << num(px(s.x[k])) << ',' << num(py(s.y[k]));
    out << "\"/>\n";
    const double ly = top + 14 + 16 * legend++;
    out << "<line x1=\"" << num(right - 150) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(right - 130)
        << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(right - 125) << "\" y=\"" << num(ly) << "\">" << escape(s.name) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace ens
