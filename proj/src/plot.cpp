#include "mdgan/plot.hpp"

#include <cstdio>
#include <ostream>
#include <string>

namespace mdgan {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

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

void write_svg(std::ostream& os, const ScatterPlot& p) {
  const double margin = 24.0;
  const double plot_px = static_cast<double>(p.size_px);
  const double total = plot_px + 2.0 * margin;
  const double scale = plot_px / (2.0 * p.extent);
  const auto px = [&](double x) { return margin + (x + p.extent) * scale; };
  const auto py = [&](double y) { return margin + (p.extent - y) * scale; };
  const auto inside = [&](double x, double y) {
    return x >= -p.extent && x <= p.extent && y >= -p.extent && y <= p.extent;
  };

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(total) << "\" height=\""
     << num(total) << "\" viewBox=\"0 0 " << num(total) << ' ' << num(total) << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << num(total) << "\" height=\"" << num(total)
     << "\" fill=\"white\"/>\n"
     << "<rect x=\"" << num(margin) << "\" y=\"" << num(margin) << "\" width=\"" << num(plot_px)
     << "\" height=\"" << num(plot_px) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  if (!p.title.empty())
    os << "<text x=\"" << num(total / 2.0) << "\" y=\"" << num(margin * 0.7)
       << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
       << escape(p.title) << "</text>\n";

  const auto points = [&](const Matrix& m, const char* id, const char* fill, double radius,
                          double opacity) {
    os << "<g id=\"" << id << "\" fill=\"" << fill << "\" fill-opacity=\"" << num(opacity)
       << "\">\n";
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (m.cols() < 2 || !inside(m(r, 0), m(r, 1))) continue;
      os << "<circle cx=\"" << num(px(m(r, 0))) << "\" cy=\"" << num(py(m(r, 1))) << "\" r=\""
         << num(radius) << "\"/>\n";
    }
    os << "</g>\n";
  };
  points(p.real, "real", "#9a9a9a", 1.6, 0.5);
  points(p.generated, "generated", "#1f77b4", 1.6, 0.7);

  os << "<g id=\"centers\" stroke=\"#d62728\" stroke-width=\"1.5\">\n";
  for (std::size_t r = 0; r < p.centers.rows(); ++r) {
    if (p.centers.cols() < 2) break;
    const double cx = px(p.centers(r, 0));
    const double cy = py(p.centers(r, 1));
    os << "<line x1=\"" << num(cx - 4) << "\" y1=\"" << num(cy - 4) << "\" x2=\"" << num(cx + 4)
       << "\" y2=\"" << num(cy + 4) << "\"/>\n"
       << "<line x1=\"" << num(cx - 4) << "\" y1=\"" << num(cy + 4) << "\" x2=\"" << num(cx + 4)
       << "\" y2=\"" << num(cy - 4) << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
}

}  // namespace mdgan
