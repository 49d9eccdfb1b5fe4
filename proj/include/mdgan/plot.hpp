#pragma once

#include <iosfwd>
#include <string>

#include "mdgan/tensor.hpp"

namespace mdgan {

struct ScatterPlot {
  std::string title;
  Matrix real;      // drawn gray
  Matrix generated; // drawn colored
  Matrix centers;   // drawn as crosses
  double extent = 6.0;  // view is [-extent, extent]^2
  int size_px = 480;
};

// Self-contained SVG document. Output depends only on the inputs, so equal
// plots are byte-identical.
void write_svg(std::ostream& os, const ScatterPlot& plot);

}  // namespace mdgan
