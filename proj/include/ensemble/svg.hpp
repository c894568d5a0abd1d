#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ensemble/analysis.hpp"
#include "ensemble/data_model.hpp"

namespace ens {

/// Fixed canvas and palette shared by every surface figure.
struct SvgPalette {
  static constexpr int kCanvas = 600;
  static constexpr const char* kPlusRegion = "#ADD8E6";
  static constexpr const char* kMinusRegion = "#FFC0CB";
  static constexpr const char* kPlusPoint = "#0000FF";
  static constexpr const char* kMinusPoint = "#FF0000";
};

/// Decision surface as colored cells (runs of equal cells within a row share
/// one rect), with the training points inside the grid bounds drawn on top.
std::string render_surface_svg(const SurfaceGrid& grid, const LabeledDataset* training = nullptr,
                               const std::string& title = "");

struct CurveSeries {
  std::string name;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

/// Line chart of one or more series on shared axes.
std::string render_curves_svg(const std::vector<CurveSeries>& series, const std::string& title,
                              const std::string& x_label, const std::string& y_label);

}  // namespace ens
