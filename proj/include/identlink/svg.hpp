#ifndef IDENTLINK_SVG_HPP
#define IDENTLINK_SVG_HPP

#include <optional>
#include <string>
#include <vector>

#include "identlink/linalg.hpp"

namespace identlink {

// One kernel-density panel.  The dotted line marks a predictive mean,
// the solid line an observed mean.
struct DensityPanel {
  std::string label;
  Vector samples;
  std::optional<double> dotted_line;
  std::optional<double> solid_line;
};

// Static SVG with one <g> group per panel, laid out row-major in
// n_cols columns.  Degenerate samples render as a spike, empty panels
// as a "no data" label.
void emit_density_svg(const std::vector<DensityPanel>& panels, std::size_t n_cols,
                      const std::string& title, const std::string& path);

}  // namespace identlink

#endif  // IDENTLINK_SVG_HPP
