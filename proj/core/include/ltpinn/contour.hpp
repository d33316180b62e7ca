#pragma once

#include <string>
#include <vector>

#include "ltpinn/types.hpp"

namespace ltpinn {

/// Node values on a uniform grid, x fastest: values[j * nx + i].
struct ScalarGrid {
  Roi region;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[j * nx + i]; }
  Vec2 point(std::size_t i, std::size_t j) const;
};

/// Mask of the largest 4-connected set of nodes with value >= threshold
/// (empty mask when no node reaches the threshold).
std::vector<unsigned char> largest_component(const ScalarGrid& grid, double threshold);

/// Iso-contour at `threshold`, chained into polylines. Closed loops repeat
/// their first point at the end.
std::vector<std::vector<Vec2>> marching_squares(const ScalarGrid& grid, double threshold);

struct DensityTopology {
  enum class Status { Ok, Empty };
  Status status = Status::Empty;
  double threshold = 0.5;
  std::size_t nodes = 0;  ///< nodes in the retained component
  std::vector<std::vector<Vec2>> polylines;
};

/// Threshold, keep the largest component, contour it.
DensityTopology extract_density_topology(const ScalarGrid& density, double threshold);

/// JSON object {"status", "threshold", "nodes", "polylines": [[[x, y], ...], ...]}.
std::string density_topology_json(const DensityTopology& topo);
/// JSON array of density_topology_json objects, one per threshold.
std::string density_sweep_json(const std::vector<DensityTopology>& sweep);

}  // namespace ltpinn
