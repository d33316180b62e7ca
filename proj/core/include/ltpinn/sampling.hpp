#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ltpinn/geometry.hpp"
#include "ltpinn/types.hpp"

namespace ltpinn {

/// Sparse observation of the solution; unobserved components are empty.
struct Measurement {
  Vec2 point;
  std::vector<std::optional<double>> values;
};

/// Derivative-type data on the ROI edges, fitted through the data loss.
struct EdgeConstraint {
  enum class Kind {
    NormalDerivative,  ///< d u[component] / dn = value[0]
    Traction,          ///< elastic sigma . n = (value[0], value[1])
  };
  Kind kind = Kind::NormalDerivative;
  Vec2 point;
  Vec2 normal;
  int component = 0;
  double value[2] = {0.0, 0.0};

  int entries() const { return kind == Kind::Traction ? 2 : 1; }
};

/// u[component](a) = u[component](b).
struct PeriodicPair {
  Vec2 a;
  Vec2 b;
  int component = 0;
};

struct SampleSet {
  std::vector<Vec2> collocation;
  std::vector<Measurement> measurements;
  std::vector<EdgeConstraint> edges;
  std::vector<PeriodicPair> periodic;
  std::vector<BoundarySample> boundary;
  Roi roi;
  Roi core;
  /// Measurement points must avoid the core region.
  bool measurements_outside_core = false;

  /// Scalar data entries: observed measurement components, edge entries and
  /// periodic pairs.
  std::size_t data_entries() const;
  /// Pads or trims measurement vectors to out_dim (trimmed columns must be empty).
  void fit_arity(int out_dim);
  /// Throws ConfigError on any violated invariant.
  void validate(int out_dim) const;
};

/// nx * ny points including the corners, x fastest (row-major over y).
std::vector<Vec2> uniform_grid(const Roi& region, std::size_t nx, std::size_t ny);

/// i.i.d. uniform points drawn from Rng(seed).
std::vector<Vec2> random_points(const Roi& region, std::size_t n, std::uint64_t seed);

/// Rejection sampling of uniform points satisfying `accept`.
std::vector<Vec2> random_points_where(const Roi& region, std::size_t n, std::uint64_t seed,
                                      const std::function<bool(Vec2)>& accept);

/// Uniform subset without replacement (partial Fisher-Yates on Rng(seed)).
std::vector<Vec2> subsample(std::span<const Vec2> points, std::size_t n, std::uint64_t seed);

/// Pads the bounding box of the patch centres by 1.1 D (roi) and 1.0 D (core).
std::pair<Roi, Roi> build_multi_patch_roi(const Roi& center_extents, double diameter = 1.0);
Roi bounding_box(std::span<const Vec2> points);

/// CSV with header x,y,role,v0,v1,... Role-specific columns:
///   collocation                       -
///   measurement                       v_k = component k (empty = unobserved)
///   boundary                          owner, ring_radius, angle
///   edge_flux                         component, nx, ny, q
///   edge_traction                     nx, ny, tx, ty
///   periodic (x,y = a)                bx, by, component
///   roi / core (x,y = lower corner)   x_max, y_max
void write_sample_csv(const std::filesystem::path& path, const SampleSet& set);
SampleSet read_sample_csv(const std::filesystem::path& path);

}  // namespace ltpinn
