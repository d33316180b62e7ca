#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ltpinn/ad.hpp"
#include "ltpinn/types.hpp"

namespace ltpinn {

/// Circle patch: learnable centre gamma, fixed unit diameter.
struct CirclePatch {
  Vec2 gamma;
  double diameter = 1.0;

  double radius() const { return 0.5 * diameter; }
};

/// Ring sample used by the boundary-condition losses. The sample is rigidly
/// attached to its owner: its current position is gamma_owner + offset().
struct BoundarySample {
  Vec2 position;  ///< position at creation time
  std::size_t owner = 0;
  double ring_radius = 0.5;
  double angle = 0.0;

  Vec2 offset() const;
  Vec2 position_for(Vec2 gamma) const { return gamma + offset(); }
};

class DegenerateNormalError : public NumericError {
 public:
  DegenerateNormalError() : NumericError("boundary normal undefined at the patch centre") {}
};

inline constexpr double kDefaultBeta = 100.0;

/// ||x - gamma|| - r: negative inside, zero on the boundary, positive outside.
template <class T>
T signed_distance(const Point<T>& gamma, const Point<T>& x, double radius = 0.5) {
  return ad::norm2(x.x - gamma.x, x.y - gamma.y) - T(radius);
}

inline double signed_distance(const CirclePatch& p, Vec2 x) {
  return std::hypot(x.x - p.gamma.x, x.y - p.gamma.y) - p.radius();
}

/// Sharpened indicator 1 / (1 + exp(-beta * sdf)); 0.5 on the boundary.
template <class T>
T delta_of_sdf(const T& sdf, double beta = kDefaultBeta) {
  using ad::sigmoid;
  return sigmoid(sdf * beta);
}

template <class T>
T delta(const Point<T>& gamma, const Point<T>& x, double beta = kDefaultBeta, double radius = 0.5) {
  return delta_of_sdf(signed_distance(gamma, x, radius), beta);
}

inline double delta(const CirclePatch& p, Vec2 x, double beta = kDefaultBeta) {
  return delta<double>(p.gamma, x, beta, p.radius());
}

/// Product over patches of delta^k.
template <class T>
T composite_delta(std::span<const Point<T>> gammas, const Point<T>& x, double k = 1.0,
                  double beta = kDefaultBeta, double radius = 0.5) {
  using ad::pow;
  if (gammas.empty()) throw ConfigError("composite_delta needs at least one patch");
  if (!(k > 0.0)) throw ConfigError("delta exponent k must be positive");
  T prod(1.0);
  for (const Point<T>& g : gammas) {
    const T d = delta(g, x, beta, radius);
    prod = prod * (k == 1.0 ? d : pow(d, k));
  }
  return prod;
}

double composite_delta(std::span<const CirclePatch> patches, Vec2 x, double k = 1.0,
                       double beta = kDefaultBeta);

/// Outward radial unit normal (x - gamma) / ||x - gamma||.
template <class T>
Point<T> boundary_normal(const Point<T>& gamma, const Point<T>& x) {
  const T dx = x.x - gamma.x;
  const T dy = x.y - gamma.y;
  if (ad::value_of(dx) == 0.0 && ad::value_of(dy) == 0.0) throw DegenerateNormalError();
  const T r = ad::norm2(dx, dy);
  return {dx / r, dy / r};
}

inline Vec2 boundary_normal(const CirclePatch& p, Vec2 x) { return boundary_normal<double>(p.gamma, x); }

/// n_per_ring equiangular samples on each ring centred on the patch.
std::vector<BoundarySample> sample_rings(const CirclePatch& patch, std::size_t owner,
                                         std::span<const double> radii, std::size_t n_per_ring);

/// Standard-normal draws mapped through the sigmoid onto the ROI box.
std::vector<Vec2> init_gamma(std::size_t n_patches, const Roi& roi, std::uint64_t seed);

/// Maps raw (unbounded) values onto the ROI box through the sigmoid.
Vec2 gamma_from_raw(Vec2 raw, const Roi& roi);

template <class T>
T patch_pair_distance(const Point<T>& a, const Point<T>& b) {
  return ad::norm2(a.x - b.x, a.y - b.y);
}

inline double patch_pair_distance(const CirclePatch& a, const CirclePatch& b) {
  return std::hypot(a.gamma.x - b.gamma.x, a.gamma.y - b.gamma.y);
}

/// JSON list of {center_x, center_y, diameter}.
std::string topology_json(std::span<const CirclePatch> patches);

/// SVG drawing of circles (and optional polylines) inside the ROI viewport.
std::string topology_svg(const Roi& roi, std::span<const CirclePatch> patches,
                         std::span<const std::vector<Vec2>> polylines = {});

}  // namespace ltpinn
