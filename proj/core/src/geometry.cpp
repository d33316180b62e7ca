#include "ltpinn/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ltpinn/io.hpp"
#include "ltpinn/rng.hpp"

namespace ltpinn {

Vec2 BoundarySample::offset() const {
  return {ring_radius * std::cos(angle), ring_radius * std::sin(angle)};
}

double composite_delta(std::span<const CirclePatch> patches, Vec2 x, double k, double beta) {
  std::vector<Vec2> g;
  g.reserve(patches.size());
  for (const auto& p : patches) g.push_back(p.gamma);
  return composite_delta<double>(std::span<const Vec2>(g), x, k, beta);
}

std::vector<BoundarySample> sample_rings(const CirclePatch& patch, std::size_t owner,
                                         std::span<const double> radii, std::size_t n_per_ring) {
  if (n_per_ring < 1) throw ConfigError("geometry.ring_points must be >= 1");
  std::vector<BoundarySample> out;
  out.reserve(radii.size() * n_per_ring);
  for (double r : radii) {
    if (!(r > 0.0 && r <= patch.radius()))
      throw ConfigError("ring radius " + format_real(r) + " outside (0, " +
                        format_real(patch.radius()) + "]");
    for (std::size_t i = 0; i < n_per_ring; ++i) {
      BoundarySample s;
      s.owner = owner;
      s.ring_radius = r;
      s.angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_per_ring);
      s.position = patch.gamma + s.offset();
      out.push_back(s);
    }
  }
  return out;
}

Vec2 gamma_from_raw(Vec2 raw, const Roi& roi) {
  return {roi.x_min + roi.width() * ad::sigmoid(raw.x), roi.y_min + roi.height() * ad::sigmoid(raw.y)};
}

std::vector<Vec2> init_gamma(std::size_t n_patches, const Roi& roi, std::uint64_t seed) {
  if (n_patches < 1) throw ConfigError("geometry.patches must be >= 1");
  if (!roi.valid()) throw ConfigError("degenerate ROI for gamma initialisation");
  Rng rng = Rng::stream(seed, Stream::GammaInit);
  std::vector<Vec2> out;
  out.reserve(n_patches);
  for (std::size_t i = 0; i < n_patches; ++i) {
    const double rx = rng.normal();
    const double ry = rng.normal();
    out.push_back(gamma_from_raw({rx, ry}, roi));
  }
  return out;
}

std::string topology_json(std::span<const CirclePatch> patches) {
  std::string out = "[";
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const auto& p = patches[i];
    out += i == 0 ? "\n" : ",\n";
    out += "  {\"center_x\": " + json_number(p.gamma.x) + ", \"center_y\": " + json_number(p.gamma.y) +
           ", \"diameter\": " + json_number(p.diameter) + "}";
  }
  out += patches.empty() ? "]\n" : "\n]\n";
  return out;
}

std::string topology_svg(const Roi& roi, std::span<const CirclePatch> patches,
                         std::span<const std::vector<Vec2>> polylines) {
  // SVG y axis points down; flip so the drawing matches the ROI orientation.
  std::ostringstream os;
  const double stroke = 0.01 * std::max(roi.width(), roi.height());
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_real(roi.x_min) << ' '
     << format_real(-roi.y_max) << ' ' << format_real(roi.width()) << ' ' << format_real(roi.height())
     << "\" width=\"600\" height=\"" << static_cast<int>(600.0 * roi.height() / roi.width()) << "\">\n";
  os << "  <rect x=\"" << format_real(roi.x_min) << "\" y=\"" << format_real(-roi.y_max)
     << "\" width=\"" << format_real(roi.width()) << "\" height=\"" << format_real(roi.height())
     << "\" fill=\"white\" stroke=\"black\" stroke-width=\"" << format_real(stroke) << "\"/>\n";
  for (const auto& p : patches) {
    os << "  <circle cx=\"" << format_real(p.gamma.x) << "\" cy=\"" << format_real(-p.gamma.y)
       << "\" r=\"" << format_real(p.radius()) << "\" fill=\"gray\" fill-opacity=\"0.6\" stroke=\"black\""
       << " stroke-width=\"" << format_real(stroke) << "\"/>\n";
  }
  for (const auto& line : polylines) {
    os << "  <polyline fill=\"none\" stroke=\"red\" stroke-width=\"" << format_real(stroke) << "\" points=\"";
    for (const auto& q : line) os << format_real(q.x) << ',' << format_real(-q.y) << ' ';
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace ltpinn
