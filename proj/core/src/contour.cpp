#include "ltpinn/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "ltpinn/io.hpp"

namespace ltpinn {

Vec2 ScalarGrid::point(std::size_t i, std::size_t j) const {
  const double x = i + 1 == nx ? region.x_max : region.x_min + region.width() * static_cast<double>(i) / (nx - 1);
  const double y = j + 1 == ny ? region.y_max : region.y_min + region.height() * static_cast<double>(j) / (ny - 1);
  return {x, y};
}

std::vector<unsigned char> largest_component(const ScalarGrid& g, double threshold) {
  const std::size_t n = g.nx * g.ny;
  if (g.values.size() != n) throw ConfigError("scalar grid has inconsistent size");
  std::vector<int> label(n, -1);
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] >= 0 || !(g.values[s] >= threshold)) continue;
    const int id = static_cast<int>(sizes.size());
    std::size_t count = 0;
    stack.push_back(s);
    label[s] = id;
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      ++count;
      const std::size_t i = k % g.nx;
      const std::size_t j = k / g.nx;
      auto visit = [&](std::size_t kk) {
        if (label[kk] < 0 && g.values[kk] >= threshold) {
          label[kk] = id;
          stack.push_back(kk);
        }
      };
      if (i > 0) visit(k - 1);
      if (i + 1 < g.nx) visit(k + 1);
      if (j > 0) visit(k - g.nx);
      if (j + 1 < g.ny) visit(k + g.nx);
    }
    sizes.push_back(count);
  }
  std::vector<unsigned char> mask(n, 0);
  if (sizes.empty()) return mask;
  int best = 0;
  for (std::size_t c = 1; c < sizes.size(); ++c)
    if (sizes[c] > sizes[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  for (std::size_t k = 0; k < n; ++k) mask[k] = label[k] == best ? 1 : 0;
  return mask;
}

std::vector<std::vector<Vec2>> marching_squares(const ScalarGrid& g, double thr) {
  if (g.nx < 2 || g.ny < 2 || g.values.size() != g.nx * g.ny) throw ConfigError("marching_squares: bad grid");
  // Edge ids: 2*(j*nx+i) is the edge (i,j)-(i+1,j), +1 the edge (i,j)-(i,j+1).
  auto h_edge = [&](std::size_t i, std::size_t j) { return 2 * (j * g.nx + i); };
  auto v_edge = [&](std::size_t i, std::size_t j) { return 2 * (j * g.nx + i) + 1; };
  std::map<std::size_t, Vec2> where;
  auto crossing = [&](std::size_t id) {
    auto it = where.find(id);
    if (it != where.end()) return;
    const std::size_t node = id / 2;
    const std::size_t i = node % g.nx;
    const std::size_t j = node / g.nx;
    const std::size_t i2 = id % 2 == 0 ? i + 1 : i;
    const std::size_t j2 = id % 2 == 0 ? j : j + 1;
    const double a = g.at(i, j);
    const double b = g.at(i2, j2);
    const double t = a == b ? 0.5 : std::clamp((thr - a) / (b - a), 0.0, 1.0);
    const Vec2 pa = g.point(i, j);
    const Vec2 pb = g.point(i2, j2);
    where[id] = pa + t * (pb - pa);
  };

  std::vector<std::pair<std::size_t, std::size_t>> segs;
  for (std::size_t j = 0; j + 1 < g.ny; ++j) {
    for (std::size_t i = 0; i + 1 < g.nx; ++i) {
      const double v0 = g.at(i, j);
      const double v1 = g.at(i + 1, j);
      const double v2 = g.at(i + 1, j + 1);
      const double v3 = g.at(i, j + 1);
      const int code = (v0 >= thr ? 1 : 0) | (v1 >= thr ? 2 : 0) | (v2 >= thr ? 4 : 0) | (v3 >= thr ? 8 : 0);
      if (code == 0 || code == 15) continue;
      const std::size_t bottom = h_edge(i, j);
      const std::size_t right = v_edge(i + 1, j);
      const std::size_t top = h_edge(i, j + 1);
      const std::size_t left = v_edge(i, j);
      auto add = [&](std::size_t a, std::size_t b) {
        crossing(a);
        crossing(b);
        segs.emplace_back(a, b);
      };
      const bool centre_in = 0.25 * (v0 + v1 + v2 + v3) >= thr;
      switch (code) {
        case 1: case 14: add(left, bottom); break;
        case 2: case 13: add(bottom, right); break;
        case 3: case 12: add(left, right); break;
        case 4: case 11: add(right, top); break;
        case 6: case 9: add(bottom, top); break;
        case 7: case 8: add(left, top); break;
        case 5:
          if (centre_in) {
            add(left, top);
            add(bottom, right);
          } else {
            add(left, bottom);
            add(right, top);
          }
          break;
        case 10:
          if (centre_in) {
            add(left, bottom);
            add(right, top);
          } else {
            add(left, top);
            add(bottom, right);
          }
          break;
        default:
          break;
      }
    }
  }

  // Chain segments sharing an edge crossing.
  std::map<std::size_t, std::vector<std::size_t>> touching;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    touching[segs[s].first].push_back(s);
    touching[segs[s].second].push_back(s);
  }
  std::vector<unsigned char> used(segs.size(), 0);
  auto next_from = [&](std::size_t edge) -> std::ptrdiff_t {
    for (std::size_t s : touching[edge])
      if (!used[s]) return static_cast<std::ptrdiff_t>(s);
    return -1;
  };
  std::vector<std::vector<Vec2>> lines;
  auto build = [&](std::size_t s0, std::size_t start_edge) {
    std::vector<std::size_t> chain{start_edge};
    std::size_t edge = start_edge;
    std::ptrdiff_t s = static_cast<std::ptrdiff_t>(s0);
    while (s >= 0) {
      used[static_cast<std::size_t>(s)] = 1;
      const auto& seg = segs[static_cast<std::size_t>(s)];
      edge = seg.first == edge ? seg.second : seg.first;
      chain.push_back(edge);
      s = next_from(edge);
    }
    std::vector<Vec2> pts;
    pts.reserve(chain.size());
    for (std::size_t e : chain) pts.push_back(where[e]);
    lines.push_back(std::move(pts));
  };
  // Open chains first (start at an end point used by exactly one segment), then loops.
  for (const auto& [edge, list] : touching)
    if (list.size() == 1 && !used[list[0]]) build(list[0], edge);
  for (std::size_t s = 0; s < segs.size(); ++s)
    if (!used[s]) build(s, segs[s].first);
  return lines;
}

DensityTopology extract_density_topology(const ScalarGrid& density, double threshold) {
  DensityTopology t;
  t.threshold = threshold;
  const std::vector<unsigned char> mask = largest_component(density, threshold);
  for (unsigned char m : mask) t.nodes += m;
  if (t.nodes == 0) return t;
  ScalarGrid kept = density;
  const double below = std::nextafter(threshold, -std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < kept.values.size(); ++k)
    if (!mask[k]) kept.values[k] = std::min(kept.values[k], below);
  t.polylines = marching_squares(kept, threshold);
  t.status = DensityTopology::Status::Ok;
  return t;
}

std::string density_topology_json(const DensityTopology& t) {
  std::string out = "{\"status\": ";
  out += t.status == DensityTopology::Status::Ok ? "\"ok\"" : "\"empty\"";
  out += ", \"threshold\": " + json_number(t.threshold) + ", \"nodes\": " + std::to_string(t.nodes) +
         ", \"polylines\": [";
  for (std::size_t l = 0; l < t.polylines.size(); ++l) {
    out += l == 0 ? "[" : ", [";
    for (std::size_t i = 0; i < t.polylines[l].size(); ++i) {
      const Vec2 p = t.polylines[l][i];
      out += (i == 0 ? "[" : ", [") + json_number(p.x) + ", " + json_number(p.y) + "]";
    }
    out += "]";
  }
  out += "]}";
  return out;
}

std::string density_sweep_json(const std::vector<DensityTopology>& sweep) {
  std::string out = "[";
  for (std::size_t i = 0; i < sweep.size(); ++i) out += (i == 0 ? "\n  " : ",\n  ") + density_topology_json(sweep[i]);
  out += sweep.empty() ? "]\n" : "\n]\n";
  return out;
}

}  // namespace ltpinn
