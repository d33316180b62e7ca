#include "ltpinn/sampling.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "ltpinn/io.hpp"
#include "ltpinn/rng.hpp"

namespace ltpinn {

std::size_t SampleSet::data_entries() const {
  std::size_t n = periodic.size();
  for (const auto& m : measurements)
    for (const auto& v : m.values) n += v.has_value() ? 1 : 0;
  for (const auto& e : edges) n += static_cast<std::size_t>(e.entries());
  return n;
}

void SampleSet::fit_arity(int out_dim) {
  for (auto& m : measurements) {
    for (std::size_t k = static_cast<std::size_t>(out_dim); k < m.values.size(); ++k)
      if (m.values[k]) throw ConfigError("sample set: measurement has more components than the solution");
    m.values.resize(static_cast<std::size_t>(out_dim));
  }
}

void SampleSet::validate(int out_dim) const {
  if (!roi.valid()) throw ConfigError("sample set: degenerate roi");
  if (!core.valid()) throw ConfigError("sample set: degenerate core");
  for (const Vec2& p : collocation) {
    if (!roi.contains(p)) throw ConfigError("sample set: collocation point outside roi");
    if (!core.contains(p)) throw ConfigError("sample set: collocation point outside core");
  }
  for (const auto& m : measurements) {
    if (!roi.contains(m.point)) throw ConfigError("sample set: measurement outside roi");
    if (measurements_outside_core && m.point.x > core.x_min &&
        m.point.x < core.x_max && m.point.y > core.y_min && m.point.y < core.y_max)
      throw ConfigError("sample set: measurement inside core region");
    if (static_cast<int>(m.values.size()) != out_dim)
      throw ConfigError("sample set: measurement has " + std::to_string(m.values.size()) +
                        " components, expected " + std::to_string(out_dim));
  }
  for (const auto& e : edges) {
    if (!roi.contains(e.point)) throw ConfigError("sample set: edge constraint outside roi");
    if (e.kind == EdgeConstraint::Kind::NormalDerivative && (e.component < 0 || e.component >= out_dim))
      throw ConfigError("sample set: edge constraint component out of range");
    if (e.kind == EdgeConstraint::Kind::Traction && out_dim != 2)
      throw ConfigError("sample set: traction constraints need a 2-component displacement");
    if (std::abs(norm(e.normal) - 1.0) > 1e-9) throw ConfigError("sample set: edge normal is not unit length");
  }
  for (const auto& p : periodic) {
    if (!roi.contains(p.a) || !roi.contains(p.b)) throw ConfigError("sample set: periodic point outside roi");
    if (p.component < 0 || p.component >= out_dim)
      throw ConfigError("sample set: periodic component out of range");
  }
}

std::vector<Vec2> uniform_grid(const Roi& region, std::size_t nx, std::size_t ny) {
  if (!region.valid()) throw ConfigError("uniform_grid: degenerate region");
  if (nx < 2 || ny < 2) throw ConfigError("uniform_grid: nx and ny must be >= 2");
  const double hx = region.width() / static_cast<double>(nx - 1);
  const double hy = region.height() / static_cast<double>(ny - 1);
  std::vector<Vec2> out;
  out.reserve(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    const double y = j + 1 == ny ? region.y_max : region.y_min + hy * static_cast<double>(j);
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = i + 1 == nx ? region.x_max : region.x_min + hx * static_cast<double>(i);
      out.push_back({x, y});
    }
  }
  return out;
}

std::vector<Vec2> random_points(const Roi& region, std::size_t n, std::uint64_t seed) {
  return random_points_where(region, n, seed, [](Vec2) { return true; });
}

std::vector<Vec2> random_points_where(const Roi& region, std::size_t n, std::uint64_t seed,
                                      const std::function<bool(Vec2)>& accept) {
  if (n > 0 && !region.valid()) throw ConfigError("random_points: degenerate region");
  Rng rng(seed);
  std::vector<Vec2> out;
  out.reserve(n);
  const std::size_t max_attempts = 1000 * n + 1000;
  std::size_t attempts = 0;
  while (out.size() < n) {
    if (++attempts > max_attempts)
      throw ConfigError("random_points: acceptance region too small for " + std::to_string(n) + " points");
    const Vec2 p{rng.uniform(region.x_min, region.x_max), rng.uniform(region.y_min, region.y_max)};
    if (accept(p)) out.push_back(p);
  }
  return out;
}

std::vector<Vec2> subsample(std::span<const Vec2> points, std::size_t n, std::uint64_t seed) {
  if (n > points.size())
    throw ConfigError("subsample: requested " + std::to_string(n) + " of " + std::to_string(points.size()) +
                      " points");
  std::vector<std::size_t> idx(points.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.below(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }
  std::vector<Vec2> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(points[idx[i]]);
  return out;
}

std::pair<Roi, Roi> build_multi_patch_roi(const Roi& e, double diameter) {
  if (!(e.x_min <= e.x_max && e.y_min <= e.y_max)) throw ConfigError("build_multi_patch_roi: invalid extents");
  const double pr = 1.1 * diameter;
  const double pc = 1.0 * diameter;
  Roi roi{e.x_min - pr, e.x_max + pr, e.y_min - pr, e.y_max + pr};
  Roi core{e.x_min - pc, e.x_max + pc, e.y_min - pc, e.y_max + pc};
  return {roi, core};
}

Roi bounding_box(std::span<const Vec2> points) {
  if (points.empty()) throw ConfigError("bounding_box: no points");
  Roi b{points[0].x, points[0].x, points[0].y, points[0].y};
  for (const Vec2& p : points) {
    b.x_min = std::min(b.x_min, p.x);
    b.x_max = std::max(b.x_max, p.x);
    b.y_min = std::min(b.y_min, p.y);
    b.y_max = std::max(b.y_max, p.y);
  }
  return b;
}

// ---------------------------------------------------------------------------
// CSV.

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

void row(std::ostream& os, Vec2 p, const char* role, std::initializer_list<std::string> vals, std::size_t width) {
  os << format_real(p.x) << ',' << format_real(p.y) << ',' << role;
  std::size_t n = 0;
  for (const auto& v : vals) {
    os << ',' << v;
    ++n;
  }
  for (; n < width; ++n) os << ',';
  os << '\n';
}

}  // namespace

void write_sample_csv(const std::filesystem::path& path, const SampleSet& set) {
  std::size_t width = 4;
  for (const auto& m : set.measurements) width = std::max(width, m.values.size());
  std::ofstream os = open_output(path);
  os << "x,y,role";
  for (std::size_t k = 0; k < width; ++k) os << ",v" << k;
  os << '\n';
  row(os, {set.roi.x_min, set.roi.y_min}, "roi", {format_real(set.roi.x_max), format_real(set.roi.y_max)}, width);
  row(os, {set.core.x_min, set.core.y_min}, "core", {format_real(set.core.x_max), format_real(set.core.y_max)},
      width);
  for (const Vec2& p : set.collocation) row(os, p, "collocation", {}, width);
  for (const auto& m : set.measurements) {
    os << format_real(m.point.x) << ',' << format_real(m.point.y) << ",measurement";
    for (std::size_t k = 0; k < width; ++k) os << ',' << (k < m.values.size() ? opt(m.values[k]) : "");
    os << '\n';
  }
  for (const auto& b : set.boundary)
    row(os, b.position, "boundary",
        {std::to_string(b.owner), format_real(b.ring_radius), format_real(b.angle)}, width);
  for (const auto& e : set.edges) {
    if (e.kind == EdgeConstraint::Kind::NormalDerivative)
      row(os, e.point, "edge_flux",
          {std::to_string(e.component), format_real(e.normal.x), format_real(e.normal.y), format_real(e.value[0])},
          width);
    else
      row(os, e.point, "edge_traction",
          {format_real(e.normal.x), format_real(e.normal.y), format_real(e.value[0]), format_real(e.value[1])},
          width);
  }
  for (const auto& p : set.periodic)
    row(os, p.a, "periodic", {format_real(p.b.x), format_real(p.b.y), std::to_string(p.component)}, width);
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

SampleSet read_sample_csv(const std::filesystem::path& path) {
  std::ifstream is = open_input(path);
  SampleSet set;
  std::string line;
  std::size_t lineno = 0;
  bool have_roi = false;
  bool have_core = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (lineno == 1 || trim(line).empty()) continue;
    const std::vector<std::string> f = split(line, ',');
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (f.size() < 3) throw ConfigError(where + ": expected at least x,y,role");
    const Vec2 p{parse_real(f[0], where + " x"), parse_real(f[1], where + " y")};
    const std::string role = trim(f[2]);
    auto num = [&](std::size_t k) {
      if (3 + k >= f.size()) throw ConfigError(where + ": missing column v" + std::to_string(k));
      return parse_real(f[3 + k], where + " v" + std::to_string(k));
    };
    if (role == "collocation") {
      set.collocation.push_back(p);
    } else if (role == "measurement") {
      Measurement m{p, {}};
      for (std::size_t k = 3; k < f.size(); ++k) {
        if (trim(f[k]).empty())
          m.values.emplace_back();
        else
          m.values.emplace_back(parse_real(f[k], where + " v" + std::to_string(k - 3)));
      }
      set.measurements.push_back(std::move(m));
    } else if (role == "boundary") {
      BoundarySample b;
      b.owner = static_cast<std::size_t>(num(0));
      b.ring_radius = num(1);
      b.angle = num(2);
      b.position = p;
      set.boundary.push_back(b);
    } else if (role == "edge_flux") {
      EdgeConstraint e;
      e.kind = EdgeConstraint::Kind::NormalDerivative;
      e.point = p;
      e.component = static_cast<int>(num(0));
      e.normal = {num(1), num(2)};
      e.value[0] = num(3);
      set.edges.push_back(e);
    } else if (role == "edge_traction") {
      EdgeConstraint e;
      e.kind = EdgeConstraint::Kind::Traction;
      e.point = p;
      e.normal = {num(0), num(1)};
      e.value[0] = num(2);
      e.value[1] = num(3);
      set.edges.push_back(e);
    } else if (role == "periodic") {
      set.periodic.push_back({p, {num(0), num(1)}, static_cast<int>(num(2))});
    } else if (role == "roi") {
      set.roi = {p.x, num(0), p.y, num(1)};
      have_roi = true;
    } else if (role == "core") {
      set.core = {p.x, num(0), p.y, num(1)};
      have_core = true;
    } else {
      throw ConfigError(where + ": unknown role '" + role + "'");
    }
  }
  if (!have_roi) {
    std::vector<Vec2> all = set.collocation;
    for (const auto& m : set.measurements) all.push_back(m.point);
    if (!all.empty()) set.roi = bounding_box(all);
  }
  if (!have_core) set.core = set.roi;
  return set;
}

}  // namespace ltpinn
