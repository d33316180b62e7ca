#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ltpinn {

/// Base for every error raised by the library. The CLI maps the concrete
/// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration, malformed input files, bad
/// arguments. Exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, divergence, domain violations. Exit code 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// File-system and serialization failures. Exit code 4.
class IoError : public Error {
 public:
  using Error::Error;
};

template <class T>
struct Point {
  T x{};
  T y{};
};

using Vec2 = Point<double>;

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Axis-aligned region of interest, in units of the patch diameter D.
struct Roi {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_min = -1.0;
  double y_max = 1.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  Vec2 center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }
  bool valid() const { return x_min < x_max && y_min < y_max; }
  bool contains(Vec2 p, double tol = 1e-12) const {
    return p.x >= x_min - tol && p.x <= x_max + tol && p.y >= y_min - tol &&
           p.y <= y_max + tol;
  }
  /// Strict interior containment of another box.
  bool strictly_contains(const Roi& o) const {
    return o.x_min > x_min && o.x_max < x_max && o.y_min > y_min && o.y_max < y_max;
  }
};

inline bool operator==(const Roi& a, const Roi& b) {
  return a.x_min == b.x_min && a.x_max == b.x_max && a.y_min == b.y_min &&
         a.y_max == b.y_max;
}

}  // namespace ltpinn
