#pragma once

// Differentiation engine.
//
// Two composable number types:
//   Var     reverse-mode scalar recorded on a Tape; one backward sweep yields
//           the partial of an output with respect to every leaf.
//   Jet<T>  second-order truncated Taylor expansion in the two spatial
//           inputs (value, d/dx, d/dy, d2/dx2, d2/dxdy, d2/dy2) over any
//           scalar type T.
//
// Jet<Var> nests the two: spatial derivatives are propagated forward while
// every jet component stays differentiable with respect to parameters and
// patch centres. All arithmetic is 64-bit.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "ltpinn/types.hpp"

namespace ltpinn::ad {

/// Primitive evaluated outside its domain (ln of a non-positive value,
/// division by zero, sqrt of a negative value, ...).
class DomainError : public NumericError {
 public:
  DomainError(std::string primitive, double operand);
  const std::string& primitive() const { return primitive_; }
  double operand() const { return operand_; }

 private:
  std::string primitive_;
  double operand_;
};

/// Floor used by norm2 so the Euclidean norm stays differentiable at 0.
inline constexpr double kNormFloor = 1e-12;

class Tape {
 public:
  using Index = std::uint32_t;
  static constexpr Index kNoParent = std::numeric_limits<Index>::max();

  Index push_leaf() { return push(kNoParent, 0.0, kNoParent, 0.0); }
  Index push(Index a, double da) { return push(a, da, kNoParent, 0.0); }
  Index push(Index a, double da, Index b, double db) {
    nodes_.push_back(Node{{a, b}, {da, db}});
    return static_cast<Index>(nodes_.size() - 1);
  }

  std::size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }
  void reserve(std::size_t n) { nodes_.reserve(n); }

  /// Reverse sweep seeded with d(output)/d(output) = 1. On return
  /// adjoint[i] holds d(output)/d(node i) for every node recorded so far.
  void backward(Index output, std::vector<double>& adjoint) const;

 private:
  struct Node {
    Index parent[2];
    double partial[2];
  };
  std::vector<Node> nodes_;
};

class Var {
 public:
  Var() = default;
  Var(double value) : value_(value) {}  // NOLINT: constants convert implicitly

  static Var leaf(Tape& tape, double value) { return Var(&tape, tape.push_leaf(), value); }

  double value() const { return value_; }
  bool is_constant() const { return tape_ == nullptr; }
  Tape* tape() const { return tape_; }
  Tape::Index index() const { return index_; }

  static Var unary(const Var& a, double value, double da) {
    if (a.is_constant()) return Var(value);
    return Var(a.tape_, a.tape_->push(a.index_, da), value);
  }
  static Var binary(const Var& a, const Var& b, double value, double da, double db);

  Var& operator+=(const Var& o);
  Var& operator-=(const Var& o);
  Var& operator*=(const Var& o);
  Var& operator/=(const Var& o);

 private:
  Var(Tape* tape, Tape::Index index, double value) : tape_(tape), index_(index), value_(value) {}

  Tape* tape_ = nullptr;
  Tape::Index index_ = Tape::kNoParent;
  double value_ = 0.0;
};

// ---------------------------------------------------------------------------
// Scalar primitives on double (domain-checked) and Var.

inline double divide(double a, double b) {
  if (b == 0.0) throw DomainError("div", b);
  return a / b;
}
inline double sqrt(double x) {
  if (x < 0.0) throw DomainError("sqrt", x);
  return std::sqrt(x);
}
inline double exp(double x) { return std::exp(x); }
inline double log(double x) {
  if (!(x > 0.0)) throw DomainError("ln", x);
  return std::log(x);
}
inline double tanh(double x) { return std::tanh(x); }
/// Logistic function; the negative branch avoids overflow of exp(-x).
inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}
inline double pow(double x, double p) {
  if (x < 0.0 && p != std::floor(p)) throw DomainError("pow", x);
  if (x == 0.0 && p < 0.0) throw DomainError("pow", x);
  return std::pow(x, p);
}

inline Var operator+(const Var& a, const Var& b) {
  return Var::binary(a, b, a.value() + b.value(), 1.0, 1.0);
}
inline Var operator-(const Var& a, const Var& b) {
  return Var::binary(a, b, a.value() - b.value(), 1.0, -1.0);
}
inline Var operator-(const Var& a) { return Var::unary(a, -a.value(), -1.0); }
inline Var operator*(const Var& a, const Var& b) {
  return Var::binary(a, b, a.value() * b.value(), b.value(), a.value());
}
inline Var operator/(const Var& a, const Var& b) {
  const double q = divide(a.value(), b.value());
  return Var::binary(a, b, q, 1.0 / b.value(), -q / b.value());
}

Var sqrt(const Var& x);
Var exp(const Var& x);
Var log(const Var& x);
Var tanh(const Var& x);
Var sigmoid(const Var& x);
Var pow(const Var& x, double p);

inline Var divide(const Var& a, const Var& b) { return a / b; }

inline double value_of(double x) { return x; }
inline double value_of(const Var& x) { return x.value(); }

// ---------------------------------------------------------------------------
// Spatial jets.

template <class T>
struct Jet;

template <class T>
struct is_jet : std::false_type {};
template <class T>
struct is_jet<Jet<T>> : std::true_type {};
template <class T>
inline constexpr bool is_jet_v = is_jet<std::remove_cvref_t<T>>::value;

template <class U, class T>
concept JetScalar = !is_jet_v<U> && std::convertible_to<U, T>;

template <class T>
struct Jet {
  T v{};
  T dx{};
  T dy{};
  T dxx{};
  T dxy{};
  T dyy{};

  Jet() = default;
  Jet(const T& value) : v(value) {}  // NOLINT: constants convert implicitly
  template <class U>
    requires(JetScalar<U, T> && !std::same_as<std::remove_cvref_t<U>, T>)
  Jet(const U& value) : v(T(value)) {}  // NOLINT
  Jet(T v_, T dx_, T dy_, T dxx_, T dxy_, T dyy_)
      : v(std::move(v_)), dx(std::move(dx_)), dy(std::move(dy_)),
        dxx(std::move(dxx_)), dxy(std::move(dxy_)), dyy(std::move(dyy_)) {}

  /// The spatial input x itself: dx = 1.
  static Jet variable_x(const T& value) {
    Jet j(value);
    j.dx = T(1.0);
    return j;
  }
  /// The spatial input y itself: dy = 1.
  static Jet variable_y(const T& value) {
    Jet j(value);
    j.dy = T(1.0);
    return j;
  }

  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }
};

template <class T>
double value_of(const Jet<T>& x) {
  return value_of(x.v);
}

template <class T>
Jet<T> operator+(const Jet<T>& a, const Jet<T>& b) {
  return {a.v + b.v, a.dx + b.dx, a.dy + b.dy, a.dxx + b.dxx, a.dxy + b.dxy, a.dyy + b.dyy};
}
template <class T>
Jet<T> operator-(const Jet<T>& a, const Jet<T>& b) {
  return {a.v - b.v, a.dx - b.dx, a.dy - b.dy, a.dxx - b.dxx, a.dxy - b.dxy, a.dyy - b.dyy};
}
template <class T>
Jet<T> operator-(const Jet<T>& a) {
  return {-a.v, -a.dx, -a.dy, -a.dxx, -a.dxy, -a.dyy};
}
template <class T>
Jet<T> operator*(const Jet<T>& a, const Jet<T>& b) {
  return {a.v * b.v,
          a.dx * b.v + a.v * b.dx,
          a.dy * b.v + a.v * b.dy,
          a.dxx * b.v + T(2.0) * (a.dx * b.dx) + a.v * b.dxx,
          a.dxy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.dxy,
          a.dyy * b.v + T(2.0) * (a.dy * b.dy) + a.v * b.dyy};
}

/// Composition with a scalar function given its value and first two
/// derivatives at a.v.
template <class T>
Jet<T> chain(const Jet<T>& a, const T& f0, const T& f1, const T& f2) {
  return {f0,
          f1 * a.dx,
          f1 * a.dy,
          f2 * (a.dx * a.dx) + f1 * a.dxx,
          f2 * (a.dx * a.dy) + f1 * a.dxy,
          f2 * (a.dy * a.dy) + f1 * a.dyy};
}

template <class T>
Jet<T> reciprocal(const Jet<T>& b) {
  const T f0 = divide(T(1.0), b.v);
  const T f1 = -(f0 * f0);
  const T f2 = T(2.0) * (f0 * f0 * f0);
  return chain(b, f0, f1, f2);
}
template <class T>
Jet<T> operator/(const Jet<T>& a, const Jet<T>& b) {
  return a * reciprocal(b);
}

template <class T, class U>
  requires JetScalar<U, T>
Jet<T> operator+(const Jet<T>& a, const U& s) {
  Jet<T> r = a;
  r.v = r.v + T(s);
  return r;
}
template <class T, class U>
  requires JetScalar<U, T>
Jet<T> operator+(const U& s, const Jet<T>& a) {
  return a + s;
}
template <class T, class U>
  requires JetScalar<U, T>
Jet<T> operator-(const Jet<T>& a, const U& s) {
  Jet<T> r = a;
  r.v = r.v - T(s);
  return r;
}
template <class T, class U>
  requires JetScalar<U, T>
Jet<T> operator-(const U& s, const Jet<T>& a) {
  Jet<T> r = -a;
  r.v = r.v + T(s);
  return r;
}
template <class T, class U>
  requires JetScalar<U, T>
Jet<T> operator*(const Jet<T>& a, const U& s) {
  const T k(s);
  return {a.v * k, a.dx * k, a.dy * k, a.dxx * k, a.dxy * k, a.dyy * k};
}
template <class T, class U>
  requires JetScalar<U, T>
Jet<T> operator*(const U& s, const Jet<T>& a) {
  return a * s;
}
template <class T, class U>
  requires JetScalar<U, T>
Jet<T> operator/(const Jet<T>& a, const U& s) {
  const T k = divide(T(1.0), T(s));
  return a * k;
}
template <class T, class U>
  requires JetScalar<U, T>
Jet<T> operator/(const U& s, const Jet<T>& a) {
  return reciprocal(a) * s;
}

template <class T>
Jet<T> divide(const Jet<T>& a, const Jet<T>& b) {
  return a / b;
}

template <class T>
Jet<T> exp(const Jet<T>& a) {
  const T e = exp(a.v);
  return chain(a, e, e, e);
}
template <class T>
Jet<T> log(const Jet<T>& a) {
  const T f0 = log(a.v);
  const T f1 = divide(T(1.0), a.v);
  return chain(a, f0, f1, -(f1 * f1));
}
template <class T>
Jet<T> sqrt(const Jet<T>& a) {
  if (value_of(a.v) == 0.0) throw DomainError("sqrt", 0.0);
  const T s = sqrt(a.v);
  const T f1 = divide(T(0.5), s);
  const T f2 = -divide(f1, T(2.0) * a.v);
  return chain(a, s, f1, f2);
}
template <class T>
Jet<T> tanh(const Jet<T>& a) {
  const T t = tanh(a.v);
  const T d1 = T(1.0) - t * t;
  return chain(a, t, d1, T(-2.0) * (t * d1));
}
template <class T>
Jet<T> sigmoid(const Jet<T>& a) {
  const T s = sigmoid(a.v);
  const T d1 = s * (T(1.0) - s);
  return chain(a, s, d1, d1 * (T(1.0) - T(2.0) * s));
}
template <class T>
Jet<T> pow(const Jet<T>& a, double p) {
  const T f0 = pow(a.v, p);
  const T f1 = p == 0.0 ? T(0.0) : T(p) * pow(a.v, p - 1.0);
  const T f2 = (p == 0.0 || p == 1.0) ? T(0.0) : T(p * (p - 1.0)) * pow(a.v, p - 2.0);
  return chain(a, f0, f1, f2);
}

// ---------------------------------------------------------------------------
// Composite primitives, generic over double, Var and Jet<...>.

/// Smooth |x|: sqrt(x^2 + eps^2).
template <class S>
S abs_smooth(const S& x, double eps = kNormFloor) {
  return sqrt(x * x + S(eps * eps));
}

/// Euclidean norm of (a, b), floored at the origin.
template <class S>
S norm2(const S& a, const S& b) {
  return sqrt(a * a + b * b + S(kNormFloor * kNormFloor));
}

template <class S>
S norm2(std::span<const S> v) {
  S sum(kNormFloor * kNormFloor);
  for (const S& c : v) sum = sum + c * c;
  return sqrt(sum);
}

// ---------------------------------------------------------------------------
// Seeded evaluation.

enum class SeedKind { Parameter, SpatialX, SpatialY };

struct Seed {
  double value = 0.0;
  SeedKind kind = SeedKind::Parameter;
};

struct Derivatives {
  double value = 0.0;
  /// d(expr)/d(seed) in seed order.
  std::vector<double> first;
  /// Second partials with respect to the spatial seeds (zero when absent).
  double dxx = 0.0;
  double dxy = 0.0;
  double dyy = 0.0;
};

/// Builds the Jet<Var> inputs for a seed list. At most one SpatialX and one
/// SpatialY seed are allowed.
std::vector<Jet<Var>> seed_inputs(Tape& tape, std::span<const Seed> seeds);

/// Collects value, first partials and spatial second partials of `out`.
Derivatives collect(const Tape& tape, std::span<const Jet<Var>> inputs, const Jet<Var>& out);

/// Evaluates `expr` (a callable taking std::span<const Jet<Var>> and
/// returning Jet<Var>) and returns its exact derivatives with respect to
/// every seed.
template <class F>
Derivatives eval_with_derivatives(F&& expr, std::span<const Seed> seeds) {
  Tape tape;
  const std::vector<Jet<Var>> inputs = seed_inputs(tape, seeds);
  const Jet<Var> out = expr(std::span<const Jet<Var>>(inputs));
  return collect(tape, inputs, out);
}

/// Maximum over seeds of |analytic - central difference| / max(|analytic|, 1e-12).
/// `expr` must be callable both with std::span<const Jet<Var>> and with
/// std::span<const double>.
template <class F>
double check_against_finite_differences(F&& expr, std::span<const double> at, double step) {
  if (!(step > 0.0)) throw ConfigError("finite-difference step must be positive");
  std::vector<Seed> seeds(at.size());
  for (std::size_t i = 0; i < at.size(); ++i) seeds[i].value = at[i];
  const Derivatives d = eval_with_derivatives(expr, std::span<const Seed>(seeds));

  std::vector<double> probe(at.begin(), at.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < at.size(); ++i) {
    probe[i] = at[i] + step;
    const double fp = value_of(expr(std::span<const double>(probe)));
    probe[i] = at[i] - step;
    const double fm = value_of(expr(std::span<const double>(probe)));
    probe[i] = at[i];
    const double fd = (fp - fm) / (2.0 * step);
    const double err = std::abs(d.first[i] - fd) / std::max(std::abs(d.first[i]), 1e-12);
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace ltpinn::ad
