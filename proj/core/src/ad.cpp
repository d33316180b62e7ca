#include "ltpinn/ad.hpp"

#include <sstream>

namespace ltpinn::ad {

namespace {

std::string domain_message(const std::string& primitive, double operand) {
  std::ostringstream os;
  os.precision(17);
  os << "domain error in '" << primitive << "' at operand " << operand;
  return os.str();
}

}  // namespace

DomainError::DomainError(std::string primitive, double operand)
    : NumericError(domain_message(primitive, operand)),
      primitive_(std::move(primitive)),
      operand_(operand) {}

void Tape::backward(Index output, std::vector<double>& adjoint) const {
  adjoint.assign(nodes_.size(), 0.0);
  if (output == kNoParent) return;
  adjoint[output] = 1.0;
  for (std::size_t i = output + 1; i-- > 0;) {
    const double a = adjoint[i];
    if (a == 0.0) continue;
    const Node& n = nodes_[i];
    if (n.parent[0] != kNoParent) adjoint[n.parent[0]] += n.partial[0] * a;
    if (n.parent[1] != kNoParent) adjoint[n.parent[1]] += n.partial[1] * a;
  }
}

Var Var::binary(const Var& a, const Var& b, double value, double da, double db) {
  if (a.is_constant() && b.is_constant()) return Var(value);
  if (a.is_constant()) return unary(b, value, db);
  if (b.is_constant()) return unary(a, value, da);
  if (a.tape_ != b.tape_) throw std::logic_error("ad::Var operands recorded on different tapes");
  return Var(a.tape_, a.tape_->push(a.index_, da, b.index_, db), value);
}

Var& Var::operator+=(const Var& o) { return *this = *this + o; }
Var& Var::operator-=(const Var& o) { return *this = *this - o; }
Var& Var::operator*=(const Var& o) { return *this = *this * o; }
Var& Var::operator/=(const Var& o) { return *this = *this / o; }

Var sqrt(const Var& x) {
  const double s = sqrt(x.value());
  if (s == 0.0 && !x.is_constant()) throw DomainError("sqrt", 0.0);
  return Var::unary(x, s, s == 0.0 ? 0.0 : 0.5 / s);
}

Var exp(const Var& x) {
  const double e = std::exp(x.value());
  return Var::unary(x, e, e);
}

Var log(const Var& x) { return Var::unary(x, log(x.value()), 1.0 / x.value()); }

Var tanh(const Var& x) {
  const double t = std::tanh(x.value());
  return Var::unary(x, t, 1.0 - t * t);
}

Var sigmoid(const Var& x) {
  const double s = sigmoid(x.value());
  return Var::unary(x, s, s * (1.0 - s));
}

Var pow(const Var& x, double p) {
  const double v = pow(x.value(), p);
  const double d = p == 0.0 ? 0.0 : p * std::pow(x.value(), p - 1.0);
  return Var::unary(x, v, d);
}

std::vector<Jet<Var>> seed_inputs(Tape& tape, std::span<const Seed> seeds) {
  std::vector<Jet<Var>> inputs;
  inputs.reserve(seeds.size());
  int n_x = 0;
  int n_y = 0;
  for (const Seed& s : seeds) {
    Jet<Var> j(Var::leaf(tape, s.value));
    if (s.kind == SeedKind::SpatialX) {
      j.dx = Var(1.0);
      ++n_x;
    } else if (s.kind == SeedKind::SpatialY) {
      j.dy = Var(1.0);
      ++n_y;
    }
    inputs.push_back(j);
  }
  if (n_x > 1 || n_y > 1) throw ConfigError("at most one SpatialX and one SpatialY seed");
  return inputs;
}

Derivatives collect(const Tape& tape, std::span<const Jet<Var>> inputs, const Jet<Var>& out) {
  Derivatives d;
  d.value = out.v.value();
  d.dxx = out.dxx.value();
  d.dxy = out.dxy.value();
  d.dyy = out.dyy.value();
  d.first.assign(inputs.size(), 0.0);
  if (out.v.is_constant()) return d;
  std::vector<double> adjoint;
  tape.backward(out.v.index(), adjoint);
  for (std::size_t i = 0; i < inputs.size(); ++i) d.first[i] = adjoint[inputs[i].v.index()];
  return d;
}

}  // namespace ltpinn::ad
