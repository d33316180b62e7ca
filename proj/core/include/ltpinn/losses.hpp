#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ltpinn/geometry.hpp"
#include "ltpinn/network.hpp"
#include "ltpinn/pde.hpp"
#include "ltpinn/sampling.hpp"

namespace ltpinn {

/// LT: explicit circle patches. DT: density channel, no boundary/topology terms.
enum class Mode { LT, DT };

std::string to_string(Mode mode);
Mode mode_from_string(std::string_view name);

struct LossWeights {
  double lambda_p = 1.0;
  double lambda_b = 1.0;
  double lambda_d = 1.0;
  double lambda_t = 0.0;
  void validate() const;
};

struct LossBreakdown {
  double total = 0.0;
  double pde = 0.0;
  double bc = 0.0;
  double data = 0.0;
  double topo_fixed = 0.0;
  double topo_overlap = 0.0;

  double recombine(const LossWeights& w) const {
    return w.lambda_p * pde + w.lambda_b * bc + w.lambda_d * data + w.lambda_t * (topo_fixed + topo_overlap);
  }
};

/// Condition imposed on the ring samples of every patch.
struct BoundaryCondition {
  enum class Kind { None, Dirichlet, Neumann };
  Kind kind = Kind::None;
  std::vector<std::optional<double>> value;  ///< Dirichlet target per component
  int component = 0;                         ///< Neumann: flux of this component
  double q = 0.0;
};

struct TopoPair {
  std::size_t i = 0;
  std::size_t j = 0;
  double target = 2.5;
};

struct TopologyLoss {
  enum class Kind { None, Pairs, Hub };
  Kind kind = Kind::None;
  std::vector<TopoPair> pairs;
  double hub_distance = 2.5;
  bool nonoverlap = false;
};

struct LossSpec {
  PdeProblem problem;
  Mode mode = Mode::LT;
  LossWeights weights;
  BoundaryCondition bc;
  TopologyLoss topo;
  double k = 1.0;
  double beta = kDefaultBeta;
  double dt_c = kDefaultDensitySharpness;
  std::vector<double> dt_bc;  ///< u_b inside the density residual; empty drops that term
};

// ---------------------------------------------------------------------------
// Pointwise loss terms over any field source (see field_jets).

/// (1/N) sum_i sum_c (prod_j delta_j^k * R_c(x_i))^2.
template <class F>
double pde_loss(F&& field, std::span<const CirclePatch> patches, std::span<const Vec2> collocation,
                const PdeProblem& problem, double k = 1.0, double beta = kDefaultBeta) {
  if (collocation.empty()) throw ConfigError("pde_loss: empty collocation set");
  double sum = 0.0;
  for (const Vec2& p : collocation) {
    const auto u = field_jets<double>(field, p.x, p.y);
    const double w = patches.empty() ? 1.0 : composite_delta(patches, p, k, beta);
    for (double r : residual<double>(problem, u)) sum += (w * r) * (w * r);
  }
  return sum / static_cast<double>(collocation.size());
}

/// Mean over samples of ||u - u_b||^2.
template <class F>
double dirichlet_loss(F&& field, std::span<const BoundarySample> samples, std::span<const double> u_b) {
  if (samples.empty()) throw ConfigError("dirichlet_loss: empty boundary set");
  double sum = 0.0;
  for (const auto& s : samples) {
    const auto u = field_jets<double>(field, s.position.x, s.position.y);
    for (std::size_t c = 0; c < u_b.size(); ++c) sum += (u[c].v - u_b[c]) * (u[c].v - u_b[c]);
  }
  return sum / static_cast<double>(samples.size());
}

/// Mean over samples of (grad u . n - q)^2, n the radial normal of `patch`.
template <class F>
double neumann_loss(F&& field, const CirclePatch& patch, std::span<const BoundarySample> samples, double q,
                    int component = 0) {
  if (samples.empty()) throw ConfigError("neumann_loss: empty boundary set");
  double sum = 0.0;
  for (const auto& s : samples) {
    const Vec2 n = boundary_normal(patch, s.position);
    const auto u = field_jets<double>(field, s.position.x, s.position.y);
    const double r = u[component].dx * n.x + u[component].dy * n.y - q;
    sum += r * r;
  }
  return sum / static_cast<double>(samples.size());
}

/// Mean squared error over every observed (point, component) entry.
template <class F>
double data_loss(F&& field, std::span<const Measurement> measurements) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& m : measurements) {
    const auto u = field_jets<double>(field, m.point.x, m.point.y);
    for (std::size_t c = 0; c < m.values.size(); ++c) {
      if (!m.values[c]) continue;
      const double e = u[c].v - *m.values[c];
      sum += e * e;
      ++n;
    }
  }
  if (n == 0) throw ConfigError("data_loss: no observed measurement entries");
  return sum / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Topology losses, generic over double and ad::Var.

/// (1/N_t) sum over ordered pairs (r_ij - r*_ij)^2; each listed pair counts twice.
template <class S>
S topo_fixed_distance_loss(std::span<const Point<S>> gamma, std::span<const TopoPair> pairs) {
  if (gamma.empty()) throw ConfigError("topology loss needs at least one patch");
  S sum(0.0);
  for (const TopoPair& p : pairs) {
    if (p.i >= gamma.size() || p.j >= gamma.size())
      throw ConfigError("topology pair (" + std::to_string(p.i) + ", " + std::to_string(p.j) +
                        ") references a missing patch");
    if (p.i == p.j) throw ConfigError("topology pair must join two distinct patches");
    if (!(p.target > 0.0)) throw ConfigError("topology pair distance must be positive");
    const S e = patch_pair_distance(gamma[p.i], gamma[p.j]) - S(p.target);
    sum = sum + e * e * 2.0;
  }
  return sum / static_cast<double>(gamma.size());
}

/// (1/N_t) sum_i (||gamma_i - c|| - R)^2 with c the centroid of all centres.
template <class S>
S topo_hub_loss(std::span<const Point<S>> gamma, double distance) {
  if (gamma.empty()) throw ConfigError("topology loss needs at least one patch");
  if (!(distance > 0.0)) throw ConfigError("hub distance must be positive");
  const double inv_n = 1.0 / static_cast<double>(gamma.size());
  S cx(0.0);
  S cy(0.0);
  for (const auto& g : gamma) {
    cx = cx + g.x * inv_n;
    cy = cy + g.y * inv_n;
  }
  S sum(0.0);
  for (const auto& g : gamma) {
    const S e = ad::norm2(g.x - cx, g.y - cy) - S(distance);
    sum = sum + e * e;
  }
  return sum * inv_n;
}

/// (1/N_t) sum_i sum_{j != i} 1 / r_ij^2. Coincident centres raise a
/// NumericError unless `floored`, which adds the norm floor to r^2.
template <class S>
S topo_nonoverlap_loss(std::span<const Point<S>> gamma, bool floored = false) {
  if (gamma.empty()) throw ConfigError("topology loss needs at least one patch");
  S sum(0.0);
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    for (std::size_t j = i + 1; j < gamma.size(); ++j) {
      const S dx = gamma[i].x - gamma[j].x;
      const S dy = gamma[i].y - gamma[j].y;
      S r2 = dx * dx + dy * dy;
      if (floored) {
        r2 = r2 + S(ad::kNormFloor * ad::kNormFloor);
      } else if (ad::value_of(r2) == 0.0) {
        throw NumericError("non-overlap loss: patches " + std::to_string(i) + " and " + std::to_string(j) +
                           " coincide");
      }
      sum = sum + S(2.0) / r2;
    }
  }
  return sum / static_cast<double>(gamma.size());
}

// ---------------------------------------------------------------------------
// Batched total loss with gradients, used by training.

struct Gradients {
  std::vector<double> theta;
  std::vector<Vec2> gamma;

  void reset(std::size_t n_theta, std::size_t n_gamma);
};

/// Evaluates the total loss over a fixed SampleSet. Ring samples follow
/// their owner: position = gamma[owner] + offset. Work is split into chunks
/// of `chunk` points; with several threads each thread owns a contiguous run
/// of chunks and the partial results are reduced in thread order, so results
/// are reproducible for a fixed thread count.
class LossEvaluator {
 public:
  LossEvaluator(LossSpec spec, SampleSet samples, InputNormalizer norm, std::size_t chunk = 256,
                int threads = 1);

  const LossSpec& spec() const { return spec_; }
  const SampleSet& samples() const { return samples_; }
  const InputNormalizer& normalizer() const { return norm_; }

  /// Breakdown at (theta, gamma); fills `grad` (resized) with d total / d(theta, gamma) when given.
  LossBreakdown evaluate(const MlpParams& params, std::span<const Vec2> gamma, Gradients* grad = nullptr) const;

 private:
  struct Job {
    enum class Kind { Collocation, Ring, Measurement, Edge, Periodic } kind;
    std::size_t begin;
    std::size_t end;
  };
  struct Worker;

  void run_job(const Job& job, const MlpParams& params, std::span<const Vec2> gamma, Worker& w) const;
  void collocation_chunk(const Job& job, const MlpParams& params, std::span<const Vec2> gamma, Worker& w) const;
  void ring_chunk(const Job& job, const MlpParams& params, std::span<const Vec2> gamma, Worker& w) const;
  void measurement_chunk(const Job& job, const MlpParams& params, Worker& w) const;
  void edge_chunk(const Job& job, const MlpParams& params, Worker& w) const;
  void periodic_chunk(const Job& job, const MlpParams& params, Worker& w) const;

  LossSpec spec_;
  SampleSet samples_;
  InputNormalizer norm_;
  std::size_t chunk_;
  int threads_;
  std::vector<Job> jobs_;
  std::size_t data_entries_ = 0;
};

}  // namespace ltpinn
