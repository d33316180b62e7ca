#include "ltpinn/losses.hpp"

#include <algorithm>
#include <thread>

#include "ltpinn/io.hpp"

namespace ltpinn {

std::string to_string(Mode mode) { return mode == Mode::LT ? "lt" : "dt"; }

Mode mode_from_string(std::string_view name) {
  if (name == "lt") return Mode::LT;
  if (name == "dt") return Mode::DT;
  throw ConfigError("unknown mode '" + std::string(name) + "' (expected lt or dt)");
}

void LossWeights::validate() const {
  for (double v : {lambda_p, lambda_b, lambda_d, lambda_t})
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ConfigError("loss weights must be finite and non-negative, got " + format_real(v));
}

void Gradients::reset(std::size_t n_theta, std::size_t n_gamma) {
  theta.assign(n_theta, 0.0);
  gamma.assign(n_gamma, Vec2{});
}

struct LossEvaluator::Worker {
  BatchedJets jets;
  BatchedJets jets_b;
  ad::Tape tape;
  std::vector<double> adj;
  std::vector<Eigen::MatrixXd> out_adj;
  std::vector<Vec2> in_adj;
  LossBreakdown sums;  // unweighted term values
  bool want_grad = false;
  std::vector<double> g_theta;
  std::vector<Vec2> g_gamma;

  void zero_adjoint(int channels, Eigen::Index rows, Eigen::Index cols) {
    out_adj.resize(static_cast<std::size_t>(channels));
    for (auto& m : out_adj) m.setZero(rows, cols);
  }
};

LossEvaluator::LossEvaluator(LossSpec spec, SampleSet samples, InputNormalizer norm, std::size_t chunk,
                             int threads)
    : spec_(std::move(spec)),
      samples_(std::move(samples)),
      norm_(norm),
      chunk_(std::max<std::size_t>(chunk, 1)),
      threads_(std::max(threads, 1)) {
  spec_.problem.validate();
  spec_.weights.validate();
  if (samples_.collocation.empty()) throw ConfigError("loss: empty collocation set");
  if (spec_.mode == Mode::LT && spec_.bc.kind != BoundaryCondition::Kind::None && samples_.boundary.empty())
    throw ConfigError("loss: boundary condition configured but no ring samples");
  if (spec_.mode == Mode::DT && spec_.problem.residual_dim() != spec_.problem.out_dim())
    throw ConfigError("dt mode needs one residual per solution component (not pressure_poisson)");
  if (spec_.bc.kind == BoundaryCondition::Kind::Dirichlet &&
      static_cast<int>(spec_.bc.value.size()) != spec_.problem.out_dim())
    throw ConfigError("dirichlet boundary value has the wrong arity");
  if (spec_.bc.kind == BoundaryCondition::Kind::Neumann &&
      (spec_.bc.component < 0 || spec_.bc.component >= spec_.problem.out_dim()))
    throw ConfigError("neumann component out of range");
  samples_.validate(spec_.problem.out_dim());
  data_entries_ = samples_.data_entries();

  auto add = [&](Job::Kind kind, std::size_t n) {
    for (std::size_t b = 0; b < n; b += chunk_) jobs_.push_back({kind, b, std::min(n, b + chunk_)});
  };
  add(Job::Kind::Collocation, samples_.collocation.size());
  if (spec_.mode == Mode::LT && spec_.bc.kind != BoundaryCondition::Kind::None)
    add(Job::Kind::Ring, samples_.boundary.size());
  add(Job::Kind::Measurement, samples_.measurements.size());
  add(Job::Kind::Edge, samples_.edges.size());
  add(Job::Kind::Periodic, samples_.periodic.size());
}

LossBreakdown LossEvaluator::evaluate(const MlpParams& params, std::span<const Vec2> gamma, Gradients* grad) const {
  if (params.config().out_dim != spec_.problem.out_dim())
    throw ConfigError("network output arity does not match the PDE");
  if (params.config().has_density_channel != (spec_.mode == Mode::DT))
    throw ConfigError("density channel must be present exactly in dt mode");
  if (spec_.mode == Mode::LT) {
    for (const auto& b : samples_.boundary)
      if (b.owner >= gamma.size()) throw ConfigError("ring sample owner out of range");
  }

  const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(threads_), jobs_.size());
  std::vector<Worker> workers(std::max<std::size_t>(n_workers, 1));
  for (auto& w : workers) {
    w.want_grad = grad != nullptr;
    if (w.want_grad) {
      w.g_theta.assign(params.size(), 0.0);
      w.g_gamma.assign(gamma.size(), Vec2{});
    }
  }

  auto run_range = [&](std::size_t wi) {
    const std::size_t per = (jobs_.size() + workers.size() - 1) / workers.size();
    const std::size_t b = wi * per;
    const std::size_t e = std::min(jobs_.size(), b + per);
    for (std::size_t j = b; j < e; ++j) run_job(jobs_[j], params, gamma, workers[wi]);
  };
  if (workers.size() == 1) {
    run_range(0);
  } else {
    std::vector<std::exception_ptr> errors(workers.size());
    std::vector<std::thread> pool;
    for (std::size_t wi = 0; wi < workers.size(); ++wi) {
      pool.emplace_back([&, wi] {
        try {
          run_range(wi);
        } catch (...) {
          errors[wi] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  LossBreakdown out;
  for (const auto& w : workers) {
    out.pde += w.sums.pde;
    out.bc += w.sums.bc;
    out.data += w.sums.data;
  }
  if (grad) {
    grad->reset(params.size(), gamma.size());
    for (const auto& w : workers) {
      for (std::size_t i = 0; i < w.g_theta.size(); ++i) grad->theta[i] += w.g_theta[i];
      for (std::size_t i = 0; i < w.g_gamma.size(); ++i) grad->gamma[i] = grad->gamma[i] + w.g_gamma[i];
    }
  }

  // Topology terms depend on gamma only.
  const TopologyLoss& topo = spec_.topo;
  if (spec_.mode == Mode::LT && (topo.kind != TopologyLoss::Kind::None || topo.nonoverlap) && !gamma.empty()) {
    ad::Tape tape;
    std::vector<Point<ad::Var>> g;
    g.reserve(gamma.size());
    for (const Vec2& p : gamma) {
      ad::Var x = ad::Var::leaf(tape, p.x);
      ad::Var y = ad::Var::leaf(tape, p.y);
      g.push_back({x, y});
    }
    const std::span<const Point<ad::Var>> gs(g);
    ad::Var fixed(0.0);
    if (topo.kind == TopologyLoss::Kind::Pairs) fixed = topo_fixed_distance_loss<ad::Var>(gs, topo.pairs);
    if (topo.kind == TopologyLoss::Kind::Hub) fixed = topo_hub_loss<ad::Var>(gs, topo.hub_distance);
    ad::Var overlap(0.0);
    if (topo.nonoverlap) overlap = topo_nonoverlap_loss<ad::Var>(gs, true);
    out.topo_fixed = fixed.value();
    out.topo_overlap = overlap.value();
    const ad::Var total = (fixed + overlap) * spec_.weights.lambda_t;
    if (grad && !total.is_constant()) {
      std::vector<double> adj;
      tape.backward(total.index(), adj);
      for (std::size_t i = 0; i < g.size(); ++i)
        grad->gamma[i] = grad->gamma[i] + Vec2{adj[g[i].x.index()], adj[g[i].y.index()]};
    }
  }

  out.total = out.recombine(spec_.weights);
  const std::pair<const char*, double> terms[] = {{"pde", out.pde},
                                                  {"bc", out.bc},
                                                  {"data", out.data},
                                                  {"topo_fixed", out.topo_fixed},
                                                  {"topo_overlap", out.topo_overlap},
                                                  {"total", out.total}};
  for (const auto& [name, v] : terms)
    if (!std::isfinite(v)) throw NumericError(std::string("non-finite loss term: ") + name);
  return out;
}

void LossEvaluator::run_job(const Job& job, const MlpParams& params, std::span<const Vec2> gamma,
                            Worker& w) const {
  switch (job.kind) {
    case Job::Kind::Collocation:
      collocation_chunk(job, params, gamma, w);
      break;
    case Job::Kind::Ring:
      ring_chunk(job, params, gamma, w);
      break;
    case Job::Kind::Measurement:
      measurement_chunk(job, params, w);
      break;
    case Job::Kind::Edge:
      edge_chunk(job, params, w);
      break;
    case Job::Kind::Periodic:
      periodic_chunk(job, params, w);
      break;
  }
}

namespace {

ad::Jet<double> jet_at(const BatchedJets& jets, int out, Eigen::Index i) {
  ad::Jet<double> j(jets.output(channel::kV)(out, i));
  if (jets.channels() > 1) {
    j.dx = jets.output(channel::kX)(out, i);
    j.dy = jets.output(channel::kY)(out, i);
  }
  if (jets.channels() > 3) {
    j.dxx = jets.output(channel::kXX)(out, i);
    j.dxy = jets.output(channel::kXY)(out, i);
    j.dyy = jets.output(channel::kYY)(out, i);
  }
  return j;
}

}  // namespace

void LossEvaluator::collocation_chunk(const Job& job, const MlpParams& params, std::span<const Vec2> gamma,
                                      Worker& w) const {
  const std::size_t n = job.end - job.begin;
  const std::span<const Vec2> pts(samples_.collocation.data() + job.begin, n);
  w.jets.forward(params, norm_, pts, DerivOrder::Hessian);
  const int T = params.config().total_outputs();
  const bool lt = spec_.mode == Mode::LT;
  const double inv_n = 1.0 / static_cast<double>(samples_.collocation.size());
  const double scale = spec_.weights.lambda_p * inv_n;

  if (!w.want_grad) {
    std::vector<ad::Jet<double>> u(static_cast<std::size_t>(T));
    std::vector<CirclePatch> patches;
    for (const Vec2& g : gamma) patches.push_back({g, 1.0});
    for (std::size_t i = 0; i < n; ++i) {
      for (int o = 0; o < T; ++o) u[o] = jet_at(w.jets, o, static_cast<Eigen::Index>(i));
      std::vector<double> r;
      double weight = 1.0;
      if (lt) {
        r = residual<double>(spec_.problem, u);
        if (!patches.empty()) weight = composite_delta(patches, pts[i], spec_.k, spec_.beta);
      } else {
        r = dt_density_residual<double>(spec_.problem, u, spec_.dt_bc, spec_.dt_c);
      }
      for (double v : r) w.sums.pde += (weight * v) * (weight * v) * inv_n;
    }
    return;
  }

  w.zero_adjoint(6, T, static_cast<Eigen::Index>(n));
  std::vector<ad::Jet<ad::Var>> u(static_cast<std::size_t>(T));
  std::vector<Point<ad::Var>> g(gamma.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    w.tape.clear();
    for (int o = 0; o < T; ++o) {
      auto leaf = [&](int c) { return ad::Var::leaf(w.tape, w.jets.output(c)(o, col)); };
      u[o] = ad::Jet<ad::Var>(leaf(0), leaf(1), leaf(2), leaf(3), leaf(4), leaf(5));
    }
    ad::Var loss(0.0);
    if (lt) {
      for (std::size_t p = 0; p < gamma.size(); ++p) {
        ad::Var gx = ad::Var::leaf(w.tape, gamma[p].x);
        ad::Var gy = ad::Var::leaf(w.tape, gamma[p].y);
        g[p] = {gx, gy};
      }
      const std::vector<ad::Var> r = residual<ad::Var>(spec_.problem, u);
      ad::Var weight(1.0);
      if (!g.empty())
        weight = composite_delta<ad::Var>(std::span<const Point<ad::Var>>(g), Point<ad::Var>{pts[i].x, pts[i].y},
                                          spec_.k, spec_.beta);
      for (const ad::Var& v : r) {
        const ad::Var m = weight * v;
        loss = loss + m * m;
      }
    } else {
      for (const ad::Var& v : dt_density_residual<ad::Var>(spec_.problem, u, spec_.dt_bc, spec_.dt_c))
        loss = loss + v * v;
    }
    w.sums.pde += loss.value() * inv_n;
    if (loss.is_constant()) continue;
    w.tape.backward(loss.index(), w.adj);
    for (int o = 0; o < T; ++o) {
      const ad::Jet<ad::Var>& j = u[o];
      const ad::Var* comp[6] = {&j.v, &j.dx, &j.dy, &j.dxx, &j.dxy, &j.dyy};
      for (int c = 0; c < 6; ++c) w.out_adj[c](o, col) = scale * w.adj[comp[c]->index()];
    }
    if (lt) {
      for (std::size_t p = 0; p < g.size(); ++p)
        w.g_gamma[p] = w.g_gamma[p] + scale * Vec2{w.adj[g[p].x.index()], w.adj[g[p].y.index()]};
    }
  }
  w.jets.backward(params, w.out_adj, w.g_theta, {});
}

void LossEvaluator::ring_chunk(const Job& job, const MlpParams& params, std::span<const Vec2> gamma,
                               Worker& w) const {
  const std::size_t n = job.end - job.begin;
  std::vector<Vec2> pts(n);
  std::vector<Vec2> normals(n);
  for (std::size_t i = 0; i < n; ++i) {
    const BoundarySample& s = samples_.boundary[job.begin + i];
    const Vec2 off = s.offset();
    pts[i] = gamma[s.owner] + off;
    const double r = norm(off);
    if (r == 0.0) throw DegenerateNormalError();
    normals[i] = (1.0 / r) * off;
  }
  const bool neumann = spec_.bc.kind == BoundaryCondition::Kind::Neumann;
  w.jets.forward(params, norm_, pts, neumann ? DerivOrder::Gradient : DerivOrder::Value);
  const int T = params.config().total_outputs();
  const double inv_n = 1.0 / static_cast<double>(samples_.boundary.size());
  const double scale = spec_.weights.lambda_b * inv_n;
  if (w.want_grad) w.zero_adjoint(w.jets.channels(), T, static_cast<Eigen::Index>(n));

  for (std::size_t i = 0; i < n; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    if (neumann) {
      const int c = spec_.bc.component;
      const double r = w.jets.output(channel::kX)(c, col) * normals[i].x +
                       w.jets.output(channel::kY)(c, col) * normals[i].y - spec_.bc.q;
      w.sums.bc += r * r * inv_n;
      if (w.want_grad) {
        w.out_adj[channel::kX](c, col) = scale * 2.0 * r * normals[i].x;
        w.out_adj[channel::kY](c, col) = scale * 2.0 * r * normals[i].y;
      }
    } else {
      for (std::size_t c = 0; c < spec_.bc.value.size(); ++c) {
        if (!spec_.bc.value[c]) continue;
        const auto o = static_cast<Eigen::Index>(c);
        const double e = w.jets.output(channel::kV)(o, col) - *spec_.bc.value[c];
        w.sums.bc += e * e * inv_n;
        if (w.want_grad) w.out_adj[channel::kV](o, col) = scale * 2.0 * e;
      }
    }
  }
  if (!w.want_grad) return;
  w.in_adj.assign(n, Vec2{});
  w.jets.backward(params, w.out_adj, w.g_theta, w.in_adj);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t owner = samples_.boundary[job.begin + i].owner;
    w.g_gamma[owner] = w.g_gamma[owner] + w.in_adj[i];
  }
}

void LossEvaluator::measurement_chunk(const Job& job, const MlpParams& params, Worker& w) const {
  const std::size_t n = job.end - job.begin;
  std::vector<Vec2> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = samples_.measurements[job.begin + i].point;
  w.jets.forward(params, norm_, pts, DerivOrder::Value);
  const int T = params.config().total_outputs();
  const double inv_n = 1.0 / static_cast<double>(std::max<std::size_t>(data_entries_, 1));
  const double scale = spec_.weights.lambda_d * inv_n;
  if (w.want_grad) w.zero_adjoint(1, T, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const Measurement& m = samples_.measurements[job.begin + i];
    const auto col = static_cast<Eigen::Index>(i);
    for (std::size_t c = 0; c < m.values.size(); ++c) {
      if (!m.values[c]) continue;
      const auto o = static_cast<Eigen::Index>(c);
      const double e = w.jets.output(channel::kV)(o, col) - *m.values[c];
      w.sums.data += e * e * inv_n;
      if (w.want_grad) w.out_adj[channel::kV](o, col) = scale * 2.0 * e;
    }
  }
  if (w.want_grad) w.jets.backward(params, w.out_adj, w.g_theta, {});
}

void LossEvaluator::edge_chunk(const Job& job, const MlpParams& params, Worker& w) const {
  const std::size_t n = job.end - job.begin;
  std::vector<Vec2> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = samples_.edges[job.begin + i].point;
  w.jets.forward(params, norm_, pts, DerivOrder::Gradient);
  const int T = params.config().total_outputs();
  const double inv_n = 1.0 / static_cast<double>(std::max<std::size_t>(data_entries_, 1));
  const double scale = spec_.weights.lambda_d * inv_n;
  if (w.want_grad) w.zero_adjoint(3, T, static_cast<Eigen::Index>(n));
  const MaterialParams& m = spec_.problem.material;
  const double c1 = m.E / (1.0 - m.nu * m.nu);
  const double c2 = m.E / (1.0 - m.nu);

  for (std::size_t i = 0; i < n; ++i) {
    const EdgeConstraint& e = samples_.edges[job.begin + i];
    const auto col = static_cast<Eigen::Index>(i);
    const Vec2 nn = e.normal;
    if (e.kind == EdgeConstraint::Kind::NormalDerivative) {
      const auto o = static_cast<Eigen::Index>(e.component);
      const double r =
          w.jets.output(channel::kX)(o, col) * nn.x + w.jets.output(channel::kY)(o, col) * nn.y - e.value[0];
      w.sums.data += r * r * inv_n;
      if (w.want_grad) {
        w.out_adj[channel::kX](o, col) += scale * 2.0 * r * nn.x;
        w.out_adj[channel::kY](o, col) += scale * 2.0 * r * nn.y;
      }
    } else {
      const ad::Jet<double> a = jet_at(w.jets, 0, col);
      const ad::Jet<double> b = jet_at(w.jets, 1, col);
      const Stress<double> s = stress_elastic(a, b, m);
      const double ex = s.xx * nn.x + s.xy * nn.y - e.value[0];
      const double ey = s.xy * nn.x + s.yy * nn.y - e.value[1];
      w.sums.data += (ex * ex + ey * ey) * inv_n;
      if (w.want_grad) {
        const double gxx = scale * 2.0 * ex * nn.x;
        const double gyy = scale * 2.0 * ey * nn.y;
        const double gxy = scale * 2.0 * (ex * nn.y + ey * nn.x);
        w.out_adj[channel::kX](0, col) += c1 * (gxx + m.nu * gyy);
        w.out_adj[channel::kY](1, col) += c1 * (gyy + m.nu * gxx);
        w.out_adj[channel::kY](0, col) += 0.5 * c2 * gxy;
        w.out_adj[channel::kX](1, col) += 0.5 * c2 * gxy;
      }
    }
  }
  if (w.want_grad) w.jets.backward(params, w.out_adj, w.g_theta, {});
}

void LossEvaluator::periodic_chunk(const Job& job, const MlpParams& params, Worker& w) const {
  const std::size_t n = job.end - job.begin;
  std::vector<Vec2> pa(n);
  std::vector<Vec2> pb(n);
  for (std::size_t i = 0; i < n; ++i) {
    pa[i] = samples_.periodic[job.begin + i].a;
    pb[i] = samples_.periodic[job.begin + i].b;
  }
  w.jets.forward(params, norm_, pa, DerivOrder::Value);
  w.jets_b.forward(params, norm_, pb, DerivOrder::Value);
  const int T = params.config().total_outputs();
  const double inv_n = 1.0 / static_cast<double>(std::max<std::size_t>(data_entries_, 1));
  const double scale = spec_.weights.lambda_d * inv_n;
  std::vector<Eigen::MatrixXd> adj_b;
  if (w.want_grad) {
    w.zero_adjoint(1, T, static_cast<Eigen::Index>(n));
    adj_b.push_back(Eigen::MatrixXd::Zero(T, static_cast<Eigen::Index>(n)));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    const auto o = static_cast<Eigen::Index>(samples_.periodic[job.begin + i].component);
    const double d = w.jets.output(channel::kV)(o, col) - w.jets_b.output(channel::kV)(o, col);
    w.sums.data += d * d * inv_n;
    if (w.want_grad) {
      w.out_adj[channel::kV](o, col) = scale * 2.0 * d;
      adj_b[0](o, col) = -scale * 2.0 * d;
    }
  }
  if (w.want_grad) {
    w.jets.backward(params, w.out_adj, w.g_theta, {});
    w.jets_b.backward(params, adj_b, w.g_theta, {});
  }
}

}  // namespace ltpinn
