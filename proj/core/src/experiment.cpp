#include "ltpinn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>

#include "ltpinn/io.hpp"
#include "ltpinn/rng.hpp"

namespace ltpinn {

namespace {

// n points spread evenly along a -> b, avoiding the end points.
std::vector<Vec2> along(Vec2 a, Vec2 b, std::size_t n) {
  std::vector<Vec2> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    out.push_back(a + t * (b - a));
  }
  return out;
}

Roi shrink(const Roi& r, double by) { return {r.x_min + by, r.x_max - by, r.y_min + by, r.y_max - by}; }

Measurement measurement(Vec2 p, std::size_t arity, std::initializer_list<std::pair<int, double>> values) {
  Measurement m;
  m.point = p;
  m.values.assign(arity, std::nullopt);
  for (const auto& [c, v] : values) m.values[static_cast<std::size_t>(c)] = v;
  return m;
}

std::vector<CirclePatch> patches_of(std::span<const Vec2> gamma) {
  std::vector<CirclePatch> out;
  out.reserve(gamma.size());
  for (const Vec2& g : gamma) out.push_back({g, 1.0});
  return out;
}

std::vector<Measurement> csv_measurements(const ExperimentConfig& x, int out_dim) {
  SampleSet extra = read_sample_csv(x.data_csv);
  extra.fit_arity(out_dim);
  std::vector<Measurement> ms = std::move(extra.measurements);
  if (ms.size() > x.n_data && x.n_data > 0) {
    std::vector<Vec2> pts;
    for (const auto& m : ms) pts.push_back(m.point);
    std::vector<std::size_t> idx(ms.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng rng(Rng::derive_seed(x.seed, Stream::Subsample));
    for (std::size_t i = 0; i < x.n_data; ++i) std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
    std::vector<Measurement> kept;
    for (std::size_t i = 0; i < x.n_data; ++i) kept.push_back(ms[idx[i]]);
    ms = std::move(kept);
  }
  return ms;
}

void add_flow_edges(SampleSet& s, const ExperimentConfig& x, std::size_t arity) {
  const Roi& r = s.roi;
  const double per = 2.0 * (r.width() + r.height());
  const auto n_side = static_cast<std::size_t>(std::llround(static_cast<double>(x.n_data) * r.height() / per));
  const auto n_tb = static_cast<std::size_t>(std::llround(static_cast<double>(x.n_data) * r.width() / per));
  for (const Vec2& p : along({r.x_min, r.y_min}, {r.x_min, r.y_max}, n_side))
    s.measurements.push_back(measurement(p, arity, {{0, 1.0}, {1, 0.0}}));

  if (x.scenario == Scenario::Flow) {
    for (const Vec2& p : along({r.x_max, r.y_min}, {r.x_max, r.y_max}, n_side))
      s.measurements.push_back(measurement(p, arity, {{2, 0.0}}));
    for (double ny : {1.0, -1.0}) {
      const double y = ny > 0 ? r.y_max : r.y_min;
      for (const Vec2& p : along({r.x_min, y}, {r.x_max, y}, n_tb)) {
        s.measurements.push_back(measurement(p, arity, {{1, 0.0}}));
        EdgeConstraint e;
        e.kind = EdgeConstraint::Kind::NormalDerivative;
        e.point = p;
        e.normal = {0.0, ny};
        e.component = 0;
        s.edges.push_back(e);
      }
    }
    return;
  }

  const double period = x.outlet_period > 0.0 ? x.outlet_period : r.height();
  for (const Vec2& p : along({r.x_max, r.y_min}, {r.x_max, r.y_max}, n_side))
    s.measurements.push_back(measurement(p, arity, {{0, std::sin(2.0 * std::numbers::pi * p.y / period) + 1.0}}));
  for (const Vec2& p : along({r.x_min, r.y_max}, {r.x_max, r.y_max}, n_tb))
    for (int c : {0, 1}) s.periodic.push_back({p, {p.x, r.y_min}, c});
}

void add_elastic_edges(SampleSet& s, const ExperimentConfig& x) {
  const Roi& r = s.roi;
  for (const Vec2& p : along({r.x_max, r.y_min}, {r.x_max, r.y_max}, x.edge_points))
    s.measurements.push_back(measurement(p, 2, {{0, 0.0}, {1, 0.0}}));
  auto traction = [&](Vec2 a, Vec2 b, Vec2 n, double tx) {
    for (const Vec2& p : along(a, b, x.edge_points)) {
      EdgeConstraint e;
      e.kind = EdgeConstraint::Kind::Traction;
      e.point = p;
      e.normal = n;
      e.value[0] = tx;
      e.value[1] = 0.0;
      s.edges.push_back(e);
    }
  };
  // unit pressure on the left edge: sigma . n = -1 * n
  traction({r.x_min, r.y_min}, {r.x_min, r.y_max}, {-1.0, 0.0}, 1.0);
  traction({r.x_min, r.y_max}, {r.x_max, r.y_max}, {0.0, 1.0}, 0.0);
  traction({r.x_min, r.y_min}, {r.x_max, r.y_min}, {0.0, -1.0}, 0.0);
}

Eigen::MatrixXd predict(const TrainState& state, std::span<const Vec2> points) {
  BatchedJets jets;
  jets.forward(state.theta, state.norm, points, DerivOrder::Value);
  return jets.output(channel::kV);
}

std::string field_name(const ExperimentConfig& x, int c) { return field_names(x)[static_cast<std::size_t>(c)]; }

double gamma_error(const Experiment& exp, const TrainState& state) {
  if (exp.reference.empty()) throw ConfigError("metric gamma_error needs geometry.reference_centers");
  if (state.gamma.size() != exp.reference.size())
    throw ConfigError("metric gamma_error needs one learned centre per reference centre (lt mode)");
  std::vector<bool> used(state.gamma.size(), false);
  double worst = 0.0;
  for (const auto& ref : exp.reference) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < state.gamma.size(); ++k) {
      const double d = norm(state.gamma[k] - ref.gamma);
      if (!used[k] && d < best_d) {
        best_d = d;
        best = k;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

// Prediction and reference per field: the reference sample set when given,
// otherwise the closed form on the metric grid.
std::vector<std::pair<std::vector<double>, std::vector<double>>> field_pairs(const Experiment& exp,
                                                                             const TrainState& state,
                                                                             const SampleSet* reference) {
  const int n = exp.config.loss.problem.out_dim();
  std::vector<std::pair<std::vector<double>, std::vector<double>>> out(static_cast<std::size_t>(n));
  if (reference) {
    std::vector<Vec2> pts;
    for (const auto& m : reference->measurements) pts.push_back(m.point);
    const Eigen::MatrixXd u = predict(state, pts);
    for (std::size_t i = 0; i < reference->measurements.size(); ++i) {
      const auto& m = reference->measurements[i];
      for (int c = 0; c < n && c < static_cast<int>(m.values.size()); ++c) {
        if (!m.values[static_cast<std::size_t>(c)]) continue;
        out[static_cast<std::size_t>(c)].first.push_back(u(c, static_cast<Eigen::Index>(i)));
        out[static_cast<std::size_t>(c)].second.push_back(*m.values[static_cast<std::size_t>(c)]);
      }
    }
    return out;
  }
  if (!exp.oracle) throw ConfigError("no reference field for this scenario; pass a reference sample CSV");
  const std::vector<Vec2> pts = metric_grid(exp.samples.core, exp.reference, exp.config.metric_grid);
  const Eigen::MatrixXd u = predict(state, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out[0].first.push_back(u(0, static_cast<Eigen::Index>(i)));
    out[0].second.push_back(annulus_temperature(*exp.oracle, pts[i]));
  }
  return out;
}

}  // namespace

Experiment build_experiment(const ExperimentConfig& x) {
  Experiment exp;
  exp.config = x;
  const LossSpec& l = x.loss;
  const int arity = l.problem.out_dim();
  SampleSet& s = exp.samples;

  for (const Vec2& c : x.reference_centers) exp.reference.push_back({c, 1.0});
  if (x.roi) {
    s.roi = *x.roi;
    s.core = shrink(*x.roi, 0.1);
    if (!s.core.valid()) throw ConfigError("sampling.roi is too small to hold a core region");
  } else {
    if (x.reference_centers.empty()) throw ConfigError("sampling.roi is empty and no reference centres are given");
    std::tie(s.roi, s.core) = build_multi_patch_roi(bounding_box(x.reference_centers));
  }
  exp.norm = InputNormalizer::from_roi(s.roi);
  s.collocation = uniform_grid(s.core, x.grid_nx, x.grid_ny);

  if (x.scenario == Scenario::Annulus || x.scenario == Scenario::Laplace) {
    if (x.data_min_radius < 0.5) throw ConfigError("sampling.data_min_radius must be >= 0.5 (patch radius)");
    AnnulusProblem a;
    a.outer_radius = x.annulus_outer;
    a.q = l.bc.kind == BoundaryCondition::Kind::Neumann ? l.bc.q : -0.5;
    a.center = x.reference_centers.at(0);
    a.validate();
    exp.oracle = a;
    auto keep = [&](Vec2 p) { return norm(p - a.center) >= x.data_min_radius; };
    std::vector<Vec2> pts;
    if (x.scenario == Scenario::Annulus) {
      pts = random_points_where(s.roi, x.n_data, Rng::derive_seed(x.seed, Stream::Measurements), keep);
    } else if (x.data_csv.empty()) {
      std::vector<Vec2> grid;
      for (const Vec2& p : uniform_grid(s.roi, x.grid_nx, x.grid_ny))
        if (keep(p)) grid.push_back(p);
      pts = subsample(grid, x.n_data, Rng::derive_seed(x.seed, Stream::Subsample));
    }
    for (const Vec2& p : pts) s.measurements.push_back(measurement(p, 1, {{0, annulus_temperature(a, p)}}));
    if (!x.data_csv.empty()) s.measurements = csv_measurements(x, arity);
  } else if (x.scenario == Scenario::Elastic) {
    s.measurements_outside_core = true;
    if (!x.data_csv.empty()) s.measurements = csv_measurements(x, arity);
    add_elastic_edges(s, x);
  } else {
    s.measurements_outside_core = true;
    add_flow_edges(s, x, static_cast<std::size_t>(arity));
    if (!x.data_csv.empty()) {
      auto extra = csv_measurements(x, arity);
      s.measurements.insert(s.measurements.end(), extra.begin(), extra.end());
    }
  }

  if (l.mode == Mode::LT) {
    if (x.random_init) {
      exp.initial_gamma = init_gamma(x.n_patches, s.core, x.seed);
    } else {
      exp.initial_gamma = x.init_centers;
    }
    for (std::size_t k = 0; k < exp.initial_gamma.size(); ++k) {
      auto ring = sample_rings({exp.initial_gamma[k], 1.0}, k, x.ring_radii, x.ring_points);
      s.boundary.insert(s.boundary.end(), ring.begin(), ring.end());
    }
  }
  s.validate(arity);
  if (s.data_entries() == 0) throw ConfigError("the configured scenario has no data entries");
  return exp;
}

TrainState initial_state(const Experiment& exp) {
  TrainState s = make_state(he_init(exp.config.network, exp.config.seed), exp.norm, exp.config.loss.mode,
                            exp.initial_gamma);
  s.dt_c = exp.config.loss.dt_c;
  return s;
}

LossEvaluator make_loss(const Experiment& exp) {
  LossSpec spec = exp.config.loss;
  if (spec.mode == Mode::DT) {
    spec.bc = {};
    spec.topo = {};
  }
  return LossEvaluator(spec, exp.samples, exp.norm, exp.config.chunk, exp.config.threads);
}

std::vector<std::string> field_names(const ExperimentConfig& x) {
  std::vector<std::string> out;
  switch (x.loss.problem.kind) {
    case PdeKind::Laplace:
      out = {"T"};
      break;
    case PdeKind::Elastic:
      out = {"ux", "uy"};
      break;
    case PdeKind::SteadyNS:
    case PdeKind::PressurePoisson:
      out = {"u", "v", "p"};
      break;
  }
  if (x.loss.mode == Mode::DT) out.push_back("rho");
  return out;
}

const std::vector<std::string>& known_metrics() {
  static const std::vector<std::string> names = {"gamma_error", "relative_l2", "nmae", "boundary_flux_error",
                                                 "lift",        "drag",        "outlet_l2"};
  return names;
}

std::vector<std::string> default_metrics(const Experiment& exp) {
  const ExperimentConfig& x = exp.config;
  const bool lt = x.loss.mode == Mode::LT;
  std::vector<std::string> out;
  if (lt && !exp.reference.empty()) out.push_back("gamma_error");
  if (exp.oracle) {
    out.push_back("relative_l2");
    out.push_back("boundary_flux_error");
  }
  if (lt && x.loss.problem.out_dim() == 3) {
    out.push_back("lift");
    out.push_back("drag");
  }
  if (x.scenario == Scenario::Rearrange) out.push_back("outlet_l2");
  return out;
}

std::vector<MetricRecord> compute_metrics(const Experiment& exp, const TrainState& state,
                                          const std::vector<std::string>& names, const SampleSet* reference) {
  for (const auto& n : names)
    if (std::find(known_metrics().begin(), known_metrics().end(), n) == known_metrics().end())
      throw ConfigError("unknown metric '" + n + "'");
  const ExperimentConfig& x = exp.config;
  std::vector<MetricRecord> out;
  std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
  bool have_pairs = false;
  auto fields = [&]() -> const auto& {
    if (!have_pairs) {
      pairs = field_pairs(exp, state, reference);
      have_pairs = true;
    }
    return pairs;
  };
  const NetworkField net{&state.theta, state.norm};
  const std::vector<CirclePatch> learned = patches_of(state.gamma);

  for (const auto& name : names) {
    if (name == "gamma_error") {
      out.push_back({name, "gamma", gamma_error(exp, state)});
    } else if (name == "relative_l2" || name == "nmae") {
      const auto& fp = fields();
      for (std::size_t c = 0; c < fp.size(); ++c) {
        if (fp[c].second.empty()) continue;
        const double v = name == "nmae" ? nmae(fp[c].first, fp[c].second) : relative_l2(fp[c].first, fp[c].second);
        out.push_back({name, field_name(x, static_cast<int>(c)), v});
      }
    } else if (name == "boundary_flux_error") {
      if (!exp.oracle || exp.reference.empty())
        throw ConfigError("metric boundary_flux_error needs the annulus or laplace scenario");
      const auto flux = boundary_flux(net, exp.reference[0], x.flux_samples, 0);
      out.push_back({name, "T", std::abs(mean_flux(flux) - exp.oracle->q)});
    } else if (name == "lift" || name == "drag") {
      if (x.loss.problem.out_dim() != 3 || learned.empty())
        throw ConfigError("metric " + name + " needs a flow scenario in lt mode");
      auto pressure = [&](Vec2 p) { return forward<double>(state.theta, state.norm, p.x, p.y)[2]; };
      const Force f = lift_drag(pressure, learned, std::max<std::size_t>(x.flux_samples, 16));
      out.push_back({name, "p", name == "lift" ? f.lift : f.drag});
    } else if (name == "outlet_l2") {
      if (x.scenario != Scenario::Rearrange) throw ConfigError("metric outlet_l2 needs the rearrange scenario");
      const Roi& r = exp.samples.roi;
      const double period = x.outlet_period > 0.0 ? x.outlet_period : r.height();
      const std::vector<Vec2> pts = along({r.x_max, r.y_min}, {r.x_max, r.y_max}, x.flux_samples);
      const Eigen::MatrixXd u = predict(state, pts);
      std::vector<double> pred, ref;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        pred.push_back(u(0, static_cast<Eigen::Index>(i)));
        ref.push_back(std::sin(2.0 * std::numbers::pi * pts[i].y / period) + 1.0);
      }
      out.push_back({name, "u", relative_l2(pred, ref)});
    }
  }
  return out;
}

void write_field_csv(const std::filesystem::path& path, const Experiment& exp, const TrainState& state) {
  const std::vector<CirclePatch> learned = patches_of(state.gamma);
  const std::vector<Vec2> pts = metric_grid(exp.samples.core, learned, exp.config.metric_grid);
  const auto names = field_names(exp.config);
  std::ofstream os = open_output(path);
  os << "x,y";
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  if (pts.empty()) return;
  const Eigen::MatrixXd u = predict(state, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    os << format_real(pts[i].x) << ',' << format_real(pts[i].y);
    for (Eigen::Index c = 0; c < u.rows(); ++c) os << ',' << format_real(u(c, static_cast<Eigen::Index>(i)));
    os << '\n';
  }
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

ScalarGrid density_grid(const Experiment& exp, const TrainState& state, std::size_t n) {
  if (state.mode != Mode::DT || !state.theta.config().has_density_channel)
    throw ConfigError("density export needs a dt checkpoint");
  ScalarGrid g;
  g.region = exp.samples.core;
  g.nx = n;
  g.ny = n;
  const std::vector<Vec2> pts = uniform_grid(g.region, n, n);
  const Eigen::MatrixXd u = predict(state, pts);
  const Eigen::Index rho = u.rows() - 1;
  g.values.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    g.values[i] = density_indicator(u(rho, static_cast<Eigen::Index>(i)), state.dt_c);
  return g;
}

TopologyExport export_topology(const Experiment& exp, const TrainState& state, double threshold,
                               const std::vector<double>& sweep) {
  TopologyExport t;
  if (state.mode == Mode::LT) {
    const std::vector<CirclePatch> learned = patches_of(state.gamma);
    t.json = topology_json(learned);
    t.svg = topology_svg(exp.samples.roi, learned);
    return t;
  }
  const ScalarGrid g = density_grid(exp, state, exp.config.metric_grid);
  const DensityTopology topo = extract_density_topology(g, threshold);
  t.empty = topo.status == DensityTopology::Status::Empty;
  t.svg = topology_svg(exp.samples.roi, {}, topo.polylines);
  if (sweep.empty()) {
    t.json = density_topology_json(topo) + "\n";
  } else {
    std::vector<DensityTopology> all;
    for (double thr : sweep) all.push_back(extract_density_topology(g, thr));
    t.json = density_sweep_json(all);
  }
  return t;
}

void export_oracle_csv(const std::filesystem::path& path, const Experiment& exp) {
  if (!exp.oracle) throw ConfigError("export-oracle needs the annulus or laplace scenario");
  SampleSet s;
  s.roi = exp.samples.roi;
  s.core = exp.samples.core;
  for (const Vec2& p : metric_grid(exp.samples.core, exp.reference, exp.config.metric_grid))
    s.measurements.push_back(measurement(p, 1, {{0, annulus_temperature(*exp.oracle, p)}}));
  write_sample_csv(path, s);
}

RunResult run_train(const Config& config, std::ostream* progress) {
  const ExperimentConfig x = ExperimentConfig::from(config);
  const Experiment exp = build_experiment(x);
  const LossEvaluator loss = make_loss(exp);
  RunResult r{initial_state(exp), {}, {}};
  const auto& dir = x.output_dir;

  {
    std::ofstream os = open_output(dir / "config.ini");
    os << config.to_ini();
  }
  std::ofstream loss_csv = open_output(dir / "loss.csv");
  std::ofstream gamma_csv = open_output(dir / "gamma.csv");
  loss_csv << "epoch,total,pde,bc,data,topo_fixed,topo_overlap\n";
  gamma_csv << "epoch";
  for (std::size_t k = 0; k < r.state.gamma.size(); ++k) gamma_csv << ",x" << k << ",y" << k;
  gamma_csv << '\n';
  loss_csv.flush();
  gamma_csv.flush();

  TrainOptions opt;
  opt.epochs = x.epochs;
  opt.log_interval = x.log_interval;
  opt.adam = x.adam;
  opt.early_stop = x.early_stop && x.loss.mode == Mode::LT;
  opt.early_stop_window = x.early_stop_window;
  opt.early_stop_tol = x.early_stop_tol;
  opt.on_log = [&](std::int64_t epoch, const LossBreakdown& b, const TrainState& s) {
    loss_csv << epoch << ',' << format_real(b.total) << ',' << format_real(b.pde) << ',' << format_real(b.bc) << ','
             << format_real(b.data) << ',' << format_real(b.topo_fixed) << ',' << format_real(b.topo_overlap) << '\n';
    gamma_csv << epoch;
    for (const Vec2& g : s.gamma) gamma_csv << ',' << format_real(g.x) << ',' << format_real(g.y);
    gamma_csv << '\n';
    loss_csv.flush();
    gamma_csv.flush();
    if (!loss_csv || !gamma_csv) throw IoError("failed writing training logs in '" + dir.string() + "'");
    if (progress) {
      *progress << "epoch " << epoch << "  loss " << format_real(b.total);
      if (s.gamma.size() == 1) *progress << "  gamma " << format_real(s.gamma[0].x) << ' ' << format_real(s.gamma[0].y);
      *progress << '\n';
    }
    return true;
  };

  try {
    r.train = train(r.state, loss, opt);
  } catch (const DivergenceError&) {
    checkpoint_save(r.state, dir / "diverged.bin");
    throw;
  }
  if (progress && r.train.stopped_early) *progress << "early stop: centres stable\n";

  checkpoint_save(r.state, dir / "checkpoint.bin");
  write_field_csv(dir / "field.csv", exp, r.state);
  const TopologyExport topo = export_topology(exp, r.state, x.density_threshold);
  {
    std::ofstream os = open_output(dir / "topology.json");
    os << topo.json;
    std::ofstream svg = open_output(dir / "topology.svg");
    svg << topo.svg;
  }
  if (progress && topo.empty) *progress << "warning: density below threshold everywhere, topology is empty\n";
  r.metrics = compute_metrics(exp, r.state, default_metrics(exp));
  {
    std::ofstream os = open_output(dir / "metrics.json");
    os << metrics_json(r.metrics, x.config_hash);
    if (!os) throw IoError("failed writing '" + (dir / "metrics.json").string() + "'");
  }
  return r;
}

}  // namespace ltpinn
