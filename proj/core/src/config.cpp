#include "ltpinn/config.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ltpinn/io.hpp"

namespace ltpinn {

namespace {

struct Default {
  const char* key;
  const char* value;
  const char* help;
};

// The base values form the annulus-lt preset.
const Default kDefaults[] = {
    {"run.preset", "annulus-lt", "preset applied before this file"},
    {"run.mode", "lt", "lt (circle patches) or dt (density channel)"},
    {"run.scenario", "annulus", "annulus, laplace, elastic, flow, rearrange"},
    {"run.epochs", "20000", "training epochs"},
    {"run.log_interval", "500", "epochs between loss/gamma log rows"},
    {"run.seed", "1", "root seed for every random stream"},
    {"run.threads", "1", "worker threads for loss evaluation"},
    {"run.chunk", "256", "points per evaluation chunk"},
    {"run.output_dir", "", "output directory; empty means runs/<preset>"},

    {"pde.kind", "laplace", "elastic, laplace, steady_ns, pressure_poisson"},
    {"pde.E", "1", "Young's modulus"},
    {"pde.nu", "0.33", "Poisson ratio"},
    {"pde.Re", "1", "Reynolds number"},
    {"pde.q", "-0.5", "Neumann flux across the patch boundary"},
    {"pde.dt_c", "-10", "density sharpness c in 1/(1+exp(-c rho))"},
    {"pde.dt_bc", "", "u_b inside the density residual; empty drops the term"},

    {"network.layers", "3", "hidden layers"},
    {"network.width", "32", "neurons per hidden layer"},

    {"geometry.patches", "1", "number of circle patches"},
    {"geometry.beta", "100", "sharpness of the patch indicator"},
    {"geometry.k", "1", "exponent on each indicator in the PDE weight"},
    {"geometry.ring_radii", "0.5 0.4 0.3 0.2", "radii of the boundary sample rings"},
    {"geometry.ring_points", "64", "samples per ring"},
    {"geometry.init", "explicit", "random (sigmoid-mapped normal draws) or explicit"},
    {"geometry.init_centers", "0,0", "initial centres for init = explicit"},
    {"geometry.reference_centers", "0.2,-0.15", "true centres (reference data, roi, metrics)"},

    {"sampling.roi", "-1.1 1.1 -1.1 1.1", "x_min x_max y_min y_max; empty derives it from the reference centres"},
    {"sampling.grid_nx", "41", "collocation grid columns"},
    {"sampling.grid_ny", "41", "collocation grid rows"},
    {"sampling.n_data", "800", "measurement / edge data points"},
    {"sampling.data_csv", "", "sample CSV with extra measurement rows"},
    {"sampling.annulus_outer", "2", "outer radius of the closed-form reference"},
    {"sampling.data_min_radius", "0.75", "measurements keep this distance from the reference centres"},
    {"sampling.edge_points", "64", "edge condition points per ROI edge (elastic)"},
    {"sampling.outlet_period", "0", "period of the outlet profile; 0 means roi height"},

    {"loss.lambda_p", "1", "PDE loss weight"},
    {"loss.lambda_b", "1", "boundary loss weight"},
    {"loss.lambda_d", "10000", "data loss weight"},
    {"loss.lambda_t", "0", "topology loss weight"},
    {"loss.topo", "none", "none, pairs or hub"},
    {"loss.topo_distance", "2.5", "target distance for hub mode and for pairs without one"},
    {"loss.topo_pairs", "", "i-j or i-j:r pairs"},
    {"loss.nonoverlap", "false", "add the inverse-square non-overlap term"},

    {"adam.lr", "0.001", "learning rate"},
    {"adam.lr_gamma", "0", "learning rate for the centres; 0 means adam.lr"},
    {"adam.beta1", "0.9", ""},
    {"adam.beta2", "0.999", ""},
    {"adam.eps", "1e-8", ""},

    {"early_stop.enabled", "false", "stop once the centres stop moving"},
    {"early_stop.window", "10", "logged snapshots inspected"},
    {"early_stop.tol", "1e-4", "max centre change between snapshots"},

    {"metrics.grid", "128", "metric grid resolution per axis"},
    {"metrics.flux_samples", "256", "points on the reference boundary for flux metrics"},
    {"metrics.threshold", "0.5", "density threshold for dt topology export"},
};

using Overrides = std::vector<std::pair<const char*, const char*>>;

const Overrides kElastic = {
    {"run.scenario", "elastic"},       {"run.epochs", "400000"},           {"pde.kind", "elastic"},
    {"network.layers", "5"},           {"network.width", "64"},            {"geometry.ring_points", "128"},
    {"geometry.init", "random"},       {"geometry.reference_centers", "0,0"},
    {"sampling.grid_nx", "120"},       {"sampling.grid_ny", "120"},        {"sampling.n_data", "2167"},
    {"loss.lambda_p", "2000"},         {"loss.lambda_b", "10000"},         {"loss.lambda_d", "10000"},
    {"adam.lr", "0.0001"},
};

const Overrides kLaplace = {
    {"run.scenario", "laplace"},     {"run.epochs", "400000"},         {"network.layers", "8"},
    {"network.width", "256"},        {"geometry.ring_points", "256"},  {"geometry.init", "random"},
    {"sampling.grid_nx", "120"},     {"sampling.grid_ny", "120"},      {"sampling.n_data", "1638"},
    {"sampling.data_min_radius", "0.5"},
    {"loss.lambda_p", "1"},          {"loss.lambda_b", "1"},           {"loss.lambda_d", "10000"},
    {"adam.lr", "0.0001"},
};

const Overrides kFlow = {
    {"run.scenario", "flow"},      {"run.epochs", "100000"},        {"sampling.roi", ""},        {"pde.kind", "steady_ns"},
    {"pde.Re", "1"},               {"network.layers", "5"},         {"network.width", "64"},
    {"geometry.ring_points", "128"}, {"geometry.init", "random"},
    {"loss.lambda_p", "2000"},     {"loss.lambda_b", "10000"},      {"loss.lambda_d", "10000"},
    {"loss.lambda_t", "10000"},    {"loss.nonoverlap", "true"},     {"adam.lr", "0.0001"},
};

Overrides concat(Overrides a, const Overrides& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

const std::vector<std::pair<std::string, Overrides>>& presets() {
  static const std::vector<std::pair<std::string, Overrides>> p = {
      {"annulus-lt", {}},
      {"annulus-dt", {{"run.mode", "dt"}}},
      {"elastic-lt", kElastic},
      {"elastic-dt", concat(kElastic, {{"run.mode", "dt"}, {"loss.lambda_p", "200"}, {"pde.dt_bc", "0 0"}})},
      {"laplace-lt", kLaplace},
      {"laplace-dt", concat(kLaplace, {{"run.mode", "dt"}})},
      {"ns-2c", concat(kFlow, {{"geometry.patches", "2"},
                               {"geometry.reference_centers", "-1.25,0 1.25,0"},
                               {"sampling.grid_nx", "270"},
                               {"sampling.grid_ny", "120"},
                               {"sampling.n_data", "3389"},
                               {"loss.topo", "pairs"},
                               {"loss.topo_pairs", "0-1"}})},
      {"ns-3c", concat(kFlow, {{"geometry.patches", "3"},
                               {"geometry.reference_centers", "-1.0825317547305482,-1.25 -1.0825317547305482,1.25 "
                                                              "1.0825317547305482,0"},
                               {"sampling.grid_nx", "249"},
                               {"sampling.grid_ny", "270"},
                               {"sampling.n_data", "3682"},
                               {"loss.topo", "pairs"},
                               {"loss.topo_pairs", "0-1 1-2 0-2"}})},
      {"ns-8c", concat(kFlow, {{"geometry.patches", "8"},
                               {"geometry.reference_centers",
                                "2.5,0 1.7677669529663689,1.7677669529663687 0,2.5 -1.7677669529663687,1.7677669529663689 "
                                "-2.5,0 -1.7677669529663689,-1.7677669529663687 0,-2.5 "
                                "1.7677669529663687,-1.7677669529663689"},
                               {"sampling.grid_nx", "420"},
                               {"sampling.grid_ny", "420"},
                               {"sampling.n_data", "5373"},
                               {"loss.topo", "hub"},
                               {"loss.lambda_t", "100"}})},
      {"poisson-8c", concat(kFlow, {{"pde.kind", "pressure_poisson"},
                                    {"pde.Re", "100"},
                                    {"geometry.patches", "8"},
                                    {"geometry.reference_centers",
                                     "2.5,0 1.7677669529663689,1.7677669529663687 0,2.5 "
                                     "-1.7677669529663687,1.7677669529663689 -2.5,0 "
                                     "-1.7677669529663689,-1.7677669529663687 0,-2.5 "
                                     "1.7677669529663687,-1.7677669529663689"},
                                    {"sampling.grid_nx", "420"},
                                    {"sampling.grid_ny", "420"},
                                    {"sampling.n_data", "5373"},
                                    {"loss.topo", "hub"},
                                    {"loss.lambda_t", "100"}})},
      {"rearrange-48", concat(kFlow, {{"run.scenario", "rearrange"},
                                      {"geometry.patches", "48"},
                                      {"geometry.ring_points", "107"},
                                      {"geometry.reference_centers", ""},
                                      {"sampling.roi", "-12.5 12.5 -7.5 7.5"},
                                      {"sampling.grid_nx", "1500"},
                                      {"sampling.grid_ny", "900"},
                                      {"sampling.n_data", "800"},
                                      {"loss.lambda_t", "0"},
                                      {"loss.nonoverlap", "false"}})},
      {"rearrange-4", concat(kFlow, {{"run.scenario", "rearrange"},
                                     {"run.epochs", "2000"},
                                     {"run.log_interval", "100"},
                                     {"network.layers", "3"},
                                     {"network.width", "32"},
                                     {"geometry.patches", "4"},
                                     {"geometry.ring_points", "16"},
                                     {"geometry.reference_centers", ""},
                                     {"sampling.roi", "-3 3 -2 2"},
                                     {"sampling.grid_nx", "31"},
                                     {"sampling.grid_ny", "21"},
                                     {"sampling.n_data", "200"},
                                     {"loss.lambda_t", "0"},
                                     {"loss.nonoverlap", "false"},
                                     {"adam.lr", "0.001"}})},
  };
  return p;
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == ',') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, _] : presets()) out.push_back(name);
  return out;
}

Config::Config(std::string_view preset) {
  for (const auto& d : kDefaults) entries_.push_back({d.key, d.value, d.help});
  apply_preset(preset);
}

void Config::apply_preset(std::string_view name) {
  for (const auto& [pname, overrides] : presets()) {
    if (pname != name) continue;
    for (const auto& d : kDefaults) find(d.key).value = d.value;
    for (const auto& [k, v] : overrides) find(k).value = v;
    find("run.preset").value = std::string(name);
    return;
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

Config::Entry& Config::find(std::string_view key) {
  for (auto& e : entries_)
    if (e.key == key) return e;
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

const Config::Entry& Config::find(std::string_view key) const {
  for (const auto& e : entries_)
    if (e.key == key) return e;
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void Config::set(std::string_view key, std::string_view value) {
  if (key == "run.preset") {
    apply_preset(trim(value));
    return;
  }
  find(key).value = trim(value);
}

void Config::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

Config Config::from_file(const std::filesystem::path& path, std::string_view base) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    if (e.line() == 0 && !std::filesystem::exists(path)) throw IoError("cannot read config '" + path.string() + "'");
    throw ConfigError(path.string() + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  std::string preset(base);
  if (auto run = tree.get_child_optional("run"))
    if (auto p = run->get_optional<std::string>("preset")) preset = trim(*p);
  Config c(preset);
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError(path.string() + ": key '" + section + "' must be inside a [section]");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (full == "run.preset") continue;
      try {
        c.set(full, value.data());
      } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
      }
    }
  }
  return c;
}

const std::string& Config::get(std::string_view key) const { return find(key).value; }

double Config::real(std::string_view key) const { return parse_real(get(key), key); }

long long Config::integer(std::string_view key) const { return parse_int(get(key), key); }

std::size_t Config::count(std::string_view key) const {
  const long long v = integer(key);
  if (v < 0) throw ConfigError(std::string(key) + ": must be >= 0, got " + std::to_string(v));
  return static_cast<std::size_t>(v);
}

bool Config::flag(std::string_view key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(std::string(key) + ": expected true or false, got '" + v + "'");
}

std::vector<double> Config::reals(std::string_view key) const {
  std::vector<double> out;
  for (const auto& t : tokens(get(key))) out.push_back(parse_real(t, key));
  return out;
}

std::vector<Vec2> Config::points(std::string_view key) const {
  std::vector<Vec2> out;
  std::istringstream is(get(key));
  std::string item;
  while (is >> item) {
    const auto parts = split(item, ',');
    if (parts.size() != 2) throw ConfigError(std::string(key) + ": expected x,y pairs, got '" + item + "'");
    out.push_back({parse_real(parts[0], key), parse_real(parts[1], key)});
  }
  return out;
}

std::string Config::to_ini() const {
  std::string out = "# ltpinn configuration\n";
  std::string section;
  for (const auto& e : entries_) {
    const auto dot = e.key.find('.');
    const std::string s = e.key.substr(0, dot);
    if (s != section) {
      out += "\n[" + s + "]\n";
      section = s;
    }
    if (!e.help.empty()) out += "# " + e.help + "\n";
    out += e.key.substr(dot + 1) + " = " + e.value + "\n";
  }
  return out;
}

std::string Config::hash() const { return fnv1a_hex(to_ini()); }

// ---------------------------------------------------------------------------

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::Annulus:
      return "annulus";
    case Scenario::Laplace:
      return "laplace";
    case Scenario::Elastic:
      return "elastic";
    case Scenario::Flow:
      return "flow";
    case Scenario::Rearrange:
      return "rearrange";
  }
  return "unknown";
}

Scenario scenario_from_string(std::string_view name) {
  for (Scenario s : {Scenario::Annulus, Scenario::Laplace, Scenario::Elastic, Scenario::Flow, Scenario::Rearrange})
    if (to_string(s) == name) return s;
  throw ConfigError("unknown scenario '" + std::string(name) +
                    "' (expected annulus, laplace, elastic, flow, rearrange)");
}

ExperimentConfig ExperimentConfig::from(const Config& c) {
  ExperimentConfig x;
  x.preset = c.get("run.preset");
  x.scenario = scenario_from_string(c.get("run.scenario"));
  x.epochs = c.integer("run.epochs");
  if (x.epochs < 0) throw ConfigError("run.epochs must be >= 0");
  x.log_interval = c.integer("run.log_interval");
  if (x.log_interval < 1) throw ConfigError("run.log_interval must be >= 1");
  const long long seed = c.integer("run.seed");
  if (seed < 0) throw ConfigError("run.seed must be >= 0");
  x.seed = static_cast<std::uint64_t>(seed);
  x.threads = static_cast<int>(c.integer("run.threads"));
  if (x.threads < 1) throw ConfigError("run.threads must be >= 1");
  x.chunk = c.count("run.chunk");
  if (x.chunk < 1) throw ConfigError("run.chunk must be >= 1");
  x.output_dir = c.get("run.output_dir").empty() ? std::filesystem::path("runs") / x.preset
                                                 : std::filesystem::path(c.get("run.output_dir"));

  LossSpec& l = x.loss;
  l.mode = mode_from_string(c.get("run.mode"));
  l.problem.kind = pde_kind_from_string(c.get("pde.kind"));
  l.problem.material = {c.real("pde.E"), c.real("pde.nu")};
  l.problem.flow = {c.real("pde.Re")};
  l.problem.validate();
  l.dt_c = c.real("pde.dt_c");
  if (l.dt_c == 0.0) throw ConfigError("pde.dt_c must be non-zero");
  l.dt_bc = c.reals("pde.dt_bc");
  if (!l.dt_bc.empty() && static_cast<int>(l.dt_bc.size()) != l.problem.out_dim())
    throw ConfigError("pde.dt_bc needs " + std::to_string(l.problem.out_dim()) + " values");
  if (l.mode == Mode::DT && l.problem.residual_dim() != l.problem.out_dim())
    throw ConfigError("run.mode = dt needs one residual per solution component (not pressure_poisson)");
  l.beta = c.real("geometry.beta");
  if (!(l.beta > 0.0)) throw ConfigError("geometry.beta must be positive");
  l.k = c.real("geometry.k");
  if (!(l.k > 0.0)) throw ConfigError("geometry.k must be positive");
  l.weights = {c.real("loss.lambda_p"), c.real("loss.lambda_b"), c.real("loss.lambda_d"), c.real("loss.lambda_t")};
  l.weights.validate();

  x.network.n_layers = static_cast<int>(c.integer("network.layers"));
  x.network.width = static_cast<int>(c.integer("network.width"));
  x.network.out_dim = l.problem.out_dim();
  x.network.has_density_channel = l.mode == Mode::DT;
  x.network.validate();

  x.n_patches = c.count("geometry.patches");
  if (x.n_patches < 1) throw ConfigError("geometry.patches must be >= 1");
  x.ring_radii = c.reals("geometry.ring_radii");
  if (x.ring_radii.empty()) throw ConfigError("geometry.ring_radii must list at least one radius");
  for (double r : x.ring_radii)
    if (!(r > 0.0 && r <= 0.5)) throw ConfigError("geometry.ring_radii: radius " + format_real(r) + " outside (0, 0.5]");
  x.ring_points = c.count("geometry.ring_points");
  if (x.ring_points < 1) throw ConfigError("geometry.ring_points must be >= 1");
  const std::string init = c.get("geometry.init");
  if (init != "random" && init != "explicit") throw ConfigError("geometry.init must be random or explicit");
  x.random_init = init == "random";
  x.init_centers = c.points("geometry.init_centers");
  if (!x.random_init && x.init_centers.size() != x.n_patches)
    throw ConfigError("geometry.init_centers lists " + std::to_string(x.init_centers.size()) + " centres for " +
                      std::to_string(x.n_patches) + " patches");
  x.reference_centers = c.points("geometry.reference_centers");
  if (!x.reference_centers.empty() && x.reference_centers.size() != x.n_patches)
    throw ConfigError("geometry.reference_centers lists " + std::to_string(x.reference_centers.size()) +
                      " centres for " + std::to_string(x.n_patches) + " patches");

  const std::vector<double> roi = c.reals("sampling.roi");
  if (!roi.empty()) {
    if (roi.size() != 4) throw ConfigError("sampling.roi needs x_min x_max y_min y_max");
    x.roi = Roi{roi[0], roi[1], roi[2], roi[3]};
    if (!x.roi->valid()) throw ConfigError("sampling.roi is degenerate");
  }
  x.grid_nx = c.count("sampling.grid_nx");
  x.grid_ny = c.count("sampling.grid_ny");
  if (x.grid_nx < 2 || x.grid_ny < 2) throw ConfigError("sampling.grid_nx and grid_ny must be >= 2");
  x.n_data = c.count("sampling.n_data");
  x.data_csv = c.get("sampling.data_csv");
  x.annulus_outer = c.real("sampling.annulus_outer");
  if (!(x.annulus_outer > 0.5)) throw ConfigError("sampling.annulus_outer must exceed 0.5");
  x.data_min_radius = c.real("sampling.data_min_radius");
  x.edge_points = c.count("sampling.edge_points");
  x.outlet_period = c.real("sampling.outlet_period");
  if (x.outlet_period < 0.0) throw ConfigError("sampling.outlet_period must be >= 0");

  const std::string topo = c.get("loss.topo");
  if (topo == "none")
    l.topo.kind = TopologyLoss::Kind::None;
  else if (topo == "pairs")
    l.topo.kind = TopologyLoss::Kind::Pairs;
  else if (topo == "hub")
    l.topo.kind = TopologyLoss::Kind::Hub;
  else
    throw ConfigError("loss.topo must be none, pairs or hub");
  l.topo.hub_distance = c.real("loss.topo_distance");
  if (!(l.topo.hub_distance > 0.0)) throw ConfigError("loss.topo_distance must be positive");
  for (const auto& t : tokens(c.get("loss.topo_pairs"))) {
    const auto colon = t.find(':');
    const std::string ij = t.substr(0, colon);
    const auto dash = ij.find('-');
    if (dash == std::string::npos) throw ConfigError("loss.topo_pairs: expected i-j, got '" + t + "'");
    TopoPair p;
    p.i = static_cast<std::size_t>(parse_int(ij.substr(0, dash), "loss.topo_pairs"));
    p.j = static_cast<std::size_t>(parse_int(ij.substr(dash + 1), "loss.topo_pairs"));
    p.target = colon == std::string::npos ? l.topo.hub_distance : parse_real(t.substr(colon + 1), "loss.topo_pairs");
    if (p.i >= x.n_patches || p.j >= x.n_patches || p.i == p.j)
      throw ConfigError("loss.topo_pairs: pair '" + t + "' does not join two existing patches");
    l.topo.pairs.push_back(p);
  }
  if (l.topo.kind == TopologyLoss::Kind::Pairs && l.topo.pairs.empty())
    throw ConfigError("loss.topo = pairs needs loss.topo_pairs");
  l.topo.nonoverlap = c.flag("loss.nonoverlap");

  if (l.problem.kind == PdeKind::Laplace) {
    l.bc.kind = BoundaryCondition::Kind::Neumann;
    l.bc.q = c.real("pde.q");
  } else {
    l.bc.kind = BoundaryCondition::Kind::Dirichlet;
    l.bc.value.assign(static_cast<std::size_t>(l.problem.out_dim()), std::nullopt);
    l.bc.value[0] = 0.0;
    l.bc.value[1] = 0.0;  // displacement or velocity vanishes; pressure is free
  }

  x.adam = {c.real("adam.lr"), c.real("adam.lr_gamma"), c.real("adam.beta1"), c.real("adam.beta2"),
            c.real("adam.eps")};
  x.adam.validate();
  x.early_stop = c.flag("early_stop.enabled");
  x.early_stop_window = c.count("early_stop.window");
  if (x.early_stop_window < 2) throw ConfigError("early_stop.window must be >= 2");
  x.early_stop_tol = c.real("early_stop.tol");

  x.metric_grid = c.count("metrics.grid");
  if (x.metric_grid < 2) throw ConfigError("metrics.grid must be >= 2");
  x.flux_samples = c.count("metrics.flux_samples");
  if (x.flux_samples < 4) throw ConfigError("metrics.flux_samples must be >= 4");
  x.density_threshold = c.real("metrics.threshold");

  if ((x.scenario == Scenario::Annulus || x.scenario == Scenario::Laplace) && l.problem.kind != PdeKind::Laplace)
    throw ConfigError("scenario " + to_string(x.scenario) + " needs pde.kind = laplace");
  if (x.scenario == Scenario::Elastic && l.problem.kind != PdeKind::Elastic)
    throw ConfigError("scenario elastic needs pde.kind = elastic");
  if ((x.scenario == Scenario::Flow || x.scenario == Scenario::Rearrange) && l.problem.out_dim() != 3)
    throw ConfigError("scenario " + to_string(x.scenario) + " needs a flow pde kind");
  if ((x.scenario == Scenario::Annulus || x.scenario == Scenario::Laplace) && x.reference_centers.size() != 1)
    throw ConfigError("scenario " + to_string(x.scenario) + " needs exactly one reference centre");

  x.config_hash = c.hash();
  return x;
}

}  // namespace ltpinn
