#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ltpinn/config.hpp"
#include "ltpinn/experiment.hpp"
#include "ltpinn/io.hpp"

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kNumeric = 3, kIo = 4 };

struct Common {
  std::string preset;
  std::string config_file;
  std::vector<std::string> sets;
  int threads = 0;

  ltpinn::Config load() const {
    const std::string base = preset.empty() ? "annulus-lt" : preset;
    ltpinn::Config c = config_file.empty() ? ltpinn::Config(base) : ltpinn::Config::from_file(config_file, base);
    for (const auto& s : sets) c.set_assignment(s);
    if (threads > 0) c.set("run.threads", std::to_string(threads));
    return c;
  }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os = ltpinn::open_output(path);
  os << text;
  if (!os) throw ltpinn::IoError("failed writing '" + path + "'");
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const auto& t : ltpinn::split(text, ','))
    if (!ltpinn::trim(t).empty()) out.push_back(ltpinn::parse_real(t, what));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topology inference with physics-informed networks over circle patches"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--preset", common.preset, "preset applied before the config file");
  app.add_option("-c,--config", common.config_file, "INI config file")->check(CLI::ExistingFile);
  app.add_option("-s,--set", common.sets, "override one key: section.key=value (repeatable)");
  app.add_option("-j,--threads", common.threads, "worker threads for loss evaluation")->check(CLI::PositiveNumber);

  auto* train = app.add_subcommand("train", "train and write loss.csv, gamma.csv, field.csv, topology.json, "
                                             "metrics.json and checkpoint.bin");
  std::string out_dir;
  bool quiet = false;
  train->add_option("-o,--out", out_dir, "output directory (overrides run.output_dir)");
  train->add_flag("-q,--quiet", quiet, "no progress output");

  auto* eval = app.add_subcommand("eval", "evaluate metrics for a checkpoint");
  std::string checkpoint;
  std::string metrics_arg;
  std::string reference_csv;
  std::string eval_out;
  eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval->add_option("--metrics", metrics_arg, "comma-separated metric names (default: scenario metrics)");
  eval->add_option("--reference", reference_csv, "sample CSV whose measurements are the reference field");
  eval->add_option("-o,--out", eval_out, "metrics.json path (default: stdout)");

  auto* topo = app.add_subcommand("export-topology", "write the inferred topology as JSON (+ SVG)");
  std::string topo_checkpoint;
  std::optional<double> threshold;
  std::string sweep_arg;
  std::string svg_out;
  std::string topo_out;
  topo->add_option("--checkpoint", topo_checkpoint, "checkpoint file")->required();
  topo->add_option("--threshold", threshold, "density threshold (dt mode, default metrics.threshold)");
  topo->add_option("--sweep", sweep_arg, "comma-separated thresholds; reports one topology each (dt mode)");
  topo->add_option("--svg", svg_out, "also write an SVG drawing");
  topo->add_option("-o,--out", topo_out, "topology.json path (default: stdout)");

  auto* print = app.add_subcommand("print-config", "print every config key with its resolved value");
  bool list_presets = false;
  print->add_flag("--presets", list_presets, "list preset names instead");

  auto* oracle = app.add_subcommand("export-oracle", "write the closed-form reference field as a sample CSV");
  std::string oracle_out;
  oracle->add_option("-o,--out", oracle_out, "output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (print->parsed() && list_presets) {
      for (const auto& n : ltpinn::preset_names()) std::cout << n << '\n';
      return kOk;
    }
    ltpinn::Config config = common.load();

    if (print->parsed()) {
      ltpinn::ExperimentConfig::from(config);
      std::cout << config.to_ini();
      return kOk;
    }
    if (train->parsed()) {
      if (!out_dir.empty()) config.set("run.output_dir", out_dir);
      const auto r = ltpinn::run_train(config, quiet ? nullptr : &std::cerr);
      if (!quiet) {
        for (const auto& m : r.metrics)
          std::cerr << m.metric << ' ' << m.field << ' ' << ltpinn::format_real(m.value) << '\n';
      }
      return kOk;
    }

    const auto x = ltpinn::ExperimentConfig::from(config);
    const auto exp = ltpinn::build_experiment(x);

    if (eval->parsed()) {
      const auto state = ltpinn::checkpoint_load(checkpoint, x.network);
      if (state.mode != x.loss.mode) throw ltpinn::ShapeMismatchError("checkpoint mode does not match run.mode");
      std::vector<std::string> names;
      for (const auto& n : ltpinn::split(metrics_arg, ','))
        if (!ltpinn::trim(n).empty()) names.push_back(ltpinn::trim(n));
      if (names.empty()) names = ltpinn::default_metrics(exp);
      std::optional<ltpinn::SampleSet> ref;
      if (!reference_csv.empty()) ref = ltpinn::read_sample_csv(reference_csv);
      const auto records = ltpinn::compute_metrics(exp, state, names, ref ? &*ref : nullptr);
      write_text(eval_out, ltpinn::metrics_json(records, x.config_hash));
      return kOk;
    }
    if (topo->parsed()) {
      const auto state = ltpinn::checkpoint_load(topo_checkpoint, x.network);
      const auto t = ltpinn::export_topology(exp, state, threshold.value_or(x.density_threshold),
                                             parse_list(sweep_arg, "--sweep"));
      write_text(topo_out, t.json);
      if (!svg_out.empty()) write_text(svg_out, t.svg);
      if (t.empty) std::cerr << "warning: density below threshold everywhere, topology is empty\n";
      return kOk;
    }
    if (oracle->parsed()) {
      ltpinn::export_oracle_csv(oracle_out, exp);
      return kOk;
    }
  } catch (const ltpinn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const ltpinn::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const ltpinn::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
