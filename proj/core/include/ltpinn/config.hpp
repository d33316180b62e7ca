#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ltpinn/losses.hpp"
#include "ltpinn/network.hpp"
#include "ltpinn/training.hpp"
#include "ltpinn/types.hpp"

namespace ltpinn {

/// Flat "section.key = value" settings with a fixed key set. Every key has
/// a default; presets and files override them in order.
class Config {
 public:
  /// Defaults, then the named preset.
  explicit Config(std::string_view preset = "annulus-lt");

  /// Reads an INI file on top of `preset`. A [run] preset key in the file
  /// replaces `preset`; every other key is applied after it.
  static Config from_file(const std::filesystem::path& path, std::string_view preset = "annulus-lt");

  void apply_preset(std::string_view name);
  /// "section.key". Unknown keys raise ConfigError.
  void set(std::string_view key, std::string_view value);
  /// "section.key=value".
  void set_assignment(std::string_view assignment);

  const std::string& get(std::string_view key) const;
  double real(std::string_view key) const;
  long long integer(std::string_view key) const;
  std::size_t count(std::string_view key) const;
  bool flag(std::string_view key) const;
  std::vector<double> reals(std::string_view key) const;
  /// Points written as "x,y x,y ...".
  std::vector<Vec2> points(std::string_view key) const;

  /// Every key, grouped by section, with its current value.
  std::string to_ini() const;
  /// FNV-1a of to_ini().
  std::string hash() const;

 private:
  struct Entry {
    std::string key;
    std::string value;
    std::string help;
  };
  Entry& find(std::string_view key);
  const Entry& find(std::string_view key) const;

  std::vector<Entry> entries_;
};

std::vector<std::string> preset_names();

enum class Scenario { Annulus, Laplace, Elastic, Flow, Rearrange };

std::string to_string(Scenario s);
Scenario scenario_from_string(std::string_view name);

/// Typed, validated view of a Config.
struct ExperimentConfig {
  std::string preset;
  Scenario scenario = Scenario::Annulus;
  std::int64_t epochs = 0;
  std::int64_t log_interval = 500;
  std::uint64_t seed = 1;
  int threads = 1;
  std::size_t chunk = 256;
  std::filesystem::path output_dir;

  LossSpec loss;
  MlpConfig network;

  std::size_t n_patches = 1;
  std::vector<double> ring_radii;
  std::size_t ring_points = 128;
  bool random_init = false;
  std::vector<Vec2> init_centers;
  std::vector<Vec2> reference_centers;

  std::optional<Roi> roi;
  std::size_t grid_nx = 120;
  std::size_t grid_ny = 120;
  std::size_t n_data = 0;
  std::filesystem::path data_csv;
  double annulus_outer = 2.0;
  double data_min_radius = 0.75;
  std::size_t edge_points = 64;
  double outlet_period = 0.0;  ///< 0: ROI height

  AdamConfig adam;
  bool early_stop = false;
  std::size_t early_stop_window = 10;
  double early_stop_tol = 1e-4;

  std::size_t metric_grid = 128;
  std::size_t flux_samples = 256;
  double density_threshold = 0.5;

  std::string config_hash;

  static ExperimentConfig from(const Config& c);
};

}  // namespace ltpinn
