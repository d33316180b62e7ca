#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "ltpinn/config.hpp"

using namespace ltpinn;

namespace {

std::filesystem::path write_ini(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "ltpinn_config_test";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, EveryPresetValidates) {
  const auto names = preset_names();
  EXPECT_EQ(names.size(), 12u);
  for (const auto& n : names) {
    const Config c(n);
    EXPECT_EQ(c.get("run.preset"), n);
    EXPECT_NO_THROW(ExperimentConfig::from(c)) << n;
  }
}

TEST(Config, PresetValues) {
  const auto ann = ExperimentConfig::from(Config("annulus-lt"));
  EXPECT_EQ(ann.scenario, Scenario::Annulus);
  EXPECT_EQ(ann.loss.mode, Mode::LT);
  EXPECT_EQ(ann.loss.bc.kind, BoundaryCondition::Kind::Neumann);
  EXPECT_EQ(ann.loss.bc.q, -0.5);
  EXPECT_EQ(ann.output_dir, std::filesystem::path("runs/annulus-lt"));

  const auto dt = ExperimentConfig::from(Config("annulus-dt"));
  EXPECT_EQ(dt.loss.mode, Mode::DT);
  EXPECT_TRUE(dt.network.has_density_channel);

  const auto ns = ExperimentConfig::from(Config("ns-3c"));
  EXPECT_EQ(ns.n_patches, 3u);
  EXPECT_EQ(ns.network.out_dim, 3);
  EXPECT_EQ(ns.loss.topo.pairs.size(), 3u);
  EXPECT_TRUE(ns.loss.topo.nonoverlap);

  const auto hub = ExperimentConfig::from(Config("ns-8c"));
  EXPECT_EQ(hub.loss.topo.kind, TopologyLoss::Kind::Hub);
  EXPECT_EQ(hub.loss.topo.hub_distance, 2.5);

  const auto el = ExperimentConfig::from(Config("elastic-lt"));
  EXPECT_EQ(el.loss.problem.kind, PdeKind::Elastic);
  EXPECT_EQ(el.network.n_layers, 5);
  EXPECT_EQ(el.network.width, 64);
}

TEST(Config, UnknownPresetListsKnownOnes) {
  const std::string m = message_of([] { Config("annulus"); });
  EXPECT_NE(m.find("annulus-lt"), std::string::npos);
  EXPECT_NE(m.find("rearrange-48"), std::string::npos);
}

TEST(Config, SetAndTypedAccess) {
  Config c;
  c.set("run.epochs", "12");
  c.set_assignment("geometry.init_centers = 0.5,-1  2,3");
  c.set_assignment("loss.nonoverlap=yes");
  EXPECT_EQ(c.integer("run.epochs"), 12);
  const auto p = c.points("geometry.init_centers");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0], (Vec2{0.5, -1.0}));
  EXPECT_EQ(p[1], (Vec2{2.0, 3.0}));
  EXPECT_TRUE(c.flag("loss.nonoverlap"));
  EXPECT_EQ(c.reals("geometry.ring_radii"), (std::vector<double>{0.5, 0.4, 0.3, 0.2}));
  EXPECT_THROW(c.set("run.epoch", "1"), ConfigError);
  EXPECT_THROW(c.get("nosuch.key"), ConfigError);
  EXPECT_THROW(c.set_assignment("run.epochs"), ConfigError);
  c.set("loss.nonoverlap", "perhaps");
  EXPECT_THROW(c.flag("loss.nonoverlap"), ConfigError);
  c.set("run.epochs", "ten");
  EXPECT_THROW(c.integer("run.epochs"), ConfigError);
  c.set("run.epochs", "-3");
  EXPECT_THROW(c.count("run.epochs"), ConfigError);
}

TEST(Config, SettingPresetResetsValues) {
  Config c("annulus-lt");
  c.set("adam.lr", "0.5");
  c.set("run.preset", "ns-2c");
  EXPECT_EQ(c.get("geometry.patches"), "2");
  EXPECT_NE(c.real("adam.lr"), 0.5);
}

TEST(Config, InvalidValuesRejected) {
  auto bad = [](const char* key, const char* value, const char* preset = "annulus-lt") {
    Config c(preset);
    c.set(key, value);
    return message_of([&] { ExperimentConfig::from(c); });
  };
  EXPECT_NE(bad("pde.nu", "0.5", "elastic-lt").find("pde.nu"), std::string::npos);
  EXPECT_NE(bad("run.threads", "0").find("run.threads"), std::string::npos);
  EXPECT_NE(bad("geometry.ring_radii", "0.5 0.7").find("ring_radii"), std::string::npos);
  EXPECT_NE(bad("sampling.roi", "1 0 0 1").find("roi"), std::string::npos);
  EXPECT_NE(bad("run.mode", "xt").find("xt"), std::string::npos);
  EXPECT_NE(bad("pde.kind", "elastic").find("laplace"), std::string::npos);
  EXPECT_NE(bad("geometry.beta", "0").find("beta"), std::string::npos);
  EXPECT_NE(bad("adam.lr", "-1").find("lr"), std::string::npos);
  EXPECT_NE(bad("loss.lambda_p", "-1").find("weights"), std::string::npos);
  EXPECT_NE(bad("geometry.init_centers", "0,0 1,1").find("init_centers"), std::string::npos);
  EXPECT_FALSE(bad("early_stop.window", "1").empty());

  Config pairs("ns-2c");
  pairs.set("loss.topo_pairs", "0-2");
  EXPECT_THROW(ExperimentConfig::from(pairs), ConfigError);
  Config poisson_dt("poisson-8c");
  poisson_dt.set("run.mode", "dt");
  EXPECT_THROW(ExperimentConfig::from(poisson_dt), ConfigError);
}

TEST(Config, TopologyPairTargets) {
  Config c("ns-2c");
  c.set("loss.topo_pairs", "0-1:3.25");
  const auto x = ExperimentConfig::from(c);
  ASSERT_EQ(x.loss.topo.pairs.size(), 1u);
  EXPECT_EQ(x.loss.topo.pairs[0].target, 3.25);
}

TEST(Config, IniFile) {
  const auto p = write_ini("ok.ini",
                           "# comment\n[run]\nepochs = 7\n; other comment\n[pde]\nnu = 0.3\n\n[adam]\nlr=0.01\n");
  const Config c = Config::from_file(p);
  EXPECT_EQ(c.integer("run.epochs"), 7);
  EXPECT_EQ(c.real("pde.nu"), 0.3);
  EXPECT_EQ(c.real("adam.lr"), 0.01);

  const auto preset = write_ini("preset.ini", "[run]\npreset = ns-2c\n[adam]\nlr = 0.02\n");
  const Config d = Config::from_file(preset);
  EXPECT_EQ(d.get("geometry.patches"), "2");
  EXPECT_EQ(d.real("adam.lr"), 0.02);
}

TEST(Config, IniErrorsCarryLocation) {
  const auto syntax = write_ini("syntax.ini", "[run]\nepochs = 7\nthis line is wrong\n");
  const std::string m = message_of([&] { Config::from_file(syntax); });
  EXPECT_NE(m.find("syntax.ini:3"), std::string::npos) << m;

  const auto unknown = write_ini("unknown.ini", "[run]\nepocs = 7\n");
  const std::string u = message_of([&] { Config::from_file(unknown); });
  EXPECT_NE(u.find("run.epocs"), std::string::npos) << u;

  const auto orphan = write_ini("orphan.ini", "epochs = 7\n");
  EXPECT_THROW(Config::from_file(orphan), ConfigError);
  EXPECT_THROW(Config::from_file("/nonexistent/dir/x.ini"), IoError);
}

TEST(Config, IniRoundTripAndHash) {
  Config c("elastic-dt");
  c.set("run.epochs", "123");
  c.set("sampling.data_csv", "some/file.csv");
  const auto p = write_ini("round.ini", c.to_ini());
  const Config r = Config::from_file(p);
  EXPECT_EQ(r.to_ini(), c.to_ini());
  EXPECT_EQ(r.hash(), c.hash());
  Config d = c;
  d.set("run.epochs", "124");
  EXPECT_NE(d.hash(), c.hash());
  EXPECT_EQ(c.hash().size(), 16u);
  EXPECT_EQ(ExperimentConfig::from(c).config_hash, c.hash());
  EXPECT_NE(c.to_ini().find("[geometry]"), std::string::npos);
}
