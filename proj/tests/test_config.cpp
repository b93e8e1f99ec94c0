#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include "ranslice/config.hpp"

using namespace ranslice;

namespace {

std::filesystem::path write_ini(const std::string& name, const std::string& body) {
  const auto dir = std::filesystem::temp_directory_path() / "ranslice_test_config";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << body;
  return path;
}

bool has_line(const std::vector<std::string>& lines, const std::string& line) {
  return std::find(lines.begin(), lines.end(), line) != lines.end();
}

}  // namespace

TEST(Units, Conversions) {
  EXPECT_NEAR(dbm_to_watt(43.0), 19.952623149688797, 1e-12);
  EXPECT_NEAR(dbm_to_watt(30.0), 1.0, 1e-15);
  EXPECT_NEAR(dbm_to_watt(-174.0), 3.981071705534972e-21, 1e-33);
  EXPECT_EQ(db_to_linear(0.0), 1.0);
  EXPECT_NEAR(db_to_linear(5.0), std::sqrt(10.0), 1e-14);
}

TEST(Units, PathLossConstantAt2100MHz) {
  const double k = 4.0 * std::numbers::pi * 2.1e9 / 3e8;
  EXPECT_NEAR(path_loss_constant(2.1e9), k * k, 1e-9);
  EXPECT_NEAR(path_loss_constant(2.1e9), 7737.77, 0.01);
}

TEST(Units, BsDensityFromSiteDistance) {
  EXPECT_NEAR(bs_density(200.0), 1.0 / (std::numbers::pi * 40000.0), 1e-20);
}

TEST(NetworkSpec, DefaultsMapToLinearParams) {
  const NetworkParams p = NetworkSpec{}.to_params();
  EXPECT_NEAR(p.p_tot, 19.952623149688797, 1e-12);
  EXPECT_EQ(p.b_tot, 20e6);
  EXPECT_EQ(p.gamma_i, 1.0);
  EXPECT_EQ(p.gamma_a, 1.0);
  EXPECT_EQ(p.beta, 3.5);
  EXPECT_NO_THROW(p.validate());
}

TEST(NetworkSpec, RejectsBadValues) {
  NetworkSpec s;
  s.beta = 2.0;
  EXPECT_THROW(s.to_params(), ConfigError);
  s = {};
  s.isd_m = 0.0;
  EXPECT_THROW(s.to_params(), ConfigError);
}

TEST(SliceGenConfig, VarianceInterpretation) {
  SliceGenConfig g;
  EXPECT_NEAR(g.sigma_pct(), std::sqrt(5.0), 1e-15);
  g.variance_is_sigma = true;
  EXPECT_EQ(g.sigma_pct(), 5.0);
  g.upper_pct = g.lower_pct;
  EXPECT_THROW(g.validate(), ConfigError);
}

TEST(ExperimentConfig, DefaultsPassChecks) {
  ExperimentConfig c;
  EXPECT_NO_THROW(c.check());
  EXPECT_EQ(c.sim_for_mode().n_realizations, c.validate.quick_realizations);
  c.full = true;
  EXPECT_EQ(c.sim_for_mode().n_realizations, c.validate.full_realizations);
}

TEST(LoadConfig, ParsesOverrides) {
  const auto path = write_ini("ok.ini",
                              "[network]\nbeta = 4.0\ngamma_i_db = 5\n"
                              "[sim]\nedge_mode = guard\nguard_margin = 300\nseed = 99\n"
                              "[admission]\norder = arrival\n"
                              "[validate]\nratios = 1, 10, 100\n"
                              "[slice_gen]\nvariance_is_sigma = true\n");
  const ExperimentConfig c = load_config(path.string());
  EXPECT_EQ(c.network.beta, 4.0);
  EXPECT_NEAR(c.params().gamma_i, std::sqrt(10.0), 1e-14);
  EXPECT_EQ(c.sim.edge_mode, EdgeMode::guard);
  EXPECT_EQ(c.sim.guard_margin, 300.0);
  EXPECT_EQ(c.sim.seed, 99u);
  EXPECT_EQ(c.admission.order, FillOrder::arrival);
  EXPECT_EQ(c.validate.ratios, (std::vector<double>{1, 10, 100}));
  EXPECT_TRUE(c.slice_gen.variance_is_sigma);
  EXPECT_EQ(c.source, path.string());
  // Untouched keys keep their defaults.
  EXPECT_EQ(c.network.isd_m, 200.0);
}

TEST(LoadConfig, UnknownKeyIsAConfigError) {
  const auto path = write_ini("unknown.ini", "[network]\nbogus = 1\n");
  EXPECT_THROW(load_config(path.string()), ConfigError);
}

TEST(LoadConfig, BadValueIsAConfigError) {
  EXPECT_THROW(load_config(write_ini("num.ini", "[network]\nbeta = fast\n").string()), ConfigError);
  EXPECT_THROW(load_config(write_ini("enum.ini", "[sim]\nedge_mode = sphere\n").string()), ConfigError);
  EXPECT_THROW(load_config(write_ini("range.ini", "[network]\nbeta = 1.5\n").string()), ConfigError);
}

TEST(LoadConfig, MissingFileIsAnIoError) {
  EXPECT_THROW(load_config("/nonexistent/ranslice.ini"), IoError);
}

TEST(Describe, ListsResolvedAndDerivedValues) {
  ExperimentConfig c;
  const auto lines = describe(c);
  EXPECT_TRUE(has_line(lines, "network.beta = 3.5"));
  EXPECT_TRUE(has_line(lines, "sim.edge_mode = torus"));
  EXPECT_TRUE(has_line(lines, "admission.order = ascending_alpha"));
  EXPECT_TRUE(has_line(lines, "config.mode = quick"));
  const bool has_kappa = std::any_of(lines.begin(), lines.end(),
                                     [](const std::string& l) { return l.rfind("derived.kappa = ", 0) == 0; });
  EXPECT_TRUE(has_kappa);
  EXPECT_EQ(describe(c), lines);
}

TEST(LoadConfig, ShippedDefaultFileMatchesBuiltInDefaults) {
  ExperimentConfig c = load_config(RANSLICE_DEFAULT_INI);
  c.source = ExperimentConfig{}.source;
  EXPECT_EQ(describe(c), describe(ExperimentConfig{}));
}
