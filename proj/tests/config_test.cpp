#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "memfun/config.hpp"

namespace memfun {
namespace {

const TimeDomain unit(1.0, 129);

TEST(ParseKernel, KnownTypes) {
  EXPECT_EQ(parse_kernel({{"type", "exponential"}, {"alpha", 2.0}}, unit).exponential_form()->rate, 2.0);
  EXPECT_TRUE(parse_kernel({{"type", "power_law"}, {"gamma", 0.5}, {"epsilon", 0.25}}, unit).constants().integral);
  EXPECT_EQ(parse_kernel({{"type", "finite_memory"}, {"delta", 0.5}}, unit).breakpoints().size(), 1u);
}

TEST(ParseKernel, Errors) {
  EXPECT_THROW(parse_kernel({{"type", "gaussian"}}, unit), ConfigError);
  EXPECT_THROW(parse_kernel({{"type", "exponential"}}, unit), ConfigError);
  EXPECT_THROW(parse_kernel({{"type", "exponential"}, {"alpha", "x"}}, unit), ConfigError);
  EXPECT_THROW(parse_kernel({{"type", "exponential"}, {"alpha", -1.0}}, unit), ConfigError);
  EXPECT_THROW(parse_kernel({{"type", "sampled"}, {"file", "/nonexistent.csv"}}, unit), ConfigError);
}

TEST(ParseKernel, SampledFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "memfun_config_test_kernel.csv";
  {
    std::ofstream out(path);
    out << "t,value\n0,1\n1,1\n";
  }
  const auto k = parse_kernel({{"type", "sampled"}, {"file", path.string()}}, unit);
  EXPECT_EQ(k(0.3), 1.0);
  EXPECT_TRUE(classify(k).class_regular);
  std::filesystem::remove(path);
}

TEST(ParseSensitivity, Kinds) {
  const auto constant = parse_sensitivity({{"kind", "instantaneous"}, {"lambda_min", 1.0}, {"lambda_max", 1.0}}, unit);
  EXPECT_EQ(constant.evaluate(0.5, 3.0), 1.0);
  const auto tanh = parse_sensitivity(
      {{"kind", "instantaneous"}, {"lambda_min", 0.5}, {"lambda_max", 1.5}, {"gamma0", 1.0}, {"reference", {{"constant", 0.0}}}},
      unit);
  EXPECT_EQ(tanh.evaluate(0.5, 0.0), 0.5);
  const auto hist = parse_sensitivity(
      {{"kind", "historical"}, {"lambda_min", 0.5}, {"lambda_max", 1.5}, {"gamma0", 2.0}, {"alpha0", 1.0}, {"beta0", 1.0}},
      unit);
  EXPECT_TRUE(hist.operator_mode());
}

TEST(ParseSensitivity, Errors) {
  EXPECT_THROW(parse_sensitivity({{"kind", "magic"}, {"lambda_min", 1.0}, {"lambda_max", 2.0}}, unit), ConfigError);
  EXPECT_THROW(parse_sensitivity({{"kind", "instantaneous"}, {"lambda_min", 1.0}}, unit), ConfigError);
  EXPECT_THROW(parse_sensitivity({{"kind", "instantaneous"}, {"lambda_min", 0.0}, {"lambda_max", 0.0}}, unit), ConfigError);
  EXPECT_THROW(
      parse_sensitivity({{"kind", "historical"}, {"lambda_min", 1.0}, {"lambda_max", 2.0}, {"gamma0", 1.0}, {"alpha0", 0.0}},
                        unit),
      ConfigError);
}

TEST(ParseTrajectory, Sources) {
  EXPECT_EQ(parse_trajectory({{"constant", 2.5}}, unit)(0.7), 2.5);
  const auto ind = parse_trajectory({{"indicator", 0.5}}, unit);
  EXPECT_EQ(ind.left_value(0.5), 1.0);
  EXPECT_EQ(ind.right_value(0.5), 0.0);
  const auto a = parse_trajectory({{"kind", "fourier"}, {"seed", 3}}, unit);
  const auto b = parse_trajectory({{"kind", "fourier"}, {"seed", 3}}, unit);
  EXPECT_EQ(a(0.37), b(0.37));
  EXPECT_THROW(parse_trajectory({{"shape", "circle"}}, unit), ConfigError);
  EXPECT_THROW(parse_trajectory({{"indicator", 2.0}}, unit), ConfigError);
}

TEST(ParseTrajectory, FileHorizonMustMatch) {
  const auto path = std::filesystem::temp_directory_path() / "memfun_config_test_traj.csv";
  {
    std::ofstream out(path);
    out << "0,1\n2,1\n";
  }
  EXPECT_THROW(parse_trajectory({{"file", path.string()}}, unit), ConfigError);
  EXPECT_EQ(parse_trajectory({{"file", path.string()}}, TimeDomain(2.0, 129))(1.0), 1.0);
  std::filesystem::remove(path);
}

TEST(RunConfigTest, GridValidation) {
  EXPECT_EQ(parse_run_config(json::object()).grid.grid_points, TimeDomain::default_grid_points);
  EXPECT_THROW(parse_run_config({{"grid", 4}}), ConfigError);
  EXPECT_THROW(parse_run_config({{"grid", 1}}), ConfigError);
  EXPECT_THROW(parse_run_config({{"horizon", 0.0}}), ConfigError);
  EXPECT_THROW(parse_run_config({{"tolerance", -1.0}}), ConfigError);
  EXPECT_EQ(parse_run_config({{"grid", 4}}, {}, 65).grid.grid_points, 65u);
  EXPECT_EQ(parse_run_config(json::object(), {}, {}, 1e-6).grid.tolerance, 1e-6);
}

TEST(RunConfigTest, MissingFilesFailAtParseTime) {
  EXPECT_THROW(parse_run_config({{"trajectory", {{"file", "no/such/file.csv"}}}}), ConfigError);
}

TEST(RunConfigTest, RelativePathsResolveAgainstBase) {
  const auto dir = std::filesystem::temp_directory_path() / "memfun_config_test_dir";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "f.csv");
    out << "t,value\n0,0\n1,0\n";
  }
  const auto cfg = parse_run_config({{"grid", 65}, {"trajectory", {{"file", "f.csv"}}}}, dir);
  EXPECT_EQ(sup_norm(cfg.make_trajectory()), 0.0);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace memfun
