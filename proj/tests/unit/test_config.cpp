#include "iqa/config.hpp"
#include "iqa/error.hpp"
#include "iqa/pipeline.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

using namespace iqa;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir() {
  std::random_device rd;
  return fs::temp_directory_path() / ("iqa_cfg_" + std::to_string(rd()) + std::to_string(rd()));
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error_key(const RunConfig& cfg) {
  try {
    cfg.resolve();
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

} // namespace

TEST(RunConfig, CommandDefaults) {
  const RunConfig exact(Command::Exact);
  EXPECT_EQ(exact.get("model"), "sk-fig4");
  EXPECT_EQ(exact.get("n"), "4");
  EXPECT_EQ(exact.get("path.T"), "10");
  const RunConfig mf(Command::Meanfield);
  EXPECT_EQ(mf.get("s0"), "0.1");
  EXPECT_EQ(mf.get("tau0"), "0.1");
  EXPECT_EQ(mf.get("model"), "pspin");
  EXPECT_EQ(RunConfig(Command::Spectrum).get("model"), "sk-fig5");
}

TEST(RunConfig, CommandNames) {
  for (Command c : {Command::Meanfield, Command::Exact, Command::Spectrum,
                    Command::EnsembleFraction, Command::EnsembleCompare, Command::Saddle})
    EXPECT_EQ(command_from_string(to_string(c)), c);
  EXPECT_THROW(command_from_string("bogus"), ConfigError);
}

TEST(RunConfig, KeysAreUnique) {
  std::set<std::string_view> names;
  for (const auto& k : config_keys())
    EXPECT_TRUE(names.insert(k.name).second) << k.name;
}

TEST(RunConfig, EveryPresetResolves) {
  for (const auto& p : presets()) {
    RunConfig cfg(p.command);
    cfg.apply_preset(p.name);
    EXPECT_NO_THROW(cfg.resolve()) << p.name;
  }
}

TEST(RunConfig, PresetValues) {
  RunConfig cfg(Command::Exact);
  cfg.apply_preset("fig4");
  const auto r = cfg.resolve();
  EXPECT_EQ(r.model_kind, "sk-fig4");
  EXPECT_EQ(r.n_spins, 4);
  EXPECT_EQ(r.path.total_time, 10.0);
  EXPECT_EQ(r.path.dt, 0.1);
  EXPECT_EQ(r.path.s0, 0.0);
  EXPECT_EQ(r.profile.kind, ProfileKind::Ramp);

  RunConfig fig5(Command::Spectrum);
  fig5.apply_preset("fig5");
  EXPECT_EQ(fig5.resolve().spectrum.k_levels, 10);

  RunConfig fig6(Command::EnsembleFraction);
  fig6.apply_preset("fig6");
  const auto e = fig6.resolve().ensemble;
  EXPECT_EQ(e.n_values, (std::vector<int>{4, 6, 8, 10}));
  EXPECT_EQ(e.realizations, 200);
}

TEST(RunConfig, PresetForOtherCommandIsRejected) {
  RunConfig cfg(Command::Exact);
  try {
    cfg.apply_preset("fig1");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "preset");
  }
  EXPECT_THROW(cfg.apply_preset("fig99"), ConfigError);
}

TEST(RunConfig, BadValuesNameTheirKey) {
  RunConfig cfg(Command::Exact);
  try {
    cfg.set("dt", "-1");
    EXPECT_EQ(config_error_key(cfg), "dt");
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "dt");
  }
  RunConfig text(Command::Exact);
  try {
    text.set("T", "ten");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "T");
  }
  EXPECT_THROW(text.set("no_such_key", "1"), ConfigError);
  EXPECT_THROW(text.set("model.T", "1"), ConfigError);
}

TEST(RunConfig, CrossKeyChecks) {
  RunConfig big_dt(Command::Exact);
  big_dt.set("dt", "20");
  EXPECT_EQ(config_error_key(big_dt), "dt");

  RunConfig fig4_n(Command::Exact);
  fig4_n.set("n", "5");
  EXPECT_EQ(config_error_key(fig4_n), "n");

  RunConfig mf(Command::Meanfield);
  mf.set("model", "sk-random");
  EXPECT_EQ(config_error_key(mf), "model");

  RunConfig quench(Command::Spectrum);
  quench.set("profile", "quench");
  EXPECT_EQ(config_error_key(quench), "profile");

  RunConfig cmp(Command::EnsembleCompare);
  cmp.set("n_values", "4,6");
  EXPECT_EQ(config_error_key(cmp), "n_values");
}

TEST(RunConfig, LayersApplyInOrder) {
  RunConfig cfg(Command::Exact);
  cfg.apply_preset("fig4");
  cfg.load_string("[path]\nT = 5\ndt = 0.05\n");
  EXPECT_EQ(cfg.get("T"), "5");
  cfg.set("T", "7");
  EXPECT_EQ(cfg.resolve().path.total_time, 7.0);
  EXPECT_EQ(cfg.resolve().path.dt, 0.05);
  EXPECT_THROW(cfg.load_string("[path]\nbogus = 1\n"), ConfigError);
}

TEST(RunConfig, IniRoundTrip) {
  RunConfig a(Command::Spectrum);
  a.set("seed", "12345");
  a.set("k_levels", "7");
  const std::string ini = a.to_ini();
  RunConfig b(Command::Spectrum);
  b.load_string(ini);
  EXPECT_EQ(b.to_ini(), ini);
  EXPECT_EQ(resolved_hash(a.resolve()), resolved_hash(b.resolve()));
}

TEST(RunConfig, HashIgnoresThreadsAndOutput) {
  RunConfig a(Command::Exact);
  RunConfig b(Command::Exact);
  b.set("threads", "3");
  b.set("output_dir", "/tmp/elsewhere");
  EXPECT_EQ(resolved_hash(a.resolve()), resolved_hash(b.resolve()));
  b.set("T", "11");
  EXPECT_NE(resolved_hash(a.resolve()), resolved_hash(b.resolve()));
}

TEST(RunConfig, ValuesToJsonUsesNumbers) {
  const auto j = nlohmann::json::parse(values_to_json(RunConfig(Command::Saddle).resolve().values));
  EXPECT_TRUE(j["path"]["T"].is_number());
  EXPECT_EQ(j["model"]["model"], "pspin");
  EXPECT_EQ(j["saddle"]["beta"], "inf");
}

TEST(Pipeline, SaddleRunWritesSummary) {
  const fs::path dir = fresh_dir();
  RunConfig cfg(Command::Saddle);
  cfg.set("output_dir", dir.string());
  const auto res = run_pipeline(cfg);
  ASSERT_EQ(res.exit_code, 0) << res.message;
  EXPECT_EQ(res.output_dir, dir);
  const auto summary = nlohmann::json::parse(read_all(dir / "summary.json"));
  EXPECT_EQ(summary["m"].get<double>(), 1.0);
  const auto run = nlohmann::json::parse(read_all(dir / "run.json"));
  EXPECT_EQ(run["command"], "saddle");
  EXPECT_EQ(run["config_hash"].get<std::string>().size(), 16u);
  fs::remove_all(dir);
}

TEST(Pipeline, ExactRunWritesTrajectory) {
  const fs::path dir = fresh_dir();
  RunConfig cfg(Command::Exact);
  cfg.set("T", "1");
  cfg.set("output_dir", dir.string());
  const auto res = run_pipeline(cfg);
  ASSERT_EQ(res.exit_code, 0) << res.message;
  std::ifstream csv(dir / "trajectory.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "t,m_1,m_2,m_3,m_4,energy,energy_fraction");
  int rows = 0;
  for (std::string line; std::getline(csv, line);)
    ++rows;
  EXPECT_EQ(rows, 11);
  const auto log = nlohmann::json::parse(read_all(dir / "freeze_log.json"));
  EXPECT_TRUE(log.contains("spins"));
  fs::remove_all(dir);
}

TEST(Pipeline, ConfigFailureWritesErrorFile) {
  const fs::path dir = fresh_dir();
  RunConfig cfg(Command::Exact);
  cfg.set("n", "5");
  cfg.set("output_dir", dir.string());
  const auto res = run_pipeline(cfg);
  EXPECT_EQ(res.exit_code, 2);
  EXPECT_EQ(res.error_key, "n");
  const auto err = nlohmann::json::parse(read_all(dir / "error.json"));
  EXPECT_EQ(err["key"], "n");
  EXPECT_EQ(err["exit_code"], 2);
  fs::remove_all(dir);
}

TEST(Pipeline, ExitCodes) {
  EXPECT_EQ(exit_code_for(ConfigError("x", "bad")), 2);
  EXPECT_EQ(exit_code_for(DomainError("bad")), 2);
  EXPECT_EQ(exit_code_for(NumericError("bad")), 3);
  EXPECT_EQ(exit_code_for(IoError("bad")), 3);
}
