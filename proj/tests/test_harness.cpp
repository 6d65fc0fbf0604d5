#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "aldnls/harness/config.hpp"
#include "aldnls/harness/runs.hpp"
#include "aldnls/harness/selftest.hpp"

using namespace aldnls;
using namespace aldnls::harness;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("aldnls_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ALDNLS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig q04i_config(std::vector<ComparePoint> pts) {
  RunConfig cfg;
  cfg.initial_data = SingleSite{{0.0, 0.4}, 0};
  cfg.compare_points = std::move(pts);
  return cfg;
}

}  // namespace

TEST(Config, Minimal) {
  const RunConfig cfg = parse_config(R"({
    "initial_data": {"kind": "single_site", "q": [0, 0.4]},
    "compare_points": [[0, 10], [5, 20]]
  })");
  const auto& ss = std::get<SingleSite>(cfg.initial_data);
  EXPECT_EQ(ss.q, cplx(0.0, 0.4));
  EXPECT_EQ(cfg.integrator.dt, 1e-2);
  ASSERT_EQ(cfg.compare_points.size(), 2u);
  EXPECT_EQ(cfg.compare_points[1].n, 5);
  EXPECT_EQ(cfg.compare_points[1].t, 20.0);
}

TEST(Config, AllInitialKinds) {
  const RunConfig inl = parse_config(R"({"initial_data": {"kind": "inline", "offset": -1,
      "values": [0.1, [0, 0.2], [0.3, -0.1]]}})");
  const LatticeState s = make_initial_state(inl.initial_data);
  EXPECT_EQ(s.first(), -1);
  EXPECT_EQ(s.at(0), cplx(0.0, 0.2));

  const RunConfig g = parse_config(R"({"initial_data": {"kind": "gaussian",
      "amplitude": 0.3, "width": 2.0, "center": 4}})");
  const LatticeState gs = make_initial_state(g.initial_data);
  EXPECT_EQ(gs.at(4), cplx(0.3));
  EXPECT_NEAR(gs.at(6).real(), 0.3 * std::exp(-0.5), 1e-16);

  const RunConfig r = parse_config(R"({"initial_data": {"kind": "random", "seed": 7,
      "amplitude": 0.5, "support": 6}})");
  const LatticeState a = make_initial_state(r.initial_data);
  const LatticeState b = make_initial_state(r.initial_data);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.values.size(), 6u);
  EXPECT_LE(sup_norm(a), 0.5);
}

TEST(Config, Errors) {
  const auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const std::string big = message(R"({"initial_data": {"kind": "single_site", "q": 1.2}})");
  EXPECT_NE(big.find("smallness"), std::string::npos);

  const std::string region = message(R"({"initial_data": {"kind": "single_site", "q": 0.2},
      "compare_points": [[300, 100]]})");
  EXPECT_NE(region.find("compare_points[0]"), std::string::npos);
  EXPECT_NE(region.find("region"), std::string::npos);

  const std::string unknown = message(R"({"initial_data": {"kind": "single_site", "q": 0.2},
      "integrator": {"dt": 0.01, "step": 3}})");
  EXPECT_NE(unknown.find("integrator.step"), std::string::npos);

  const std::string several = message(R"({"initial_data": {"kind": "blob"},
      "integrator": {"dt": 0.5}, "V0": 3})");
  EXPECT_NE(several.find("initial_data.kind"), std::string::npos);
  EXPECT_NE(several.find("dt"), std::string::npos);
  EXPECT_NE(several.find("V0"), std::string::npos);

  EXPECT_NE(message("{not json").find("parse error"), std::string::npos);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, EnvironmentOverridesOutputDir) {
  ::setenv(output_dir_env, "/tmp/elsewhere", 1);
  const RunConfig cfg = parse_config(R"({"initial_data": {"kind": "single_site", "q": 0.2},
      "output_dir": "here"})");
  ::unsetenv(output_dir_env);
  EXPECT_EQ(cfg.output_dir, "/tmp/elsewhere");
}

TEST(Config, SampleConfigsLoad) {
  for (const auto& entry : fs::directory_iterator(ALDNLS_CONFIG_DIR)) {
    if (entry.path().filename() == "schema.json") continue;
    EXPECT_NO_THROW(load_config(entry.path().string())) << entry.path();
  }
}

TEST(Compare, ZeroDataIsExact) {
  RunConfig cfg;
  cfg.initial_data = InlineData{-2, std::vector<cplx>(5)};
  cfg.compare_points = {{0, 10.0}, {5, 20.0}};
  const CompareResult res = run_compare(cfg);
  ASSERT_TRUE(res.summary.complete);
  ASSERT_EQ(res.rows.size(), 2u);
  for (const auto& row : res.rows) {
    EXPECT_EQ(row.R_sim, cplx{});
    EXPECT_EQ(row.R_asym, cplx{});
    EXPECT_EQ(row.abs_err, 0.0);
  }
}

TEST(Compare, ErrorDecreasesForSingleSite) {
  const CompareResult res = run_compare(q04i_config({{0, 50.0}, {0, 100.0}, {0, 200.0}}));
  ASSERT_TRUE(res.summary.complete);
  ASSERT_EQ(res.rows.size(), 3u);
  EXPECT_LT(res.rows[1].abs_err, res.rows[0].abs_err);
  EXPECT_LT(res.rows[2].abs_err, res.rows[1].abs_err);
  EXPECT_LT(res.summary.decay_ratio.at(0), 1.0);
}

TEST(Compare, PartialFailureIsRecorded) {
  // (300, 100) bypasses the parser's region check; the other points still run.
  const CompareResult res = run_compare(q04i_config({{0, 20.0}, {300, 100.0}, {10, 100.0}}));
  EXPECT_FALSE(res.summary.complete);
  ASSERT_EQ(res.summary.failures.size(), 1u);
  EXPECT_NE(res.summary.failures[0].find("(300, 100)"), std::string::npos);
  EXPECT_EQ(res.rows.size(), 2u);
  EXPECT_EQ(summary_json(res.summary)["status"], "failed");
}

TEST(Compare, CsvRoundTripsAndIsDeterministic) {
  const RunConfig cfg = q04i_config({{0, 15.0}, {-4, 20.0}, {6, 20.0}});
  const CompareResult a = run_compare(cfg);
  const CompareResult b = run_compare(cfg);
  std::ostringstream sa;
  std::ostringstream sb;
  write_compare_csv(sa, a.rows);
  write_compare_csv(sb, b.rows);
  EXPECT_EQ(sa.str(), sb.str());

  std::istringstream in(sa.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, compare_csv_header);
  int rows = 0;
  while (std::getline(in, line)) {
    double f[9];
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &f[0], &f[1],
                          &f[2], &f[3], &f[4], &f[5], &f[6], &f[7], &f[8]),
              9);
    const cplx sim{f[3], f[4]};
    const cplx asym{f[5], f[6]};
    EXPECT_EQ(f[2], f[0] / f[1]);
    EXPECT_EQ(std::abs(sim - asym), f[7]);
    EXPECT_EQ(f[7] / std::abs(asym), f[8]);
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

TEST(Scatter, UnitarityOnGrid) {
  RunConfig cfg;
  cfg.initial_data = RandomData{3, 0.5, 5};
  cfg.circle_grid = 64;
  const ScatterResult res = run_scatter(cfg);
  ASSERT_EQ(res.samples.size(), 64u);
  EXPECT_LE(res.max_unitarity_residual, 1e-10);
  EXPECT_EQ(res.samples[16].theta, 2.0 * pi * 16 / 64);
}

TEST(Asymptote, TermsReconstructPrediction) {
  const auto preds = run_asymptote(q04i_config({{0, 100.0}, {30, 100.0}}));
  ASSERT_EQ(preds.size(), 2u);
  for (const auto& p : preds) {
    const cplx sum = p.terms[0].evaluate(p.t) + p.terms[1].evaluate(p.t);
    EXPECT_LE(std::abs(sum - p.R_asym), 1e-12);
  }
}

TEST(Selftest, AllItemsPass) {
  const SelftestReport rep = run_selftest();
  for (const auto& it : rep.items) EXPECT_TRUE(it.ok) << it.name << ": " << it.detail;
  EXPECT_TRUE(rep.all_passed());
}

TEST(Selftest, DetectsCorruptedGamma) {
  SelftestOptions opt;
  opt.gamma_perturbation = 1e-6;
  const SelftestReport rep = run_selftest(opt);
  EXPECT_FALSE(rep.all_passed());
  for (const auto& it : rep.items) {
    if (it.name.find("|M_j|") != std::string::npos) {
      EXPECT_FALSE(it.ok);
    }
  }
}

TEST(Selftest, DetectsOversizedStep) {
  SelftestOptions opt;
  opt.richardson_dt = 0.2;
  const SelftestReport rep = run_selftest(opt);
  for (const auto& it : rep.items) {
    if (it.name.find("step-halving") != std::string::npos) {
      EXPECT_FALSE(it.ok) << it.detail;
    }
  }
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch_dir("cli");
  const auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  const std::string good = write("good.json", R"({
    "initial_data": {"kind": "single_site", "q": [0, 0.4]},
    "compare_points": [[0, 20], [4, 20]],
    "output_dir": ")" + (dir / "out").string() + R"("})");
  const std::string bad = write("bad.json", R"({"initial_data": {"kind": "single_site", "q": 1.2}})");

  EXPECT_EQ(run_cli("validate " + good), 0);
  EXPECT_EQ(run_cli("validate " + bad), 2);
  EXPECT_EQ(run_cli("validate " + (dir / "missing.json").string()), 2);
  EXPECT_EQ(run_cli("compare " + good), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "compare.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "summary.json"));
  EXPECT_NE(slurp(dir / "out" / "summary.json").find("complete"), std::string::npos);
  EXPECT_EQ(run_cli("asymptote " + good), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "terms.csv"));
  EXPECT_EQ(run_cli("scatter " + good), 0);
  EXPECT_EQ(run_cli("simulate " + good), 0);
  EXPECT_EQ(run_cli("selftest --gamma-perturbation 1e-6"), 3);
}
