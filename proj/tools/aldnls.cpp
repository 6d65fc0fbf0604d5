// Command-line front end: validate, simulate, scatter, asymptote, compare,
// selftest.
//
// Exit codes: 0 success, 2 configuration or validation failure, 3 numeric
// tolerance failure.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "aldnls/harness/config.hpp"
#include "aldnls/harness/runs.hpp"
#include "aldnls/harness/selftest.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numeric = 3;

using namespace aldnls;
using namespace aldnls::harness;

int cmd_validate(const std::string& path) {
  const RunConfig cfg = load_config(path);
  const ValidationReport rep = validate_initial(make_initial_state(cfg.initial_data));
  std::cout << "config ok\n"
            << "  l1 norm      " << fmt17(rep.l1) << '\n'
            << "  sup norm     " << fmt17(rep.linf) << '\n'
            << "  c_-inf       " << fmt17(rep.c_minus_inf) << '\n'
            << "  points       " << cfg.compare_points.size() << '\n'
            << "  output_dir   " << cfg.output_dir << '\n';
  return exit_ok;
}

int cmd_simulate(const std::string& path) {
  const RunConfig cfg = load_config(path);
  const auto snaps = run_simulate(cfg);
  auto out = open_output(cfg, "simulate.csv");
  write_simulate_csv(out, snaps);
  for (const auto& s : snaps) {
    std::cout << "t = " << fmt17(s.state.time) << "  window [" << s.state.first() << ", "
              << s.state.last() << "]  c_-inf drift " << s.c_drift << '\n';
  }
  return exit_ok;
}

int cmd_scatter(const std::string& path) {
  const RunConfig cfg = load_config(path);
  const ScatterResult res = run_scatter(cfg);
  auto out = open_output(cfg, "scatter.csv");
  write_scatter_csv(out, res);
  std::cout << "c_-inf " << fmt17(res.c_inf) << "  max ||a|^2-|b|^2-c_-inf| "
            << res.max_unitarity_residual << '\n';
  return exit_ok;
}

int cmd_asymptote(const std::string& path) {
  const RunConfig cfg = load_config(path);
  const auto preds = run_asymptote(cfg);
  auto out = open_output(cfg, "asymptote.csv");
  write_asymptote_csv(out, preds);
  auto terms = open_output(cfg, "terms.csv");
  write_terms_csv(terms, preds);
  std::cout << preds.size() << " predictions written to " << cfg.output_dir << '\n';
  return exit_ok;
}

int cmd_compare(const std::string& path) {
  const RunConfig cfg = load_config(path);
  const CompareResult res = run_compare(cfg);
  {
    auto out = open_output(cfg, "compare.csv");
    write_compare_csv(out, res.rows);
    auto plot = open_output(cfg, "compare_plot.txt");
    write_error_plot(plot, res.rows);
    auto summary = open_output(cfg, "summary.json");
    summary << summary_json(res.summary).dump(2) << '\n';
  }
  for (const auto& r : res.rows) {
    std::printf("n=%6ld t=%10.4g |R_sim|=%.6e |R_asym|=%.6e abs_err=%.3e rel_err=%.3e\n",
                r.n, r.t, std::abs(r.R_sim), std::abs(r.R_asym), r.abs_err, r.rel_err);
  }
  std::printf("fitted constant max(abs_err t/log t) = %.6g, spread = %.4g\n",
              res.summary.fitted_constant, res.summary.scaled_error_spread);
  for (const auto& f : res.summary.failures) std::fprintf(stderr, "failed %s\n", f.c_str());
  return res.summary.complete ? exit_ok : exit_numeric;
}

int cmd_selftest(const SelftestOptions& opt) {
  const SelftestReport rep = run_selftest(opt);
  for (const auto& it : rep.items) {
    std::printf("[%s] %-48s %s\n", it.ok ? "PASS" : "FAIL", it.name.c_str(), it.detail.c_str());
  }
  return rep.all_passed() ? exit_ok : exit_numeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ablowitz-Ladik lattice: simulation, scattering and long-time asymptotics"};
  app.require_subcommand(1);

  std::string config;
  const auto with_config = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "run configuration (JSON)")->required();
    return sub;
  };
  auto* validate = with_config("validate", "check a configuration and report norms");
  auto* simulate = with_config("simulate", "integrate the lattice to every compare time");
  auto* scatter = with_config("scatter", "write r(e^{i theta}) on the circle grid");
  auto* asymptote = with_config("asymptote", "write leading-term predictions");
  auto* compare = with_config("compare", "simulation versus leading term");

  SelftestOptions opt;
  auto* selftest = app.add_subcommand("selftest", "run the built-in invariant suite");
  selftest->add_option("--gamma-perturbation", opt.gamma_perturbation,
                       "relative corruption applied to Gamma (sensitivity probe)");
  selftest->add_option("--dt", opt.richardson_dt, "coarsest step of the order check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(config);
    if (*simulate) return cmd_simulate(config);
    if (*scatter) return cmd_scatter(config);
    if (*asymptote) return cmd_asymptote(config);
    if (*compare) return cmd_compare(config);
    if (*selftest) return cmd_selftest(opt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_config;
  } catch (const RegionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_config;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_config;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_numeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_numeric;
  }
  return exit_ok;
}
