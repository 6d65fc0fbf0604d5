#pragma once

// Experiment drivers behind the CLI subcommands and their flat-file outputs.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aldnls/asymptotics.hpp"
#include "aldnls/harness/config.hpp"
#include "aldnls/lattice.hpp"
#include "aldnls/scattering.hpp"

namespace aldnls::harness {

/// Round-trip formatting: 17 significant digits.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline constexpr double rel_err_floor = 1e-300;

struct ComparisonRow {
  long n = 0;
  double t = 0.0;
  double v = 0.0;
  cplx R_sim;
  cplx R_asym;
  double abs_err = 0.0;
  double rel_err = 0.0;

  static ComparisonRow make(long n, double t, cplx sim, cplx asym) {
    ComparisonRow row{n, t, static_cast<double>(n) / t, sim, asym, 0.0, 0.0};
    row.abs_err = std::abs(sim - asym);
    row.rel_err = row.abs_err / std::max(std::abs(asym), rel_err_floor);
    return row;
  }
};

inline const char* compare_csv_header = "n,t,v,re_sim,im_sim,re_asym,im_asym,abs_err,rel_err";

inline void write_compare_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << compare_csv_header << '\n';
  for (const auto& r : rows) {
    out << r.n << ',' << fmt17(r.t) << ',' << fmt17(r.v) << ',' << fmt17(r.R_sim.real())
        << ',' << fmt17(r.R_sim.imag()) << ',' << fmt17(r.R_asym.real()) << ','
        << fmt17(r.R_asym.imag()) << ',' << fmt17(r.abs_err) << ',' << fmt17(r.rel_err)
        << '\n';
  }
}

struct CompareSummary {
  bool complete = true;
  std::vector<std::string> failures;
  /// max over rows of abs_err · t / log t (rows with t > 1).
  double fitted_constant = 0.0;
  /// max / min of abs_err · t / log t.
  double scaled_error_spread = 0.0;
  /// per site n: abs_err at the largest t divided by abs_err at the smallest t.
  std::map<long, double> decay_ratio;
};

struct CompareResult {
  std::vector<ComparisonRow> rows;
  CompareSummary summary;
};

inline CompareSummary summarize(const std::vector<ComparisonRow>& rows) {
  CompareSummary s;
  double lo = INFINITY;
  double hi = 0.0;
  std::map<long, std::pair<const ComparisonRow*, const ComparisonRow*>> ends;
  for (const auto& r : rows) {
    if (r.t > 1.0) {
      const double scaled = r.abs_err * r.t / std::log(r.t);
      hi = std::max(hi, scaled);
      lo = std::min(lo, scaled);
    }
    auto [it, inserted] = ends.try_emplace(r.n, &r, &r);
    if (!inserted) {
      if (r.t < it->second.first->t) it->second.first = &r;
      if (r.t > it->second.second->t) it->second.second = &r;
    }
  }
  s.fitted_constant = hi;
  s.scaled_error_spread = (lo > 0.0 && std::isfinite(lo)) ? hi / lo : 0.0;
  for (const auto& [n, pr] : ends) {
    if (pr.first != pr.second && pr.first->abs_err > 0.0) {
      s.decay_ratio[n] = pr.second->abs_err / pr.first->abs_err;
    }
  }
  return s;
}

/// One forward integration with checkpoints at the requested times (sorted
/// ascending) and the leading term at every point. A failure at one point
/// is recorded and the remaining points are still evaluated; an integrator
/// failure ends the run with the rows computed so far.
inline CompareResult run_compare(const RunConfig& cfg) {
  CompareResult out;
  std::vector<ComparePoint> pts = cfg.compare_points;
  std::stable_sort(pts.begin(), pts.end(),
                   [](const ComparePoint& a, const ComparePoint& b) { return a.t < b.t; });

  const LatticeState initial = make_initial_state(cfg.initial_data);
  const ScatteringData scat(initial);
  const auto r = [&scat](cplx z) { return scat.r(z); };
  Integrator integ(initial, cfg.integrator);
  std::map<double, SaddleFrame> frames;

  for (std::size_t k = 0; k < pts.size(); ++k) {
    const ComparePoint& p = pts[k];
    try {
      integ.advance_to(p.t);
    } catch (const Error& e) {
      out.summary.complete = false;
      for (std::size_t m = k; m < pts.size(); ++m) {
        out.summary.failures.push_back("(" + std::to_string(pts[m].n) + ", " +
                                       fmt17(pts[m].t) + "): " + e.what());
      }
      break;
    }
    try {
      const double nd = static_cast<double>(p.n);
      const double v = nd / p.t;
      auto it = frames.find(v);
      if (it == frames.end()) {
        it = frames.emplace(v, make_frame(v, r, cfg.guard, cfg.quadrature_tol)).first;
      }
      const cplx asym = leading_term(nd, p.t, it->second);
      out.rows.push_back(ComparisonRow::make(p.n, p.t, integ.state().at(p.n), asym));
    } catch (const Error& e) {
      out.summary.complete = false;
      out.summary.failures.push_back("(" + std::to_string(p.n) + ", " + fmt17(p.t) +
                                     "): " + e.what());
    }
  }
  const CompareSummary stats = summarize(out.rows);
  out.summary.fitted_constant = stats.fitted_constant;
  out.summary.scaled_error_spread = stats.scaled_error_spread;
  out.summary.decay_ratio = stats.decay_ratio;
  return out;
}

inline nlohmann::json summary_json(const CompareSummary& s) {
  nlohmann::json j;
  j["status"] = s.complete ? "complete" : "failed";
  j["failures"] = s.failures;
  j["fitted_constant"] = s.fitted_constant;
  j["scaled_error_spread"] = s.scaled_error_spread;
  nlohmann::json d = nlohmann::json::object();
  for (const auto& [n, ratio] : s.decay_ratio) d[std::to_string(n)] = ratio;
  j["decay_ratio"] = d;
  return j;
}

/// Columns t, abs_err, log(t)/t for external plotting.
inline void write_error_plot(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "# n t abs_err log(t)/t\n";
  for (const auto& r : rows) {
    out << r.n << ' ' << fmt17(r.t) << ' ' << fmt17(r.abs_err) << ' '
        << fmt17(std::log(r.t) / r.t) << '\n';
  }
}

// ---------------------------------------------------------------------------

struct ScatterSample {
  double theta;
  cplx r;
};

/// r(e^{iθ}) at θ_k = 2πk/N for the time-zero data, and the largest
/// deviation of |a|² - |b|² from c₋∞ on the grid.
struct ScatterResult {
  std::vector<ScatterSample> samples;
  double c_inf = 1.0;
  double max_unitarity_residual = 0.0;
};

inline ScatterResult run_scatter(const RunConfig& cfg) {
  const ScatteringData scat(make_initial_state(cfg.initial_data));
  ScatterResult res;
  res.c_inf = scat.c_inf();
  for (int k = 0; k < cfg.circle_grid; ++k) {
    const double theta = 2.0 * pi * k / cfg.circle_grid;
    const cplx z = std::polar(1.0, theta);
    const ScatteringCoeffs c = scat.coeffs(z);
    res.max_unitarity_residual =
        std::max(res.max_unitarity_residual,
                 std::abs(std::norm(c.a) - std::norm(c.b) - res.c_inf));
    res.samples.push_back({theta, c.b / c.a});
  }
  return res;
}

inline void write_scatter_csv(std::ostream& out, const ScatterResult& res) {
  out << "theta,re_r,im_r,abs_r\n";
  for (const auto& s : res.samples) {
    out << fmt17(s.theta) << ',' << fmt17(s.r.real()) << ',' << fmt17(s.r.imag()) << ','
        << fmt17(std::abs(s.r)) << '\n';
  }
}

// ---------------------------------------------------------------------------

struct Prediction {
  long n = 0;
  double t = 0.0;
  double v = 0.0;
  cplx R_asym;
  std::array<AsymptoticTerm, 2> terms;
};

inline std::vector<Prediction> run_asymptote(const RunConfig& cfg) {
  const ScatteringData scat(make_initial_state(cfg.initial_data));
  const auto r = [&scat](cplx z) { return scat.r(z); };
  std::vector<Prediction> out;
  for (const ComparePoint& p : cfg.compare_points) {
    const double nd = static_cast<double>(p.n);
    const SaddleFrame f = make_frame(nd / p.t, r, cfg.guard, cfg.quadrature_tol);
    out.push_back(Prediction{p.n, p.t, nd / p.t, leading_term(nd, p.t, f),
                             {phase_decomposition(1, f), phase_decomposition(2, f)}});
  }
  return out;
}

inline void write_asymptote_csv(std::ostream& out, const std::vector<Prediction>& preds) {
  out << "n,t,v,re_asym,im_asym\n";
  for (const auto& p : preds) {
    out << p.n << ',' << fmt17(p.t) << ',' << fmt17(p.v) << ',' << fmt17(p.R_asym.real())
        << ',' << fmt17(p.R_asym.imag()) << '\n';
  }
}

inline void write_terms_csv(std::ostream& out, const std::vector<Prediction>& preds) {
  out << "n,t,v,j,re_C,im_C,p,q\n";
  for (const auto& p : preds) {
    for (const auto& term : p.terms) {
      out << p.n << ',' << fmt17(p.t) << ',' << fmt17(p.v) << ',' << term.j << ','
          << fmt17(term.C.real()) << ',' << fmt17(term.C.imag()) << ',' << fmt17(term.p)
          << ',' << fmt17(term.q) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------

struct Snapshot {
  LatticeState state;
  double c_drift = 0.0;
};

/// Integrates to every distinct compare time; one snapshot per time.
inline std::vector<Snapshot> run_simulate(const RunConfig& cfg) {
  std::vector<double> times;
  for (const auto& p : cfg.compare_points) times.push_back(p.t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  Integrator integ(make_initial_state(cfg.initial_data), cfg.integrator);
  std::vector<Snapshot> out;
  for (double t : times) {
    const LatticeState& s = integ.advance_to(t);
    out.push_back({s, std::abs(c_minus_inf(s) - integ.c_reference())});
  }
  return out;
}

inline void write_simulate_csv(std::ostream& out, const std::vector<Snapshot>& snaps) {
  out << "t,n,re_R,im_R\n";
  for (const auto& snap : snaps) {
    for (long n = snap.state.first(); n <= snap.state.last(); ++n) {
      const cplx x = snap.state.at(n);
      out << fmt17(snap.state.time) << ',' << n << ',' << fmt17(x.real()) << ','
          << fmt17(x.imag()) << '\n';
    }
  }
}

/// Opens output_dir/name for writing, creating the directory.
inline std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.output_dir);
  const auto path = std::filesystem::path(cfg.output_dir) / name;
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace aldnls::harness
