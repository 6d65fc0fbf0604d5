#pragma once

// Run configuration: JSON document with nested objects for the initial datum
// and the integrator. See config/schema.json for the documented schema.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "aldnls/asymptotics.hpp"
#include "aldnls/errors.hpp"
#include "aldnls/lattice.hpp"

namespace aldnls::harness {

/// Environment variable that overrides RunConfig::output_dir.
inline constexpr const char* output_dir_env = "ALDNLS_OUTPUT_DIR";

struct InlineData {
  long offset = 0;
  std::vector<cplx> values;
};
struct SingleSite {
  cplx q;
  long site = 0;
};
struct Gaussian {
  cplx amplitude;
  double width = 1.0;
  long center = 0;
};
struct RandomData {
  std::uint64_t seed = 0;
  double amplitude = 0.5;
  long support = 5;
};

using InitialData = std::variant<InlineData, SingleSite, Gaussian, RandomData>;

struct ComparePoint {
  long n = 0;
  double t = 0.0;
};

struct RunConfig {
  InitialData initial_data = SingleSite{};
  IntegratorConfig integrator;
  int circle_grid = 256;
  double quadrature_tol = 1e-10;
  RegionGuard guard;
  std::vector<ComparePoint> compare_points;
  std::string output_dir = "out";
};

namespace detail {

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11U) * 0x1.0p-53;
}

}  // namespace detail

/// Lattice state at t = 0 described by the initial datum.
inline LatticeState make_initial_state(const InitialData& data) {
  return std::visit(
      [](const auto& d) -> LatticeState {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, InlineData>) {
          return LatticeState{d.offset, d.values, 0.0};
        } else if constexpr (std::is_same_v<T, SingleSite>) {
          return LatticeState::single_site(d.q, d.site);
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          // exp(-x²/2w²) < 1e-17 beyond 9 widths.
          const long half = static_cast<long>(std::ceil(9.0 * d.width));
          LatticeState s{d.center - half, {}, 0.0};
          for (long n = -half; n <= half; ++n) {
            const double x = static_cast<double>(n) / d.width;
            s.values.push_back(d.amplitude * std::exp(-0.5 * x * x));
          }
          return s;
        } else {
          std::mt19937_64 eng(d.seed);
          LatticeState s{-(d.support / 2), {}, 0.0};
          for (long k = 0; k < d.support; ++k) {
            const double mag = d.amplitude * detail::unit_uniform(eng);
            const double ang = 2.0 * pi * detail::unit_uniform(eng);
            s.values.push_back(std::polar(mag, ang));
          }
          return s;
        }
      },
      data);
}

namespace detail {

using nlohmann::json;

struct Reader {
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) {
    errors.push_back(path + ": " + msg);
  }

  void reject_unknown(const json& obj, const std::string& path,
                      std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool known = false;
      for (const char* a : allowed) known = known || it.key() == a;
      if (!known) fail(path + "." + it.key(), "unknown key");
    }
  }

  template <class T>
  bool number(const json& obj, const char* key, const std::string& path, T& out,
              bool required = false) {
    if (!obj.contains(key)) {
      if (required) fail(path + "." + key, "missing required key");
      return false;
    }
    const json& v = obj.at(key);
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) {
        fail(path + "." + key, "expected an integer");
        return false;
      }
    } else {
      if (!v.is_number()) {
        fail(path + "." + key, "expected a number");
        return false;
      }
    }
    out = v.get<T>();
    return true;
  }

  // Complex values are a number (real) or a two-element array [re, im].
  bool complex_value(const json& v, const std::string& path, cplx& out) {
    if (v.is_number()) {
      out = {v.get<double>(), 0.0};
      return true;
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      out = {v[0].get<double>(), v[1].get<double>()};
      return true;
    }
    fail(path, "expected a complex value: number or [re, im]");
    return false;
  }

  bool complex_key(const json& obj, const char* key, const std::string& path,
                   cplx& out, bool required = false) {
    if (!obj.contains(key)) {
      if (required) fail(path + "." + key, "missing required key");
      return false;
    }
    return complex_value(obj.at(key), path + "." + key, out);
  }
};

inline InitialData read_initial_data(Reader& rd, const json& j) {
  const std::string path = "initial_data";
  if (!j.is_object()) {
    rd.fail(path, "expected an object");
    return SingleSite{};
  }
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    rd.fail(path + ".kind", "missing or not a string");
    return SingleSite{};
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "single_site") {
    rd.reject_unknown(j, path, {"kind", "q", "site"});
    SingleSite d;
    rd.complex_key(j, "q", path, d.q, true);
    rd.number(j, "site", path, d.site);
    return d;
  }
  if (kind == "inline") {
    rd.reject_unknown(j, path, {"kind", "offset", "values"});
    InlineData d;
    rd.number(j, "offset", path, d.offset);
    if (!j.contains("values") || !j.at("values").is_array()) {
      rd.fail(path + ".values", "expected an array of complex values");
      return d;
    }
    const json& vals = j.at("values");
    for (std::size_t k = 0; k < vals.size(); ++k) {
      cplx c;
      if (rd.complex_value(vals[k], path + ".values[" + std::to_string(k) + "]", c)) {
        d.values.push_back(c);
      }
    }
    return d;
  }
  if (kind == "gaussian") {
    rd.reject_unknown(j, path, {"kind", "amplitude", "width", "center"});
    Gaussian d;
    rd.complex_key(j, "amplitude", path, d.amplitude, true);
    rd.number(j, "width", path, d.width, true);
    rd.number(j, "center", path, d.center);
    if (!(d.width > 0.0)) rd.fail(path + ".width", "must be > 0");
    return d;
  }
  if (kind == "random") {
    rd.reject_unknown(j, path, {"kind", "seed", "amplitude", "support"});
    RandomData d;
    rd.number(j, "seed", path, d.seed, true);
    rd.number(j, "amplitude", path, d.amplitude, true);
    rd.number(j, "support", path, d.support, true);
    if (d.support < 1) rd.fail(path + ".support", "must be >= 1");
    if (!(d.amplitude >= 0.0)) rd.fail(path + ".amplitude", "must be >= 0");
    return d;
  }
  rd.fail(path + ".kind", "unknown kind '" + kind +
                              "' (expected inline, single_site, gaussian, random)");
  return SingleSite{};
}

}  // namespace detail

/// Parses and validates a configuration document. Throws ConfigError listing
/// every offending field.
inline RunConfig parse_config(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("parse error: top level must be an object");

  detail::Reader rd;
  RunConfig cfg;
  rd.reject_unknown(doc, "config",
                    {"initial_data", "integrator", "circle_grid", "quadrature_tol", "V0",
                     "compare_points", "output_dir"});

  if (doc.contains("initial_data")) {
    cfg.initial_data = detail::read_initial_data(rd, doc.at("initial_data"));
  } else {
    rd.fail("initial_data", "missing required key");
  }

  if (doc.contains("integrator")) {
    const json& ij = doc.at("integrator");
    if (!ij.is_object()) {
      rd.fail("integrator", "expected an object");
    } else {
      rd.reject_unknown(ij, "integrator",
                        {"dt", "window_margin", "tail_tolerance", "conservation_alarm"});
      auto& ic = cfg.integrator;
      rd.number(ij, "dt", "integrator", ic.dt);
      rd.number(ij, "window_margin", "integrator", ic.window_margin);
      rd.number(ij, "tail_tolerance", "integrator", ic.tail_tolerance);
      rd.number(ij, "conservation_alarm", "integrator", ic.conservation_alarm);
    }
  }
  try {
    cfg.integrator.validate();
  } catch (const ConfigError& e) {
    rd.errors.emplace_back(e.what());
  }

  rd.number(doc, "circle_grid", "config", cfg.circle_grid);
  if (cfg.circle_grid < 2) rd.fail("config.circle_grid", "must be >= 2");
  rd.number(doc, "quadrature_tol", "config", cfg.quadrature_tol);
  if (!(cfg.quadrature_tol > 0.0)) rd.fail("config.quadrature_tol", "must be > 0");
  rd.number(doc, "V0", "config", cfg.guard.V0);
  const bool v0_ok = cfg.guard.V0 > 0.0 && cfg.guard.V0 < 2.0;
  if (!v0_ok) rd.fail("config.V0", "must lie in (0, 2)");

  if (doc.contains("compare_points")) {
    const json& pts = doc.at("compare_points");
    if (!pts.is_array()) {
      rd.fail("config.compare_points", "expected an array of [n, t] pairs");
    } else {
      for (std::size_t k = 0; k < pts.size(); ++k) {
        const std::string path = "config.compare_points[" + std::to_string(k) + "]";
        const json& p = pts[k];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number()) {
          rd.fail(path, "expected [n (integer), t (number)]");
          continue;
        }
        ComparePoint cp{p[0].get<long>(), p[1].get<double>()};
        if (!(cp.t > 0.0)) {
          rd.fail(path, "t must be > 0");
        } else if (v0_ok) {
          const double v = static_cast<double>(cp.n) / cp.t;
          if (!(std::abs(v) <= 2.0 - cfg.guard.V0)) {
            rd.fail(path, "region violated: |n/t| = " + std::to_string(std::abs(v)) +
                              " > 2 - V0 = " + std::to_string(2.0 - cfg.guard.V0));
          }
        }
        cfg.compare_points.push_back(cp);
      }
    }
  }

  if (doc.contains("output_dir")) {
    if (doc.at("output_dir").is_string()) {
      cfg.output_dir = doc.at("output_dir").get<std::string>();
    } else {
      rd.fail("config.output_dir", "expected a string");
    }
  }
  if (const char* env = std::getenv(output_dir_env); env != nullptr && *env != '\0') {
    cfg.output_dir = env;
  }

  if (rd.errors.empty()) {
    const ValidationReport rep = validate_initial(make_initial_state(cfg.initial_data));
    if (!rep.ok) rd.fail("initial_data", rep.message);
  }

  if (!rd.errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : rd.errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace aldnls::harness
