#pragma once

// Built-in invariant suite run by `aldnls selftest`.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "aldnls/asymptotics.hpp"
#include "aldnls/harness/runs.hpp"
#include "aldnls/lattice.hpp"
#include "aldnls/scattering.hpp"
#include "aldnls/specfun.hpp"

namespace aldnls::harness {

struct SelftestOptions {
  /// Relative corruption applied to Γ (sensitivity probe); 0 leaves it exact.
  double gamma_perturbation = 0.0;
  /// Coarsest step of the step-halving order check.
  double richardson_dt = 0.1;
};

struct SelftestItem {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct SelftestReport {
  std::vector<SelftestItem> items;
  [[nodiscard]] bool all_passed() const {
    return std::all_of(items.begin(), items.end(), [](const auto& i) { return i.ok; });
  }
};

namespace detail {

struct PerturbedGamma {
  double eps = 0.0;
  cplx operator()(cplx w) const { return gamma_complex(w) * (1.0 + eps); }
};

inline LatticeState random_window(std::mt19937_64& eng, long max_len, double max_amp) {
  const long len = 1 + static_cast<long>(eng() % static_cast<std::uint64_t>(max_len));
  LatticeState s{-(len / 2), {}, 0.0};
  for (long k = 0; k < len; ++k) {
    s.values.push_back(std::polar(max_amp * unit_uniform(eng), 2.0 * pi * unit_uniform(eng)));
  }
  return s;
}

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

}  // namespace detail

inline SelftestReport run_selftest(const SelftestOptions& opt = {}) {
  SelftestReport rep;
  const detail::PerturbedGamma gamma{opt.gamma_perturbation};

  const auto item = [&rep](const std::string& name, const std::function<std::string(bool&)>& body) {
    SelftestItem it{name, false, {}};
    try {
      bool ok = true;
      it.detail = body(ok);
      it.ok = ok;
    } catch (const std::exception& e) {
      it.ok = false;
      it.detail = std::string("exception: ") + e.what();
    }
    rep.items.push_back(std::move(it));
  };

  item("gamma |G(iy)|^2 = pi/(y sinh(pi y))", [&](bool& ok) {
    std::mt19937_64 eng(11);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double y = 0.01 + 4.99 * detail::unit_uniform(eng);
      const double ref = pi / (y * std::sinh(pi * y));
      worst = std::max(worst, std::abs(std::norm(gamma(cplx{0.0, y})) - ref) / ref);
    }
    ok = worst <= 1e-12;
    return "max rel err " + detail::sci(worst);
  });

  item("gamma recurrence G(w+1) = w G(w)", [&](bool& ok) {
    double worst = 0.0;
    for (double re = -4.75; re <= 8.0; re += 0.5) {
      for (double im = -9.0; im <= 9.0; im += 1.5) {
        const cplx w{re, im};
        const cplx lhs = gamma(w + 1.0);
        worst = std::max(worst, std::abs(lhs - w * gamma(w)) / std::abs(lhs));
      }
    }
    ok = worst <= 1e-12;
    return "max rel err " + detail::sci(worst);
  });

  item("arc integral additivity", [&](bool& ok) {
    const auto f = [](cplx tau) { return std::exp(tau) / (tau - 2.5); };
    std::mt19937_64 eng(5);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const double a = -pi + 2.0 * pi * detail::unit_uniform(eng);
      const double c = a + 0.9 * pi * detail::unit_uniform(eng);
      const double b = a + (c - a) * detail::unit_uniform(eng);
      const cplx whole = arc_integral(f, ArcSpec{a, c});
      const cplx parts = arc_integral(f, ArcSpec{a, b}) + arc_integral(f, ArcSpec{b, c});
      worst = std::max(worst, std::abs(whole - parts));
    }
    ok = worst <= 2e-10;
    return "max defect " + detail::sci(worst);
  });

  item("branched power, integer exponents", [&](bool& ok) {
    const cplx base{-0.7, 0.4};
    double worst = 0.0;
    cplx acc{1.0, 0.0};
    for (int m = 1; m <= 12; ++m) {
      acc *= base;
      worst = std::max(worst, std::abs(branched_power(base, cplx(m)) - acc) / std::abs(acc));
    }
    ok = worst <= 1e-14;
    return "max rel err " + detail::sci(worst);
  });

  item("c_-inf conservation over [0, 10], dt = 1e-3", [&](bool& ok) {
    const LatticeState s{-1, {{0.3, 0.1}, {-0.5, 0.0}, {0.1, 0.4}}, 0.0};
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.conservation_alarm = 1.0;
    const LatticeState end = integrate(s, cfg, 10.0);
    const double drift = std::abs(c_minus_inf(end) - c_minus_inf(s));
    ok = drift <= 1e-8;
    return "drift " + detail::sci(drift);
  });

  item("RK4 step-halving order", [&](bool& ok) {
    const LatticeState s = LatticeState::single_site({0.3, 0.0});
    const auto run = [&](double dt) {
      IntegratorConfig cfg;
      cfg.dt = dt;
      cfg.window_margin = 32;
      cfg.conservation_alarm = 1.0;
      return integrate(s, cfg, 1.0);
    };
    const double h = opt.richardson_dt;
    const LatticeState a = run(h);
    const LatticeState b = run(h / 2);
    const LatticeState c = run(h / 4);
    double e1 = 0.0;
    double e2 = 0.0;
    for (long n = -40; n <= 40; ++n) {
      e1 = std::max(e1, std::abs(a.at(n) - b.at(n)));
      e2 = std::max(e2, std::abs(b.at(n) - c.at(n)));
    }
    const double factor = e1 / e2;
    ok = factor >= 12.0 && factor <= 20.0;
    return "reduction factor " + detail::sci(factor);
  });

  item("|a|^2 - |b|^2 = c_-inf and r(-z) = -r(z)", [&](bool& ok) {
    std::mt19937_64 eng(2024);
    double unit = 0.0;
    double odd = 0.0;
    for (int w = 0; w < 20; ++w) {
      const LatticeState s = detail::random_window(eng, 9, 0.6);
      const double c = c_minus_inf(s);
      for (int k = 0; k < 256; ++k) {
        const cplx z = std::polar(1.0, 2.0 * pi * k / 256);
        const ScatteringCoeffs ab = scattering_coeffs(s, z);
        unit = std::max(unit, std::abs(std::norm(ab.a) - std::norm(ab.b) - c));
        odd = std::max(odd, std::abs(reflection(s, -z) + reflection(s, z)));
      }
    }
    ok = unit <= 1e-10 && odd <= 1e-12;
    return "unitarity " + detail::sci(unit) + ", oddness " + detail::sci(odd);
  });

  item("IST evolution consistency", [&](bool& ok) {
    const LatticeState s = LatticeState::single_site({0.3, 0.0});
    IntegratorConfig cfg;
    cfg.dt = 1e-3;
    cfg.tail_tolerance = 1e-12;
    const double t1 = 5.0;
    const LatticeState end = integrate(s, cfg, t1);
    const ScatteringData evolved(end, cfg.tail_tolerance);
    double worst = 0.0;
    for (int k = 0; k < 64; ++k) {
      const cplx z = std::polar(1.0, 2.0 * pi * (k + 0.5) / 64);
      worst = std::max(worst, std::abs(evolved.r(z) - evolve_reflection(reflection(s, z), z, t1)));
    }
    ok = worst <= 1e-6;
    return "max deviation " + detail::sci(worst);
  });

  item("saddle residual |phi'(S_j)| <= 1e-12 t", [&](bool& ok) {
    double worst = 0.0;
    for (int k = 0; k <= 38; ++k) {
      const double v = -1.9 + 0.1 * k;
      const Saddles s = saddle_points(v);
      for (double t : {1.0, 10.0, 100.0}) {
        for (const cplx& S : s.S) worst = std::max(worst, std::abs(phase(S, v * t, t).dphi) / t);
      }
    }
    ok = worst <= 1e-12;
    return "max |phi'|/t " + detail::sci(worst);
  });

  // Shared smooth, non-constant-modulus reflection coefficient.
  const LatticeState sample{-2, {{0.2, 0.1}, {-0.3, 0.25}, {0.35, 0.0}, {0.0, -0.2}, {0.1, 0.1}}, 0.0};
  const ScatteringData sample_scat(sample);
  const auto r = [&sample_scat](cplx z) { return sample_scat.r(z); };

  item("delta(0) >= 1", [&](bool& ok) {
    double lowest = INFINITY;
    for (double v : {-1.5, -0.5, 0.0, 0.7, 1.8}) {
      const Saddles s = saddle_points(v);
      lowest = std::min(lowest, delta0(r, s.S[0], s.S[1]));
    }
    ok = lowest >= 1.0 - 1e-10;
    return "min delta(0) " + detail::sci(lowest);
  });

  item("|M_j| = sqrt(nu_j)", [&](bool& ok) {
    std::mt19937_64 eng(99);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double mod = 0.95 * detail::unit_uniform(eng) + 1e-3;
      const cplx rs = std::polar(mod, 2.0 * pi * detail::unit_uniform(eng));
      const double n = nu(rs);
      for (int j = 1; j <= 2; ++j) {
        worst = std::max(worst, std::abs(std::abs(M(j, rs, n, gamma)) - std::sqrt(n)));
      }
    }
    ok = worst <= 1e-10;
    return "max deviation " + detail::sci(worst);
  });

  item("delta factorization and delta(-z) = delta(z)", [&](bool& ok) {
    double fact = 0.0;
    double sym = 0.0;
    for (double v : {-1.2, 0.0, 0.9}) {
      const Saddles s = saddle_points(v);
      for (int k = 0; k < 10; ++k) {
        const double rho = (k % 2 == 0) ? 0.5 : 2.0;
        const cplx z = std::polar(rho, 0.3 + 2.0 * pi * k / 10);
        const cplx direct = delta_direct(z, r, s);
        cplx prod{1.0, 0.0};
        for (int m = 1; m <= 4; ++m) prod *= delta_factor(m, z, r, s);
        fact = std::max(fact, std::abs(prod - direct) / std::abs(direct));
        sym = std::max(sym, std::abs(delta_direct(-z, r, s) - direct) / std::abs(direct));
      }
    }
    ok = fact <= 1e-8 && sym <= 1e-10;
    return "factorization " + detail::sci(fact) + ", symmetry " + detail::sci(sym);
  });

  item("delta_hat_j(S_j) = prod_{k!=j} delta_k(S_j)", [&](bool& ok) {
    double worst = 0.0;
    for (double v : {-1.2, 0.0, 0.9}) {
      const Saddles s = saddle_points(v);
      for (int j = 1; j <= 2; ++j) {
        const cplx Sj = s.S[static_cast<std::size_t>(j - 1)];
        cplx prod{1.0, 0.0};
        for (int k = 1; k <= 4; ++k) {
          if (k != j) prod *= delta_factor(k, Sj, r, s);
        }
        worst = std::max(worst, std::abs(delta_hat(j, r, s) - prod) / std::abs(prod));
      }
    }
    ok = worst <= 1e-8;
    return "max rel err " + detail::sci(worst);
  });

  item("linear limit R_0 ~ q e^{-2it} J_0(2t)", [&](bool& ok) {
    const cplx q{1e-3, 0.0};
    const ScatteringData tiny(LatticeState::single_site(q));
    const auto rt = [&tiny](cplx z) { return tiny.r(z); };
    double worst = 0.0;
    for (double t : {300.0, 500.0, 700.0}) {
      const cplx exact = q * std::polar(1.0, -2.0 * t) * std::cyl_bessel_j(0.0, 2.0 * t);
      const cplx asym = leading_term(0L, t, rt, RegionGuard{}, 1e-10, gamma);
      worst = std::max(worst, std::abs(asym - exact) / (std::abs(q) / std::sqrt(pi * t)));
    }
    ok = worst <= 1e-2;
    return "max err / envelope " + detail::sci(worst);
  });

  return rep;
}

}  // namespace aldnls::harness
