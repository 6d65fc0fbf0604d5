#pragma once

// Ablowitz–Ladik lattice field on a finite window and its time integration.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "aldnls/errors.hpp"
#include "aldnls/specfun.hpp"

namespace aldnls {

/// Values R_n for n = offset, ..., offset + values.size() - 1 at a given
/// time. Sites outside the window are exactly zero.
struct LatticeState {
  long offset = 0;
  std::vector<cplx> values;
  double time = 0.0;

  [[nodiscard]] long first() const { return offset; }
  [[nodiscard]] long last() const {
    return offset + static_cast<long>(values.size()) - 1;
  }
  [[nodiscard]] cplx at(long n) const {
    if (n < offset || n > last()) return {0.0, 0.0};
    return values[static_cast<std::size_t>(n - offset)];
  }

  static LatticeState single_site(cplx q, long site = 0) {
    return LatticeState{site, {q}, 0.0};
  }
};

inline double sup_norm(const LatticeState& s) {
  double m = 0.0;
  for (const cplx& x : s.values) m = std::max(m, std::abs(x));
  return m;
}

inline double l1_norm(const LatticeState& s) {
  double acc = 0.0;
  for (const cplx& x : s.values) acc += std::abs(x);
  return acc;
}

/// Conserved product ∏ (1 - |R_n|²), accumulated in log space.
inline double c_minus_inf(const LatticeState& s) {
  double log_sum = 0.0;
  for (const cplx& x : s.values) {
    const double m2 = std::norm(x);
    if (!(m2 < 1.0)) {
      throw DomainError("c_minus_inf: |R_n| >= 1 in the window");
    }
    log_sum += std::log1p(-m2);
  }
  return std::exp(log_sum);
}

struct ValidationReport {
  bool ok = false;
  double l1 = 0.0;
  double linf = 0.0;
  double c_minus_inf = 0.0;  // 0 when the smallness condition fails
  std::string message;
};

/// Checks the smallness condition sup |R_n| < 1.
inline ValidationReport validate_initial(const LatticeState& s) {
  ValidationReport rep;
  rep.l1 = l1_norm(s);
  rep.linf = sup_norm(s);
  for (const cplx& x : s.values) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
      rep.message = "non-finite lattice value";
      return rep;
    }
  }
  if (!(rep.linf < 1.0)) {
    rep.message = "smallness condition violated: sup|R_n| = " +
                  std::to_string(rep.linf) + " >= 1";
    return rep;
  }
  rep.ok = true;
  rep.c_minus_inf = c_minus_inf(s);
  rep.message = "ok";
  return rep;
}

/// dR_n/dt = i[(R_{n+1} - 2R_n + R_{n-1}) - |R_n|²(R_{n+1} + R_{n-1})]
/// over the window, written into out (same length as values).
inline void idnls_rhs(std::span<const cplx> values, std::span<cplx> out) {
  const std::size_t n = values.size();
  for (std::size_t k = 0; k < n; ++k) {
    const cplx left = k > 0 ? values[k - 1] : cplx{};
    const cplx right = k + 1 < n ? values[k + 1] : cplx{};
    const cplx here = values[k];
    out[k] = I * ((right - 2.0 * here + left) - std::norm(here) * (right + left));
  }
}

inline std::vector<cplx> idnls_rhs(const LatticeState& s) {
  std::vector<cplx> out(s.values.size());
  idnls_rhs(s.values, out);
  return out;
}

struct IntegratorConfig {
  double dt = 1e-2;
  long window_margin = 16;
  double tail_tolerance = 1e-12;
  double conservation_alarm = 1e-6;

  static constexpr double max_dt = 0.1;

  void validate() const {
    if (!(dt > 0.0) || dt > max_dt) {
      throw ConfigError("integrator.dt must lie in (0, 0.1], got " +
                        std::to_string(dt));
    }
    if (window_margin < 0) throw ConfigError("integrator.window_margin must be >= 0");
    if (!(tail_tolerance > 0.0)) throw ConfigError("integrator.tail_tolerance must be > 0");
    if (!(conservation_alarm > 0.0)) {
      throw ConfigError("integrator.conservation_alarm must be > 0");
    }
  }
};

/// Drops leading and trailing sites with |R_n| < tolerance (pass 0 to drop
/// exact zeros only). An all-small state becomes an empty window.
inline LatticeState trim_tails(LatticeState s, double tolerance) {
  const auto small = [tolerance](const cplx& x) {
    return tolerance > 0.0 ? std::abs(x) < tolerance : x == cplx{};
  };
  auto lo = std::find_if_not(s.values.begin(), s.values.end(), small);
  if (lo == s.values.end()) {
    s.values.clear();
    return s;
  }
  auto hi = std::find_if_not(s.values.rbegin(), s.values.rend(), small).base();
  s.offset += static_cast<long>(lo - s.values.begin());
  s.values = std::vector<cplx>(lo, hi);
  return s;
}

/// Classical fourth-order Runge–Kutta stepping of the lattice with a growing
/// window. c₋∞ of the initial state is the reference for the drift alarm.
///
/// The window always covers the light cone of the initial support, widened
/// by window_margin: [N⁻ - 2t - margin, N⁺ + 2t + margin]. In addition,
/// whenever one of the outermost `probe_width` sites on a side exceeds
/// tail_tolerance, that side is padded by its current padding (doubling it).
class Integrator {
 public:
  static constexpr std::size_t probe_width = 4;
  static constexpr long min_growth = 16;

  Integrator(LatticeState initial, IntegratorConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    const ValidationReport rep = validate_initial(initial);
    if (!rep.ok) throw DomainError("integrate: " + rep.message);
    c_reference_ = rep.c_minus_inf;
    state_ = trim_tails(std::move(initial), 0.0);
    if (!state_.values.empty()) {
      support_lo_ = state_.first();
      support_hi_ = state_.last();
      pad_left_ = pad_right_ = std::max(cfg_.window_margin, min_growth);
      cover_light_cone(state_.time);
    }
  }

  [[nodiscard]] const LatticeState& state() const { return state_; }
  [[nodiscard]] const IntegratorConfig& config() const { return cfg_; }
  [[nodiscard]] double c_reference() const { return c_reference_; }
  [[nodiscard]] std::size_t steps_taken() const { return steps_; }

  /// Advances to t_end; the last step is shortened to land on it exactly.
  const LatticeState& advance_to(double t_end) {
    if (t_end < state_.time) {
      throw DomainError("integrate: t_end precedes the current time");
    }
    if (state_.values.empty()) {
      state_.time = t_end;
      return state_;
    }
    const double t0 = state_.time;
    const double span = t_end - t0;
    const auto nsteps = static_cast<long>(std::ceil(span / cfg_.dt - 1e-9));
    for (long k = 0; k < nsteps; ++k) {
      const double t_next = (k + 1 == nsteps) ? t_end : t0 + (k + 1) * cfg_.dt;
      expand_if_needed();
      cover_light_cone(t_next);
      rk4_step(t_next - state_.time);
      state_.time = t_next;
      ++steps_;
      check_health();
    }
    state_.time = t_end;
    return state_;
  }

 private:
  void grow(long left, long right) {
    if (left > 0) {
      state_.values.insert(state_.values.begin(), static_cast<std::size_t>(left), cplx{});
      state_.offset -= left;
    }
    if (right > 0) {
      state_.values.insert(state_.values.end(), static_cast<std::size_t>(right), cplx{});
    }
  }

  void cover_light_cone(double t) {
    const long reach = static_cast<long>(std::ceil(2.0 * t)) + cfg_.window_margin;
    const long short_left = state_.first() - (support_lo_ - reach);
    const long short_right = (support_hi_ + reach) - state_.last();
    // Grow in chunks so the window is not reallocated every step.
    grow(short_left > 0 ? std::max(short_left, min_growth) : 0,
         short_right > 0 ? std::max(short_right, min_growth) : 0);
  }

  void expand_if_needed() {
    const std::size_t n = state_.values.size();
    const std::size_t w = std::min(probe_width, n);
    double left_max = 0.0;
    double right_max = 0.0;
    for (std::size_t k = 0; k < w; ++k) {
      left_max = std::max(left_max, std::abs(state_.values[k]));
      right_max = std::max(right_max, std::abs(state_.values[n - 1 - k]));
    }
    long add_left = 0;
    long add_right = 0;
    if (left_max > cfg_.tail_tolerance) {
      add_left = pad_left_;
      pad_left_ *= 2;
    }
    if (right_max > cfg_.tail_tolerance) {
      add_right = pad_right_;
      pad_right_ *= 2;
    }
    grow(add_left, add_right);
  }

  void rk4_step(double h) {
    const std::size_t n = state_.values.size();
    k1_.resize(n);
    k2_.resize(n);
    k3_.resize(n);
    k4_.resize(n);
    tmp_.resize(n);
    const std::vector<cplx>& y = state_.values;

    idnls_rhs(y, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * h * k1_[i];
    idnls_rhs(tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * h * k2_[i];
    idnls_rhs(tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * k3_[i];
    idnls_rhs(tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i) {
      state_.values[i] += (h / 6.0) * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
  }

  static std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
  }

  void check_health() const {
    const double sup = sup_norm(state_);
    if (!(sup < 1.0)) {
      throw NumericError("integrate: blow-up, sup|R_n| = " + sci(sup) + " at t = " +
                         sci(state_.time));
    }
    const double drift = std::abs(c_minus_inf(state_) - c_reference_);
    if (drift > cfg_.conservation_alarm) {
      throw NumericError("integrate: c_-inf drift " + sci(drift) + " exceeds alarm " +
                         sci(cfg_.conservation_alarm) + " at t = " + sci(state_.time));
    }
  }

  IntegratorConfig cfg_;
  LatticeState state_;
  double c_reference_ = 1.0;
  long support_lo_ = 0;
  long support_hi_ = 0;
  long pad_left_ = min_growth;
  long pad_right_ = min_growth;
  std::size_t steps_ = 0;
  std::vector<cplx> k1_, k2_, k3_, k4_, tmp_;
};

/// One-shot integration from state.time to t_end.
inline LatticeState integrate(const LatticeState& state, const IntegratorConfig& cfg,
                              double t_end) {
  Integrator integ(state, cfg);
  return integ.advance_to(t_end);
}

}  // namespace aldnls
