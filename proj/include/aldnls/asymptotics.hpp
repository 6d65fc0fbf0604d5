#pragma once

// Long-time asymptotics of the defocusing Ablowitz–Ladik lattice in the
// region |n| <= (2 - V0) t.
//
// Every quantity is built from the time-zero reflection coefficient r(z),
// supplied as a callable on the unit circle. The leading term is
//
//   R_n(t) ~ -2 δ(0) Σ_{j=1,2} β_j (δ_j⁰)^{-2} S_j^{-2} M_j,
//
// with S_1..S_4 the saddle points of φ(z) = (i t / 2)(z - 1/z)² - n log z.
// The overall factor -2δ(0) is fixed by the linear limit: for small data it
// reproduces R_0(t) = q e^{-2it} J_0(2t) for the single-site solution.

#include <array>
#include <cmath>
#include <complex>
#include <concepts>
#include <string>

#include "aldnls/errors.hpp"
#include "aldnls/scattering.hpp"
#include "aldnls/specfun.hpp"

namespace aldnls {

template <class R>
concept CircleFunction = std::invocable<const R&, cplx> &&
    std::convertible_to<std::invoke_result_t<const R&, cplx>, cplx>;

/// Admissible rays |v| <= 2 - V0.
struct RegionGuard {
  double V0 = 0.1;

  void check(double v) const {
    if (!(V0 > 0.0 && V0 < 2.0)) {
      throw ConfigError("RegionGuard: V0 must lie in (0, 2)");
    }
    if (!(std::abs(v) <= 2.0 - V0 + 1e-15)) {
      throw RegionError("ratio n/t = " + std::to_string(v) + " outside |n/t| <= " +
                        std::to_string(2.0 - V0));
    }
  }
};

// ---------------------------------------------------------------------------
// Phase function and saddle points
// ---------------------------------------------------------------------------

struct PhaseValue {
  cplx phi;
  cplx dphi;
  cplx d2phi;
};

namespace detail {

inline PhaseValue phase_with_log(cplx z, cplx log_z, double n, double t) {
  const cplx zi = 1.0 / z;
  const cplx w = z - zi;
  const cplx s = 1.0 + zi * zi;
  PhaseValue out;
  out.phi = 0.5 * I * t * w * w - n * log_z;
  out.dphi = I * t * w * s - n * zi;
  out.d2phi = I * t * (s * s - 2.0 * zi * zi * zi * w) + n * zi * zi;
  return out;
}

}  // namespace detail

/// φ, φ′, φ″ at z with the principal logarithm.
inline PhaseValue phase(cplx z, double n, double t) {
  if (z == cplx{}) throw DomainError("phase: z = 0");
  return detail::phase_with_log(z, std::log(z), n, t);
}

/// φ at z = ρ e^{iθ} with log z = log ρ + iθ (no cut).
inline PhaseValue phase_polar(double rho, double theta, double n, double t) {
  if (!(rho > 0.0)) throw DomainError("phase_polar: radius must be positive");
  return detail::phase_with_log(std::polar(rho, theta), cplx{std::log(rho), theta}, n, t);
}

struct Saddles {
  cplx A;
  std::array<cplx, 4> S;  // S[0] = S_1, ..., S[3] = S_4
};

inline const cplx e_minus_i_pi_4 = std::polar(1.0, -0.25 * pi);
inline const cplx e_plus_i_pi_4 = std::polar(1.0, 0.25 * pi);

/// A = (√(2+v) - i√(2-v))/2, S_1 = e^{-iπ/4}A, S_2 = e^{-iπ/4}Ā,
/// S_3 = -S_1, S_4 = -S_2.
inline Saddles saddle_points(double v, const RegionGuard& guard = {}) {
  guard.check(v);
  Saddles s;
  s.A = 0.5 * cplx{std::sqrt(2.0 + v), -std::sqrt(2.0 - v)};
  s.S[0] = e_minus_i_pi_4 * s.A;
  s.S[1] = e_minus_i_pi_4 * std::conj(s.A);
  s.S[2] = -s.S[0];
  s.S[3] = -s.S[1];
  return s;
}

/// Arc anchor T_j: e^{-iπ/4} for j = 1, 2 and e^{3iπ/4} for j = 3, 4.
inline cplx arc_anchor(int j) {
  return (j == 1 || j == 2) ? e_minus_i_pi_4 : -e_minus_i_pi_4;
}

inline double parity_sign(int j) { return (j % 2 == 1) ? 1.0 : -1.0; }  // (-1)^{j-1}

// ---------------------------------------------------------------------------
// Scalar quantities at the saddles
// ---------------------------------------------------------------------------

/// ν = -log(1 - |r|²) / 2π.
inline double nu(cplx r_at_saddle) {
  const double m2 = std::norm(r_at_saddle);
  if (!(m2 < 1.0)) throw DomainError("nu: |r| >= 1");
  return -std::log1p(-m2) / (2.0 * pi);
}

/// log(1 - |r(τ)|²).
template <CircleFunction R>
double log_transmission(const R& r, cplx tau) {
  return std::log1p(-std::norm(cplx(r(tau))));
}

/// d/dτ log(1 - |r(τ)|²) at a circle point, by centred differences of step
/// h in the angle: dL/dτ = (dL/dθ) / (iτ).
template <CircleFunction R>
cplx log_transmission_derivative(const R& r, cplx tau, double h = 1e-5) {
  const double theta = std::arg(tau);
  const double up = log_transmission(r, std::polar(1.0, theta + h));
  const double down = log_transmission(r, std::polar(1.0, theta - h));
  return ((up - down) / (2.0 * h)) / (I * tau);
}

/// χ_k(z) = (1/2πi) ∫_{T_k}^{S_k} log[(1-|r(τ)|²)/(1-|r(S_k)|²)] dτ/(τ - z)
/// along the minor arc. z = S_k is allowed: the integrand's finite limit at
/// τ = S_k is the derivative of log(1-|r|²).
template <CircleFunction R>
cplx chi(int k, cplx z, const R& r, cplx S_k, double tol = 1e-10) {
  const double L_s = log_transmission(r, S_k);
  const bool at_endpoint = std::abs(z - S_k) < 1e-14;
  const cplx limit = at_endpoint ? log_transmission_derivative(r, S_k) : cplx{};
  const auto f = [&](cplx tau) -> cplx {
    const cplx d = tau - z;
    if (at_endpoint && std::abs(d) < 1e-7) return limit;
    return (log_transmission(r, tau) - L_s) / d;
  };
  return arc_integral(f, ArcSpec::minor(arc_anchor(k), S_k, tol)) / (2.0 * pi * I);
}

/// χ_j(S_j).
template <CircleFunction R>
cplx chi_at_saddle(int j, const R& r, cplx S_j, double tol = 1e-10) {
  return chi(j, S_j, r, S_j, tol);
}

/// δ(0) = exp(-(1/πi) ∫_{S_1}^{S_2} log(1-|r(τ)|²) dτ/τ) over the minor arc.
template <CircleFunction R>
double delta0(const R& r, cplx S1, cplx S2, double tol = 1e-10) {
  const auto f = [&](cplx tau) -> cplx { return log_transmission(r, tau) / tau; };
  const cplx exponent = -arc_integral(f, ArcSpec::minor(S1, S2, tol)) / (pi * I);
  const cplx value = std::exp(exponent);
  if (std::abs(value.imag()) > 1e-8) {
    throw NumericError("delta0: imaginary residue " + std::to_string(value.imag()));
  }
  return value.real();
}

/// δ̂_j(S_j) = ∏_{k≠j} δ_k(S_j), in closed form
///
///   exp((1/2πi) [(-1)^j ∫_{e^{-iπ/4}}^{S_{3-j}} - ∫_{S_3}^{S_4}]
///       log(1-|r(τ)|²) dτ/(τ - S_j)),
///
/// both integrals along minor arcs. j ∈ {1, 2}.
template <CircleFunction R>
cplx delta_hat(int j, const R& r, const Saddles& s, double tol = 1e-10) {
  const cplx Sj = s.S[static_cast<std::size_t>(j - 1)];
  const cplx other = s.S[static_cast<std::size_t>(2 - j)];
  const auto f = [&](cplx tau) -> cplx { return log_transmission(r, tau) / (tau - Sj); };
  const cplx near_arc = arc_integral(f, ArcSpec::minor(e_minus_i_pi_4, other, tol));
  const cplx far_arc = arc_integral(f, ArcSpec::minor(s.S[2], s.S[3], tol));
  const double sign = (j % 2 == 0) ? 1.0 : -1.0;  // (-1)^j
  return std::exp((sign * near_arc - far_arc) / (2.0 * pi * I));
}

/// δ_k(z) = exp((-1)^{k-1} (iν_k ℓ_k(z) + χ_k(z))), k ∈ {1, ..., 4}, with
/// ℓ_k(z) = ∫_{T_k}^{S_k} dτ/(τ - z) continued along the arc. z must not lie
/// on the arc from T_k to S_k.
template <CircleFunction R>
cplx delta_factor(int k, cplx z, const R& r, const Saddles& s, double tol = 1e-10) {
  const cplx Sk = s.S[static_cast<std::size_t>(k - 1)];
  const double nu_k = nu(r(Sk));
  const cplx ell = path_continuous_log_ratio(z, ArcSpec::minor(arc_anchor(k), Sk, tol));
  const cplx chi_k = chi(k, z, r, Sk, tol);
  return std::exp(parity_sign(k) * (I * nu_k * ell + chi_k));
}

/// δ(z) = exp(-(1/2πi) [∫_{S_1}^{S_2} + ∫_{S_3}^{S_4}] log(1-|r(τ)|²) dτ/(τ - z))
/// by direct quadrature, for z off the circle.
template <CircleFunction R>
cplx delta_direct(cplx z, const R& r, const Saddles& s, double tol = 1e-10) {
  const auto f = [&](cplx tau) -> cplx { return log_transmission(r, tau) / (tau - z); };
  const cplx total = arc_integral(f, ArcSpec::minor(s.S[0], s.S[1], tol)) +
                     arc_integral(f, ArcSpec::minor(s.S[2], s.S[3], tol));
  return std::exp(-total / (2.0 * pi * I));
}

// ---------------------------------------------------------------------------
// t-dependent scales
// ---------------------------------------------------------------------------

struct BetaD {
  cplx beta;
  cplx D;
};

/// β_j and D_j = β_j / (S_j - T_j), j ∈ {1, 2}. Requires |n| < 2t.
inline BetaD beta_D(int j, double n, double t) {
  const double disc = 4.0 * t * t - n * n;
  if (!(t > 0.0) || !(disc > 0.0)) {
    throw DomainError("beta_D: degenerate at |n| >= 2t");
  }
  const double v = n / t;
  const double w = std::pow(disc, 0.25);
  const cplx A = 0.5 * cplx{std::sqrt(2.0 + v), -std::sqrt(2.0 - v)};
  BetaD out;
  if (j == 1) {
    out.beta = -e_plus_i_pi_4 * A / (2.0 * w);
    out.D = -I * A / (2.0 * w * (A - 1.0));
  } else {
    const cplx Ab = std::conj(A);
    out.beta = e_plus_i_pi_4 * Ab / (2.0 * w);
    out.D = I * Ab / (2.0 * w * (Ab - 1.0));
  }
  if (!(out.D.real() > 0.0)) {
    throw NumericError("beta_D: Re D_" + std::to_string(j) + " <= 0");
  }
  return out;
}

/// M_j = √(2π) exp((-1)^j 3πi/4 - πν_j/2) / (conj(r(S_j)) Γ((-1)^{j-1} iν_j)),
/// and 0 when r(S_j) = 0.
template <class Gamma = GammaFn>
cplx M(int j, cplx r_at_saddle, double nu_j, const Gamma& gamma = {}) {
  if (r_at_saddle == cplx{}) return {};
  if (!(std::norm(r_at_saddle) < 1.0)) throw DomainError("M: |r| >= 1");
  const double sj = (j % 2 == 0) ? 1.0 : -1.0;
  const cplx num = std::sqrt(2.0 * pi) * std::exp(cplx{-0.5 * pi * nu_j, sj * 0.75 * pi});
  return num / (std::conj(r_at_saddle) * cplx(gamma(parity_sign(j) * I * nu_j)));
}

// ---------------------------------------------------------------------------
// Frame at a fixed ray v = n/t
// ---------------------------------------------------------------------------

/// All ray-dependent quantities at v = n/t. Index 0 holds j = 1.
struct SaddleFrame {
  double v = 0.0;
  cplx A;
  std::array<cplx, 4> S;
  std::array<cplx, 2> r_at;
  std::array<double, 2> nu{};
  std::array<cplx, 2> chi;
  std::array<cplx, 2> delta_hat;
  std::array<cplx, 2> M;
  double delta0 = 1.0;

  [[nodiscard]] Saddles saddles() const { return Saddles{A, S}; }
};

template <CircleFunction R, class Gamma = GammaFn>
SaddleFrame make_frame(double v, const R& r, const RegionGuard& guard = {},
                       double tol = 1e-10, const Gamma& gamma = {}) {
  const Saddles s = saddle_points(v, guard);
  SaddleFrame f;
  f.v = v;
  f.A = s.A;
  f.S = s.S;
  for (int j = 1; j <= 2; ++j) {
    const auto i = static_cast<std::size_t>(j - 1);
    f.r_at[i] = r(s.S[i]);
    f.nu[i] = nu(f.r_at[i]);
    f.chi[i] = chi_at_saddle(j, r, s.S[i], tol);
    f.delta_hat[i] = delta_hat(j, r, s, tol);
    f.M[i] = M(j, f.r_at[i], f.nu[i], gamma);
  }
  f.delta0 = delta0(r, s.S[0], s.S[1], tol);
  return f;
}

namespace detail {

// δ_j⁰ split as exp(i·angle) · rest, with angle = n arg S_j + 2 (Im S_j)² t
// carried in extended precision and reduced mod 2π.
struct DeltaJ0Parts {
  long double angle;
  cplx rest;
};

inline DeltaJ0Parts delta_j0_parts(int j, double n, double t, const SaddleFrame& f) {
  const auto i = static_cast<std::size_t>(j - 1);
  const cplx Sj = f.S[i];
  const long double theta = std::arg(Sj);
  const long double a = Sj.imag();
  const long double two_pi = 2.0L * 3.141592653589793238462643383279502884L;
  long double angle = static_cast<long double>(n) * theta +
                      2.0L * a * a * static_cast<long double>(t);
  angle = std::remainder(angle, two_pi);

  const double sigma = parity_sign(j);
  const BetaD bd = beta_D(j, n, t);
  const cplx rest = branched_power(bd.D, sigma * I * f.nu[i]) *
                    std::exp(sigma * f.chi[i]) * f.delta_hat[i];
  return {angle, rest};
}

}  // namespace detail

/// δ_j⁰ = S_j^n e^{-it(S_j - 1/S_j)²/2} D_j^{(-1)^{j-1} iν_j} e^{(-1)^{j-1}χ_j(S_j)} δ̂_j(S_j).
///
/// n is taken as real; S_j^n means exp(i n arg S_j), which is the ordinary
/// power for integer n.
inline cplx delta_j0(int j, double n, double t, const SaddleFrame& f) {
  const auto parts = detail::delta_j0_parts(j, n, t, f);
  return std::polar(1.0, static_cast<double>(parts.angle)) * parts.rest;
}

/// j-th summand -2δ(0) β_j (δ_j⁰)^{-2} S_j^{-2} M_j at (n, t) on the
/// frame's ray.
inline cplx leading_summand(int j, double n, double t, const SaddleFrame& f) {
  const auto i = static_cast<std::size_t>(j - 1);
  if (f.M[i] == cplx{}) return {};
  const auto parts = detail::delta_j0_parts(j, n, t, f);
  const cplx osc = std::polar(1.0, static_cast<double>(std::remainder(
                                       -2.0L * parts.angle,
                                       2.0L * 3.141592653589793238462643383279502884L)));
  const BetaD bd = beta_D(j, n, t);
  const cplx Sj = f.S[i];
  return -2.0 * f.delta0 * bd.beta * osc / (parts.rest * parts.rest) /
         (Sj * Sj) * f.M[i];
}

/// Leading term from a frame already built on the ray v = n/t.
inline cplx leading_term(double n, double t, const SaddleFrame& f) {
  return leading_summand(1, n, t, f) + leading_summand(2, n, t, f);
}

/// Leading term at lattice point (n, t) from the time-zero reflection
/// coefficient r.
template <CircleFunction R, class Gamma = GammaFn>
cplx leading_term(long n, double t, const R& r, const RegionGuard& guard = {},
                  double tol = 1e-10, const Gamma& gamma = {}) {
  if (!(t > 0.0)) throw DomainError("leading_term: t must be positive");
  const double nd = static_cast<double>(n);
  const SaddleFrame f = make_frame(nd / t, r, guard, tol, gamma);
  return leading_term(nd, t, f);
}

inline cplx leading_term(long n, double t, const ScatteringData& data,
                         const RegionGuard& guard = {}, double tol = 1e-10) {
  if (data.snapshot_time() != 0.0) {
    throw DomainError("leading_term: scattering data must be taken at t = 0");
  }
  return leading_term(n, t, [&data](cplx z) { return data.r(z); }, guard, tol);
}

// ---------------------------------------------------------------------------
// Zakharov–Manakov form of each summand
// ---------------------------------------------------------------------------

/// C t^{-1/2} exp(-i(p t + q log t)) equals the j-th summand on the frame's
/// ray for every t > 0.
struct AsymptoticTerm {
  int j = 1;
  cplx C;
  double p = 0.0;
  double q = 0.0;

  [[nodiscard]] cplx evaluate(double t) const {
    const long double ph = -(static_cast<long double>(p) * t +
                             static_cast<long double>(q) * std::log(static_cast<long double>(t)));
    const double reduced = static_cast<double>(
        std::remainder(ph, 2.0L * 3.141592653589793238462643383279502884L));
    return C / std::sqrt(t) * std::polar(1.0, reduced);
  }
};

/// Factors the j-th summand as C_j t^{-1/2} e^{-i(p_j t + q_j log t)}:
/// p_j = 2(v θ_j + 2 a_j²) with θ_j = arg S_j, a_j = Im S_j, and
/// q_j = -(-1)^{j-1} ν_j. C_j is the summand's value at t = 1, n = v, with
/// its oscillatory factor removed.
inline AsymptoticTerm phase_decomposition(int j, const SaddleFrame& f) {
  const auto i = static_cast<std::size_t>(j - 1);
  const cplx Sj = f.S[i];
  AsymptoticTerm term;
  term.j = j;
  term.p = 2.0 * (f.v * std::arg(Sj) + 2.0 * Sj.imag() * Sj.imag());
  term.q = -parity_sign(j) * f.nu[i];
  if (f.M[i] == cplx{}) {
    term.C = {};
    return term;
  }
  // At t = 1 the oscillatory factor is exp(-i p); log t = 0.
  term.C = leading_summand(j, f.v, 1.0, f) * std::polar(1.0, term.p);
  return term;
}

}  // namespace aldnls
