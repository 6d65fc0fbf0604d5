#pragma once

// Complex special functions and unit-circle contour quadrature.
//
// Everything here is a pure function of its arguments.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <concepts>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>

#include "aldnls/errors.hpp"

namespace aldnls {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// ---------------------------------------------------------------------------
// Gamma function
// ---------------------------------------------------------------------------

namespace detail {

// Lanczos approximation, g = 7, nine terms. Relative error is ~1e-15
// uniformly in Re w >= 1/2.
inline constexpr double lanczos_g = 7.0;
inline constexpr std::array<double, 9> lanczos_coef{
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

inline cplx gamma_right_half_plane(cplx w) {
  w -= 1.0;
  cplx series = lanczos_coef[0];
  for (std::size_t k = 1; k < lanczos_coef.size(); ++k) {
    series += lanczos_coef[k] / (w + static_cast<double>(k));
  }
  const cplx t = w + lanczos_g + 0.5;
  // t^(w+1/2) e^{-t} assembled in log space to stay finite for large |Im w|.
  return std::sqrt(2.0 * pi) * std::exp((w + 0.5) * std::log(t) - t) * series;
}

}  // namespace detail

/// Gamma function of a complex argument.
///
/// Reflection Γ(w)Γ(1-w) = π / sin(πw) is used for Re w < 1/2. Throws
/// DomainError within 1e-14 of a pole (w = 0, -1, -2, ...).
inline cplx gamma_complex(cplx w) {
  if (w.real() <= 0.5) {
    const double k = std::round(-w.real());
    if (k >= 0.0 && std::abs(w + k) < 1e-14) {
      throw DomainError("gamma_complex: pole at w = " + std::to_string(-k));
    }
  }
  if (w.real() < 0.5) {
    return pi / (std::sin(pi * w) * detail::gamma_right_half_plane(1.0 - w));
  }
  return detail::gamma_right_half_plane(w);
}

/// Callable wrapper so that callers can substitute another Γ implementation.
struct GammaFn {
  cplx operator()(cplx w) const { return gamma_complex(w); }
};

// ---------------------------------------------------------------------------
// Principal-branch powers
// ---------------------------------------------------------------------------

/// base^exponent with the logarithm cut along the negative real axis.
struct BranchedPower {
  cplx base;
  cplx exponent;
};

namespace detail {

inline bool is_integer_exponent(cplx e) {
  return e.imag() == 0.0 && std::nearbyint(e.real()) == e.real() &&
         std::abs(e.real()) < 9.0e15;
}

inline cplx integer_power(cplx base, long long m) {
  const bool invert = m < 0;
  unsigned long long k = invert ? static_cast<unsigned long long>(-m)
                                : static_cast<unsigned long long>(m);
  cplx acc{1.0, 0.0};
  cplx sq = base;
  while (k != 0) {
    if (k & 1ULL) acc *= sq;
    sq *= sq;
    k >>= 1U;
  }
  return invert ? 1.0 / acc : acc;
}

}  // namespace detail

/// exp(exponent · Log base), Log principal with Im in (-π, π].
///
/// Integer exponents are evaluated by repeated multiplication and are
/// allowed on the negative real axis; non-integer exponents are not.
inline cplx branched_power(const BranchedPower& p) {
  if (p.base == cplx{0.0, 0.0}) {
    throw DomainError("branched_power: base is zero");
  }
  if (detail::is_integer_exponent(p.exponent)) {
    return detail::integer_power(p.base,
                                 static_cast<long long>(p.exponent.real()));
  }
  if (p.base.imag() == 0.0 && p.base.real() < 0.0) {
    throw DomainError("branched_power: base lies on the negative real cut");
  }
  return std::exp(p.exponent * std::log(p.base));
}

inline cplx branched_power(cplx base, cplx exponent) {
  return branched_power(BranchedPower{base, exponent});
}

// ---------------------------------------------------------------------------
// Arcs of the unit circle
// ---------------------------------------------------------------------------

/// Arc τ = e^{iθ}, θ running from start_angle to end_angle (the sign of the
/// sweep fixes the orientation). minor() builds the shorter arc between two
/// circle points.
struct ArcSpec {
  double start_angle = 0.0;
  double end_angle = 0.0;
  double tolerance = 1e-10;
  int max_depth = 30;

  [[nodiscard]] double sweep() const { return end_angle - start_angle; }
  [[nodiscard]] cplx start() const { return std::polar(1.0, start_angle); }
  [[nodiscard]] cplx end() const { return std::polar(1.0, end_angle); }

  /// Signed angular difference arg(b) - arg(a) reduced to (-π, π];
  /// counterclockwise when positive.
  static double minor_sweep(cplx a, cplx b) {
    return std::remainder(std::arg(b) - std::arg(a), 2.0 * pi);
  }

  static ArcSpec minor(cplx a, cplx b, double tolerance = 1e-10,
                       int max_depth = 30) {
    const double sweep = minor_sweep(a, b);
    if (std::abs(std::abs(sweep) - pi) < 1e-12) {
      throw DomainError("ArcSpec::minor: endpoints are antipodal");
    }
    const double start = std::arg(a);
    return ArcSpec{start, start + sweep, tolerance, max_depth};
  }
};

template <class F>
concept CircleIntegrand = std::invocable<const F&, cplx> &&
    std::convertible_to<std::invoke_result_t<const F&, cplx>, cplx>;

namespace detail {

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> gk_x{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> gk_w{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> g_w{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class G>
std::pair<cplx, double> gauss_kronrod_15(const G& g, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const cplx fc = g(c);
  cplx kronrod = gk_w[7] * fc;
  cplx gauss = g_w[3] * fc;
  for (std::size_t k = 0; k < 7; ++k) {
    const cplx f1 = g(c - h * gk_x[k]);
    const cplx f2 = g(c + h * gk_x[k]);
    kronrod += gk_w[k] * (f1 + f2);
    if (k % 2 == 1) gauss += g_w[k / 2] * (f1 + f2);
  }
  kronrod *= h;
  gauss *= h;
  return {kronrod, std::abs(kronrod - gauss)};
}

template <class G>
cplx adaptive_gk(const G& g, double a, double b, double tol_per_radian,
                 int depth, int max_depth) {
  const auto [value, err] = gauss_kronrod_15(g, a, b);
  const double local_tol = std::max(tol_per_radian * std::abs(b - a),
                                     64.0 * 2.2e-16 * std::abs(value));
  if (err <= local_tol) return value;
  if (depth >= max_depth) {
    throw ConvergenceError("arc_integral: refinement depth cap (" +
                           std::to_string(max_depth) + ") exceeded");
  }
  const double m = 0.5 * (a + b);
  return adaptive_gk(g, a, m, tol_per_radian, depth + 1, max_depth) +
         adaptive_gk(g, m, b, tol_per_radian, depth + 1, max_depth);
}

}  // namespace detail

/// ∫ f(τ) dτ along the arc, with τ = e^{iθ} and dτ = iτ dθ.
///
/// Adaptive Gauss–Kronrod on θ with interval halving. The estimated error
/// budget is spread proportionally to arc length. f is never evaluated at
/// the arc endpoints.
template <CircleIntegrand F>
cplx arc_integral(const F& f, const ArcSpec& arc) {
  const double sweep = arc.sweep();
  if (sweep == 0.0) return {0.0, 0.0};
  const auto g = [&f](double theta) {
    const cplx tau = std::polar(1.0, theta);
    return cplx(f(tau)) * I * tau;
  };
  return detail::adaptive_gk(g, arc.start_angle, arc.end_angle,
                             arc.tolerance / std::abs(sweep), 0,
                             arc.max_depth);
}

/// log(zB - pole) - log(zA - pole) continued along the arc from zA to zB.
///
/// The arc is cut into pieces of at most π/4; a piece is halved until its
/// principal log increment has |Δarg| < π/2. Throws DomainError if the pole
/// sits on the arc.
inline cplx path_continuous_log_ratio(cplx pole, const ArcSpec& arc) {
  const double sweep = arc.sweep();
  if (sweep == 0.0) return {0.0, 0.0};
  if (std::abs(std::abs(pole) - 1.0) < 1e-14) {
    const double rel = std::remainder(std::arg(pole) - arc.start_angle, 2.0 * pi);
    const double lo = std::min(0.0, sweep);
    const double hi = std::max(0.0, sweep);
    const auto on_arc = [&](double x) { return x >= lo - 1e-14 && x <= hi + 1e-14; };
    if (on_arc(rel) || on_arc(rel + 2.0 * pi) || on_arc(rel - 2.0 * pi)) {
      throw DomainError("path_continuous_log_ratio: pole lies on the path");
    }
  }

  // Recursive halving; depth 60 would mean a piece narrower than 1e-18 rad.
  const auto piece = [&pole](auto&& self, double a, double b, int depth) -> cplx {
    const cplx za = std::polar(1.0, a) - pole;
    const cplx zb = std::polar(1.0, b) - pole;
    if (za == cplx{0.0, 0.0} || zb == cplx{0.0, 0.0}) {
      throw DomainError("path_continuous_log_ratio: pole lies on the path");
    }
    const cplx inc = std::log(zb / za);
    if (std::abs(inc.imag()) < 0.5 * pi) return inc;
    if (depth > 60) {
      throw DomainError("path_continuous_log_ratio: pole too close to the path");
    }
    const double m = 0.5 * (a + b);
    return self(self, a, m, depth + 1) + self(self, m, b, depth + 1);
  };

  const int steps = static_cast<int>(std::ceil(std::abs(sweep) / (0.25 * pi)));
  cplx total{0.0, 0.0};
  for (int k = 0; k < steps; ++k) {
    const double a = arc.start_angle + sweep * k / steps;
    const double b = (k + 1 == steps) ? arc.end_angle
                                      : arc.start_angle + sweep * (k + 1) / steps;
    total += piece(piece, a, b, 0);
  }
  return total;
}

/// Overload on the minor arc from zA to zB.
inline cplx path_continuous_log_ratio(cplx zA, cplx zB, cplx pole) {
  if (zA == zB) return {0.0, 0.0};
  return path_continuous_log_ratio(pole, ArcSpec::minor(zA, zB));
}

}  // namespace aldnls
