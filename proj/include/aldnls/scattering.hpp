#pragma once

// Direct scattering for X_{n+1} = [[z, conj(R_n)], [R_n, 1/z]] X_n on |z| = 1.

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "aldnls/errors.hpp"
#include "aldnls/lattice.hpp"
#include "aldnls/specfun.hpp"

namespace aldnls {

/// Row-major 2x2 complex matrix [[m00, m01], [m10, m11]].
struct TransferMatrix {
  std::array<cplx, 4> m{};

  [[nodiscard]] cplx operator()(int row, int col) const { return m[2 * row + col]; }
  [[nodiscard]] cplx det() const { return m[0] * m[3] - m[1] * m[2]; }
};

inline TransferMatrix transfer_matrix(cplx R_n, cplx z) {
  if (z == cplx{}) throw DomainError("transfer_matrix: z = 0");
  return TransferMatrix{{z, std::conj(R_n), R_n, 1.0 / z}};
}

struct ScatteringCoeffs {
  cplx a;
  cplx b;
};

/// a(z), b(z) for window-supported data.
///
/// φ starts as z^{N⁻}(1, 0)ᵀ at the left edge N⁻ and is carried through every
/// transfer matrix to N⁺ + 1. Past the support ψ̄_n = zⁿ(1, 0)ᵀ and
/// ψ_n = z⁻ⁿ(0, 1)ᵀ, so a = z^{-(N⁺+1)} φ₁ and b = z^{N⁺+1} φ₂. The common
/// factor z^{N⁻} is applied at the end as a phase. With this normalization
/// |a|² - |b|² = c₋∞ on |z| = 1; dividing both by √c₋∞ gives the
/// alternative |a|² - |b|² = 1 and leaves r = b/a unchanged.
inline ScatteringCoeffs scattering_coeffs(const LatticeState& state, cplx z) {
  if (state.values.empty()) return {cplx{1.0, 0.0}, cplx{}};
  cplx u1{1.0, 0.0};
  cplx u2{};
  const cplx zinv = 1.0 / z;
  for (const cplx& R : state.values) {
    const cplx n1 = z * u1 + std::conj(R) * u2;
    const cplx n2 = R * u1 + zinv * u2;
    u1 = n1;
    u2 = n2;
  }
  const double theta = std::arg(z);
  const double lo = static_cast<double>(state.first());
  const double hi = static_cast<double>(state.last()) + 1.0;
  const double mod = std::abs(z);
  // For |z| = 1 this is z^{N⁻ - N⁺ - 1} and z^{N⁻ + N⁺ + 1} as pure phases.
  const cplx pa = std::polar(std::pow(mod, lo - hi), (lo - hi) * theta);
  const cplx pb = std::polar(std::pow(mod, lo + hi), (lo + hi) * theta);
  return {pa * u1, pb * u2};
}

/// r(z) = b(z)/a(z). Throws NumericError if |r| >= 1.
inline cplx reflection(const LatticeState& state, cplx z) {
  const ScatteringCoeffs c = scattering_coeffs(state, z);
  const cplx r = c.b / c.a;
  if (!(std::abs(r) < 1.0)) {
    throw NumericError("reflection: |r(z)| = " + std::to_string(std::abs(r)) +
                       " >= 1");
  }
  return r;
}

/// r(z, t) = r(z) exp(i t (z - 1/z)²). On |z| = 1, (z - 1/z)² = -4 (Im z)².
inline cplx evolve_reflection(cplx r0, cplx z, double t) {
  const double s = z.imag();
  return r0 * std::polar(1.0, -4.0 * s * s * t);
}

/// Scattering data of a lattice snapshot. Evolved snapshots are truncated
/// where the tail drops below `tail_tolerance` before extraction.
class ScatteringData {
 public:
  explicit ScatteringData(const LatticeState& snapshot, double tail_tolerance = 0.0)
      : source_(trim_tails(snapshot, tail_tolerance)) {
    const ValidationReport rep = validate_initial(source_);
    if (!rep.ok) throw DomainError("ScatteringData: " + rep.message);
    c_inf_ = rep.c_minus_inf;
  }

  [[nodiscard]] const LatticeState& source() const { return source_; }
  [[nodiscard]] double c_inf() const { return c_inf_; }
  [[nodiscard]] double snapshot_time() const { return source_.time; }

  [[nodiscard]] ScatteringCoeffs coeffs(cplx z) const {
    return scattering_coeffs(source_, z);
  }
  [[nodiscard]] cplx r(cplx z) const { return reflection(source_, z); }
  cplx operator()(cplx z) const { return r(z); }

 private:
  LatticeState source_;
  double c_inf_ = 1.0;
};

}  // namespace aldnls
