#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "aldnls/scattering.hpp"

using namespace aldnls;

namespace {

LatticeState random_state(std::mt19937_64& eng, long offset, int sites, double amp) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LatticeState s{offset, {}, 0.0};
  for (int k = 0; k < sites; ++k) s.values.push_back(amp * cplx{u(eng), u(eng)} / std::sqrt(2.0));
  return s;
}

}  // namespace

TEST(TransferMatrix, Examples) {
  const TransferMatrix zero = transfer_matrix(0.0, 1.0);
  EXPECT_EQ(zero(0, 0), cplx(1.0));
  EXPECT_EQ(zero(0, 1), cplx(0.0));
  EXPECT_EQ(zero(1, 0), cplx(0.0));
  EXPECT_EQ(zero(1, 1), cplx(1.0));

  const TransferMatrix m = transfer_matrix(cplx{0.5, 0.0}, I);
  EXPECT_EQ(m(0, 0), I);
  EXPECT_EQ(m(0, 1), cplx(0.5));
  EXPECT_EQ(m(1, 0), cplx(0.5));
  EXPECT_LT(std::abs(m(1, 1) + I), 1e-16);
  EXPECT_LT(std::abs(m.det() - 0.75), 1e-15);

  EXPECT_THROW(transfer_matrix(0.1, 0.0), DomainError);
}

TEST(TransferMatrix, DeterminantIsOneMinusModulusSquared) {
  std::mt19937_64 eng(5);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  std::uniform_real_distribution<double> th(-pi, pi);
  for (int k = 0; k < 50; ++k) {
    const cplx R{u(eng), u(eng)};
    const cplx z = std::polar(1.0, th(eng));
    EXPECT_LT(std::abs(transfer_matrix(R, z).det() - (1.0 - std::norm(R))), 1e-15);
  }
}

TEST(Coefficients, ZeroDataIsReflectionless) {
  const LatticeState s{-4, std::vector<cplx>(9), 0.0};
  for (double th : {0.0, 0.4, 2.0, -1.1}) {
    const auto c = scattering_coeffs(s, std::polar(1.0, th));
    EXPECT_LT(std::abs(c.a - 1.0), 1e-15);
    EXPECT_EQ(c.b, cplx{});
  }
  EXPECT_EQ(scattering_coeffs(LatticeState{}, I).a, cplx(1.0));
}

TEST(Coefficients, SingleSite) {
  for (const cplx q : {cplx{0.4, 0.0}, cplx{0.0, 0.4}, cplx{-0.3, 0.6}}) {
    for (double th : {0.1, 1.3, -2.8}) {
      const cplx z = std::polar(1.0, th);
      const auto c = scattering_coeffs(LatticeState::single_site(q), z);
      EXPECT_LT(std::abs(c.a - 1.0), 1e-15);
      EXPECT_LT(std::abs(c.b - q * z), 1e-15);
      EXPECT_LT(std::abs(reflection(LatticeState::single_site(q), z) - q * z), 1e-15);
    }
  }
}

TEST(Coefficients, SingleSiteAwayFromOrigin) {
  // A site at m contributes q z^{2m+1}.
  const cplx q{0.2, -0.1};
  const cplx z = std::polar(1.0, 0.37);
  for (long m : {-3L, 2L, 5L}) {
    const auto c = scattering_coeffs(LatticeState::single_site(q, m), z);
    EXPECT_LT(std::abs(c.a - 1.0), 1e-14);
    EXPECT_LT(std::abs(c.b - q * std::pow(z, static_cast<double>(2 * m + 1))), 1e-14);
  }
}

TEST(Coefficients, LinearLimitIsFourierSum) {
  std::mt19937_64 eng(8);
  const LatticeState s = random_state(eng, -2, 5, 1e-5);
  const cplx z = std::polar(1.0, 0.9);
  cplx sum{};
  for (long m = s.first(); m <= s.last(); ++m) {
    sum += s.at(m) * std::pow(z, static_cast<double>(2 * m + 1));
  }
  EXPECT_LT(std::abs(scattering_coeffs(s, z).b - sum), 1e-13);
}

TEST(Coefficients, UnitarityOnTheCircle) {
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> th(-pi, pi);
  for (int trial = 0; trial < 20; ++trial) {
    const LatticeState s = random_state(eng, -2, 5, 0.9);
    const double c = c_minus_inf(s);
    for (int k = 0; k < 16; ++k) {
      const auto ab = scattering_coeffs(s, std::polar(1.0, th(eng)));
      EXPECT_LE(std::abs(std::norm(ab.a) - std::norm(ab.b) - c), 1e-10 * (1.0 + c));
    }
  }
}

TEST(Reflection, OddInZ) {
  std::mt19937_64 eng(13);
  std::uniform_real_distribution<double> th(-pi, pi);
  for (int trial = 0; trial < 20; ++trial) {
    const LatticeState s = random_state(eng, -3, 7, 0.5);
    const cplx z = std::polar(1.0, th(eng));
    EXPECT_LE(std::abs(reflection(s, -z) + reflection(s, z)), 1e-12);
    EXPECT_LT(std::abs(reflection(s, z)), 1.0);
  }
}

TEST(Evolve, Examples) {
  const cplx r0{0.3, 0.2};
  EXPECT_EQ(evolve_reflection(r0, std::polar(1.0, 0.7), 0.0), r0);
  EXPECT_LT(std::abs(evolve_reflection(r0, 1.0, 123.0) - r0), 1e-16);
  for (double t : {0.5, 3.0, 17.25}) {
    EXPECT_LT(std::abs(evolve_reflection(r0, I, t) - r0 * std::polar(1.0, -4.0 * t)), 1e-14);
    EXPECT_NEAR(std::abs(evolve_reflection(r0, std::polar(1.0, 1.9), t)), std::abs(r0), 1e-15);
  }
}

TEST(Evolve, AgreesWithTransformOfEvolvedLattice) {
  const LatticeState s{-1, {{0.2, 0.1}, {0.0, 0.4}, {-0.1, 0.2}}, 0.0};
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  const double t = 3.0;
  const LatticeState later = integrate(s, cfg, t);
  const ScatteringData data0(s);
  const ScatteringData data_t(later, 1e-15);
  EXPECT_NEAR(data_t.snapshot_time(), t, 0.0);
  for (double th : {0.3, 1.1, 2.0, -0.6, -2.5}) {
    const cplx z = std::polar(1.0, th);
    EXPECT_LE(std::abs(data_t.r(z) - evolve_reflection(data0.r(z), z, t)), 1e-6) << th;
  }
}

TEST(ScatteringData, Accessors) {
  const LatticeState s = LatticeState::single_site(cplx{0.0, 0.4});
  const ScatteringData d(s);
  EXPECT_NEAR(d.c_inf(), 0.84, 1e-15);
  EXPECT_EQ(d.snapshot_time(), 0.0);
  const cplx z = std::polar(1.0, 0.5);
  EXPECT_EQ(d(z), d.r(z));
  EXPECT_THROW(ScatteringData(LatticeState::single_site(1.2)), DomainError);
}
