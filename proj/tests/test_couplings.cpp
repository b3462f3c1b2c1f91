#include <cmath>
#include <vector>

#include "doctest.h"
#include "fracchain/couplings.hpp"
#include "fracchain/stats.hpp"

using namespace fc;

namespace {

// J(r) = sum_{n <= T/2} C(2n, n+r) 4^-n * Cat(n-1) 2^-(2n-1), computed in log space
double diamond_s0_oracle(long r, long T) {
  double acc = 0.0;
  for (long n = std::max(1L, r); n <= T / 2; ++n) {
    double lp = std::lgamma(2.0 * n + 1) - std::lgamma(n + r + 1.0) - std::lgamma(n - r + 1.0) - 2.0 * n * std::log(2.0);
    double lcat = std::lgamma(2.0 * n - 1) - std::lgamma(n + 0.0) - std::lgamma(n + 1.0);  // Catalan(n-1)
    double lg = lcat - (2.0 * n - 1) * std::log(2.0);
    acc += std::exp(lp + lg);
  }
  return acc;
}

}  // namespace

TEST_CASE("spitzer closed form") {
  CouplingSequence J = spitzer_couplings(2);
  CHECK(J.values[1] == doctest::Approx(2.0 / (3.0 * M_PI)).epsilon(1e-14));
  CHECK(J.values[1] == doctest::Approx(0.2122066).epsilon(1e-7));
  REQUIRE(J.mass_at_zero.has_value());
  CHECK(*J.mass_at_zero == doctest::Approx(0.3633802).epsilon(1e-7));
  CouplingSequence big = spitzer_couplings(1000);
  CHECK(std::fabs(big.captured_mass() + big.truncation_error - 1.0) < 1e-12);
  CHECK_THROWS_AS(spitzer_couplings(0), Error);
  CHECK(big.J(5000) == doctest::Approx(2.0 / (M_PI * (4.0 * 5000 * 5000 - 1))));
}

TEST_CASE("diamond DP at s = 0 against the Catalan oracle") {
  const long T = 4096;
  BesselCouplingOptions opt;
  opt.tolerance = 1.0;
  CouplingSequence J = bessel_couplings(0.0, 8, T, WalkMethod::dp, opt);
  for (long r = 0; r <= 8; ++r) CHECK(std::fabs(J.values[r] - diamond_s0_oracle(r, T)) < 1e-12);
  CouplingSequence sp = spitzer_couplings(8);
  for (long r = 0; r <= 8; ++r) {
    CHECK(J.values[r] <= sp.values[r] + 1e-15);
    CHECK(sp.values[r] - J.values[r] <= J.pointwise_error);
  }
}

TEST_CASE("walk couplings are normalized within the truncation budget") {
  BesselCouplingOptions opt;
  opt.tolerance = 1.0;
  for (double s : {0.0, 0.3, 0.8}) {
    CouplingSequence J = bessel_couplings(s, 128, 8192, WalkMethod::dp, opt);
    double m = J.captured_mass();
    CHECK(m <= 1.0 + 1e-9);
    CHECK(m + J.truncation_error >= 1.0 - 1e-9);
    for (long r = 2; r < 128; ++r) CHECK(J.values[r + 1] <= J.values[r]);
    CouplingSequence G = grid_bessel_couplings(1, s, 128, 8192, opt);
    CHECK(G.captured_mass() <= 1.0 + 1e-9);
    CHECK(G.captured_mass() + G.truncation_error >= 1.0 - 1e-9);
  }
}

TEST_CASE("horizon too small is reported") {
  BesselCouplingOptions opt;
  opt.tolerance = 1e-12;
  CHECK_THROWS_AS(bessel_couplings(0.5, 16, 64, WalkMethod::dp, opt), Error);
  CHECK_THROWS_AS(bessel_couplings(1.2, 16, 64, WalkMethod::dp, opt), Error);
  long T = default_horizon(0.0, 1e-3);
  CHECK(T % 2 == 0);
  opt.tolerance = 1e-3;
  CHECK_NOTHROW(bessel_couplings(0.0, 16, T, WalkMethod::dp, opt));
}

TEST_CASE("monte carlo couplings agree with spitzer") {
  BesselCouplingOptions opt;
  opt.seed = 3;
  opt.n_walks = 200000;
  opt.tolerance = 1.0;
  CouplingSequence mc = bessel_couplings(0.0, 5, 20000, WalkMethod::monte_carlo, opt);
  CouplingSequence sp = spitzer_couplings(5);
  for (long r = 0; r <= 5; ++r) CHECK(std::fabs(mc.values[r] - sp.values[r]) <= 4.0 * mc.stderrs[r] + mc.truncation_error);
  CouplingSequence again = bessel_couplings(0.0, 5, 20000, WalkMethod::monte_carlo, opt);
  CHECK(again.values == mc.values);
}

TEST_CASE("fourier couplings") {
  CouplingSequence J = fourier_couplings(1.0, 8);
  CHECK(std::fabs(J.values[1] - 0.5) < 1e-10);
  CHECK(std::fabs(J.values[3]) < 1e-10);
  for (long r = 2; r <= 8; ++r) CHECK(std::fabs(J.values[r]) < 1e-8);
  CouplingSequence F = fourier_couplings(0.75, 64);
  for (long r = 1; r <= 64; ++r) {
    CHECK(F.values[r] > 0.0);
    CHECK(F.values[r] == doctest::Approx(fourier_coupling_exact(0.75, r)).epsilon(1e-8));
  }
}

TEST_CASE("fourier tail exponent is 2u + 1") {
  CouplingSequence F = fourier_couplings(0.75, 512);
  TailFit f = tail_exponent_fit(F, 32, 512);
  CHECK(std::fabs(f.exponent - 2.5) < 0.02);
  CHECK(std::fabs(f.exponent - 3.5) > 0.5);
}

TEST_CASE("power law couplings and tail fits") {
  CouplingSequence J = power_law_couplings(2.0, 4);
  CHECK(J.values[2] == 0.25);
  CHECK(power_law_couplings(2.5, 3).values[1] == 1.0);
  TailFit f = tail_exponent_fit(power_law_couplings(3.5, 256), 16, 256);
  CHECK(std::fabs(f.exponent - 3.5) < 1e-6);
  CHECK(f.residual >= 0.0);
  TailFit g = tail_exponent_fit(power_law_couplings(2.5, 256), 16, 256);
  CHECK(std::fabs(g.exponent - 2.5) < 1e-6);
  TailFit sp = tail_exponent_fit(spitzer_couplings(128), 8, 128);
  CHECK(std::fabs(sp.exponent - 2.0) < 0.05);
  CHECK_THROWS_AS(tail_exponent_fit(J, 1, 4), Error);
  CHECK_THROWS_AS(power_law_couplings(1.0, 4), Error);
}

TEST_CASE("bessel tail at s = 0.8") {
  BesselCouplingOptions opt;
  opt.tail_completion = true;
  opt.tolerance = 1.0;
  CouplingSequence J = bessel_couplings(0.8, 256, 1L << 16, WalkMethod::dp, opt);
  CHECK(std::fabs(tail_exponent_fit(J, 16, 256).exponent - 2.8) < 0.1);
}
