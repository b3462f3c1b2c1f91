#include <cmath>
#include <vector>

#include "doctest.h"
#include "fracchain/bessel_walk.hpp"
#include "fracchain/couplings.hpp"
#include "fracchain/stats.hpp"

using namespace fc;

TEST_CASE("kernel values") {
  CHECK(kernel(0.0).up(5) == 0.5);
  CHECK(kernel(1.0).up(1) == 0.25);
  for (double s : {0.0, 0.3, 0.9}) {
    CHECK(kernel(s).up(0) == 1.0);
    for (long r = 1; r < 50; ++r) {
      CHECK(kernel(s).up(r) + kernel(s).down(r) == doctest::Approx(1.0));
      CHECK(kernel(s).up(r) == doctest::Approx(std::max(0.5 - s / (4.0 * r), 0.25)));
    }
  }
  CHECK_THROWS(kernel(-1.0));
}

TEST_CASE("first return law: small times and parity") {
  FirstReturnLaw a = first_return_law(0.0, 64);
  CHECK(a.g[2] == doctest::Approx(0.5));
  // s = 0: Catalan(n-1) / 2^(2n-1)
  CHECK(a.g[4] == doctest::Approx(1.0 / 8));
  CHECK(a.g[6] == doctest::Approx(2.0 / 32));
  FirstReturnLaw b = first_return_law(0.5, 64);
  CHECK(b.g[2] == doctest::Approx(0.625));
  // path 0 -> 1 -> 2 -> 1 -> 0 contributes Q(1,2) Q(2,1) Q(1,0)
  const double q1 = 0.5 - 0.5 / 4, q2 = 0.5 - 0.5 / 8;
  CHECK(b.g[4] == doctest::Approx(q1 * (1 - q2) * (1 - q1)));
  for (long n = 1; n <= 64; n += 2) CHECK(b.g[n] == 0.0);
  double tot = b.tail_mass;
  for (double x : b.g) tot += x;
  CHECK(tot == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS(first_return_law(0.5, 63));
}

TEST_CASE("tail mass decreases with the horizon") {
  double prev = 1.0;
  for (long T : {64L, 256L, 1024L, 4096L}) {
    double t = first_return_law(0.3, T).tail_mass;
    CHECK(t < prev);
    prev = t;
  }
}

TEST_CASE("first return plateau at s = 0.5") {
  FirstReturnLaw law = first_return_law(0.5, 1L << 16);
  double prev = 0.0;
  for (long n = 1L << 12; n <= (1L << 16); n *= 2) {
    double p = law.g[n] * std::pow(static_cast<double>(n), 1.75);
    if (prev > 0) CHECK(std::fabs(p / prev - 1.0) < 0.05);
    prev = p;
  }
}

TEST_CASE("return probability profile") {
  std::vector<double> u = return_probability_profile(0.0, 4096);
  CHECK(u[0] == 1.0);
  CHECK(u[2] == doctest::Approx(0.5));
  CHECK(u[3] == 0.0);
  std::vector<double> x, y;
  for (long t = 1024; t <= 4096; t += 256) {
    x.push_back(t);
    y.push_back(u[t]);
  }
  CHECK(std::fabs(power_law_fit(x, y).exponent - 0.5) < 0.05);
}

TEST_CASE("walk simulation is deterministic and respects parity") {
  WalkSpec w;
  w.s = 0.3;
  w.max_steps = 5000;
  w.seed = 9;
  for (int i = 0; i < 50; ++i) {
    Stream a(9, i), b(9, i);
    WalkOutcome x = simulate_walk(w, a), y = simulate_walk(w, b);
    CHECK(x.hit_time == y.hit_time);
    CHECK(x.hit_site == y.hit_site);
    if (!x.censored) CHECK(x.hit_time % 2 == 0);
  }
}

TEST_CASE("diamond return sites match spitzer") {
  WalkSpec w;
  w.max_steps = 100000;
  w.seed = 21;
  const long N = 400000;
  ReturnSiteHistogram h = simulate_returns(w, N, 16);
  CouplingSequence sp = spitzer_couplings(5);
  for (long k = -5; k <= 5; ++k) CHECK(std::fabs(h.frequency(k) - sp.J(k)) < 3.5 * h.stderr_of(k));
  ReturnSiteHistogram again = simulate_returns(w, N, 16);
  CHECK(again.signed_counts == h.signed_counts);
}

TEST_CASE("first-return histogram matches the DP law") {
  WalkSpec w;
  w.s = 0.5;
  w.max_steps = 200;
  w.seed = 4;
  const long N = 200000;
  ReturnSiteHistogram h = simulate_returns(w, N, 4);
  FirstReturnLaw law = first_return_law(0.5, 200);
  for (long n = 2; n <= 200; n += 2) {
    double expected = law.g[n] * N;
    if (expected < 100) continue;
    CHECK(std::fabs(h.time_counts[n] - expected) < 3.5 * std::sqrt(expected));
  }
}

TEST_CASE("grid walk return-site tail") {
  BesselCouplingOptions opt;
  opt.tail_completion = true;
  opt.tolerance = 1.0;
  CouplingSequence g = grid_bessel_couplings(1, 0.5, 256, 1L << 15, opt);
  CHECK(std::fabs(tail_exponent_fit(g, 16, 256).exponent - 2.5) < 0.15);
}
