#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numeric>

#include "doctest.h"
#include "fracchain/output.hpp"
#include "fracchain/parallel.hpp"
#include "fracchain/rng.hpp"
#include "fracchain/stats.hpp"

using namespace fc;

TEST_CASE("philox4x32-10 known answers") {
  // Random123 kat_vectors
  auto a = philox4x32_10({0, 0, 0, 0}, {0, 0});
  CHECK(a == Philox4x32Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  auto b = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(b == Philox4x32Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  auto c = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  CHECK(c == Philox4x32Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct") {
  Stream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  bool diff_c = false, diff_d = false;
  for (int i = 0; i < 100; ++i) {
    auto x = a.next_u32();
    CHECK(x == b.next_u32());
    diff_c |= x != c.next_u32();
    diff_d |= x != d.next_u32();
  }
  CHECK(diff_c);
  CHECK(diff_d);
}

TEST_CASE("uniform and normal moments") {
  Stream s(11, 0);
  const int N = 200000;
  double mu = 0, m2 = 0, nu = 0, n2 = 0, n4 = 0;
  for (int i = 0; i < N; ++i) {
    double u = s.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    mu += u;
    m2 += u * u;
    double z = s.normal();
    nu += z;
    n2 += z * z;
    n4 += z * z * z * z;
  }
  CHECK(std::fabs(mu / N - 0.5) < 5 * std::sqrt(1.0 / 12 / N));
  CHECK(std::fabs(m2 / N - 1.0 / 3) < 0.005);
  CHECK(std::fabs(nu / N) < 5 / std::sqrt(N));
  CHECK(std::fabs(n2 / N - 1.0) < 0.01);
  CHECK(std::fabs(n4 / N - 3.0) < 0.1);
}

TEST_CASE("ols and power-law fit recover exact lines") {
  std::vector<double> x, y, yp;
  for (int i = 1; i <= 20; ++i) {
    x.push_back(i);
    y.push_back(3.0 - 0.5 * i);
    yp.push_back(2.0 * std::pow(i, -1.75));
  }
  LinearFit f = ols(x, y);
  CHECK(f.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.max_abs_residual < 1e-12);
  PowerFit p = power_law_fit(x, yp);
  CHECK(p.exponent == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(p.constant == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(p.residual < 1e-10);
}

TEST_CASE("log-spaced integers") {
  auto v = log_spaced_integers(16, 256, 4, 8);
  CHECK(v.front() == 16);
  CHECK(v.back() == 256);
  CHECK(v.size() >= 8);
  for (std::size_t k = 1; k < v.size(); ++k) CHECK(v[k] > v[k - 1]);
  auto w = log_spaced_integers(3, 6, 4, 8);
  CHECK(w == std::vector<long>{3, 4, 5, 6});
}

TEST_CASE("kahan sum keeps small terms") {
  KahanSum k;
  k.add(1.0);
  for (int i = 0; i < 1000000; ++i) k.add(1e-16);
  CHECK(std::fabs(k.value() - (1.0 + 1e-10)) < 1e-15);
}

TEST_CASE("batch means of iid data") {
  Stream s(5, 0);
  std::vector<double> x(100000);
  for (auto& v : x) v = 2.0 + s.normal();
  BatchEstimate e = batch_means(x, 20);
  CHECK(e.batches == 20);
  CHECK(std::fabs(e.mean - 2.0) < 4 * e.stderr_);
  CHECK(e.stderr_ == doctest::Approx(1.0 / std::sqrt(100000.0)).epsilon(0.4));
  std::vector<double> ramp(1000);
  std::iota(ramp.begin(), ramp.end(), 0.0);
  CHECK(batch_means(ramp, 20).drifting);
  CHECK_THROWS_AS(batch_means(std::vector<double>(5, 1.0), 20), Error);
}

TEST_CASE("batch ratio of proportional series") {
  Stream s(6, 0);
  std::vector<double> a(20000), b(20000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    b[i] = 1.0 + 0.1 * s.normal();
    a[i] = 3.0 * b[i];
  }
  BatchEstimate r = batch_ratio(a, b, 20);
  CHECK(r.mean == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(r.stderr_ < 1e-10);
}

TEST_CASE("parallel_for covers every index once and rethrows") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS(parallel_for(10, [](std::size_t i) {
    if (i == 7) throw Error("boom");
  }));
  CHECK(thread_count() >= 1);
}

TEST_CASE("csv round trip is byte stable") {
  Table t;
  t.columns = {"a", "b"};
  t.add({1.0, 0.1});
  t.add({-2.5e-300, std::nan("")});
  std::string s = to_csv(t);
  CHECK(s.rfind("a,b\n", 0) == 0);
  auto dir = std::filesystem::temp_directory_path() / "fc_support_test";
  std::filesystem::remove_all(dir);
  write_csv((dir / "t.csv").string(), t);
  Table r = read_csv((dir / "t.csv").string());
  CHECK(r.columns == t.columns);
  CHECK(r.rows.size() == 2);
  CHECK(r.rows[0][1] == 0.1);
  CHECK(r.rows[1][0] == -2.5e-300);
  CHECK(std::isnan(r.rows[1][1]));
  CHECK(to_csv(r) == s);
  CHECK(r.column("b").size() == 2);
  CHECK_THROWS(r.column("c"));
}

TEST_CASE("svg plot is rendered from a csv") {
  Table t;
  t.columns = {"x", "y"};
  for (int i = 1; i <= 10; ++i) t.add({static_cast<double>(i), 1.0 / i});
  auto dir = std::filesystem::temp_directory_path() / "fc_support_svg";
  std::filesystem::remove_all(dir);
  write_csv((dir / "t.csv").string(), t);
  PlotSpec p{"decay", "x", {"y"}, true, true};
  plot_csv((dir / "t.csv").string(), (dir / "t.svg").string(), p);
  REQUIRE(std::filesystem::exists(dir / "t.svg"));
  std::string svg = svg_from_table(t, p);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("decay") != std::string::npos);
}
