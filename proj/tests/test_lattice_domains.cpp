#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fracchain/bessel_walk.hpp"
#include "fracchain/lattice_domains.hpp"
#include "fracchain/stats.hpp"

using namespace fc;

namespace {

// sup-norm distance (line units) from a doubled-coordinate site to L_n, by brute force
double slit_distance(long X, long Y, long n, long reach) {
  double best = 1e300;
  for (long k = n + 1; k <= reach; ++k)
    for (long sgn : {-1L, 1L}) best = std::min(best, std::max(std::fabs(X / 2.0 - sgn * k), std::fabs(Y / 2.0)));
  return best;
}

bool has(const std::vector<Site>& v, long x, long y) {
  return std::find(v.begin(), v.end(), Site{x, y}) != v.end();
}

}  // namespace

TEST_CASE("box and torus sizes") {
  CHECK(build_domain(DomainKind::box2d, 2).size() == 25);
  CHECK(build_domain(DomainKind::torus2d, 3).size() == 49);
  CHECK(build_domain(DomainKind::interval, 5).size() == 11);
  CHECK(build_domain(DomainKind::half_plane_free_bottom, 2).size() == 15);
  CHECK_THROWS(build_domain(DomainKind::box2d, 0));
  CHECK_THROWS(build_domain(DomainKind::smoothed_slit, 4, 1));
}

TEST_CASE("slit diamond kills exactly |x| >= n+1 on the line") {
  LatticeDomain d = build_domain(DomainKind::slit_diamond, 4, 8);
  for (long k = -40; k <= 40; ++k) CHECK(d.contains(2 * k, 0) == (std::labs(k) <= 4));
  auto line = d.line_sites();
  CHECK(line.size() == 9);
  CHECK(line.front().x == -8);
  CHECK(d.boundary_class(10, 0) == BoundaryClass::slit_proximal);
  CHECK(d.boundary_class(2 * d.half_width() + 2, 0) == BoundaryClass::outer_square);
}

TEST_CASE("smoothed slit geometry") {
  const long n = 8, M = 4;
  LatticeDomain h = build_domain(DomainKind::smoothed_slit, n, M);
  LatticeDomain d = build_domain(DomainKind::slit_diamond, n, M);
  auto hs = h.sites();
  REQUIRE(!hs.empty());
  for (const Site& z : hs) {
    CHECK(std::max(std::labs(z.x), std::labs(z.y)) <= 2 * M * n);
    CHECK(slit_distance(z.x, z.y, n, 2 * M * n) >= static_cast<double>(n) / M - 1e-12);
    CHECK(d.contains(z.x, z.y));
  }
  // every site of the slit domain that satisfies both conditions is present
  long count = 0;
  for (const Site& z : d.sites())
    if (slit_distance(z.x, z.y, n, 2 * M * n) >= static_cast<double>(n) / M) ++count;
  CHECK(count == static_cast<long>(hs.size()));
}

TEST_CASE("conductance field") {
  ConductanceField z = conductance_field(0.0, 20);
  for (long r = 0; r <= 20; ++r) CHECK(z.a[r] == 0.25);
  ConductanceField f = conductance_field(0.5, 1024);
  CHECK(f.a[1] == doctest::Approx(0.15).epsilon(1e-14));
  CHECK(f.edge(0) == 0.25);
  CHECK(f.edge(-1) == 0.25);
  CHECK(f.degree(0) == doctest::Approx(1.0));
  BesselKernel q = kernel(0.5);
  for (long r = 1; r < 1024; ++r) {
    CHECK(f.a[r] / (f.a[r - 1] + f.a[r]) == doctest::Approx(q.up(r)).epsilon(1e-12));
    CHECK(f.edge(r) == f.edge(-r - 1));
  }
  std::vector<double> x, y;
  for (long r : log_spaced_integers(64, 1024, 4, 8)) {
    x.push_back(r);
    y.push_back(f.a[r]);
  }
  CHECK(std::fabs(power_law_fit(x, y).exponent - 0.5) < 0.05);
  double C = 0.0;
  for (long r = 1; r <= 1024; ++r) C = std::max(C, f.a[r] * std::sqrt(static_cast<double>(r)));
  CHECK(C < 1.0);
  CHECK_THROWS(f.edge(5000));
}

TEST_CASE("conditioning sets") {
  CHECK(line_set(3).members.size() == 7);
  CHECK(strip_set(3, 1).members.size() == 21);
  CHECK_THROWS(strip_set(3, 4));
  ConditioningSet f1 = fractal_set(1);
  for (long x = -1; x <= 1; ++x) CHECK(has(f1.members, x, 0));
  std::size_t prev = 1;
  for (int k = 1; k <= 4; ++k) {
    std::size_t c = fractal_set(k).members.size();
    CHECK(c == prev * 5);
    prev = c;
  }
  ConditioningSet f2 = fractal_set(2);
  for (const Site& z : f2.members) {
    CHECK(has(f2.members, -z.x, z.y));
    CHECK(std::max(std::labs(z.x), std::labs(z.y)) <= 4);
  }
  for (double dim : fractal_dimension_estimates(3)) CHECK(dim == doctest::Approx(std::log(5.0) / std::log(3.0)));
}

TEST_CASE("domain kind names round trip") {
  for (DomainKind k : {DomainKind::interval, DomainKind::box2d, DomainKind::torus2d, DomainKind::slit_diamond,
                       DomainKind::smoothed_slit, DomainKind::half_plane_free_bottom})
    CHECK(domain_kind_from_string(to_string(k)) == k);
  CHECK_THROWS(domain_kind_from_string("sphere"));
}
