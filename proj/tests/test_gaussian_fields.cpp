#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fracchain/couplings.hpp"
#include "fracchain/gaussian_fields.hpp"
#include "fracchain/lattice_domains.hpp"
#include "fracchain/rng.hpp"

using namespace fc;

namespace {

// zeta(a) by a direct sum plus the Euler-Maclaurin remainder
double zeta_oracle(double a) {
  const long N = 100000;
  double s = 0.0;
  for (long r = N; r >= 1; --r) s += std::pow(static_cast<double>(r), -a);
  const double x = N;
  return s + std::pow(x, 1 - a) / (a - 1) - 0.5 * std::pow(x, -a) + a / 12.0 * std::pow(x, -a - 1);
}

// expected visits on box2d(n) from the Dirichlet sine basis of I - P
double box_green_oracle(long n, long x0, long y0, long x1, long y1) {
  const long N = 2 * n + 1;
  const double h = M_PI / (N + 1);
  double acc = 0.0;
  for (long k = 1; k <= N; ++k)
    for (long l = 1; l <= N; ++l) {
      double lam = 1.0 - 0.5 * (std::cos(k * h) + std::cos(l * h));
      double f0 = std::sin(k * h * (x0 + n + 1)) * std::sin(l * h * (y0 + n + 1));
      double f1 = std::sin(k * h * (x1 + n + 1)) * std::sin(l * h * (y1 + n + 1));
      acc += f0 * f1 / lam;
    }
  return acc * 4.0 / ((N + 1.0) * (N + 1.0));
}

CouplingSequence nearest_neighbour(long R) {
  CouplingSequence J = power_law_couplings(40.0, R);
  for (long r = 0; r <= R; ++r) J.values[r] = r == 1 ? 1.0 : 0.0;
  J.source = CouplingSource::fourier;
  J.row_sum = 2.0;
  return J;
}

}  // namespace

TEST_CASE("chain precision entries") {
  const double beta = 0.7;
  PrecisionOperator P = chain_precision(power_law_couplings(2.5, 8), 1, beta);
  CHECK(P.size() == 3);
  CHECK(P.dense(1, 1) == doctest::Approx(4.0 * beta * zeta_oracle(2.5)).epsilon(1e-10));
  CHECK(P.dense(0, 1) == doctest::Approx(-2.0 * beta).epsilon(1e-14));
  CHECK(P.dense(0, 2) == doctest::Approx(-2.0 * beta * std::pow(2.0, -2.5)).epsilon(1e-14));
  PrecisionOperator Q = chain_precision(spitzer_couplings(600), 256, 1.0);
  CHECK((Q.dense - Q.dense.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q.dense, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues()[0] > 0.0);
  CHECK_THROWS(chain_precision(fourier_couplings(0.75, 4), 8, 1.0));
}

TEST_CASE("single-site chain and the green convention") {
  CouplingSequence J = power_law_couplings(2.5, 4);
  PrecisionOperator P = chain_precision(J, 0, 2.0);
  Eigen::MatrixXd C = chain_covariance(P);
  CHECK(C(0, 0) == doctest::Approx(1.0 / P.dense(0, 0)));
  PrecisionOperator P5 = chain_precision(power_law_couplings(2.5, 20), 5, 0.3);
  Eigen::MatrixXd G = chain_green(power_law_couplings(2.5, 20), 5);
  CHECK((G - 2.0 * 0.3 * chain_covariance(P5)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("box green function against the sine series") {
  const long n = 6;
  LatticeDomain d = build_domain(DomainKind::box2d, n);
  GreenTable g = green_solve(d, nullptr, {0, 0});
  CHECK(g.residual < 1e-10);
  CHECK(g.at(0, 0) == doctest::Approx(box_green_oracle(n, 0, 0, 0, 0)).epsilon(1e-10));
  CHECK(g.at(3, -2) == doctest::Approx(box_green_oracle(n, 0, 0, 3, -2)).epsilon(1e-10));
  for (double v : g.values) CHECK(v >= 0.0);
  CHECK(g.at(7, 0) == 0.0);
}

TEST_CASE("green symmetry under the degree weighting") {
  LatticeDomain d = build_domain(DomainKind::smoothed_slit, 6, 3);
  ConductanceField a = conductance_field(0.5, d.half_width() + 2);
  GreenSolver solver(d, &a);
  Stream rng(2, 0);
  const auto& sites = solver.sites();
  for (int t = 0; t < 10; ++t) {
    const Site& x = sites[rng.next_u32() % sites.size()];
    const Site& y = sites[rng.next_u32() % sites.size()];
    GreenTable gx = green_solve(solver, x), gy = green_solve(solver, y);
    double dx = solver.degree()[solver.index(x.x, x.y)], dy = solver.degree()[solver.index(y.x, y.y)];
    CHECK(gx.at(y.x, y.y) / dy == doctest::Approx(gy.at(x.x, x.y) / dx).epsilon(1e-9));
  }
}

TEST_CASE("band solver equals the generic solve") {
  for (DomainKind k : {DomainKind::slit_diamond, DomainKind::smoothed_slit}) {
    LatticeDomain d = build_domain(k, 6, 4);
    ConductanceField a = conductance_field(0.5, d.half_width() + 2);
    LineGreen band = line_green(d, a), gen = line_green_generic(d, &a);
    REQUIRE(band.line_x == gen.line_x);
    CHECK((band.G - gen.G).cwiseAbs().maxCoeff() < 1e-9 * gen.G.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("slit domain monotonicity") {
  const long n = 8;
  LatticeDomain ds = build_domain(DomainKind::slit_diamond, n, 4);
  ConductanceField a = conductance_field(0.5, ds.half_width() + 2);
  LineGreen slit = line_green(ds, a);
  for (long M : {2L, 4L}) {
    LatticeDomain dm = build_domain(DomainKind::smoothed_slit, n, M);
    LineGreen sm = line_green(dm, a);
    for (std::size_t i = 0; i < sm.line_x.size(); ++i) {
      long si = sm.line_x[i] / 2 + n;
      CHECK(sm.G(i, i) <= slit.G(si, si) + 1e-12);
    }
  }
}

TEST_CASE("baseline degree on the diamond graph is 1") {
  LatticeDomain d = build_domain(DomainKind::slit_diamond, 4, 4);
  ConductanceField a = conductance_field(0.5, d.half_width() + 2);
  GreenSolver s(d, &a);
  for (const Site& z : d.line_sites()) CHECK(s.degree()[s.index(z.x, z.y)] == doctest::Approx(1.0));
}

TEST_CASE("conformal radius of the square at the centre") {
  double exact = 8.0 * std::sqrt(M_PI) / std::pow(std::tgamma(0.25), 2);
  CHECK(conformal_radius_square(0.0, 0.0) == doctest::Approx(exact).epsilon(1e-8));
  // symmetric points, and the radius shrinks toward the boundary
  CHECK(conformal_radius_square(0.0, 0.5) == doctest::Approx(conformal_radius_square(0.5, 0.0)).epsilon(1e-10));
  CHECK(conformal_radius_square(0.0, 0.5) < exact);
  CHECK(conformal_radius_square(0.0, 0.9) < conformal_radius_square(0.0, 0.5));
}

TEST_CASE("gaussian sampling") {
  PrecisionOperator P = chain_precision(power_law_couplings(2.5, 40), 8, 1.0);
  Eigen::MatrixXd C = chain_covariance(P);
  GaussianSampler s(P);
  Stream rng(12, 0);
  const int N = 100000;
  Eigen::MatrixXd emp = Eigen::MatrixXd::Zero(P.size(), P.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(P.size());
  for (int k = 0; k < N; ++k) {
    Eigen::VectorXd x = s.draw(rng);
    mean += x;
    emp += x * x.transpose();
  }
  mean /= N;
  emp /= N;
  CHECK((emp - C).norm() / C.norm() < 0.05);
  for (long i = 0; i < mean.size(); ++i) CHECK(std::fabs(mean[i]) < 4.0 * std::sqrt(C(i, i) / N));
  CHECK(sample_gaussian(P, 5) == sample_gaussian(P, 5));
  LatticeDomain d = build_domain(DomainKind::box2d, 4);
  PrecisionOperator G = gff_precision(d, 2.0);
  CHECK(sample_gaussian(G, 1).size() == 81);
}

TEST_CASE("quadratic-form sandwich for alpha = 3.5") {
  const long n = 64;
  PrecisionOperator A = chain_precision(power_law_couplings(3.5, 2 * n + 2), n, 1.0);
  PrecisionOperator B = chain_precision(nearest_neighbour(2 * n + 2), n, 1.0);
  Stream rng(8, 0);
  double lo = 1e300, hi = 0.0;
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd v(A.size());
    for (long i = 0; i < v.size(); ++i) v[i] = rng.normal();
    double q = v.dot(A.dense * v) / v.dot(B.dense * v);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  double C = std::max(hi, 1.0 / lo);
  MESSAGE("sandwich constant C = " << C);
  CHECK(lo >= 1.0 / C);
  CHECK(C < 10.0);
}

TEST_CASE("long-range 2d precision") {
  PrecisionOperator P = long_range_2d_precision(3, 4.5, 0.5, 3);
  CHECK(P.size() == 49);
  CHECK((P.dense - P.dense.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P.dense, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues()[0] > 0.0);
  CHECK(P.omitted_mass > 0.0);
}

TEST_CASE("shift function equals the scaled green function") {
  LatticeDomain d = build_domain(DomainKind::box2d, 8);
  GreenSolver s(d);
  const double beta = 0.4;
  ShiftResult r = shift_and_line_energy(s, [](const Site& z) { return z.x == 1 && z.y == 2 ? 1.0 : 0.0; }, beta);
  GreenTable g = green_solve(s, {1, 2});
  for (std::size_t k = 0; k < r.sites.size(); ++k) {
    // G(y, x) = G(x, y) on a constant-degree graph
    CHECK(r.sigma[k] == doctest::Approx(g.values[k] / beta).epsilon(1e-10));
  }
  CHECK(r.line_sigma.size() == 17);
  CHECK(r.line_energy == doctest::Approx(line_energy(r.line_sigma)));
  CHECK(line_energy({0.0, 1.0, 3.0}) == 5.0);
}

TEST_CASE("small trace identity") {
  TraceIdentityResult t = trace_identity_check(8, 0.0, 8);
  MESSAGE("n = 8 bulk discrepancy " << t.max_rel_bulk);
  CHECK(t.max_rel_bulk < 0.05);
  CHECK(t.chain.rows() == 17);
}
