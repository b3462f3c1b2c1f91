#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "fracchain/couplings.hpp"
#include "fracchain/gaussian_fields.hpp"
#include "fracchain/lattice_domains.hpp"
#include "fracchain/lattice_gibbs.hpp"

using namespace fc;

namespace {

std::vector<long> all_sites(long n) {
  std::vector<long> v(n);
  std::iota(v.begin(), v.end(), 0L);
  return v;
}

// E[exp(<w, psi>)] for an all-integer field by a plain window sum (3 sites)
double brute_laplace(const Eigen::Matrix3d& A, const Eigen::Vector3d& w, double v, int K) {
  double num = 0.0, den = 0.0;
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b)
      for (int c = -K; c <= K; ++c) {
        Eigen::Vector3d p(a * v, b * v, c * v);
        double e = std::exp(-0.5 * p.dot(A * p));
        den += e;
        num += e * std::exp(w.dot(p));
      }
  return num / den;
}

// one-site sine-Gordon Laplace transform by trapezoid quadrature
double sg_one_site(double a, double lambda, double v, double w) {
  const double h = 1e-3, L = 30.0 / std::sqrt(a);
  double num = 0.0, den = 0.0;
  for (double x = -L; x <= L; x += h) {
    double e = std::exp(-0.5 * a * x * x + lambda * std::cos(2 * M_PI * x / v));
    den += e;
    num += e * std::exp(w * x);
  }
  return num / den;
}

}  // namespace

TEST_CASE("discrete gaussian window") {
  for (double q : {0.1, 1.0, 10.0})
    for (double v : {1.0, 2 * M_PI}) {
      DiscreteGaussianWindow w = discrete_gaussian_window(0.5 * v, q, v);
      double tot = 0.0;
      for (double p : w.p) tot += p;
      CHECK(std::fabs(tot - 1.0) < 1e-9);
      CHECK(w.p[0 - w.lo] == doctest::Approx(w.p[1 - w.lo]).epsilon(1e-12));
      CHECK(w.tail_bound < 1e-8);
      // direct oracle for the moments
      double z = 0, m1 = 0, m2 = 0;
      for (long m = -400; m <= 400; ++m) {
        double e = std::exp(-0.5 * q * std::pow(m * v - 0.5 * v, 2));
        z += e;
        m1 += m * e;
        m2 += m * v * m * v * e;
      }
      CHECK(w.mean() == doctest::Approx(m1 / z).epsilon(1e-9));
      CHECK(w.second_moment(v) == doctest::Approx(m2 / z).epsilon(1e-9));
    }
  DiscreteGaussianWindow sharp = discrete_gaussian_window(2.3, 1e4, 1.0);
  CHECK(sharp.p[2 - sharp.lo] > 1.0 - 1e-12);
  Stream rng(1, 0);
  for (int i = 0; i < 100; ++i) CHECK(sample_discrete_gaussian(2.3, 1e4, 1.0, rng) == 2);
}

TEST_CASE("heat bath matches enumeration on a 7-site integer chain") {
  PrecisionOperator P = chain_precision(power_law_couplings(2.5, 8), 3, 1.5);
  Eigen::MatrixXd A = P.dense;
  EnumerationResult ex = exact_enumeration(A, all_sites(7), 1.0, 4, 1e-4);
  GibbsModel m = make_integer_chain(P, 1.0);
  ObservableSpec o;
  o.site_variances = {3, 0};
  o.pairs = {{3, 4}};
  ObservableSet r = run_experiment(m, 220000, 20000, o, 17);
  CHECK(std::fabs(r.values[0].estimate.mean - ex.second_moment(3, 3)) < 3.5 * r.values[0].estimate.stderr_);
  CHECK(std::fabs(r.values[1].estimate.mean - ex.second_moment(0, 0)) < 3.5 * r.values[1].estimate.stderr_);
  CHECK(std::fabs(r.values[2].estimate.mean - ex.second_moment(3, 4)) < 3.5 * r.values[2].estimate.stderr_);
  CHECK(r.values[0].name == "var_site_3");
  ObservableSet again = run_experiment(m, 220000, 20000, o, 17);
  CHECK(again.values[0].estimate.mean == r.values[0].estimate.mean);
  double marg = 0;
  for (double p : ex.marginals[3]) marg += p;
  CHECK(marg == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mixed chain: gaussian sites integrated out exactly") {
  PrecisionOperator P = chain_precision(power_law_couplings(2.5, 8), 2, 0.4);
  std::vector<long> cond = {0, 2, 4};
  EnumerationResult ex = exact_enumeration(P.dense, cond, 1.0, 5, 1e-6);
  GibbsModel m = make_model(P, cond, 1.0);
  CHECK(m.rule[1] == SiteRule::gaussian);
  CHECK(m.rule[2] == SiteRule::integer);
  ObservableSpec o;
  o.site_variances = {1, 2};
  ObservableSet r = run_experiment(m, 220000, 20000, o, 3);
  CHECK(std::fabs(r.values[0].estimate.mean - ex.second_moment(1, 1)) < 3.5 * r.values[0].estimate.stderr_);
  CHECK(std::fabs(r.values[1].estimate.mean - ex.second_moment(2, 2)) < 3.5 * r.values[1].estimate.stderr_);
}

TEST_CASE("enumerated laplace transform against a plain sum") {
  Eigen::Matrix3d A;
  A << 2.0, -0.5, -0.2, -0.5, 2.2, -0.4, -0.2, -0.4, 1.8;
  Eigen::Vector3d w(0.3, -0.7, 0.5);
  double tail = 0;
  double e = enumerate_laplace(A, {0, 1, 2}, 1.0, 6, Eigen::VectorXd(w), &tail);
  CHECK(e == doctest::Approx(brute_laplace(A, w, 1.0, 12)).epsilon(1e-10));
  CHECK(tail < 1e-10);
  CHECK(gaussian_laplace(A, w) == doctest::Approx(std::exp(0.5 * w.dot(A.inverse() * w))).epsilon(1e-14));
  CHECK_THROWS_AS(exact_enumeration(Eigen::MatrixXd(0.01 * A), {0, 1, 2}, 1.0, 2, 1e-6), Error);
}

TEST_CASE("sine-gordon laplace transform") {
  Eigen::MatrixXd A(1, 1);
  A(0, 0) = 1.3;
  Eigen::VectorXd w(1);
  w[0] = 0.6;
  for (double lam : {0.5, 1.0, 2.0})
    CHECK(sine_gordon_laplace(A, {}, 1.0, lam, w) == doctest::Approx(sg_one_site(1.3, lam, 1.0, 0.6)).epsilon(1e-8));
  Eigen::MatrixXd B(2, 2);
  B << 1.5, -0.4, -0.4, 1.1;
  Eigen::VectorXd w2(2);
  w2 << 0.4, -0.3;
  CHECK(sine_gordon_laplace(B, {}, 1.0, 0.0, w2) == doctest::Approx(gaussian_laplace(B, w2)).epsilon(1e-12));
}

TEST_CASE("sine-gordon sampler against the bessel expansion") {
  PrecisionOperator P = chain_precision(power_law_couplings(2.5, 8), 1, 0.6);
  GibbsModel m = make_model(P, all_sites(3), 1.0, 1.0);
  CHECK(m.rule[0] == SiteRule::sine_gordon);
  Eigen::VectorXd w(3);
  w << 0.2, 0.3, -0.1;
  ObservableSpec o;
  o.laplace = {w};
  ObservableSet r = run_experiment(m, 220000, 20000, o, 5);
  double exact = sine_gordon_laplace(P.dense, {}, 1.0, 1.0, w);
  CHECK(std::fabs(r.values[0].estimate.mean - exact) < 3.5 * r.values[0].estimate.stderr_);
  CHECK(r.acceptance > 0.1);
  CHECK(r.acceptance < 1.0);
}

TEST_CASE("ginibre ordering on a small instance") {
  PrecisionOperator P = chain_precision(power_law_couplings(2.5, 8), 1, 2.0);
  Eigen::VectorXd w(3);
  w << 0.5, 0.5, 0.5;
  double li = enumerate_laplace(P.dense, all_sites(3), 1.0, 5, w);
  double ls = sine_gordon_laplace(P.dense, {}, 1.0, 1.0, w);
  double lg = gaussian_laplace(P.dense, w);
  CHECK(li <= ls + 1e-12);
  CHECK(ls <= lg + 1e-12);
}

TEST_CASE("regev monotonicity on a fixed pair") {
  Eigen::MatrixXd A(3, 3);
  A << 1.2, 0.3, 0.0, 0.3, 0.9, -0.2, 0.0, -0.2, 1.1;
  Eigen::VectorXd u(3);
  u << 0.5, -0.3, 0.8;
  Eigen::MatrixXd B = A + u * u.transpose();
  Eigen::VectorXd v(3);
  v << 1.0, 0.5, -0.4;
  EnumerationResult ea = exact_enumeration(A, {0, 1, 2}, 1.0, 6, 1e-6);
  EnumerationResult eb = exact_enumeration(B, {0, 1, 2}, 1.0, 6, 1e-6);
  CHECK(v.dot(eb.second_moment * v) <= v.dot(ea.second_moment * v) + 1e-12);
}

TEST_CASE("pure gaussian model has beta_eff = beta") {
  const double beta = 0.8;
  PrecisionOperator P = chain_precision(power_law_couplings(2.5, 40), 8, beta);
  GibbsModel m = make_model(P, {}, 1.0, 0.0);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(P.size());
  for (long i = 4; i <= 12; ++i) g[i] = 1.0;
  double gv = g.dot(chain_covariance(P) * g);
  ObservableSpec o;
  o.pairings = {g};
  ObservableSet r = run_experiment(m, 100000, 5000, o, 9);
  BatchEstimate b = effective_beta(r, 0, beta, gv);
  CHECK(std::fabs(b.mean - beta) < 4.0 * b.stderr_);
}

TEST_CASE("collapsed field on the full box is the integer GFF") {
  const long n = 3;
  LatticeDomain d = build_domain(DomainKind::box2d, n);
  const double beta = 0.7;
  CollapsedField cf(d, strip_set(n, n).members, beta, 1.0);
  PrecisionOperator P = gff_precision(d, beta);
  Eigen::MatrixXd full = P.to_dense();
  const Eigen::MatrixXd& S = cf.model().precision.dense;
  REQUIRE(S.rows() == full.rows());
  // both index sets are row-major over the box
  CHECK((S - full).cwiseAbs().maxCoeff() < 1e-9);
  CollapsedField::Pairing p = cf.site(0, 0);
  CHECK(std::fabs(p.conditional_var) < 1e-9);
}

TEST_CASE("collapsed line field: pairing variances") {
  const long n = 6;
  LatticeDomain d = build_domain(DomainKind::box2d, n);
  const double beta = 0.5;
  CollapsedField cf(d, line_set(n).members, beta, 1.0);
  CollapsedField::Pairing p = cf.site(0, 2);
  GreenTable g = green_solve(d, nullptr, {0, 2});
  CHECK(p.gaussian_var == doctest::Approx(g.at(0, 2) / beta).epsilon(1e-9));
  // gaussian variance splits into the set part and the conditional remainder
  Eigen::MatrixXd C = chain_covariance(cf.model().precision);
  CHECK(p.gaussian_var == doctest::Approx(p.c.dot(C * p.c) + p.conditional_var).epsilon(1e-9));
  CHECK(p.conditional_var > 0.0);
}
