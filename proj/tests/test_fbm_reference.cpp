#include <cmath>
#include <vector>

#include "doctest.h"
#include "fracchain/couplings.hpp"
#include "fracchain/fbm_reference.hpp"
#include "fracchain/gaussian_fields.hpp"

using namespace fc;

namespace {

// the defining integral by a midpoint rule after v = t^2 (removes the v^{H - 1/2} endpoint)
double dirichlet_oracle(double H, double beta, double x, double y) {
  double d = std::fabs(x - y);
  double U = (1 - x * x) * (1 - y * y) / (d * d);
  // int_0^U (v+1)^{-1/2} v^{H-1/2} dv = int_0^{sqrt U} 2 t^{2H} (t^2 + 1)^{-1/2} dt
  const int N = 2000000;
  double T = std::sqrt(U), h = T / N, acc = 0.0;
  for (int k = 0; k < N; ++k) {
    double t = (k + 0.5) * h;
    acc += 2.0 * std::pow(t, 2 * H) / std::sqrt(t * t + 1.0);
  }
  return std::pow(d, 2 * H) * acc * h / beta;
}

}  // namespace

TEST_CASE("alpha, H and u dictionary") {
  CHECK(hurst_from_alpha(2.5) == 0.25);
  CHECK(fourier_power_from_alpha(2.5) == 0.75);
  CHECK(alpha_from_hurst(0.25) == 2.5);
  CHECK(fourier_power_from_alpha(2.8) == doctest::Approx(hurst_from_alpha(2.8) + 0.5));
}

TEST_CASE("free fbm covariance") {
  CHECK(fbm_cov_free(0.5, 1.0, 2.0) == doctest::Approx(1.0));
  CHECK(fbm_cov_free(0.3, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK(fbm_cov_free(0.3, 0.0, 0.7) == 0.0);
  for (double H : {0.1, 0.25, 0.4})
    for (double s : {-1.3, 0.2, 0.9})
      for (double t : {-0.4, 0.5, 2.0}) {
        for (double l : {0.5, 2.0, 7.0})
          CHECK(std::fabs(fbm_cov_free(H, l * s, l * t) - std::pow(l, 2 * H) * fbm_cov_free(H, s, t)) < 1e-10);
        double inc = fbm_cov_free(H, t, t) + fbm_cov_free(H, s, s) - 2 * fbm_cov_free(H, s, t);
        CHECK(std::fabs(inc - std::pow(std::fabs(t - s), 2 * H)) < 1e-10);
      }
}

TEST_CASE("dirichlet fbm covariance") {
  const double H = 0.25, beta = 1.0;
  for (auto [x, y] : std::vector<std::pair<double, double>>{{0.1, 0.5}, {-0.7, 0.3}, {0.0, 0.95}, {0.4, 0.41}}) {
    double v = fbm_cov_dirichlet(H, beta, x, y);
    CHECK(v == doctest::Approx(dirichlet_oracle(H, beta, x, y)).epsilon(1e-6));
    CHECK(std::fabs(v - fbm_cov_dirichlet(H, beta, y, x)) < 1e-12);
    CHECK(std::fabs(v - fbm_cov_dirichlet(H, beta, -x, -y)) < 1e-12);
  }
  CHECK(fbm_cov_dirichlet(H, 2.0, 0.1, 0.5) == doctest::Approx(0.5 * fbm_cov_dirichlet(H, 1.0, 0.1, 0.5)));
  // diagonal limit (the correction is of order |x - y|^2H) and the boundary exponent
  for (double d : {1e-4, 1e-8, 1e-12}) {
    double gap = std::fabs(fbm_cov_dirichlet(H, beta, 0.3, 0.3 + d) - fbm_cov_dirichlet(H, beta, 0.3, 0.3));
    CHECK(gap < 5.0 * std::pow(d, 2 * H));
  }
  double x0 = 0.9, x1 = 0.9001;
  double slope = (std::log(fbm_cov_dirichlet(H, beta, x1, x1)) - std::log(fbm_cov_dirichlet(H, beta, x0, x0))) /
                 (std::log(1 - x1 * x1) - std::log(1 - x0 * x0));
  CHECK(std::fabs(slope - 2 * H) < 1e-3);
}

TEST_CASE("rescaling") {
  Eigen::VectorXd phi(5);
  phi << 1, 2, 3, 4, 5;
  RescaledField r0 = rescale_chain_sample(phi, 2, 0.0);
  CHECK(r0.values == phi);
  CHECK(r0.t.front() == -1.0);
  CHECK(r0.t.back() == 1.0);
  RescaledField r = rescale_chain_sample(phi, 2, 0.5);
  CHECK(r.values[2] == doctest::Approx(3.0 / std::sqrt(2.0)));
  CHECK(r.pairing([](double) { return 1.0; }) == doctest::Approx(15.0 / std::sqrt(2.0) / 2.0));
  Eigen::MatrixXd C = Eigen::MatrixXd::Constant(5, 5, 2.0);
  RescaledField rc = rescale_chain_covariance(C, 2, 0.25);
  CHECK(rc.cov(1, 3) == doctest::Approx(2.0 / std::sqrt(2.0)));
}

TEST_CASE("shape fit") {
  std::vector<double> grid;
  for (int k = -8; k <= 8; ++k) grid.push_back(k / 10.0);
  Eigen::MatrixXd T = fbm_dirichlet_matrix(0.25, 1.0, grid);
  ShapeFit f = shape_fit(grid, T, T);
  CHECK(f.K == doctest::Approx(1.0));
  CHECK(f.max_rel_residual < 1e-12);
  ShapeFit g = shape_fit(grid, 4.0 * T, T);
  CHECK(g.scale == doctest::Approx(4.0));
  CHECK(g.K == doctest::Approx(2.0));
  CHECK_THROWS(shape_fit(grid, T, Eigen::MatrixXd::Zero(T.rows(), T.cols())));
}

TEST_CASE("gaussian chain approaches the dirichlet shape") {
  const long n = 256;
  const double H = 0.25;
  Eigen::MatrixXd C = chain_covariance(chain_precision(power_law_couplings(2.5, 2 * n + 2), n, 1.0));
  RescaledField rf = rescale_chain_covariance(C, n, H);
  std::vector<long> idx;
  std::vector<double> grid;
  for (std::size_t k = 0; k < rf.t.size(); k += 8)
    if (std::fabs(rf.t[k]) <= 0.8) {
      idx.push_back(k);
      grid.push_back(rf.t[k]);
    }
  Eigen::MatrixXd E(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) E(i, j) = rf.cov(idx[i], idx[j]);
  ShapeFit f = shape_fit(grid, E, fbm_dirichlet_matrix(H, 1.0, grid));
  MESSAGE("n = 256 max residual " << f.max_rel_residual);
  CHECK(f.max_rel_residual < 0.1);
}
