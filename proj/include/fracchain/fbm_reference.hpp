#pragma once
// Fractional Brownian motion reference covariances and shape matching of
// rescaled chain covariances.

#include <Eigen/Dense>
#include <vector>

namespace fc {

enum class FbmGeometry { free_line, dirichlet_interval };

struct FbmSpec {
  double H = 0.25;
  double beta = 1.0;
  FbmGeometry geometry = FbmGeometry::dirichlet_interval;
  double K = 1.0;  // fitted normalization
};

// H = (alpha - 2) / 2 and u = (alpha - 1) / 2 = H + 1/2
double hurst_from_alpha(double alpha);
double fourier_power_from_alpha(double alpha);
double alpha_from_hurst(double H);

// (|s|^2H + |t|^2H - |s - t|^2H) / 2
double fbm_cov_free(double H, double s, double t);

// (1/beta) |x - y|^2H  int_0^{(1 - x^2)(1 - y^2) / |x - y|^2} (v + 1)^{-1/2} v^{H - 1/2} dv
// with the prefactor k(H) set to 1.  On the diagonal the limit (1 - x^2)^2H / (H beta).
double fbm_cov_dirichlet(double H, double beta, double x, double y, double tol = 1e-12);

struct RescaledField {
  double H = 0.0;
  long n = 0;
  std::vector<double> t;  // i / n for the chain sites i = -n..n
  Eigen::VectorXd values;
  Eigen::MatrixXd cov;
  // Riemann sum (1/n) sum_t f(t) phi_bar(t)
  template <class F>
  double pairing(F&& f) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) acc += f(t[k]) * values[static_cast<long>(k)];
    return acc / static_cast<double>(n);
  }
};

// phi_bar(t) = n^{-H} phi(n t)
RescaledField rescale_chain_sample(const Eigen::VectorXd& phi, long n, double H);
// Cov(phi_bar(s), phi_bar(t)) = n^{-2H} Cov(phi(ns), phi(nt))
RescaledField rescale_chain_covariance(const Eigen::MatrixXd& C, long n, double H);

struct ShapeFit {
  double scale = 0.0;         // least-squares c in empirical ~ c * target
  double K = 0.0;             // sqrt(scale)
  double max_rel_residual = 0.0;
  double rms_rel_residual = 0.0;
  long entries = 0;
};

// Least squares over entries with |x|, |y| <= bulk.
ShapeFit shape_fit(const std::vector<double>& grid, const Eigen::MatrixXd& empirical, const Eigen::MatrixXd& target,
                   double bulk = 0.8);

// Dirichlet fBm target on a grid.
Eigen::MatrixXd fbm_dirichlet_matrix(double H, double beta, const std::vector<double>& grid);

}  // namespace fc
