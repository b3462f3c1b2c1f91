#include "fracchain/fbm_reference.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "fracchain/stats.hpp"

namespace fc {

double hurst_from_alpha(double alpha) { return (alpha - 2.0) / 2.0; }
double fourier_power_from_alpha(double alpha) { return (alpha - 1.0) / 2.0; }
double alpha_from_hurst(double H) { return 2.0 * H + 2.0; }

double fbm_cov_free(double H, double s, double t) {
  if (!(H > 0.0 && H < 1.0)) throw Error("fbm_cov_free: H must lie in (0,1)");
  auto p = [&](double x) { return x == 0.0 ? 0.0 : std::pow(std::fabs(x), 2.0 * H); };
  return 0.5 * (p(s) + p(t) - p(s - t));
}

namespace {

struct Quad {
  gsl_integration_workspace* w;
  Quad() : w(gsl_integration_workspace_alloc(1000)) {}
  ~Quad() { gsl_integration_workspace_free(w); }
};

template <class F>
double integrate(F&& f, double a, double b, double tol, bool singular) {
  if (b <= a) return 0.0;
  thread_local Quad q;
  gsl_function g;
  g.function = [](double x, void* p) { return (*static_cast<F*>(p))(x); };
  g.params = &f;
  double r = 0.0, err = 0.0;
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  int st = singular ? gsl_integration_qags(&g, a, b, 0.0, tol, 1000, q.w, &r, &err)
                    : gsl_integration_qag(&g, a, b, 0.0, tol, 1000, GSL_INTEG_GAUSS41, q.w, &r, &err);
  gsl_set_error_handler(old);
  if (st != GSL_SUCCESS && err > 1e3 * tol * std::fabs(r)) throw Error("fbm_cov_dirichlet: quadrature did not converge");
  return r;
}

// int_0^z (1 + v)^{-1/2} v^{H - 1/2} dv
double blumenthal_integral(double H, double z, double tol) {
  const double p = H + 0.5;
  // v = t^{1/p} removes the endpoint singularity: v^{H-1/2} dv = dt / p
  auto head = [&](double upper) {
    return integrate([&](double t) { return 1.0 / std::sqrt(1.0 + std::pow(t, 1.0 / p)); }, 0.0, std::pow(upper, p), tol,
                     false) / p;
  };
  if (z <= 1.0) return head(z);
  // beyond v = 1 put v = 1/r and split off the exact r^{-H-1} part
  double rest = integrate([&](double r) { return std::pow(r, -H - 1.0) * (1.0 / std::sqrt(1.0 + r) - 1.0); }, 1.0 / z,
                          1.0, tol, true);
  return head(1.0) + (std::pow(z, H) - 1.0) / H + rest;
}

}  // namespace

double fbm_cov_dirichlet(double H, double beta, double x, double y, double tol) {
  if (!(H > 0.0 && H < 0.5)) throw Error("fbm_cov_dirichlet: H must lie in (0, 1/2)");
  if (!(beta > 0)) throw Error("fbm_cov_dirichlet: beta must be positive");
  if (!(std::fabs(x) < 1.0 && std::fabs(y) < 1.0)) throw Error("fbm_cov_dirichlet: points must lie in (-1,1)");
  const double a = (1.0 - x * x) * (1.0 - y * y);
  const double d = std::fabs(x - y);
  if (d == 0.0) return std::pow(a, H) / (H * beta);
  return std::pow(d, 2.0 * H) * blumenthal_integral(H, a / (d * d), tol) / beta;
}

RescaledField rescale_chain_sample(const Eigen::VectorXd& phi, long n, double H) {
  if (n < 2) throw Error("rescale_chain_sample: n must be >= 2");
  if (phi.size() != 2 * n + 1) throw Error("rescale_chain_sample: expected 2n+1 values");
  RescaledField r;
  r.H = H;
  r.n = n;
  for (long i = -n; i <= n; ++i) r.t.push_back(static_cast<double>(i) / n);
  r.values = phi * std::pow(static_cast<double>(n), -H);
  return r;
}

RescaledField rescale_chain_covariance(const Eigen::MatrixXd& C, long n, double H) {
  if (n < 2) throw Error("rescale_chain_covariance: n must be >= 2");
  if (C.rows() != 2 * n + 1 || C.cols() != 2 * n + 1) throw Error("rescale_chain_covariance: expected (2n+1)^2 entries");
  RescaledField r;
  r.H = H;
  r.n = n;
  for (long i = -n; i <= n; ++i) r.t.push_back(static_cast<double>(i) / n);
  r.cov = C * std::pow(static_cast<double>(n), -2.0 * H);
  return r;
}

ShapeFit shape_fit(const std::vector<double>& grid, const Eigen::MatrixXd& empirical, const Eigen::MatrixXd& target,
                   double bulk) {
  const long N = static_cast<long>(grid.size());
  if (empirical.rows() != N || empirical.cols() != N || target.rows() != N || target.cols() != N)
    throw Error("shape_fit: objects must live on the same grid");
  double et = 0.0, tt = 0.0;
  ShapeFit f;
  for (long i = 0; i < N; ++i) {
    if (std::fabs(grid[i]) > bulk) continue;
    for (long j = 0; j < N; ++j) {
      if (std::fabs(grid[j]) > bulk) continue;
      et += empirical(i, j) * target(i, j);
      tt += target(i, j) * target(i, j);
      ++f.entries;
    }
  }
  if (!(tt > 0)) throw Error("shape_fit: degenerate target");
  f.scale = et / tt;
  f.K = std::sqrt(std::fabs(f.scale));
  double ss = 0.0;
  for (long i = 0; i < N; ++i) {
    if (std::fabs(grid[i]) > bulk) continue;
    for (long j = 0; j < N; ++j) {
      if (std::fabs(grid[j]) > bulk) continue;
      double model = f.scale * target(i, j);
      double rel = std::fabs(empirical(i, j) - model) / std::fabs(model);
      f.max_rel_residual = std::max(f.max_rel_residual, rel);
      ss += rel * rel;
    }
  }
  f.rms_rel_residual = std::sqrt(ss / f.entries);
  return f;
}

Eigen::MatrixXd fbm_dirichlet_matrix(double H, double beta, const std::vector<double>& grid) {
  const long N = static_cast<long>(grid.size());
  Eigen::MatrixXd T(N, N);
  for (long i = 0; i < N; ++i)
    for (long j = i; j < N; ++j) {
      double v = (std::fabs(grid[i]) < 1.0 && std::fabs(grid[j]) < 1.0) ? fbm_cov_dirichlet(H, beta, grid[i], grid[j]) : 0.0;
      T(i, j) = v;
      T(j, i) = v;
    }
  return T;
}

}  // namespace fc
