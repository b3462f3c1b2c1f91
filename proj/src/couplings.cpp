#include "fracchain/couplings.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_gamma.h>
#include <gsl/gsl_sf_zeta.h>

#include <algorithm>
#include <cmath>

#include "fracchain/bessel_walk.hpp"
#include "fracchain/stats.hpp"

namespace fc {

std::string to_string(CouplingSource s) {
  switch (s) {
    case CouplingSource::spitzer: return "spitzer";
    case CouplingSource::bessel_diamond: return "bessel_diamond";
    case CouplingSource::bessel_grid: return "bessel_grid";
    case CouplingSource::fourier: return "fourier";
    case CouplingSource::power_law: return "power_law";
  }
  return "unknown";
}

bool CouplingSequence::has_analytic_tail() const {
  return source == CouplingSource::spitzer || source == CouplingSource::power_law;
}

double CouplingSequence::J(long r) const {
  r = std::labs(r);
  if (r <= R) return values[r];
  if (source == CouplingSource::spitzer) return 2.0 / (M_PI * (4.0 * r * r - 1.0));
  if (source == CouplingSource::power_law) return std::pow(static_cast<double>(r), -alpha);
  return 0.0;
}

double CouplingSequence::captured_mass() const {
  KahanSum k;
  for (long r = R; r >= 1; --r) k.add(2.0 * values[r]);
  k.add(mass_at_zero.value_or(0.0));
  return k.value();
}

CouplingSequence spitzer_couplings(long R) {
  if (R < 1) throw Error("spitzer_couplings: R must be >= 1");
  CouplingSequence c;
  c.source = CouplingSource::spitzer;
  c.alpha = 2.0;
  c.s = 0.0;
  c.R = R;
  c.values.assign(R + 1, 0.0);
  c.values[0] = 1.0 - 2.0 / M_PI;
  for (long r = 1; r <= R; ++r) c.values[r] = 2.0 / (M_PI * (4.0 * r * r - 1.0));
  c.mass_at_zero = c.values[0];
  // 2 * sum_{r>R} 2/(pi(4r^2-1)) telescopes to (2/pi)/(2R+1)
  c.truncation_error = (2.0 / M_PI) / (2.0 * R + 1.0);
  c.pointwise_error = 0.0;
  c.row_sum = 2.0 / M_PI;
  return c;
}

namespace {

// Sum over n > n0 of c n^{-a} times a local Gaussian kernel of variance v*n
// evaluated at k, with c fixed by sum_{n > n0} c n^{-a} = mass.  The sum over
// n is replaced by the integral from n0 + 1/2.
std::vector<double> tail_completion(double mass, double a, double v, long n0, long R) {
  std::vector<double> out(R + 1, 0.0);
  if (mass <= 0) return out;
  double c = mass / gsl_sf_hzeta(a, static_cast<double>(n0 + 1));
  double n1 = n0 + 0.5;
  double b = a + 0.5;
  double pref = c / std::sqrt(2.0 * M_PI * v);
  out[0] = pref * std::pow(n1, 1.0 - b) / (b - 1.0);
  double gb = std::tgamma(b - 1.0);
  for (long k = 1; k <= R; ++k) {
    double K = static_cast<double>(k) * k / (2.0 * v);
    out[k] = pref * std::pow(K, 1.0 - b) * gb * gsl_sf_gamma_inc_P(b - 1.0, K / n1);
  }
  double inside = out[0];
  for (long k = 1; k <= R; ++k) inside += 2.0 * out[k];
  if (inside > mass) {
    for (double& x : out) x *= mass / inside;
  }
  return out;
}

double central_binomial_prob(long n) {  // C(2n, n) / 4^n
  return std::exp(std::lgamma(2.0 * n + 1.0) - 2.0 * std::lgamma(n + 1.0) - 2.0 * n * std::log(2.0));
}

CouplingSequence diamond_dp(double s, long R, long T, const BesselCouplingOptions& opt) {
  FirstReturnLaw law = first_return_law(s, T);
  CouplingSequence c;
  c.source = CouplingSource::bessel_diamond;
  c.s = s;
  c.alpha = 2.0 + s;
  c.R = R;
  c.horizon = T;
  std::vector<KahanSum> acc(R + 1);
  KahanSum outside;  // returned mass landing beyond radius R
  double p0 = 1.0;   // C(2n,n)/4^n at n = 0
  for (long n = 1; n <= T / 2; ++n) {
    p0 *= (2.0 * n - 1.0) / (2.0 * n);
    double w = law.g[2 * n];
    if (w == 0.0) continue;
    double p = p0;
    double inside = p;
    acc[0].add(w * p);
    long kmax = std::min(R, n);
    for (long k = 0; k < kmax; ++k) {
      p *= static_cast<double>(n - k) / static_cast<double>(n + k + 1);
      if (p < 1e-300) break;
      acc[k + 1].add(w * p);
      inside += 2.0 * p;
    }
    outside.add(w * std::max(0.0, 1.0 - inside));
  }
  c.values.assign(R + 1, 0.0);
  for (long k = 0; k <= R; ++k) c.values[k] = acc[k].value();
  double survive = law.tail_mass;
  // every n > T/2 term is at most g(2n) p(2n, 0) <= S_T p(T + 2, 0)
  c.pointwise_error = survive * central_binomial_prob(T / 2 + 1);
  c.truncation_error = survive + outside.value();
  if (opt.tail_completion && survive > 0) {
    std::vector<double> add = tail_completion(survive, (3.0 + s) / 2.0, 0.5, T / 2, R);
    double placed = add[0];
    for (long k = 1; k <= R; ++k) placed += 2.0 * add[k];
    for (long k = 0; k <= R; ++k) c.values[k] += add[k];
    c.completion_mass = placed;
    c.truncation_error = outside.value() + std::max(0.0, survive - placed);
  }
  c.mass_at_zero = c.values[0];
  c.row_sum = 1.0 - c.values[0];
  return c;
}

CouplingSequence diamond_mc(double s, long R, long T, const BesselCouplingOptions& opt) {
  WalkSpec spec;
  spec.geometry = Geometry::diamond;
  spec.s = s;
  spec.max_steps = T;
  spec.seed = opt.seed;
  ReturnSiteHistogram h = simulate_returns(spec, opt.n_walks, R);
  CouplingSequence c;
  c.source = CouplingSource::bessel_diamond;
  c.s = s;
  c.alpha = 2.0 + s;
  c.R = R;
  c.horizon = T;
  c.monte_carlo = true;
  c.values.assign(R + 1, 0.0);
  c.stderrs.assign(R + 1, 0.0);
  const double N = static_cast<double>(h.walks);
  for (long k = 0; k <= R; ++k) {
    double cnt = k == 0 ? h.signed_counts[R] : 0.5 * (h.signed_counts[R + k] + h.signed_counts[R - k]);
    double p = cnt / N;
    c.values[k] = p;
    // symmetrised estimate: (count_k + count_{-k}) is binomial with success 2p
    c.stderrs[k] = k == 0 ? std::sqrt(p * (1.0 - p) / N) : std::sqrt(p * (1.0 - 2.0 * p) / (2.0 * N));
  }
  c.survival.assign(R + 2, 0.0);
  double tail = static_cast<double>(h.beyond_radius);
  c.survival[R + 1] = tail / N;
  for (long r = R; r >= 0; --r) {
    tail += r == 0 ? h.signed_counts[R] : h.signed_counts[R + r] + h.signed_counts[R - r];
    c.survival[r] = tail / N;
  }
  c.mass_at_zero = c.values[0];
  c.truncation_error = static_cast<double>(h.censored + h.beyond_radius) / N;
  c.row_sum = 1.0 - c.values[0];
  return c;
}

}  // namespace

long default_horizon(double s, double tol, long cap) {
  long T = 1024;
  for (;;) {
    FirstReturnLaw law = first_return_law(s, T);
    if (law.tail_mass * central_binomial_prob(T / 2 + 1) < tol || T >= cap) return T;
    T *= 2;
  }
}

CouplingSequence bessel_couplings(double s, long R, long T, WalkMethod method, const BesselCouplingOptions& opt) {
  if (!(s >= 0.0 && s < 1.0)) throw Error("bessel_couplings: s must lie in [0,1)");
  if (R < 1) throw Error("bessel_couplings: R must be >= 1");
  if (T <= 0) T = default_horizon(s, opt.tolerance);
  if (T % 2) ++T;
  if (method == WalkMethod::monte_carlo) return diamond_mc(s, R, T, opt);
  CouplingSequence c = diamond_dp(s, R, T, opt);
  if (c.pointwise_error > opt.tolerance) throw Error("bessel_couplings: horizon too small for the requested tolerance");
  return c;
}

namespace {

// Two-sided geometric law P(W = k) = rho^{|k|}/sqrt(3): horizontal displacement
// accumulated before one vertical move of the grid walk.
void convolve_geometric(const std::vector<double>& f, std::vector<double>& out, std::vector<double>& fwd) {
  const double rho = 2.0 - std::sqrt(3.0);
  const double norm = 1.0 / std::sqrt(3.0);
  const std::size_t n = f.size();
  fwd.resize(n);
  out.resize(n);
  double a = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a = f[i] + rho * a;
    fwd[i] = a;
  }
  double b = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    b = f[i] + rho * b;
    out[i] = (fwd[i] + b - f[i]) * norm;
  }
}

CouplingSequence grid_dp(double s, long R, long T) {
  FirstReturnLaw law = first_return_law(s, T);
  CouplingSequence c;
  c.source = CouplingSource::bessel_grid;
  c.s = s;
  c.alpha = 2.0 + s;
  c.R = R;
  c.horizon = T;
  const long L = static_cast<long>(std::ceil(14.0 * std::sqrt(static_cast<double>(T)))) + 80 + R;
  std::vector<double> u(2 * L + 1, 0.0), nxt, scratch;
  u[L] = 1.0;
  std::vector<KahanSum> acc(R + 1);
  KahanSum outside;
  long support = 0;
  for (long j = 1; j < T; ++j) {
    support = std::min(L, static_cast<long>(std::ceil(14.0 * std::sqrt(static_cast<double>(j)))) + 80);
    std::vector<double> f(u.begin() + (L - support), u.begin() + (L + support + 1));
    convolve_geometric(f, nxt, scratch);
    std::copy(nxt.begin(), nxt.end(), u.begin() + (L - support));
    if ((j + 1) % 2 == 0) {
      double w = law.g[j + 1];
      if (w == 0.0) continue;
      double inside = 0.0;
      for (long k = 0; k <= R; ++k) {
        double p = u[L + k];
        acc[k].add(0.5 * w * p);
        inside += k == 0 ? p : 2.0 * p;
      }
      outside.add(0.5 * w * std::max(0.0, 1.0 - inside));
    }
  }
  c.values.assign(R + 1, 0.0);
  for (long k = 0; k <= R; ++k) c.values[k] = acc[k].value();
  c.values[1] += 0.25;  // first step horizontal: the walk is back on the line at once
  double survive = 0.5 * law.tail_mass;
  std::vector<double> add = tail_completion(survive, (3.0 + s) / 2.0, 2.0, T / 2, R);
  double placed = add[0];
  for (long k = 1; k <= R; ++k) placed += 2.0 * add[k];
  for (long k = 0; k <= R; ++k) c.values[k] += add[k];
  c.completion_mass = placed;
  c.truncation_error = outside.value() + std::max(0.0, survive - placed);
  // U_j(0) <= 1/sqrt(2 pi j) up to lattice corrections; crude pointwise bound
  c.pointwise_error = survive;
  c.mass_at_zero = c.values[0];
  c.row_sum = 1.0 - c.values[0];
  return c;
}

CouplingSequence grid_mc(int d, double s, long R, long T, const BesselCouplingOptions& opt) {
  WalkSpec spec;
  spec.geometry = Geometry::grid;
  spec.d = d;
  spec.s = s;
  spec.max_steps = T;
  spec.seed = opt.seed;
  ReturnSiteHistogram h = simulate_returns(spec, opt.n_walks, R);
  CouplingSequence c;
  c.source = CouplingSource::bessel_grid;
  c.s = s;
  c.alpha = d + 1 + s;
  c.R = R;
  c.horizon = T;
  c.monte_carlo = true;
  c.values.assign(R + 1, 0.0);
  c.stderrs.assign(R + 1, 0.0);
  const double N = static_cast<double>(h.walks);
  for (long r = 0; r <= R; ++r) {
    double shell = r == 0 ? 1.0 : std::pow(2.0 * r + 1.0, d) - std::pow(2.0 * r - 1.0, d);
    double p = h.site_counts[r] / N;
    c.values[r] = p / shell;
    c.stderrs[r] = std::sqrt(p * (1.0 - p) / N) / shell;
  }
  c.survival.assign(R + 2, 0.0);
  double tail = static_cast<double>(h.beyond_radius);
  c.survival[R + 1] = tail / N;
  for (long r = R; r >= 0; --r) {
    tail += h.site_counts[r];
    c.survival[r] = tail / N;
  }
  c.mass_at_zero = c.values[0];
  c.truncation_error = static_cast<double>(h.censored + h.beyond_radius) / N;
  c.row_sum = 1.0 - c.values[0];
  return c;
}

}  // namespace

CouplingSequence grid_bessel_couplings(int d, double s, long R, long T, const BesselCouplingOptions& opt) {
  if (d < 1) throw Error("grid_bessel_couplings: d must be >= 1");
  if (!(s >= 0.0 && s < 1.0)) throw Error("grid_bessel_couplings: s must lie in [0,1)");
  if (T <= 0) T = 1L << 16;
  if (T % 2) ++T;
  if (d >= 2) return grid_mc(d, s, R, T, opt);
  return grid_dp(s, R, T);
}

double fourier_coupling_exact(double u, long r) {
  r = std::labs(r);
  if (r == 0) return -std::pow(2.0, u) * std::tgamma(u + 0.5) / (std::sqrt(M_PI) * std::tgamma(u + 1.0));
  double x = u - r + 1.0;
  if (x > 0.0) {
    // small r: -2^{-u} (-1)^r Gamma(2u+1) / (Gamma(u+r+1) Gamma(u-r+1))
    double v = std::pow(2.0, -u) * std::tgamma(2.0 * u + 1.0) / std::tgamma(u + r + 1.0) * gsl_sf_gammainv(x);
    return (r % 2) ? v : -v;
  }
  return std::pow(2.0, -u) * std::tgamma(2.0 * u + 1.0) * std::sin(M_PI * u) / M_PI *
         std::exp(std::lgamma(r - u) - std::lgamma(u + r + 1.0));
}

namespace {

struct FourierParams {
  double u;
};

double fourier_integrand(double theta, void* params) {
  double u = static_cast<FourierParams*>(params)->u;
  return std::pow(1.0 - std::cos(theta), u);
}

}  // namespace

CouplingSequence fourier_couplings(double u, long R, int quadrature_points) {
  if (!(u > 0.0 && u <= 1.0)) throw Error("fourier_couplings: u must lie in (0,1]");
  if (quadrature_points < 64) throw Error("fourier_couplings: too few quadrature points");
  CouplingSequence c;
  c.source = CouplingSource::fourier;
  c.u = u;
  c.alpha = 1.0 + 2.0 * u;
  c.s = c.alpha - 2.0;
  c.R = R;
  c.values.assign(R + 1, 0.0);
  gsl_set_error_handler_off();
  FourierParams prm{u};
  gsl_function F;
  F.function = &fourier_integrand;
  F.params = &prm;
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(quadrature_points);
  double worst_negative = 0.0;
  for (long r = 1; r <= R; ++r) {
    gsl_integration_qawo_table* tab = gsl_integration_qawo_table_alloc(static_cast<double>(r), M_PI, GSL_INTEG_COSINE, 25);
    double result = 0, err = 0;
    int status = gsl_integration_qawo(&F, 0.0, 1e-15, 1e-12, quadrature_points, ws, tab, &result, &err);
    gsl_integration_qawo_table_free(tab);
    if (status != GSL_SUCCESS && err > 1e-12) {
      gsl_integration_workspace_free(ws);
      throw Error("fourier_couplings: quadrature did not converge at r = " + std::to_string(r));
    }
    double J = -result / M_PI;
    if (J < 0) worst_negative = std::min(worst_negative, J);
    c.values[r] = J;
  }
  gsl_integration_workspace_free(ws);
  if (worst_negative < -1e-10) throw Error("fourier_couplings: negative coupling beyond tolerance");
  for (long r = 1; r <= R; ++r) c.values[r] = std::max(0.0, c.values[r]);
  // full-line row sum equals the symbol's mean value c_u = 2^u Gamma(u+1/2) / (sqrt(pi) Gamma(u+1))
  c.row_sum = std::pow(2.0, u) * std::tgamma(u + 0.5) / (std::sqrt(M_PI) * std::tgamma(u + 1.0));
  double inside = 0.0;
  for (long r = R; r >= 1; --r) inside += 2.0 * c.values[r];
  c.truncation_error = std::max(0.0, c.row_sum - inside);
  return c;
}

CouplingSequence power_law_couplings(double alpha, long R) {
  if (!(alpha > 1.0)) throw Error("power_law_couplings: alpha must exceed 1");
  if (R < 1) throw Error("power_law_couplings: R must be >= 1");
  CouplingSequence c;
  c.source = CouplingSource::power_law;
  c.alpha = alpha;
  c.s = alpha - 2.0;
  c.R = R;
  c.values.assign(R + 1, 0.0);
  for (long r = 1; r <= R; ++r) c.values[r] = std::pow(static_cast<double>(r), -alpha);
  c.row_sum = 2.0 * gsl_sf_zeta(alpha);
  c.truncation_error = 2.0 * gsl_sf_hzeta(alpha, static_cast<double>(R + 1));
  return c;
}

TailFit tail_exponent_fit(const CouplingSequence& seq, long r_min, long r_max) {
  if (r_min < 1 || r_max > seq.R || r_min >= r_max) throw Error("tail_exponent_fit: window outside 1..R");
  std::vector<long> pts = log_spaced_integers(r_min, r_max, 4, 8);
  if (pts.size() < 8) throw Error("tail_exponent_fit: window too small (need 8 points)");
  std::vector<double> x, y;
  for (long r : pts) {
    double v = seq.monte_carlo ? seq.survival[r] : seq.values[r];
    if (!(v > 0)) continue;
    x.push_back(static_cast<double>(r));
    y.push_back(v);
  }
  if (x.size() < 8) throw Error("tail_exponent_fit: too few positive values in window");
  PowerFit pf = power_law_fit(x, y);
  TailFit t;
  t.r_min = r_min;
  t.r_max = r_max;
  t.points = pf.points;
  t.residual = pf.residual;
  t.constant = pf.constant;
  // a survival function P(|k| >= r) ~ r^{-(alpha-1)} per horizontal dimension
  t.exponent = seq.monte_carlo ? pf.exponent + 1.0 : pf.exponent;
  return t;
}

}  // namespace fc
