// Experiment bodies and the registry.

#include <gsl/gsl_sf_gamma.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "fracchain/bessel_walk.hpp"
#include "fracchain/couplings.hpp"
#include "fracchain/experiments.hpp"
#include "fracchain/fbm_reference.hpp"
#include "fracchain/gaussian_fields.hpp"
#include "fracchain/lattice_domains.hpp"
#include "fracchain/lattice_gibbs.hpp"
#include "fracchain/rng.hpp"
#include "fracchain/stats.hpp"

namespace fc {

namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr double kEulerGamma = 0.57721566490153286;

long P_long(const RunContext& c, const char* k) { return c.params.at(k).get<long>(); }
double P_d(const RunContext& c, const char* k) { return c.params.at(k).get<double>(); }
bool P_b(const RunContext& c, const char* k) { return c.params.at(k).get<bool>(); }
std::string P_s(const RunContext& c, const char* k) { return c.params.at(k).get<std::string>(); }
std::vector<double> P_vd(const RunContext& c, const char* k) { return c.params.at(k).get<std::vector<double>>(); }
std::vector<long> P_vl(const RunContext& c, const char* k) { return c.params.at(k).get<std::vector<long>>(); }

std::string tag(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%g", v);
  return b;
}

std::vector<long> even_log_points(long lo, long hi, int per_octave) {
  std::vector<long> out;
  for (long v : log_spaced_integers(lo, hi, per_octave, 8)) {
    long e = v - (v & 1L);
    if (e >= lo && (out.empty() || out.back() != e)) out.push_back(e);
  }
  return out;
}

double center_variance(const PrecisionOperator& P) {
  Eigen::MatrixXd A = P.to_dense();
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw Error("precision is not positive definite");
  const long N = A.rows();
  Eigen::VectorXd e = Eigen::VectorXd::Zero(N);
  e[N / 2] = 1.0;
  return llt.solve(e)[N / 2];
}

CouplingSequence chain_couplings(const std::string& family, double alpha, long n) {
  const long R = 2 * n + 2;
  if (family == "power_law") return power_law_couplings(alpha, R);
  if (family == "spitzer") return spitzer_couplings(R);
  if (family == "fourier") return fourier_couplings(fourier_power_from_alpha(alpha), R);
  if (family == "bessel_diamond") {
    BesselCouplingOptions opt;
    opt.tail_completion = true;
    opt.tolerance = 1.0;
    return bessel_couplings(alpha - 2.0, R, 1L << 16, WalkMethod::dp, opt);
  }
  throw Error("unknown coupling family '" + family + "'");
}

std::vector<double> block_means(const std::vector<double>& s, int blocks) {
  std::vector<double> out;
  const std::size_t len = s.size() / blocks;
  for (int b = 0; b < blocks && len > 0; ++b) {
    double acc = 0.0;
    for (std::size_t k = b * len; k < (b + 1) * len; ++k) acc += s[k];
    out.push_back(acc / len);
  }
  return out;
}

// ---------------------------------------------------------------- couplings

void run_spitzer_vs_dp(RunContext& c) {
  const long R = P_long(c, "R");
  const long T = P_long(c, "horizon");
  BesselCouplingOptions opt;
  opt.tolerance = c.tol("budget_max");
  CouplingSequence dp = bessel_couplings(0.0, R, T, WalkMethod::dp, opt);
  CouplingSequence sp = spitzer_couplings(R);
  Table t;
  t.columns = {"r", "J_dp", "J_spitzer", "abs_diff"};
  double md = 0.0;
  for (long r = 0; r <= R; ++r) {
    double d = std::fabs(dp.values[r] - sp.values[r]);
    md = std::max(md, d);
    t.add({static_cast<double>(r), dp.values[r], sp.values[r], d});
  }
  c.le_bound("max_abs_diff_vs_budget", md, dp.pointwise_error).note = "budget = pointwise truncation bound of the DP";
  c.le("truncation_budget", dp.pointwise_error, "budget_max");
  const long walks = P_long(c, "mc_walks");
  if (walks > 0) {
    BesselCouplingOptions mo;
    mo.seed = c.seed;
    mo.n_walks = walks;
    mo.tolerance = 1.0;
    CouplingSequence mc = bessel_couplings(0.0, R, P_long(c, "mc_max_steps"), WalkMethod::monte_carlo, mo);
    double worst = 0.0;
    for (long r = 1; r <= R; ++r) {
      double se = mc.stderrs.empty() ? 0.0 : mc.stderrs[r];
      if (se > 0) worst = std::max(worst, (std::fabs(mc.values[r] - sp.values[r]) - mc.pointwise_error) / se);
    }
    c.info("mc_max_excess_in_stderr", worst, 0.0, "Monte Carlo vs closed form, after the censoring budget");
  }
  c.table("couplings", t);
  c.plot("couplings", {"|J_dp - J_2|", "r", {"abs_diff"}, false, true});
}

void run_mass_normalization(RunContext& c) {
  const long Rs = P_long(c, "spitzer_R");
  CouplingSequence sp = spitzer_couplings(Rs);
  KahanSum acc;
  for (long r = Rs; r >= 1; --r) acc.add(2.0 * sp.values[r]);
  acc.add(*sp.mass_at_zero);
  double total = acc.value() + sp.truncation_error;
  c.abs_le("spitzer_total_mass", total, 1.0, "spitzer_mass");
  Table t;
  t.columns = {"s", "grid", "captured", "truncation", "total"};
  const double eps = c.tol("numeric");
  double worst_excess = -1.0, worst_deficit = -1.0;
  for (double s : P_vd(c, "s_values")) {
    for (int grid = 0; grid <= 1; ++grid) {
      CouplingSequence J;
      BesselCouplingOptions opt;
      opt.tolerance = 1.0;
      if (grid)
        J = grid_bessel_couplings(1, s, P_long(c, "R"), P_long(c, "grid_horizon"), opt);
      else
        J = bessel_couplings(s, P_long(c, "R"), P_long(c, "horizon"), WalkMethod::dp, opt);
      double cap = J.captured_mass();
      t.add({s, static_cast<double>(grid), cap, J.truncation_error, cap + J.truncation_error});
      worst_excess = std::max(worst_excess, cap - 1.0);
      worst_deficit = std::max(worst_deficit, 1.0 - cap - J.truncation_error);
    }
  }
  c.le("walk_mass_excess_over_1", worst_excess, "numeric");
  c.le("walk_mass_deficit_beyond_budget", worst_deficit, "numeric");
  (void)eps;
  c.table("walk_masses", t);
}

void run_return_site_exponent(RunContext& c) {
  const long R = P_long(c, "R"), r0 = P_long(c, "r_min"), r1 = P_long(c, "r_max");
  Table t;
  t.columns = {"r"};
  std::vector<std::vector<double>> cols;
  Table fits;
  fits.columns = {"s", "grid", "exponent", "target", "residual"};
  for (double s : P_vd(c, "s_values")) {
    BesselCouplingOptions opt;
    opt.tail_completion = true;
    opt.tolerance = 1.0;
    CouplingSequence d = bessel_couplings(s, R, P_long(c, "horizon"), WalkMethod::dp, opt);
    CouplingSequence g = grid_bessel_couplings(1, s, R, P_long(c, "grid_horizon"), opt);
    TailFit fd = tail_exponent_fit(d, r0, r1), fg = tail_exponent_fit(g, r0, r1);
    c.abs_le("diamond_exponent_s=" + tag(s), fd.exponent, 2.0 + s, "exponent");
    c.abs_le("grid_exponent_s=" + tag(s), fg.exponent, 2.0 + s, "exponent");
    fits.add({s, 0, fd.exponent, 2 + s, fd.residual});
    fits.add({s, 1, fg.exponent, 2 + s, fg.residual});
    t.columns.push_back("diamond_s=" + tag(s));
    t.columns.push_back("grid_s=" + tag(s));
    cols.push_back(d.values);
    cols.push_back(g.values);
  }
  for (long r = 1; r <= R; ++r) {
    std::vector<double> row{static_cast<double>(r)};
    for (auto& v : cols) row.push_back(v[r]);
    t.add(row);
  }
  PlotSpec p{"return-site law J(r)", "r", {}, true, true, false, true};
  for (std::size_t k = 1; k < t.columns.size(); ++k) p.y.push_back(t.columns[k]);
  c.table("return_sites", t);
  c.table("tail_fits", fits);
  c.plot("return_sites", p);
}

void run_couplings_table(RunContext& c) {
  const std::string src = P_s(c, "source");
  const long R = P_long(c, "R");
  CouplingSequence J;
  BesselCouplingOptions opt;
  opt.seed = c.seed;
  opt.n_walks = P_long(c, "mc_walks");
  opt.tail_completion = P_b(c, "tail_completion");
  opt.tolerance = 1.0;
  const WalkMethod m = P_s(c, "method") == "monte_carlo" ? WalkMethod::monte_carlo : WalkMethod::dp;
  if (src == "spitzer") J = spitzer_couplings(R);
  else if (src == "bessel_diamond") J = bessel_couplings(P_d(c, "s"), R, P_long(c, "horizon"), m, opt);
  else if (src == "bessel_grid") J = grid_bessel_couplings(static_cast<int>(P_long(c, "d")), P_d(c, "s"), R, P_long(c, "horizon"), opt);
  else if (src == "fourier") J = fourier_couplings(P_d(c, "u"), R);
  else if (src == "power_law") J = power_law_couplings(P_d(c, "alpha"), R);
  else throw ConfigError("unknown coupling source '" + src + "'");
  Table t;
  t.columns = {"r", "J", "stderr"};
  for (long r = 0; r <= R; ++r) t.add({static_cast<double>(r), J.values[r], J.stderrs.empty() ? 0.0 : J.stderrs[r]});
  long r0 = P_long(c, "fit_r_min"), r1 = std::min(P_long(c, "fit_r_max"), R);
  TailFit f = tail_exponent_fit(J, r0, r1);
  c.info("tail_exponent", f.exponent);
  c.info("tail_fit_residual", f.residual);
  c.info("truncation_error", J.truncation_error);
  c.info("captured_mass", J.captured_mass());
  c.extra["tail_fit"] = {{"exponent", f.exponent}, {"constant", f.constant}, {"r_min", f.r_min}, {"r_max", f.r_max},
                         {"residual", f.residual}, {"points", f.points}};
  c.extra["truncation_error"] = J.truncation_error;
  c.extra["pointwise_error"] = J.pointwise_error;
  c.extra["source"] = to_string(J.source);
  c.table("couplings", t);
  c.plot("couplings", {"J(r)", "r", {"J"}, true, true, true, true});
}

// --------------------------------------------------------------------- walk

void run_first_return_exponent(RunContext& c) {
  const long T = P_long(c, "horizon");
  std::vector<long> pts = even_log_points(P_long(c, "n_min"), T, 6);
  Table t;
  t.columns = {"n"};
  std::vector<std::vector<double>> cols;
  for (double s : P_vd(c, "s_values")) {
    FirstReturnLaw law = first_return_law(s, T);
    std::vector<double> x, y;
    for (long n : pts) {
      x.push_back(static_cast<double>(n));
      y.push_back(law.g[n]);
    }
    PowerFit f = power_law_fit(x, y);
    c.abs_le("g_exponent_s=" + tag(s), f.exponent, (3.0 + s) / 2.0, "exponent");
    t.columns.push_back("g_s=" + tag(s));
    cols.push_back(y);
  }
  for (std::size_t k = 0; k < pts.size(); ++k) {
    std::vector<double> row{static_cast<double>(pts[k])};
    for (auto& v : cols) row.push_back(v[k]);
    t.add(row);
  }
  PlotSpec p{"first-return law g_s(n)", "n", {}, true, true};
  for (std::size_t k = 1; k < t.columns.size(); ++k) p.y.push_back(t.columns[k]);
  c.table("first_return", t);
  c.plot("first_return", p);
}

void run_renewal_bound(RunContext& c) {
  const long T = P_long(c, "horizon");
  std::vector<long> pts = even_log_points(P_long(c, "t_min"), T, 6);
  Table t;
  t.columns = {"t"};
  std::vector<std::vector<double>> cols;
  for (double s : P_vd(c, "s_values")) {
    std::vector<double> u = return_probability_profile(s, T);
    std::vector<double> x, y;
    for (long n : pts) {
      x.push_back(static_cast<double>(n));
      y.push_back(u[n]);
    }
    PowerFit f = power_law_fit(x, y);
    c.abs_le("return_decay_exponent_s=" + tag(s), f.exponent, (1.0 - s) / 2.0, "exponent");
    t.columns.push_back("u_s=" + tag(s));
    cols.push_back(y);
  }
  for (std::size_t k = 0; k < pts.size(); ++k) {
    std::vector<double> row{static_cast<double>(pts[k])};
    for (auto& v : cols) row.push_back(v[k]);
    t.add(row);
  }
  PlotSpec p{"P[Y_t = 0]", "t", {}, true, true};
  for (std::size_t k = 1; k < t.columns.size(); ++k) p.y.push_back(t.columns[k]);
  c.table("return_profile", t);
  c.plot("return_profile", p);
}

void run_walk_returns(RunContext& c) {
  WalkSpec w;
  w.geometry = P_s(c, "geometry") == "grid" ? Geometry::grid : Geometry::diamond;
  w.d = static_cast<int>(P_long(c, "d"));
  w.s = P_d(c, "s");
  w.max_steps = P_long(c, "max_steps");
  w.seed = c.seed;
  const long R = P_long(c, "radius");
  ReturnSiteHistogram h = simulate_returns(w, P_long(c, "walks"), R);
  Table t;
  t.columns = {"site", "count", "frequency", "stderr"};
  for (long r = 0; r <= R; ++r) {
    double p = static_cast<double>(h.site_counts[r]) / h.walks;
    t.add({static_cast<double>(r), static_cast<double>(h.site_counts[r]), p, std::sqrt(p * (1.0 - p) / h.walks)});
  }
  c.info("censored_fraction", static_cast<double>(h.censored) / h.walks);
  c.info("beyond_radius_fraction", static_cast<double>(h.beyond_radius) / h.walks);
  c.table("return_sites", t);
  c.plot("return_sites", {"return-site frequencies", "site", {"frequency"}, true, true, true, false});
}

// -------------------------------------------------------------------- green

void run_trace_identity(RunContext& c) {
  const long n = P_long(c, "n"), f = P_long(c, "factor");
  Table t;
  t.columns = {"s", "i", "chain", "plane", "rel"};
  for (double s : P_vd(c, "s_values")) {
    BesselCouplingOptions opt;
    opt.tail_completion = true;
    opt.tolerance = 1e-2;
    CouplingSequence J = bessel_couplings(s, 2 * n + 1, P_long(c, "horizon"), WalkMethod::dp, opt);
    CouplingSequence J4 = bessel_couplings(s, 2 * n + 1, P_long(c, "horizon_check"), WalkMethod::dp, opt);
    TraceIdentityResult r = trace_identity_check(n, s, f, J);
    Eigen::MatrixXd g4 = chain_green(J4, n);
    double hz = 0.0;
    for (long i = n - n / 2; i <= n + n / 2; ++i)
      for (long j = n - n / 2; j <= n + n / 2; ++j) hz = std::max(hz, std::fabs(g4(i, j) - r.chain(i, j)) / r.chain(i, j));
    c.lt("bulk_rel_discrepancy_s=" + tag(s), r.max_rel_bulk, "bulk_rel");
    c.info("domain_budget_s=" + tag(s), r.domain_budget, 0.0, "change of the 2D side from factor to 2 factor");
    c.info("coupling_budget_s=" + tag(s), hz, 0.0, "change of the chain side from horizon/4 to horizon");
    c.info("rel_vs_extrapolated_s=" + tag(s), r.max_rel_extrapolated, 0.0, "against the Richardson-extrapolated 2D side");
    c.info("all_pairs_rel_s=" + tag(s), r.max_rel_all);
    for (long i = 0; i <= 2 * n; ++i)
      t.add({s, static_cast<double>(i - n), r.chain(n, i), r.plane(n, i), std::fabs(r.chain(n, i) - r.plane(n, i)) / r.plane(n, i)});
  }
  c.table("trace_row", t);
  c.plot("trace_row", {"G(0, i): chain vs plane", "i", {"chain", "plane"}, false, false});
}

void run_gff2d_log(RunContext& c) {
  std::vector<long> ns = P_vl(c, "n_values");
  Table t;
  t.columns = {"n", "G_center", "successive_diff", "residual"};
  std::vector<double> G;
  for (long n : ns) {
    LatticeDomain d = build_domain(DomainKind::box2d, n);
    GreenTable g = green_solve(d, nullptr, {0, 0});
    G.push_back(g.at(0, 0));
    t.add({static_cast<double>(n), G.back(), G.size() > 1 ? G.back() - G[G.size() - 2] : NAN, g.residual});
  }
  const double target = 2.0 / M_PI * std::log(2.0);
  if (G.size() >= 2) c.abs_le("last_successive_diff", G.back() - G[G.size() - 2], target, "diff_tol");
  const double rD = conformal_radius_square(0.0, 0.0);
  const double exact = 8.0 * std::sqrt(M_PI) / std::pow(std::tgamma(0.25), 2);
  c.info("conformal_radius_center", rD, std::fabs(rD - exact), "error = distance to 8 sqrt(pi) / Gamma(1/4)^2");
  const double n = static_cast<double>(ns.back());
  const double tail = kEulerGamma + 0.5 * std::log(8.0);
  c.abs_le("G_center_vs_log(n/r_D)_constant", G.back(), 2.0 / M_PI * (std::log(n / rD) + tail), "constant_tol");
  ResultRecord& alt = c.abs_le("G_center_vs_log(n*r_D)_constant", G.back(), 2.0 / M_PI * (std::log(n * rD) + tail), "constant_tol");
  alt.hard = false;
  alt.note = "diagnostic with the conformal radius multiplying n";
  c.table("green_center", t);
  c.plot("green_center", {"G(center) on the box", "n", {"G_center"}, true, false});
}

struct LineRow {
  std::vector<long> x;
  std::vector<double> g;
  long center = -1;
  double gxx = 0.0;
};

LineRow line_row(const LineGreen& lg, long xsrc) {
  LineRow r;
  for (std::size_t i = 0; i < lg.line_x.size(); ++i)
    if (lg.line_x[i] == xsrc) r.center = static_cast<long>(i);
  if (r.center < 0) throw Error("source is not a line site");
  for (std::size_t i = 0; i < lg.line_x.size(); ++i) {
    r.x.push_back(lg.line_x[i] / 2);
    r.g.push_back(lg.G(r.center, i));
  }
  r.gxx = lg.G(r.center, r.center);
  return r;
}

void run_gradient_energy(RunContext& c) {
  const long M = P_long(c, "M");
  std::vector<long> ns = P_vl(c, "n_values");
  Table tg, te;
  tg.columns = {"s", "n", "k", "gradient"};
  te.columns = {"s", "n", "grad_exponent", "energy_over_G"};
  for (double s : P_vd(c, "s_values")) {
    std::vector<double> ratio;
    double last_exp = 0.0;
    for (long n : ns) {
      LatticeDomain d = build_domain(DomainKind::smoothed_slit, n, M);
      ConductanceField a = conductance_field(s, d.half_width() + 2);
      LineRow r = line_row(line_green(d, a), 0);
      std::vector<double> x, y;
      const long lo = P_long(c, "grad_lo"), hi = n / P_long(c, "grad_hi_div");
      for (long k = lo; k <= hi; ++k) {
        double gk = std::fabs(r.g[r.center + k + 1] - r.g[r.center + k]);
        x.push_back(k + 0.5);  // edge midpoint
        y.push_back(gk);
        tg.add({s, static_cast<double>(n), k + 0.5, gk});
      }
      last_exp = power_law_fit(x, y).exponent;
      ratio.push_back(line_energy(r.g) / r.gxx);
      te.add({s, static_cast<double>(n), last_exp, ratio.back()});
      c.info("grad_exponent_s=" + tag(s) + "_n=" + std::to_string(n), last_exp);
    }
    c.ge_bound("grad_exponent_s=" + tag(s) + "_n=" + std::to_string(ns.back()), last_exp, 1.0 - s - c.tol("grad_slack"));
    double worst = 0.0;
    for (std::size_t k = 1; k < ratio.size(); ++k) worst = std::max(worst, ratio[k] / ratio[k - 1]);
    c.lt("energy_over_G_max_successive_ratio_s=" + tag(s), worst, "decrease_max");
  }
  // smooth volume-normalized bump: line energy of the shift function ~ 1/n
  Table tb;
  tb.columns = {"n", "line_energy", "n_times_energy"};
  std::vector<double> ne;
  const double rad = P_d(c, "bump_radius"), cy = P_d(c, "bump_center_y");
  for (long n : P_vl(c, "bump_n")) {
    LatticeDomain d = build_domain(DomainKind::box2d, n);
    GreenSolver solver(d);
    const double nn = static_cast<double>(n);
    auto f = [&](const Site& z) {
      double dx = z.x / nn / rad, dy = (z.y / nn - cy) / rad;
      double r2 = dx * dx + dy * dy;
      return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) / (nn * nn) : 0.0;
    };
    ShiftResult sh = shift_and_line_energy(solver, f, 1.0);
    ne.push_back(nn * sh.line_energy);
    tb.add({nn, sh.line_energy, ne.back()});
  }
  double spread = *std::max_element(ne.begin(), ne.end()) / *std::min_element(ne.begin(), ne.end());
  c.le("bump_n_times_energy_max_over_min", spread, "energy_factor");
  c.table("line_gradient", tg);
  c.table("energy", te);
  c.table("bump_energy", tb);
  c.plot("bump_energy", {"n * line energy of the shift", "n", {"n_times_energy"}, true, false});
}

void run_green_boundary(RunContext& c) {
  const long n = P_long(c, "n");
  const double s = P_d(c, "s");
  LatticeDomain d = build_domain(DomainKind::slit_diamond, n, P_long(c, "factor"));
  ConductanceField a = conductance_field(s, d.half_width() + 2);
  LineGreen lg = line_green(d, a);
  Table t;
  t.columns = {"x", "dist", "G_xx"};
  std::vector<double> x, y;
  const long lo = P_long(c, "dist_lo"), hi = n / P_long(c, "dist_hi_div");
  for (std::size_t i = 0; i < lg.line_x.size(); ++i) {
    long xx = lg.line_x[i] / 2, dist = n + 1 - std::labs(xx);
    t.add({static_cast<double>(xx), static_cast<double>(dist), lg.G(i, i)});
    if (xx < 0 && dist >= lo && dist <= hi) {
      x.push_back(static_cast<double>(dist));
      y.push_back(lg.G(i, i));
    }
  }
  double slope = -power_law_fit(x, y).exponent;
  c.abs_le("diag_profile_slope", slope, s, "slope_tol");
  // smoothed vs slit in the bulk
  const long m = P_long(c, "ratio_n");
  LatticeDomain ds = build_domain(DomainKind::slit_diamond, m, P_long(c, "ratio_factor"));
  ConductanceField as = conductance_field(s, ds.half_width() + 2);
  LineGreen ls = line_green(ds, as);
  Table tr;
  tr.columns = {"M", "bulk_ratio"};
  std::vector<double> ratios;
  for (long M : P_vl(c, "M_values")) {
    LatticeDomain dm = build_domain(DomainKind::smoothed_slit, m, M);
    ConductanceField am = conductance_field(s, dm.half_width() + 2);
    LineGreen lm = line_green(dm, am);
    double acc = 0.0;
    int cnt = 0;
    for (std::size_t i = 0; i < lm.line_x.size(); ++i) {
      long xx = lm.line_x[i] / 2;
      if (std::labs(xx) > m / 2) continue;
      acc += lm.G(i, i) / ls.G(xx + m, xx + m);
      ++cnt;
    }
    ratios.push_back(acc / cnt);
    tr.add({static_cast<double>(M), ratios.back()});
    c.info("bulk_ratio_M=" + std::to_string(M), ratios.back());
  }
  double inc = INFINITY;
  for (std::size_t k = 1; k < ratios.size(); ++k) inc = std::min(inc, ratios[k] - ratios[k - 1]);
  c.gt("bulk_ratio_min_increment", inc, "increment_min");
  c.le("bulk_ratio_max", *std::max_element(ratios.begin(), ratios.end()), "ratio_cap");
  c.table("diag_profile", t);
  c.table("smoothed_ratio", tr);
  c.plot("diag_profile", {"G(x,x) on the slit line", "dist", {"G_xx"}, true, true, true, false});
  c.plot("smoothed_ratio", {"smoothed / slit bulk ratio", "M", {"bulk_ratio"}, true, false});
}

void run_green_line(RunContext& c) {
  DomainKind k = domain_kind_from_string(P_s(c, "domain"));
  const long n = P_long(c, "n");
  LatticeDomain d = build_domain(k, n, P_long(c, "M"));
  Table t;
  t.columns = {"x", "G"};
  if (d.diamond()) {
    ConductanceField a = conductance_field(P_d(c, "s"), d.half_width() + 2);
    LineRow r = line_row(line_green(d, a), 2 * P_long(c, "source_x"));
    for (std::size_t i = 0; i < r.x.size(); ++i) t.add({static_cast<double>(r.x[i]), r.g[i]});
  } else {
    GreenTable g = green_solve(d, nullptr, {P_long(c, "source_x"), 0});
    for (std::size_t i = 0; i < g.sites.size(); ++i)
      if (g.sites[i].y == 0) t.add({static_cast<double>(g.sites[i].x), g.values[i]});
    c.info("solve_residual", g.residual);
  }
  c.table("line_green", t);
  c.plot("line_green", {"G(source, x) on the line", "x", {"G"}});
}

// ------------------------------------------------------------ chain-gaussian

void run_chain_variance(RunContext& c) {
  const double beta = P_d(c, "beta");
  Table t;
  t.columns = {"n", "var_alpha2", "var_alpha_pow"};
  std::vector<long> nl = P_vl(c, "n_log"), np = P_vl(c, "n_pow");
  std::vector<long> all = nl;
  all.insert(all.end(), np.begin(), np.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<double> xl, yl, xp, yp;
  const double ap = P_d(c, "alpha_pow");
  for (long n : all) {
    double v2 = NAN, vp = NAN;
    if (std::count(nl.begin(), nl.end(), n)) {
      v2 = center_variance(chain_precision(chain_couplings(P_s(c, "family_log"), 2.0, n), n, beta));
      xl.push_back(std::log(static_cast<double>(n)));
      yl.push_back(v2);
    }
    if (std::count(np.begin(), np.end(), n)) {
      vp = center_variance(chain_precision(chain_couplings(P_s(c, "family_pow"), ap, n), n, beta));
      xp.push_back(std::log(static_cast<double>(n)));
      yp.push_back(std::log(vp));
    }
    t.add({static_cast<double>(n), v2, vp});
  }
  LinearFit fl = ols(xl, yl);
  double res = 0.0;
  for (std::size_t k = 0; k < xl.size(); ++k) res = std::max(res, std::fabs(yl[k] - fl.intercept - fl.slope * xl[k]) / yl[k]);
  c.le("alpha2_affine_log_residual", res, "affine_residual");
  c.info("alpha2_log_slope", fl.slope);
  LinearFit fp = ols(xp, yp);
  c.abs_le("alpha" + tag(ap) + "_loglog_slope", fp.slope, ap - 2.0, "slope_tol");
  c.table("variance", t);
  c.plot("variance", {"Var(phi_n(0))", "n", {"var_alpha2", "var_alpha_pow"}, true, true});
}

// ---------------------------------------------------------------- fbm

void run_fbm_shape(RunContext& c) {
  const long n = P_long(c, "n");
  const double alpha = P_d(c, "alpha"), beta = P_d(c, "beta"), bulk = P_d(c, "bulk");
  const double H = hurst_from_alpha(alpha);
  Eigen::MatrixXd C = chain_covariance(chain_precision(chain_couplings(P_s(c, "family"), alpha, n), n, beta));
  RescaledField rf = rescale_chain_covariance(C, n, H);
  std::vector<long> idx;
  std::vector<double> grid;
  for (std::size_t k = 0; k < rf.t.size(); ++k)
    if (std::fabs(rf.t[k]) <= bulk) {
      idx.push_back(static_cast<long>(k));
      grid.push_back(rf.t[k]);
    }
  const long m = static_cast<long>(idx.size());
  Eigen::MatrixXd E(m, m);
  for (long i = 0; i < m; ++i)
    for (long j = 0; j < m; ++j) E(i, j) = rf.cov(idx[i], idx[j]);
  Eigen::MatrixXd T = fbm_dirichlet_matrix(H, beta, grid);
  ShapeFit f = shape_fit(grid, E, T, bulk);
  c.le("bulk_max_rel_residual", f.max_rel_residual, "shape_residual");
  c.info("fitted_scale", f.scale);
  c.info("bulk_rms_rel_residual", f.rms_rel_residual);
  std::vector<double> x, y;
  Table t;
  t.columns = {"t", "var_empirical", "var_target_scaled"};
  const double lo = P_d(c, "profile_lo"), hi = P_d(c, "profile_hi");
  for (std::size_t k = 0; k < rf.t.size(); ++k) {
    double tt = rf.t[k];
    double target = std::fabs(tt) < 1.0 ? f.scale * fbm_cov_dirichlet(H, beta, tt, tt) : 0.0;
    t.add({tt, rf.cov(k, k), target});
    double d = 1.0 - tt;
    if (tt > 0 && d >= lo && d <= hi) {
      x.push_back(std::log(1.0 - tt * tt));
      y.push_back(std::log(rf.cov(k, k)));
    }
  }
  c.abs_le("boundary_profile_exponent", ols(x, y).slope, 2.0 * H, "profile_tol");
  Table tc;
  tc.columns = {"x", "y", "empirical", "target", "residual"};
  for (long i : {m / 4, m / 2}) {
    for (long j = 0; j < m; ++j) {
      double model = f.scale * T(i, j);
      tc.add({grid[i], grid[j], E(i, j), model, (E(i, j) - model) / model});
    }
  }
  c.table("variance_profile", t);
  c.table("covariance_rows", tc);
  c.plot("variance_profile", {"rescaled variance profile", "t", {"var_empirical", "var_target_scaled"}, false, false, false, true});
  c.plot("covariance_rows", {"Cov(x, y): chain vs Dirichlet fBm", "y", {"empirical", "target"}, false, false, true, false});
}

// ----------------------------------------------------------- chain-integer

struct McRatio {
  double ratio = 0, se = 0, var_int = 0, var_gauss = 0;
  bool drifting = false;
  std::vector<double> batches;
};

McRatio integer_chain_ratio(const std::string& family, double alpha, long n, double beta, double v, long sweeps, long burn,
                            std::uint64_t seed) {
  PrecisionOperator P = chain_precision(chain_couplings(family, alpha, n), n, beta);
  McRatio r;
  r.var_gauss = center_variance(P);
  GibbsModel m = make_integer_chain(P, v);
  ObservableSpec o;
  o.site_variances = {n};
  ObservableSet run = run_experiment(m, sweeps, burn, o, seed);
  r.var_int = run.values[0].estimate.mean;
  r.ratio = r.var_int / r.var_gauss;
  r.se = run.values[0].estimate.stderr_ / r.var_gauss;
  r.drifting = run.drifting;
  r.batches = block_means(run.series[0], 20);
  return r;
}

void run_chain_invisibility(RunContext& c) {
  const double v = P_d(c, "v");
  McRatio m = integer_chain_ratio(P_s(c, "family"), P_d(c, "alpha"), P_long(c, "n"), P_d(c, "beta"), v, P_long(c, "sweeps"),
                                  P_long(c, "burn_in"), c.seed);
  c.in_range_mc("var_ratio_int_over_gauss", m.ratio, m.se, c.tol("ratio_lo"), c.tol("ratio_hi"), "se_max");
  c.info("var_gauss_center", m.var_gauss);
  c.info("drift_flag", m.drifting ? 1.0 : 0.0);
  McRatio k = integer_chain_ratio(P_s(c, "contrast_family"), P_d(c, "contrast_alpha"), P_long(c, "contrast_n"),
                                  P_d(c, "contrast_beta"), v, P_long(c, "contrast_sweeps"), P_long(c, "contrast_burn_in"), c.seed + 1);
  c.lt("contrast_ratio_plus_2se", k.ratio + 2.0 * k.se, "contrast_max");
  Table t;
  t.columns = {"batch", "var_int_main", "var_int_contrast"};
  for (std::size_t b = 0; b < m.batches.size(); ++b)
    t.add({static_cast<double>(b), m.batches[b], b < k.batches.size() ? k.batches[b] : NAN});
  const long dsw = P_long(c, "diag_sweeps");
  if (dsw > 0) {
    McRatio d = integer_chain_ratio(P_s(c, "family"), P_d(c, "alpha"), P_long(c, "n"), P_d(c, "diag_beta"), v, dsw,
                                    P_long(c, "diag_burn_in"), c.seed + 2);
    ResultRecord& r = c.in_range_mc("var_ratio_at_diag_beta", d.ratio, d.se, c.tol("ratio_lo"), c.tol("ratio_hi"), "diag_se_max");
    r.hard = false;
    r.note = "same chain at the diagnostic beta";
  }
  c.table("batch_means", t);
  c.plot("batch_means", {"batch means of E[psi_0^2]", "batch", {"var_int_main"}, false, false});
}

Eigen::VectorXd random_vector(Stream& rng, long n, double norm) {
  Eigen::VectorXd w(n);
  for (long i = 0; i < n; ++i) w[i] = rng.normal();
  return w * (norm / w.norm());
}

void run_ginibre_regev(RunContext& c) {
  const long sites = P_long(c, "n_sites");
  const long half = sites / 2;
  if (2 * half + 1 != sites) throw ConfigError("n_sites must be odd");
  const int K = static_cast<int>(P_long(c, "K"));
  const double v = P_d(c, "v"), lambda = P_d(c, "lambda");
  Stream rng(c.seed, 9);
  std::vector<Eigen::VectorXd> ws;
  {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(sites);
    w[half] = 0.8;
    ws.push_back(w);
    ws.push_back(Eigen::VectorXd::Constant(sites, 0.5));
    for (long i = 0; i < sites; ++i) w[i] = (i % 2 ? -0.6 : 0.6);
    ws.push_back(w);
    ws.push_back(random_vector(rng, sites, 1.2));
    ws.push_back(random_vector(rng, sites, 1.2));
  }
  std::vector<std::vector<long>> subsets;
  {
    std::vector<long> all(sites);
    std::iota(all.begin(), all.end(), 0L);
    subsets.push_back(all);
    std::vector<long> even;
    for (long i = 0; i < sites; i += 2) even.push_back(i);
    subsets.push_back(even);
  }
  Table t;
  t.columns = {"beta", "subset", "vector", "laplace_int", "laplace_sg", "laplace_gauss", "gap_sg_int", "gap_gauss_sg", "tail"};
  double min_gap = INFINITY, max_tail = 0.0;
  for (double beta : P_vd(c, "betas")) {
    Eigen::MatrixXd A = chain_precision(chain_couplings(P_s(c, "family"), P_d(c, "alpha"), half), half, beta).dense;
    for (std::size_t s = 0; s < subsets.size(); ++s)
      for (std::size_t k = 0; k < ws.size(); ++k) {
        double t1 = 0, t2 = 0;
        double li = enumerate_laplace(A, subsets[s], v, K, ws[k], &t1);
        double ls = sine_gordon_laplace(A, subsets[s], v, lambda, ws[k], 0, &t2);
        double lg = gaussian_laplace(A, ws[k]);
        double tail = std::max(t1 * li, t2);
        min_gap = std::min({min_gap, ls - li, lg - ls});
        max_tail = std::max(max_tail, tail);
        t.add({beta, static_cast<double>(s), static_cast<double>(k), li, ls, lg, ls - li, lg - ls, tail});
      }
  }
  c.ge("ginibre_min_gap", min_gap, "gap_floor");
  c.le("ginibre_max_truncation_bound", max_tail, "tail_max");
  // Regev: A <= B implies E_B[<w, psi>^2] <= E_A[<w, psi>^2] on the integer lattice
  Table tr;
  tr.columns = {"instance", "second_moment_A", "second_moment_B", "gap"};
  double rmin = INFINITY, rtail = 0.0;
  const int KR = static_cast<int>(P_long(c, "regev_K"));
  for (long inst = 0; inst < P_long(c, "regev_instances"); ++inst) {
    Eigen::MatrixXd G(3, 3);
    for (long i = 0; i < 3; ++i)
      for (long j = 0; j < 3; ++j) G(i, j) = 0.7 * rng.normal();
    Eigen::MatrixXd A = G * G.transpose() + P_d(c, "regev_shift") * Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd u = random_vector(rng, 3, 0.5 + rng.uniform());
    Eigen::MatrixXd B = A + u * u.transpose();
    Eigen::VectorXd w = random_vector(rng, 3, 1.0);
    EnumerationResult ea = exact_enumeration(A, {0, 1, 2}, v, KR, 1.0);
    EnumerationResult eb = exact_enumeration(B, {0, 1, 2}, v, KR, 1.0);
    double ma = w.dot(ea.second_moment * w), mb = w.dot(eb.second_moment * w);
    rmin = std::min(rmin, ma - mb);
    rtail = std::max({rtail, ea.window_tail, eb.window_tail});
    tr.add({static_cast<double>(inst), ma, mb, ma - mb});
  }
  c.ge("regev_min_gap", rmin, "gap_floor");
  c.le("regev_max_window_tail", rtail, "tail_max");
  c.table("ginibre", t);
  c.table("regev", tr);
}

void run_chain_integer_mcmc(RunContext& c) {
  const long n = P_long(c, "n");
  PrecisionOperator P = chain_precision(chain_couplings(P_s(c, "family"), P_d(c, "alpha"), n), n, P_d(c, "beta"));
  const double vg = center_variance(P);
  const double lambda = P_d(c, "lambda");
  std::vector<long> all(P.size());
  std::iota(all.begin(), all.end(), 0L);
  GibbsModel m = make_model(P, all, P_d(c, "v"), lambda < 0 ? INFINITY : lambda);
  ObservableSpec o;
  o.site_variances = {n, n / 2};
  ObservableSet r = run_chains(m, static_cast<int>(P_long(c, "chains")), P_long(c, "sweeps"), P_long(c, "burn_in"), o, c.seed);
  Table t;
  t.columns = {"site", "estimate", "stderr", "batches", "gaussian"};
  Eigen::MatrixXd C = chain_covariance(P);
  for (std::size_t k = 0; k < r.values.size(); ++k) {
    long i = o.site_variances[k];
    const auto& e = r.values[k].estimate;
    t.add({static_cast<double>(i - n), e.mean, e.stderr_, static_cast<double>(e.batches), C(i, i)});
  }
  c.info("var_ratio_center", r.values[0].estimate.mean / vg, r.values[0].estimate.stderr_ / vg);
  c.info("acceptance", r.acceptance);
  c.info("drift_flag", r.drifting ? 1.0 : 0.0);
  c.table("observables", t);
}

// -------------------------------------------------------------- gff2d-line

Eigen::VectorXd bump_pair(const GreenSolver& s, long n, double radius) {
  const long N = static_cast<long>(s.sites().size());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(N);
  const double nn = static_cast<double>(n);
  for (long k = 0; k < N; ++k) {
    const Site& z = s.sites()[k];
    auto bump = [&](double cx) {
      double dx = (z.x / nn - cx) / radius, dy = z.y / nn / radius;
      double r2 = dx * dx + dy * dy;
      return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
    };
    g[k] = (bump(-0.5) - bump(0.5)) / (nn * nn);
  }
  return g;
}

struct ConditionedRun {
  double site_ratio = 0, site_se = 0, beff = 0, beff_se = 0, cond_fraction = 0;
  bool drifting = false;
};

ConditionedRun conditioned_run(const LatticeDomain& dom, const std::vector<Site>& set, std::optional<Site> root, double beta,
                               double v, Site probe, double radius, long sweeps, long burn, std::uint64_t seed) {
  CollapsedField cf(dom, set, beta, v, root);
  CollapsedField::Pairing ps = cf.site(probe.x, probe.y);
  CollapsedField::Pairing pg = cf.pairing(bump_pair(cf.solver(), dom.n, radius));
  ObservableSpec o;
  o.pairings = {ps.c, pg.c};
  ObservableSet r = run_experiment(cf.model(), sweeps, burn, o, seed);
  ConditionedRun out;
  out.site_ratio = (r.values[0].estimate.mean + ps.conditional_var) / ps.gaussian_var;
  out.site_se = r.values[0].estimate.stderr_ / ps.gaussian_var;
  BatchEstimate b = effective_beta(r, 1, beta, pg.gaussian_var, pg.conditional_var);
  out.beff = b.mean / beta;
  out.beff_se = b.stderr_ / beta;
  out.cond_fraction = pg.conditional_var / pg.gaussian_var;
  out.drifting = r.drifting;
  return out;
}

void run_line_conditioned(RunContext& c) {
  const long n = P_long(c, "n");
  const double beta = P_d(c, "beta"), v = P_d(c, "v"), rad = P_d(c, "bump_radius");
  const long sw = P_long(c, "sweeps"), burn = P_long(c, "burn_in");
  std::vector<Site> line = line_set(n).members;
  Table t;
  t.columns = {"geometry", "site_ratio", "site_se", "beta_eff_over_beta", "beta_eff_se"};
  int g = 0;
  for (const char* geo : {"box", "torus"}) {
    bool torus = std::string(geo) == "torus";
    LatticeDomain d = build_domain(torus ? DomainKind::torus2d : DomainKind::box2d, n);
    std::optional<Site> root;
    if (torus) root = Site{0, 0};
    ConditionedRun r = conditioned_run(d, line, root, beta, v, {0, n / 2}, rad, sw, burn, c.seed + g);
    c.in_range_mc(std::string(geo) + "_bulk_variance_ratio", r.site_ratio, r.site_se, c.tol("ratio_lo"), c.tol("ratio_hi"), "se_max");
    c.in_range_mc(std::string(geo) + "_beta_eff_over_beta", r.beff, r.beff_se, c.tol("beta_eff_lo"), c.tol("beta_eff_hi"),
                  "beta_eff_se_max");
    c.info(std::string(geo) + "_conditional_fraction", r.cond_fraction, 0.0, "share of the test-function variance left Gaussian");
    t.add({static_cast<double>(g), r.site_ratio, r.site_se, r.beff, r.beff_se});
    ++g;
  }
  // the same sampler on a strip and on the fractal set
  const long ssw = P_long(c, "other_sweeps");
  if (ssw > 0) {
    LatticeDomain d = build_domain(DomainKind::box2d, n);
    ConditionedRun rs = conditioned_run(d, strip_set(n, P_long(c, "strip_width")).members, std::nullopt, beta, v, {0, n / 2},
                                        rad, ssw, ssw / 10, c.seed + 10);
    c.info("strip_bulk_variance_ratio", rs.site_ratio, rs.site_se);
    c.info("strip_beta_eff_over_beta", rs.beff, rs.beff_se);
    t.add({2, rs.site_ratio, rs.site_se, rs.beff, rs.beff_se});
    ConditioningSet fs = fractal_set(static_cast<int>(P_long(c, "fractal_level")));
    long half = 0;
    for (const Site& z : fs.members) half = std::max({half, std::labs(z.x), std::labs(z.y)});
    LatticeDomain df = build_domain(DomainKind::box2d, 2 * half + 2);
    ConditionedRun rf = conditioned_run(df, fs.members, std::nullopt, beta, v, {0, df.n / 2}, rad, ssw, ssw / 10, c.seed + 11);
    c.info("fractal_probe_variance_ratio", rf.site_ratio, rf.site_se);
    c.info("fractal_beta_eff_over_beta", rf.beff, rf.beff_se);
    t.add({3, rf.site_ratio, rf.site_se, rf.beff, rf.beff_se});
  }
  c.table("conditioned", t);
}

void run_gff2d_conditioned(RunContext& c) {
  const long n = P_long(c, "n");
  const std::string set = P_s(c, "set");
  std::vector<Site> members;
  if (set == "line") members = line_set(n).members;
  else if (set == "strip") members = strip_set(n, P_long(c, "strip_width")).members;
  else if (set == "fractal") members = fractal_set(static_cast<int>(P_long(c, "fractal_level"))).members;
  else throw ConfigError("unknown conditioning set '" + set + "'");
  bool torus = P_s(c, "geometry") == "torus";
  LatticeDomain d = build_domain(torus ? DomainKind::torus2d : DomainKind::box2d, n);
  std::optional<Site> root;
  if (torus) root = Site{0, 0};
  ConditionedRun r = conditioned_run(d, members, root, P_d(c, "beta"), P_d(c, "v"), {P_long(c, "probe_x"), P_long(c, "probe_y")},
                                     P_d(c, "bump_radius"), P_long(c, "sweeps"), P_long(c, "burn_in"), c.seed);
  c.info("probe_variance_ratio", r.site_ratio, r.site_se);
  c.info("beta_eff_over_beta", r.beff, r.beff_se);
  c.info("drift_flag", r.drifting ? 1.0 : 0.0);
}

// -------------------------------------------------------------- regimes

void run_regime_localized(RunContext& c) {
  const double alpha = P_d(c, "alpha"), beta = P_d(c, "beta");
  const long n0 = P_long(c, "n_small"), n1 = P_long(c, "n_large");
  const std::string fam = P_s(c, "family");
  double v0 = center_variance(chain_precision(chain_couplings(fam, alpha, n0), n0, beta));
  double v1 = center_variance(chain_precision(chain_couplings(fam, alpha, n1), n1, beta));
  c.lt("gauss_relative_change", std::fabs(v1 / v0 - 1.0), "gauss_change");
  const double ib = P_d(c, "int_beta"), iv = P_d(c, "int_v");
  McRatio a = integer_chain_ratio(fam, alpha, n0, ib, iv, P_long(c, "int_sweeps_small"), P_long(c, "int_sweeps_small") / 10, c.seed);
  McRatio b = integer_chain_ratio(fam, alpha, n1, ib, iv, P_long(c, "int_sweeps_large"), P_long(c, "int_sweeps_large") / 10, c.seed + 1);
  double r = b.var_int / a.var_int;
  double se = r * std::sqrt(std::pow(a.se / a.ratio, 2) + std::pow(b.se / b.ratio, 2));
  ResultRecord& rec = c.in_range_mc("int_variance_ratio_large_over_small", r, se, 1.0 - c.tol("int_change"), 1.0 + c.tol("int_change"),
                                    "int_se_max");
  rec.note = "integer side, qualitative";
  Table t;
  t.columns = {"n", "var_gauss", "var_int", "var_int_se"};
  t.add({static_cast<double>(n0), v0, a.var_int, a.se * a.var_gauss});
  t.add({static_cast<double>(n1), v1, b.var_int, b.se * b.var_gauss});
  c.table("variance", t);
}

void run_regime_brownian(RunContext& c) {
  const double alpha = P_d(c, "alpha"), beta = P_d(c, "beta");
  std::vector<double> x, y;
  Table t;
  t.columns = {"n", "var"};
  for (long n : P_vl(c, "n_values")) {
    double v = center_variance(chain_precision(chain_couplings(P_s(c, "family"), alpha, n), n, beta));
    x.push_back(std::log(static_cast<double>(n)));
    y.push_back(std::log(v));
    t.add({static_cast<double>(n), v});
  }
  c.abs_le("var_exponent", ols(x, y).slope, 1.0, "exponent_tol");
  c.table("variance", t);
  c.plot("variance", {"Var(phi_n(0))", "n", {"var"}, true, true});
}

void run_regime_2d(RunContext& c) {
  const double alpha = P_d(c, "alpha"), beta = P_d(c, "beta"), v = P_d(c, "v");
  std::vector<long> ns = P_vl(c, "n_values");
  std::vector<long> sws = P_vl(c, "sweeps");
  if (sws.size() != ns.size()) throw ConfigError("sweeps must list one entry per n");
  std::vector<double> x, y;
  Table t;
  t.columns = {"n", "var_int", "var_int_se", "var_gauss"};
  for (std::size_t k = 0; k < ns.size(); ++k) {
    long n = ns[k];
    PrecisionOperator P = long_range_2d_precision(n, alpha, beta, std::max(1L, static_cast<long>(P_d(c, "range_factor") * n)));
    double vg = center_variance(P);
    GibbsModel m = make_integer_chain(P, v);
    ObservableSpec o;
    o.site_variances = {static_cast<long>(P.size() / 2)};
    ObservableSet r = run_experiment(m, sws[k], sws[k] / 10, o, c.seed + k);
    const auto& e = r.values[0].estimate;
    x.push_back(std::log(static_cast<double>(n)));
    y.push_back(e.mean);
    t.add({static_cast<double>(n), e.mean, e.stderr_, vg});
  }
  LinearFit f = ols(x, y);
  c.gt("int_var_log_coefficient", f.slope, "log_coeff_min", f.slope_se);
  double inc = INFINITY;
  for (std::size_t k = 1; k < y.size(); ++k) inc = std::min(inc, y[k] - y[k - 1]);
  c.gt("int_var_min_increment", inc, "increment_min");
  c.table("variance", t);
  c.plot("variance", {"integer field Var(center)", "n", {"var_int", "var_gauss"}, true, false});
}

ExperimentInfo make(std::string id, int crit, std::string sub, std::string anchor, std::string desc, Json defaults, Json tol,
                    std::function<void(RunContext&)> fn) {
  ExperimentInfo e;
  e.id = std::move(id);
  e.criterion = crit;
  e.subcommand = std::move(sub);
  e.anchor = std::move(anchor);
  e.description = std::move(desc);
  e.defaults = std::move(defaults);
  e.tolerances = std::move(tol);
  e.run = std::move(fn);
  return e;
}

std::vector<ExperimentInfo> build_registry() {
  std::vector<ExperimentInfo> r;
  r.push_back(make("spitzer-vs-dp", 1, "couplings", "Spitzer closed form of the s = 0 line couplings",
                   "DP couplings at s = 0 against 2/(pi(4r^2-1))",
                   {{"R", 20}, {"horizon", 1048576}, {"mc_walks", 0}, {"mc_max_steps", 100000}}, {{"budget_max", 1e-4}},
                   run_spitzer_vs_dp));
  r.push_back(make("mass-normalization", 2, "couplings", "total mass of the return-site law",
                   "Spitzer telescoping mass and walk-derived masses",
                   {{"spitzer_R", 100000}, {"s_values", {0.0, 0.3, 0.5, 0.8}}, {"R", 512}, {"horizon", 65536}, {"grid_horizon", 65536}},
                   {{"spitzer_mass", 1e-12}, {"numeric", 1e-9}}, run_mass_normalization));
  r.push_back(make("first-return-exponent", 3, "walk", "first-return law of the Bessel walk, exponent (3+s)/2",
                   "log-log fit of g_s(n)", {{"s_values", {0.0, 0.3, 0.5, 0.8}}, {"horizon", 65536}, {"n_min", 256}},
                   {{"exponent", 0.05}}, run_first_return_exponent));
  r.push_back(make("return-site-exponent", 4, "couplings", "return-site law tail r^-(2+s), diamond and grid",
                   "tail fits over r in [16, 256]",
                   {{"s_values", {0.0, 0.3, 0.5, 0.8}}, {"R", 512}, {"horizon", 65536}, {"grid_horizon", 65536}, {"r_min", 16}, {"r_max", 256}},
                   {{"exponent", 0.1}}, run_return_site_exponent));
  r.push_back(make("trace-identity", 5, "green", "line trace of the conductance GFF equals the chain",
                   "chain Green function against the killed 2D walk on the line",
                   {{"n", 64}, {"s_values", {0.0, 0.5}}, {"factor", 16}, {"horizon", 262144}, {"horizon_check", 65536}},
                   {{"bulk_rel", 0.02}}, run_trace_identity));
  r.push_back(make("gaussian-chain-variance", 6, "chain-gaussian", "variance growth of the Gaussian chain",
                   "alpha = 2 log growth and alpha = 2.5 power growth",
                   {{"n_log", {128, 256, 512}}, {"n_pow", {128, 256, 512, 1024}}, {"beta", 1.0}, {"alpha_pow", 2.5},
                    {"family_log", "spitzer"}, {"family_pow", "power_law"}},
                   {{"affine_residual", 0.02}, {"slope_tol", 0.1}}, run_chain_variance));
  r.push_back(make("fbm-shape", 7, "fbm-compare", "scaling limit: Dirichlet fractional Brownian motion",
                   "one-scalar shape fit of the rescaled covariance",
                   {{"n", 1024}, {"alpha", 2.5}, {"beta", 1.0}, {"bulk", 0.8}, {"profile_lo", 0.02}, {"profile_hi", 0.3},
                    {"family", "power_law"}},
                   {{"shape_residual", 0.05}, {"profile_tol", 0.1}}, run_fbm_shape));
  r.push_back(make("chain-invisibility", 8, "chain-integer", "invisibility of integers for the discrete Gaussian chain",
                   "integer vs Gaussian site variance, heat-bath MCMC",
                   {{"n", 256}, {"alpha", 2.5}, {"beta", 0.05}, {"v", kTwoPi}, {"family", "power_law"}, {"sweeps", 3000000},
                    {"burn_in", 300000}, {"contrast_alpha", 2.0}, {"contrast_family", "spitzer"}, {"contrast_n", 128},
                    {"contrast_beta", 10.0}, {"contrast_sweeps", 100000}, {"contrast_burn_in", 10000}, {"diag_beta", 0.02},
                    {"diag_sweeps", 1000000}, {"diag_burn_in", 100000}},
                   {{"ratio_lo", 0.9}, {"ratio_hi", 1.0}, {"se_max", 0.03}, {"diag_se_max", 0.05}, {"contrast_max", 0.2}},
                   run_chain_invisibility));
  r.push_back(make("ginibre-regev", 9, "chain-integer", "correlation inequalities: Ginibre sandwich, Regev monotonicity",
                   "exact enumeration on 5-site chains and 3x3 matrices",
                   {{"n_sites", 5}, {"alpha", 2.5}, {"family", "power_law"}, {"betas", {1.5, 2.0, 4.0}}, {"K", 5}, {"v", 1.0},
                    {"lambda", 1.0}, {"regev_instances", 10}, {"regev_K", 5}, {"regev_shift", 3.5}},
                   {{"gap_floor", -1e-12}, {"tail_max", 1e-12}}, run_ginibre_regev));
  r.push_back(make("gff2d-log-asymptotics", 10, "green", "2D Green function at the box centre, conformal radius constant",
                   "G(center) on the box for growing n",
                   {{"n_values", {32, 64, 128, 256}}}, {{"diff_tol", 0.01}, {"constant_tol", 0.05}}, run_gff2d_log));
  r.push_back(make("line-conditioned-gff", 11, "gff2d-line", "GFF conditioned to integers on a line",
                   "collapsed line sampler on box and torus",
                   {{"n", 64}, {"beta", 0.1}, {"v", kTwoPi}, {"sweeps", 1000000}, {"burn_in", 100000}, {"bump_radius", 0.3},
                    {"other_sweeps", 100000}, {"strip_width", 2}, {"fractal_level", 3}},
                   {{"ratio_lo", 0.9}, {"ratio_hi", 1.0}, {"se_max", 0.03}, {"beta_eff_lo", 1.0}, {"beta_eff_hi", 1.15},
                    {"beta_eff_se_max", 0.05}},
                   run_line_conditioned));
  r.push_back(make("gradient-energy", 12, "green", "gradient and line Dirichlet energy estimates",
                   "line gradients of G on the smoothed slit, energy of smooth shifts",
                   {{"n_values", {32, 64, 128}}, {"M", 8}, {"s_values", {0.0, 0.5}}, {"grad_lo", 4}, {"grad_hi_div", 4},
                    {"bump_n", {32, 64, 128}}, {"bump_radius", 0.3}, {"bump_center_y", 0.35}},
                   {{"grad_slack", 0.1}, {"decrease_max", 1.0}, {"energy_factor", 1.5}}, run_gradient_energy));
  r.push_back(make("green-boundary-profile", 13, "green", "Green function boundary profile near the slit",
                   "G(x,x) against the distance to the slit; smoothed vs slit",
                   {{"n", 64}, {"factor", 16}, {"s", 0.5}, {"dist_lo", 1}, {"dist_hi_div", 4}, {"ratio_n", 32},
                    {"M_values", {4, 8, 16}}, {"ratio_factor", 64}},
                   {{"slope_tol", 0.1}, {"increment_min", 0.0}, {"ratio_cap", 1.0}}, run_green_boundary));
  r.push_back(make("regime-alpha-1.5", 14, "regimes", "localisation for alpha < 2", "variance saturation at alpha = 1.5",
                   {{"alpha", 1.5}, {"beta", 1.0}, {"family", "power_law"}, {"n_small", 256}, {"n_large", 1024}, {"int_beta", 0.02},
                    {"int_v", 1.0}, {"int_sweeps_small", 40000}, {"int_sweeps_large", 20000}},
                   {{"gauss_change", 0.05}, {"int_change", 0.1}, {"int_se_max", 0.05}}, run_regime_localized));
  r.push_back(make("regime-alpha-3.5", 14, "regimes", "Brownian regime for alpha > 3", "variance exponent at alpha = 3.5",
                   {{"alpha", 3.5}, {"beta", 1.0}, {"family", "power_law"}, {"n_values", {128, 256, 512, 1024}}},
                   {{"exponent_tol", 0.1}}, run_regime_brownian));
  r.push_back(make("regime-2d-alpha-4.5", 14, "regimes", "delocalisation of the 2D long-range integer field",
                   "integer-field variance against log n",
                   {{"alpha", 4.5}, {"beta", 0.05}, {"v", 1.0}, {"range_factor", 1.0}, {"n_values", {4, 8, 16}},
                    {"sweeps", {200000, 100000, 50000}}},
                   {{"log_coeff_min", 0.0}, {"increment_min", 0.0}}, run_regime_2d));
  r.push_back(make("renewal-bound", 15, "walk", "renewal bound for the vertical walk, exponent (1-s)/2",
                   "log-log fit of P[Y_t = 0]", {{"s_values", {0.0, 0.6}}, {"horizon", 65536}, {"t_min", 256}},
                   {{"exponent", 0.07}}, run_renewal_bound));
  // exploratory
  r.push_back(make("couplings-table", 0, "couplings", "coupling sequences", "J(r) from any source with a tail fit",
                   {{"source", "bessel_diamond"}, {"s", 0.5}, {"alpha", 2.5}, {"u", 0.75}, {"d", 1}, {"R", 512}, {"horizon", 65536},
                    {"method", "dp"}, {"mc_walks", 100000}, {"tail_completion", true}, {"fit_r_min", 16}, {"fit_r_max", 256}},
                   Json::object(), run_couplings_table));
  r.push_back(make("walk-returns", 0, "walk", "return sites of simulated walks", "Monte Carlo return-site histogram",
                   {{"geometry", "diamond"}, {"d", 1}, {"s", 0.5}, {"max_steps", 100000}, {"walks", 100000}, {"radius", 256}},
                   Json::object(), run_walk_returns));
  r.push_back(make("green-line", 0, "green", "Green function on the base line", "G(source, .) restricted to the line",
                   {{"domain", "slit_diamond"}, {"n", 32}, {"M", 16}, {"s", 0.5}, {"source_x", 0}}, Json::object(), run_green_line));
  r.push_back(make("chain-integer-mcmc", 0, "chain-integer", "integer or sine-Gordon chain", "heat-bath run on one chain",
                   {{"n", 64}, {"alpha", 2.5}, {"family", "power_law"}, {"beta", 0.05}, {"v", 1.0}, {"lambda", -1.0},
                    {"sweeps", 100000}, {"burn_in", 10000}, {"chains", 1}},
                   Json::object(), run_chain_integer_mcmc));
  r.push_back(make("gff2d-conditioned", 0, "gff2d-line", "GFF conditioned on a line, strip or fractal set",
                   "collapsed sampler on any conditioning set",
                   {{"n", 32}, {"set", "line"}, {"geometry", "box"}, {"strip_width", 1}, {"fractal_level", 2}, {"beta", 0.1},
                    {"v", kTwoPi}, {"probe_x", 0}, {"probe_y", 8}, {"bump_radius", 0.3}, {"sweeps", 100000}, {"burn_in", 10000}},
                   Json::object(), run_gff2d_conditioned));
  return r;
}

}  // namespace

const std::vector<ExperimentInfo>& registry() {
  static const std::vector<ExperimentInfo> r = build_registry();
  return r;
}

}  // namespace fc
