#include "fracchain/lattice_gibbs.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "fracchain/parallel.hpp"

namespace fc {

GibbsModel make_model(PrecisionOperator P, const std::vector<long>& conditioned, double v, double lambda) {
  if (!(v > 0)) throw Error("make_model: lattice spacing must be positive");
  if (!(lambda >= 0)) throw Error("make_model: lambda must be >= 0");
  GibbsModel m;
  const long N = static_cast<long>(P.size());
  m.precision = std::move(P);
  m.v = v;
  m.lambda = lambda;
  m.rule.assign(N, SiteRule::gaussian);
  SiteRule r = std::isinf(lambda) ? SiteRule::integer : (lambda > 0 ? SiteRule::sine_gordon : SiteRule::gaussian);
  for (long i : conditioned) {
    if (i < 0 || i >= N) throw Error("make_model: conditioned site outside the field");
    m.rule[i] = r;
  }
  return m;
}

GibbsModel make_integer_chain(PrecisionOperator P, double v) {
  std::vector<long> all(P.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<long>(i);
  return make_model(std::move(P), all, v);
}

SamplerState initial_state(const GibbsModel& m, std::uint64_t seed, std::uint64_t chain) {
  SamplerState s;
  s.phi = Eigen::VectorXd::Zero(static_cast<long>(m.precision.size()));
  s.rng = Stream(seed, chain);
  return s;
}

double DiscreteGaussianWindow::mean() const {
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) acc += (lo + static_cast<long>(k)) * p[k];
  return acc;
}

double DiscreteGaussianWindow::second_moment(double v) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    double m = static_cast<double>(lo + static_cast<long>(k));
    acc += m * m * p[k];
  }
  return acc * v * v;
}

DiscreteGaussianWindow discrete_gaussian_window(double mu, double q, double v) {
  if (!(q > 0) || !(v > 0)) throw Error("discrete_gaussian_window: q and v must be positive");
  const double c = mu / v;
  const double qv2 = q * v * v;
  const long half = static_cast<long>(std::ceil(6.0 / std::sqrt(qv2))) + 1;
  long lo = static_cast<long>(std::floor(c)) - half;
  long hi = static_cast<long>(std::ceil(c)) + half;
  auto logw = [&](long m) { double d = m - c; return -0.5 * qv2 * d * d; };
  // the largest term sits at the nearest integer, log weight >= -qv2/8
  const double ref = logw(std::lround(c));
  std::vector<double> w;
  w.reserve(hi - lo + 1);
  double total = 0.0;
  for (long m = lo; m <= hi; ++m) {
    w.push_back(std::exp(logw(m) - ref));
    total += w.back();
  }
  std::vector<double> left;
  while (true) {
    double t = std::exp(logw(lo - 1) - ref);
    if (t <= 1e-17 * total) break;
    left.push_back(t);
    total += t;
    --lo;
  }
  while (true) {
    double t = std::exp(logw(hi + 1) - ref);
    if (t <= 1e-17 * total) break;
    w.push_back(t);
    total += t;
    ++hi;
  }
  DiscreteGaussianWindow out;
  out.lo = lo;
  out.p.assign(left.rbegin(), left.rend());
  out.p.insert(out.p.end(), w.begin(), w.end());
  for (double& x : out.p) x /= total;
  // geometric bound on each side: successive ratios beyond the window are
  // at most exp(-qv2 * d) with d the distance of the first omitted point
  auto side = [&](long m) {
    double d = std::fabs(m - c);
    double t = std::exp(logw(m) - ref);
    double r = std::exp(-qv2 * d);
    return r < 1.0 ? t / (1.0 - r) : t * 1e300;
  };
  out.tail_bound = (side(lo - 1) + side(hi + 1)) / total;
  return out;
}

namespace {

long draw_from(const DiscreteGaussianWindow& w, Stream& rng) {
  double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t k = 0; k < w.p.size(); ++k) {
    acc += w.p[k];
    if (u <= acc) return w.lo + static_cast<long>(k);
  }
  return w.lo + static_cast<long>(w.p.size()) - 1;
}

}  // namespace

long sample_discrete_gaussian(double mu, double q, double v, Stream& rng) {
  return draw_from(discrete_gaussian_window(mu, q, v), rng);
}

void conditional(const GibbsModel& m, const Eigen::VectorXd& phi, long i, double& mu, double& q) {
  const PrecisionOperator& P = m.precision;
  double off = 0.0;
  if (P.is_dense()) {
    q = P.dense(i, i);
    off = P.dense.col(i).dot(phi) - q * phi[i];
  } else {
    q = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(P.sparse, i); it; ++it) {
      if (it.row() == i)
        q = it.value();
      else
        off += it.value() * phi[it.row()];
    }
  }
  if (!(q > 0)) throw Error("conditional: non-positive diagonal precision");
  mu = -off / q;
}

namespace {

// One sweep; rb_slot[i] >= 0 records E[phi_i^2 | rest] at the moment site i is
// updated into rb[rb_slot[i]].
void sweep_impl(const GibbsModel& m, SamplerState& s, const std::vector<int>* rb_slot, double* rb) {
  const PrecisionOperator& P = m.precision;
  const long N = static_cast<long>(P.size());
  const bool dense = P.is_dense();
  if (dense && (s.residual.size() != N || s.sweeps % 256 == 0)) s.residual = P.dense * s.phi;
  const double kappa = 2.0 * M_PI / m.v;
  for (long step = 0; step < N; ++step) {
    long i = m.random_scan ? static_cast<long>(s.rng.next_u64() % static_cast<std::uint64_t>(N)) : step;
    double mu, q;
    if (dense) {
      q = P.dense(i, i);
      mu = s.phi[i] - s.residual[i] / q;
    } else {
      conditional(m, s.phi, i, mu, q);
    }
    double old = s.phi[i];
    double nv = old;
    double rbv = 0.0;
    switch (m.rule[i]) {
      case SiteRule::gaussian:
        nv = mu + s.rng.normal() / std::sqrt(q);
        rbv = mu * mu + 1.0 / q;
        break;
      case SiteRule::integer: {
        DiscreteGaussianWindow w = discrete_gaussian_window(mu, q, m.v);
        nv = static_cast<double>(draw_from(w, s.rng)) * m.v;
        rbv = w.second_moment(m.v);
        break;
      }
      case SiteRule::sine_gordon: {
        double prop = mu + s.rng.normal() / std::sqrt(q);
        double la = m.lambda * (std::cos(kappa * prop) - std::cos(kappa * old));
        ++s.proposals;
        if (la >= 0.0 || s.rng.uniform() < std::exp(la)) {
          nv = prop;
          ++s.accepted;
        }
        rbv = nv * nv;
        break;
      }
    }
    if (rb_slot && (*rb_slot)[i] >= 0) rb[(*rb_slot)[i]] = rbv;
    if (nv != old) {
      s.phi[i] = nv;
      if (dense) s.residual.noalias() += P.dense.col(i) * (nv - old);
    }
  }
  ++s.sweeps;
}

}  // namespace

void heat_bath_sweep(const GibbsModel& m, SamplerState& s) { sweep_impl(m, s, nullptr, nullptr); }

const ObservableValue& ObservableSet::at(const std::string& name) const {
  for (const ObservableValue& v : values)
    if (v.name == name) return v;
  throw Error("ObservableSet: no observable named '" + name + "'");
}

namespace {

std::vector<std::string> observable_names(const ObservableSpec& obs) {
  std::vector<std::string> names;
  for (long i : obs.site_variances) names.push_back("var_site_" + std::to_string(i));
  for (auto& p : obs.pairs) names.push_back("pair_" + std::to_string(p.first) + "_" + std::to_string(p.second));
  for (std::size_t k = 0; k < obs.laplace.size(); ++k) names.push_back("laplace_" + std::to_string(k));
  for (std::size_t k = 0; k < obs.pairings.size(); ++k) names.push_back("pairing_" + std::to_string(k));
  for (std::size_t k = 0; k < obs.names.size() && k < names.size(); ++k)
    if (!obs.names[k].empty()) names[k] = obs.names[k];
  return names;
}

std::vector<std::vector<double>> run_series(const GibbsModel& m, long sweeps, long burn_in, const ObservableSpec& obs,
                                            std::uint64_t seed, std::uint64_t chain, SamplerState& s) {
  const long N = static_cast<long>(m.precision.size());
  for (long i : obs.site_variances)
    if (i < 0 || i >= N) throw Error("run_experiment: site index outside the field");
  for (const auto& w : obs.laplace)
    if (w.size() != N) throw Error("run_experiment: Laplace vector has the wrong length");
  for (const auto& g : obs.pairings)
    if (g.size() != N) throw Error("run_experiment: pairing vector has the wrong length");
  s = initial_state(m, seed, chain);
  std::vector<int> slot(N, -1);
  for (std::size_t k = 0; k < obs.site_variances.size(); ++k) slot[obs.site_variances[k]] = static_cast<int>(k);
  std::vector<double> rb(obs.site_variances.size(), 0.0);
  for (long t = 0; t < burn_in; ++t) heat_bath_sweep(m, s);
  s.burned_in = true;
  const std::size_t nobs = obs.site_variances.size() + obs.pairs.size() + obs.laplace.size() + obs.pairings.size();
  std::vector<std::vector<double>> series(nobs);
  const long kept = sweeps - burn_in;
  for (auto& v : series) v.reserve(kept);
  for (long t = 0; t < kept; ++t) {
    sweep_impl(m, s, &slot, rb.data());
    std::size_t k = 0;
    for (std::size_t j = 0; j < rb.size(); ++j) series[k++].push_back(rb[j]);
    for (auto& p : obs.pairs) series[k++].push_back(s.phi[p.first] * s.phi[p.second]);
    for (const auto& w : obs.laplace) series[k++].push_back(std::exp(w.dot(s.phi)));
    for (const auto& g : obs.pairings) {
      double x = g.dot(s.phi);
      series[k++].push_back(x * x);
    }
  }
  return series;
}

}  // namespace

ObservableSet run_experiment(const GibbsModel& m, long sweeps, long burn_in, const ObservableSpec& obs,
                             std::uint64_t seed, int batches) {
  if (sweeps <= burn_in || burn_in < 0) throw Error("run_experiment: need sweeps > burn_in >= 0");
  if (batches < 20) throw Error("run_experiment: at least 20 batches are required");
  if (sweeps - burn_in < batches) throw Error("run_experiment: fewer kept sweeps than batches");
  SamplerState s;
  ObservableSet out;
  out.series = run_series(m, sweeps, burn_in, obs, seed, 0, s);
  out.sweeps = sweeps;
  out.burn_in = burn_in;
  out.acceptance = s.proposals > 0 ? static_cast<double>(s.accepted) / s.proposals : 1.0;
  std::vector<std::string> names = observable_names(obs);
  for (std::size_t k = 0; k < out.series.size(); ++k) {
    ObservableValue v{names[k], batch_means(out.series[k], batches)};
    out.drifting = out.drifting || v.estimate.drifting;
    out.values.push_back(v);
  }
  return out;
}

ObservableSet run_chains(const GibbsModel& m, int chains, long sweeps, long burn_in, const ObservableSpec& obs,
                         std::uint64_t seed, int batches_per_chain) {
  if (chains < 1) throw Error("run_chains: need at least one chain");
  if (sweeps <= burn_in || burn_in < 0) throw Error("run_chains: need sweeps > burn_in >= 0");
  if (chains * batches_per_chain < 20) throw Error("run_chains: at least 20 batches are required");
  const long kept = sweeps - burn_in;
  // trim each chain to a multiple of its batch count so blocks never straddle chains
  const long per = kept / batches_per_chain * batches_per_chain;
  if (per == 0) throw Error("run_chains: fewer kept sweeps than batches");
  std::vector<std::vector<std::vector<double>>> parts(chains);
  std::vector<long> prop(chains, 0), acc(chains, 0);
  parallel_for(static_cast<std::size_t>(chains), [&](std::size_t c) {
    SamplerState s;
    parts[c] = run_series(m, sweeps, burn_in, obs, seed, c, s);
    prop[c] = s.proposals;
    acc[c] = s.accepted;
  });
  ObservableSet out;
  out.sweeps = sweeps;
  out.burn_in = burn_in;
  const std::size_t nobs = parts[0].size();
  out.series.assign(nobs, {});
  for (int c = 0; c < chains; ++c)
    for (std::size_t k = 0; k < nobs; ++k)
      out.series[k].insert(out.series[k].end(), parts[c][k].begin(), parts[c][k].begin() + per);
  long tp = 0, ta = 0;
  for (int c = 0; c < chains; ++c) {
    tp += prop[c];
    ta += acc[c];
  }
  out.acceptance = tp > 0 ? static_cast<double>(ta) / tp : 1.0;
  std::vector<std::string> names = observable_names(obs);
  for (std::size_t k = 0; k < nobs; ++k) {
    ObservableValue v{names[k], batch_means(out.series[k], chains * batches_per_chain)};
    if (chains > 1) {
      // drift is judged within chains
      v.estimate.drifting = false;
      for (int c = 0; c < chains; ++c) {
        std::vector<double> part(out.series[k].begin() + c * per, out.series[k].begin() + (c + 1) * per);
        v.estimate.drifting = v.estimate.drifting || batch_means(part, std::max(batches_per_chain, 2)).drifting;
      }
    }
    out.drifting = out.drifting || v.estimate.drifting;
    out.values.push_back(v);
  }
  return out;
}

BatchEstimate effective_beta(const ObservableSet& run, std::size_t pairing_index, double beta, double gaussian_variance,
                             double offset) {
  if (pairing_index >= run.values.size()) throw Error("effective_beta: no such observable");
  const BatchEstimate& e = run.values[pairing_index].estimate;
  double var = e.mean + offset;
  if (!(var > 0) || !(gaussian_variance > 0)) throw Error("effective_beta: degenerate test function (zero variance)");
  BatchEstimate out = e;
  out.mean = beta * gaussian_variance / var;
  out.stderr_ = beta * gaussian_variance * e.stderr_ / (var * var);
  return out;
}

CollapsedField::CollapsedField(const LatticeDomain& dom, const std::vector<Site>& set, double beta, double v,
                               std::optional<Site> root)
    : solver_(std::make_unique<GreenSolver>(dom, nullptr, root)), beta_(beta) {
  if (!(beta > 0)) throw Error("CollapsedField: beta must be positive");
  for (const Site& s : set) {
    if (root && s == *root) continue;  // pinned to zero, already a lattice value
    long i = solver_->index(s.x, s.y);
    if (i < 0) throw Error("CollapsedField: conditioning site outside the domain");
    set_.push_back(s);
    set_index_.push_back(i);
  }
  if (set_.empty()) throw Error("CollapsedField: empty conditioning set");
  const long k = static_cast<long>(set_.size());
  const long N = static_cast<long>(solver_->sites().size());
  G_II_.resize(k, k);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(N);
  for (long j = 0; j < k; ++j) {
    e.setZero();
    e[set_index_[j]] = 1.0;
    Eigen::VectorXd u = solver_->solve(e);
    for (long i = 0; i < k; ++i) G_II_(i, j) = u[set_index_[i]];
  }
  G_II_ = 0.5 * (G_II_ + G_II_.transpose()).eval();
  G_II_llt_.compute(G_II_);
  if (G_II_llt_.info() != Eigen::Success) throw Error("CollapsedField: set covariance is not positive definite");
  PrecisionOperator P;
  P.structure = PrecisionStructure::long_range_2d;
  P.beta = beta;
  P.n = dom.n;
  P.sites = set_;
  Eigen::MatrixXd S = G_II_llt_.solve(Eigen::MatrixXd::Identity(k, k));
  P.dense = beta * 0.5 * (S + S.transpose());
  model_ = make_integer_chain(std::move(P), v);
}

CollapsedField::Pairing CollapsedField::pairing(const Eigen::VectorXd& g) const {
  if (g.size() != static_cast<long>(solver_->sites().size())) throw Error("CollapsedField::pairing: wrong length");
  Eigen::VectorXd u = solver_->solve(g);
  Eigen::VectorXd uI(static_cast<long>(set_.size()));
  for (std::size_t i = 0; i < set_.size(); ++i) uI[i] = u[set_index_[i]];
  Pairing p;
  p.c = G_II_llt_.solve(uI);
  double gu = g.dot(u);
  p.gaussian_var = gu / beta_;
  p.conditional_var = std::max(0.0, gu - uI.dot(p.c)) / beta_;
  return p;
}

CollapsedField::Pairing CollapsedField::site(long x, long y) const {
  long i = solver_->index(x, y);
  if (i < 0) throw Error("CollapsedField::site: not an unknown of the domain");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<long>(solver_->sites().size()));
  g[i] = 1.0;
  return pairing(g);
}

double gaussian_laplace(const Eigen::MatrixXd& A, const Eigen::VectorXd& w) {
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw Error("gaussian_laplace: precision is not positive definite");
  return std::exp(0.5 * w.dot(llt.solve(w)));
}

namespace {

struct Split {
  Eigen::MatrixXd S;      // marginal precision of the conditioned sites
  Eigen::MatrixXd Mmap;   // E[phi_U | psi] = Mmap psi
  Eigen::MatrixXd CU;     // Cov(phi_U | psi)
  std::vector<long> I, U;
  double lambda_min = 0;  // of S
};

Split split(const Eigen::MatrixXd& A, const std::vector<long>& conditioned) {
  const long N = A.rows();
  if (A.cols() != N) throw Error("exact_enumeration: precision must be square");
  Split s;
  std::vector<char> in(N, 0);
  for (long i : conditioned) {
    if (i < 0 || i >= N || in[i]) throw Error("exact_enumeration: bad conditioned index");
    in[i] = 1;
    s.I.push_back(i);
  }
  for (long i = 0; i < N; ++i)
    if (!in[i]) s.U.push_back(i);
  const long k = static_cast<long>(s.I.size()), u = static_cast<long>(s.U.size());
  Eigen::MatrixXd AII(k, k), AIU(k, u), AUU(u, u);
  for (long a = 0; a < k; ++a) {
    for (long b = 0; b < k; ++b) AII(a, b) = A(s.I[a], s.I[b]);
    for (long b = 0; b < u; ++b) AIU(a, b) = A(s.I[a], s.U[b]);
  }
  for (long a = 0; a < u; ++a)
    for (long b = 0; b < u; ++b) AUU(a, b) = A(s.U[a], s.U[b]);
  s.S = AII;
  if (u > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(AUU);
    if (llt.info() != Eigen::Success) throw Error("exact_enumeration: precision is not positive definite");
    s.CU = llt.solve(Eigen::MatrixXd::Identity(u, u));
    s.Mmap = -s.CU * AIU.transpose();
    s.S = AII - AIU * s.CU * AIU.transpose();
  } else {
    s.CU.resize(0, 0);
    s.Mmap.resize(0, k);
  }
  s.S = 0.5 * (s.S + s.S.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.S, Eigen::EigenvaluesOnly);
  s.lambda_min = es.eigenvalues()[0];
  if (!(s.lambda_min > 0)) throw Error("exact_enumeration: precision is not positive definite");
  return s;
}

// Bound on sum_{m outside [-K,K]^k} exp(-lam v^2 |m|^2 / 2 + v sum |b_i||m_i|).
double window_tail(double lam, double v, const Eigen::VectorXd& b, int K) {
  const long k = b.size();
  std::vector<double> full(k), out(k);
  for (long i = 0; i < k; ++i) {
    KahanSum in, tail;
    const double a2 = 0.5 * lam * v * v, a1 = v * std::fabs(b[i]);
    const double peak = a1 / (2.0 * a2);
    double fmax = 0.0;
    for (long j = 0; j < 10000000; ++j) {
      double f = std::exp(-a2 * j * j + a1 * j);
      fmax = std::max(fmax, f);
      (j <= K ? in : tail).add(j == 0 ? f : 2.0 * f);
      if (j > K && j > peak && f < 1e-30 * fmax) break;
    }
    full[i] = in.value() + tail.value();
    out[i] = tail.value();
  }
  double total = 0.0;
  for (long i = 0; i < k; ++i) {
    double term = out[i];
    for (long l = 0; l < k; ++l)
      if (l != i) term *= full[l];
    total += term;
  }
  return total;
}

template <class F>
void for_each_config(long k, int K, F&& f) {
  std::vector<int> m(k, -K);
  Eigen::VectorXd x(k);
  while (true) {
    for (long i = 0; i < k; ++i) x[i] = m[i];
    f(m, x);
    long i = 0;
    while (i < k && ++m[i] > K) m[i++] = -K;
    if (i == k) break;
  }
}

}  // namespace

EnumerationResult exact_enumeration(const Eigen::MatrixXd& A, const std::vector<long>& conditioned, double v, int K,
                                    double tolerance) {
  if (conditioned.empty() || conditioned.size() > 8) throw Error("exact_enumeration: need 1..8 conditioned sites");
  if (K < 1 || K > 6) throw Error("exact_enumeration: window K must lie in [1, 6]");
  Split sp = split(A, conditioned);
  const long k = static_cast<long>(sp.I.size());
  const long N = A.rows();
  EnumerationResult r;
  r.marginals.assign(k, std::vector<double>(2 * K + 1, 0.0));
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd m2 = Eigen::MatrixXd::Zero(k, k);
  double Z = 0.0;
  const Eigen::MatrixXd Sv = sp.S * (v * v);
  for_each_config(k, K, [&](const std::vector<int>& m, const Eigen::VectorXd& x) {
    double w = std::exp(-0.5 * x.dot(Sv * x));
    Z += w;
    m1 += w * x;
    m2 += w * x * x.transpose();
    for (long i = 0; i < k; ++i) r.marginals[i][m[i] + K] += w;
    ++r.configurations;
  });
  r.log_partition = std::log(Z);
  for (auto& mg : r.marginals)
    for (double& p : mg) p /= Z;
  m1 *= v / Z;
  m2 *= v * v / Z;
  r.window_tail = window_tail(sp.lambda_min, v, Eigen::VectorXd::Zero(k), K) / Z;
  if (r.window_tail > tolerance)
    throw Error("exact_enumeration: window too small, tail bound " + std::to_string(r.window_tail));
  // full moments: psi on I, phi_U = Mmap psi + Gaussian(CU)
  r.mean = Eigen::VectorXd::Zero(N);
  r.second_moment = Eigen::MatrixXd::Zero(N, N);
  const long u = static_cast<long>(sp.U.size());
  Eigen::VectorXd mU = u ? Eigen::VectorXd(sp.Mmap * m1) : Eigen::VectorXd();
  Eigen::MatrixXd UU = u ? Eigen::MatrixXd(sp.Mmap * m2 * sp.Mmap.transpose() + sp.CU) : Eigen::MatrixXd();
  Eigen::MatrixXd UI = u ? Eigen::MatrixXd(sp.Mmap * m2) : Eigen::MatrixXd();
  for (long a = 0; a < k; ++a) {
    r.mean[sp.I[a]] = m1[a];
    for (long b = 0; b < k; ++b) r.second_moment(sp.I[a], sp.I[b]) = m2(a, b);
  }
  for (long a = 0; a < u; ++a) {
    r.mean[sp.U[a]] = mU[a];
    for (long b = 0; b < u; ++b) r.second_moment(sp.U[a], sp.U[b]) = UU(a, b);
    for (long b = 0; b < k; ++b) {
      r.second_moment(sp.U[a], sp.I[b]) = UI(a, b);
      r.second_moment(sp.I[b], sp.U[a]) = UI(a, b);
    }
  }
  return r;
}

double enumerate_laplace(const Eigen::MatrixXd& A, const std::vector<long>& conditioned, double v, int K,
                         const Eigen::VectorXd& w, double* tail) {
  if (conditioned.empty() || conditioned.size() > 8) throw Error("enumerate_laplace: need 1..8 conditioned sites");
  if (K < 1 || K > 6) throw Error("enumerate_laplace: window K must lie in [1, 6]");
  if (w.size() != A.rows()) throw Error("enumerate_laplace: vector has the wrong length");
  Split sp = split(A, conditioned);
  const long k = static_cast<long>(sp.I.size());
  const long u = static_cast<long>(sp.U.size());
  Eigen::VectorXd wI(k), wU(u);
  for (long a = 0; a < k; ++a) wI[a] = w[sp.I[a]];
  for (long a = 0; a < u; ++a) wU[a] = w[sp.U[a]];
  Eigen::VectorXd b = wI;
  double c = 0.0;
  if (u > 0) {
    b += sp.Mmap.transpose() * wU;
    c = 0.5 * wU.dot(sp.CU * wU);
  }
  const Eigen::MatrixXd Sv = sp.S * (v * v);
  const Eigen::VectorXd bv = b * v;
  double emax = 0.0;
  for_each_config(k, K, [&](const std::vector<int>&, const Eigen::VectorXd& x) {
    emax = std::max(emax, -0.5 * x.dot(Sv * x) + bv.dot(x));
  });
  KahanSum num, den;
  for_each_config(k, K, [&](const std::vector<int>&, const Eigen::VectorXd& x) {
    double q = -0.5 * x.dot(Sv * x);
    num.add(std::exp(q + bv.dot(x) - emax));
    den.add(std::exp(q));
  });
  if (tail) {
    double tn = window_tail(sp.lambda_min, v, b, K) / (num.value() * std::exp(emax));
    double td = window_tail(sp.lambda_min, v, Eigen::VectorXd::Zero(k), K) / den.value();
    *tail = tn + td;
  }
  return std::exp(c + emax + std::log(num.value()) - std::log(den.value()));
}

double sine_gordon_laplace(const Eigen::MatrixXd& A, const std::vector<long>& conditioned, double v, double lambda,
                           const Eigen::VectorXd& w, int qmax, double* tail) {
  const long N = A.rows();
  std::vector<long> I = conditioned;
  if (I.empty())
    for (long i = 0; i < N; ++i) I.push_back(i);
  const long n = static_cast<long>(I.size());
  if (n < 1 || n > 8) throw Error("sine_gordon_laplace: need 1..8 sine-Gordon sites");
  for (long i : I)
    if (i < 0 || i >= N) throw Error("sine_gordon_laplace: bad site index");
  if (!(lambda >= 0) || std::isinf(lambda)) throw Error("sine_gordon_laplace: lambda must be finite and >= 0");
  if (w.size() != N) throw Error("sine_gordon_laplace: vector has the wrong length");
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw Error("sine_gordon_laplace: precision is not positive definite");
  const Eigen::MatrixXd Call = llt.solve(Eigen::MatrixXd::Identity(N, N));
  const Eigen::VectorXd Cwall = Call * w;
  Eigen::MatrixXd C(n, n);
  Eigen::VectorXd Cw(n);
  for (long a = 0; a < n; ++a) {
    Cw[a] = Cwall[I[a]];
    for (long b = 0; b < n; ++b) C(a, b) = Call(I[a], I[b]);
  }
  const double gauss = std::exp(0.5 * w.dot(Cwall));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C, Eigen::EigenvaluesOnly);
  const double cmin = es.eigenvalues()[0];
  const double kappa = 2.0 * M_PI / v;
  const double g = 0.5 * kappa * kappa * cmin;
  // I_q(lambda) / I_0(lambda)
  auto ratio = [&](int q) {
    if (lambda == 0.0) return q == 0 ? 1.0 : 0.0;
    return std::cyl_bessel_i(static_cast<double>(std::abs(q)), lambda) / std::cyl_bessel_i(0.0, lambda);
  };
  auto f = [&](int j) { return ratio(j) * std::exp(-g * j * j); };
  if (qmax <= 0) {
    qmax = 1;
    while (f(qmax + 1) > 1e-18 && qmax < 40) ++qmax;
  }
  double configs = std::pow(2.0 * qmax + 1.0, static_cast<double>(n));
  if (configs > 5e7) throw Error("sine_gordon_laplace: Bessel expansion too large, lower qmax");
  std::vector<double> rq(2 * qmax + 1);
  for (int q = -qmax; q <= qmax; ++q) rq[q + qmax] = ratio(q);
  KahanSum num, den;
  for_each_config(n, qmax, [&](const std::vector<int>& m, const Eigen::VectorXd& x) {
    double wgt = 1.0;
    for (long i = 0; i < n; ++i) wgt *= rq[m[i] + qmax];
    if (wgt == 0.0) return;
    wgt *= std::exp(-0.5 * kappa * kappa * x.dot(C * x));
    den.add(wgt);
    num.add(wgt * std::cos(kappa * x.dot(Cw)));
  });
  const double ratio_val = num.value() / den.value();
  if (tail) {
    double full = 0.0, out = 0.0;
    for (int j = 0; j <= qmax + 200; ++j) {
      double t = (j == 0 ? 1.0 : 2.0) * f(j);
      full += t;
      if (j > qmax) out += t;
    }
    // the q = 0 term of the denominator is 1
    double bound = n * out * std::pow(full, static_cast<double>(n - 1)) / den.value();
    *tail = bound * (1.0 + std::fabs(ratio_val)) * gauss;
  }
  return gauss * ratio_val;
}

}  // namespace fc
