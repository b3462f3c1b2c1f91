#include "fracchain/gaussian_fields.hpp"

#include <Eigen/Cholesky>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "fracchain/stats.hpp"

namespace fc {

Eigen::MatrixXd PrecisionOperator::to_dense() const {
  if (is_dense()) return dense;
  return Eigen::MatrixXd(sparse);
}

PrecisionOperator chain_precision(const CouplingSequence& J, long n, double beta) {
  if (n < 0) throw Error("chain_precision: n must be >= 0");
  if (!(beta > 0)) throw Error("chain_precision: beta must be positive");
  if (J.R < 2 * n && !J.has_analytic_tail())
    throw Error("chain_precision: coupling radius " + std::to_string(J.R) + " below 2n = " + std::to_string(2 * n));
  if (!(J.row_sum > 0)) throw Error("chain_precision: coupling sequence has no row sum");
  PrecisionOperator P;
  P.structure = PrecisionStructure::long_range_1d;
  P.beta = beta;
  P.n = n;
  const long N = 2 * n + 1;
  for (long i = -n; i <= n; ++i) P.sites.push_back({i, 0});
  P.dense.resize(N, N);
  for (long i = 0; i < N; ++i) {
    P.dense(i, i) = 2.0 * beta * J.row_sum;
    for (long j = i + 1; j < N; ++j) {
      double v = -2.0 * beta * J.J(j - i);
      P.dense(i, j) = v;
      P.dense(j, i) = v;
    }
  }
  return P;
}

Eigen::MatrixXd chain_covariance(const PrecisionOperator& P) {
  Eigen::MatrixXd A = P.to_dense();
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw Error("chain_covariance: precision is not positive definite");
  Eigen::MatrixXd C = llt.solve(Eigen::MatrixXd::Identity(A.rows(), A.cols()));
  return 0.5 * (C + C.transpose());
}

Eigen::MatrixXd chain_green(const CouplingSequence& J, long n) { return chain_covariance(chain_precision(J, n, 0.5)); }

namespace {

struct Neighbour {
  long x, y;
  double c;
};

// neighbours of (x, y) in the host lattice with their conductances; edges that
// do not exist (free bottom side) are omitted
void neighbours(const LatticeDomain& d, const ConductanceField* a, long x, long y, std::vector<Neighbour>& out) {
  out.clear();
  if (d.kind == DomainKind::interval) {
    out.push_back({x - 1, 0, 0.5});
    out.push_back({x + 1, 0, 0.5});
    return;
  }
  if (d.diamond()) {
    double up = a ? a->edge(y) : 0.25, dn = a ? a->edge(y - 1) : 0.25;
    out.push_back({x - 1, y + 1, up});
    out.push_back({x + 1, y + 1, up});
    out.push_back({x - 1, y - 1, dn});
    out.push_back({x + 1, y - 1, dn});
    return;
  }
  const long N = 2 * d.n + 1;
  auto wrap = [&](long v) {
    if (!d.periodic()) return v;
    v = ((v + d.n) % N + N) % N;
    return v - d.n;
  };
  out.push_back({wrap(x - 1), y, 0.25});
  out.push_back({wrap(x + 1), y, 0.25});
  out.push_back({x, wrap(y + 1), 0.25});
  if (!(d.kind == DomainKind::half_plane_free_bottom && y == 0)) out.push_back({x, wrap(y - 1), 0.25});
}

}  // namespace

struct GreenSolver::Impl {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
};

GreenSolver::GreenSolver(const LatticeDomain& dom, const ConductanceField* a, std::optional<Site> root)
    : dom_(dom), impl_(std::make_unique<Impl>()) {
  if (dom.diamond() && a && a->max_height < dom.half_width() + 1)
    throw Error("GreenSolver: conductance field too short for the domain");
  B_ = dom.half_width();
  y0_ = dom.y_min();
  width_ = 2 * B_ + 1;
  rows_ = dom.kind == DomainKind::interval ? 1 : B_ - y0_ + 1;
  grid_.assign(static_cast<std::size_t>(width_ * rows_), -1);
  for (const Site& s : dom.sites()) {
    if (root && s == *root) continue;
    grid_[(s.y - y0_) * width_ + (s.x + B_)] = static_cast<int>(sites_.size());
    sites_.push_back(s);
  }
  if (sites_.empty()) throw Error("GreenSolver: domain has no unknowns");
  std::vector<Eigen::Triplet<double>> trip;
  degree_.assign(sites_.size(), 0.0);
  std::vector<Neighbour> nb;
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    neighbours(dom, a, sites_[i].x, sites_[i].y, nb);
    double deg = 0.0;
    for (const Neighbour& e : nb) {
      deg += e.c;
      long j = index(e.x, e.y);
      if (j >= 0) trip.emplace_back(static_cast<int>(i), static_cast<int>(j), -e.c);
    }
    degree_[i] = deg;
    trip.emplace_back(static_cast<int>(i), static_cast<int>(i), deg);
  }
  const int N = static_cast<int>(sites_.size());
  L_.resize(N, N);
  L_.setFromTriplets(trip.begin(), trip.end());
  direct_ = N <= 200000;
  if (direct_) {
    impl_->ldlt.compute(L_);
    if (impl_->ldlt.info() != Eigen::Success) throw Error("GreenSolver: factorization failed");
  } else {
    impl_->cg.setTolerance(1e-10);
    impl_->cg.setMaxIterations(20 * N);
    impl_->cg.compute(L_);
  }
}

GreenSolver::~GreenSolver() = default;

long GreenSolver::index(long x, long y) const {
  if (x < -B_ || x > B_ || y < y0_ || y - y0_ >= rows_) return -1;
  return grid_[(y - y0_) * width_ + (x + B_)];
}

Eigen::VectorXd GreenSolver::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd u;
  if (direct_) {
    u = impl_->ldlt.solve(rhs);
  } else {
    u = impl_->cg.solve(rhs);
    if (impl_->cg.info() != Eigen::Success) throw Error("GreenSolver: conjugate gradient did not converge");
  }
  double nr = rhs.norm();
  last_residual_ = nr > 0 ? (L_ * u - rhs).norm() / nr : 0.0;
  return u;
}

double GreenTable::at(long x, long y) const {
  for (std::size_t i = 0; i < sites.size(); ++i)
    if (sites[i].x == x && sites[i].y == y) return values[i];
  return 0.0;
}

GreenTable green_solve(const GreenSolver& solver, Site source) {
  long i = solver.index(source.x, source.y);
  if (i < 0) throw Error("green_solve: source is not an alive site");
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<long>(solver.sites().size()));
  e[i] = 1.0;
  Eigen::VectorXd u = solver.solve(e);
  GreenTable t;
  t.source = source;
  t.sites = solver.sites();
  t.values.resize(u.size());
  for (long k = 0; k < u.size(); ++k) t.values[k] = u[k] * solver.degree()[k];
  t.residual = solver.last_residual();
  return t;
}

GreenTable green_solve(const LatticeDomain& dom, const ConductanceField* a, Site source) {
  GreenSolver solver(dom, a);
  return green_solve(solver, source);
}

PrecisionOperator gff_precision(const LatticeDomain& dom, double beta, const ConductanceField* a, std::optional<Site> root) {
  if (!(beta > 0)) throw Error("gff_precision: beta must be positive");
  GreenSolver sys(dom, a, root);
  PrecisionOperator P;
  P.structure = PrecisionStructure::nearest_neighbour_2d;
  P.beta = beta;
  P.n = dom.n;
  P.sites = sys.sites();
  P.sparse = beta * sys.laplacian();
  return P;
}

PrecisionOperator long_range_2d_precision(long n, double alpha, double beta, long range) {
  if (n < 1 || range < 1) throw Error("long_range_2d_precision: n and range must be >= 1");
  if (!(alpha > 2.0)) throw Error("long_range_2d_precision: alpha must exceed 2");
  PrecisionOperator P;
  P.structure = PrecisionStructure::long_range_2d;
  P.beta = beta;
  P.n = n;
  for (long y = -n; y <= n; ++y)
    for (long x = -n; x <= n; ++x) P.sites.push_back({x, y});
  const long side = 2 * n + 1;
  const long N = side * side;
  auto J = [&](long dx, long dy) { return std::pow(static_cast<double>(dx * dx + dy * dy), -alpha / 2.0); };
  double row = 0.0;
  for (long dy = -range; dy <= range; ++dy)
    for (long dx = -range; dx <= range; ++dx)
      if (dx != 0 || dy != 0) row += J(dx, dy);
  // omitted mass beyond the sup-norm range, by the integral of 2 pi r^{1-alpha}
  P.omitted_mass = 2.0 * M_PI * std::pow(static_cast<double>(range), 2.0 - alpha) / (alpha - 2.0);
  P.dense = Eigen::MatrixXd::Zero(N, N);
  for (long i = 0; i < N; ++i) {
    P.dense(i, i) = 2.0 * beta * row;
    const Site& a = P.sites[i];
    for (long j = i + 1; j < N; ++j) {
      const Site& b = P.sites[j];
      long dx = b.x - a.x, dy = b.y - a.y;
      if (std::labs(dx) > range || std::labs(dy) > range) continue;
      double v = -2.0 * beta * J(dx, dy);
      P.dense(i, j) = v;
      P.dense(j, i) = v;
    }
  }
  return P;
}

LineGreen line_green_generic(const LatticeDomain& dom, const ConductanceField* a) {
  GreenSolver solver(dom, a);
  LineGreen out;
  std::vector<Site> line = dom.line_sites();
  for (const Site& s : line) out.line_x.push_back(s.x);
  const long m = static_cast<long>(line.size());
  out.G.resize(m, m);
  for (long i = 0; i < m; ++i) {
    GreenTable t = green_solve(solver, line[i]);
    for (long j = 0; j < m; ++j) out.G(i, j) = t.values[solver.index(line[j].x, 0)];
  }
  out.band_height = -1;  // no band elimination
  return out;
}

struct GaussianSampler::Impl {
  bool dense = true;
  Eigen::MatrixXd U;  // upper Cholesky factor of the precision
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
  long n = 0;
};

GaussianSampler::GaussianSampler(const PrecisionOperator& P) : impl_(std::make_unique<Impl>()) {
  impl_->dense = P.is_dense();
  impl_->n = static_cast<long>(P.size());
  if (impl_->dense) {
    Eigen::LLT<Eigen::MatrixXd> llt(P.dense);
    if (llt.info() != Eigen::Success) throw Error("sample_gaussian: precision is not positive definite");
    impl_->U = llt.matrixU();
  } else {
    impl_->llt.compute(P.sparse);
    if (impl_->llt.info() != Eigen::Success) throw Error("sample_gaussian: precision is not positive definite");
  }
}

GaussianSampler::~GaussianSampler() = default;

std::size_t GaussianSampler::size() const { return static_cast<std::size_t>(impl_->n); }

Eigen::VectorXd GaussianSampler::draw(Stream& rng) const {
  Eigen::VectorXd z(impl_->n);
  for (long i = 0; i < impl_->n; ++i) z[i] = rng.normal();
  if (impl_->dense) return impl_->U.triangularView<Eigen::Upper>().solve(z);
  // A = P^T L L^T P, x = P^T L^{-T} z has covariance A^{-1}
  Eigen::VectorXd y = impl_->llt.matrixU().solve(z);
  return impl_->llt.permutationPinv() * y;
}

Eigen::VectorXd sample_gaussian(const PrecisionOperator& P, std::uint64_t seed) {
  GaussianSampler s(P);
  Stream rng(seed, 0);
  return s.draw(rng);
}

double line_energy(const std::vector<double>& v) {
  KahanSum k;
  for (std::size_t i = 1; i < v.size(); ++i) k.add((v[i] - v[i - 1]) * (v[i] - v[i - 1]));
  return k.value();
}

ShiftResult shift_and_line_energy(const GreenSolver& solver, const std::function<double(const Site&)>& f, double beta) {
  if (!(beta > 0)) throw Error("shift_and_line_energy: beta must be positive");
  const long N = static_cast<long>(solver.sites().size());
  Eigen::VectorXd rhs(N);
  for (long i = 0; i < N; ++i) rhs[i] = solver.degree()[i] * f(solver.sites()[i]) / beta;
  Eigen::VectorXd u = solver.solve(rhs);
  ShiftResult r;
  r.sites = solver.sites();
  r.sigma.assign(u.data(), u.data() + N);
  std::vector<std::pair<long, double>> line;
  for (long i = 0; i < N; ++i)
    if (r.sites[i].y == 0) line.emplace_back(r.sites[i].x, u[i]);
  std::sort(line.begin(), line.end());
  for (auto& p : line) r.line_sigma.push_back(p.second);
  r.line_energy = line_energy(r.line_sigma);
  return r;
}

}  // namespace fc
