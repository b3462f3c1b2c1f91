// Exact line Green functions on the diamond slit domains.
//
// Inside the box |X|, |Y| <= B every killed site sits in the band |Y| <= h.
// The half box above the band (rows h+1..B, killed on row h, on row B+1 and on
// the columns |X| = B+1) is translation invariant in X up to the walls, so its
// Green function restricted to row h+1 is diagonal in the sine basis
//   phi_m(X) = sqrt(1/(B+1)) sin(m pi (X+B+1) / (2(B+1))),   m = 1..2B+1,
// on which the horizontal neighbour sum acts as 2 cos(m pi / (2(B+1))).  Both
// diamond sublattices are carried along; they never couple, so restricting the
// kernel to same-parity pairs is exact.  Per mode the vertical problem is
// tridiagonal and its row-(h+1) diagonal entry of the inverse is a continued
// fraction.  The lower half box is the mirror image.  Eliminating both halves
// leaves a sparse band system with two dense blocks on rows +-h.

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "fracchain/gaussian_fields.hpp"
#include "fracchain/stats.hpp"

namespace fc {

namespace {

long killed_band_height(const LatticeDomain& d) {
  const long B = d.half_width();
  long h = -1;
  for (long y = 0; y <= B; ++y) {
    bool killed = false;
    for (long x = -B + (y & 1L); x <= B && !killed; x += 2) killed = !d.contains(x, y);
    if (!killed) break;
    h = y;
  }
  return h;
}

inline long long key(long x, long y) { return (static_cast<long long>(y) << 32) ^ static_cast<long long>(x & 0xffffffffL); }

}  // namespace

LineGreen line_green(const LatticeDomain& dom, const ConductanceField& a) {
  if (!dom.diamond()) return line_green_generic(dom, &a);
  const long B = dom.half_width();
  if (a.max_height < B + 1) throw Error("line_green: conductance field too short for the domain");
  const long h = killed_band_height(dom);
  if (h < 0 || h >= B) return line_green_generic(dom, &a);

  // band unknowns
  std::vector<Site> band;
  std::unordered_map<long long, int> idx;
  for (long y = -h; y <= h; ++y)
    for (long x = -B + (std::labs(y) & 1L); x <= B; x += 2)
      if (dom.contains(x, y)) {
        idx[key(x, y)] = static_cast<int>(band.size());
        band.push_back({x, y});
      }
  const int N = static_cast<int>(band.size());
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < N; ++i) {
    const Site& s = band[i];
    trip.emplace_back(i, i, a.degree(s.y));
    for (int dy : {-1, 1}) {
      if (std::labs(s.y + dy) > h) continue;
      double c = dy > 0 ? a.edge(s.y) : a.edge(s.y - 1);
      for (int dx : {-1, 1}) {
        auto it = idx.find(key(s.x + dx, s.y + dy));
        if (it != idx.end()) trip.emplace_back(i, it->second, -c);
      }
    }
  }

  // per-mode Green function of the upper half box at row h+1
  const long nm = 2 * B + 1;
  Eigen::VectorXd ghat(nm);
  for (long m = 1; m <= nm; ++m) {
    double lam = std::cos(M_PI * m / (2.0 * (B + 1)));
    double d = a.degree(B);
    for (long y = B - 1; y >= h + 1; --y) {
      double off = 2.0 * lam * a.edge(y);
      d = a.degree(y) - off * off / d;
    }
    ghat[m - 1] = 1.0 / d;
  }

  // columns of row h+1 touched by row h of the band
  std::vector<long> rowh;
  for (int i = 0; i < N; ++i)
    if (band[i].y == h) rowh.push_back(i);
  std::vector<long> cols;
  for (long i : rowh)
    for (int dx : {-1, 1}) {
      long x = band[i].x + dx;
      if (std::labs(x) <= B) cols.push_back(x);
    }
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  const long nc = static_cast<long>(cols.size());
  Eigen::MatrixXd Phi(nc, nm);
  const double norm = std::sqrt(1.0 / (B + 1.0));
  for (long c = 0; c < nc; ++c)
    for (long m = 1; m <= nm; ++m) Phi(c, m - 1) = norm * std::sin(M_PI * m * (cols[c] + B + 1.0) / (2.0 * (B + 1)));
  Eigen::MatrixXd Gup = Phi * ghat.asDiagonal() * Phi.transpose();
  std::unordered_map<long, long> colpos;
  for (long c = 0; c < nc; ++c) colpos[cols[c]] = c;

  // Schur complement of both half boxes onto rows +h and -h
  const double ch = a.edge(h);
  for (int sign : {1, -1}) {
    // for h = 0 both half boxes attach to row 0
    std::vector<long> rows;
    for (int i = 0; i < N; ++i)
      if (band[i].y == sign * h) rows.push_back(i);
    for (long i : rows)
      for (long j : rows) {
        double acc = 0.0;
        for (int dx : {-1, 1})
          for (int dx2 : {-1, 1}) {
            auto p = colpos.find(band[i].x + dx);
            auto q = colpos.find(band[j].x + dx2);
            if (p == colpos.end() || q == colpos.end()) continue;
            acc += Gup(p->second, q->second);
          }
        if (acc != 0.0) trip.emplace_back(static_cast<int>(i), static_cast<int>(j), -ch * ch * acc);
      }
  }
  Eigen::SparseMatrix<double> K(N, N);
  K.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
  if (ldlt.info() != Eigen::Success) throw Error("line_green: band factorization failed");

  LineGreen out;
  out.band_height = h;
  out.modes = nm;
  std::vector<int> line;
  for (int i = 0; i < N; ++i)
    if (band[i].y == 0) line.push_back(i);
  std::sort(line.begin(), line.end(), [&](int p, int q) { return band[p].x < band[q].x; });
  for (int i : line) out.line_x.push_back(band[i].x);
  const long L = static_cast<long>(line.size());
  out.G.resize(L, L);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(N);
  for (long i = 0; i < L; ++i) {
    e.setZero();
    e[line[i]] = 1.0;
    Eigen::VectorXd u = ldlt.solve(e);
    for (long j = 0; j < L; ++j) out.G(i, j) = u[line[j]] * a.degree(0);
  }
  out.G = 0.5 * (out.G + out.G.transpose()).eval();
  return out;
}

TraceIdentityResult trace_identity_check(long n, double s, long factor, const CouplingSequence& J) {
  if (factor < 8) throw Error("trace_identity_check: truncation factor must be >= 8");
  if (n < 1) throw Error("trace_identity_check: n must be >= 1");
  TraceIdentityResult r;
  r.n = n;
  r.s = s;
  r.factor = factor;
  r.chain = chain_green(J, n);
  auto plane_at = [&](long f) {
    LatticeDomain d = build_domain(DomainKind::slit_diamond, n, f);
    ConductanceField a = conductance_field(s, d.half_width() + 2);
    return line_green(d, a).G;
  };
  r.plane = plane_at(factor);
  Eigen::MatrixXd plane2 = plane_at(2 * factor);
  const long N = 2 * n + 1;
  const long bulk = n / 2;
  for (long i = 0; i < N; ++i)
    for (long j = 0; j < N; ++j) {
      double rel = std::fabs(r.chain(i, j) - r.plane(i, j)) / r.plane(i, j);
      double rel2 = std::fabs(r.chain(i, j) - 2.0 * plane2(i, j) + r.plane(i, j)) / plane2(i, j);
      double dom = std::fabs(plane2(i, j) - r.plane(i, j)) / plane2(i, j);
      r.max_rel_all = std::max(r.max_rel_all, rel);
      if (std::labs(i - n) <= bulk && std::labs(j - n) <= bulk) {
        r.max_rel_bulk = std::max(r.max_rel_bulk, rel);
        r.max_rel_extrapolated = std::max(r.max_rel_extrapolated, rel2);
        r.domain_budget = std::max(r.domain_budget, dom);
      }
    }
  // first-order perturbation of G_J: |dG| <= |G|_inf^2 |dL|_inf with dL from the pointwise coupling error
  double ginf = r.chain.cwiseAbs().rowwise().sum().maxCoeff();
  double dL = 2.0 * (2.0 * n + 1.0) * J.pointwise_error;
  r.coupling_budget = ginf * dL;
  return r;
}

TraceIdentityResult trace_identity_check(long n, double s, long factor) {
  BesselCouplingOptions opt;
  opt.tail_completion = true;
  opt.tolerance = 1e-2;
  CouplingSequence J = bessel_couplings(s, 2 * n + 1, 1L << 18, WalkMethod::dp, opt);
  return trace_identity_check(n, s, factor, J);
}

}  // namespace fc
