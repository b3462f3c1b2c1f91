#pragma once
// Linear algebra for Gaussian fields: long-range chain precisions, 2D
// conductance GFF precisions, killed-walk Green functions (generic sparse
// solve and an exact band/Fourier solver for the diamond slit domains),
// Gaussian sampling, shift functions and line Dirichlet energies.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "fracchain/couplings.hpp"
#include "fracchain/lattice_domains.hpp"
#include "fracchain/rng.hpp"

namespace fc {

enum class PrecisionStructure { long_range_1d, nearest_neighbour_2d, long_range_2d };

struct PrecisionOperator {
  PrecisionStructure structure = PrecisionStructure::long_range_1d;
  double beta = 1.0;
  long n = 0;
  std::vector<Site> sites;            // field sites, index order
  Eigen::MatrixXd dense;              // long_range_1d and long_range_2d
  Eigen::SparseMatrix<double> sparse; // nearest_neighbour_2d
  double omitted_mass = 0.0;          // coupling mass left out of the diagonal (per site, bound)
  std::size_t size() const { return sites.size(); }
  bool is_dense() const { return structure != PrecisionStructure::nearest_neighbour_2d; }
  Eigen::MatrixXd to_dense() const;
};

// beta * [2 * (row sum) on the diagonal, -2 J(|i-j|) off it] on Lambda_n; the
// pair sum over ordered pairs i, j in Z counts every bond twice.
PrecisionOperator chain_precision(const CouplingSequence& J, long n, double beta);

Eigen::MatrixXd chain_covariance(const PrecisionOperator& P);

// Green function of the walk whose line trace has transition law J, killed
// outside Lambda_n: (diag(row sum) - J)^{-1}.  Equals 2 beta * chain covariance.
Eigen::MatrixXd chain_green(const CouplingSequence& J, long n);

// beta * (D - A) for the nearest-neighbour walk on a square-lattice domain
// (unit conductances 1/4) or a diamond domain (conductance field a).  A
// root site, when given, is pinned to zero and removed.
PrecisionOperator gff_precision(const LatticeDomain& dom, double beta, const ConductanceField* a = nullptr,
                                std::optional<Site> root = std::nullopt);

// Long-range field on box2d(n): J(z) = |z|_2^{-alpha} for 0 < |z|_inf <= range,
// Dirichlet exterior counted in the diagonal.
PrecisionOperator long_range_2d_precision(long n, double alpha, double beta, long range);

// Killed nearest-neighbour walk on a domain: L = D - A on alive sites.
class GreenSolver {
 public:
  GreenSolver(const LatticeDomain& dom, const ConductanceField* a = nullptr, std::optional<Site> root = std::nullopt);
  ~GreenSolver();
  GreenSolver(const GreenSolver&) = delete;
  GreenSolver& operator=(const GreenSolver&) = delete;

  const std::vector<Site>& sites() const { return sites_; }
  const std::vector<double>& degree() const { return degree_; }
  const Eigen::SparseMatrix<double>& laplacian() const { return L_; }
  long index(long x, long y) const;  // -1 when not an unknown
  bool direct() const { return direct_; }
  // u = L^{-1} rhs
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  // relative residual of the last solve
  double last_residual() const { return last_residual_; }

 private:
  LatticeDomain dom_;
  std::vector<Site> sites_;
  std::vector<double> degree_;
  std::vector<int> grid_;
  long B_ = 0, y0_ = 0, width_ = 0, rows_ = 0;
  Eigen::SparseMatrix<double> L_;
  bool direct_ = true;
  struct Impl;
  std::unique_ptr<Impl> impl_;
  mutable double last_residual_ = 0.0;
};

struct GreenTable {
  Site source;
  std::vector<Site> sites;
  std::vector<double> values;  // G(source, site): expected visits before killing
  double residual = 0.0;
  double at(long x, long y) const;
};

GreenTable green_solve(const LatticeDomain& dom, const ConductanceField* a, Site source);
GreenTable green_solve(const GreenSolver& solver, Site source);

// G restricted to the alive base-line sites, all pairs, ordered by x.  Diamond
// kinds use the exact band solver: rows away from the killed band are eliminated
// mode by mode in a sine basis, so the cost is independent of the box area.
struct LineGreen {
  std::vector<long> line_x;  // stored x coordinate of each line site
  Eigen::MatrixXd G;
  long band_height = 0;      // rows |y| <= band_height treated as sparse unknowns
  long modes = 0;
};
LineGreen line_green(const LatticeDomain& dom, const ConductanceField& a);
LineGreen line_green_generic(const LatticeDomain& dom, const ConductanceField* a);

struct TraceIdentityResult {
  long n = 0;
  double s = 0.0;
  long factor = 0;
  double max_rel_bulk = 0.0;     // over |i|, |j| <= n/2, factor-truncated 2D side
  double max_rel_all = 0.0;
  double coupling_budget = 0.0;  // propagated coupling truncation
  double domain_budget = 0.0;    // change between factor and 2 * factor
  double max_rel_extrapolated = 0.0;  // against the Richardson-extrapolated 2D side
  Eigen::MatrixXd chain;         // G_J
  Eigen::MatrixXd plane;         // G_2D on the line
};

TraceIdentityResult trace_identity_check(long n, double s, long factor, const CouplingSequence& J);
TraceIdentityResult trace_identity_check(long n, double s, long factor);

// Exact Gaussian draws from a precision operator (factor once, solve per draw).
class GaussianSampler {
 public:
  explicit GaussianSampler(const PrecisionOperator& P);
  ~GaussianSampler();
  Eigen::VectorXd draw(Stream& rng) const;
  std::size_t size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Eigen::VectorXd sample_gaussian(const PrecisionOperator& P, std::uint64_t seed);

struct ShiftResult {
  std::vector<Site> sites;
  std::vector<double> sigma;       // (1/beta) G f on every alive site
  std::vector<double> line_sigma;  // restriction to the base line, ordered by x
  double line_energy = 0.0;        // sum over neighbouring line sites (sigma_j - sigma_l)^2
};

// f given on alive sites of the solver's domain.
ShiftResult shift_and_line_energy(const GreenSolver& solver, const std::function<double(const Site&)>& f, double beta);

// Sum of squared differences of consecutive entries.
double line_energy(const std::vector<double>& v);

// Conformal radius of the square (-1,1)^2 seen from w, by a sine-series
// harmonic extension of log|z - w|.
double conformal_radius_square(double wx, double wy, int terms = 400);

}  // namespace fc
