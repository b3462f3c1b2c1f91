#pragma once
// Non-Gaussian lattice measures: Gaussian fields with some sites restricted to
// the lattice vZ (integer-valued, lambda = infinity) or carrying a sine-Gordon
// potential lambda cos(2 pi phi / v); heat-bath MCMC with batch-means error
// bars; collapse of a 2D GFF onto a conditioning set; exact enumeration.

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fracchain/gaussian_fields.hpp"
#include "fracchain/lattice_domains.hpp"
#include "fracchain/rng.hpp"
#include "fracchain/stats.hpp"

namespace fc {

enum class SiteRule : std::uint8_t { gaussian, integer, sine_gordon };

struct GibbsModel {
  PrecisionOperator precision;  // beta already included
  std::vector<SiteRule> rule;   // one entry per precision site
  double v = 1.0;               // lattice spacing of the restricted values
  double lambda = std::numeric_limits<double>::infinity();
  bool random_scan = false;
};

// Sites listed in `conditioned` follow the integer rule when lambda is
// infinite, the sine-Gordon rule otherwise; lambda = 0 leaves them Gaussian.
GibbsModel make_model(PrecisionOperator P, const std::vector<long>& conditioned, double v,
                      double lambda = std::numeric_limits<double>::infinity());
GibbsModel make_integer_chain(PrecisionOperator P, double v);

struct SamplerState {
  Eigen::VectorXd phi;
  long sweeps = 0;
  Stream rng{1, 0};
  bool burned_in = false;
  long proposals = 0;
  long accepted = 0;
  Eigen::VectorXd residual;  // cached A phi for dense precisions
};

SamplerState initial_state(const GibbsModel& m, std::uint64_t seed, std::uint64_t chain = 0);

// P(m) proportional to exp(-q (m v - mu)^2 / 2) on the window lo..lo+p.size()-1.
struct DiscreteGaussianWindow {
  long lo = 0;
  std::vector<double> p;
  double tail_bound = 0.0;  // upper bound on the normalized mass outside the window
  double mean() const;
  double second_moment(double v) const;
};

// The base window covers mu/v +- ceil(6 / (sqrt(q) v)) + 1 and is widened term by
// term until the next term falls below 1e-17 of the total.
DiscreteGaussianWindow discrete_gaussian_window(double mu, double q, double v);
long sample_discrete_gaussian(double mu, double q, double v, Stream& rng);

// conditional mean and precision of site i given the rest
void conditional(const GibbsModel& m, const Eigen::VectorXd& phi, long i, double& mu, double& q);

void heat_bath_sweep(const GibbsModel& m, SamplerState& s);

struct ObservableSpec {
  std::vector<long> site_variances;                 // Rao-Blackwellized E[phi_i^2]
  std::vector<std::pair<long, long>> pairs;         // E[phi_i phi_j]
  std::vector<Eigen::VectorXd> laplace;             // E[exp(<w, phi>)]
  std::vector<Eigen::VectorXd> pairings;            // E[<g, phi>^2]
  std::vector<std::string> names;                   // optional, in the order above
};

struct ObservableValue {
  std::string name;
  BatchEstimate estimate;
};

struct ObservableSet {
  std::vector<ObservableValue> values;
  long sweeps = 0;
  long burn_in = 0;
  double acceptance = 1.0;  // Metropolis acceptance of sine-Gordon updates
  bool drifting = false;
  const ObservableValue& at(const std::string& name) const;
  // per-sweep samples in the order of `values`, kept for ratio estimates
  std::vector<std::vector<double>> series;
};

// Deterministic given seed; batch means over `batches` (>= 20) blocks.
ObservableSet run_experiment(const GibbsModel& m, long sweeps, long burn_in, const ObservableSpec& obs,
                             std::uint64_t seed, int batches = 20);

// Independent chains on streams 0..chains-1 run in parallel; their series are
// concatenated in chain order and the batches split at chain boundaries.
ObservableSet run_chains(const GibbsModel& m, int chains, long sweeps, long burn_in, const ObservableSpec& obs,
                         std::uint64_t seed, int batches_per_chain = 20);

// beta * Var_gauss / Var_model for the pairing recorded at `pairing_index` of
// ObservableSet::values; `offset` is added to the recorded second moment (the
// conditional variance left out by a collapsed sampler).
BatchEstimate effective_beta(const ObservableSet& run, std::size_t pairing_index, double beta, double gaussian_variance,
                             double offset = 0.0);

// A 2D GFF of inverse temperature beta (precision beta (D - A)) with the sites
// of a conditioning set restricted to vZ.  The restricted sites are sampled from
// their exact marginal, precision beta G_II^{-1}; every linear functional of the
// full field splits into c^T psi plus an independent Gaussian remainder.
class CollapsedField {
 public:
  CollapsedField(const LatticeDomain& dom, const std::vector<Site>& set, double beta, double v,
                 std::optional<Site> root = std::nullopt);
  const GibbsModel& model() const { return model_; }
  const std::vector<Site>& set() const { return set_; }
  const GreenSolver& solver() const { return *solver_; }
  double beta() const { return beta_; }

  struct Pairing {
    Eigen::VectorXd c;        // weights on the set
    double gaussian_var = 0;  // Var of <g, phi> without conditioning
    double conditional_var = 0;
  };
  // g over the solver's unknowns
  Pairing pairing(const Eigen::VectorXd& g) const;
  Pairing site(long x, long y) const;

 private:
  std::unique_ptr<GreenSolver> solver_;
  std::vector<Site> set_;
  std::vector<long> set_index_;
  Eigen::MatrixXd G_II_;
  Eigen::LLT<Eigen::MatrixXd> G_II_llt_;
  GibbsModel model_;
  double beta_ = 1.0;
};

// Exact enumeration over integer-valued sites (<= 8 of them, window |m| <= K),
// the remaining sites integrated out through the Schur complement.
struct EnumerationResult {
  double log_partition = 0.0;               // log sum exp(-psi^T S psi / 2) over the window
  Eigen::VectorXd mean;                     // all sites
  Eigen::MatrixXd second_moment;            // all sites, E[phi phi^T]
  std::vector<std::vector<double>> marginals;  // per conditioned site, index m + K
  double window_tail = 0.0;                 // bound on the relative mass outside the window
  long configurations = 0;
};

// Throws when the window tail bound exceeds `tolerance`.
EnumerationResult exact_enumeration(const Eigen::MatrixXd& A, const std::vector<long>& conditioned, double v, int K,
                                    double tolerance = 1e-6);

// E[exp(<w, phi>)] for the integer-restricted model (enumeration), with the
// window tail bound for the tilted sum in `tail`.
double enumerate_laplace(const Eigen::MatrixXd& A, const std::vector<long>& conditioned, double v, int K,
                         const Eigen::VectorXd& w, double* tail = nullptr);

// Sine-Gordon Laplace transform: density exp(-<phi, A phi>/2 + lambda sum_{i in I}
// cos(2 pi phi_i / v)), I = conditioned (all sites when empty), through the
// Bessel expansion exp(lambda cos t) = sum_q I_q(lambda) e^{iqt}.
double sine_gordon_laplace(const Eigen::MatrixXd& A, const std::vector<long>& conditioned, double v, double lambda,
                           const Eigen::VectorXd& w, int qmax = 0, double* tail = nullptr);

// exp(<w, A^{-1} w> / 2)
double gaussian_laplace(const Eigen::MatrixXd& A, const Eigen::VectorXd& w);

}  // namespace fc
