#pragma once
// Long-range coupling constants J(r) built four ways (Spitzer closed form,
// Bessel-walk return laws on the diamond graph and on the grid, Fourier
// symbol of the fractional Laplacian, plain power law) plus tail fits.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fc {

enum class CouplingSource { spitzer, bessel_diamond, bessel_grid, fourier, power_law };

std::string to_string(CouplingSource s);

struct CouplingSequence {
  CouplingSource source = CouplingSource::power_law;
  double alpha = 2.0;
  double s = 0.0;            // alpha - 2
  double u = 1.0;            // Fourier order, when source == fourier
  long R = 0;
  std::vector<double> values;   // values[r], r = 0..R; values[0] is the mass at zero when present
  std::vector<double> stderrs;  // Monte Carlo only
  std::vector<double> survival; // Monte Carlo only: survival[r] = P(|k| >= r), r = 0..R+1
  std::optional<double> mass_at_zero;
  double truncation_error = 0.0;  // omitted mass, both sides of the line together
  double pointwise_error = 0.0;   // bound on J_true(r) - values[r] for every r
  double completion_mass = 0.0;   // mass placed by the analytic tail completion
  double row_sum = 0.0;           // sum over j in Z, j != 0, of J(|j|), exact or analytic when known
  bool monte_carlo = false;
  long horizon = 0;

  // J(|r|); beyond R the analytic tail for spitzer/power_law, otherwise 0
  double J(long r) const;
  bool has_analytic_tail() const;
  // mass_at_zero + 2 * sum_{r=1..R} J(r)
  double captured_mass() const;
};

struct TailFit {
  double exponent = 0.0;
  double constant = 0.0;
  long r_min = 0;
  long r_max = 0;
  double residual = 0.0;
  std::size_t points = 0;
};

CouplingSequence spitzer_couplings(long R);

enum class WalkMethod { dp, monte_carlo };

struct BesselCouplingOptions {
  bool tail_completion = false;  // spread the exact remaining mass over times > T with the n^{-(3+s)/2} shape
  std::uint64_t seed = 1;
  long n_walks = 1000000;        // Monte Carlo only
  double tolerance = 1e-4;       // accepted pointwise truncation bound
};

// Diamond-graph couplings.  T <= 0 picks the default horizon (smallest power of
// two whose pointwise truncation bound is below options.tolerance, capped at 2^20).
CouplingSequence bessel_couplings(double s, long R, long T, WalkMethod method,
                                  const BesselCouplingOptions& options = {});

// Grid couplings on Z^{d+1}: exact DP for d = 1, Monte Carlo for d >= 2
// (shell-averaged in the sup norm).
CouplingSequence grid_bessel_couplings(int d, double s, long R, long T,
                                       const BesselCouplingOptions& options = {});

CouplingSequence fourier_couplings(double u, long R, int quadrature_points = 4096);

// Closed form of the Fourier couplings (Gamma-function expression), for checks.
double fourier_coupling_exact(double u, long r);

CouplingSequence power_law_couplings(double alpha, long R);

TailFit tail_exponent_fit(const CouplingSequence& seq, long r_min, long r_max);

// Smallest even horizon that is a power of two and whose pointwise truncation
// bound for the diamond couplings is below tol (capped at cap).
long default_horizon(double s, double tol, long cap = 1L << 20);

}  // namespace fc
