#pragma once
// Discrete Bessel walks: the vertical kernel Q_s, its first-return law, the
// renewal profile P^0[Y_t = 0], and walk simulators on the diamond graph and
// the grid Z^{d+1}.

#include <cstdint>
#include <utility>
#include <vector>

#include "fracchain/rng.hpp"

namespace fc {

struct BesselKernel {
  double s = 0.0;
  // Q_s(r, r+1); equals 1 at r = 0
  double up(long r) const;
  double down(long r) const { return r == 0 ? 0.0 : 1.0 - up(r); }
};

BesselKernel kernel(double s);

struct FirstReturnLaw {
  double s = 0.0;
  long horizon = 0;
  std::vector<double> g;  // g[n] = P^0[tau_0 = n], n = 0..horizon, zero at odd n
  double tail_mass = 0.0; // P^0[tau_0 > horizon], exact sub-probability left alive
};

// Exact dynamic programming on the killed height chain.  T must be even.
FirstReturnLaw first_return_law(double s, long T);

// u[t] = P^0[Y_t = 0] for t = 0..T, by renewal convolution of g.
std::vector<double> return_probability_profile(const FirstReturnLaw& law);
std::vector<double> return_probability_profile(double s, long T);

enum class Geometry { diamond, grid };

struct WalkSpec {
  Geometry geometry = Geometry::diamond;
  int d = 1;               // horizontal dimension for the grid
  double s = 0.0;
  long max_steps = 100000;
  std::uint64_t seed = 1;
  bool reflect = false;    // leave the base line on a uniformly chosen side instead of the upper one
  // sites whose visits are counted; diamond: (X, Y) in half-step units, grid d = 1: (x, y)
  std::vector<std::pair<long, long>> tracked;
};

struct WalkOutcome {
  bool censored = false;
  long hit_time = 0;
  std::vector<long> hit_site;  // horizontal coordinates of the first return to the base line
  int side = 1;                // vertical side of the excursion
  std::vector<long> visits;    // one count per tracked site, time 0 included
};

// One walk started at the origin, run until its first return to the base
// line (time >= 1) or max_steps.  Diamond sites are reported in line units
// (two half-steps per unit); the grid walk reports its Z^d coordinates.
WalkOutcome simulate_walk(const WalkSpec& spec, Stream& rng);

struct ReturnSiteHistogram {
  long walks = 0;
  long censored = 0;
  long radius = 0;
  std::vector<long> site_counts;   // index r in [0, radius] counts returns to |site|_inf == r (d = 1: |k| == r)
  std::vector<long> signed_counts; // d = 1 only: index k + radius, k in [-radius, radius]
  std::vector<long> time_counts;   // index n in [0, max_steps]
  long beyond_radius = 0;
  // frequency of a signed site over all walks (censored walks included in the denominator)
  double frequency(long k) const;
  double stderr_of(long k) const;
};

// Runs n_walks replicas, replica i on Stream(seed, i); accumulators merged in
// replica order.
ReturnSiteHistogram simulate_returns(const WalkSpec& spec, long n_walks, long radius);

}  // namespace fc
