#include "fracchain/bessel_walk.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "fracchain/parallel.hpp"
#include "fracchain/stats.hpp"

namespace fc {

double BesselKernel::up(long r) const {
  if (r == 0) return 1.0;
  return std::max(0.5 - s / (4.0 * static_cast<double>(r)), 0.25);
}

BesselKernel kernel(double s) {
  if (!(s > -1.0)) throw Error("kernel: s must exceed -1");
  return BesselKernel{s};
}

namespace {

constexpr double kNegligible = 1e-40;

FirstReturnLaw compute_first_return(double s, long T) {
  BesselKernel Q = kernel(s);
  FirstReturnLaw law;
  law.s = s;
  law.horizon = T;
  law.g.assign(T + 1, 0.0);
  if (T < 1) {
    law.tail_mass = 1.0;
    return law;
  }
  std::vector<double> up(T + 3), dn(T + 3);
  for (long r = 0; r < T + 3; ++r) {
    up[r] = Q.up(r);
    dn[r] = Q.down(r);
  }
  up[0] = 0.0;  // mass reaching 0 is killed; nothing restarts from the origin
  std::vector<double> cur(T + 3, 0.0), nxt(T + 3, 0.0);
  cur[1] = 1.0;  // time 1: forced step 0 -> 1
  long hi = 1;
  for (long t = 2; t <= T; ++t) {
    // cur holds time t-1, supported on r == (t-1) mod 2
    law.g[t] = cur[1] * dn[1];
    long p = t % 2;  // parity of heights at time t
    long start = p == 0 ? 2 : 1;
    long newhi = hi + 1;
    for (long r = start; r <= newhi; r += 2) {
      double v = cur[r + 1] * dn[r + 1];
      if (r - 1 >= 1) v += cur[r - 1] * up[r - 1];
      nxt[r] = v;
    }
    for (long r = (start == 2 ? 1 : 2); r <= hi; r += 2) cur[r] = 0.0;
    std::swap(cur, nxt);
    hi = newhi;
    while (hi > 2 && cur[hi] < kNegligible && cur[hi - 1] < kNegligible) {
      cur[hi] = 0.0;
      --hi;
    }
    if (hi + 2 >= static_cast<long>(cur.size())) hi = static_cast<long>(cur.size()) - 3;
  }
  // at t = T odd positions are killed-mass-free; remaining alive mass:
  long double alive = 0.0L;
  for (long r = 1; r <= hi + 1 && r < static_cast<long>(cur.size()); ++r) alive += cur[r];
  law.tail_mass = static_cast<double>(alive);
  return law;
}

std::mutex g_cache_mu;
std::map<std::pair<double, long>, std::shared_ptr<const FirstReturnLaw>> g_cache;

}  // namespace

FirstReturnLaw first_return_law(double s, long T) {
  if (T < 2 || T % 2 != 0) throw Error("first_return_law: horizon must be even and >= 2");
  if (!(s > -1.0)) throw Error("first_return_law: s must exceed -1");
  std::pair<double, long> key{s, T};
  {
    std::lock_guard<std::mutex> lk(g_cache_mu);
    auto it = g_cache.find(key);
    if (it != g_cache.end()) return *it->second;
  }
  auto law = std::make_shared<const FirstReturnLaw>(compute_first_return(s, T));
  std::lock_guard<std::mutex> lk(g_cache_mu);
  if (g_cache.size() > 16) g_cache.clear();
  g_cache[key] = law;
  return *law;
}

std::vector<double> return_probability_profile(const FirstReturnLaw& law) {
  const long T = law.horizon;
  std::vector<double> u(T + 1, 0.0);
  u[0] = 1.0;
  for (long t = 2; t <= T; t += 2) {
    long double acc = 0.0L;
    for (long k = 2; k <= t; k += 2) acc += static_cast<long double>(law.g[k]) * u[t - k];
    u[t] = static_cast<double>(acc);
  }
  return u;
}

std::vector<double> return_probability_profile(double s, long T) {
  return return_probability_profile(first_return_law(s, T));
}

WalkOutcome simulate_walk(const WalkSpec& spec, Stream& rng) {
  BesselKernel Q = kernel(spec.s);
  WalkOutcome out;
  out.visits.assign(spec.tracked.size(), 0);
  const int d = spec.geometry == Geometry::grid ? std::max(1, spec.d) : 1;
  std::vector<long> x(d, 0);
  long y = 0;  // height |Y| of the walk, in half-steps for the diamond
  if (spec.reflect) out.side = (rng.next_u32() & 1u) ? 1 : -1;
  auto track = [&](long xv, long yv) {
    for (std::size_t i = 0; i < spec.tracked.size(); ++i)
      if (spec.tracked[i].first == xv && spec.tracked[i].second == out.side * yv) ++out.visits[i];
  };
  if (!spec.tracked.empty()) track(0, 0);
  const double scale31 = 0x1.0p-31;
  for (long t = 1; t <= spec.max_steps; ++t) {
    std::uint32_t bits = rng.next_u32();
    if (spec.geometry == Geometry::diamond) {
      x[0] += (bits & 1u) ? 1 : -1;
      double u = static_cast<double>(bits >> 1) * scale31;
      y += (u < Q.up(y)) ? 1 : -1;
    } else {
      if (bits & 1u) {
        std::uint32_t dir = (bits >> 1) % static_cast<std::uint32_t>(2 * d);
        x[dir / 2] += (dir % 2 == 0) ? 1 : -1;
      } else {
        double u = static_cast<double>(bits >> 1) * scale31;
        y += (u < Q.up(y)) ? 1 : -1;
      }
    }
    if (!spec.tracked.empty()) track(x[0], y);
    if (y == 0) {
      out.hit_time = t;
      if (spec.geometry == Geometry::diamond) {
        out.hit_site = {x[0] / 2};
      } else {
        out.hit_site = x;
      }
      return out;
    }
  }
  out.censored = true;
  out.hit_time = spec.max_steps;
  return out;
}

double ReturnSiteHistogram::frequency(long k) const {
  if (walks == 0 || std::labs(k) > radius) return 0.0;
  long c = signed_counts.empty() ? site_counts[std::labs(k)] : signed_counts[k + radius];
  return static_cast<double>(c) / walks;
}

double ReturnSiteHistogram::stderr_of(long k) const {
  double p = frequency(k);
  return walks > 0 ? std::sqrt(p * (1.0 - p) / walks) : 0.0;
}

ReturnSiteHistogram simulate_returns(const WalkSpec& spec, long n_walks, long radius) {
  const long block = 1 << 14;
  const long nblocks = (n_walks + block - 1) / block;
  const int d = spec.geometry == Geometry::grid ? std::max(1, spec.d) : 1;
  auto blank = [&] {
    ReturnSiteHistogram h;
    h.radius = radius;
    h.site_counts.assign(radius + 1, 0);
    if (d == 1) h.signed_counts.assign(2 * radius + 1, 0);
    h.time_counts.assign(spec.max_steps + 1, 0);
    return h;
  };
  ReturnSiteHistogram tot = blank();
  std::mutex mu;
  WalkSpec base = spec;
  base.tracked.clear();
  // counts are integers, so the merged totals do not depend on block order
  parallel_for(static_cast<std::size_t>(nblocks), [&](std::size_t b) {
    ReturnSiteHistogram h = blank();
    long lo = static_cast<long>(b) * block, hiw = std::min(n_walks, lo + block);
    for (long i = lo; i < hiw; ++i) {
      Stream rng(spec.seed, static_cast<std::uint64_t>(i));
      WalkOutcome o = simulate_walk(base, rng);
      ++h.walks;
      if (o.censored) {
        ++h.censored;
        continue;
      }
      ++h.time_counts[o.hit_time];
      long r = 0;
      for (long c : o.hit_site) r = std::max(r, std::labs(c));
      if (r > radius) {
        ++h.beyond_radius;
        continue;
      }
      ++h.site_counts[r];
      if (d == 1) ++h.signed_counts[o.hit_site[0] + radius];
    }
    std::lock_guard<std::mutex> lk(mu);
    tot.walks += h.walks;
    tot.censored += h.censored;
    tot.beyond_radius += h.beyond_radius;
    for (long r = 0; r <= radius; ++r) tot.site_counts[r] += h.site_counts[r];
    for (std::size_t k = 0; k < h.signed_counts.size(); ++k) tot.signed_counts[k] += h.signed_counts[k];
    for (std::size_t t = 0; t < h.time_counts.size(); ++t) tot.time_counts[t] += h.time_counts[t];
  });
  return tot;
}

}  // namespace fc
