#include "fracchain/stats.hpp"

#include <algorithm>
#include <cmath>

namespace fc {

LinearFit ols(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("ols: need at least two paired points");
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0) throw Error("ols: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.points = n;
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - f.intercept - f.slope * x[i];
    rss += r * r;
    f.max_abs_residual = std::max(f.max_abs_residual, std::fabs(r));
  }
  f.slope_se = n > 2 ? std::sqrt(rss / (n - 2) / sxx) : 0.0;
  return f;
}

PowerFit power_law_fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw Error("power_law_fit: non-positive value");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  LinearFit lf = ols(lx, ly);
  PowerFit p;
  p.exponent = -lf.slope;
  p.constant = std::exp(lf.intercept);
  p.points = lf.points;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double fit = p.constant * std::pow(x[i], -p.exponent);
    p.residual = std::max(p.residual, std::fabs(fit / y[i] - 1.0));
  }
  return p;
}

std::vector<long> log_spaced_integers(long lo, long hi, int per_octave, int min_points) {
  std::vector<long> out;
  if (lo < 1 || hi < lo) return out;
  if (hi - lo + 1 <= min_points) {
    for (long r = lo; r <= hi; ++r) out.push_back(r);
    return out;
  }
  double octaves = std::log2(static_cast<double>(hi) / lo);
  int n = std::max(min_points, static_cast<int>(std::ceil(octaves * per_octave)) + 1);
  for (;;) {
    out.clear();
    for (int i = 0; i < n; ++i) {
      long r = std::lround(lo * std::pow(static_cast<double>(hi) / lo, static_cast<double>(i) / (n - 1)));
      if (out.empty() || r != out.back()) out.push_back(r);
    }
    if (static_cast<int>(out.size()) >= min_points) break;
    ++n;
  }
  return out;
}

BatchEstimate batch_means(const std::vector<double>& series, int batches) {
  BatchEstimate e;
  if (batches < 2 || series.size() < static_cast<std::size_t>(batches)) throw Error("batch_means: series too short");
  std::size_t len = series.size() / batches;
  std::vector<double> means(batches, 0.0);
  for (int b = 0; b < batches; ++b) {
    double s = 0;
    for (std::size_t i = 0; i < len; ++i) s += series[b * len + i];
    means[b] = s / len;
  }
  double m = 0;
  for (double v : means) m += v;
  m /= batches;
  double var = 0;
  for (double v : means) var += (v - m) * (v - m);
  var /= (batches - 1);
  e.mean = m;
  e.stderr_ = std::sqrt(var / batches);
  e.batches = batches;
  bool up = true, down = true;
  for (int b = 1; b < batches; ++b) {
    up = up && means[b] > means[b - 1];
    down = down && means[b] < means[b - 1];
  }
  e.drifting = up || down;
  return e;
}

BatchEstimate batch_ratio(const std::vector<double>& num, const std::vector<double>& den, int batches) {
  if (num.size() != den.size()) throw Error("batch_ratio: length mismatch");
  std::size_t len = num.size() / batches;
  if (len == 0) throw Error("batch_ratio: series too short");
  std::vector<double> sn(batches, 0.0), sd(batches, 0.0);
  double tn = 0, td = 0;
  for (int b = 0; b < batches; ++b) {
    for (std::size_t i = 0; i < len; ++i) {
      sn[b] += num[b * len + i];
      sd[b] += den[b * len + i];
    }
    tn += sn[b];
    td += sd[b];
  }
  BatchEstimate e;
  e.mean = tn / td;
  e.batches = batches;
  std::vector<double> jk(batches);
  double jm = 0;
  for (int b = 0; b < batches; ++b) {
    jk[b] = (tn - sn[b]) / (td - sd[b]);
    jm += jk[b];
  }
  jm /= batches;
  double var = 0;
  for (double v : jk) var += (v - jm) * (v - jm);
  e.stderr_ = std::sqrt(var * (batches - 1) / batches);
  return e;
}

}  // namespace fc
