#pragma once
// Small regression and error-bar helpers shared by all modules.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fc {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double max_abs_residual = 0.0;
  std::size_t points = 0;
};

// Ordinary least squares y = intercept + slope * x.
LinearFit ols(const std::vector<double>& x, const std::vector<double>& y);

struct PowerFit {
  double exponent = 0.0;  // y ~ constant * x^(-exponent)
  double constant = 0.0;
  double residual = 0.0;  // max relative deviation of the fitted curve on the points
  std::size_t points = 0;
};

// Least squares of log y on log x; the reported exponent is minus the slope.
PowerFit power_law_fit(const std::vector<double>& x, const std::vector<double>& y);

// Distinct integers in [lo, hi], roughly geometric, at least min_points of them
// when the range allows it.
std::vector<long> log_spaced_integers(long lo, long hi, int per_octave = 4, int min_points = 8);

class KahanSum {
 public:
  void add(double v) {
    double y = v - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

struct BatchEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  int batches = 0;
  bool drifting = false;  // batch means monotone over the whole run
};

// Batch means over a time series; the series is cut into `batches` equal
// consecutive blocks (trailing remainder dropped).
BatchEstimate batch_means(const std::vector<double>& series, int batches = 20);

// Error bar of a ratio of two batch-means series evaluated blockwise
// (jackknife over batches).
BatchEstimate batch_ratio(const std::vector<double>& num, const std::vector<double>& den, int batches = 20);

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fc
