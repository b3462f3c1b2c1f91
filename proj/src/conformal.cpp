#include <gsl/gsl_integration.h>

#include <cmath>

#include "fracchain/gaussian_fields.hpp"
#include "fracchain/stats.hpp"

namespace fc {

namespace {

// sinh(a) / sinh(b) for 0 <= a <= b without overflow
double sinh_ratio(double a, double b) {
  if (b == 0.0) return 0.0;
  return std::exp(a - b) * (-std::expm1(-2.0 * a)) / (-std::expm1(-2.0 * b));
}

}  // namespace

double conformal_radius_square(double wx, double wy, int terms) {
  if (!(std::fabs(wx) < 1.0 && std::fabs(wy) < 1.0)) throw Error("conformal_radius_square: w must lie inside the square");
  if (terms < 16) throw Error("conformal_radius_square: too few terms");
  // u harmonic in the square with u = log|z - w| on the boundary; log r_D(w) = u(w)
  const int nodes = std::max(2048, 8 * terms);
  gsl_integration_glfixed_table* tab = gsl_integration_glfixed_table_alloc(nodes);
  double u = 0.0;
  for (int side = 0; side < 4; ++side) {
    for (int k = 1; k <= terms; ++k) {
      double ck = 0.0;
      for (int i = 0; i < nodes; ++i) {
        double t, wt;
        gsl_integration_glfixed_point(-1.0, 1.0, static_cast<size_t>(i), &t, &wt, tab);
        double bx, by;
        switch (side) {
          case 0: bx = 1.0; by = t; break;
          case 1: bx = -1.0; by = t; break;
          case 2: bx = t; by = 1.0; break;
          default: bx = t; by = -1.0; break;
        }
        double f = 0.5 * std::log((bx - wx) * (bx - wx) + (by - wy) * (by - wy));
        ck += wt * f * std::sin(k * M_PI * (t + 1.0) / 2.0);
      }
      double along = side < 2 ? wy : wx;
      double across;
      switch (side) {
        case 0: across = wx + 1.0; break;
        case 1: across = 1.0 - wx; break;
        case 2: across = wy + 1.0; break;
        default: across = 1.0 - wy; break;
      }
      u += ck * std::sin(k * M_PI * (along + 1.0) / 2.0) * sinh_ratio(k * M_PI * across / 2.0, k * M_PI);
    }
  }
  gsl_integration_glfixed_table_free(tab);
  return std::exp(u);
}

}  // namespace fc
