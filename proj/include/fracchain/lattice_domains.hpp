#pragma once
// Lattice geometry: intervals, square boxes and tori, the half box with a free
// bottom side, the diamond slit domain D_n and its smoothed version H_n^(M),
// conditioning sets, and the height-dependent conductance field.
//
// Diamond-graph sites use doubled coordinates (X, Y) = (2x, 2y) with X = Y mod 2;
// a step moves X and Y by one each.  Line site k of the base line is (2k, 0).

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fc {

enum class DomainKind { interval, box2d, torus2d, slit_diamond, smoothed_slit, half_plane_free_bottom };

std::string to_string(DomainKind k);
DomainKind domain_kind_from_string(const std::string& s);

struct Site {
  long x = 0;
  long y = 0;
  bool operator==(const Site& o) const { return x == o.x && y == o.y; }
};

enum class BoundaryClass { none, outer_square, slit_proximal };

struct LatticeDomain {
  DomainKind kind = DomainKind::box2d;
  long n = 1;
  long M = 0;       // smoothed_slit only
  long factor = 0;  // slit_diamond only: the infinite slit domain is cut to |z|_inf <= factor * n

  bool diamond() const { return kind == DomainKind::slit_diamond || kind == DomainKind::smoothed_slit; }
  // half-width of the bounding box in stored coordinates (doubled for diamond kinds)
  long half_width() const;
  long y_min() const;
  // site alive (not killed and inside the host); stored coordinates
  bool contains(long x, long y) const;
  bool periodic() const { return kind == DomainKind::torus2d; }
  // number of alive sites (enumerates)
  std::size_t size() const;
  // alive sites in row-major order (y outer, x inner)
  std::vector<Site> sites() const;
  // killed sites with an alive neighbour; diamond kinds label square vs slit-proximal parts
  BoundaryClass boundary_class(long x, long y) const;
  // alive sites on the base line y = 0, ordered by x
  std::vector<Site> line_sites() const;
};

// n >= 1; smoothed_slit needs M >= 2; slit_diamond takes factor (>= 1) as M.
LatticeDomain build_domain(DomainKind kind, long n, long M = 0);

struct ConductanceField {
  double s = 0.0;
  long max_height = 0;
  std::vector<double> a;  // a[m] = a(m, m+1), m = 0..max_height

  // conductance of the edge between heights y and y+1, any sign of y
  double edge(long y) const;
  // total conductance at height y on the diamond graph (four incident edges)
  double degree(long y) const { return 2.0 * (edge(y) + edge(y - 1)); }
};

ConductanceField conductance_field(double s, long max_height);

enum class ConditioningKind { line, strip, fractal };

struct ConditioningSet {
  ConditioningKind kind = ConditioningKind::line;
  long width = 0;               // strip: rows |y| <= width
  int level = 0;                // fractal
  std::array<bool, 9> mask{};   // fractal generator, row-major from the top row
  std::vector<Site> members;    // square-lattice sites of the host box
};

// Conditioning sets inside box2d(n) (or torus2d(n)).
ConditioningSet line_set(long n);
ConditioningSet strip_set(long n, long width);

// default generator: middle row plus one recursing block above and below
std::array<bool, 9> default_fractal_mask();

// Self-similar subset of a box of side 3^k (coordinates -(3^k-1)/2 .. (3^k-1)/2).
ConditioningSet fractal_set(int k, const std::array<bool, 9>& mask = default_fractal_mask());

// log(occupied cells)/log 3 at each level 1..k
std::vector<double> fractal_dimension_estimates(int k, const std::array<bool, 9>& mask = default_fractal_mask());

}  // namespace fc
