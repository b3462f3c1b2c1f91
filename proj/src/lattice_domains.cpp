#include "fracchain/lattice_domains.hpp"

#include <algorithm>
#include <cmath>

#include "fracchain/stats.hpp"

namespace fc {

std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::interval: return "interval";
    case DomainKind::box2d: return "box2d";
    case DomainKind::torus2d: return "torus2d";
    case DomainKind::slit_diamond: return "slit_diamond";
    case DomainKind::smoothed_slit: return "smoothed_slit";
    case DomainKind::half_plane_free_bottom: return "half_plane_free_bottom";
  }
  return "unknown";
}

DomainKind domain_kind_from_string(const std::string& s) {
  for (DomainKind k : {DomainKind::interval, DomainKind::box2d, DomainKind::torus2d, DomainKind::slit_diamond,
                       DomainKind::smoothed_slit, DomainKind::half_plane_free_bottom})
    if (to_string(k) == s) return k;
  throw Error("unknown domain kind '" + s + "'");
}

LatticeDomain build_domain(DomainKind kind, long n, long M) {
  if (n < 1) throw Error("build_domain: n must be >= 1");
  LatticeDomain d;
  d.kind = kind;
  d.n = n;
  if (kind == DomainKind::smoothed_slit) {
    if (M < 2) throw Error("build_domain: smoothed_slit needs M >= 2");
    d.M = M;
  }
  if (kind == DomainKind::slit_diamond) {
    d.factor = M <= 0 ? 16 : M;
  }
  return d;
}

long LatticeDomain::half_width() const {
  switch (kind) {
    case DomainKind::slit_diamond: return 2 * factor * n;
    case DomainKind::smoothed_slit: return 2 * M * n;
    default: return n;
  }
}

long LatticeDomain::y_min() const {
  switch (kind) {
    case DomainKind::interval:
    case DomainKind::half_plane_free_bottom: return 0;
    default: return -half_width();
  }
}

bool LatticeDomain::contains(long x, long y) const {
  const long B = half_width();
  switch (kind) {
    case DomainKind::interval: return y == 0 && std::labs(x) <= n;
    case DomainKind::box2d:
    case DomainKind::torus2d: return std::labs(x) <= n && std::labs(y) <= n;
    case DomainKind::half_plane_free_bottom: return std::labs(x) <= n && y >= 0 && y <= n;
    case DomainKind::slit_diamond:
      if (((x + y) & 1L) != 0 || std::labs(x) > B || std::labs(y) > B) return false;
      return !(y == 0 && std::labs(x) >= 2 * (n + 1));
    case DomainKind::smoothed_slit: {
      if (((x + y) & 1L) != 0 || std::labs(x) > B || std::labs(y) > B) return false;
      long ax = std::labs(x);
      long dx = ax >= 2 * (n + 1) ? (ax & 1L) : 2 * (n + 1) - ax;  // doubled distance to the slit points
      return M * std::max(std::labs(y), dx) >= 2 * n;
    }
  }
  return false;
}

std::vector<Site> LatticeDomain::sites() const {
  std::vector<Site> out;
  const long B = half_width();
  for (long y = y_min(); y <= (kind == DomainKind::interval ? 0 : B); ++y)
    for (long x = -B; x <= B; ++x)
      if (contains(x, y)) out.push_back({x, y});
  return out;
}

std::size_t LatticeDomain::size() const {
  std::size_t c = 0;
  const long B = half_width();
  for (long y = y_min(); y <= (kind == DomainKind::interval ? 0 : B); ++y)
    for (long x = -B; x <= B; ++x)
      if (contains(x, y)) ++c;
  return c;
}

BoundaryClass LatticeDomain::boundary_class(long x, long y) const {
  if (contains(x, y)) return BoundaryClass::none;
  const long B = half_width();
  if (std::labs(x) > B || std::labs(y) > B) return BoundaryClass::outer_square;
  return diamond() ? BoundaryClass::slit_proximal : BoundaryClass::outer_square;
}

std::vector<Site> LatticeDomain::line_sites() const {
  std::vector<Site> out;
  const long B = half_width();
  const long step = diamond() ? 2 : 1;
  for (long x = -B - (B % step); x <= B; x += step)
    if (contains(x, 0)) out.push_back({x, 0});
  return out;
}

double ConductanceField::edge(long y) const {
  long m = y >= 0 ? y : -y - 1;
  if (m > max_height) throw Error("ConductanceField::edge: height beyond max_height");
  return a[m];
}

ConductanceField conductance_field(double s, long max_height) {
  if (!(s >= 0.0 && s < 1.0)) throw Error("conductance_field: s must lie in [0,1)");
  if (max_height < 1) throw Error("conductance_field: max_height must be >= 1");
  ConductanceField f;
  f.s = s;
  f.max_height = max_height;
  f.a.assign(max_height + 1, 0.0);
  f.a[0] = 0.25;
  for (long r = 1; r <= max_height; ++r) {
    // the clamp of Q_s at 1/4 is inactive here since s/(4r) < 1/4
    double q = 1.0 - s / (2.0 * r);
    f.a[r] = f.a[r - 1] * q / (1.0 + s / (2.0 * r));
  }
  return f;
}

ConditioningSet line_set(long n) {
  ConditioningSet c;
  c.kind = ConditioningKind::line;
  for (long x = -n; x <= n; ++x) c.members.push_back({x, 0});
  return c;
}

ConditioningSet strip_set(long n, long width) {
  if (width < 0 || width > n) throw Error("strip_set: width must lie in [0, n]");
  ConditioningSet c;
  c.kind = ConditioningKind::strip;
  c.width = width;
  for (long y = -width; y <= width; ++y)
    for (long x = -n; x <= n; ++x) c.members.push_back({x, y});
  return c;
}

std::array<bool, 9> default_fractal_mask() {
  return {false, true, false, true, true, true, false, true, false};
}

namespace {

bool fractal_member(long cx, long cy, int k, const std::array<bool, 9>& mask) {
  // cx, cy in [0, 3^k); row 0 is the top row
  for (int l = 0; l < k; ++l) {
    int dx = static_cast<int>(cx % 3), dy = static_cast<int>(cy % 3);
    if (!mask[dy * 3 + dx]) return false;
    cx /= 3;
    cy /= 3;
  }
  return true;
}

}  // namespace

ConditioningSet fractal_set(int k, const std::array<bool, 9>& mask) {
  if (k < 1) throw Error("fractal_set: level must be >= 1");
  ConditioningSet c;
  c.kind = ConditioningKind::fractal;
  c.level = k;
  c.mask = mask;
  long side = 1;
  for (int l = 0; l < k; ++l) side *= 3;
  long h = (side - 1) / 2;
  for (long cy = 0; cy < side; ++cy)
    for (long cx = 0; cx < side; ++cx)
      if (fractal_member(cx, cy, k, mask)) c.members.push_back({cx - h, h - cy});
  std::sort(c.members.begin(), c.members.end(),
            [](const Site& a, const Site& b) { return a.y != b.y ? a.y < b.y : a.x < b.x; });
  return c;
}

std::vector<double> fractal_dimension_estimates(int k, const std::array<bool, 9>& mask) {
  std::vector<double> out;
  for (int l = 1; l <= k; ++l) {
    double count = static_cast<double>(fractal_set(l, mask).members.size());
    out.push_back(std::log(count) / (l * std::log(3.0)));
  }
  return out;
}

}  // namespace fc
