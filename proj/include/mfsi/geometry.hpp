#pragma once

// -----------------------------------------------------------------------------
// Spatial supports and the geometric sets reconstructions are judged against.
//
// Shapes: ball (2-D disk / 3-D ball), axis-aligned cube/box, ellipse (2-D),
// kite (2-D, the boundary curve (cos t + 0.65 cos 2t - 0.65, 1.5 sin t)
// scaled and translated), and disjoint unions of the above.
//
// Extents and annulus radii are computed from dense boundary sampling so that
// unions and future shapes need no per-shape support-function math; analytic
// formulas for ball/cube serve as oracles in the tests.  Strips, theta-hulls
// and annuli are open sets: boundary points classify as outside.
// -----------------------------------------------------------------------------

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <variant>
#include <vector>

#include "mfsi/common.hpp"

namespace mfsi::geometry {

struct BoundingBox {
  Point lo;
  Point hi;
};

// ----------------------------------------------------------------- shapes ----

struct Ball {
  Point center;
  double radius = 1.0;
};

struct Cube {
  Point center;
  Point half_widths;  // per-axis half extents
};

struct Ellipse {  // 2-D only
  Point center;
  double semi_a = 1.0;
  double semi_b = 1.0;
};

struct Kite {  // 2-D only
  Point center;
  double scale = 1.0;
};

inline Point kite_boundary_point(const Kite& k, double t) {
  const double x = std::cos(t) + 0.65 * std::cos(2.0 * t) - 0.65;
  const double y = 1.5 * std::sin(t);
  return point2(k.center.x + k.scale * x, k.center.y + k.scale * y);
}

class SupportDomain;

namespace detail {
struct UnionParts {
  std::vector<SupportDomain> parts;
};
}  // namespace detail

class SupportDomain {
 public:
  static SupportDomain ball(const Point& center, double radius);
  static SupportDomain cube(const Point& center, const Point& half_widths);
  static SupportDomain ellipse(const Point& center, double semi_a, double semi_b);
  static SupportDomain kite(const Point& center, double scale);
  // Components must be pairwise disjoint; checked by sampled membership overlap.
  static SupportDomain union_of(std::vector<SupportDomain> parts);

  int dim() const { return dim_; }
  bool is_union() const { return std::holds_alternative<detail::UnionParts>(shape_); }
  const std::vector<SupportDomain>& parts() const {
    return std::get<detail::UnionParts>(shape_).parts;
  }

  // True iff the point lies strictly inside the region; union = OR over parts.
  bool contains(const Point& p) const;

  BoundingBox bounding_box() const;

  // Dense, deterministic sample of the boundary (cube faces carry their
  // corners so extents over convex boxes are exact).  Unions concatenate
  // samples of every part.
  std::vector<Point> boundary_samples(int n) const;

 private:
  using Shape = std::variant<Ball, Cube, Ellipse, Kite, detail::UnionParts>;

  SupportDomain(Shape shape, int dim) : shape_(std::move(shape)), dim_(dim) {}

  Shape shape_;
  int dim_;
  // Polygonal approximation of the kite boundary used for containment tests,
  // with edges bucketed by their y-range so a ray cast touches only the few
  // edges that can cross it.
  struct KitePolygon {
    std::vector<std::pair<double, double>> vertices;
    std::vector<std::vector<int>> buckets;  // edge indices per y-slab
    double y_lo = 0.0, y_hi = 0.0;
  };
  std::shared_ptr<KitePolygon> kite_poly_;
};

// ------------------------------------------------------------- quadrature ----

struct QuadratureRule {
  std::vector<Point> nodes;
  std::vector<double> weights;
  int resolution = 0;  // nodes per axis used to build it

  double total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

// Midpoint-rule nodes on a uniform Cartesian grid over the bounding box,
// masked by membership; weight = cell volume.  First-order accurate at curved
// boundaries, exact for axis-aligned boxes.
QuadratureRule build_quadrature(const SupportDomain& domain, int resolution);

// High-order product rule for balls/disks (Gauss-Legendre radially and in the
// polar angle, uniform in the azimuth).  Used where quadrature error must sit
// far below the acceptance tolerances; node count ~ resolution^dim.
QuadratureRule ball_product_quadrature(const Point& center, double radius, int dim,
                                       int resolution);

// ---------------------------------------------------------------- extents ----

struct DirectionalExtent {
  double low = 0.0;   // inf of direction . D
  double high = 0.0;  // sup of direction . D
  Direction direction;
};

inline constexpr int kDefaultBoundarySamples = 100000;

DirectionalExtent directional_extent(const SupportDomain& domain, const Direction& direction,
                                     int n_samples = kDefaultBoundarySamples);

// Open strip K_D = { y : low < direction . y < high }.
inline bool strip_membership(const DirectionalExtent& extent, const Point& p) {
  require_same_dim(extent.direction.dim, p.dim, "strip_membership");
  const double proj = dot(extent.direction, p);
  return extent.low < proj && proj < extent.high;
}

// Intersection of strips over all given extents (the theta-convex hull).
inline bool theta_hull_membership(const std::vector<DirectionalExtent>& extents,
                                  const Point& p) {
  if (extents.empty())
    throw std::invalid_argument("theta_hull_membership: extents must be nonempty");
  for (const auto& e : extents)
    if (!strip_membership(e, p)) return false;
  return true;
}

struct AnnulusBounds {
  double inner = 0.0;  // inf_{z in D} |x - z|
  double outer = 0.0;  // sup_{z in D} |x - z|
};

AnnulusBounds annulus_bounds(const SupportDomain& domain, const Point& observation,
                             int n_samples = kDefaultBoundarySamples);

// Open annulus around the observation point: inner < |x - y| < outer.
inline bool annulus_membership(const SupportDomain& domain, const Point& observation,
                               const Point& query,
                               int n_samples = kDefaultBoundarySamples) {
  require_same_dim(domain.dim(), query.dim, "annulus_membership");
  const AnnulusBounds b = annulus_bounds(domain, observation, n_samples);
  const double r = distance(observation, query);
  return b.inner < r && r < b.outer;
}

// True iff the projections of d1 and d2 onto the direction are separated by a
// gap larger than T (in either order).
bool separable_along(const SupportDomain& d1, const SupportDomain& d2,
                     const Direction& direction, double T,
                     int n_samples = kDefaultBoundarySamples);

// =========================================================== implementation ==

inline SupportDomain SupportDomain::ball(const Point& center, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("ball: radius must be positive");
  if (center.dim != 2 && center.dim != 3)
    throw std::invalid_argument("ball: dimension must be 2 or 3");
  return SupportDomain(Ball{center, radius}, center.dim);
}

inline SupportDomain SupportDomain::cube(const Point& center, const Point& half_widths) {
  require_same_dim(center.dim, half_widths.dim, "cube");
  if (half_widths.x <= 0.0 || half_widths.y <= 0.0 ||
      (center.dim == 3 && half_widths.z <= 0.0))
    throw std::invalid_argument("cube: half-widths must be positive");
  return SupportDomain(Cube{center, half_widths}, center.dim);
}

inline SupportDomain SupportDomain::ellipse(const Point& center, double semi_a,
                                            double semi_b) {
  if (center.dim != 2) throw std::invalid_argument("ellipse: 2-D only");
  if (semi_a <= 0.0 || semi_b <= 0.0)
    throw std::invalid_argument("ellipse: semi-axes must be positive");
  return SupportDomain(Ellipse{center, semi_a, semi_b}, 2);
}

inline SupportDomain SupportDomain::kite(const Point& center, double scale) {
  if (center.dim != 2) throw std::invalid_argument("kite: 2-D only");
  if (scale <= 0.0) throw std::invalid_argument("kite: scale must be positive");
  SupportDomain d(Kite{center, scale}, 2);
  // Precompute the containment polygon once; copies share it.
  constexpr int kSegments = 4096;
  auto poly = std::make_shared<KitePolygon>();
  poly->vertices.reserve(kSegments);
  const Kite k{center, scale};
  for (int i = 0; i < kSegments; ++i) {
    const Point p = kite_boundary_point(k, 2.0 * kPi * i / kSegments);
    poly->vertices.emplace_back(p.x, p.y);
  }
  poly->y_lo = center.y - 1.5 * scale - 1e-9;
  poly->y_hi = center.y + 1.5 * scale + 1e-9;
  constexpr int kBuckets = 512;
  poly->buckets.resize(kBuckets);
  const double inv_h = kBuckets / (poly->y_hi - poly->y_lo);
  for (int i = 0; i < kSegments; ++i) {
    const double y1 = poly->vertices[i].second;
    const double y2 = poly->vertices[(i + 1) % kSegments].second;
    int b0 = static_cast<int>((std::min(y1, y2) - poly->y_lo) * inv_h);
    int b1 = static_cast<int>((std::max(y1, y2) - poly->y_lo) * inv_h);
    b0 = std::clamp(b0, 0, kBuckets - 1);
    b1 = std::clamp(b1, 0, kBuckets - 1);
    for (int b = b0; b <= b1; ++b) poly->buckets[b].push_back(i);
  }
  d.kite_poly_ = std::move(poly);
  return d;
}

inline bool SupportDomain::contains(const Point& p) const {
  require_same_dim(dim_, p.dim, "contains");
  return std::visit(
      [&](const auto& s) -> bool {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) {
          return distance(p, s.center) < s.radius;
        } else if constexpr (std::is_same_v<S, Cube>) {
          if (std::abs(p.x - s.center.x) >= s.half_widths.x) return false;
          if (std::abs(p.y - s.center.y) >= s.half_widths.y) return false;
          if (dim_ == 3 && std::abs(p.z - s.center.z) >= s.half_widths.z) return false;
          return true;
        } else if constexpr (std::is_same_v<S, Ellipse>) {
          const double u = (p.x - s.center.x) / s.semi_a;
          const double v = (p.y - s.center.y) / s.semi_b;
          return u * u + v * v < 1.0;
        } else if constexpr (std::is_same_v<S, Kite>) {
          // Even-odd ray cast against the precomputed boundary polygon; only
          // the edges in the y-bucket of the query can cross the ray.
          const auto& poly = *kite_poly_;
          const double px = p.x, py = p.y;
          if (py <= poly.y_lo || py >= poly.y_hi) return false;
          const int nb = static_cast<int>(poly.buckets.size());
          int b = static_cast<int>((py - poly.y_lo) / (poly.y_hi - poly.y_lo) * nb);
          b = std::clamp(b, 0, nb - 1);
          bool inside = false;
          const std::size_t n = poly.vertices.size();
          for (int i : poly.buckets[b]) {
            const auto [xi, yi] = poly.vertices[i];
            const auto [xj, yj] = poly.vertices[(i + 1) % n];
            if ((yi > py) != (yj > py) && px < (xj - xi) * (py - yi) / (yj - yi) + xi)
              inside = !inside;
          }
          return inside;
        } else {
          for (const auto& part : s.parts)
            if (part.contains(p)) return true;
          return false;
        }
      },
      shape_);
}

inline BoundingBox SupportDomain::bounding_box() const {
  return std::visit(
      [&](const auto& s) -> BoundingBox {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) {
          const Point r{s.radius, s.radius, dim_ == 3 ? s.radius : 0.0, dim_};
          return {s.center - r, s.center + r};
        } else if constexpr (std::is_same_v<S, Cube>) {
          return {s.center - s.half_widths, s.center + s.half_widths};
        } else if constexpr (std::is_same_v<S, Ellipse>) {
          const Point r{s.semi_a, s.semi_b, 0.0, 2};
          return {s.center - r, s.center + r};
        } else if constexpr (std::is_same_v<S, Kite>) {
          double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
          for (const auto& [x, y] : kite_poly_->vertices) {
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
            ylo = std::min(ylo, y);
            yhi = std::max(yhi, y);
          }
          return {point2(xlo, ylo), point2(xhi, yhi)};
        } else {
          BoundingBox box = s.parts.front().bounding_box();
          for (std::size_t i = 1; i < s.parts.size(); ++i) {
            const BoundingBox b = s.parts[i].bounding_box();
            box.lo.x = std::min(box.lo.x, b.lo.x);
            box.lo.y = std::min(box.lo.y, b.lo.y);
            box.lo.z = std::min(box.lo.z, b.lo.z);
            box.hi.x = std::max(box.hi.x, b.hi.x);
            box.hi.y = std::max(box.hi.y, b.hi.y);
            box.hi.z = std::max(box.hi.z, b.hi.z);
          }
          return box;
        }
      },
      shape_);
}

namespace detail {

inline std::vector<Point> fibonacci_sphere(const Point& center, double radius, int n) {
  std::vector<Point> pts;
  pts.reserve(n);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts.push_back(point3(center.x + radius * r * std::cos(phi),
                         center.y + radius * r * std::sin(phi), center.z + radius * z));
  }
  return pts;
}

}  // namespace detail

inline std::vector<Point> SupportDomain::boundary_samples(int n) const {
  if (n < 8) throw std::invalid_argument("boundary_samples: n too small");
  return std::visit(
      [&](const auto& s) -> std::vector<Point> {
        using S = std::decay_t<decltype(s)>;
        std::vector<Point> pts;
        if constexpr (std::is_same_v<S, Ball>) {
          if (dim_ == 2) {
            pts.reserve(n);
            for (int i = 0; i < n; ++i) {
              const double t = 2.0 * kPi * i / n;
              pts.push_back(point2(s.center.x + s.radius * std::cos(t),
                                   s.center.y + s.radius * std::sin(t)));
            }
          } else {
            pts = detail::fibonacci_sphere(s.center, s.radius, n);
          }
        } else if constexpr (std::is_same_v<S, Cube>) {
          if (dim_ == 2) {
            const int m = std::max(2, n / 4);
            const double x0 = s.center.x - s.half_widths.x, x1 = s.center.x + s.half_widths.x;
            const double y0 = s.center.y - s.half_widths.y, y1 = s.center.y + s.half_widths.y;
            for (int i = 0; i < m; ++i) {
              const double u = static_cast<double>(i) / (m - 1);
              pts.push_back(point2(x0 + u * (x1 - x0), y0));
              pts.push_back(point2(x0 + u * (x1 - x0), y1));
              pts.push_back(point2(x0, y0 + u * (y1 - y0)));
              pts.push_back(point2(x1, y0 + u * (y1 - y0)));
            }
          } else {
            const int m = std::max(2, static_cast<int>(std::ceil(std::sqrt(n / 6.0))));
            const Point lo = s.center - s.half_widths, hi = s.center + s.half_widths;
            for (int i = 0; i < m; ++i) {
              const double u = static_cast<double>(i) / (m - 1);
              for (int j = 0; j < m; ++j) {
                const double v = static_cast<double>(j) / (m - 1);
                const double ax = lo.x + u * (hi.x - lo.x);
                const double ay = lo.y + v * (hi.y - lo.y);
                const double az = lo.z + v * (hi.z - lo.z);
                const double by = lo.y + u * (hi.y - lo.y);
                pts.push_back(point3(ax, ay, lo.z));
                pts.push_back(point3(ax, ay, hi.z));
                pts.push_back(point3(ax, lo.y, az));
                pts.push_back(point3(ax, hi.y, az));
                pts.push_back(point3(lo.x, by, az));
                pts.push_back(point3(hi.x, by, az));
              }
            }
          }
        } else if constexpr (std::is_same_v<S, Ellipse>) {
          pts.reserve(n);
          for (int i = 0; i < n; ++i) {
            const double t = 2.0 * kPi * i / n;
            pts.push_back(point2(s.center.x + s.semi_a * std::cos(t),
                                 s.center.y + s.semi_b * std::sin(t)));
          }
        } else if constexpr (std::is_same_v<S, Kite>) {
          pts.reserve(n);
          for (int i = 0; i < n; ++i)
            pts.push_back(kite_boundary_point(s, 2.0 * kPi * i / n));
        } else {
          for (const auto& part : s.parts) {
            auto sub = part.boundary_samples(n);
            pts.insert(pts.end(), sub.begin(), sub.end());
          }
        }
        return pts;
      },
      shape_);
}

inline SupportDomain SupportDomain::union_of(std::vector<SupportDomain> parts) {
  if (parts.size() < 2)
    throw std::invalid_argument("union_of: need at least two components");
  const int d = parts.front().dim();
  for (const auto& p : parts) require_same_dim(d, p.dim(), "union_of");
  // Disjointness check: no interior sample of one component may fall inside
  // another.  A modest grid per component is enough to catch real overlaps.
  constexpr int kCheckRes = 24;
  for (std::size_t a = 0; a < parts.size(); ++a) {
    const BoundingBox box = parts[a].bounding_box();
    for (int i = 0; i < kCheckRes; ++i)
      for (int j = 0; j < kCheckRes; ++j) {
        const int kmax = d == 3 ? kCheckRes : 1;
        for (int k = 0; k < kmax; ++k) {
          Point p{box.lo.x + (i + 0.5) * (box.hi.x - box.lo.x) / kCheckRes,
                  box.lo.y + (j + 0.5) * (box.hi.y - box.lo.y) / kCheckRes,
                  d == 3 ? box.lo.z + (k + 0.5) * (box.hi.z - box.lo.z) / kCheckRes : 0.0,
                  d};
          if (!parts[a].contains(p)) continue;
          for (std::size_t b = 0; b < parts.size(); ++b)
            if (b != a && parts[b].contains(p))
              throw InvalidGeometry("union_of: components overlap");
        }
      }
  }
  return SupportDomain(detail::UnionParts{std::move(parts)}, d);
}

inline QuadratureRule build_quadrature(const SupportDomain& domain, int resolution) {
  if (resolution < 2) throw std::invalid_argument("build_quadrature: resolution must be >= 2");
  const BoundingBox box = domain.bounding_box();
  const int d = domain.dim();
  const double hx = (box.hi.x - box.lo.x) / resolution;
  const double hy = (box.hi.y - box.lo.y) / resolution;
  const double hz = d == 3 ? (box.hi.z - box.lo.z) / resolution : 1.0;
  const double w = hx * hy * (d == 3 ? hz : 1.0);
  QuadratureRule rule;
  rule.resolution = resolution;
  const int nz = d == 3 ? resolution : 1;
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j)
      for (int k = 0; k < nz; ++k) {
        Point p{box.lo.x + (i + 0.5) * hx, box.lo.y + (j + 0.5) * hy,
                d == 3 ? box.lo.z + (k + 0.5) * hz : 0.0, d};
        if (domain.contains(p)) {
          rule.nodes.push_back(p);
          rule.weights.push_back(w);
        }
      }
  if (rule.nodes.empty())
    throw ResolutionTooCoarse("build_quadrature: no interior cells at resolution " +
                              std::to_string(resolution));
  return rule;
}

inline QuadratureRule ball_product_quadrature(const Point& center, double radius, int dim,
                                              int resolution) {
  if (resolution < 2)
    throw std::invalid_argument("ball_product_quadrature: resolution must be >= 2");
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("ball_product_quadrature: dimension must be 2 or 3");
  QuadratureRule rule;
  rule.resolution = resolution;
  const Rule1D radial = gauss_legendre_rule(resolution, 0.0, radius);
  const double dphi = 2.0 * kPi / resolution;
  if (dim == 2) {
    for (int i = 0; i < resolution; ++i)
      for (int j = 0; j < resolution; ++j) {
        const double r = radial.nodes[i], phi = (j + 0.5) * dphi;
        rule.nodes.push_back(point2(center.x + r * std::cos(phi), center.y + r * std::sin(phi)));
        rule.weights.push_back(radial.weights[i] * r * dphi);
      }
  } else {
    const Rule1D polar = gauss_legendre_rule(resolution, -1.0, 1.0);
    for (int i = 0; i < resolution; ++i)
      for (int j = 0; j < resolution; ++j) {
        const double r = radial.nodes[i], mu = polar.nodes[j];
        const double rho = r * std::sqrt(std::max(0.0, 1.0 - mu * mu));
        for (int k = 0; k < resolution; ++k) {
          const double phi = (k + 0.5) * dphi;
          rule.nodes.push_back(point3(center.x + rho * std::cos(phi),
                                      center.y + rho * std::sin(phi), center.z + r * mu));
          rule.weights.push_back(radial.weights[i] * r * r * polar.weights[j] * dphi);
        }
      }
  }
  return rule;
}

inline DirectionalExtent directional_extent(const SupportDomain& domain,
                                            const Direction& direction, int n_samples) {
  require_unit(direction, "directional_extent");
  require_same_dim(domain.dim(), direction.dim, "directional_extent");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const Point& p : domain.boundary_samples(n_samples)) {
    const double proj = dot(direction, p);
    lo = std::min(lo, proj);
    hi = std::max(hi, proj);
  }
  return {lo, hi, direction};
}

inline AnnulusBounds annulus_bounds(const SupportDomain& domain, const Point& observation,
                                    int n_samples) {
  require_same_dim(domain.dim(), observation.dim, "annulus_bounds");
  const BoundingBox box = domain.bounding_box();
  const bool inside_box = observation.x > box.lo.x && observation.x < box.hi.x &&
                          observation.y > box.lo.y && observation.y < box.hi.y &&
                          (domain.dim() == 2 ||
                           (observation.z > box.lo.z && observation.z < box.hi.z));
  if (inside_box)
    throw std::invalid_argument("annulus_bounds: observation point must lie outside the "
                                "domain bounding box");
  AnnulusBounds b{std::numeric_limits<double>::infinity(), 0.0};
  for (const Point& p : domain.boundary_samples(n_samples)) {
    const double r = distance(observation, p);
    b.inner = std::min(b.inner, r);
    b.outer = std::max(b.outer, r);
  }
  return b;
}

inline bool separable_along(const SupportDomain& d1, const SupportDomain& d2,
                            const Direction& direction, double T, int n_samples) {
  require_same_dim(d1.dim(), d2.dim(), "separable_along");
  if (T < 0.0) throw std::invalid_argument("separable_along: T must be >= 0");
  const DirectionalExtent e1 = directional_extent(d1, direction, n_samples);
  const DirectionalExtent e2 = directional_extent(d2, direction, n_samples);
  return (e2.low - e1.high > T) || (e1.low - e2.high > T);
}

}  // namespace mfsi::geometry
