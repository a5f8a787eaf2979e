#include "pauli/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "pauli/errors.hpp"

namespace pauli {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr const char* kModule = "geometry";

double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
double norm(Point a) { return std::hypot(a.x, a.y); }

std::vector<Point> rectangle_vertices(const Rectangle& r) {
  const double hx = 0.5 * r.a;
  const double hy = 0.5 * r.b;
  const Point c = r.center;
  return {{c.x - hx, c.y - hy}, {c.x + hx, c.y - hy}, {c.x + hx, c.y + hy}, {c.x - hx, c.y + hy}};
}

std::vector<Point> triangle_vertices(const EquilateralTriangle& t) {
  const double a = t.height;
  const Point c = t.center;
  const double half_side = a / std::sqrt(3.0);
  return {{c.x - a / 3.0, c.y - half_side}, {c.x + 2.0 * a / 3.0, c.y}, {c.x - a / 3.0, c.y + half_side}};
}

double signed_area(const std::vector<Point>& v) {
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) s += cross(v[k], v[(k + 1) % v.size()]);
  return 0.5 * s;
}

double segment_distance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

bool polygon_contains(const std::vector<Point>& v, Point p) {
  double scale = 0.0;
  for (const auto& q : v) scale = std::max({scale, std::abs(q.x), std::abs(q.y)});
  const double on_edge = 1e-14 * std::max(scale, 1.0);
  bool inside = false;
  for (std::size_t k = 0, m = v.size() - 1; k < v.size(); m = k++) {
    const Point a = v[m];
    const Point b = v[k];
    if (segment_distance(p, a, b) <= on_edge) return false;
    if ((b.y > p.y) != (a.y > p.y)) {
      const double xcross = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (p.x < xcross) inside = !inside;
    }
  }
  return inside;
}

void polygon_crossings(const std::vector<Point>& v, Point p, Point q, std::vector<double>& out) {
  const Point d = q - p;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Point a = v[k];
    const Point e = v[(k + 1) % v.size()] - a;
    const double denom = cross(d, e);
    if (denom == 0.0) continue;
    const double t = cross(a - p, e) / denom;
    const double s = cross(a - p, d) / denom;
    if (t >= 0.0 && t <= 1.0 && s >= 0.0 && s <= 1.0) out.push_back(t);
  }
}

// Roots in [0, 1] of |p + t d|^2 = 1, via the cancellation-free quadratic formula.
void unit_circle_crossings(Point p, Point d, std::vector<double>& out) {
  const double a = dot(d, d);
  const double b = dot(p, d);
  const double c = dot(p, p) - 1.0;
  const double disc = b * b - a * c;
  if (a == 0.0 || disc < 0.0) return;
  const double q = -(b + std::copysign(std::sqrt(disc), b));
  if (q == 0.0) {
    out.push_back(0.0);
    return;
  }
  for (double t : {q / a, c / q}) {
    if (t >= 0.0 && t <= 1.0) out.push_back(t);
  }
}

double robust_length(double a, double b) {
  return std::hypot(a, b);
}

// Distance from (y0, y1), both >= 0, to the ellipse with semi-axes e0 >= e1.
double ellipse_distance_quadrant(double e0, double e1, double y0, double y1) {
  if (y1 > 0.0) {
    if (y0 > 0.0) {
      const double z0 = y0 / e0;
      const double z1 = y1 / e1;
      double g = z0 * z0 + z1 * z1 - 1.0;
      if (g == 0.0) return 0.0;
      const double r0 = (e0 / e1) * (e0 / e1);
      const double n0 = r0 * z0;
      double s0 = z1 - 1.0;
      double s1 = g < 0.0 ? 0.0 : robust_length(n0, z1) - 1.0;
      double s = 0.0;
      for (int it = 0; it < 2000; ++it) {
        s = 0.5 * (s0 + s1);
        if (s == s0 || s == s1) break;
        const double ratio0 = n0 / (s + r0);
        const double ratio1 = z1 / (s + 1.0);
        g = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if (g > 0.0) {
          s0 = s;
        } else if (g < 0.0) {
          s1 = s;
        } else {
          break;
        }
      }
      const double x0 = r0 * y0 / (s + r0);
      const double x1 = y1 / (s + 1.0);
      return std::hypot(x0 - y0, x1 - y1);
    }
    return std::abs(y1 - e1);
  }
  const double numer0 = e0 * y0;
  const double denom0 = e0 * e0 - e1 * e1;
  if (numer0 < denom0) {
    const double xde0 = numer0 / denom0;
    const double x0 = e0 * xde0;
    const double x1 = e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0));
    return std::hypot(x0 - y0, x1);
  }
  return std::abs(y0 - e0);
}

double ellipse_distance(const Ellipse& e, Point p) {
  double y0 = std::abs(p.x - e.center.x);
  double y1 = std::abs(p.y - e.center.y);
  double e0 = e.a;
  double e1 = e.b;
  if (e0 < e1) {
    std::swap(e0, e1);
    std::swap(y0, y1);
  }
  return ellipse_distance_quadrant(e0, e1, y0, y1);
}

double polygon_distance(const std::vector<Point>& v, Point p) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < v.size(); ++k) d = std::min(d, segment_distance(p, v[k], v[(k + 1) % v.size()]));
  return d;
}

Point polygon_normal(const std::vector<Point>& v, Point p) {
  double best = std::numeric_limits<double>::infinity();
  Point n{1.0, 0.0};
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Point a = v[k];
    const Point b = v[(k + 1) % v.size()];
    const double d = segment_distance(p, a, b);
    if (d < best) {
      best = d;
      const Point e = b - a;
      const double len = norm(e);
      n = {e.y / len, -e.x / len};
    }
  }
  return n;
}

// Unsigned distance to the boundary of a single non-union piece.
double piece_boundary_distance(const DomainSpec::Shape& s, Point p) {
  return std::visit(
      Overloaded{
          [&](const Disk& d) { return std::abs(norm(p - d.center) - d.radius); },
          [&](const Ellipse& e) { return ellipse_distance(e, p); },
          [&](const Rectangle& r) { return polygon_distance(rectangle_vertices(r), p); },
          [&](const EquilateralTriangle& t) { return polygon_distance(triangle_vertices(t), p); },
          [&](const Polygon& poly) { return polygon_distance(poly.vertices, p); },
          [&](const UnionOf& u) {
            double d = std::numeric_limits<double>::infinity();
            for (const auto& m : u.members) d = std::min(d, piece_boundary_distance(m.shape(), p));
            return d;
          },
      },
      s);
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorKind::InvalidDomain, kModule, std::string(what) + " must be positive and finite");
  }
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, bool minimize) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto g = [&](double t) { return minimize ? f(t) : -f(t); };
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = g(c);
  double fd = g(d);
  for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = g(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = g(d);
    }
  }
  return 0.5 * (a + b);
}

// Coarse scan at 0.1 degree then golden-section refinement; ties resolve to the
// smallest angle.
double extremal_extent(const DomainSpec& domain, bool minimize) {
  constexpr int kSamples = 1800;
  const double step = std::numbers::pi / kSamples;
  double best_theta = 0.0;
  double best = directional_extent(domain, 0.0);
  for (int k = 1; k < kSamples; ++k) {
    const double theta = k * step;
    const double e = directional_extent(domain, theta);
    if (minimize ? e < best : e > best) {
      best = e;
      best_theta = theta;
    }
  }
  const auto f = [&](double t) { return directional_extent(domain, t); };
  const double refined = golden_section(f, best_theta - step, best_theta + step, minimize);
  const double e = directional_extent(domain, refined);
  return minimize ? std::min(best, e) : std::max(best, e);
}

}  // namespace

// ---------------------------------------------------------------------------
// DomainSpec

DomainSpec DomainSpec::disk(double radius, Point center) {
  check_positive(radius, "disk radius");
  return DomainSpec(Disk{radius, center});
}

DomainSpec DomainSpec::ellipse(double a, double b, Point center) {
  check_positive(a, "ellipse semi-axis a");
  check_positive(b, "ellipse semi-axis b");
  return DomainSpec(Ellipse{a, b, center});
}

DomainSpec DomainSpec::rectangle(double a, double b, Point center) {
  check_positive(a, "rectangle side a");
  check_positive(b, "rectangle side b");
  return DomainSpec(Rectangle{a, b, center});
}

DomainSpec DomainSpec::equilateral_triangle(double height, Point center) {
  check_positive(height, "triangle height");
  return DomainSpec(EquilateralTriangle{height, center});
}

DomainSpec DomainSpec::polygon(std::vector<Point> vertices) {
  if (vertices.size() < 3) throw Error(ErrorKind::InvalidDomain, kModule, "polygon needs at least 3 vertices");
  for (const auto& v : vertices) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      throw Error(ErrorKind::InvalidDomain, kModule, "polygon vertex is not finite");
    }
  }
  if (!(signed_area(vertices) > 0.0)) {
    throw Error(ErrorKind::InvalidDomain, kModule, "polygon must be counterclockwise with positive area");
  }
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j], vertices[(j + 1) % n])) {
        throw Error(ErrorKind::InvalidDomain, kModule, "polygon edges intersect");
      }
    }
  }
  return DomainSpec(Polygon{std::move(vertices)});
}

DomainSpec DomainSpec::union_of(std::vector<DomainSpec> members) {
  if (members.empty()) throw Error(ErrorKind::InvalidDomain, kModule, "union needs at least one member");
  return DomainSpec(UnionOf{std::move(members)});
}

DomainSpec DomainSpec::dumbbell(double radius, double half_separation, double neck_width) {
  check_positive(radius, "dumbbell radius");
  check_positive(half_separation, "dumbbell half separation");
  check_positive(neck_width, "dumbbell neck width");
  if (neck_width >= 2.0 * radius) {
    throw Error(ErrorKind::InvalidDomain, kModule, "dumbbell neck must be narrower than the disks");
  }
  return union_of({disk(radius, {-half_separation, 0.0}), rectangle(2.0 * half_separation, neck_width),
                   disk(radius, {half_separation, 0.0})});
}

std::string DomainSpec::kind_name() const {
  return std::visit(Overloaded{
                        [](const Disk&) { return std::string("disk"); },
                        [](const Ellipse&) { return std::string("ellipse"); },
                        [](const Rectangle&) { return std::string("rectangle"); },
                        [](const EquilateralTriangle&) { return std::string("equilateral_triangle"); },
                        [](const Polygon&) { return std::string("polygon"); },
                        [](const UnionOf&) { return std::string("union"); },
                    },
                    shape_);
}

bool DomainSpec::contains(Point p) const {
  return std::visit(
      Overloaded{
          [&](const Disk& d) {
            const Point r = p - d.center;
            return dot(r, r) < d.radius * d.radius;
          },
          [&](const Ellipse& e) {
            const double u = (p.x - e.center.x) / e.a;
            const double v = (p.y - e.center.y) / e.b;
            return u * u + v * v < 1.0;
          },
          [&](const Rectangle& r) {
            return std::abs(p.x - r.center.x) < 0.5 * r.a && std::abs(p.y - r.center.y) < 0.5 * r.b;
          },
          [&](const EquilateralTriangle& t) { return polygon_contains(triangle_vertices(t), p); },
          [&](const Polygon& poly) { return polygon_contains(poly.vertices, p); },
          [&](const UnionOf& u) {
            return std::any_of(u.members.begin(), u.members.end(), [&](const DomainSpec& m) { return m.contains(p); });
          },
      },
      shape_);
}

std::vector<double> DomainSpec::boundary_crossings(Point p, Point q) const {
  std::vector<double> out;
  std::visit(Overloaded{
                 [&](const Disk& d) {
                   const double s = 1.0 / d.radius;
                   unit_circle_crossings(s * (p - d.center), s * (q - p), out);
                 },
                 [&](const Ellipse& e) {
                   const Point pp{(p.x - e.center.x) / e.a, (p.y - e.center.y) / e.b};
                   const Point dd{(q.x - p.x) / e.a, (q.y - p.y) / e.b};
                   unit_circle_crossings(pp, dd, out);
                 },
                 [&](const Rectangle& r) { polygon_crossings(rectangle_vertices(r), p, q, out); },
                 [&](const EquilateralTriangle& t) { polygon_crossings(triangle_vertices(t), p, q, out); },
                 [&](const Polygon& poly) { polygon_crossings(poly.vertices, p, q, out); },
                 [&](const UnionOf& u) {
                   for (const auto& m : u.members) {
                     auto c = m.boundary_crossings(p, q);
                     out.insert(out.end(), c.begin(), c.end());
                   }
                 },
             },
             shape_);
  std::sort(out.begin(), out.end());
  return out;
}

double DomainSpec::exit_fraction(Point p, Point q) const {
  const auto cand = boundary_crossings(p, q);
  const Point d = q - p;
  for (std::size_t k = 0; k < cand.size(); ++k) {
    if (cand[k] <= 0.0) continue;
    const double next = k + 1 < cand.size() ? cand[k + 1] : 1.0;
    if (next == cand[k] && k + 1 < cand.size()) continue;
    const double mid = 0.5 * (cand[k] + next);
    if (!contains(p + mid * d)) return cand[k];
  }
  // Fall back to bisection on the membership test.
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (contains(p + mid * d) ? lo : hi) = mid;
  }
  return hi;
}

double DomainSpec::support(double ux, double uy) const {
  return std::visit(
      Overloaded{
          [&](const Disk& d) { return d.center.x * ux + d.center.y * uy + d.radius; },
          [&](const Ellipse& e) {
            return e.center.x * ux + e.center.y * uy + std::sqrt(e.a * e.a * ux * ux + e.b * e.b * uy * uy);
          },
          [&](const Rectangle& r) {
            return r.center.x * ux + r.center.y * uy + 0.5 * r.a * std::abs(ux) + 0.5 * r.b * std::abs(uy);
          },
          [&](const EquilateralTriangle& t) {
            double s = -std::numeric_limits<double>::infinity();
            for (const auto& v : triangle_vertices(t)) s = std::max(s, v.x * ux + v.y * uy);
            return s;
          },
          [&](const Polygon& poly) {
            double s = -std::numeric_limits<double>::infinity();
            for (const auto& v : poly.vertices) s = std::max(s, v.x * ux + v.y * uy);
            return s;
          },
          [&](const UnionOf& u) {
            double s = -std::numeric_limits<double>::infinity();
            for (const auto& m : u.members) s = std::max(s, m.support(ux, uy));
            return s;
          },
      },
      shape_);
}

double DomainSpec::distance_to_boundary(Point p) const {
  if (std::holds_alternative<UnionOf>(shape_)) {
    // Union boundary is only known through samples of the exposed member arcs.
    const auto samples = boundary_samples(4096);
    double d = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) d = std::min(d, norm(p - s));
    return d;
  }
  return piece_boundary_distance(shape_, p);
}

Point DomainSpec::outward_normal(Point p) const {
  return std::visit(Overloaded{
                        [&](const Disk& d) {
                          const Point r = p - d.center;
                          const double n = norm(r);
                          return n > 0.0 ? Point{r.x / n, r.y / n} : Point{1.0, 0.0};
                        },
                        [&](const Ellipse& e) {
                          const Point g{(p.x - e.center.x) / (e.a * e.a), (p.y - e.center.y) / (e.b * e.b)};
                          const double n = norm(g);
                          return n > 0.0 ? Point{g.x / n, g.y / n} : Point{1.0, 0.0};
                        },
                        [&](const Rectangle& r) { return polygon_normal(rectangle_vertices(r), p); },
                        [&](const EquilateralTriangle& t) { return polygon_normal(triangle_vertices(t), p); },
                        [&](const Polygon& poly) { return polygon_normal(poly.vertices, p); },
                        [&](const UnionOf& u) {
                          const DomainSpec* best = &u.members.front();
                          double bd = std::numeric_limits<double>::infinity();
                          for (const auto& m : u.members) {
                            const double d = piece_boundary_distance(m.shape(), p);
                            if (d < bd) {
                              bd = d;
                              best = &m;
                            }
                          }
                          return best->outward_normal(p);
                        },
                    },
                    shape_);
}

std::array<double, 4> DomainSpec::bounding_box() const {
  return {-support(-1.0, 0.0), -support(0.0, -1.0), support(1.0, 0.0), support(0.0, 1.0)};
}

bool DomainSpec::is_convex() const {
  return std::visit(Overloaded{
                        [](const Disk&) { return true; },
                        [](const Ellipse&) { return true; },
                        [](const Rectangle&) { return true; },
                        [](const EquilateralTriangle&) { return true; },
                        [](const Polygon& poly) {
                          const auto& v = poly.vertices;
                          for (std::size_t k = 0; k < v.size(); ++k) {
                            const Point e1 = v[(k + 1) % v.size()] - v[k];
                            const Point e2 = v[(k + 2) % v.size()] - v[(k + 1) % v.size()];
                            if (cross(e1, e2) < 0.0) return false;
                          }
                          return true;
                        },
                        // Unions are reported non-convex unless they have a single member.
                        [](const UnionOf& u) { return u.members.size() == 1 && u.members.front().is_convex(); },
                    },
                    shape_);
}

std::optional<double> DomainSpec::exact_area() const {
  return std::visit(Overloaded{
                        [](const Disk& d) -> std::optional<double> { return std::numbers::pi * d.radius * d.radius; },
                        [](const Ellipse& e) -> std::optional<double> { return std::numbers::pi * e.a * e.b; },
                        [](const Rectangle& r) -> std::optional<double> { return r.a * r.b; },
                        [](const EquilateralTriangle& t) -> std::optional<double> {
                          return t.height * t.height / std::sqrt(3.0);
                        },
                        [](const Polygon& poly) -> std::optional<double> { return signed_area(poly.vertices); },
                        [](const UnionOf& u) -> std::optional<double> {
                          if (u.members.size() == 1) return u.members.front().exact_area();
                          return std::nullopt;
                        },
                    },
                    shape_);
}

std::vector<Point> DomainSpec::boundary_samples(int per_piece) const {
  std::vector<Point> out;
  const auto sample_polygon = [&](const std::vector<Point>& v) {
    double perimeter = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) perimeter += norm(v[(k + 1) % v.size()] - v[k]);
    for (std::size_t k = 0; k < v.size(); ++k) {
      const Point a = v[k];
      const Point e = v[(k + 1) % v.size()] - a;
      const int n = std::max(1, static_cast<int>(std::ceil(per_piece * norm(e) / perimeter)));
      for (int s = 0; s < n; ++s) out.push_back(a + (static_cast<double>(s) / n) * e);
    }
  };
  std::visit(Overloaded{
                 [&](const Disk& d) {
                   for (int k = 0; k < per_piece; ++k) {
                     const double t = 2.0 * std::numbers::pi * k / per_piece;
                     out.push_back({d.center.x + d.radius * std::cos(t), d.center.y + d.radius * std::sin(t)});
                   }
                 },
                 [&](const Ellipse& e) {
                   for (int k = 0; k < per_piece; ++k) {
                     const double t = 2.0 * std::numbers::pi * k / per_piece;
                     out.push_back({e.center.x + e.a * std::cos(t), e.center.y + e.b * std::sin(t)});
                   }
                 },
                 [&](const Rectangle& r) { sample_polygon(rectangle_vertices(r)); },
                 [&](const EquilateralTriangle& t) { sample_polygon(triangle_vertices(t)); },
                 [&](const Polygon& poly) { sample_polygon(poly.vertices); },
                 [&](const UnionOf& u) {
                   for (std::size_t m = 0; m < u.members.size(); ++m) {
                     for (const auto& p : u.members[m].boundary_samples(per_piece)) {
                       bool covered = false;
                       for (std::size_t o = 0; o < u.members.size() && !covered; ++o) {
                         if (o != m && u.members[o].contains(p)) covered = true;
                       }
                       if (!covered) out.push_back(p);
                     }
                   }
                 },
             },
             shape_);
  return out;
}

// ---------------------------------------------------------------------------
// Grid

bool Grid::is_interior(int i, int j) const {
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return false;
  return mask_[static_cast<std::size_t>(j) * nx_ + i] != 0;
}

int Grid::unknown(int i, int j) const {
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return -1;
  return node_to_unknown_[static_cast<std::size_t>(j) * nx_ + i];
}

Point Grid::node_point(int i, int j) const {
  // Nodes sit on the lattice spacing * Z^2; origin is itself a lattice point.
  const long long gi = std::llround(origin_.x / spacing_) + i;
  const long long gj = std::llround(origin_.y / spacing_) + j;
  return {static_cast<double>(gi) * spacing_, static_cast<double>(gj) * spacing_};
}

GridPtr build_grid(const DomainSpec& domain, double target_spacing) {
  if (!(target_spacing > 0.0) || !std::isfinite(target_spacing)) {
    throw Error(ErrorKind::InvalidArgument, kModule, "spacing must be positive");
  }
  const auto bb = domain.bounding_box();
  const double dx = target_spacing;
  const long long i0 = static_cast<long long>(std::floor(bb[0] / dx)) - 1;
  const long long j0 = static_cast<long long>(std::floor(bb[1] / dx)) - 1;
  const long long i1 = static_cast<long long>(std::ceil(bb[2] / dx)) + 1;
  const long long j1 = static_cast<long long>(std::ceil(bb[3] / dx)) + 1;
  const long long nx = i1 - i0 + 1;
  const long long ny = j1 - j0 + 1;
  if (nx * ny > 200'000'000LL) throw Error(ErrorKind::InvalidArgument, kModule, "grid too large for spacing");

  std::shared_ptr<Grid> g(new Grid());
  g->spacing_ = dx;
  g->origin_ = {static_cast<double>(i0) * dx, static_cast<double>(j0) * dx};
  g->nx_ = static_cast<int>(nx);
  g->ny_ = static_cast<int>(ny);
  g->mask_.assign(static_cast<std::size_t>(nx * ny), 0);
  g->node_to_unknown_.assign(static_cast<std::size_t>(nx * ny), -1);

  for (int j = 0; j < g->ny_; ++j) {
    for (int i = 0; i < g->nx_; ++i) {
      const std::size_t node = static_cast<std::size_t>(j) * g->nx_ + i;
      if (domain.contains(g->node_point(i, j))) {
        g->mask_[node] = 1;
        g->node_to_unknown_[node] = static_cast<int>(g->unknown_to_node_.size());
        g->unknown_to_node_.push_back(static_cast<int>(node));
      }
    }
  }
  if (g->unknown_to_node_.empty()) throw Error(ErrorKind::EmptyInterior, kModule, "no grid node lies inside the domain");

  constexpr int di[4] = {1, -1, 0, 0};
  constexpr int dj[4] = {0, 0, 1, -1};
  const int n = g->num_unknowns();
  g->neighbors_.resize(n);
  g->arms_.resize(n);
  for (int u = 0; u < n; ++u) {
    const int i = g->node_i(u);
    const int j = g->node_j(u);
    const Point p = g->node_point(i, j);
    for (int d = 0; d < 4; ++d) {
      const int nb = g->unknown(i + di[d], j + dj[d]);
      g->neighbors_[u][d] = nb;
      if (nb >= 0) {
        g->arms_[u][d] = 1.0;
      } else {
        const double t = domain.exit_fraction(p, g->node_point(i + di[d], j + dj[d]));
        g->arms_[u][d] = std::clamp(t, std::numeric_limits<double>::min(), 1.0);
      }
    }
  }

  // Connectivity of the interior mask through 4-neighbour links.
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int d = 0; d < 4; ++d) {
      const int v = g->neighbors_[u][d];
      if (v >= 0 && !seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  if (reached != n) {
    throw Error(ErrorKind::DisconnectedInterior, kModule,
                "interior mask splits into several components (" + std::to_string(reached) + " of " +
                    std::to_string(n) + " nodes reachable); refine the spacing");
  }
  return g;
}

// ---------------------------------------------------------------------------
// Geometry functionals

double directional_extent(const DomainSpec& domain, double theta) {
  const double ux = std::cos(theta);
  const double uy = std::sin(theta);
  return domain.support(ux, uy) + domain.support(-ux, -uy);
}

GeometryReport geometry_report(const DomainSpec& domain, const Grid& grid) {
  GeometryReport r;
  const double dx = grid.spacing();
  r.area = domain.exact_area().value_or(grid.num_unknowns() * dx * dx);
  r.convex = domain.is_convex();
  r.width = extremal_extent(domain, true);
  r.diameter = extremal_extent(domain, false);

  const bool is_union = std::holds_alternative<UnionOf>(domain.shape());
  std::vector<Point> samples;
  if (is_union) samples = domain.boundary_samples(4096);
  const auto dist = [&](Point p) {
    if (!domain.contains(p)) return 0.0;
    if (!is_union) return domain.distance_to_boundary(p);
    double d = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) d = std::min(d, norm(p - s));
    return d;
  };

  const int n = grid.num_unknowns();
  const int stride = is_union ? std::max(1, n / 20000) : 1;
  Point best = grid.point(0);
  double best_d = -1.0;
  for (int u = 0; u < n; u += stride) {
    const Point p = grid.point(u);
    const double d = dist(p);
    if (d > best_d) {
      best_d = d;
      best = p;
    }
  }
  // Compass search from the best node.
  double step = dx;
  const double floor_step = 1e-13 * std::max(1.0, r.diameter);
  while (step > floor_step) {
    bool moved = false;
    for (const Point dir : {Point{1, 0}, Point{-1, 0}, Point{0, 1}, Point{0, -1}, Point{1, 1}, Point{1, -1},
                            Point{-1, 1}, Point{-1, -1}}) {
      const Point cand = best + step * dir;
      const double d = dist(cand);
      if (d > best_d) {
        best_d = d;
        best = cand;
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }
  r.inradius = best_d;
  return r;
}

std::string mask_csv(const Grid& grid) {
  std::ostringstream os;
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      if (i) os << ',';
      os << (grid.is_interior(i, j) ? 1 : 0);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace pauli
