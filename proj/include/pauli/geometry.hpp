#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pauli {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }

struct Disk {
  double radius = 1.0;
  Point center{};
};

/// Axis-aligned ellipse with semi-axes `a` (along x) and `b` (along y).
struct Ellipse {
  double a = 1.0;
  double b = 1.0;
  Point center{};
};

/// Axis-aligned rectangle with side lengths `a` (along x) and `b` (along y).
struct Rectangle {
  double a = 1.0;
  double b = 1.0;
  Point center{};
};

/// Equilateral triangle of height `height`, centroid at `center`, one side
/// vertical at x = center.x - height/3 and the opposite vertex on the +x axis.
struct EquilateralTriangle {
  double height = 1.0;
  Point center{};
};

/// Simple polygon, vertices in counterclockwise order.
struct Polygon {
  std::vector<Point> vertices;
};

class DomainSpec;

struct UnionOf {
  std::vector<DomainSpec> members;
};

/// Planar open set described parametrically, as a polygon, or as a union of
/// such pieces. Immutable once built; the factories validate parameters.
class DomainSpec {
 public:
  using Shape = std::variant<Disk, Ellipse, Rectangle, EquilateralTriangle, Polygon, UnionOf>;

  static DomainSpec disk(double radius, Point center = {});
  static DomainSpec ellipse(double a, double b, Point center = {});
  static DomainSpec rectangle(double a, double b, Point center = {});
  static DomainSpec equilateral_triangle(double height, Point center = {});
  static DomainSpec polygon(std::vector<Point> vertices);
  static DomainSpec union_of(std::vector<DomainSpec> members);
  /// Two disks of radius `radius` centered at (+-half_separation, 0) joined by
  /// a horizontal bar of width `neck_width`.
  static DomainSpec dumbbell(double radius, double half_separation, double neck_width);

  const Shape& shape() const { return shape_; }
  std::string kind_name() const;

  /// Strict interior test; points on the boundary are outside.
  bool contains(Point p) const;

  /// Parameters t in [0, 1] at which the segment p + t (q - p) meets the
  /// boundary of this piece (for unions: of every member).
  std::vector<double> boundary_crossings(Point p, Point q) const;

  /// First boundary crossing leaving the domain along p -> q, as a fraction
  /// of |q - p|. Requires contains(p) and !contains(q).
  double exit_fraction(Point p, Point q) const;

  /// max over the closure of <x, (ux, uy)> for a unit direction.
  double support(double ux, double uy) const;

  /// Distance from an interior point to the boundary.
  double distance_to_boundary(Point p) const;

  /// Outward unit normal at (or near) a boundary point.
  Point outward_normal(Point p) const;

  /// Axis-aligned bounding box {xmin, ymin, xmax, ymax}.
  std::array<double, 4> bounding_box() const;

  bool is_convex() const;
  std::optional<double> exact_area() const;

  /// Points on the boundary of the set (for unions, member boundary points not
  /// interior to another member). Roughly `per_piece` points per piece.
  std::vector<Point> boundary_samples(int per_piece) const;

 private:
  explicit DomainSpec(Shape s) : shape_(std::move(s)) {}
  Shape shape_;
};

enum Direction : int { kEast = 0, kWest = 1, kNorth = 2, kSouth = 3 };

/// Uniform Cartesian discretization of a domain. Interior nodes are numbered
/// row-major (x fastest) and each carries its four arm lengths: the distance,
/// in units of spacing, to the neighbouring node or to the boundary when the
/// neighbour lies outside.
class Grid {
 public:
  Point origin() const { return origin_; }
  double spacing() const { return spacing_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int num_unknowns() const { return static_cast<int>(unknown_to_node_.size()); }

  bool is_interior(int i, int j) const;
  /// Unknown index of node (i, j) or -1 if exterior / out of range.
  int unknown(int i, int j) const;
  int node_i(int unknown) const { return unknown_to_node_[unknown] % nx_; }
  int node_j(int unknown) const { return unknown_to_node_[unknown] / nx_; }
  Point node_point(int i, int j) const;
  Point point(int unknown) const { return node_point(node_i(unknown), node_j(unknown)); }

  /// Neighbour unknown in direction d, or -1 if the arm ends on the boundary.
  int neighbor(int unknown, Direction d) const { return neighbors_[unknown][d]; }
  /// Arm length in direction d in units of spacing, in (0, 1].
  double arm(int unknown, Direction d) const { return arms_[unknown][d]; }
  const std::array<double, 4>& arms(int unknown) const { return arms_[unknown]; }

  const std::vector<std::uint8_t>& interior_mask() const { return mask_; }

 private:
  friend std::shared_ptr<const Grid> build_grid(const DomainSpec&, double);
  Grid() = default;

  Point origin_{};
  double spacing_ = 0.0;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<std::uint8_t> mask_;
  std::vector<int> node_to_unknown_;
  std::vector<int> unknown_to_node_;
  std::vector<std::array<int, 4>> neighbors_;
  std::vector<std::array<double, 4>> arms_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Lattice through the origin with the given spacing covering the domain.
/// Throws EmptyInterior / DisconnectedInterior.
GridPtr build_grid(const DomainSpec& domain, double target_spacing);

struct GeometryReport {
  double area = 0.0;
  double diameter = 0.0;  ///< largest directional extent
  double width = 0.0;     ///< smallest directional extent
  double inradius = 0.0;
  bool convex = false;
};

GeometryReport geometry_report(const DomainSpec& domain, const Grid& grid);

/// Extent of the projection of the domain onto direction theta.
double directional_extent(const DomainSpec& domain, double theta);

/// Row-major 0/1 mask, one grid row per line, rows ordered by increasing y.
std::string mask_csv(const Grid& grid);

}  // namespace pauli
