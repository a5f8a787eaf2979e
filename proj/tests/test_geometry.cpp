#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "pauli/errors.hpp"
#include "pauli/geometry.hpp"

using namespace pauli;
using std::numbers::pi;

namespace {

// Brute-force distance to the boundary of an ellipse by dense parametric scan.
double ellipse_distance_scan(double a, double b, Point p) {
  double best = 1e300;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double t = 2 * pi * k / n;
    best = std::min(best, std::hypot(a * std::cos(t) - p.x, b * std::sin(t) - p.y));
  }
  return best;
}

}  // namespace

TEST_CASE("coarse disk grid keeps exactly the nodes strictly inside") {
  auto g = build_grid(DomainSpec::disk(1.0), 0.5);
  int count = 0;
  for (int u = 0; u < g->num_unknowns(); ++u) {
    const Point p = g->point(u);
    CHECK(p.x * p.x + p.y * p.y < 1.0);
    ++count;
  }
  // (0,0), (+-0.5,0), (0,+-0.5) and the four (+-0.5,+-0.5) corners.
  CHECK(count == 9);
  const int c = g->unknown(static_cast<int>(std::lround(-g->origin().x / 0.5)),
                           static_cast<int>(std::lround(-g->origin().y / 0.5)));
  REQUIRE(c >= 0);
  CHECK(g->arm(c, kEast) == doctest::Approx(1.0));
  // From (0.5, 0) the east arm reaches x = 1.
  const int e = g->neighbor(c, kEast);
  REQUIRE(e >= 0);
  CHECK(g->neighbor(e, kEast) == -1);
  CHECK(g->arm(e, kEast) == doctest::Approx(1.0).epsilon(1e-12));
  // From (0.5, 0.5) the east arm ends at x = sqrt(0.75).
  const int ne = g->neighbor(e, kNorth);
  REQUIRE(ne >= 0);
  CHECK(g->arm(ne, kEast) * 0.5 == doctest::Approx(std::sqrt(0.75) - 0.5).epsilon(1e-12));
}

TEST_CASE("grid-aligned square has unit arms everywhere") {
  auto g = build_grid(DomainSpec::rectangle(2.0, 2.0), 0.125);
  CHECK(g->num_unknowns() == 15 * 15);
  for (int u = 0; u < g->num_unknowns(); ++u) {
    for (int d = 0; d < 4; ++d) CHECK(g->arm(u, static_cast<Direction>(d)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("fine disk node count tracks the area") {
  const double h = 1.0 / 128;
  auto g = build_grid(DomainSpec::disk(1.0), h);
  CHECK(std::abs(g->num_unknowns() * h * h - pi) / pi < 5e-3);
}

TEST_CASE("arm lengths land on the boundary") {
  auto d = DomainSpec::ellipse(2.0, 1.0, {0.1, -0.05});
  auto g = build_grid(d, 1.0 / 32);
  int cut = 0;
  for (int u = 0; u < g->num_unknowns(); ++u) {
    for (int k = 0; k < 4; ++k) {
      const auto dir = static_cast<Direction>(k);
      if (g->neighbor(u, dir) >= 0) continue;
      ++cut;
      const double t = g->arm(u, dir) * g->spacing();
      Point p = g->point(u);
      if (dir == kEast) p.x += t;
      if (dir == kWest) p.x -= t;
      if (dir == kNorth) p.y += t;
      if (dir == kSouth) p.y -= t;
      const double q = (p.x - 0.1) * (p.x - 0.1) / 4 + (p.y + 0.05) * (p.y + 0.05);
      CHECK(std::abs(q - 1.0) < 1e-12);
    }
  }
  CHECK(cut > 0);
}

TEST_CASE("grids are deterministic") {
  auto d = DomainSpec::dumbbell(1.0, 1.5, 0.4);
  auto g1 = build_grid(d, 1.0 / 32);
  auto g2 = build_grid(d, 1.0 / 32);
  CHECK(g1->interior_mask() == g2->interior_mask());
  REQUIRE(g1->num_unknowns() == g2->num_unknowns());
  for (int u = 0; u < g1->num_unknowns(); ++u) CHECK(g1->arms(u) == g2->arms(u));
}

TEST_CASE("grid errors") {
  CHECK_THROWS_AS(build_grid(DomainSpec::disk(0.1, {0.5, 0.5}), 1.0), Error);
  try {
    build_grid(DomainSpec::disk(0.1, {0.5, 0.5}), 1.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyInterior);
  }
  // Two disks that do not touch.
  auto apart = DomainSpec::union_of({DomainSpec::disk(1.0, {-2, 0}), DomainSpec::disk(1.0, {2, 0})});
  try {
    build_grid(apart, 0.1);
    FAIL("expected DisconnectedInterior");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DisconnectedInterior);
  }
  CHECK_THROWS_AS(DomainSpec::disk(-1.0), Error);
  CHECK_THROWS_AS(DomainSpec::polygon({{0, 0}, {1, 0}}), Error);
  // Clockwise square.
  CHECK_THROWS_AS(DomainSpec::polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), Error);
  // Bow tie.
  CHECK_THROWS_AS(DomainSpec::polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), Error);
}

TEST_CASE("geometry of the unit disk and the square") {
  auto d = DomainSpec::disk(1.0);
  auto r = geometry_report(d, *build_grid(d, 1.0 / 64));
  CHECK(r.area == doctest::Approx(pi).epsilon(1e-14));
  CHECK(r.diameter == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(r.width == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(r.inradius == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.convex);

  auto s = DomainSpec::rectangle(2.0, 2.0);
  auto q = geometry_report(s, *build_grid(s, 1.0 / 64));
  CHECK(q.area == doctest::Approx(4.0));
  CHECK(q.diameter == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-10));
  CHECK(q.width == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(q.inradius == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ellipse inradius against a dense scan") {
  auto d = DomainSpec::ellipse(2.0, 1.0);
  auto r = geometry_report(d, *build_grid(d, 1.0 / 64));
  // The inscribed disk is centred at the origin since b^2/a < b.
  const double oracle = ellipse_distance_scan(2.0, 1.0, {0, 0});
  CHECK(std::abs(r.inradius - oracle) < 1e-3);
  CHECK(r.area == doctest::Approx(2 * pi));
  CHECK(r.width == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(r.diameter == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("ellipse boundary distance matches the scan off-centre") {
  auto d = DomainSpec::ellipse(2.0, 1.0);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ux(-1.8, 1.8), uy(-0.8, 0.8);
  int tried = 0;
  while (tried < 20) {
    const Point p{ux(rng), uy(rng)};
    if (!d.contains(p)) continue;
    ++tried;
    CHECK(std::abs(d.distance_to_boundary(p) - ellipse_distance_scan(2.0, 1.0, p)) < 1e-6);
  }
}

TEST_CASE("equilateral triangle geometry") {
  auto t = DomainSpec::equilateral_triangle(1.0);
  auto r = geometry_report(t, *build_grid(t, 1.0 / 128));
  CHECK(r.area == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(r.inradius == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
  CHECK(r.width == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.diameter == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-9));
}

TEST_CASE("geometric invariants hold for every domain kind") {
  const std::vector<DomainSpec> domains = {
      DomainSpec::disk(0.7, {0.2, 0.1}),
      DomainSpec::ellipse(1.5, 0.6),
      DomainSpec::rectangle(3.0, 1.0),
      DomainSpec::equilateral_triangle(1.2),
      DomainSpec::polygon({{0, 0}, {2, 0}, {2, 1}, {1, 0.4}, {0, 1}}),
      DomainSpec::dumbbell(1.0, 1.5, 0.4),
  };
  for (const auto& d : domains) {
    auto r = geometry_report(d, *build_grid(d, 1.0 / 32));
    CAPTURE(d.kind_name());
    CHECK(r.inradius > 0);
    CHECK(r.inradius <= r.width / 2);
    CHECK(r.width <= r.diameter);
    CHECK(r.area <= pi * r.diameter * r.diameter / 4);
  }
}

TEST_CASE("area, width and inradius converge toward the parametric values") {
  auto e = DomainSpec::ellipse(2.0, 1.0);
  auto g = build_grid(e, 1.0 / 256);
  const double count_area = g->num_unknowns() * g->spacing() * g->spacing();
  CHECK(std::abs(count_area - 2 * pi) / (2 * pi) < 1e-3);
  auto r = geometry_report(e, *g);
  CHECK(std::abs(r.inradius - 1.0) < 1e-3);
}

TEST_CASE("mask csv has one row per grid line") {
  auto g = build_grid(DomainSpec::disk(1.0), 0.5);
  const std::string csv = mask_csv(*g);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == g->ny());
  CHECK(std::count(csv.begin(), csv.end(), '1') == 9);
}
