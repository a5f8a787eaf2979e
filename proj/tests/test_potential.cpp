#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "pauli/errors.hpp"
#include "pauli/potential.hpp"

using namespace pauli;

namespace {

double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0;
  for (std::size_t k = 0; k < a.values.size(); ++k) m = std::max(m, std::abs(a.values[k] - b.values[k]));
  return m;
}

// Torsion of the square of side 2 at its centre by a slowly converging
// single series: psi(0,0) = -1/2 plus the harmonic correction
// sum over odd k of 2 (-1)^((k-1)/2) / a^3 / cosh(a), a = k pi / 2.
double square_center_single_series() {
  double s = 0;
  for (int k = 1; k < 200; k += 2) {
    const double kp = k * std::numbers::pi / 2;
    s += ((k - 1) / 2 % 2 == 0 ? 1.0 : -1.0) * 2.0 / (kp * kp * kp) / std::cosh(kp);
  }
  return -0.5 + s;
}

}  // namespace

TEST_CASE("disk potential from the solver") {
  auto d = DomainSpec::disk(1.0);
  auto g = build_grid(d, 1.0 / 128);
  auto psi = solve_poisson(g, MagneticField::constant(1.0));
  CHECK(std::abs(min_value(psi.values) + 0.25) < 2e-4);
  auto ex = analytic_psi(d, g, 1.0);
  CHECK(max_diff(psi, ex.field) < 1e-10);
  CHECK(ex.psi_min == doctest::Approx(-0.25));
}

TEST_CASE("zero field gives zero potential") {
  auto g = build_grid(DomainSpec::ellipse(1.5, 1.0), 1.0 / 32);
  auto psi = solve_poisson(g, MagneticField::constant(0.0));
  CHECK(max_abs(psi.values) == 0.0);
}

TEST_CASE("square potential at the centre") {
  auto s = DomainSpec::rectangle(2.0, 2.0);
  auto g = build_grid(s, 1.0 / 128);
  auto psi = solve_poisson(g, MagneticField::constant(1.0));
  const double centre = psi.values[g->unknown(g->nx() / 2, g->ny() / 2)];
  CHECK(std::abs(centre + 0.294685) < 5e-4);
  const double oracle = square_center_single_series();
  CHECK(std::abs(analytic_psi_at(s, 1.0, {0, 0}) - oracle) < 1e-9);
}

TEST_CASE("closed forms solve the Poisson problem") {
  // Second differences of the closed form reproduce B at interior points.
  const std::vector<DomainSpec> ds = {DomainSpec::disk(1.3), DomainSpec::ellipse(2.0, 1.0),
                                      DomainSpec::equilateral_triangle(1.0), DomainSpec::rectangle(2.0, 1.0)};
  const double e = 1e-3;
  for (const auto& d : ds) {
    CAPTURE(d.kind_name());
    for (Point p : {Point{0.05, 0.02}, Point{-0.1, 0.07}}) {
      const double lap = (analytic_psi_at(d, 2.0, {p.x + e, p.y}) + analytic_psi_at(d, 2.0, {p.x - e, p.y}) +
                          analytic_psi_at(d, 2.0, {p.x, p.y + e}) + analytic_psi_at(d, 2.0, {p.x, p.y - e}) -
                          4 * analytic_psi_at(d, 2.0, p)) /
                         (e * e);
      CHECK(lap == doctest::Approx(2.0).epsilon(d.kind_name() == "rectangle" ? 2e-2 : 1e-5));
    }
  }
  // Vanishing on the boundary.
  CHECK(std::abs(analytic_psi_at(DomainSpec::equilateral_triangle(1.0), 1.0, {-1.0 / 3, 0.2})) < 1e-15);
  CHECK(std::abs(analytic_psi_at(DomainSpec::ellipse(2.0, 1.0), 1.0, {0, 1})) < 1e-15);
  CHECK(std::abs(analytic_psi_at(DomainSpec::rectangle(2.0, 1.0), 1.0, {1, 0.2})) < 1e-12);
}

TEST_CASE("closed-form minima") {
  CHECK(analytic_psi(DomainSpec::ellipse(2.0, 1.0), build_grid(DomainSpec::ellipse(2.0, 1.0), 0.25), 1.0).psi_min ==
        doctest::Approx(-1.0 / (2.0 / 4 + 2.0)));
  CHECK(analytic_psi(DomainSpec::ellipse(1.0, 1.0), build_grid(DomainSpec::disk(1.0), 0.25), 1.0).psi_min ==
        doctest::Approx(-0.25));
  auto t = DomainSpec::equilateral_triangle(1.0);
  auto at = analytic_psi(t, build_grid(t, 1.0 / 64), 1.0);
  CHECK(at.psi_min == doctest::Approx(-1.0 / 27));
  CHECK(at.minimizer.x == 0.0);
  CHECK_THROWS_AS(analytic_psi(DomainSpec::dumbbell(1, 1.5, 0.4), build_grid(DomainSpec::disk(1.0), 0.25), 1.0),
                  Error);
  // Linear in B0.
  CHECK(analytic_psi_at(t, 3.0, {0.1, 0.1}) == doctest::Approx(3 * analytic_psi_at(t, 1.0, {0.1, 0.1})));
}

TEST_CASE("second-order convergence on the closed-form domains") {
  const std::vector<DomainSpec> ds = {DomainSpec::rectangle(2.0, 1.0, {0.013, 0.007}),
                                      DomainSpec::equilateral_triangle(1.0)};
  for (const auto& d : ds) {
    CAPTURE(d.kind_name());
    double prev = 0;
    for (double h : {1.0 / 32, 1.0 / 64}) {
      auto g = build_grid(d, h);
      const double err = max_diff(solve_poisson(g, MagneticField::constant(1.0), 1e-12), analytic_psi(d, g, 1.0).field);
      if (prev > 0) CHECK(prev / err >= 3.5);
      prev = err;
    }
  }
}

TEST_CASE("maximum principle, linearity and comparison") {
  auto d = DomainSpec::dumbbell(1.0, 1.5, 0.4);
  auto g = build_grid(d, 1.0 / 32);
  auto bump = MagneticField::formula([](Point p) { return 1.0 + 0.5 * std::sin(p.x) * std::cos(2 * p.y); });
  auto psi = solve_poisson(g, bump);
  for (double v : psi.values) CHECK(v <= 0.0);
  CHECK(min_value(psi.values) < 0.0);

  auto psi3 = solve_poisson(g, bump.scaled(3.0));
  double lin = 0;
  for (std::size_t k = 0; k < psi.values.size(); ++k) lin = std::max(lin, std::abs(psi3.values[k] - 3 * psi.values[k]));
  CHECK(lin < 1e-8 * max_abs(psi3.values));

  auto big = MagneticField::formula([](Point p) { return 1.6 + 0.5 * std::sin(p.x) * std::cos(2 * p.y); });
  auto psib = solve_poisson(g, big);
  bool ordered = true;
  for (std::size_t k = 0; k < psi.values.size(); ++k) ordered = ordered && psib.values[k] <= psi.values[k] + 1e-12;
  CHECK(ordered);
  CHECK(min_value(psib.values) < min_value(psi.values));
}

TEST_CASE("minimizers") {
  auto d = DomainSpec::disk(1.0);
  auto g = build_grid(d, 1.0 / 64);
  auto rep = find_minimizers(analytic_psi(d, g, 1.0).field, 10.0 / (64 * 64));
  REQUIRE(rep.minimizers.size() == 1);
  const auto& m = rep.minimizers[0];
  CHECK(std::hypot(m.point.x, m.point.y) < 1e-12);
  CHECK(m.hessian[0] == doctest::Approx(0.5));
  CHECK(std::abs(m.hessian[1]) < 1e-10);
  CHECK(m.hessian[2] == doctest::Approx(0.5));
  CHECK(m.hessian_det() == doctest::Approx(0.25));
  CHECK_FALSE(m.degenerate);

  auto e = DomainSpec::ellipse(2.0, 1.0, {0.03, -0.02});
  auto ge = build_grid(e, 1.0 / 64);
  auto pe = solve_poisson(ge, MagneticField::constant(1.0));
  auto re = find_minimizers(pe, default_cluster_tolerance(*ge, MagneticField::constant(1.0)));
  CHECK(re.minimizers.size() == 1);
  CHECK(re.minimizers[0].point.x == doctest::Approx(0.03).epsilon(1e-6));

  auto db = DomainSpec::dumbbell(1.0, 1.5, 0.4);
  auto gd = build_grid(db, 1.0 / 64);
  auto pd = solve_poisson(gd, MagneticField::constant(1.0));
  auto rd = find_minimizers(pd, default_cluster_tolerance(*gd, MagneticField::constant(1.0)));
  REQUIRE(rd.minimizers.size() == 2);
  CHECK(rd.minimizers[0].point.x == doctest::Approx(-rd.minimizers[1].point.x).epsilon(1e-6));
  CHECK(std::abs(rd.minimizers[0].point.y) < 1e-6);
  for (const auto& mz : rd.minimizers) CHECK(mz.value <= rd.psi_min + rd.cluster_tolerance);
}

TEST_CASE("Hessian trace matches B at the minimizer") {
  auto t = DomainSpec::equilateral_triangle(1.0);
  auto g = build_grid(t, 1.0 / 256);
  auto rep = find_minimizers(solve_poisson(g, MagneticField::constant(1.0)), 10.0 / (256.0 * 256));
  REQUIRE(rep.minimizers.size() == 1);
  CHECK(std::abs(rep.minimizers[0].hessian_trace() - 1.0) < 0.05);
}

TEST_CASE("vector potential and gauge") {
  auto d = DomainSpec::disk(1.0);
  auto g = build_grid(d, 1.0 / 32);
  auto A = vector_potential(analytic_psi(d, g, 1.0).field);
  double err = 0;
  for (int u = 0; u < g->num_unknowns(); ++u) {
    const Point p = g->point(u);
    err = std::max({err, std::abs(A.a1.values[u] + p.y / 2), std::abs(A.a2.values[u] - p.x / 2)});
  }
  CHECK(err < 1e-10);
  auto rep = check_gauge(d, A.a1, A.a2, MagneticField::constant(1.0), 1e-10);
  CHECK(rep.pass);

  auto zero = vector_potential(ScalarField::zeros(g));
  CHECK(max_abs(zero.a1.values) == 0.0);

  // A gradient field: curl and div vanish but it is not tangent.
  auto gx = ScalarField::zeros(g);
  auto gy = ScalarField::zeros(g);
  std::fill(gx.values.begin(), gx.values.end(), 1.0);
  auto bad = check_gauge(d, gx, gy, MagneticField::constant(0.0), 1e-6);
  CHECK(bad.curl_residual == 0.0);
  CHECK(bad.div_residual == 0.0);
  CHECK(bad.tangency_residual > 0.9);
  CHECK_FALSE(bad.pass);

  auto e = DomainSpec::ellipse(2.0, 1.0);
  auto ge = build_grid(e, 1.0 / 128);
  auto Ae = vector_potential(solve_poisson(ge, MagneticField::constant(1.0)));
  CHECK(check_gauge(e, Ae.a1, Ae.a2, MagneticField::constant(1.0), 1e-3).pass);
}

TEST_CASE("curl of A reproduces a variable field") {
  auto d = DomainSpec::disk(1.0);
  auto field = MagneticField::formula([](Point p) { return 1.0 + p.x * p.x; });
  double prev_all = 0, prev_deep = 0;
  for (double h : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    auto g = build_grid(d, h);
    auto A = vector_potential(solve_poisson(g, field, 1e-12));
    const double all = check_gauge(d, A.a1, A.a2, field, 1.0).curl_residual;
    // Centred curl on nodes at least three steps from the boundary.
    double deep = 0;
    for (int u = 0; u < g->num_unknowns(); ++u) {
      const int i = g->node_i(u), j = g->node_j(u);
      bool inside = true;
      for (int k = -3; k <= 3; ++k) inside = inside && g->unknown(i + k, j) >= 0 && g->unknown(i, j + k) >= 0;
      if (!inside) continue;
      const double c = (A.a2.values[g->unknown(i + 1, j)] - A.a2.values[g->unknown(i - 1, j)] -
                        A.a1.values[g->unknown(i, j + 1)] + A.a1.values[g->unknown(i, j - 1)]) /
                       (2 * h);
      const Point p = g->point(u);
      deep = std::max(deep, std::abs(c - 1.0 - p.x * p.x));
    }
    if (prev_deep > 0) {
      CHECK(prev_deep / deep > 3.0);
      // Boundary-adjacent nodes lose an order through the one-sided differences.
      CHECK(prev_all / all > 1.6);
    }
    prev_all = all;
    prev_deep = deep;
  }
  CHECK(prev_all < 1e-3);
}

TEST_CASE("flux") {
  auto d = DomainSpec::disk(1.0);
  auto g = build_grid(d, 1.0 / 64);
  CHECK(magnetic_flux(d, *g, MagneticField::constant(2.0)) == doctest::Approx(1.0));
  auto f = MagneticField::formula([](Point) { return 2.0; });
  CHECK(magnetic_flux(d, *g, f) == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("contours of the disk potential are circles") {
  auto d = DomainSpec::disk(1.0);
  auto g = build_grid(d, 1.0 / 64);
  auto psi = analytic_psi(d, g, 1.0).field;
  auto lines = extract_contours(psi, {-0.2, -0.1});
  REQUIRE(lines.size() == 2);
  for (const auto& l : lines) {
    const double r = std::sqrt(4 * (l.level + 0.25));
    CHECK(l.points.front().x == doctest::Approx(l.points.back().x));
    for (const Point& p : l.points) CHECK(std::abs(std::hypot(p.x, p.y) - r) < 1e-3);
  }
  const std::string csv = contours_csv(lines);
  CHECK(csv.rfind("level,segment_id,x,y\n", 0) == 0);
  const std::string fcsv = field_csv(psi);
  CHECK(std::count(fcsv.begin(), fcsv.end(), '\n') == g->num_unknowns() + 1);
}

TEST_CASE("dumbbell contours split into two loops below the neck level") {
  auto db = DomainSpec::dumbbell(1.0, 1.5, 0.4);
  auto g = build_grid(db, 1.0 / 32);
  auto psi = solve_poisson(g, MagneticField::constant(1.0));
  auto lines = extract_contours(psi, {0.9 * min_value(psi.values)});
  CHECK(lines.size() == 2);
}
