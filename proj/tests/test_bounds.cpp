#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <numbers>

#include "pauli/bounds.hpp"
#include "pauli/errors.hpp"
#include "pauli/potential.hpp"

using namespace pauli;

namespace {

const std::array<double, 3> kHalfIdentity{0.5, 0.0, 0.5};

struct Prepared {
  DomainSpec domain;
  GridPtr grid;
  ScalarField psi;
  MinimizerReport mins;
  GeometryReport geom;
};

Prepared prepare(const DomainSpec& d, double spacing, const MagneticField& b) {
  auto g = build_grid(d, spacing);
  auto psi = solve_poisson(g, b);
  auto mins = find_minimizers(psi, default_cluster_tolerance(*g, b));
  auto geom = geometry_report(d, *g);
  return {d, g, psi, mins, geom};
}

LedgerInputs inputs(const Prepared& p, double h, const MagneticField& b, double lambda_d) {
  LedgerInputs in;
  in.h = h;
  in.domain = &p.domain;
  in.geometry = p.geom;
  in.field = b;
  in.grid = p.grid.get();
  in.psi_min = p.mins.psi_min;
  in.minimizers = p.mins;
  in.lambda_d = lambda_d;
  return in;
}

const PsiBound& find(const BoundsLedger& l, const std::string& name) {
  for (const auto& b : l.psi_min_bounds) {
    if (b.name == name) return b;
  }
  throw std::runtime_error("missing bound " + name);
}

}  // namespace

TEST_CASE("hard-coded constants") {
  CHECK(std::abs(boost::math::cyl_bessel_j(0, kBesselJ0Zero)) < 1e-15);
  CHECK(kBesselJ0Zero == doctest::Approx(boost::math::cyl_bessel_j_zero(0.0, 1)).epsilon(1e-15));
  CHECK(kZeta3 == doctest::Approx(boost::math::zeta(3.0)).epsilon(1e-15));
  CHECK(kVdbcConstant * kBesselJ0ZeroSq < 3.0419);
  CHECK(kBesselJ0ZeroSq < 5.784025);
}

TEST_CASE("explicit lower bound") {
  auto b = ekp_lower(0.1, kBesselJ0ZeroSq, -0.25);
  CHECK(b.value == doctest::Approx(0.01 * kBesselJ0ZeroSq * std::exp(-5.0)).epsilon(1e-14));
  CHECK(b.value == doctest::Approx(3.897e-4).epsilon(1e-3));
  CHECK(ekp_lower(0.3, 7.0, 0.0).value == doctest::Approx(0.09 * 7.0));
  // h log(bound) tends to 2 psi_min; the log stays finite far past underflow
  auto tiny = ekp_lower(1e-4, kBesselJ0ZeroSq, -0.25);
  CHECK(tiny.value == 0.0);
  CHECK(std::isfinite(tiny.log_value));
  CHECK(1e-4 * tiny.log_value == doctest::Approx(-0.5).epsilon(1e-2));
  CHECK_THROWS_AS(ekp_lower(0.1, 1.0, 0.1), Error);
}

TEST_CASE("case 1 upper bound") {
  // unit disk: 4 (1/2) (1/2) e^{-1/2h}
  for (double h : {0.3, 0.1, 0.05}) {
    auto u = upper_case1(h, 0.5, {kHalfIdentity}, -0.25);
    CHECK(u.log_value == doctest::Approx(-0.5 / h).epsilon(1e-14));
  }
  CHECK(upper_case1(0.1, 0.5, {kHalfIdentity}, -0.25).value == doctest::Approx(6.7379e-3).epsilon(1e-4));
  // disk R=2, h=0.2
  CHECK(upper_case1(0.2, 2.0, {kHalfIdentity}, -1.0).value == doctest::Approx(4 * std::exp(-10.0)).epsilon(1e-14));
  CHECK(upper_case1(0.2, 2.0, {kHalfIdentity}, -1.0).value == doctest::Approx(1.8159e-4).epsilon(1e-4));
  auto one = upper_case1(0.1, 1.0, {kHalfIdentity}, -0.3);
  auto two = upper_case1(0.1, 1.0, {kHalfIdentity, kHalfIdentity}, -0.3);
  CHECK(two.value == doctest::Approx(one.value / 2).epsilon(1e-14));
  CHECK(std::isfinite(upper_case1(1e-4, 0.5, {kHalfIdentity}, -0.25).log_value));

  try {
    upper_case1(0.1, 1.0, {kHalfIdentity, {1.0, 0.0, -0.1}}, -0.3);
    FAIL("expected NonPositiveHessian");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositiveHessian);
    CHECK(std::string(e.what()).find("minimizer 1") != std::string::npos);
  }
}

TEST_CASE("case 2 envelope") {
  auto e = case2_envelope(0.1, -0.25);
  CHECK(e.exponent_rate == -0.5);
  CHECK(e.power == 0.25);
  CHECK(case2_envelope(0.3, 0.0).exponent_rate == 0.0);
}

TEST_CASE("threshold h matches the closed form") {
  for (double lam : {1.0, kBesselJ0ZeroSq, 20.0}) {
    for (double flux : {0.1, 0.5, 2.0}) {
      const double hs = threshold_h(lam, flux, {kHalfIdentity});
      CHECK(hs == doctest::Approx(std::sqrt(4 * flux / (lam * 2.0))).epsilon(1e-12));
      CHECK(ekp_lower(0.99 * hs, lam, -0.2).value <= upper_case1(0.99 * hs, flux, {kHalfIdentity}, -0.2).value);
      CHECK(ekp_lower(1.01 * hs, lam, -0.2).value > upper_case1(1.01 * hs, flux, {kHalfIdentity}, -0.2).value);
    }
  }
}

TEST_CASE("torsion bounds") {
  GeometryReport disk{std::numbers::pi, 2.0, 2.0, 1.0, true};
  auto t = torsion_bounds(disk, 1.0);
  REQUIRE(t.size() == 3);
  CHECK(t[0].value == doctest::Approx(-1.0));
  CHECK(t[1].value == doctest::Approx(-0.5));
  CHECK(t[2].value == doctest::Approx(-0.5));
  for (const auto& b : t) CHECK(b.value <= -0.25);
  auto t2 = torsion_bounds(disk, 2.0);
  for (int k = 0; k < 3; ++k) CHECK(t2[k].value == doctest::Approx(2 * t[k].value));

  GeometryReport square{4.0, 2 * std::sqrt(2.0), 2.0, 1.0, true};
  CHECK(torsion_bounds(square, 1.0)[1].value == doctest::Approx(-0.5));

  GeometryReport nonconvex{3.0, 4.0, 1.0, 0.5, false};
  auto t3 = torsion_bounds(nonconvex, 1.0);
  CHECK_FALSE(t3[2].applicable);
  CHECK(t3[2].note.find("RhoBoundSkipped") != std::string::npos);
}

TEST_CASE("Polya-Szego bound") {
  CHECK(polya_szego_bound(std::numbers::pi, 1.0) == doctest::Approx(-0.25));
  CHECK(polya_szego_bound(4.0, 1.0) == doctest::Approx(-1 / std::numbers::pi));
  CHECK(polya_szego_bound(4.0, 1.0) <= -0.294685);
  CHECK(polya_szego_bound(0.0, 1.0) == 0.0);
}

TEST_CASE("van den Berg-Carroll bounds") {
  auto d = vdbc_bounds(kBesselJ0ZeroSq);
  CHECK(d[0] == doctest::Approx(0.17292).epsilon(1e-4));
  CHECK(d[1] == doctest::Approx(0.52599).epsilon(1e-3));
  CHECK(d[0] <= 0.25);
  CHECK(0.25 <= d[1]);
  auto half = vdbc_bounds(2 * kBesselJ0ZeroSq);
  CHECK(half[0] == doctest::Approx(d[0] / 2));
  CHECK(half[1] == doctest::Approx(d[1] / 2));
  auto sq = vdbc_bounds(std::numbers::pi * std::numbers::pi / 2);
  CHECK(sq[0] == doctest::Approx(0.20264).epsilon(1e-4));
  CHECK(sq[1] == doctest::Approx(0.61644).epsilon(1e-4));
  CHECK(sq[0] <= 0.294685);
  CHECK(0.294685 <= sq[1]);
}

TEST_CASE("Bandle bound") {
  CHECK(bandle_bound(0.0, std::numbers::pi) == doctest::Approx(0.25));
  CHECK(bandle_bound(1.0, 2 * std::numbers::pi) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(bandle_bound(1e-9, 3.0) == doctest::Approx(3.0 / (4 * std::numbers::pi)).epsilon(1e-8));
  try {
    bandle_bound(2.0, 2 * std::numbers::pi);
    FAIL("expected FluxTooLarge");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FluxTooLarge);
  }
}

TEST_CASE("admissible Bandle constant") {
  auto d = DomainSpec::disk(1.0);
  auto g = build_grid(d, 1.0 / 32);
  CHECK(bandle_admissible_c(*g, MagneticField::constant(2.0)) == 0.0);
  // B = exp(-k |x|^2): -Laplace(log B) = 4k, so C = max 2k / B = 2k e^{k}
  const double k = 0.3;
  auto b = MagneticField::formula([k](Point p) { return std::exp(-k * (p.x * p.x + p.y * p.y)); });
  const double c = bandle_admissible_c(*g, b);
  CHECK(c == doctest::Approx(2 * k * std::exp(k)).epsilon(2e-2));
  CHECK(c <= 2 * k * std::exp(k) * (1 + 1e-9));
  // log-harmonic field: B = exp(x)
  auto eh = MagneticField::formula([](Point p) { return std::exp(p.x); });
  CHECK(bandle_admissible_c(*g, eh) < 1e-9);
}

TEST_CASE("ledger for the unit disk") {
  const auto B = MagneticField::constant(1.0);
  auto p = prepare(DomainSpec::disk(1.0), 1.0 / 64, B);
  auto in = inputs(p, 0.1, B, kBesselJ0ZeroSq);
  auto L = assemble_ledger(in);
  REQUIRE(L.lower_ekp);
  REQUIRE(L.upper_case1);
  CHECK(L.lower_ekp->value == doctest::Approx(3.897e-4).epsilon(1e-3));
  CHECK(L.upper_case1->value == doctest::Approx(std::exp(-5.0)).epsilon(1e-6));
  CHECK(L.lower_ekp->value <= L.upper_case1->value);
  CHECK(L.flux == doctest::Approx(0.5));
  CHECK_FALSE(L.case2_flag);
  REQUIRE(L.threshold_h);
  CHECK(*L.threshold_h == doctest::Approx(std::sqrt(4 * 0.5 / (kBesselJ0ZeroSq * 2))).epsilon(1e-5));
  CHECK(L.psi_min_bounds.size() == 7);
  CHECK(find(L, "polya_szego").value == doctest::Approx(-0.25));
  CHECK(find(L, "bandle").value == doctest::Approx(-0.25));
  CHECK(L.all_pass());
  for (const auto& c : L.checks) INFO(c.name << " " << c.detail);

  const std::string js = ledger_json(L);
  for (const char* key : {"\"lower_ekp\"", "\"upper_case1\"", "\"psi_min_bounds\"", "\"vdbc_upper\"", "\"reference\"",
                          "\"checks\"", "\"all_pass\": true"}) {
    CHECK(js.find(key) != std::string::npos);
  }
}

TEST_CASE("ledger brackets psi_min on the closed-form domains") {
  const auto B = MagneticField::constant(1.0);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  struct Case {
    DomainSpec d;
    double lambda_d;
  };
  // exact Dirichlet eigenvalues; equilateral triangle of side s has
  // 16 pi^2 / (3 s^2), and height 1 means s^2 = 4/3
  std::vector<Case> cases = {{DomainSpec::disk(1.0), kBesselJ0ZeroSq},
                             {DomainSpec::rectangle(2.0, 2.0), pi2 / 2},
                             {DomainSpec::equilateral_triangle(1.0), 4 * pi2}};
  for (const auto& c : cases) {
    auto p = prepare(c.d, 1.0 / 128, B);
    auto L = assemble_ledger(inputs(p, 0.2, B, c.lambda_d));
    INFO(c.d.kind_name());
    int applicable = 0;
    for (const auto& b : L.psi_min_bounds) applicable += b.applicable;
    CHECK(applicable >= 5);
    for (const auto& ch : L.checks) {
      INFO(ch.name << ": " << ch.detail);
      CHECK(ch.pass);
    }
  }
}

TEST_CASE("square bounds bracket the tabulated centre value") {
  const auto B = MagneticField::constant(1.0);
  auto p = prepare(DomainSpec::rectangle(2.0, 2.0), 1.0 / 64, B);
  auto in = inputs(p, 0.2, B, std::numbers::pi * std::numbers::pi / 2);
  in.psi_min = -0.294685;
  auto L = assemble_ledger(in);
  CHECK(L.all_pass());
  CHECK(find(L, "polya_szego").value == doctest::Approx(-1 / std::numbers::pi));
  CHECK(find(L, "vdbc_lower").value == doctest::Approx(-0.20264).epsilon(1e-4));
  CHECK(find(L, "vdbc_upper").value == doctest::Approx(-0.61644).epsilon(1e-4));
  CHECK(find(L, "bandle").value == doctest::Approx(-1 / std::numbers::pi));
  // a psi_min outside the bracket is flagged
  in.psi_min = -0.15;
  CHECK_FALSE(assemble_ledger(in).all_pass());
}

TEST_CASE("non-positive field marks eigenvalue bounds inapplicable") {
  const auto B = MagneticField::formula([](Point p) { return p.x; }, "x");
  auto d = DomainSpec::disk(1.0);
  auto g = build_grid(d, 1.0 / 32);
  LedgerInputs in;
  in.h = 0.2;
  in.domain = &d;
  in.geometry = geometry_report(d, *g);
  in.field = B;
  in.grid = g.get();
  in.psi_min = -0.01;
  in.lambda_d = kBesselJ0ZeroSq;
  auto L = assemble_ledger(in);
  CHECK_FALSE(L.positive_field);
  CHECK_FALSE(L.lower_ekp);
  CHECK_FALSE(L.upper_case1);
  REQUIRE(L.diamagnetic_note);
  CHECK(*L.diamagnetic_note == doctest::Approx(0.04 * kBesselJ0ZeroSq));
  for (const auto& b : L.psi_min_bounds) CHECK_FALSE(b.applicable);
}

TEST_CASE("scaling B by c") {
  const double c = 3.0;
  GeometryReport disk{std::numbers::pi, 2.0, 2.0, 1.0, true};
  auto t1 = torsion_bounds(disk, 1.0);
  auto tc = torsion_bounds(disk, c);
  for (int k = 0; k < 3; ++k) CHECK(tc[k].value == c * t1[k].value);
  CHECK(polya_szego_bound(4.0, c) == c * polya_szego_bound(4.0, 1.0));
  // psi -> c psi, flux -> c flux, Hessians -> c H
  const double h = 0.1;
  auto l1 = ekp_lower(h, 5.0, -0.25);
  auto lc = ekp_lower(h, 5.0, -0.25 * c);
  CHECK(lc.log_value - l1.log_value == doctest::Approx(2 * (c - 1) * -0.25 / h).epsilon(1e-14));
  auto u1 = upper_case1(h, 0.5, {kHalfIdentity}, -0.25);
  auto uc = upper_case1(h, 0.5 * c, {{0.5 * c, 0.0, 0.5 * c}}, -0.25 * c);
  // prefactor picks up c from the flux and c from det^{-1/2}
  CHECK(uc.log_value - u1.log_value == doctest::Approx(2 * std::log(c) + 2 * (c - 1) * -0.25 / h).epsilon(1e-13));
}
