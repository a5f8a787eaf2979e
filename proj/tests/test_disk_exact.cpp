#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <cmath>
#include <random>

#include "pauli/disk_exact.hpp"
#include "pauli/errors.hpp"

using namespace pauli;

TEST_CASE("regularized Kummer function against an independent implementation") {
  const double cases[][3] = {{0.3, 1.0, 2.0},   {-0.7, 2.0, 5.0},   {-2.5, 1.0, 10.0}, {-4.2, 3.0, 30.0},
                             {1.5, 2.5, 0.1},   {-0.01, 1.0, 20.0}, {-3.0, 2.0, 7.0},  {-5.5, 4.0, 60.0}};
  for (const auto& c : cases) {
    CAPTURE(c[0]);
    CAPTURE(c[2]);
    const double ref = boost::math::hypergeometric_1F1(c[0], c[1], c[2]) / boost::math::tgamma(c[1]);
    const double got = kummer_regularized(c[0], c[1], c[2]).value();
    // Near-cancelling sums are compared on the scale of the largest term.
    const double scale = std::exp(c[2]) * std::pow(c[2], std::max(0.0, c[0] - c[1]));
    CHECK(std::abs(got - ref) <= 1e-12 * std::max({std::abs(ref), scale, 1.0}));
  }
}

TEST_CASE("Kummer special cases") {
  for (double z : {0.0, 0.5, 3.0, 40.0}) {
    CHECK(kummer_regularized(0.0, 2.5, z).value() == doctest::Approx(1.0 / std::tgamma(2.5)));
  }
  CHECK(kummer_regularized(-1.0, 1.0, 2.0).value() == doctest::Approx(-1.0));
  // a = -2, b = 1: 1 - 2z + z^2/2 with roots 2 -+ sqrt 2.
  for (double r : {2 - std::sqrt(2.0), 2 + std::sqrt(2.0)}) {
    CHECK(std::abs(kummer_regularized(-2.0, 1.0, r).value()) < 1e-14);
    CHECK(kummer_regularized(-2.0, 1.0, r - 1e-6).sign != kummer_regularized(-2.0, 1.0, r + 1e-6).sign);
  }
  // Large z stays finite in log form.
  const auto big = kummer_regularized(0.5, 1.0, 650.0);
  CHECK(big.sign == 1);
  CHECK(std::isfinite(big.log_abs));
  CHECK(big.log_abs > 600);
  CHECK_THROWS_AS(kummer_regularized(0.5, 1.0, 701.0), Error);
  CHECK_THROWS_AS(kummer_regularized(0.5, 0.0, 1.0), Error);
}

TEST_CASE("zero counts") {
  CHECK(count_positive_zeros(0.5, 1) == 0);
  CHECK(count_positive_zeros(-2.5, 1) == 3);
  CHECK(count_positive_zeros(-2.0, 3) == 2);
  CHECK(scan_positive_zeros(-2.0, 3, 100, 4000) == 2);
}

TEST_CASE("zero counts on 200 random cases") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> ua(-6.0, 0.0);
  std::uniform_int_distribution<int> ub(1, 5);
  int mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    double a = ua(rng);
    if (a == 0.0) a = -0.5;
    const int b = ub(rng);
    const int scanned = scan_positive_zeros(a, b, 700, 6000);
    if (scanned != count_positive_zeros(a, b)) {
      ++mismatches;
      MESSAGE("a = " << a << ", b = " << b << ": scan " << scanned);
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("channel roots") {
  const RadialChannel c0{0, 0.1, 1.0, 1.0};
  const double l = channel_eigenvalue(c0, 0);
  CHECK(l > 0);
  CHECK(l < 0.2);
  CHECK(std::abs(std::log(l) + 5) / 5 < 0.12);
  // Bracket endpoints.
  CHECK(kummer_regularized(0.0, 1.0, c0.z()).sign == 1);
  CHECK(kummer_regularized(-1.0, 1.0, c0.z()).sign == -1);

  const RadialChannel c1{1, 0.1, 1.0, 1.0};
  const double ratio = channel_eigenvalue(c1, 0) / (0.2 * 25 * std::exp(-5.0));
  CHECK(std::abs(ratio - 1) < 3 * c1.h);

  // Second root sits in (2hB, 4hB).
  const double l1 = channel_eigenvalue(c0, 1);
  CHECK(l1 > 0.2);
  CHECK(l1 < 0.4);

  // h = 1/2: BR^2/2h = 1 = m + 1 puts the root on the bracket end, lambda = 2hB.
  CHECK(channel_eigenvalue({0, 0.5, 1.0, 1.0}, 0) == 1.0);
  CHECK_THROWS_AS(channel_eigenvalue({-1, 0.1, 1.0, 1.0}, 0), Error);
}

TEST_CASE("channel roots against the radial finite-volume oracle") {
  for (const RadialChannel& ch : {RadialChannel{0, 0.3, 1, 1}, RadialChannel{1, 0.2, 1, 1},
                                  RadialChannel{2, 0.1, 1, 1}, RadialChannel{0, 0.2, 2, 0.8}}) {
    CAPTURE(ch.m);
    CAPTURE(ch.h);
    const double exact = channel_eigenvalue(ch, 0);
    const double fd = radial_fd_lowest(ch, 4000);
    CHECK(std::abs(fd - exact) / exact < 1e-5);
    const auto r = channel_root(ch, 0);
    CHECK(r.residual < 1e-12);
  }
}

TEST_CASE("brackets change sign whenever BR^2/2h > m + 1") {
  for (int m = 0; m <= 3; ++m) {
    for (double h : {0.2, 0.1, 0.05, 0.02}) {
      const RadialChannel ch{m, h, 1.0, 1.0};
      if (ch.z() <= m + 1) continue;
      CHECK(kummer_regularized(0.0, m + 1.0, ch.z()).sign == 1);
      CHECK(kummer_regularized(-1.0, m + 1.0, ch.z()).sign == -1);
    }
  }
}

TEST_CASE("asymptotic formula") {
  CHECK(std::exp(asymptotic_log_eig({0, 0.1, 1, 1})) == doctest::Approx(std::exp(-5.0)).epsilon(1e-13));
  CHECK(std::exp(asymptotic_log_eig({0, 0.37, 1, 1})) == doctest::Approx(std::exp(-1 / 0.74)).epsilon(1e-13));
  CHECK(std::exp(asymptotic_log_eig({2, 0.05, 1, 1})) == doctest::Approx(0.1 * 1000 / 2 * std::exp(-10.0)));
}

TEST_CASE("Temple enclosure") {
  for (double h : {0.2, 0.1, 0.05}) {
    const RadialChannel ch{0, h, 1, 1};
    const auto t = temple_bounds(ch);
    const double l = channel_eigenvalue(ch, 0);
    CHECK(t.lower <= l);
    CHECK(l <= t.eta);
  }
  const RadialChannel c{0, 0.05, 1, 1};
  const auto t = temple_bounds(c);
  const double e10 = std::exp(-10.0);
  CHECK(t.eta / e10 <= 1 + 5 * c.h);
  CHECK(e10 / t.lower <= 1 + 5 * c.h);

  const auto t2 = temple_bounds({0, 0.02, 1, 1});
  CHECK(std::abs(t2.form - 0.02) / 0.02 < 0.05);
  // ||v||^2 ~ (h/B) e^{BR^2/2h} for m = 0.
  CHECK(std::abs(std::exp(t2.log_norm2 - 25.0) / 0.02 - 1) < 0.05);
  // Higher channels: ||v||^2 ~ 2^m m! (h/B)^{m+1} e^{BR^2/2h}.
  const auto t3 = temple_bounds({2, 0.01, 1, 1});
  CHECK(std::abs(std::exp(t3.log_norm2 - 50.0) / (8 * 1e-6) - 1) < 0.1);

  CHECK_THROWS_AS(temple_bounds({0, 0.5, 1, 1}), Error);
}

TEST_CASE("negative angular momentum") {
  CHECK(negative_m_lower({-1, 0.1, 1, 1}) == doctest::Approx(0.1));
  CHECK(negative_m_lower({-3, 0.2, 2, 1}) == doctest::Approx(2.0));
  CHECK(radial_fd_lowest({-1, 0.1, 1, 1}, 2000) >= 0.1);
  CHECK(radial_fd_lowest({-2, 0.1, 1, 1}, 2000) >= 0.3);
}

TEST_CASE("disk ground state") {
  const auto r = disk_ground(0.1, 1, 1, 2);
  CHECK((r.rayleigh_upper - r.temple_lower) / r.lambda <= 0.30);
  CHECK(r.temple_lower <= r.lambda);
  CHECK(r.lambda <= r.rayleigh_upper);
  REQUIRE(r.channels.size() == 3);
  CHECK(r.channels[0].eigenvalues[0] < r.channels[1].eigenvalues[0]);
  CHECK(r.channels[1].eigenvalues[0] < r.channels[2].eigenvalues[0]);

  double c = 0;
  for (double h : {0.2, 0.1, 0.05}) c = std::max(c, std::abs(disk_ground(h, 1, 1, 0).ratio - 1) / h);
  MESSAGE("fitted constant C in |ratio - 1| <= C h: " << c);
  CHECK(c <= 4.0);
}

TEST_CASE("channel csv") {
  const auto r = disk_ground(0.1, 1, 1, 1, 1);
  const std::string csv = channel_csv(r.channels);
  CHECK(csv.rfind("m,k,h,B,R,lambda,temple_lower,rayleigh_upper,asymptotic,ratio\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.find("0.006737946999085467") != std::string::npos);
}
