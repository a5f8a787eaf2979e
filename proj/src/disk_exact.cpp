#include "pauli/disk_exact.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "internal/kahan.hpp"
#include "pauli/errors.hpp"
#include "pauli/io.hpp"

namespace pauli {

namespace {

constexpr const char* kModule = "disk_exact";

void check_channel(const RadialChannel& ch) {
  if (!(ch.h > 0) || !(ch.B > 0) || !(ch.R > 0) || !std::isfinite(ch.h) || !std::isfinite(ch.B) ||
      !std::isfinite(ch.R)) {
    throw Error(ErrorKind::InvalidArgument, kModule, "h, B and R must be positive and finite");
  }
}

// M(-lambda/2hB, m+1, z) * exp(-z): same sign as M, bounded magnitude.
double scaled_kummer(const RadialChannel& ch, double lambda) {
  const double z = ch.z();
  const LogValue v = kummer_regularized(-lambda / (2 * ch.h * ch.B), ch.m + 1.0, z);
  if (v.sign == 0) return 0.0;
  return v.sign * std::exp(v.log_abs - z);
}

// Integral over [0, R] with the interval split at an interior peak.
template <class F>
double integrate(F f, double R, double peak) {
  using boost::math::quadrature::gauss_kronrod;
  constexpr unsigned depth = 20;
  constexpr double tol = 1e-13;
  if (peak > 0 && peak < R) {
    return gauss_kronrod<double, 15>::integrate(f, 0.0, peak, depth, tol) +
           gauss_kronrod<double, 15>::integrate(f, peak, R, depth, tol);
  }
  return gauss_kronrod<double, 15>::integrate(f, 0.0, R, depth, tol);
}

}  // namespace

double LogValue::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

LogValue kummer_regularized(double a, double b, double z) {
  if (!(b > 0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorKind::InvalidArgument, kModule, "Kummer function needs finite a and b > 0");
  }
  if (!(z >= 0)) throw Error(ErrorKind::InvalidArgument, kModule, "Kummer function needs z >= 0");
  if (z > 700) throw Error(ErrorKind::Overflow, kModule, "z = " + fmt17(z) + " exceeds 700; increase h");

  // Terms t_s = (a)_s z^s / (Gamma(b+s) s!), kept as (sign, log|t_s|).
  std::vector<int> sg;
  std::vector<double> lg;
  int sign = 1;
  double lt = -std::lgamma(b);
  double top = lt;
  const double tail = std::log(1e-17);
  const double past = std::max(z, -a) + 1.0;
  sg.push_back(sign);
  lg.push_back(lt);
  if (z > 0) {
    for (int s = 0; s < 1000000; ++s) {
      const double f = (a + s) * z / ((b + s) * (s + 1.0));
      if (f == 0.0) break;  // a is a non-positive integer: polynomial
      sign = f < 0 ? -sign : sign;
      lt += std::log(std::abs(f));
      sg.push_back(sign);
      lg.push_back(lt);
      top = std::max(top, lt);
      if (s + 1 > past && lt < top + tail) break;
    }
  }
  detail::KahanSum sum;
  for (std::size_t s = 0; s < lg.size(); ++s) sum.add(sg[s] * std::exp(lg[s] - top));
  const double v = sum.value();
  if (v == 0.0) return {0, -std::numeric_limits<double>::infinity()};
  return {v > 0 ? 1 : -1, top + std::log(std::abs(v))};
}

int count_positive_zeros(double a, double b) {
  if (!(b > 0)) throw Error(ErrorKind::InvalidArgument, kModule, "zero count needs b > 0");
  if (a >= 0) return 0;
  return static_cast<int>(std::ceil(-a));
}

ChannelRoot channel_root(const RadialChannel& ch, int k, double tol) {
  check_channel(ch);
  if (ch.m < 0) throw Error(ErrorKind::InvalidArgument, kModule, "channel roots need m >= 0");
  if (k < 0) throw Error(ErrorKind::InvalidArgument, kModule, "k must be >= 0");
  if (!(tol > 0)) throw Error(ErrorKind::InvalidArgument, kModule, "tolerance must be positive");
  const double step = 2 * ch.h * ch.B;
  double lo = step * k, hi = step * (k + 1);
  double flo = scaled_kummer(ch, lo), fhi = scaled_kummer(ch, hi);
  if (flo == 0.0) return {lo, 0.0, 0};
  if (fhi == 0.0) return {hi, 0.0, 0};
  if ((flo > 0) == (fhi > 0)) {
    hi = step * (k + 2);
    fhi = scaled_kummer(ch, hi);
    if (fhi == 0.0) return {hi, 0.0, 0};
    if ((flo > 0) == (fhi > 0)) {
      throw Error(ErrorKind::BracketFailure, kModule,
                  "no sign change for m = " + std::to_string(ch.m) + ", k = " + std::to_string(k));
    }
  }
  int iters = 0;
  while (hi - lo > 1e-3 * step) {
    const double mid = 0.5 * (lo + hi);
    const double fm = scaled_kummer(ch, mid);
    ++iters;
    if (fm == 0.0) return {mid, 0.0, iters};
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  const int bits = std::clamp(static_cast<int>(std::ceil(-std::log2(tol))) + 1, 8, 52);
  boost::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::toms748_solve([&](double l) { return scaled_kummer(ch, l); }, lo, hi, flo,
                                                        fhi, boost::math::tools::eps_tolerance<double>(bits), max_iter);
  const double root = 0.5 * (a + b);
  return {root, std::abs(scaled_kummer(ch, root)), iters + static_cast<int>(max_iter)};
}

double channel_eigenvalue(const RadialChannel& ch, int k, double tol) { return channel_root(ch, k, tol).lambda; }

double asymptotic_log_eig(const RadialChannel& ch) {
  check_channel(ch);
  if (ch.m < 0) throw Error(ErrorKind::InvalidArgument, kModule, "asymptotic formula needs m >= 0");
  const double z = ch.z();
  return std::log(2 * ch.h * ch.B) + (ch.m + 1) * std::log(z) - std::lgamma(ch.m + 1.0) - z;
}

TempleBounds temple_bounds(const RadialChannel& ch) {
  check_channel(ch);
  if (ch.m < 0) throw Error(ErrorKind::InvalidArgument, kModule, "Temple bounds need m >= 0");
  const double alpha = ch.B / (4 * ch.h);
  const double R = ch.R, R2 = R * R;
  const int p = 2 * ch.m + 1;
  const double z = 2 * alpha * R2;  // BR^2/2h

  // ||v||^2 e^{-2 alpha R^2} = int r^p e^{-2 alpha r^2} (1 - e^{-2 alpha (R^2 - r^2)})^2 dr,
  // scaled by its peak so nothing underflows.
  const double rpk = std::sqrt(p / (4 * alpha));
  const double rs = std::min(rpk, R);
  const double lpeak = p * std::log(rs) - 2 * alpha * rs * rs;
  const double iv = integrate(
      [&](double r) {
        if (r <= 0) return 0.0;
        const double d = -std::expm1(-2 * alpha * (R2 - r * r));
        return std::exp(p * std::log(r) - 2 * alpha * r * r - lpeak) * d * d;
      },
      R, rpk);
  const double ipv = integrate(
      [&](double r) { return r <= 0 ? 0.0 : std::pow(r, p) * -std::expm1(-2 * alpha * (R2 - r * r)); }, R, -1);
  const double ip2 = integrate(
      [&](double r) { return r <= 0 ? 0.0 : std::exp(p * std::log(r) - 2 * alpha * (R2 - r * r)); }, R, -1);

  TempleBounds t;
  t.beta = 2 * ch.h * ch.B;
  t.log_norm2 = z + lpeak + std::log(iv);
  const double c = 2 * (ch.m + 1) * ch.h * ch.B;
  t.form = c * ipv;
  t.log_pv_norm2 = 2 * std::log(c) + std::log(ip2);
  t.eta = std::exp(std::log(t.form) - t.log_norm2);
  const double q = std::exp(t.log_pv_norm2 - t.log_norm2);
  t.epsilon2 = std::max(0.0, q - t.eta * t.eta);
  if (!(t.eta < t.beta)) {
    throw Error(ErrorKind::TempleInapplicable, kModule,
                "Rayleigh quotient " + fmt17(t.eta) + " is not below 2hB = " + fmt17(t.beta));
  }
  t.lower = t.eta - t.epsilon2 / (t.beta - t.eta);
  return t;
}

double negative_m_lower(const RadialChannel& ch) {
  check_channel(ch);
  if (ch.m >= 0) throw Error(ErrorKind::InvalidArgument, kModule, "negative-m bound needs m < 0");
  return (2.0 * std::abs(ch.m) - 1.0) * ch.h * ch.B;
}

double radial_fd_lowest(const RadialChannel& ch, int cells) {
  check_channel(ch);
  if (cells < 4) throw Error(ErrorKind::InvalidArgument, kModule, "need at least 4 cells");
  const int n = cells;
  const double dr = ch.R / n;
  // Stiffness of -(r u')' in flux form, mass r dr, Dirichlet at R half a cell out.
  Eigen::VectorXd diag(n), off(n - 1);
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * dr;
    const double w = r * dr;
    const double inner = i * dr;
    const double outer = (i + 1) * dr;
    double s = (inner + outer) / dr;
    if (i == n - 1) s = (inner + 2 * outer) / dr;
    const double v = ch.m / r - ch.B * r / (2 * ch.h);
    diag[i] = (s / w + v * v) * ch.h * ch.h - ch.h * ch.B;
    if (i + 1 < n) {
      const double w1 = (i + 1.5) * dr * dr;
      off[i] = -outer / dr / std::sqrt(w * w1) * ch.h * ch.h;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

ChannelSpectrum channel_spectrum(const RadialChannel& ch, int k_max) {
  ChannelSpectrum s;
  s.channel = ch;
  for (int k = 0; k <= k_max; ++k) s.eigenvalues.push_back(channel_eigenvalue(ch, k));
  try {
    const auto t = temple_bounds(ch);
    s.temple_lower = t.lower;
    s.rayleigh_upper = t.eta;
    s.temple_valid = true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::TempleInapplicable) throw;
  }
  s.log_asymptotic = asymptotic_log_eig(ch);
  s.ratio = std::exp(std::log(s.eigenvalues[0]) - s.log_asymptotic);
  return s;
}

DiskGroundReport disk_ground(double h, double B, double R, int m_max, int k_max) {
  DiskGroundReport rep;
  rep.h = h;
  rep.B = B;
  rep.R = R;
  for (int m = 0; m <= m_max; ++m) rep.channels.push_back(channel_spectrum({m, h, B, R}, k_max));
  const auto& g = rep.channels.front();
  rep.lambda = g.eigenvalues[0];
  rep.temple_lower = g.temple_lower;
  rep.rayleigh_upper = g.rayleigh_upper;
  rep.asymptotic = std::exp(g.log_asymptotic);
  rep.ratio = g.ratio;
  return rep;
}

std::string channel_csv(const std::vector<ChannelSpectrum>& table) {
  std::ostringstream os;
  os << "m,k,h,B,R,lambda,temple_lower,rayleigh_upper,asymptotic,ratio\n";
  for (const auto& s : table) {
    const auto& c = s.channel;
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
      os << c.m << ',' << k << ',' << fmt17(c.h) << ',' << fmt17(c.B) << ',' << fmt17(c.R) << ','
         << fmt17(s.eigenvalues[k]) << ',';
      if (k == 0) {
        if (s.temple_valid) os << fmt17(s.temple_lower) << ',' << fmt17(s.rayleigh_upper);
        else os << ',';
        os << ',' << fmt17(std::exp(s.log_asymptotic)) << ',' << fmt17(s.ratio);
      } else {
        os << ",,,";
      }
      os << '\n';
    }
  }
  return os.str();
}

int scan_positive_zeros(double a, double b, double zmax, int n) {
  if (!(zmax > 1e-8) || n < 1) throw Error(ErrorKind::InvalidArgument, kModule, "scan needs zmax > 1e-8 and n >= 1");
  int count = 0;
  int prev = kummer_regularized(a, b, 1e-8).sign;
  for (int k = 1; k <= n; ++k) {
    const double z = 1e-8 * std::pow(zmax / 1e-8, double(k) / n);
    const int s = kummer_regularized(a, b, z).sign;
    if (s != 0 && s != prev) {
      ++count;
      prev = s;
    }
  }
  return count;
}

}  // namespace pauli
