#pragma once

#include <string>
#include <vector>

namespace pauli {

/// sign * exp(log_abs); sign is 0 for an exact zero.
struct LogValue {
  int sign = 0;
  double log_abs = 0.0;
  double value() const;
};

/// Regularized Kummer function M(a,b,z)/Gamma(b) = sum_s (a)_s z^s / (Gamma(b+s) s!)
/// for b > 0, 0 <= z <= 700, summed in log-scaled form. Throws Overflow past z = 700.
LogValue kummer_regularized(double a, double b, double z);

/// Number of positive zeros in z of the regularized Kummer function: 0 for
/// a >= 0, ceil(-a) otherwise.
int count_positive_zeros(double a, double b);

/// Sign changes of the regularized Kummer function on n geometrically spaced
/// points of (1e-8, zmax].
int scan_positive_zeros(double a, double b, double zmax, int n);

/// Angular momentum channel of the Pauli operator on the disk of radius R.
struct RadialChannel {
  int m = 0;
  double h = 0.1;
  double B = 1.0;
  double R = 1.0;

  double z() const { return B * R * R / (2.0 * h); }
};

struct ChannelRoot {
  double lambda = 0.0;
  double residual = 0.0;  ///< |M| at the root, scaled by exp(-z)
  int iterations = 0;
};

/// k-th eigenvalue (k = 0 lowest) of channel m >= 0: the root in lambda of
/// M(-lambda/(2hB), m+1, BR^2/2h), bracketed in (2hBk, 2hB(k+1)).
ChannelRoot channel_root(const RadialChannel& ch, int k, double tol = 1e-13);
double channel_eigenvalue(const RadialChannel& ch, int k, double tol = 1e-13);

/// log of 2hB z^{m+1}/m! e^{-z}, z = BR^2/2h.
double asymptotic_log_eig(const RadialChannel& ch);

struct TempleBounds {
  double lower = 0.0;  ///< eta - eps^2 / (beta - eta)
  double eta = 0.0;    ///< Rayleigh quotient of the trial state (upper bound)
  double beta = 0.0;   ///< 2hB
  double epsilon2 = 0.0;
  double log_norm2 = 0.0;  ///< log ||v||^2
  double form = 0.0;       ///< <v, P_m v>
  double log_pv_norm2 = 0.0;
};

/// Temple enclosure of the lowest eigenvalue of channel m >= 0 with the trial
/// state r^m (e^{B(R^2-r^2)/4h} - e^{-B(R^2-r^2)/4h}). Throws TempleInapplicable
/// when eta >= 2hB.
TempleBounds temple_bounds(const RadialChannel& ch);

/// (2|m| - 1) h B for m < 0.
double negative_m_lower(const RadialChannel& ch);

/// Lowest eigenvalue of the radial operator by a cell-centred finite-volume
/// discretization with n cells (any m).
double radial_fd_lowest(const RadialChannel& ch, int cells);

struct ChannelSpectrum {
  RadialChannel channel;
  std::vector<double> eigenvalues;
  double temple_lower = 0.0;
  double rayleigh_upper = 0.0;
  bool temple_valid = false;
  double log_asymptotic = 0.0;
  double ratio = 0.0;  ///< lambda_{m,0} / asymptotic
};

ChannelSpectrum channel_spectrum(const RadialChannel& ch, int k_max);

struct DiskGroundReport {
  double h = 0.0, B = 0.0, R = 0.0;
  double lambda = 0.0;
  double temple_lower = 0.0;
  double rayleigh_upper = 0.0;
  double asymptotic = 0.0;
  double ratio = 0.0;
  std::vector<ChannelSpectrum> channels;  ///< m = 0..m_max
};

DiskGroundReport disk_ground(double h, double B, double R, int m_max = 2, int k_max = 0);

/// CSV `m,k,h,B,R,lambda,temple_lower,rayleigh_upper,asymptotic,ratio`; the
/// bound and asymptotic columns are filled on k = 0 rows only.
std::string channel_csv(const std::vector<ChannelSpectrum>& table);

}  // namespace pauli
