#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pauli/field.hpp"
#include "pauli/geometry.hpp"
#include "pauli/potential.hpp"

namespace pauli {

/// First zero of J0 and its square.
inline constexpr double kBesselJ0Zero = 2.404825557695773;
inline constexpr double kBesselJ0ZeroSq = kBesselJ0Zero * kBesselJ0Zero;
inline constexpr double kZeta3 = 1.2020569031595942;
/// 7 zeta(3) / 16.
inline constexpr double kVdbcConstant = 7.0 * kZeta3 / 16.0;

/// A positive quantity that may be far below the double range.
struct LogBound {
  double value = 0.0;
  double log_value = 0.0;
};

/// h^2 lambda_D exp(2 psi_min / h).
LogBound ekp_lower(double h, double lambda_d, double psi_min);

/// 4 flux [sum_j det(H_j)^{-1/2}]^{-1} exp(2 psi_min / h). Hessians as
/// (h_xx, h_xy, h_yy). Throws NonPositiveHessian naming the minimizer.
LogBound upper_case1(double h, double flux, const std::vector<std::array<double, 3>>& hessians, double psi_min);

/// Degenerate-minimum envelope O(h^{1/4}) exp(2 psi_min / h): (2 psi_min, 1/4).
struct Case2Envelope {
  double exponent_rate = 0.0;
  double power = 0.25;
};
Case2Envelope case2_envelope(double h, double psi_min);

/// Largest h with ekp_lower <= upper_case1, by a log-spaced scan plus bisection.
double threshold_h(double lambda_d, double flux, const std::vector<std::array<double, 3>>& hessians);

enum class BoundSide { Lower, Upper };

/// A bound on the (negative) value psi_min.
struct PsiBound {
  std::string name;
  BoundSide side = BoundSide::Lower;
  double value = 0.0;
  bool applicable = true;
  std::string reference;
  std::string note;
};

/// -B0 delta^2/4, -B0 ell^2/8 and, for convex domains, -B0 rho^2/2. On a
/// non-convex domain the rho entry is returned with applicable = false.
std::vector<PsiBound> torsion_bounds(const GeometryReport& geom, double b0);

/// -B0 R^2 / 4 with pi R^2 = area.
double polya_szego_bound(double area, double b0);

/// Bounds on |psi_min| for Laplace(psi) = 1: (1/lambda_D, 7 zeta(3)/16 j^2 / lambda_D).
std::array<double, 2> vdbc_bounds(double lambda_d);

/// Upper bound on |psi_min|: M/(4 pi) for C = 0, else log(4 pi/(4 pi - C M))/C.
/// Throws FluxTooLarge when C M >= 4 pi.
double bandle_bound(double c, double total_flux_m);

/// Smallest admissible C for a sampled field: max over nodes of
/// -Laplace_h(log B)/(2B), clamped at 0. Requires B > 0.
double bandle_admissible_c(const Grid& grid, const MagneticField& b);

struct ConsistencyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct BoundsLedger {
  double h = 0.0;
  std::string domain;
  std::string field;
  double psi_min = 0.0;  ///< measured
  double lambda_d = 0.0;
  double flux = 0.0;
  bool positive_field = true;
  std::optional<LogBound> lower_ekp;
  std::optional<LogBound> upper_case1;
  bool case2_flag = false;
  std::optional<Case2Envelope> envelope;
  std::optional<double> threshold_h;
  std::vector<PsiBound> psi_min_bounds;
  std::optional<double> diamagnetic_note;
  std::optional<double> computed_lambda;
  std::optional<double> computed_residual;
  std::optional<double> equal_area_disk_lambda;
  std::vector<ConsistencyCheck> checks;

  bool all_pass() const;
};

struct LedgerInputs {
  double h = 0.1;
  const DomainSpec* domain = nullptr;
  GeometryReport geometry;
  MagneticField field = MagneticField::constant(1.0);
  const Grid* grid = nullptr;
  double psi_min = 0.0;
  MinimizerReport minimizers;
  double lambda_d = 0.0;
  std::optional<double> computed_lambda;
  std::optional<double> computed_residual;
  std::optional<double> equal_area_disk_lambda;
  /// Absolute slack for the psi_min comparisons (equality cases).
  double psi_tolerance = 1e-8;
};

BoundsLedger assemble_ledger(const LedgerInputs& in);

/// Nested JSON report, one entry per bound.
std::string ledger_json(const BoundsLedger& ledger);

}  // namespace pauli
