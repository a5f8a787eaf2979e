#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pauli/field.hpp"
#include "pauli/geometry.hpp"

namespace pauli {

/// Solves Laplace(psi) = B in the domain, psi = 0 on the boundary, with the
/// Shortley-Weller five-point operator. Stops when
/// max|L_h psi - B| <= tol * max|B|. Throws NoConvergence after
/// 20 * (nx + ny) Krylov iterations.
ScalarField solve_poisson(GridPtr grid, const MagneticField& b, double tol = 1e-10);

/// Applies the Shortley-Weller Laplacian (with the field's boundary value).
std::vector<double> apply_laplacian(const ScalarField& field);

struct AnalyticPsi {
  ScalarField field;
  double psi_min = 0.0;
  Point minimizer{};
};

/// Closed-form potential for constant field b0 on a disk, ellipse, rectangle
/// or equilateral triangle, sampled on `grid`. Throws UnsupportedDomain.
AnalyticPsi analytic_psi(const DomainSpec& domain, GridPtr grid, double b0);

/// Pointwise closed form (same domains). The rectangle uses the double
/// Fourier series over odd indices up to 999.
double analytic_psi_at(const DomainSpec& domain, double b0, Point p);

struct Minimizer {
  Point point{};
  double value = 0.0;
  std::array<double, 3> hessian{};  ///< (h_xx, h_xy, h_yy)
  bool degenerate = false;

  double hessian_det() const { return hessian[0] * hessian[2] - hessian[1] * hessian[1]; }
  double hessian_trace() const { return hessian[0] + hessian[2]; }
  /// Eigenvalues of the Hessian, ascending.
  std::array<double, 2> hessian_eigenvalues() const;
};

struct MinimizerReport {
  double psi_min = 0.0;
  std::vector<Minimizer> minimizers;
  double cluster_tolerance = 0.0;
};

/// 10 * spacing^2 * max|B|.
double default_cluster_tolerance(const Grid& grid, const MagneticField& b);

/// Global minimum plus every nodal local minimum within cluster_tol of it,
/// each refined by a least-squares quadratic on its 5x5 neighbourhood.
MinimizerReport find_minimizers(const ScalarField& field, double cluster_tol);

struct VectorPotential {
  ScalarField a1;
  ScalarField a2;
};

/// A1 = -d psi / dy, A2 = d psi / dx with second-order differences that use
/// the boundary value at the cut distance next to the boundary.
VectorPotential vector_potential(const ScalarField& psi);

struct GaugeReport {
  double curl_residual = 0.0;
  double div_residual = 0.0;
  double tangency_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Max-norm residuals of curl A - B and div A on interior nodes and of A.nu at
/// the boundary crossing points of the grid lines. Curl and div skip nodes
/// closer than min_boundary_distance to the boundary (re-entrant corners make
/// them blow up there).
GaugeReport check_gauge(const DomainSpec& domain, const ScalarField& a1, const ScalarField& a2,
                        const MagneticField& b, double tol, double min_boundary_distance = 0.0);

/// Flux (1/2pi) * integral of B, by nodal quadrature unless B is constant
/// and the area is known exactly.
double magnetic_flux(const DomainSpec& domain, const Grid& grid, const MagneticField& b);

struct ContourPolyline {
  double level = 0.0;
  std::vector<Point> points;
};

/// Marching-squares level lines of the field (exterior nodes take the
/// boundary value), chained into polylines.
std::vector<ContourPolyline> extract_contours(const ScalarField& field, const std::vector<double>& levels);

/// CSV with header `x,y,value`, one row per interior node, 17 significant digits.
std::string field_csv(const ScalarField& field);
/// CSV with header `level,segment_id,x,y`.
std::string contours_csv(const std::vector<ContourPolyline>& lines);

}  // namespace pauli
