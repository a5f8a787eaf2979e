#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "pauli/field.hpp"
#include "pauli/geometry.hpp"

namespace pauli {

enum class Formulation { DirectPauli, WeightedCR, DirichletLaplacian };

std::string to_string(Formulation f);
Formulation formulation_from_string(const std::string& s);

using SparseMatrixC = Eigen::SparseMatrix<std::complex<double>>;

/// A Hermitian sparse operator on the interior nodes of a grid.
///
/// For the weighted form, `matrix` holds the diagonally scaled stiffness
/// M^{-1/2} K M^{-1/2}, so eigenvalues of `matrix` are the generalized
/// eigenvalues of K v = lambda M v; `log_mass` keeps the lumped mass in log
/// form and `factor` is a sparse F with matrix = F^H F, used to evaluate
/// Rayleigh quotients without cancellation.
struct DiscreteOperator {
  Formulation formulation = Formulation::DirichletLaplacian;
  double h = 1.0;
  GridPtr grid;
  SparseMatrixC matrix;
  std::optional<Eigen::VectorXd> log_mass;
  std::optional<SparseMatrixC> factor;
  double suggested_shift = 0.0;

  int dimension() const { return static_cast<int>(matrix.rows()); }
  /// Lumped mass entries (may underflow to 0 only when the log is below -708).
  Eigen::VectorXd mass() const;
  /// Exact Hermitian check: matrix == matrix^H entrywise.
  bool is_hermitian() const;
};

/// h^2 (D_A)^2 - h B with link phases exp(-i int A / h) (midpoint rule),
/// symmetric cut-edge treatment, Dirichlet data. An optional gauge function
/// chi adds the exact link integral (chi_v - chi_u)/h, i.e. A -> A + grad chi.
DiscreteOperator assemble_pauli(GridPtr grid, const ScalarField& a1, const ScalarField& a2, const MagneticField& b,
                                double h, const ScalarField* gauge = nullptr);

/// h^2 int e^{-2 Psi/h} |(d1 + i d2) v|^2 on cut-cell P1 triangles, with
/// Psi = psi - min(psi) and a lumped mass e^{-2 Psi/h}. Throws WeightUnderflow
/// when fewer than five nodes carry a representable weight.
DiscreteOperator assemble_weighted_form(GridPtr grid, const ScalarField& psi, double h);

/// Dirichlet Laplacian (symmetric five-point stencil with cut-edge diagonal terms).
DiscreteOperator assemble_dirichlet_laplacian(GridPtr grid);

struct SpectralResult {
  std::vector<double> eigenvalues;
  std::vector<double> residual_norms;
  int iterations = 0;
  double shift_used = 0.0;
  bool converged = false;
  Eigen::MatrixXcd eigenvectors;  ///< columns, unit norm
};

/// k smallest eigenvalues by block shift-invert subspace iteration with
/// Rayleigh-Ritz, started from the all-ones vector plus fixed-seed random
/// vectors. Converged when the Ritz values change by at most tol relatively.
/// Throws NoConvergence or SingularShift.
SpectralResult smallest_eigs(const DiscreteOperator& op, int k, double tol = 1e-10,
                             std::optional<double> shift = std::nullopt, int max_iterations = 300);

/// <x, A x> / <x, x>, through the factor when there is one.
double rayleigh_quotient(const DiscreteOperator& op, const Eigen::VectorXcd& x);

/// Rayleigh quotient of the trial state v = 1 - exp(2 psi / h) in the weighted form.
double weighted_trial_quotient(const DiscreteOperator& weighted, const ScalarField& psi);

double dirichlet_lambda(GridPtr grid, double tol = 1e-10);

struct SweepRow {
  double h = 0.0;
  double lambda = 0.0;
  double residual = 0.0;
  bool converged = false;
  bool usable = false;
  std::string note;
};

struct RateFit {
  double intercept = 0.0;  ///< estimate of 2 psi_min
  double intercept_sigma = 0.0;
  double c_hlogh = 0.0;
  double d_h = 0.0;
  std::vector<double> h_used;
};

struct SweepResult {
  Formulation formulation = Formulation::WeightedCR;
  double spacing = 0.0;
  double psi_min = 0.0;  ///< measured on the grid
  std::vector<SweepRow> rows;
  RateFit fit;
};

struct SweepOptions {
  double spacing = 1.0 / 128;
  double tol = 1e-10;
  /// Optional extra cut: h below min_h_over_spacing * spacing is treated as
  /// unresolved. Off by default; weight underflow is always detected.
  double min_h_over_spacing = 0.0;
  int fit_points = 5;
};

/// Lowest eigenvalue for each h and the weighted least-squares fit of
/// h log lambda = 2 psi_min + c h log h + d h over the smallest usable h.
/// Throws InsufficientRange when fewer than four h values are usable.
SweepResult semiclassical_sweep(const DomainSpec& domain, const MagneticField& b, const std::vector<double>& h_list,
                                Formulation formulation, const SweepOptions& options = {});

/// Fit on explicit (h, lambda, sigma_log) data; exposed for testing.
RateFit fit_log_rate(const std::vector<double>& h, const std::vector<double>& lambda,
                     const std::vector<double>& sigma_log);

/// CSV `h,lambda,log_lambda,h_log_lambda,formulation,residual` with the fit
/// appended as '#' comment lines.
std::string sweep_csv(const SweepResult& sweep);

}  // namespace pauli
