#include "pauli/spectrum.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "pauli/errors.hpp"
#include "pauli/io.hpp"
#include "pauli/potential.hpp"

namespace pauli {

namespace {

constexpr const char* kModule = "spectrum";
using cplx = std::complex<double>;
using Trip = Eigen::Triplet<cplx>;

Point step(Direction d) {
  switch (d) {
    case kEast: return {1, 0};
    case kWest: return {-1, 0};
    case kNorth: return {0, 1};
    default: return {0, -1};
  }
}

Direction opposite(Direction d) { return static_cast<Direction>(d ^ 1); }

Point cut_point(const Grid& g, int u, Direction d) { return g.point(u) + (g.arm(u, d) * g.spacing()) * step(d); }

void check_h(double h) {
  if (!(h > 0) || !std::isfinite(h)) throw Error(ErrorKind::InvalidArgument, kModule, "h must be positive");
}

double log_sum_exp(const double* x, int n) {
  double m = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) m = std::max(m, x[k]);
  double s = 0;
  for (int k = 0; k < n; ++k) s += std::exp(x[k] - m);
  return m + std::log(s);
}

// Five-point magnetic operator: h^2/dx^2 times the hopping stencil, cut edges
// add 1/arm on the diagonal. Assembled on the upper triangle and mirrored.
SparseMatrixC assemble_hopping(const Grid& g, double h, const std::vector<double>* a1, const std::vector<double>* a2,
                               const std::vector<double>* bvals, const std::vector<double>* chi) {
  const int n = g.num_unknowns();
  const double dx = g.spacing();
  const double c = h * h / (dx * dx);
  std::vector<Trip> trip;
  trip.reserve(5 * static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    double diag = 0;
    for (int k = 0; k < 4; ++k) {
      const auto d = static_cast<Direction>(k);
      diag += g.neighbor(u, d) >= 0 ? 1.0 : 1.0 / g.arm(u, d);
    }
    diag *= c;
    if (bvals) diag -= h * (*bvals)[u];
    trip.emplace_back(u, u, cplx(diag, 0.0));
    for (Direction d : {kEast, kNorth}) {
      const int v = g.neighbor(u, d);
      if (v < 0) continue;
      double theta = 0;
      if (a1 && a2) {
        const auto& a = d == kEast ? *a1 : *a2;
        theta = dx / h * 0.5 * (a[u] + a[v]);
      }
      if (chi) theta += ((*chi)[v] - (*chi)[u]) / h;
      const cplx e = -c * std::polar(1.0, -theta);
      trip.emplace_back(u, v, e);
      trip.emplace_back(v, u, std::conj(e));
    }
  }
  SparseMatrixC m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

struct MeshVertex {
  Point p;
  int unknown;  // -1 on the boundary
  double logw;
};

}  // namespace

std::string to_string(Formulation f) {
  switch (f) {
    case Formulation::DirectPauli: return "direct_pauli";
    case Formulation::WeightedCR: return "weighted_cr";
    case Formulation::DirichletLaplacian: return "dirichlet_laplacian";
  }
  return "unknown";
}

Formulation formulation_from_string(const std::string& s) {
  if (s == "direct_pauli") return Formulation::DirectPauli;
  if (s == "weighted_cr") return Formulation::WeightedCR;
  if (s == "dirichlet_laplacian") return Formulation::DirichletLaplacian;
  throw Error(ErrorKind::InvalidArgument, kModule, "unknown formulation '" + s + "'");
}

Eigen::VectorXd DiscreteOperator::mass() const {
  if (!log_mass) return Eigen::VectorXd::Ones(dimension());
  return log_mass->array().exp();
}

bool DiscreteOperator::is_hermitian() const {
  const SparseMatrixC adj = matrix.adjoint();
  if (adj.nonZeros() != matrix.nonZeros()) return false;
  for (int k = 0; k < matrix.outerSize(); ++k) {
    SparseMatrixC::InnerIterator a(matrix, k), b(adj, k);
    for (; a && b; ++a, ++b) {
      if (a.index() != b.index() || a.value() != b.value()) return false;
    }
    if (a || b) return false;
  }
  return true;
}

DiscreteOperator assemble_pauli(GridPtr grid, const ScalarField& a1, const ScalarField& a2, const MagneticField& b,
                                double h, const ScalarField* gauge) {
  check_h(h);
  const Grid& g = *grid;
  const auto n = static_cast<std::size_t>(g.num_unknowns());
  if (a1.values.size() != n || a2.values.size() != n || (gauge && gauge->values.size() != n)) {
    throw Error(ErrorKind::InvalidArgument, kModule, "fields do not match the grid");
  }
  const std::vector<double> bv = b.sample(g);
  DiscreteOperator op;
  op.formulation = Formulation::DirectPauli;
  op.h = h;
  op.grid = grid;
  op.matrix = assemble_hopping(g, h, &a1.values, &a2.values, &bv, gauge ? &gauge->values : nullptr);
  op.suggested_shift = -0.01 * h * std::max(max_abs(bv), 1e-300);
  return op;
}

DiscreteOperator assemble_dirichlet_laplacian(GridPtr grid) {
  DiscreteOperator op;
  op.formulation = Formulation::DirichletLaplacian;
  op.h = 1.0;
  op.grid = grid;
  op.matrix = assemble_hopping(*grid, 1.0, nullptr, nullptr, nullptr, nullptr);
  return op;
}

DiscreteOperator assemble_weighted_form(GridPtr grid, const ScalarField& psi, double h) {
  check_h(h);
  const Grid& g = *grid;
  const int n = g.num_unknowns();
  if (static_cast<int>(psi.values.size()) != n) {
    throw Error(ErrorKind::InvalidArgument, kModule, "potential does not match the grid");
  }
  const double psi_min = std::min(min_value(psi.values), 0.0);
  // log weights -2 Psi / h with Psi = psi - psi_min >= 0; the boundary has psi = 0.
  std::vector<double> logw(n);
  for (int u = 0; u < n; ++u) logw[u] = -2.0 * (psi.values[u] - psi_min) / h;
  const double logw_boundary = 2.0 * psi_min / h;
  const double floor = std::log(std::numeric_limits<double>::min());
  if (std::count_if(logw.begin(), logw.end(), [&](double l) { return l > floor; }) < 5) {
    throw Error(ErrorKind::WeightUnderflow, kModule,
                "fewer than five nodes carry a representable weight at h = " + fmt17(h) + "; refine the grid");
  }

  struct Tri {
    MeshVertex v[3];
  };
  std::vector<Tri> tris;
  tris.reserve(2 * static_cast<std::size_t>(n) + 64);
  auto vert_node = [&](int u) { return MeshVertex{g.point(u), u, logw[u]}; };
  auto vert_cut = [&](int u, Direction d) { return MeshVertex{cut_point(g, u, d), -1, logw_boundary}; };

  const Direction edge_dir[4] = {kEast, kNorth, kWest, kSouth};
  for (int j = 0; j + 1 < g.ny(); ++j) {
    for (int i = 0; i + 1 < g.nx(); ++i) {
      const int uc[4] = {g.unknown(i, j), g.unknown(i + 1, j), g.unknown(i + 1, j + 1), g.unknown(i, j + 1)};
      const int inside = (uc[0] >= 0) + (uc[1] >= 0) + (uc[2] >= 0) + (uc[3] >= 0);
      if (inside == 0) continue;
      bool any_cut = false;
      for (int k = 0; k < 4; ++k) {
        if (uc[k] >= 0 && g.neighbor(uc[k], edge_dir[k]) < 0) any_cut = true;
      }
      if (inside == 4 && !any_cut) {
        // Split along the c0-c2 diagonal.
        tris.push_back({{vert_node(uc[0]), vert_node(uc[1]), vert_node(uc[2])}});
        tris.push_back({{vert_node(uc[0]), vert_node(uc[2]), vert_node(uc[3])}});
        continue;
      }
      const bool saddle = inside == 2 && (uc[0] >= 0) == (uc[2] >= 0);
      if (saddle) {
        for (int k = 0; k < 4; ++k) {
          if (uc[k] < 0) continue;
          const Direction fwd = edge_dir[k];
          const Direction back = opposite(edge_dir[(k + 3) % 4]);
          tris.push_back({{vert_node(uc[k]), vert_cut(uc[k], fwd), vert_cut(uc[k], back)}});
        }
        continue;
      }
      // Cell clipped to the domain, walked counterclockwise, then fanned.
      std::vector<MeshVertex> poly;
      for (int k = 0; k < 4; ++k) {
        const int a = uc[k], b = uc[(k + 1) % 4];
        const Direction d = edge_dir[k];
        if (a >= 0) {
          poly.push_back(vert_node(a));
          if (g.neighbor(a, d) < 0) poly.push_back(vert_cut(a, d));
        }
        if (b >= 0 && g.neighbor(b, opposite(d)) < 0) poly.push_back(vert_cut(b, opposite(d)));
      }
      for (std::size_t t = 1; t + 1 < poly.size(); ++t) tris.push_back({{poly[0], poly[t], poly[t + 1]}});
    }
  }

  // Per-triangle CR gradients of the hat functions.
  std::vector<double> node_area(n, 0.0);
  struct Entry {
    int row, col;
    cplx grad;
    double log_scale;  // log(|T| w_T)
  };
  std::vector<Entry> entries;
  entries.reserve(3 * tris.size());
  int row = 0;
  for (const Tri& t : tris) {
    const Point p0 = t.v[0].p, p1 = t.v[1].p, p2 = t.v[2].p;
    const double a2 = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    const double area = 0.5 * std::abs(a2);
    if (!(area > 0)) continue;
    const double gx[3] = {(p1.y - p2.y) / a2, (p2.y - p0.y) / a2, (p0.y - p1.y) / a2};
    const double gy[3] = {(p2.x - p1.x) / a2, (p0.x - p2.x) / a2, (p1.x - p0.x) / a2};
    const double lw[3] = {t.v[0].logw, t.v[1].logw, t.v[2].logw};
    const double log_scale = std::log(area) + log_sum_exp(lw, 3) - std::log(3.0);
    bool used = false;
    for (int k = 0; k < 3; ++k) {
      const int u = t.v[k].unknown;
      if (u < 0) continue;
      node_area[u] += area / 3.0;
      entries.push_back({row, u, cplx(gx[k], gy[k]), log_scale});
      used = true;
    }
    if (used) ++row;
  }

  Eigen::VectorXd log_mass(n);
  for (int u = 0; u < n; ++u) {
    if (!(node_area[u] > 0)) {
      throw Error(ErrorKind::InvalidDomain, kModule, "interior node without mesh support");
    }
    log_mass[u] = logw[u] + std::log(node_area[u]);
  }
  std::vector<Trip> ft;
  ft.reserve(entries.size());
  for (const Entry& e : entries) {
    ft.emplace_back(e.row, e.col, h * e.grad * std::exp(0.5 * (e.log_scale - log_mass[e.col])));
  }
  SparseMatrixC F(row, n);
  F.setFromTriplets(ft.begin(), ft.end());
  F.makeCompressed();
  SparseMatrixC A = SparseMatrixC(F.adjoint()) * F;
  SparseMatrixC Ah = A.adjoint();
  A = (A + Ah) * 0.5;
  A.prune(cplx(0.0, 0.0));
  A.makeCompressed();

  DiscreteOperator op;
  op.formulation = Formulation::WeightedCR;
  op.h = h;
  op.grid = grid;
  op.matrix = std::move(A);
  op.log_mass = std::move(log_mass);
  op.factor = std::move(F);
  op.suggested_shift = 0.0;
  return op;
}

double rayleigh_quotient(const DiscreteOperator& op, const Eigen::VectorXcd& x) {
  const double nx = x.squaredNorm();
  if (op.factor) return (*op.factor * x).squaredNorm() / nx;
  return std::real(x.dot(op.matrix * x)) / nx;
}

double weighted_trial_quotient(const DiscreteOperator& weighted, const ScalarField& psi) {
  if (weighted.formulation != Formulation::WeightedCR || !weighted.log_mass) {
    throw Error(ErrorKind::InvalidArgument, kModule, "trial quotient needs a weighted-form operator");
  }
  const int n = weighted.dimension();
  Eigen::VectorXcd y(n);
  for (int u = 0; u < n; ++u) {
    // Scaled coordinates y = M^{1/2} v with v = 1 - exp(2 psi / h).
    const double v = -std::expm1(2 * psi.values[u] / weighted.h);
    y[u] = v * std::exp(0.5 * (*weighted.log_mass)[u]);
  }
  return rayleigh_quotient(weighted, y);
}

SpectralResult smallest_eigs(const DiscreteOperator& op, int k, double tol, std::optional<double> shift,
                             int max_iterations) {
  const int n = op.dimension();
  if (k < 1 || k > n) throw Error(ErrorKind::InvalidArgument, kModule, "k must be in [1, dimension]");
  if (!(tol > 0)) throw Error(ErrorKind::InvalidArgument, kModule, "tolerance must be positive");
  const int p = std::min(n, k + std::max(2, k));

  double sigma = shift.value_or(op.suggested_shift);
  SparseMatrixC I(n, n);
  I.setIdentity();
  Eigen::SimplicialLDLT<SparseMatrixC, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
  auto factor_ok = [&](double s) {
    ldlt.compute(op.matrix - s * I);
    if (ldlt.info() != Eigen::Success) return false;
    const auto d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    // pivots this small relative to the largest mean the shift hit an eigenvalue
    return d.cwiseAbs().minCoeff() > 1e-3 * std::numeric_limits<double>::epsilon() * dmax;
  };
  if (!factor_ok(sigma)) {
    sigma -= tol * std::max(1.0, std::abs(sigma));
    if (!factor_ok(sigma)) {
      throw Error(ErrorKind::SingularShift, kModule, "shift " + fmt17(sigma) + " is (numerically) an eigenvalue");
    }
  }

  double norm_est = 0;
  for (int c = 0; c < op.matrix.outerSize(); ++c) {
    double s = 0;
    for (SparseMatrixC::InnerIterator it(op.matrix, c); it; ++it) s += std::abs(it.value());
    norm_est = std::max(norm_est, s);
  }

  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd X(n, p);
  X.col(0).setOnes();
  for (int c = 1; c < p; ++c) {
    for (int r = 0; r < n; ++r) X(r, c) = cplx(nd(rng), nd(rng));
  }

  SpectralResult res;
  res.shift_used = sigma;
  std::vector<double> prev(p, std::numeric_limits<double>::quiet_NaN());
  double best_resid = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iterations; ++it) {
    Eigen::MatrixXcd Y = ldlt.solve(X);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Y);
    Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, p);
    Eigen::MatrixXcd AQ = op.matrix * Q;
    Eigen::MatrixXcd H = Q.adjoint() * AQ;
    H = 0.5 * (H + H.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    X = Q * es.eigenvectors();
    const Eigen::MatrixXcd AX = AQ * es.eigenvectors();

    std::vector<double> theta(p), resid(p);
    for (int c = 0; c < p; ++c) {
      const double nrm = X.col(c).norm();
      X.col(c) /= nrm;
      theta[c] = op.factor ? (*op.factor * X.col(c)).squaredNorm() : es.eigenvalues()[c];
      resid[c] = (AX.col(c) / nrm - theta[c] * X.col(c)).norm();
    }
    bool done = true;
    double worst = 0;
    for (int c = 0; c < k; ++c) {
      const double change = std::abs(theta[c] - prev[c]);
      if (!(change <= tol * std::abs(theta[c]))) done = false;
      if (!(resid[c] <= tol * std::max(1.0, norm_est))) done = false;
      worst = std::max(worst, resid[c]);
    }
    best_resid = std::min(best_resid, worst);
    prev = theta;
    res.iterations = it;
    if (done) {
      res.converged = true;
      res.eigenvalues.assign(theta.begin(), theta.begin() + k);
      res.residual_norms.assign(resid.begin(), resid.begin() + k);
      res.eigenvectors = X.leftCols(k);
      return res;
    }
  }
  throw NoConvergence(kModule, max_iterations, best_resid, "shift-invert subspace iteration");
}

double dirichlet_lambda(GridPtr grid, double tol) {
  return smallest_eigs(assemble_dirichlet_laplacian(std::move(grid)), 1, tol).eigenvalues[0];
}

RateFit fit_log_rate(const std::vector<double>& h, const std::vector<double>& lambda,
                     const std::vector<double>& sigma_log) {
  const int m = static_cast<int>(h.size());
  if (m < 3 || lambda.size() != h.size() || sigma_log.size() != h.size()) {
    throw Error(ErrorKind::InsufficientRange, kModule, "rate fit needs at least three points");
  }
  Eigen::MatrixXd A(m, 3);
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) {
    const double s = h[i] * sigma_log[i];
    A(i, 0) = 1.0 / s;
    A(i, 1) = h[i] * std::log(h[i]) / s;
    A(i, 2) = h[i] / s;
    y[i] = h[i] * std::log(lambda[i]) / s;
  }
  const Eigen::Vector3d coef = A.colPivHouseholderQr().solve(y);
  const Eigen::Matrix3d cov = (A.transpose() * A).inverse();
  const double chi2 = (A * coef - y).squaredNorm();
  const double scale = m > 3 ? chi2 / (m - 3) : 1.0;
  RateFit f;
  f.intercept = coef[0];
  f.c_hlogh = coef[1];
  f.d_h = coef[2];
  f.intercept_sigma = std::sqrt(std::max(0.0, cov(0, 0) * std::max(scale, 1.0)));
  f.h_used = h;
  return f;
}

SweepResult semiclassical_sweep(const DomainSpec& domain, const MagneticField& b, const std::vector<double>& h_list,
                                Formulation formulation, const SweepOptions& options) {
  if (formulation == Formulation::DirichletLaplacian) {
    throw Error(ErrorKind::InvalidArgument, kModule, "sweep needs a Pauli formulation");
  }
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    check_h(h_list[i]);
    if (i > 0 && !(h_list[i] < h_list[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, kModule, "h list must be strictly descending");
    }
  }
  auto grid = build_grid(domain, options.spacing);
  const std::vector<double> bv = b.sample(*grid);
  if (min_value(bv) <= 0) throw Error(ErrorKind::InvalidArgument, kModule, "sweep needs B > 0 on the grid");
  const ScalarField psi = solve_poisson(grid, b);
  std::optional<VectorPotential> A;
  if (formulation == Formulation::DirectPauli) A = vector_potential(psi);

  SweepResult out;
  out.formulation = formulation;
  out.spacing = options.spacing;
  out.psi_min = min_value(psi.values);
  const double bmax = max_abs(bv);
  for (double h : h_list) {
    SweepRow row;
    row.h = h;
    try {
      const DiscreteOperator op = formulation == Formulation::WeightedCR ? assemble_weighted_form(grid, psi, h)
                                                                         : assemble_pauli(grid, A->a1, A->a2, b, h);
      const SpectralResult r = smallest_eigs(op, 1, options.tol);
      row.lambda = r.eigenvalues[0];
      row.residual = r.residual_norms[0];
      row.converged = r.converged;
    } catch (const Error& e) {
      row.note = e.what();
    }
    row.usable = row.converged && row.lambda > 0 && std::isfinite(row.lambda) &&
                 h >= options.min_h_over_spacing * options.spacing;
    if (row.converged && !row.usable && row.note.empty()) row.note = "unresolved";
    out.rows.push_back(row);
  }

  std::vector<const SweepRow*> usable;
  for (const auto& r : out.rows) {
    if (r.usable) usable.push_back(&r);
  }
  if (usable.size() < 4) {
    throw Error(ErrorKind::InsufficientRange, kModule,
                "only " + std::to_string(usable.size()) + " usable h values; need at least 4");
  }
  std::sort(usable.begin(), usable.end(), [](const SweepRow* a, const SweepRow* b) { return a->h < b->h; });
  usable.resize(std::min<std::size_t>(usable.size(), options.fit_points));
  std::vector<double> hs, ls, ss;
  for (const SweepRow* r : usable) {
    hs.push_back(r->h);
    ls.push_back(r->lambda);
    // Eigenvalue error ~ residual^2 / gap with gap ~ 2hB; floor at 1e-6.
    ss.push_back(std::max(r->residual * r->residual / (2 * r->h * bmax * r->lambda), 1e-6));
  }
  out.fit = fit_log_rate(hs, ls, ss);
  return out;
}

std::string sweep_csv(const SweepResult& sweep) {
  std::ostringstream os;
  os << "h,lambda,log_lambda,h_log_lambda,formulation,residual\n";
  for (const auto& r : sweep.rows) {
    if (!r.converged) continue;
    const double l = std::log(r.lambda);
    os << fmt17(r.h) << ',' << fmt17(r.lambda) << ',' << fmt17(l) << ',' << fmt17(r.h * l) << ','
       << to_string(sweep.formulation) << ',' << fmt17(r.residual) << '\n';
  }
  os << "# fit model: h*log(lambda) = I + c*h*log(h) + d*h, weighted least squares\n";
  os << "# fit h values:";
  for (double h : sweep.fit.h_used) os << ' ' << fmt17(h);
  os << '\n';
  os << "# fitted intercept I (estimate of 2*psi_min) = " << fmt17(sweep.fit.intercept) << '\n';
  os << "# intercept standard error = " << fmt17(sweep.fit.intercept_sigma) << '\n';
  os << "# c = " << fmt17(sweep.fit.c_hlogh) << ", d = " << fmt17(sweep.fit.d_h) << '\n';
  os << "# measured 2*psi_min on the grid = " << fmt17(2 * sweep.psi_min) << '\n';
  for (const auto& r : sweep.rows) {
    if (!r.usable) os << "# h = " << fmt17(r.h) << " not used: " << (r.note.empty() ? "not converged" : r.note) << '\n';
  }
  return os.str();
}

}  // namespace pauli
