#include "pauli/potential.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "internal/kahan.hpp"
#include "pauli/errors.hpp"
#include "pauli/io.hpp"

namespace pauli {

namespace {

constexpr Direction kDirs[4] = {kEast, kWest, kNorth, kSouth};

// Shortley-Weller weights 2 / (dx^2 a_d (a_d + a_opposite)).
std::array<double, 4> sw_weights(const Grid& g, int u) {
  const auto& a = g.arms(u);
  const double inv = 2.0 / (g.spacing() * g.spacing());
  return {inv / (a[kEast] * (a[kEast] + a[kWest])), inv / (a[kWest] * (a[kEast] + a[kWest])),
          inv / (a[kNorth] * (a[kNorth] + a[kSouth])), inv / (a[kSouth] * (a[kNorth] + a[kSouth]))};
}

double side_value(const ScalarField& f, int u, Direction d) {
  const int v = f.grid->neighbor(u, d);
  return v >= 0 ? f.values[v] : f.boundary_value;
}

// Nonuniform three-point first derivative along x (axis 0) or y (axis 1).
double sw_derivative(const ScalarField& f, int u, int axis) {
  const Grid& g = *f.grid;
  const Direction plus = axis == 0 ? kEast : kNorth;
  const Direction minus = axis == 0 ? kWest : kSouth;
  const double ap = g.arm(u, plus);
  const double am = g.arm(u, minus);
  const double f0 = f.values[u];
  const double fp = side_value(f, u, plus);
  const double fm = side_value(f, u, minus);
  return (am * am * (fp - f0) + ap * ap * (f0 - fm)) / (ap * am * (ap + am) * g.spacing());
}

// Derivative using interior nodes only; nullopt when the node has no
// interior neighbour along the axis.
std::optional<double> interior_derivative(const ScalarField& f, int u, int axis) {
  const Grid& g = *f.grid;
  const Direction plus = axis == 0 ? kEast : kNorth;
  const Direction minus = axis == 0 ? kWest : kSouth;
  const double dx = g.spacing();
  const int p = g.neighbor(u, plus);
  const int m = g.neighbor(u, minus);
  const auto& v = f.values;
  if (p >= 0 && m >= 0) return (v[p] - v[m]) / (2 * dx);
  if (p >= 0) {
    const int pp = g.neighbor(p, plus);
    if (pp >= 0) return (-3 * v[u] + 4 * v[p] - v[pp]) / (2 * dx);
    return (v[p] - v[u]) / dx;
  }
  if (m >= 0) {
    const int mm = g.neighbor(m, minus);
    if (mm >= 0) return (3 * v[u] - 4 * v[m] + v[mm]) / (2 * dx);
    return (v[u] - v[m]) / dx;
  }
  return std::nullopt;
}

double rectangle_series(double a, double b, double x, double y) {
  detail::KahanSum s;
  constexpr double pi = std::numbers::pi;
  const double c = 16.0 * a * a * b * b / std::pow(pi, 4);
  for (int k = 1; k <= 999; k += 2) {
    const double ck = std::cos(k * pi * x / a);
    for (int l = 1; l <= 999; l += 2) {
      const double sign = ((k + l) / 2 - 1) % 2 == 0 ? 1.0 : -1.0;
      s.add(sign * c / (double(k) * l * (double(k) * k * b * b + double(l) * l * a * a)) * ck *
            std::cos(l * pi * y / b));
    }
  }
  return -s.value();
}

}  // namespace

std::vector<double> apply_laplacian(const ScalarField& field) {
  const Grid& g = *field.grid;
  std::vector<double> out(g.num_unknowns());
  for (int u = 0; u < g.num_unknowns(); ++u) {
    const auto w = sw_weights(g, u);
    double s = 0.0;
    for (auto d : kDirs) s += w[d] * (side_value(field, u, d) - field.values[u]);
    out[u] = s;
  }
  return out;
}

ScalarField solve_poisson(GridPtr grid, const MagneticField& b, double tol) {
  if (!grid) throw Error(ErrorKind::InvalidArgument, "potential", "null grid");
  if (!(tol > 0)) throw Error(ErrorKind::InvalidArgument, "potential", "tolerance must be positive");
  const Grid& g = *grid;
  const int n = g.num_unknowns();
  const std::vector<double> rhs_b = b.sample(g);
  const double bnorm = max_abs(rhs_b);
  ScalarField psi = ScalarField::zeros(grid);
  if (bnorm == 0.0) return psi;

  // -L psi = -B, an M-matrix with positive diagonal.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    const auto w = sw_weights(g, u);
    trip.emplace_back(u, u, w[0] + w[1] + w[2] + w[3]);
    for (auto d : kDirs) {
      const int v = g.neighbor(u, d);
      if (v >= 0) trip.emplace_back(u, v, -w[d]);
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd rhs(n);
  for (int u = 0; u < n; ++u) rhs[u] = -rhs_b[u];

  Eigen::BiCGSTAB<Eigen::SparseMatrix<double, Eigen::RowMajor>, Eigen::DiagonalPreconditioner<double>> solver;
  solver.compute(A);
  const long cap = 20L * (g.nx() + g.ny());
  double row_norm = 0.0;
  for (int r = 0; r < n; ++r) row_norm = std::max(row_norm, A.row(r).cwiseAbs().sum());
  long used = 0;
  double rel = tol * 0.1;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  double resid = std::numeric_limits<double>::infinity();
  double target = tol * bnorm;
  while (used < cap) {
    solver.setTolerance(rel);
    solver.setMaxIterations(std::max<long>(1, cap - used));
    x = solver.solveWithGuess(rhs, x);
    used += std::max<long>(1, solver.iterations());
    resid = (A * x - rhs).cwiseAbs().maxCoeff();
    // On fine grids rounding in A*x alone can exceed tol*|B|; accept that floor.
    target = std::max(tol * bnorm, 64 * std::numeric_limits<double>::epsilon() * row_norm * x.cwiseAbs().maxCoeff());
    if (resid <= target) break;
    if (solver.info() == Eigen::Success) rel *= 0.01;
    if (rel < 1e-18) break;
  }
  if (!(resid <= target)) {
    throw NoConvergence("potential", static_cast<int>(used), resid / bnorm, "Poisson solve stalled");
  }
  for (int u = 0; u < n; ++u) psi.values[u] = x[u];
  return psi;
}

double analytic_psi_at(const DomainSpec& domain, double b0, Point p) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          const Point q = p - s.center;
          return b0 * (q.x * q.x + q.y * q.y - s.radius * s.radius) / 4.0;
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          const Point q = p - s.center;
          const double c = 1.0 / (2.0 / (s.a * s.a) + 2.0 / (s.b * s.b));
          return b0 * c * (q.x * q.x / (s.a * s.a) + q.y * q.y / (s.b * s.b) - 1.0);
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          const Point q = p - s.center;
          return b0 * rectangle_series(s.a, s.b, q.x, q.y);
        } else if constexpr (std::is_same_v<T, EquilateralTriangle>) {
          const Point q = p - s.center;
          const double a = s.height;
          const double r3 = std::sqrt(3.0);
          const double prod = (q.x + a / 3) * (2 * a / 3 - q.x - r3 * q.y) * (2 * a / 3 - q.x + r3 * q.y);
          return -b0 * prod / (4 * a);
        } else {
          throw Error(ErrorKind::UnsupportedDomain, "potential",
                      "no closed-form potential for a " + domain.kind_name());
        }
      },
      domain.shape());
}

AnalyticPsi analytic_psi(const DomainSpec& domain, GridPtr grid, double b0) {
  const auto& shape = domain.shape();
  Point center{};
  if (auto d = std::get_if<Disk>(&shape)) center = d->center;
  else if (auto e = std::get_if<Ellipse>(&shape)) center = e->center;
  else if (auto r = std::get_if<EquilateralTriangle>(&shape)) center = r->center;
  else if (auto q = std::get_if<Rectangle>(&shape)) center = q->center;
  else
    throw Error(ErrorKind::UnsupportedDomain, "potential", "no closed-form potential for a " + domain.kind_name());

  AnalyticPsi out{ScalarField::zeros(grid), analytic_psi_at(domain, b0, center), center};
  const Grid& g = *grid;
  if (auto rect = std::get_if<Rectangle>(&shape)) {
    // Separable evaluation: psi(i, j) = sum_k cx_k(i) * sum_l c_kl cy_l(j).
    constexpr double pi = std::numbers::pi;
    constexpr int kTerms = 500;
    const double a = rect->a, b = rect->b;
    const double c = 16.0 * a * a * b * b / std::pow(pi, 4);
    std::vector<double> cyv(static_cast<std::size_t>(kTerms) * g.ny());
    for (int l = 0; l < kTerms; ++l) {
      for (int j = 0; j < g.ny(); ++j) {
        const double y = g.node_point(0, j).y - rect->center.y;
        cyv[static_cast<std::size_t>(l) * g.ny() + j] = std::cos((2 * l + 1) * pi * y / b);
      }
    }
    std::vector<double> T(static_cast<std::size_t>(kTerms) * g.ny());
    for (int k = 0; k < kTerms; ++k) {
      const int kk = 2 * k + 1;
      for (int j = 0; j < g.ny(); ++j) {
        detail::KahanSum s;
        for (int l = 0; l < kTerms; ++l) {
          const int ll = 2 * l + 1;
          const double sign = ((kk + ll) / 2 - 1) % 2 == 0 ? 1.0 : -1.0;
          s.add(sign * c / (double(kk) * ll * (double(kk) * kk * b * b + double(ll) * ll * a * a)) *
                cyv[static_cast<std::size_t>(l) * g.ny() + j]);
        }
        T[static_cast<std::size_t>(k) * g.ny() + j] = s.value();
      }
    }
    for (int u = 0; u < g.num_unknowns(); ++u) {
      const int i = g.node_i(u), j = g.node_j(u);
      const double x = g.node_point(i, j).x - rect->center.x;
      detail::KahanSum s;
      for (int k = 0; k < kTerms; ++k) {
        s.add(std::cos((2 * k + 1) * pi * x / a) * T[static_cast<std::size_t>(k) * g.ny() + j]);
      }
      out.field.values[u] = -b0 * s.value();
    }
  } else {
    for (int u = 0; u < g.num_unknowns(); ++u) out.field.values[u] = analytic_psi_at(domain, b0, g.point(u));
  }
  return out;
}

std::array<double, 2> Minimizer::hessian_eigenvalues() const {
  const double m = 0.5 * (hessian[0] + hessian[2]);
  const double d = std::hypot(0.5 * (hessian[0] - hessian[2]), hessian[1]);
  return {m - d, m + d};
}

double default_cluster_tolerance(const Grid& grid, const MagneticField& b) {
  return 10.0 * grid.spacing() * grid.spacing() * max_abs(b.sample(grid));
}

MinimizerReport find_minimizers(const ScalarField& field, double cluster_tol) {
  const Grid& g = *field.grid;
  const int n = g.num_unknowns();
  const double dx = g.spacing();
  MinimizerReport rep;
  rep.cluster_tolerance = cluster_tol;
  rep.psi_min = min_value(field.values);

  std::vector<int> cand;
  for (int u = 0; u < n; ++u) {
    const double v = field.values[u];
    if (v > rep.psi_min + cluster_tol) continue;
    const int i = g.node_i(u), j = g.node_j(u);
    bool local = true;
    for (int dj = -1; dj <= 1 && local; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        if ((di || dj) && field.node_value(i + di, j + dj) < v) {
          local = false;
          break;
        }
      }
    }
    if (local) cand.push_back(u);
  }
  std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) { return field.values[a] < field.values[b]; });

  std::vector<int> kept;
  for (int u : cand) {
    bool near = false;
    for (int k : kept) {
      if (std::abs(g.node_i(k) - g.node_i(u)) <= 2 && std::abs(g.node_j(k) - g.node_j(u)) <= 2) near = true;
    }
    if (!near) kept.push_back(u);
  }

  for (int u : kept) {
    const int i = g.node_i(u), j = g.node_j(u);
    Minimizer mz;
    mz.point = g.point(u);
    mz.value = field.values[u];
    // q(X, Y) = c0 + c1 X + c2 Y + c3 X^2 + c4 X Y + c5 Y^2 in node units.
    std::vector<std::array<double, 6>> rows;
    std::vector<double> rhs;
    for (int dj = -2; dj <= 2; ++dj) {
      for (int di = -2; di <= 2; ++di) {
        const int v = g.unknown(i + di, j + dj);
        if (v < 0) continue;
        rows.push_back({1.0, double(di), double(dj), double(di * di), double(di * dj), double(dj * dj)});
        rhs.push_back(field.values[v]);
      }
    }
    if (rows.size() >= 9) {
      Eigen::MatrixXd M(rows.size(), 6);
      Eigen::VectorXd r(rows.size());
      for (std::size_t k = 0; k < rows.size(); ++k) {
        for (int c = 0; c < 6; ++c) M(k, c) = rows[k][c];
        r[k] = rhs[k];
      }
      const Eigen::VectorXd c = M.colPivHouseholderQr().solve(r);
      Eigen::Matrix2d H;
      H << 2 * c[3], c[4], c[4], 2 * c[5];
      const Eigen::Vector2d grad(c[1], c[2]);
      Eigen::Vector2d s = Eigen::Vector2d::Zero();
      if (std::abs(H.determinant()) > 1e-300) s = -H.fullPivLu().solve(grad);
      if (!(s.norm() <= 1.0)) s.setZero();
      mz.point = {mz.point.x + s[0] * dx, mz.point.y + s[1] * dx};
      mz.value = std::min(mz.value, c[0] + grad.dot(s) + 0.5 * s.dot(H * s));
      mz.hessian = {H(0, 0) / (dx * dx), H(0, 1) / (dx * dx), H(1, 1) / (dx * dx)};
    } else {
      // Too close to the boundary for the 5x5 fit: plain second differences.
      auto val = [&](int di, int dj) { return field.node_value(i + di, j + dj); };
      const double f0 = field.values[u];
      mz.hessian = {(val(1, 0) - 2 * f0 + val(-1, 0)) / (dx * dx),
                    (val(1, 1) - val(1, -1) - val(-1, 1) + val(-1, -1)) / (4 * dx * dx),
                    (val(0, 1) - 2 * f0 + val(0, -1)) / (dx * dx)};
    }
    const auto ev = mz.hessian_eigenvalues();
    mz.degenerate = !(ev[1] > 0) || ev[0] < 1e-3 * ev[1];
    rep.minimizers.push_back(mz);
  }
  return rep;
}

VectorPotential vector_potential(const ScalarField& psi) {
  VectorPotential out{ScalarField::zeros(psi.grid), ScalarField::zeros(psi.grid)};
  for (int u = 0; u < psi.grid->num_unknowns(); ++u) {
    out.a1.values[u] = -sw_derivative(psi, u, 1);
    out.a2.values[u] = sw_derivative(psi, u, 0);
  }
  return out;
}

GaugeReport check_gauge(const DomainSpec& domain, const ScalarField& a1, const ScalarField& a2,
                        const MagneticField& b, double tol, double min_boundary_distance) {
  const Grid& g = *a1.grid;
  if (a2.grid.get() != &g) throw Error(ErrorKind::InvalidArgument, "potential", "A1 and A2 on different grids");
  const std::vector<double> bv = b.sample(g);
  const double dx = g.spacing();
  GaugeReport rep;
  rep.tolerance = tol;
  for (int u = 0; u < g.num_unknowns(); ++u) {
    const auto d2x = interior_derivative(a2, u, 0);
    const auto d1y = interior_derivative(a1, u, 1);
    const auto d1x = interior_derivative(a1, u, 0);
    const auto d2y = interior_derivative(a2, u, 1);
    const bool deep = min_boundary_distance <= 0 || domain.distance_to_boundary(g.point(u)) >= min_boundary_distance;
    if (deep && d2x && d1y) rep.curl_residual = std::max(rep.curl_residual, std::abs(*d2x - *d1y - bv[u]));
    if (deep && d1x && d2y) rep.div_residual = std::max(rep.div_residual, std::abs(*d1x + *d2y));

    for (auto d : kDirs) {
      if (g.neighbor(u, d) >= 0) continue;
      const double t = g.arm(u, d);
      const int axis = (d == kEast || d == kWest) ? 0 : 1;
      const double sgn = (d == kEast || d == kNorth) ? 1.0 : -1.0;
      const Point p0 = g.point(u);
      const Point pb = axis == 0 ? Point{p0.x + sgn * t * dx, p0.y} : Point{p0.x, p0.y + sgn * t * dx};
      const Direction opp = static_cast<Direction>(d ^ 1);
      const int o = g.neighbor(u, opp);
      auto extrap = [&](const ScalarField& f) {
        return o >= 0 ? f.values[u] + t * (f.values[u] - f.values[o]) : f.values[u];
      };
      const Point nu = domain.outward_normal(pb);
      rep.tangency_residual = std::max(rep.tangency_residual, std::abs(extrap(a1) * nu.x + extrap(a2) * nu.y));
    }
  }
  rep.pass = rep.curl_residual <= tol && rep.div_residual <= tol && rep.tangency_residual <= tol;
  return rep;
}

double magnetic_flux(const DomainSpec& domain, const Grid& grid, const MagneticField& b) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (b.is_constant()) {
    if (const auto area = domain.exact_area()) return b.constant_value() * *area / two_pi;
  }
  detail::KahanSum s;
  for (double v : b.sample(grid)) s.add(v);
  return s.value() * grid.spacing() * grid.spacing() / two_pi;
}

std::vector<ContourPolyline> extract_contours(const ScalarField& field, const std::vector<double>& levels) {
  const Grid& g = *field.grid;
  const int nx = g.nx(), ny = g.ny();
  std::vector<ContourPolyline> out;
  // Edge ids: 2 * node + 0 for the edge to the east, + 1 for the edge to the north.
  auto hid = [nx](int i, int j) { return 2LL * (static_cast<long long>(j) * nx + i); };
  auto vid = [nx](int i, int j) { return 2LL * (static_cast<long long>(j) * nx + i) + 1; };

  for (double level : levels) {
    std::map<long long, Point> pts;
    std::vector<std::array<long long, 2>> segs;
    auto cross = [&](long long id, int i0, int j0, int i1, int j1) {
      if (pts.count(id)) return;
      const double f0 = field.node_value(i0, j0), f1 = field.node_value(i1, j1);
      const double t = (level - f0) / (f1 - f0);
      const Point p0 = g.node_point(i0, j0), p1 = g.node_point(i1, j1);
      pts[id] = p0 + t * (p1 - p0);
    };
    for (int j = 0; j + 1 < ny; ++j) {
      for (int i = 0; i + 1 < nx; ++i) {
        const double f[4] = {field.node_value(i, j), field.node_value(i + 1, j), field.node_value(i + 1, j + 1),
                             field.node_value(i, j + 1)};
        const bool in[4] = {f[0] < level, f[1] < level, f[2] < level, f[3] < level};
        // Edges: 0 bottom, 1 right, 2 top, 3 left.
        const long long ids[4] = {hid(i, j), vid(i + 1, j), hid(i, j + 1), vid(i, j)};
        const bool cut[4] = {in[0] != in[1], in[1] != in[2], in[3] != in[2], in[0] != in[3]};
        int hits[4], nh = 0;
        for (int e = 0; e < 4; ++e) {
          if (!cut[e]) continue;
          hits[nh++] = e;
          switch (e) {
            case 0: cross(ids[0], i, j, i + 1, j); break;
            case 1: cross(ids[1], i + 1, j, i + 1, j + 1); break;
            case 2: cross(ids[2], i, j + 1, i + 1, j + 1); break;
            default: cross(ids[3], i, j, i, j + 1); break;
          }
        }
        if (nh == 2) {
          segs.push_back({ids[hits[0]], ids[hits[1]]});
        } else if (nh == 4) {
          const bool center_in = 0.25 * (f[0] + f[1] + f[2] + f[3]) < level;
          if (center_in == in[0]) {
            segs.push_back({ids[0], ids[1]});
            segs.push_back({ids[2], ids[3]});
          } else {
            segs.push_back({ids[3], ids[0]});
            segs.push_back({ids[1], ids[2]});
          }
        }
      }
    }
    std::map<long long, std::vector<int>> adj;
    for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
      adj[segs[s][0]].push_back(s);
      adj[segs[s][1]].push_back(s);
    }
    std::vector<char> used(segs.size(), 0);
    auto walk = [&](long long start, int first) {
      ContourPolyline line{level, {pts[start]}};
      long long at = start;
      int s = first;
      while (s >= 0 && !used[s]) {
        used[s] = 1;
        at = segs[s][0] == at ? segs[s][1] : segs[s][0];
        line.points.push_back(pts[at]);
        int next = -1;
        for (int c : adj[at]) {
          if (!used[c]) next = c;
        }
        s = next;
      }
      out.push_back(std::move(line));
    };
    for (const auto& [id, ss] : adj) {
      if (ss.size() == 1 && !used[ss[0]]) walk(id, ss[0]);
    }
    for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
      if (!used[s]) walk(segs[s][0], s);
    }
  }
  return out;
}

std::string field_csv(const ScalarField& field) {
  std::ostringstream os;
  os << "x,y,value\n";
  const Grid& g = *field.grid;
  for (int u = 0; u < g.num_unknowns(); ++u) {
    const Point p = g.point(u);
    os << fmt17(p.x) << ',' << fmt17(p.y) << ',' << fmt17(field.values[u]) << '\n';
  }
  return os.str();
}

std::string contours_csv(const std::vector<ContourPolyline>& lines) {
  std::ostringstream os;
  os << "level,segment_id,x,y\n";
  for (std::size_t k = 0; k < lines.size(); ++k) {
    for (const Point& p : lines[k].points) {
      os << fmt17(lines[k].level) << ',' << k << ',' << fmt17(p.x) << ',' << fmt17(p.y) << '\n';
    }
  }
  return os.str();
}

}  // namespace pauli
