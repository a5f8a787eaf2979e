#include "pauli/bounds.hpp"

#include <cmath>
#include <numbers>

#include "json.hpp"
#include "pauli/errors.hpp"
#include "pauli/io.hpp"

namespace pauli {

namespace {

constexpr const char* kModule = "bounds";
constexpr double kFourPi = 4.0 * std::numbers::pi;

double sum_inv_sqrt_det(const std::vector<std::array<double, 3>>& hessians) {
  if (hessians.empty()) throw Error(ErrorKind::InvalidArgument, kModule, "no minimizer Hessians supplied");
  double s = 0;
  for (std::size_t j = 0; j < hessians.size(); ++j) {
    const auto& H = hessians[j];
    const double det = H[0] * H[2] - H[1] * H[1];
    if (!(H[0] > 0) || !(det > 0)) {
      throw Error(ErrorKind::NonPositiveHessian, kModule,
                  "Hessian of minimizer " + std::to_string(j) + " is not positive definite (det = " + fmt17(det) + ")");
    }
    s += 1.0 / std::sqrt(det);
  }
  return s;
}

}  // namespace

LogBound ekp_lower(double h, double lambda_d, double psi_min) {
  if (!(h > 0) || !(lambda_d > 0) || !(psi_min <= 0)) {
    throw Error(ErrorKind::InvalidArgument, kModule, "need h > 0, lambda_D > 0, psi_min <= 0");
  }
  const double l = 2 * std::log(h) + std::log(lambda_d) + 2 * psi_min / h;
  return {std::exp(l), l};
}

LogBound upper_case1(double h, double flux, const std::vector<std::array<double, 3>>& hessians, double psi_min) {
  if (!(h > 0) || !(flux > 0)) throw Error(ErrorKind::InvalidArgument, kModule, "need h > 0 and positive flux");
  const double s = sum_inv_sqrt_det(hessians);
  const double l = std::log(4 * flux) - std::log(s) + 2 * psi_min / h;
  return {std::exp(l), l};
}

Case2Envelope case2_envelope(double, double psi_min) { return {2 * psi_min, 0.25}; }

double threshold_h(double lambda_d, double flux, const std::vector<std::array<double, 3>>& hessians) {
  const double s = sum_inv_sqrt_det(hessians);
  // The exponentials cancel; compare h^2 lambda_D with 4 flux / s.
  auto gap = [&](double h) { return 2 * std::log(h) + std::log(lambda_d) - std::log(4 * flux / s); };
  double below = 0, above = 0;
  bool found = false;
  const int n = 1200;
  for (int k = n; k >= 0; --k) {
    const double h = std::pow(10.0, -6.0 + 9.0 * k / n);
    if (gap(h) <= 0) {
      below = h;
      above = std::pow(10.0, -6.0 + 9.0 * (k + 1) / n);
      found = true;
      break;
    }
  }
  if (!found) return 0.0;
  if (gap(above) <= 0) return above;
  for (int it = 0; it < 200 && above - below > 1e-15 * above; ++it) {
    const double mid = 0.5 * (below + above);
    (gap(mid) <= 0 ? below : above) = mid;
  }
  return below;
}

std::vector<PsiBound> torsion_bounds(const GeometryReport& geom, double b0) {
  if (!(b0 > 0)) throw Error(ErrorKind::InvalidArgument, kModule, "torsion bounds need B0 > 0");
  std::vector<PsiBound> out;
  out.push_back({"delta", BoundSide::Lower, -b0 * geom.diameter * geom.diameter / 4, true,
                 "psi_min >= -B delta^2/4 (delta = diameter)", ""});
  out.push_back({"ell", BoundSide::Lower, -b0 * geom.width * geom.width / 8, true,
                 "psi_min >= -B ell^2/8 (ell = minimal width)", ""});
  PsiBound rho{"rho", BoundSide::Lower, -b0 * geom.inradius * geom.inradius / 2, geom.convex,
               "psi_min >= -B rho^2/2 for convex domains (rho = inradius)", ""};
  if (!geom.convex) rho.note = "RhoBoundSkipped: domain is not convex";
  out.push_back(rho);
  return out;
}

double polya_szego_bound(double area, double b0) {
  if (!(area >= 0)) throw Error(ErrorKind::InvalidArgument, kModule, "area must be non-negative");
  return -b0 * area / (4 * std::numbers::pi);
}

std::array<double, 2> vdbc_bounds(double lambda_d) {
  if (!(lambda_d > 0)) throw Error(ErrorKind::InvalidArgument, kModule, "lambda_D must be positive");
  return {1.0 / lambda_d, kVdbcConstant * kBesselJ0ZeroSq / lambda_d};
}

double bandle_bound(double c, double total_flux_m) {
  if (!(total_flux_m > 0)) throw Error(ErrorKind::InvalidArgument, kModule, "total field M must be positive");
  if (!(c >= 0)) throw Error(ErrorKind::InvalidArgument, kModule, "C must be non-negative");
  if (c * total_flux_m >= kFourPi) {
    throw Error(ErrorKind::FluxTooLarge, kModule, "C M = " + fmt17(c * total_flux_m) + " >= 4 pi");
  }
  if (c == 0) return total_flux_m / kFourPi;
  return -std::log1p(-c * total_flux_m / kFourPi) / c;
}

double bandle_admissible_c(const Grid& g, const MagneticField& b) {
  const std::vector<double> bv = b.sample(g);
  if (min_value(bv) <= 0) throw Error(ErrorKind::InvalidArgument, kModule, "admissible C needs B > 0");
  if (b.is_constant()) return 0.0;
  const double dx = g.spacing();
  double c = 0;
  for (int u = 0; u < g.num_unknowns(); ++u) {
    const auto& a = g.arms(u);
    double side[4];
    for (int k = 0; k < 4; ++k) {
      const auto d = static_cast<Direction>(k);
      const int v = g.neighbor(u, d);
      if (v >= 0) {
        side[k] = std::log(bv[v]);
      } else {
        const Point p = g.point(u);
        const double t = a[k] * dx;
        const Point q = d == kEast ? Point{p.x + t, p.y}
                        : d == kWest ? Point{p.x - t, p.y}
                        : d == kNorth ? Point{p.x, p.y + t}
                                      : Point{p.x, p.y - t};
        const double bq = b.at(g, q);
        side[k] = std::log(bq > 0 ? bq : bv[u]);
      }
    }
    const double l0 = std::log(bv[u]);
    const double lap =
        2 / (dx * dx) *
        ((side[kEast] - l0) / (a[kEast] * (a[kEast] + a[kWest])) + (side[kWest] - l0) / (a[kWest] * (a[kEast] + a[kWest])) +
         (side[kNorth] - l0) / (a[kNorth] * (a[kNorth] + a[kSouth])) +
         (side[kSouth] - l0) / (a[kSouth] * (a[kNorth] + a[kSouth])));
    c = std::max(c, -lap / (2 * bv[u]));
  }
  return c;
}

bool BoundsLedger::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

BoundsLedger assemble_ledger(const LedgerInputs& in) {
  if (!in.domain || !in.grid) throw Error(ErrorKind::InvalidArgument, kModule, "ledger needs a domain and a grid");
  BoundsLedger L;
  L.h = in.h;
  L.domain = in.domain->kind_name();
  L.field = in.field.description();
  L.psi_min = in.psi_min;
  L.lambda_d = in.lambda_d;
  L.computed_lambda = in.computed_lambda;
  L.computed_residual = in.computed_residual;
  L.equal_area_disk_lambda = in.equal_area_disk_lambda;

  const std::vector<double> bv = in.field.sample(*in.grid);
  const double bmin = min_value(bv);
  const double bmax = max_abs(bv);
  L.positive_field = bmin > 0;
  L.flux = magnetic_flux(*in.domain, *in.grid, in.field);

  if (L.positive_field) {
    L.lower_ekp = ekp_lower(in.h, in.lambda_d, in.psi_min);
    std::vector<std::array<double, 3>> hs;
    bool degenerate = false;
    for (const auto& m : in.minimizers.minimizers) {
      hs.push_back(m.hessian);
      degenerate = degenerate || m.degenerate;
    }
    if (degenerate || hs.empty()) {
      L.case2_flag = true;
      L.envelope = case2_envelope(in.h, in.psi_min);
    } else {
      L.upper_case1 = upper_case1(in.h, L.flux, hs, in.psi_min);
      L.threshold_h = threshold_h(in.lambda_d, L.flux, hs);
    }
  } else {
    L.diamagnetic_note = in.h * in.h * in.lambda_d;
  }

  // Bounds on psi_min. Lower bounds scale with max B, upper bounds with min B.
  if (L.positive_field) {
    for (auto& b : torsion_bounds(in.geometry, bmax)) L.psi_min_bounds.push_back(b);
    L.psi_min_bounds.push_back({"polya_szego", BoundSide::Lower, polya_szego_bound(in.geometry.area, bmax), true,
                                "psi_min >= psi_min of the equal-area disk", ""});
    const auto v = vdbc_bounds(in.lambda_d);
    const bool cst = in.field.is_constant();
    L.psi_min_bounds.push_back({"vdbc_lower", BoundSide::Upper, -bmin * v[0], cst,
                                "|psi_min| >= B / lambda_D (constant B)", cst ? "" : "constant fields only"});
    L.psi_min_bounds.push_back({"vdbc_upper", BoundSide::Lower, -bmax * v[1], cst,
                                "|psi_min| <= B 7 zeta(3)/16 j^2 / lambda_D (constant B)",
                                cst ? "" : "constant fields only"});
    PsiBound band{"bandle", BoundSide::Lower, 0.0, true, "|psi_min| <= (1/C) log(4 pi/(4 pi - C M)), M/(4 pi) at C = 0",
                  ""};
    try {
      const double c = bandle_admissible_c(*in.grid, in.field);
      band.value = -bandle_bound(c, 2 * std::numbers::pi * L.flux);
      band.note = "C = " + fmt17(c);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::FluxTooLarge) throw;
      band.applicable = false;
      band.note = e.what();
    }
    L.psi_min_bounds.push_back(band);
  } else {
    for (const char* n : {"delta", "ell", "rho", "polya_szego", "vdbc_lower", "vdbc_upper", "bandle"}) {
      L.psi_min_bounds.push_back({n, BoundSide::Lower, 0.0, false, "", "B is not positive on the domain"});
    }
  }

  for (const auto& b : L.psi_min_bounds) {
    if (!b.applicable) continue;
    const bool ok = b.side == BoundSide::Lower ? b.value <= in.psi_min + in.psi_tolerance
                                               : in.psi_min <= b.value + in.psi_tolerance;
    L.checks.push_back({"psi_min_" + b.name, ok,
                        (b.side == BoundSide::Lower ? "bound " : "measured ") +
                            fmt17(b.side == BoundSide::Lower ? b.value : in.psi_min) + " <= " +
                            (b.side == BoundSide::Lower ? "measured " : "bound ") +
                            fmt17(b.side == BoundSide::Lower ? in.psi_min : b.value)});
  }
  if (L.lower_ekp && L.upper_case1 && L.threshold_h && in.h <= *L.threshold_h) {
    L.checks.push_back({"ekp_below_case1_upper", L.lower_ekp->log_value <= L.upper_case1->log_value,
                        "h = " + fmt17(in.h) + " <= h* = " + fmt17(*L.threshold_h)});
  }
  if (L.computed_lambda && L.lower_ekp) {
    const double res = in.computed_residual.value_or(0.0);
    const double lam = *L.computed_lambda;
    L.checks.push_back({"ekp_below_lambda", lam > 0 && L.lower_ekp->log_value <= std::log(lam * (1 + 2 * res)),
                        "lower " + fmt17(L.lower_ekp->value) + ", lambda " + fmt17(lam)});
    if (L.upper_case1) {
      const double ratio = std::exp(std::log(lam) - L.upper_case1->log_value);
      L.checks.push_back({"lambda_below_1.5_case1_upper", ratio <= 1.5,
                          "lambda / upper = " + fmt17(ratio) + " (eps_h = " + fmt17(ratio - 1) + ")"});
    }
  }
  if (L.computed_lambda && L.equal_area_disk_lambda) {
    L.checks.push_back({"equal_area_disk_comparison", *L.computed_lambda >= *L.equal_area_disk_lambda,
                        "domain " + fmt17(*L.computed_lambda) + " >= disk " + fmt17(*L.equal_area_disk_lambda)});
  }
  return L;
}

std::string ledger_json(const BoundsLedger& L) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["h"] = L.h;
  j["domain"] = L.domain;
  j["field"] = L.field;
  j["psi_min_measured"] = L.psi_min;
  j["lambda_dirichlet"] = L.lambda_d;
  j["flux"] = L.flux;
  j["field_positive"] = L.positive_field;
  auto logb = [](const std::optional<LogBound>& b, const char* ref) {
    ordered_json e;
    e["applicable"] = b.has_value();
    if (b) {
      e["value"] = b->value;
      e["log_value"] = b->log_value;
    }
    e["reference"] = ref;
    return e;
  };
  j["eigenvalue_bounds"]["lower_ekp"] =
      logb(L.lower_ekp, "explicit lower bound h^2 lambda_D exp(2 psi_min/h) for B > 0");
  j["eigenvalue_bounds"]["upper_case1"] =
      logb(L.upper_case1, "Laplace-method upper bound 4 flux [sum det(Hess psi)^{-1/2}]^{-1} exp(2 psi_min/h)");
  j["eigenvalue_bounds"]["case2_flag"] = L.case2_flag;
  if (L.envelope) {
    j["eigenvalue_bounds"]["case2_envelope"] = {{"exponent_rate", L.envelope->exponent_rate},
                                                {"power", L.envelope->power},
                                                {"reference", "degenerate minimum: O(h^{1/4}) exp(2 psi_min/h)"}};
  }
  if (L.threshold_h) j["eigenvalue_bounds"]["threshold_h"] = *L.threshold_h;
  if (L.diamagnetic_note) {
    j["eigenvalue_bounds"]["diamagnetic"] = {{"value", *L.diamagnetic_note},
                                             {"reference", "diamagnetic bound h^2 lambda_D"}};
  }
  ordered_json pb = ordered_json::array();
  for (const auto& b : L.psi_min_bounds) {
    ordered_json e;
    e["name"] = b.name;
    e["side"] = b.side == BoundSide::Lower ? "lower" : "upper";
    e["applicable"] = b.applicable;
    if (b.applicable) e["value"] = b.value;
    e["reference"] = b.reference;
    if (!b.note.empty()) e["note"] = b.note;
    pb.push_back(e);
  }
  j["psi_min_bounds"] = pb;
  if (L.computed_lambda) j["computed_lambda"] = *L.computed_lambda;
  if (L.computed_residual) j["computed_residual"] = *L.computed_residual;
  if (L.equal_area_disk_lambda) j["equal_area_disk_lambda"] = *L.equal_area_disk_lambda;
  ordered_json cs = ordered_json::array();
  for (const auto& c : L.checks) cs.push_back({{"name", c.name}, {"result", c.pass ? "PASS" : "FAIL"}, {"detail", c.detail}});
  j["checks"] = cs;
  j["all_pass"] = L.all_pass();
  return j.dump(2) + "\n";
}

}  // namespace pauli
