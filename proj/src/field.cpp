#include "pauli/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pauli/errors.hpp"

namespace pauli {

MagneticField MagneticField::constant(double b0) {
  if (!std::isfinite(b0)) throw Error(ErrorKind::InvalidArgument, "potential", "field value must be finite");
  MagneticField f;
  f.kind_ = Kind::Constant;
  f.b0_ = b0;
  f.description_ = "constant";
  return f;
}

MagneticField MagneticField::sampled(GridPtr grid, std::vector<double> values) {
  if (!grid || static_cast<int>(values.size()) != grid->num_unknowns()) {
    throw Error(ErrorKind::InvalidArgument, "potential", "sampled field size does not match the grid");
  }
  MagneticField f;
  f.kind_ = Kind::Sampled;
  f.grid_ = std::move(grid);
  f.values_ = std::move(values);
  f.description_ = "sampled";
  return f;
}

MagneticField MagneticField::formula(std::function<double(Point)> fn, std::string description) {
  MagneticField f;
  f.kind_ = Kind::Formula;
  f.formula_ = std::move(fn);
  f.description_ = std::move(description);
  return f;
}

std::vector<double> MagneticField::sample(const Grid& grid) const {
  const int n = grid.num_unknowns();
  switch (kind_) {
    case Kind::Constant:
      return std::vector<double>(n, b0_);
    case Kind::Sampled:
      if (grid_.get() != &grid && grid_->num_unknowns() != n) {
        throw Error(ErrorKind::InvalidArgument, "potential", "sampled field lives on a different grid");
      }
      return values_;
    case Kind::Formula: {
      std::vector<double> out(n);
      for (int u = 0; u < n; ++u) out[u] = formula_(grid.point(u));
      return out;
    }
  }
  return {};
}

double MagneticField::at(const Grid& grid, Point p) const {
  switch (kind_) {
    case Kind::Constant:
      return b0_;
    case Kind::Formula:
      return formula_(p);
    case Kind::Sampled: {
      const auto o = grid.origin();
      const int i = static_cast<int>(std::lround((p.x - o.x) / grid.spacing()));
      const int j = static_cast<int>(std::lround((p.y - o.y) / grid.spacing()));
      int best = grid.unknown(i, j);
      if (best < 0) {
        double bd = std::numeric_limits<double>::infinity();
        for (int u = 0; u < grid.num_unknowns(); ++u) {
          const Point q = grid.point(u);
          const double d = std::hypot(q.x - p.x, q.y - p.y);
          if (d < bd) {
            bd = d;
            best = u;
          }
        }
      }
      return values_[best];
    }
  }
  return 0.0;
}

MagneticField MagneticField::scaled(double c) const {
  MagneticField f = *this;
  f.b0_ *= c;
  for (auto& v : f.values_) v *= c;
  if (f.formula_) {
    auto inner = f.formula_;
    f.formula_ = [inner, c](Point p) { return c * inner(p); };
  }
  return f;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double min_value(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

}  // namespace pauli
