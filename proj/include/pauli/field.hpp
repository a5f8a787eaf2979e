#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pauli/geometry.hpp"

namespace pauli {

/// Nodal values on the interior nodes of a grid plus the value taken on the
/// boundary (0 for the scalar potential).
struct ScalarField {
  GridPtr grid;
  std::vector<double> values;
  double boundary_value = 0.0;

  static ScalarField zeros(GridPtr grid) {
    const auto n = static_cast<std::size_t>(grid->num_unknowns());
    return {std::move(grid), std::vector<double>(n, 0.0), 0.0};
  }

  /// Value at node (i, j): interior value, or boundary_value outside.
  double node_value(int i, int j) const {
    const int u = grid->unknown(i, j);
    return u >= 0 ? values[u] : boundary_value;
  }
};

/// The magnetic field B(x): constant, sampled per node of a specific grid, or
/// given by a formula evaluated at node positions.
class MagneticField {
 public:
  enum class Kind { Constant, Sampled, Formula };

  static MagneticField constant(double b0);
  static MagneticField sampled(GridPtr grid, std::vector<double> values);
  static MagneticField formula(std::function<double(Point)> f, std::string description = "formula");

  Kind kind() const { return kind_; }
  bool is_constant() const { return kind_ == Kind::Constant; }
  double constant_value() const { return b0_; }
  const std::string& description() const { return description_; }

  /// Values at the interior nodes of `grid`. A sampled field must live on
  /// the same grid (checked by identity or matching node count).
  std::vector<double> sample(const Grid& grid) const;
  /// Value at an arbitrary point (sampled fields: nearest interior node).
  double at(const Grid& grid, Point p) const;

  /// Returns a copy with every value multiplied by c.
  MagneticField scaled(double c) const;

 private:
  Kind kind_ = Kind::Constant;
  double b0_ = 0.0;
  GridPtr grid_;
  std::vector<double> values_;
  std::function<double(Point)> formula_;
  std::string description_;
};

double max_abs(const std::vector<double>& v);
double min_value(const std::vector<double>& v);

}  // namespace pauli
