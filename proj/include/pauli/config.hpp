#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pauli/field.hpp"
#include "pauli/geometry.hpp"
#include "pauli/spectrum.hpp"

namespace pauli {

/// Magnetic field as written in a config: constant `value`, a Gaussian
/// value * exp(-k |x|^2), or an affine value + gx x + gy y.
struct FieldSpec {
  std::string type = "constant";
  double value = 1.0;
  double k = 0.0;
  double gx = 0.0;
  double gy = 0.0;

  MagneticField make() const;
  std::string describe() const;
};

struct RunConfig {
  std::string name = "run";
  DomainSpec domain = DomainSpec::disk(1.0);
  FieldSpec field;
  double spacing = 1.0 / 128;
  std::vector<double> h_list = {0.3, 0.2, 0.1};
  std::vector<Formulation> formulations = {Formulation::WeightedCR};
  std::string output_dir = "out";
  int m_max = 2;
  int k_max = 0;
  double tolerance = 1e-10;
  int contour_count = 8;
  std::vector<double> contour_levels;  ///< explicit levels override contour_count
  double psi_tolerance = 1e-8;
  std::string hash;  ///< FNV-1a of the config text
};

/// Parses a JSON config. Unknown keys are rejected. Errors are ConfigError
/// with `source:line:column` for syntax problems and the dotted key path for
/// bad values.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Checks the invariants (spacing > 0, h > 0, writable output directory).
void validate_config(const RunConfig& cfg, bool check_output_dir = true);

}  // namespace pauli
