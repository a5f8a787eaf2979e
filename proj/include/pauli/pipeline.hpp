#pragma once

#include <string>
#include <vector>

#include "pauli/config.hpp"

namespace pauli {

struct CheckLine {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct PipelineResult {
  std::vector<std::string> files;
  std::vector<CheckLine> checks;
  std::string summary;

  bool all_pass() const;
};

/// Comment lines prepended to every output file: config hash and a short
/// description of what the numbers are.
std::string provenance_header(const RunConfig& cfg, const std::string& reference);

/// psi field, minimizer report and level lines.
PipelineResult run_potential(const RunConfig& cfg);
/// Bounds ledger for every h in the config.
PipelineResult run_bounds(const RunConfig& cfg);
/// Semiclassical sweep and log-rate fit per formulation.
PipelineResult run_spectrum(const RunConfig& cfg);
/// Exact disk channels, Temple enclosures and the asymptotic ratio.
PipelineResult run_disk(const RunConfig& cfg);

}  // namespace pauli
