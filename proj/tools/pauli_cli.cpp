#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pauli/acceptance.hpp"
#include "pauli/config.hpp"
#include "pauli/errors.hpp"
#include "pauli/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  double spacing = 0;
  std::vector<double> h;
  std::string out;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("-c,--config", o.config, "JSON run config")->required()->check(CLI::ExistingFile);
  sub->add_option("--spacing", o.spacing, "override the grid spacing");
  sub->add_option("--h-list", o.h, "override the semiclassical parameters h");
  sub->add_option("-o,--out", o.out, "override the output directory");
}

pauli::RunConfig load(const Overrides& o) {
  pauli::RunConfig cfg = pauli::load_config(o.config);
  if (o.spacing > 0) cfg.spacing = o.spacing;
  if (!o.h.empty()) cfg.h_list = o.h;
  if (!o.out.empty()) cfg.output_dir = o.out;
  pauli::validate_config(cfg, true);
  return cfg;
}

int report(const pauli::PipelineResult& r) {
  for (const auto& f : r.files) std::cout << "wrote " << f << "\n";
  for (const auto& c : r.checks) std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  std::cout << r.summary << std::endl;
  return r.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pauli operator toolkit: torsion potential, analytic bounds, semiclassical spectra"};
  app.require_subcommand(1);

  Overrides o;
  auto* pot = app.add_subcommand("potential", "psi field, minimizers and level lines");
  auto* bnd = app.add_subcommand("bounds", "bounds ledger");
  auto* spe = app.add_subcommand("spectrum", "semiclassical sweep and log-rate fit");
  auto* dsk = app.add_subcommand("disk", "exact disk channels and Temple enclosures");
  for (auto* s : {pot, bnd, spe, dsk}) add_common(s, o);
  auto* ver = app.add_subcommand("verify", "run the acceptance criteria");
  std::vector<int> ids;
  ver->add_option("criteria", ids, "criterion numbers (default: all)")->check(CLI::Range(1, 10));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ver) {
      const auto results = pauli::run_acceptance(ids, std::cout);
      int failed = 0;
      for (const auto& r : results) failed += !r.pass;
      std::cout << results.size() - failed << " of " << results.size() << " criteria pass" << std::endl;
      return failed == 0 ? 0 : 1;
    }
    const pauli::RunConfig cfg = load(o);
    if (*pot) return report(pauli::run_potential(cfg));
    if (*bnd) return report(pauli::run_bounds(cfg));
    if (*spe) return report(pauli::run_spectrum(cfg));
    if (*dsk) return report(pauli::run_disk(cfg));
  } catch (const pauli::Error& e) {
    std::cerr << "error [" << e.module() << "] " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 0;
}
