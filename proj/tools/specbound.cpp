#include "specbound/cli.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace specbound;

namespace {

struct Flags {
  std::string fcidump;
  std::string ao_json;
  std::string method;
  std::string sector;
  std::string sectors = "canonical";
  std::string manifest;
  std::string out = ".";
  int restarts = OptimizerSettings{}.restarts;
  std::uint64_t seed = OptimizerSettings{}.seed;
  double grad_tol = OptimizerSettings{}.grad_tol;
  int max_iter = OptimizerSettings{}.max_iter;
  int jobs = 0;
  std::size_t fci_cap = kDefaultFciCap;
  bool no_incoherent = false;
  bool trace = false;
  bool stable = false;
};

void add_common(CLI::App* cmd, Flags& f, bool needs_input) {
  auto* group = cmd->add_option_group("input");
  group->add_option("--fcidump", f.fcidump, "FCIDUMP file");
  group->add_option("--ao-json", f.ao_json, "AO-integral JSON bundle (Lowdin-orthogonalized on load)");
  if (needs_input) group->require_option(1);
  cmd->add_option("--method", f.method, "Sector extremum estimator")->check(CLI::IsMember({"hf", "fci"}));
  cmd->add_option("--sector", f.sector, "Target sector as n_alpha,n_beta");
  cmd->add_option("--restarts", f.restarts, "Random restarts after the zero start")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", f.seed, "Seed for restart streams");
  cmd->add_option("--grad-tol", f.grad_tol, "Gradient tolerance (max-abs, Hartree)")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", f.max_iter, "Optimizer iteration limit")->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--jobs", f.jobs, "Worker threads (0: all)")->envname("SPECBOUND_JOBS")->check(CLI::NonNegativeNumber);
  cmd->add_option("--fci-cap", f.fci_cap, "Largest FCI dimension per sector")->check(CLI::PositiveNumber);
  cmd->add_flag("--trace", f.trace, "Write optimizer traces (CSV) per sector");
  cmd->add_flag("--stable-output", f.stable, "Omit the timestamp from output documents");
}

RunConfig to_config(const std::string& command, const Flags& f) {
  RunConfig c;
  c.command = command;
  if (!f.fcidump.empty()) {
    c.input = f.fcidump;
    c.format = InputFormat::fcidump;
  } else if (!f.ao_json.empty()) {
    c.input = f.ao_json;
    c.format = InputFormat::ao_json;
  }
  if (!f.method.empty()) c.method = parse_method(f.method);
  if (!f.sector.empty()) c.sector = parse_sector(f.sector);
  c.sectors = f.sectors;
  c.optimizer.restarts = f.restarts;
  c.optimizer.seed = f.seed;
  c.optimizer.grad_tol = f.grad_tol;
  c.optimizer.max_iter = f.max_iter;
  c.fci_cap = f.fci_cap;
  c.jobs = f.jobs;
  c.out_dir = f.out;
  c.manifest = f.manifest;
  c.incoherent = !f.no_incoherent;
  c.trace = f.trace;
  c.stable_output = f.stable;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetry-aware spectral bounds for electronic-structure Hamiltonians"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);
  Flags f;

  auto* bounds = app.add_subcommand("bounds", "Bounds report (coherent and incoherent tiers)");
  add_common(bounds, f, true);
  bounds->add_flag("--no-incoherent", f.no_incoherent, "Skip the 1-body/2-body decomposition");

  auto* scan = app.add_subcommand("scan", "Per-sector extremal energies");
  add_common(scan, f, true);
  scan->add_option("--sectors", f.sectors, "all, canonical, or a ';'-separated list such as \"1,1;2,0\"");

  auto* validate = app.add_subcommand("validate", "HF versus FCI comparison in every canonical sector");
  add_common(validate, f, true);

  auto* scaling = app.add_subcommand("scaling", "Series and power-law fits over a manifest of fixtures");
  add_common(scaling, f, false);
  scaling->add_option("--manifest", f.manifest, "Manifest JSON listing fixtures and x values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*bounds) return cmd_bounds(to_config("bounds", f), std::cerr);
    if (*scan) return cmd_scan(to_config("scan", f), std::cerr);
    if (*validate) return cmd_validate(to_config("validate", f), std::cerr);
    if (*scaling) return cmd_scaling(to_config("scaling", f), std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kExitError;
}
