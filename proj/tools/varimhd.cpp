#include "varimhd/driver.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace varimhd;
  CLI::App app{"Spectral Galerkin solver for two-phase MHD with a varifold interface"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  int levels = 3;
  std::string ledger;
  double e0 = 0.0;
  double tol = 0.0;

  auto* run = app.add_subcommand("run", "Run a configuration and write ledger, summary and meshes");
  run->add_option("--config", config, "Run configuration (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides output.directory)");

  auto* refine = app.add_subcommand("refine", "Repeat a run under kmax doubling");
  refine->add_option("--config", config, "Run configuration (JSON)")->required();
  refine->add_option("--levels", levels, "Number of kmax levels")->check(CLI::PositiveNumber);
  refine->add_option("--out", out_dir, "Directory for refine.csv");

  auto* check = app.add_subcommand("check-energy", "Re-check the energy inequality of a ledger CSV");
  auto* ledger_opt = check->add_option("--ledger,ledger", ledger, "Ledger CSV")->required();
  auto* e0_opt = check->add_option("--e0", e0, "Initial energy (defaults to the ledger column)");
  auto* tol_opt = check->add_option("--tol", tol, "Absolute tolerance tau");
  (void)ledger_opt;

  auto* dump = app.add_subcommand("dump-mesh", "Write the initial interface mesh and varifold");
  dump->add_option("--config", config, "Run configuration (JSON)")->required();
  dump->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  const std::optional<std::filesystem::path> out =
      out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir);
  try {
    if (*run) return cmd_run(config, out, std::cout, std::cerr);
    if (*refine) return cmd_refine(config, levels, out, std::cout, std::cerr);
    if (*check) {
      return cmd_check_energy(ledger, *e0_opt ? std::optional<double>(e0) : std::nullopt,
                              *tol_opt ? std::optional<double>(tol) : std::nullopt, std::cout, std::cerr);
    }
    if (*dump) return cmd_dump_mesh(config, out, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitInput;
}
