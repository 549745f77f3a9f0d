#pragma once

#include "varimhd/config.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>

namespace varimhd {

enum ExitCode : int { kExitOk = 0, kExitFailed = 1, kExitInput = 2, kExitSolver = 3 };

/// Everything needed to start a run, assembled from a validated config.
struct Problem {
  RunConfig config;
  std::shared_ptr<const GalerkinModel> model;
  GalerkinState initial;
  std::vector<std::string> warnings;
};

Problem build_problem(const RunConfig& config);

struct RunOutcome {
  RunResult result;
  InequalityReport report;
  double e0 = 0.0;
};

/// galerkin::run followed by the energy check with the default tolerance.
RunOutcome execute(const Problem& problem, const WindowObserver& on_window = {});

nlohmann::json summary_json(const Problem& problem, const RunOutcome& outcome);

struct RefineLevel {
  int kmax = 0;
  double u_norm = 0.0;
  double b_norm = 0.0;
  double perimeter = 0.0;
  double volume = 0.0;
};

struct RefineReport {
  std::vector<RefineLevel> levels;
  /// |x_{i} - x_{i-1}| for i >= 1, per observable.
  std::vector<double> d_u, d_b, d_perimeter, d_volume;
  bool u_monotone = true;
  bool perimeter_monotone = true;
};

/// Runs `config` at kmax, 2 kmax, ..., 2^(levels-1) kmax.
RefineReport refine(const RunConfig& config, int levels);

int cmd_run(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out_dir,
            std::ostream& out, std::ostream& err);
int cmd_refine(const std::filesystem::path& config_path, int levels,
               const std::optional<std::filesystem::path>& out_dir, std::ostream& out, std::ostream& err);
/// Exit 0 on pass, 1 on a violated row, 2 on an unreadable ledger.
int cmd_check_energy(const std::filesystem::path& ledger_path, std::optional<double> e0, std::optional<double> tau,
                     std::ostream& out, std::ostream& err);
/// Writes the initial interface mesh and its varifold.
int cmd_dump_mesh(const std::filesystem::path& config_path, const std::optional<std::filesystem::path>& out_dir,
                  std::ostream& out, std::ostream& err);

}  // namespace varimhd
