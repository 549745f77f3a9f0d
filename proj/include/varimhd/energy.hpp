#pragma once

#include "varimhd/interface.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace varimhd {

/// One snapshot (t, u_n, B_n, mesh of chi_n) of the coupled system.
struct GalerkinState {
  double t = 0.0;
  SpectralField u;
  SpectralField b;
  InterfaceMesh mesh;
};

/// E0 = 1/2 |u0|^2 + 1/2 |B0|^2 + kappa * perimeter(mesh0).
double initial_energy(const SpectralField& u0, const SpectralField& b0, const InterfaceMesh& mesh0,
                      double kappa);

struct EnergyRow {
  double t = 0.0;
  double kinetic = 0.0;    // 1/2 |u|^2
  double magnetic = 0.0;   // 1/2 |B|^2
  double tension = 0.0;    // kappa * perimeter
  double viscous_cum = 0.0;    // int_0^t 2 (nu(chi) Du, Du)
  double resistive_cum = 0.0;  // int_0^t sigma |grad B|^2
  double e0 = 0.0;

  /// Left-hand side of the energy inequality; the viscous column is scaled
  /// by `korn_factor`.
  double total(double korn_factor = 1.0) const {
    return kinetic + magnetic + tension + korn_factor * viscous_cum + resistive_cum;
  }
};

class EnergyLedger {
 public:
  EnergyLedger() = default;
  explicit EnergyLedger(double e0) : e0_(e0) {}

  double e0() const { return e0_; }
  const std::vector<EnergyRow>& rows() const { return rows_; }
  std::vector<EnergyRow>& rows() { return rows_; }
  bool empty() const { return rows_.empty(); }

  /// Appends a row for `state`, adding the increments to the cumulative
  /// columns of the previous row.
  EnergyLedger& record(const GalerkinState& state, double kappa, double viscous_increment,
                       double resistive_increment);

  /// Appends a fully formed row (used when reading files).
  void push(const EnergyRow& row) { rows_.push_back(row); }
  void set_e0(double e0) { e0_ = e0; }

 private:
  double e0_ = 0.0;
  std::vector<EnergyRow> rows_;
};

struct InequalityReport {
  bool pass = true;
  double worst_margin = 0.0;  // max_t (lhs - E0); the inequality allows <= tau
  double worst_time = 0.0;
  std::size_t worst_row = 0;
  double tau = 0.0;
  std::string message;
};

/// 10 * (dt + 1/Q) * E0.
double default_energy_tolerance(double dt, int quadrature_order, double e0);

/// Every row must satisfy lhs(row) <= E0 + tau.
InequalityReport check_inequality(const EnergyLedger& ledger, double tau, double korn_factor = 1.0);

/// Cumulative columns nondecreasing, all entries finite and nonnegative.
/// Throws NumericalError naming the first offending row.
void validate_ledger(const EnergyLedger& ledger);

class LedgerFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_ledger_csv(const EnergyLedger& ledger, const std::filesystem::path& path);
/// Throws LedgerFormatError on a missing, empty or malformed file.
EnergyLedger read_ledger_csv(const std::filesystem::path& path);

}  // namespace varimhd
