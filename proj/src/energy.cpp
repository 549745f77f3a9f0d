#include "varimhd/energy.hpp"

#include "varimhd/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace varimhd {

double initial_energy(const SpectralField& u0, const SpectralField& b0, const InterfaceMesh& mesh0,
                      double kappa) {
  return 0.5 * u0.coefficients.squaredNorm() + 0.5 * b0.coefficients.squaredNorm() +
         kappa * perimeter(mesh0);
}

EnergyLedger& EnergyLedger::record(const GalerkinState& state, double kappa, double viscous_increment,
                                   double resistive_increment) {
  EnergyRow row;
  row.t = state.t;
  row.kinetic = 0.5 * state.u.coefficients.squaredNorm();
  row.magnetic = 0.5 * state.b.coefficients.squaredNorm();
  row.tension = kappa * perimeter(state.mesh);
  row.e0 = e0_;
  const double prev_viscous = rows_.empty() ? 0.0 : rows_.back().viscous_cum;
  const double prev_resistive = rows_.empty() ? 0.0 : rows_.back().resistive_cum;
  row.viscous_cum = prev_viscous + viscous_increment;
  row.resistive_cum = prev_resistive + resistive_increment;
  rows_.push_back(row);
  return *this;
}

double default_energy_tolerance(double dt, int quadrature_order, double e0) {
  return 10.0 * (dt + 1.0 / quadrature_order) * e0;
}

InequalityReport check_inequality(const EnergyLedger& ledger, double tau, double korn_factor) {
  InequalityReport report;
  report.tau = tau;
  if (ledger.empty()) {
    report.pass = false;
    report.message = "empty ledger";
    return report;
  }
  report.worst_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ledger.rows().size(); ++i) {
    const EnergyRow& row = ledger.rows()[i];
    const double margin = row.total(korn_factor) - row.e0;
    if (margin > report.worst_margin || std::isnan(margin)) {
      report.worst_margin = margin;
      report.worst_time = row.t;
      report.worst_row = i;
    }
  }
  report.pass = report.worst_margin <= tau;
  std::ostringstream msg;
  msg << (report.pass ? "energy inequality holds" : "energy inequality violated") << ": worst margin "
      << format_number(report.worst_margin) << " at t = " << format_number(report.worst_time)
      << " (row " << report.worst_row << "), tolerance " << format_number(tau);
  report.message = msg.str();
  return report;
}

void validate_ledger(const EnergyLedger& ledger) {
  const auto& rows = ledger.rows();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const EnergyRow& r = rows[i];
    for (double v : {r.t, r.kinetic, r.magnetic, r.tension, r.viscous_cum, r.resistive_cum, r.e0}) {
      if (!std::isfinite(v) || v < 0.0) {
        throw NumericalError("ledger row " + std::to_string(i) + " has a negative or non-finite entry");
      }
    }
    if (i > 0 && (r.viscous_cum < rows[i - 1].viscous_cum || r.resistive_cum < rows[i - 1].resistive_cum)) {
      throw NumericalError("ledger row " + std::to_string(i) + " decreases a cumulative column");
    }
  }
}

namespace {

constexpr const char* kHeader = "t,kinetic,magnetic,tension,viscous_cum,resistive_cum,E0";

}  // namespace

void write_ledger_csv(const EnergyLedger& ledger, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << kHeader << '\n';
  for (const auto& r : ledger.rows()) {
    out << format_number(r.t) << ',' << format_number(r.kinetic) << ',' << format_number(r.magnetic)
        << ',' << format_number(r.tension) << ',' << format_number(r.viscous_cum) << ','
        << format_number(r.resistive_cum) << ',' << format_number(r.e0) << '\n';
  }
}

EnergyLedger read_ledger_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LedgerFormatError("cannot open ledger " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw LedgerFormatError("ledger " + path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw LedgerFormatError("unexpected ledger header: " + line);

  EnergyLedger ledger;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    double v[7];
    int n = 0;
    while (std::getline(ss, cell, ',')) {
      if (n >= 7) throw LedgerFormatError("too many columns on ledger line " + std::to_string(lineno));
      try {
        std::size_t used = 0;
        v[n] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw LedgerFormatError("malformed number '" + cell + "' on ledger line " + std::to_string(lineno));
      }
      ++n;
    }
    if (n != 7) throw LedgerFormatError("expected 7 columns on ledger line " + std::to_string(lineno));
    ledger.push({v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
  }
  if (ledger.empty()) throw LedgerFormatError("ledger " + path.string() + " has no rows");
  ledger.set_e0(ledger.rows().front().e0);
  return ledger;
}

}  // namespace varimhd
