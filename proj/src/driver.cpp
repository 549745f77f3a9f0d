#include "varimhd/driver.hpp"

#include "varimhd/io.hpp"
#include "varimhd/varifold.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

namespace varimhd {

namespace fs = std::filesystem;
using nlohmann::json;

Problem build_problem(const RunConfig& config) {
  config.validate();
  Problem p;
  p.config = config;
  const int order = config.basis.resolved_order();
  BasisPtr basis = make_basis(config.basis.dimension, config.basis.kmax);
  auto grid = std::make_shared<const QuadratureGrid>(basis, order);
  const InitialPhase phase = config.initial_phase();
  p.model = std::make_shared<const GalerkinModel>(grid, phase, config.params, config.solver);
  if (!grid->resolves_products()) {
    p.warnings.push_back("quadrature order " + std::to_string(order) + " is below 2*kmax+1; products are aliased");
  }
  p.initial.t = 0.0;
  p.initial.u = make_field(config.u0, basis, order, &p.warnings);
  p.initial.b = make_field(config.b0, basis, order, &p.warnings);
  p.initial.mesh = mesh_initial(phase, config.solver.mesh_resolution);
  return p;
}

RunOutcome execute(const Problem& problem, const WindowObserver& on_window) {
  RunOutcome o;
  o.result = run(*problem.model, problem.initial, problem.config.T, on_window);
  o.e0 = o.result.ledger.e0();
  validate_ledger(o.result.ledger);
  const double tau =
      default_energy_tolerance(o.result.energy_dt, problem.config.basis.resolved_order(), o.e0);
  o.report = check_inequality(o.result.ledger, tau);
  return o;
}

json summary_json(const Problem& problem, const RunOutcome& o) {
  const RunResult& r = o.result;
  const GalerkinState& last = r.final_state();
  double max_cert = 0.0;
  for (const auto& w : r.windows) max_cert = std::max(max_cert, w.certificate);
  double max_ratio = 0.0;
  for (double q : r.n_bound_ratios) max_ratio = std::max(max_ratio, q);
  json j;
  j["E0"] = o.e0;
  j["worst_margin"] = o.report.worst_margin;
  j["worst_time"] = o.report.worst_time;
  j["tau"] = o.report.tau;
  j["pass"] = o.report.pass;
  j["windows"] = r.windows.size();
  j["window_failures"] = r.window_failures;
  j["max_certificate"] = max_cert;
  j["galerkin_residual"] = r.galerkin_residual;
  j["n_bound_constant"] = r.n_bound_constant;
  j["max_n_bound_ratio"] = max_ratio;
  j["smallness_window"] = std::isfinite(r.smallness_window) ? json(r.smallness_window) : json(nullptr);
  j["final"] = {{"t", last.t},
                {"u_norm", last.u.norm()},
                {"b_norm", last.b.norm()},
                {"perimeter", perimeter(last.mesh)},
                {"volume", enclosed_volume(last.mesh)}};
  j["warnings"] = problem.warnings;
  j["config"] = to_json(problem.config);
  return j;
}

namespace {

void write_json(const json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

void dump_snapshot(const GalerkinState& s, const fs::path& dir) {
  write_mesh(s.mesh, dir / interface_filename(s.t, s.mesh.dim));
  write_varifold(lift(s.mesh), dir / varifold_filename(s.t));
}

std::vector<double> to_vector(const Coefficients& c) { return {c.data(), c.data() + c.size()}; }

}  // namespace

int cmd_run(const fs::path& config_path, const std::optional<fs::path>& out_dir, std::ostream& out,
            std::ostream& err) {
  Problem problem;
  try {
    problem = build_problem(load_config(config_path));
  } catch (const InputError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitInput;
  }
  const fs::path dir = out_dir ? *out_dir : fs::path(problem.config.output.directory);
  fs::create_directories(dir);
  for (const auto& w : problem.warnings) err << "warning: " << w << '\n';

  const int cadence = problem.config.output.cadence;
  int window_count = 0;
  GalerkinState last = problem.initial;
  dump_snapshot(problem.initial, dir);
  const WindowObserver observer = [&](const GalerkinState& s) {
    last = s;
    ++window_count;
    if (cadence > 0 && window_count % cadence == 0) dump_snapshot(s, dir);
  };

  RunOutcome outcome;
  try {
    outcome = execute(problem, observer);
  } catch (const std::exception& e) {
    json dump;
    dump["error"] = e.what();
    dump["t"] = last.t;
    dump["u"] = to_vector(last.u.coefficients);
    dump["B"] = to_vector(last.b.coefficients);
    dump["perimeter"] = perimeter(last.mesh);
    dump["config"] = to_json(problem.config);
    write_json(dump, dir / "state_dump.json");
    dump_snapshot(last, dir);
    err << "solver failure: " << e.what() << " (state written to " << (dir / "state_dump.json").string() << ")\n";
    return kExitSolver;
  }
  const GalerkinState& final_state = outcome.result.final_state();
  if (cadence == 0 || window_count % cadence != 0) dump_snapshot(final_state, dir);
  write_ledger_csv(outcome.result.ledger, dir / "ledger.csv");
  write_json(summary_json(problem, outcome), dir / "summary.json");
  out << outcome.report.message << '\n';
  return outcome.report.pass ? kExitOk : kExitFailed;
}

RefineReport refine(const RunConfig& config, int levels) {
  if (levels < 2) throw InputError("refine needs at least 2 levels");
  RefineReport report;
  for (int l = 0; l < levels; ++l) {
    RunConfig c = config;
    c.basis.kmax = config.basis.kmax << l;
    if (config.basis.quadrature_order > 0) c.basis.quadrature_order = config.basis.quadrature_order << l;
    if (c.u0.type == "coefficients" && c.u0.source_kmax == 0) c.u0.source_kmax = config.basis.kmax;
    if (c.b0.type == "coefficients" && c.b0.source_kmax == 0) c.b0.source_kmax = config.basis.kmax;
    const Problem p = build_problem(c);
    const RunResult r = run(*p.model, p.initial, c.T);
    const GalerkinState& s = r.final_state();
    report.levels.push_back({c.basis.kmax, s.u.norm(), s.b.norm(), perimeter(s.mesh), enclosed_volume(s.mesh)});
  }
  for (std::size_t i = 1; i < report.levels.size(); ++i) {
    const auto& a = report.levels[i - 1];
    const auto& b = report.levels[i];
    report.d_u.push_back(std::abs(b.u_norm - a.u_norm));
    report.d_b.push_back(std::abs(b.b_norm - a.b_norm));
    report.d_perimeter.push_back(std::abs(b.perimeter - a.perimeter));
    report.d_volume.push_back(std::abs(b.volume - a.volume));
  }
  for (std::size_t i = 1; i < report.d_u.size(); ++i) {
    report.u_monotone = report.u_monotone && report.d_u[i] < report.d_u[i - 1];
    report.perimeter_monotone = report.perimeter_monotone && report.d_perimeter[i] < report.d_perimeter[i - 1];
  }
  return report;
}

int cmd_refine(const fs::path& config_path, int levels, const std::optional<fs::path>& out_dir,
               std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = load_config(config_path);
    config.validate();
    if (levels < 2) throw InputError("--levels must be at least 2");
  } catch (const InputError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitInput;
  }
  RefineReport report;
  try {
    report = refine(config, levels);
  } catch (const InputError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }

  std::ostringstream table;
  table << "kmax,u_norm,b_norm,perimeter,volume,d_u,d_b,d_perimeter,d_volume\n";
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    const auto& l = report.levels[i];
    table << l.kmax << ',' << format_number(l.u_norm) << ',' << format_number(l.b_norm) << ','
          << format_number(l.perimeter) << ',' << format_number(l.volume);
    if (i == 0) {
      table << ",,,,\n";
    } else {
      table << ',' << format_number(report.d_u[i - 1]) << ',' << format_number(report.d_b[i - 1]) << ','
            << format_number(report.d_perimeter[i - 1]) << ',' << format_number(report.d_volume[i - 1]) << '\n';
    }
  }
  out << table.str();
  out << "successive |u| differences decreasing: " << (report.u_monotone ? "yes" : "no") << '\n';
  out << "successive perimeter differences decreasing: " << (report.perimeter_monotone ? "yes" : "no") << '\n';
  if (out_dir) {
    fs::create_directories(*out_dir);
    std::ofstream f(*out_dir / "refine.csv");
    f << table.str();
  }
  return kExitOk;
}

int cmd_check_energy(const fs::path& ledger_path, std::optional<double> e0, std::optional<double> tau,
                     std::ostream& out, std::ostream& err) {
  EnergyLedger ledger;
  try {
    ledger = read_ledger_csv(ledger_path);
  } catch (const LedgerFormatError& e) {
    err << "ledger error: " << e.what() << '\n';
    return kExitInput;
  }
  if (e0) {
    ledger.set_e0(*e0);
    for (auto& row : ledger.rows()) row.e0 = *e0;
  }
  double t = 0.0;
  if (tau) {
    t = *tau;
  } else {
    double h = 0.0;
    const auto& rows = ledger.rows();
    for (std::size_t i = 1; i < rows.size(); ++i) h = std::max(h, rows[i].t - rows[i - 1].t);
    t = 10.0 * h * ledger.e0();
  }
  const InequalityReport report = check_inequality(ledger, t);
  (report.pass ? out : err) << report.message << '\n';
  return report.pass ? kExitOk : kExitFailed;
}

int cmd_dump_mesh(const fs::path& config_path, const std::optional<fs::path>& out_dir, std::ostream& out,
                  std::ostream& err) {
  RunConfig config;
  try {
    config = load_config(config_path);
    config.validate();
  } catch (const InputError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitInput;
  }
  const fs::path dir = out_dir ? *out_dir : fs::path(config.output.directory);
  fs::create_directories(dir);
  const InterfaceMesh mesh = mesh_initial(config.initial_phase(), config.solver.mesh_resolution);
  write_mesh(mesh, dir / interface_filename(0.0, mesh.dim));
  write_varifold(lift(mesh), dir / varifold_filename(0.0));
  out << "wrote " << mesh.vertices.size() << " vertices, " << mesh.size() << " elements; perimeter "
      << format_number(perimeter(mesh)) << ", volume " << format_number(enclosed_volume(mesh)) << '\n';
  return kExitOk;
}

}  // namespace varimhd
