// ============================================================================
// acceptance.cpp
// Property-level acceptance checks. One PASS/FAIL line per criterion; the
// process exits nonzero if any criterion fails.
//
// RUN: ./acceptance            (all criteria)
//      ./acceptance 3 5        (selected criteria)
// ============================================================================

#include "oracles.hpp"

#include "varimhd/driver.hpp"
#include "varimhd/varifold.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using namespace varimhd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ----------------------------------------------------------------------------
// Reference run, shared by criteria 6, 7, 8.
// ----------------------------------------------------------------------------
struct ReferenceRun {
  Problem problem;
  RunOutcome outcome;
};

const ReferenceRun& reference_run() {
  static const ReferenceRun r = [] {
    ReferenceRun rr;
    rr.problem = build_problem(load_config(VARIMHD_REFERENCE_CONFIG));
    rr.outcome = execute(rr.problem);
    return rr;
  }();
  return r;
}

// ----------------------------------------------------------------------------
// 1. det grad X_t = 1
// ----------------------------------------------------------------------------
Outcome flow_volume() {
  std::mt19937_64 rng(20261017);
  std::uniform_real_distribution<double> U(0.0, kTwoPi);
  auto basis = make_basis(2, 3);
  double worst = 0.0;
  for (int field = 0; field < 5; ++field) {
    const FieldSampler u(SpectralField::from(basis, oracle::random_coefficients(basis->size(), rng, 0.5)));
    for (int p = 0; p < 8; ++p) {
      const Vec3 x0(U(rng), U(rng), 0.0);
      const Mat3 J = flow_jacobian(x0, u, 1.0, 1e-3).jacobian;
      worst = std::max(worst, std::abs(J.topLeftCorner<2, 2>().determinant() - 1.0));
    }
  }
  return {worst <= 1e-6, "max |det - 1| = " + fmt("%.3e", worst) + " over 5 fields x 8 points"};
}

// ----------------------------------------------------------------------------
// 2. enclosed volume under Taylor-Green
// ----------------------------------------------------------------------------
Outcome mass_conservation() {
  auto basis = make_basis(2, 2);
  const SpectralField tg = project_L2(
      [](const Vec3& x) { return Vec3(std::sin(x[0]) * std::cos(x[1]), -std::cos(x[0]) * std::sin(x[1]), 0.0); },
      basis, 8);
  const FieldSampler u(tg);
  const InitialPhase disk = InitialPhase::disk(Vec3(kPi, kPi, 0.0), 1.0);
  const auto drift = [&](int n, double h) {
    const InterfaceMesh m0 = mesh_initial(disk, n);
    const InterfaceMesh m1 = advect(m0, u, 0.5, h);
    return std::abs(enclosed_volume(m1) - kPi) / kPi;
  };
  const double coarse = drift(128, 1e-2);
  const double fine = drift(256, 5e-3);
  const bool pass = coarse <= 1e-3 && coarse / fine >= 2.0;
  return {pass, "relative drift vs pi: " + fmt("%.3e", coarse) + " (N=128, h=1e-2), " + fmt("%.3e", fine) +
                    " (N=256, h=5e-3), reduction " + fmt("%.2f", coarse / fine)};
}

// ----------------------------------------------------------------------------
// 3. first variation against closed forms
// ----------------------------------------------------------------------------
struct SmoothField {
  static Vec3 value(const Vec3& x) {
    return Vec3(std::sin(x[1]) + 0.25 * x[0] * x[0], std::cos(x[0]) + std::sin(x[2]), std::cos(x[1]) * x[2]);
  }
  static Mat3 gradient(const Vec3& x) {
    Mat3 J = Mat3::Zero();
    J(0, 0) = 0.5 * x[0];
    J(0, 1) = std::cos(x[1]);
    J(1, 0) = -std::sin(x[0]);
    J(1, 2) = std::cos(x[2]);
    J(2, 1) = -std::sin(x[1]) * x[2];
    J(2, 2) = std::cos(x[1]);
    return J;
  }
};

// Planar restriction (z components dropped).
TestFunctionSample planar(const Vec3& x) {
  Vec3 v = SmoothField::value(x);
  Mat3 J = SmoothField::gradient(x);
  v[2] = 0.0;
  J.row(2).setZero();
  J.col(2).setZero();
  return {v, J};
}

TestFunctionSample spatial(const Vec3& x) { return {SmoothField::value(x), SmoothField::gradient(x)}; }

// Mean-curvature integral on the exact circle / sphere (H = (d-1)/R): the
// boundary integral of H n . phi.
double circle_exact(const Vec3& c, double R) {
  return oracle::circle_integral(
      [&](double th) {
        const Vec3 n(std::cos(th), std::sin(th), 0.0);
        return n.dot(planar(c + R * n).value);  // (1/R) * n.phi * R dtheta
      },
      8192);
}

double sphere_exact(const Vec3& c, double R) {
  // z-midpoint x azimuthal trapezoid; dA = R^2 dz dphi
  const int nz = 4000, nphi = 512;
  double total = 0.0;
  for (int i = 0; i < nz; ++i) {
    const double z = -1.0 + (i + 0.5) * 2.0 / nz;
    const double rho = std::sqrt(1.0 - z * z);
    for (int j = 0; j < nphi; ++j) {
      const double ph = kTwoPi * j / nphi;
      const Vec3 n(rho * std::cos(ph), rho * std::sin(ph), z);
      total += (2.0 / R) * n.dot(SmoothField::value(c + R * n));
    }
  }
  return total * R * R * (2.0 / nz) * (kTwoPi / nphi);
}

Outcome first_variation_oracle() {
  const TestFunction identity = [](const Vec3& x) { return TestFunctionSample{x, Mat3::Identity()}; };
  std::ostringstream detail;
  bool pass = true;
  const Vec3 c2(kPi, kPi, 0.0), c3(kPi, kPi, kPi);

  double worst_id = 0.0;
  for (double R : {0.5, 1.0}) {
    const Varifold v = lift(mesh_initial(InitialPhase::disk(c2, R), 128));
    worst_id = std::max(worst_id, std::abs(first_variation(v, identity) / v.mass() - 1.0));
  }
  {
    const Varifold v = lift(mesh_initial(InitialPhase::ball(c3, 1.0), 3));
    worst_id = std::max(worst_id, std::abs(first_variation(v, identity) / (2.0 * v.mass()) - 1.0));
  }
  pass = pass && worst_id <= 1e-3;
  detail << "identity rel err " << fmt("%.1e", worst_id);

  // circle R = 1: default resolution 128, refinement 64 -> 128 -> 256
  const double ex2 = circle_exact(c2, 1.0);
  std::vector<double> e2;
  for (int n : {64, 128, 256}) {
    e2.push_back(std::abs(first_variation(lift(mesh_initial(InitialPhase::disk(c2, 1.0), n)), planar) - ex2) /
                 std::abs(ex2));
  }
  const double order2 = std::log2(e2[1] / e2[2]);
  pass = pass && e2[1] <= 1e-2 && order2 >= 1.8;
  detail << "; circle rel err " << fmt("%.2e", e2[1]) << " order " << fmt("%.2f", order2);

  // sphere R = 1: default level 3, refinement 2 -> 3 -> 4 (edge halves per level)
  const double ex3 = sphere_exact(c3, 1.0);
  std::vector<double> e3;
  for (int level : {2, 3, 4}) {
    e3.push_back(std::abs(first_variation(lift(mesh_initial(InitialPhase::ball(c3, 1.0), level)), spatial) - ex3) /
                 std::abs(ex3));
  }
  const double order3 = std::log2(e3[1] / e3[2]);
  pass = pass && e3[1] <= 1e-2 && order3 >= 1.8;
  detail << "; sphere rel err " << fmt("%.2e", e3[1]) << " order " << fmt("%.2f", order3);
  return {pass, detail.str()};
}

// ----------------------------------------------------------------------------
// 4. coupling identity
// ----------------------------------------------------------------------------
Outcome coupling_identity() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const InterfaceMesh circle = mesh_initial(InitialPhase::disk(Vec3(kPi, kPi, 0.0), 1.0), 128);
  const InterfaceMesh sphere = mesh_initial(InitialPhase::ball(Vec3(kPi, kPi, kPi), 1.0), 3);
  const Varifold vc = lift(circle), vs = lift(sphere);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Vec3 a(U(rng), U(rng), U(rng)), k(3 * U(rng), 3 * U(rng), 3 * U(rng)), b(U(rng), U(rng), U(rng));
    const VectorSampler psi = [=](const Vec3& x) { return Vec3(a * std::sin(k.dot(x)) + b.cwiseProduct(x)); };
    worst = std::max({worst, coupling_residual(vc, circle, psi), coupling_residual(vs, sphere, psi)});
  }
  return {worst <= 1e-12, "max residual over 20 fields x {circle, sphere} = " + fmt("%.2e", worst)};
}

// ----------------------------------------------------------------------------
// 5. induction decay and transport antisymmetry
// ----------------------------------------------------------------------------
Outcome induction_decay() {
  auto basis = make_basis(2, 2);
  const QuadratureGrid grid(basis, 8);
  Coefficients b0 = Coefficients::Zero(static_cast<Eigen::Index>(basis->size()));
  b0[0] = 1.0;
  TrajectorySampler u0(basis);
  u0.append(0.0, Coefficients::Zero(b0.size()));
  const MagneticTrajectory traj = solve_B(u0, SpectralField::from(basis, b0), 0.0, 1.0, 1e-3, 1.0, grid);
  const double ratio = traj.fields.back().norm() / b0.norm();
  const double decay_err = std::abs(ratio - std::exp(-1.0));

  std::mt19937_64 rng(5);
  double defect = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Coefficients u = oracle::random_coefficients(basis->size(), rng);
    const Coefficients b = oracle::random_coefficients(basis->size(), rng);
    const double power = lorentz_power(grid, u, b);
    std::vector<Vec3> bq;
    sample_on_grid(grid, b, &bq, nullptr);
    std::vector<Mat3> m(grid.size());
    for (std::size_t q = 0; q < grid.size(); ++q) m[q] = -bq[q] * bq[q].transpose();
    const double into_b = b.dot(transport_pairing(grid, u, b));
    const double into_u = u.dot(pair_with_mode_gradients(grid, m));
    defect = std::max(defect, std::abs(into_b + into_u));
  }
  const bool pass = decay_err <= 1e-3 && defect <= 1e-8;
  return {pass, "|B(1)|/|B(0)| = " + fmt("%.6f", ratio) + " (e^-1 = " + fmt("%.6f", std::exp(-1.0)) +
                    ", err " + fmt("%.1e", decay_err) + "); antisymmetry defect " + fmt("%.1e", defect)};
}

// ----------------------------------------------------------------------------
// 6. fixed-point certificate
// ----------------------------------------------------------------------------
Outcome fixed_point_certificate() {
  const ReferenceRun& ref = reference_run();
  const RunResult& r = ref.outcome.result;
  const double tol = ref.problem.config.solver.tol;
  double worst = 0.0;
  for (const auto& w : r.windows) worst = std::max(worst, w.certificate);
  const double budget = static_cast<double>(r.windows.size()) * tol;
  const bool pass = !r.windows.empty() && worst < tol && r.galerkin_residual <= budget;
  return {pass, std::to_string(r.windows.size()) + " windows, max |u - K(u)| = " + fmt("%.2e", worst) +
                    ", chained Galerkin residual " + fmt("%.2e", r.galerkin_residual) + " <= " +
                    fmt("%.1e", budget)};
}

// ----------------------------------------------------------------------------
// 7. energy inequality; dt-scaling of the defect in the single-phase limit
// ----------------------------------------------------------------------------
double energy_defect(int n_sub, double dt_b) {
  RunConfig c = load_config(VARIMHD_REFERENCE_CONFIG);
  c.params.nu_minus = c.params.nu_plus;
  c.params.kappa = 0.0;
  c.u0 = FieldSpec{};
  c.u0.type = "coefficients";
  c.u0.source_kmax = 1;
  c.u0.values = {0.8, -0.5, 0.3, 0.6, -0.4, 0.7, 0.2, -0.3};
  c.solver.n_sub = n_sub;
  c.solver.dt_b = dt_b;
  const Problem p = build_problem(c);
  const RunResult r = run(*p.model, p.initial, c.T);
  double d = 0.0;
  for (const auto& row : r.ledger.rows()) d = std::max(d, std::abs(row.total() - row.e0));
  return d;
}

Outcome energy_inequality() {
  const ReferenceRun& ref = reference_run();
  const InequalityReport& rep = ref.outcome.report;
  const double d1 = energy_defect(8, 0.0125);
  const double d2 = energy_defect(16, 0.00625);
  const double ratio = d1 / d2;
  const bool pass = rep.pass && ratio >= 1.7 && ratio <= 4.5;
  return {pass, "reference worst margin " + fmt("%.3e", rep.worst_margin) + " <= tau " + fmt("%.3e", rep.tau) +
                    "; single-phase defect " + fmt("%.3e", d1) + " -> " + fmt("%.3e", d2) + ", ratio " +
                    fmt("%.2f", ratio)};
}

// ----------------------------------------------------------------------------
// 8. N-bound audit
// ----------------------------------------------------------------------------
Outcome n_bound_audit() {
  const RunResult& r = reference_run().outcome.result;
  double worst = 0.0;
  for (double q : r.n_bound_ratios) worst = std::max(worst, q);
  return {!r.n_bound_ratios.empty() && worst <= 1.0,
          std::to_string(r.n_bound_ratios.size()) + " samples, C = " + fmt("%.4g", r.n_bound_constant) +
              ", max |N| / bound = " + fmt("%.3e", worst)};
}

// ----------------------------------------------------------------------------
// 9. refinement stability
// ----------------------------------------------------------------------------
Outcome refinement() {
  const RefineReport r = refine(load_config(VARIMHD_REFERENCE_CONFIG), 3);
  std::ostringstream d;
  d << "kmax 2/4/8: d|u| " << fmt("%.3e", r.d_u[0]) << " -> " << fmt("%.3e", r.d_u[1]) << ", dP "
    << fmt("%.3e", r.d_perimeter[0]) << " -> " << fmt("%.3e", r.d_perimeter[1]);
  return {r.u_monotone && r.perimeter_monotone, d.str()};
}

// ----------------------------------------------------------------------------
// 10. determinism through the command line
// ----------------------------------------------------------------------------
Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "varimhd_acceptance_determinism";
  fs::remove_all(root);
  int codes[2];
  for (int i = 0; i < 2; ++i) {
    const std::string cmd = std::string("\"") + VARIMHD_CLI + "\" run --config \"" + VARIMHD_REFERENCE_CONFIG +
                            "\" --out \"" + (root / std::to_string(i)).string() + "\" > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    codes[i] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  const std::string a = slurp(root / "0" / "ledger.csv");
  const std::string b = slurp(root / "1" / "ledger.csv");
  const bool same = !a.empty() && a == b;
  return {codes[0] == 0 && codes[1] == 0 && same,
          "exit codes " + std::to_string(codes[0]) + "/" + std::to_string(codes[1]) + ", ledgers " +
              std::to_string(a.size()) + " bytes, " + (same ? "identical" : "DIFFERENT")};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*fn)();
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion all[] = {
      {1, "flow-map volume preservation", flow_volume},
      {2, "mass conservation of chi", mass_conservation},
      {3, "first-variation oracle", first_variation_oracle},
      {4, "coupling identity", coupling_identity},
      {5, "induction decay", induction_decay},
      {6, "fixed-point certificate", fixed_point_certificate},
      {7, "generalized energy inequality", energy_inequality},
      {8, "N-bound audit", n_bound_audit},
      {9, "refinement stability", refinement},
      {10, "determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.name << ": " << o.detail << " ("
              << fmt("%.1f", secs) << " s)" << std::endl;
    failures += o.pass ? 0 : 1;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
