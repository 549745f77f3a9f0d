#include "varimhd/galerkin.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace varimhd {

void PhysicalParams::validate() const {
  if (!(nu_plus >= 0.0) || !(nu_minus >= 0.0)) throw InputError("viscosities must be nonnegative");
  if (!(sigma > 0.0)) throw InputError("magnetic diffusivity sigma must satisfy sigma > 0");
  if (!(kappa >= 0.0)) throw InputError("surface tension kappa must be nonnegative");
}

void SolverSettings::validate() const {
  if (!(window > 0.0)) throw InputError("window length must be positive");
  if (n_sub < 2) throw InputError("n_sub must be at least 2");
  if (!(tol > 0.0)) throw InputError("fixed-point tolerance must be positive");
  if (max_iter < 1) throw InputError("max_iter must be positive");
  if (!(relaxation > 0.0 && relaxation <= 1.0)) throw InputError("relaxation must lie in (0, 1]");
  if (!(h_flow > 0.0)) throw InputError("flow-map step must be positive");
  if (!(dt_b > 0.0)) throw InputError("induction step must be positive");
  if (!(min_window > 0.0)) throw InputError("minimum window must be positive");
}

namespace {

// sqrt(sum_j N_j^2 |k_j|^2) and sqrt(sum_j |k_j|^2).
std::pair<double, double> gradient_norms(const Basis& basis) {
  double a = 0.0;
  double b = 0.0;
  for (const auto& m : basis.modes()) {
    a += m.normalization * m.normalization * m.eigenvalue();
    b += m.eigenvalue();
  }
  return {std::sqrt(a), std::sqrt(b)};
}

}  // namespace

GalerkinModel::GalerkinModel(GridPtr grid, InitialPhase phase, PhysicalParams params,
                             SolverSettings settings)
    : grid_(std::move(grid)), phase_(phase), params_(params), settings_(settings) {
  params_.validate();
  settings_.validate();
  if (phase_.dim != grid_->basis().dim()) throw InputError("phase and basis dimensions differ");
  phase_.validate(grid_->basis().period());

  // Inertia and Lorentz: |(a (x) a, grad eta_j)| <= N_j |k_j| |a|^2.
  // Viscous: |2(nu Du, D eta_j)| <= 2 nu_max |k|_max |u| |k_j|.
  // Capillary: |int P_tau : grad eta_j| <= N_j |k_j| perimeter.
  const auto [a1, kn] = gradient_norms(grid_->basis());
  const double a3 = 2.0 * params_.viscosity().max() * grid_->basis().max_frequency() * kn;
  n_bound_constant_ = std::max({a1, a3, params_.kappa * a1});
}

Coefficients curvature_pairing_modes(const InterfaceMesh& mesh, const Basis& basis) {
  const std::size_t nw = basis.wavevectors().size();
  const std::size_t per = basis.modes_per_wave();
  const auto& modes = basis.modes();
  std::vector<double> cs(nw), sn(nw);
  Coefficients out = Coefficients::Zero(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t e = 0; e < mesh.size(); ++e) {
    const Vec3 n = mesh.element_normal(e);
    const double measure = mesh.element_measure(e);
    basis.phases(mesh.element_centroid(e), cs.data(), sn.data());
    for (std::size_t w = 0; w < nw; ++w) {
      // (I - n n^T) : (g p f^T) = -g (p.n)(f.n) since p.f = 0.
      const double fn = modes[w * per].frequency.dot(n);
      for (std::size_t p = 0; p < per; p += 2) {
        const std::size_t jc = w * per + p;
        const double scale = measure * modes[jc].normalization * modes[jc].direction.dot(n) * fn;
        out[static_cast<Eigen::Index>(jc)] += scale * sn[w];
        out[static_cast<Eigen::Index>(jc + 1)] -= scale * cs[w];
      }
    }
  }
  return out;
}

std::vector<double> phase_on_grid(const GalerkinModel& model, double t, const VelocitySampler& history) {
  const QuadratureGrid& grid = model.grid();
  std::vector<double> chi(grid.size());
  const double h = model.settings().h_flow;
  const double period = model.basis().period();
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t q = 0; q < grid.size(); ++q) {
    chi[q] = indicator(grid.point(q), t, history, model.phase(), h, period);
  }
  return chi;
}

NTerms apply_N(const GalerkinModel& model, const Coefficients& u, const Coefficients& b,
               const InterfaceMesh& mesh, const std::vector<double>& chi) {
  const QuadratureGrid& grid = model.grid();
  const std::size_t np = grid.size();
  const bool dependent = model.phase_dependent_viscosity();
  if (dependent && chi.size() != np) throw InputError("indicator samples do not match the quadrature grid");
  const PhaseViscosity nu = model.params().viscosity();

  std::vector<Vec3> uq, bq;
  std::vector<Mat3> ju;
  sample_on_grid(grid, u, &uq, &ju);
  sample_on_grid(grid, b, &bq, nullptr);

  std::vector<Mat3> m_inertia(np), m_lorentz(np), m_viscous(np);
  double dissipation = 0.0;
  double power = 0.0;
  for (std::size_t q = 0; q < np; ++q) {
    const double nq = dependent ? nu(chi[q]) : nu.nu_plus;
    const Mat3 strain2 = ju[q] + ju[q].transpose();  // 2 Du
    m_inertia[q].noalias() = uq[q] * uq[q].transpose();
    m_lorentz[q].noalias() = -bq[q] * bq[q].transpose();
    m_viscous[q] = -nq * strain2;
    dissipation += 0.5 * nq * strain2.squaredNorm();
    power += bq[q].dot(ju[q] * bq[q]);
  }

  NTerms terms;
  terms.inertia = pair_with_mode_gradients(grid, m_inertia);
  terms.lorentz = pair_with_mode_gradients(grid, m_lorentz);
  terms.viscous = pair_with_mode_gradients(grid, m_viscous);
  const double kappa = model.params().kappa;
  terms.capillary = kappa > 0.0 ? Coefficients(-kappa * curvature_pairing_modes(mesh, model.basis()))
                                : Coefficients::Zero(u.size());
  terms.dissipation = grid.weight() * dissipation;
  terms.lorentz_power = grid.weight() * power;

  if (!terms.inertia.allFinite() || !terms.lorentz.allFinite() || !terms.viscous.allFinite() ||
      !terms.capillary.allFinite() || !std::isfinite(terms.dissipation)) {
    throw NumericalError("non-finite quadrature in N");
  }
  return terms;
}

NTerms apply_N(const GalerkinModel& model, const GalerkinState& state, const VelocitySampler& history) {
  const std::vector<double> chi =
      model.phase_dependent_viscosity() ? phase_on_grid(model, state.t, history) : std::vector<double>{};
  return apply_N(model, state.u.coefficients, state.b.coefficients, state.mesh, chi);
}

double dissipation_rate(const GalerkinModel& model, const Coefficients& u, const std::vector<double>& chi) {
  const QuadratureGrid& grid = model.grid();
  const bool dependent = model.phase_dependent_viscosity();
  const PhaseViscosity nu = model.params().viscosity();
  std::vector<Mat3> ju;
  sample_on_grid(grid, u, nullptr, &ju);
  double total = 0.0;
  for (std::size_t q = 0; q < grid.size(); ++q) {
    const double nq = dependent ? nu(chi.at(q)) : nu.nu_plus;
    total += 0.5 * nq * (ju[q] + ju[q].transpose()).squaredNorm();
  }
  return grid.weight() * total;
}

double n_bound(const GalerkinModel& model, const Coefficients& u, const Coefficients& b,
               const InterfaceMesh& mesh) {
  const double un = u.norm();
  const double bv = std::abs(enclosed_volume(mesh)) + perimeter(mesh);
  return model.n_bound_constant() * (un * un + un + b.squaredNorm() + bv);
}

double smallness_window(const GalerkinModel& model, const GalerkinState& anchor) {
  const double a = anchor.u.coefficients.norm();
  const double b = anchor.b.coefficients.squaredNorm() + std::abs(enclosed_volume(anchor.mesh)) +
                   perimeter(anchor.mesh);
  // argmax over R of (R - a) / (R^2 + R + b)
  const double r = a + std::sqrt(a * a + a + b);
  if (!(r > 0.0)) return std::numeric_limits<double>::infinity();
  return (r - a) / (model.n_bound_constant() * (r * r + r + b));
}

std::vector<Coefficients> integrate_trapezoid(const Coefficients& anchor, const std::vector<double>& t_grid,
                                              const std::vector<Coefficients>& n_values) {
  std::vector<Coefficients> out(t_grid.size());
  out[0] = anchor;
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    out[i] = out[i - 1] + (0.5 * (t_grid[i] - t_grid[i - 1])) * (n_values[i - 1] + n_values[i]);
  }
  return out;
}

namespace {

// Anchor data that does not depend on the iterate.
struct AnchorCache {
  std::vector<double> chi;
  NTerms terms;
};

AnchorCache make_anchor_cache(const GalerkinModel& model, const GalerkinState& anchor,
                              const TrajectorySampler& history, const std::vector<double>* anchor_chi) {
  AnchorCache cache;
  if (model.phase_dependent_viscosity()) {
    cache.chi = anchor_chi != nullptr ? *anchor_chi : phase_on_grid(model, anchor.t, history);
  }
  cache.terms = apply_N(model, anchor.u.coefficients, anchor.b.coefficients, anchor.mesh, cache.chi);
  return cache;
}

KResult apply_K_cached(const GalerkinModel& model, const std::vector<double>& t_grid,
                       const std::vector<Coefficients>& u_traj, const GalerkinState& anchor,
                       const TrajectorySampler& history, const AnchorCache& cache) {
  const SolverSettings& s = model.settings();
  const std::size_t n = t_grid.size();
  const TrajectorySampler window(model.basis_ptr(), t_grid, u_traj);

  KResult result;
  WindowDependents& deps = result.dependents;
  deps.magnetic = solve_B_at(window, anchor.b, t_grid, s.dt_b, model.params().sigma, model.grid());

  deps.meshes.reserve(n);
  deps.meshes.push_back(anchor.mesh);
  for (std::size_t i = 1; i < n; ++i) deps.meshes.push_back(advect(deps.meshes.back(), window, t_grid[i], s.h_flow));

  deps.chi.assign(n, {});
  if (model.phase_dependent_viscosity()) {
    TrajectorySampler combined = history;
    combined.append(window);
    deps.chi[0] = cache.chi;
    for (std::size_t i = 1; i < n; ++i) deps.chi[i] = phase_on_grid(model, t_grid[i], combined);
  }

  result.terms.reserve(n);
  result.terms.push_back(cache.terms);
  for (std::size_t i = 1; i < n; ++i) {
    result.terms.push_back(
        apply_N(model, u_traj[i], deps.magnetic.fields[i], deps.meshes[i], deps.chi[i]));
  }
  std::vector<Coefficients> totals(n);
  for (std::size_t i = 0; i < n; ++i) totals[i] = result.terms[i].total();
  result.image = integrate_trapezoid(anchor.u.coefficients, t_grid, totals);
  return result;
}

double sup_distance(const std::vector<Coefficients>& a, const std::vector<Coefficients>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, (a[i] - b[i]).norm());
  return d;
}

std::vector<double> window_grid(double t0, double delta, int n_sub) {
  std::vector<double> t(static_cast<std::size_t>(n_sub) + 1);
  for (int i = 0; i <= n_sub; ++i) t[static_cast<std::size_t>(i)] = t0 + delta * i / n_sub;
  t.back() = t0 + delta;
  return t;
}

}  // namespace

KResult apply_K(const GalerkinModel& model, const std::vector<double>& t_grid,
                const std::vector<Coefficients>& u_traj, const GalerkinState& anchor,
                const TrajectorySampler& history) {
  if (t_grid.size() < 2 || u_traj.size() != t_grid.size()) {
    throw InputError("apply_K needs a velocity sample at every window knot");
  }
  const AnchorCache cache = make_anchor_cache(model, anchor, history, nullptr);
  return apply_K_cached(model, t_grid, u_traj, anchor, history, cache);
}

namespace {

WindowSolve fixed_point_window_impl(const GalerkinModel& model, const GalerkinState& anchor,
                                    const TrajectorySampler& history, double delta, int n_sub,
                                    double tol, int max_iter, double omega,
                                    const std::vector<double>* anchor_chi) {
  if (!(tol > 0.0) || !(omega > 0.0 && omega <= 1.0) || !(delta > 0.0) || n_sub < 2 || max_iter < 1) {
    throw InputError("invalid fixed-point window parameters");
  }
  WindowSolve solve;
  solve.t_grid = window_grid(anchor.t, delta, n_sub);
  std::vector<Coefficients> u(solve.t_grid.size(), anchor.u.coefficients);
  const AnchorCache cache = make_anchor_cache(model, anchor, history, anchor_chi);
  const double blowup = 1e8 * (1.0 + anchor.u.coefficients.norm() + anchor.b.coefficients.norm());

  for (int it = 1; it <= max_iter; ++it) {
    KResult k;
    try {
      k = apply_K_cached(model, solve.t_grid, u, anchor, history, cache);
    } catch (const NumericalError& e) {
      throw WindowFailure(std::string("fixed-point iterate became non-finite: ") + e.what());
    } catch (const IntegrationError& e) {
      throw WindowFailure(std::string("fixed-point iterate became non-finite: ") + e.what());
    }
    const double r = sup_distance(u, k.image);
    solve.residual_history.push_back(r);
    if (!std::isfinite(r) || r > blowup) {
      throw WindowFailure("fixed-point iteration diverged at iterate " + std::to_string(it));
    }
    if (r < tol) {
      solve.u_trajectory = std::move(u);
      solve.terms = std::move(k.terms);
      solve.dependents = std::move(k.dependents);
      solve.iterations = it;
      solve.certificate = r;
      return solve;
    }
    for (std::size_t i = 1; i < u.size(); ++i) u[i] = (1.0 - omega) * u[i] + omega * k.image[i];
  }
  std::ostringstream msg;
  msg << "fixed-point window at t = " << anchor.t << " (length " << delta << ") did not reach tol " << tol
      << " in " << max_iter << " iterations; last residual " << solve.residual_history.back();
  throw WindowFailure(msg.str());
}

}  // namespace

WindowSolve fixed_point_window(const GalerkinModel& model, const GalerkinState& anchor,
                               const TrajectorySampler& history, double delta, int n_sub, double tol,
                               int max_iter, double omega) {
  return fixed_point_window_impl(model, anchor, history, delta, n_sub, tol, max_iter, omega, nullptr);
}

RunResult run(const GalerkinModel& model, const GalerkinState& initial, double T,
              const WindowObserver& on_window) {
  const SolverSettings& s = model.settings();
  const PhysicalParams& p = model.params();
  if (!(T >= 0.0)) throw InputError("final time must be nonnegative");
  if (initial.u.basis.get() != &model.basis() || initial.b.basis.get() != &model.basis()) {
    throw InputError("initial fields must live on the model basis");
  }
  validate_mesh(initial.mesh);

  RunResult result;
  result.n_bound_constant = model.n_bound_constant();
  result.smallness_window = smallness_window(model, initial);
  result.energy_dt = std::max(s.window / s.n_sub, s.dt_b);

  const double e0 = initial_energy(initial.u, initial.b, initial.mesh, p.kappa);
  result.ledger = EnergyLedger(e0);
  result.ledger.record(initial, p.kappa, 0.0, 0.0);
  result.states.push_back(initial);

  TrajectorySampler history(model.basis_ptr());
  history.append(initial.t, initial.u.coefficients);

  GalerkinState anchor = initial;
  std::vector<double> anchor_chi =
      model.phase_dependent_viscosity() ? phase_on_grid(model, anchor.t, history) : std::vector<double>{};
  {
    const NTerms n0 = apply_N(model, anchor.u.coefficients, anchor.b.coefficients, anchor.mesh, anchor_chi);
    const double bound = n_bound(model, anchor.u.coefficients, anchor.b.coefficients, anchor.mesh);
    result.n_bound_ratios.push_back(bound > 0.0 ? n0.total().norm() / bound : 0.0);
  }

  double delta = s.window;
  if (s.smallness_window) delta = std::min(delta, result.smallness_window);
  double omega = s.relaxation;
  const Coefficients u0 = initial.u.coefficients;
  Coefficients integral = Coefficients::Zero(u0.size());
  const double t_end = initial.t + T;
  const double eps = 1e-12 * std::max(1.0, t_end);

  while (t_end - anchor.t > eps) {
    const double len = std::min(delta, t_end - anchor.t);
    WindowSolve ws;
    try {
      ws = fixed_point_window_impl(model, anchor, history, len, s.n_sub, s.tol, s.max_iter, omega,
                                   &anchor_chi);
    } catch (const WindowFailure& failure) {
      ++result.window_failures;
      if (result.window_failures % 2 == 1) {
        omega *= 0.5;
        ++result.omega_halvings;
      } else {
        delta *= 0.5;
        ++result.delta_halvings;
      }
      if (delta < s.min_window) {
        std::ostringstream msg;
        msg << "hard non-convergence at t = " << anchor.t << ": window " << delta << " below minimum "
            << s.min_window << " after " << result.window_failures << " failures (" << failure.what() << ")";
        throw NonConvergenceError(msg.str());
      }
      continue;
    }

    const std::size_t n = ws.t_grid.size();
    for (std::size_t i = 1; i < n; ++i) {
      const double h = ws.t_grid[i] - ws.t_grid[i - 1];
      integral += (0.5 * h) * (ws.terms[i - 1].total() + ws.terms[i].total());
      result.galerkin_residual =
          std::max(result.galerkin_residual, (ws.u_trajectory[i] - u0 - integral).cwiseAbs().maxCoeff());

      GalerkinState st{ws.t_grid[i], SpectralField{model.basis_ptr(), ws.u_trajectory[i]},
                       SpectralField{model.basis_ptr(), ws.dependents.magnetic.fields[i]},
                       ws.dependents.meshes[i]};
      const double viscous = 0.5 * h * (ws.terms[i - 1].dissipation + ws.terms[i].dissipation);
      result.ledger.record(st, p.kappa, viscous, ws.dependents.magnetic.resistive[i]);

      const double bound = n_bound(model, st.u.coefficients, st.b.coefficients, st.mesh);
      result.n_bound_ratios.push_back(bound > 0.0 ? ws.terms[i].total().norm() / bound : 0.0);
      history.append(ws.t_grid[i], ws.u_trajectory[i]);
      if (i + 1 == n) anchor = std::move(st);
    }
    anchor_chi = ws.dependents.chi.back();
    if (s.remesh && anchor.mesh.dim == 2) anchor.mesh = resample_polygon(anchor.mesh);

    result.windows.push_back({ws.t_grid.front(), len, ws.iterations, ws.certificate, omega});
    result.states.push_back(anchor);
    if (on_window) on_window(anchor);
  }
  return result;
}

}  // namespace varimhd
