#pragma once

#include "varimhd/energy.hpp"
#include "varimhd/induction.hpp"
#include "varimhd/interface.hpp"

#include <functional>
#include <vector>

namespace varimhd {

struct PhysicalParams {
  double nu_plus = 0.1;
  double nu_minus = 0.1;
  double sigma = 0.1;
  double kappa = 0.0;

  PhaseViscosity viscosity() const { return {nu_plus, nu_minus}; }
  /// Throws InputError on negative coefficients or sigma <= 0.
  void validate() const;
};

struct SolverSettings {
  double window = 0.1;  // initial window length
  int n_sub = 8;
  double tol = 1e-8;
  int max_iter = 100;
  double relaxation = 1.0;
  double h_flow = 1e-2;
  double dt_b = 1e-3;
  int mesh_resolution = 128;
  double min_window = 1e-6;
  bool smallness_window = false;  // cap the first window by the a priori bound
  bool remesh = false;            // 2D uniform resampling at window ends

  void validate() const;
};

/// Immutable problem data shared by every Galerkin operation.
class GalerkinModel {
 public:
  GalerkinModel(GridPtr grid, InitialPhase phase, PhysicalParams params, SolverSettings settings);

  const Basis& basis() const { return grid_->basis(); }
  const BasisPtr& basis_ptr() const { return grid_->basis_ptr(); }
  const QuadratureGrid& grid() const { return *grid_; }
  const InitialPhase& phase() const { return phase_; }
  const PhysicalParams& params() const { return params_; }
  const SolverSettings& settings() const { return settings_; }

  /// Frozen constant C of |N| <= C (|u|^2 + |u| + |B|^2 + |chi|_BV), an upper
  /// bound derived from the basis and the coefficients.
  double n_bound_constant() const { return n_bound_constant_; }

  /// True when the viscosity depends on the phase (the indicator is needed).
  bool phase_dependent_viscosity() const { return params_.nu_plus != params_.nu_minus; }

 private:
  GridPtr grid_;
  InitialPhase phase_;
  PhysicalParams params_;
  SolverSettings settings_;
  double n_bound_constant_ = 0.0;
};

/// The four parts of <N(u, chi, B), eta_j>.
struct NTerms {
  Coefficients inertia;    //  (u (x) u, grad eta)
  Coefficients lorentz;    // -(B (x) B, grad eta)
  Coefficients viscous;    // -2 (nu(chi) Du, D eta)
  Coefficients capillary;  // -kappa int P_tau : grad eta d|grad chi|
  double dissipation = 0.0;    // 2 (nu(chi) Du, Du)
  double lorentz_power = 0.0;  // (B (x) B, grad u)

  Coefficients total() const { return inertia + lorentz + viscous + capillary; }
};

/// int P_tau : grad eta_j d|grad chi| for every mode j (element-centroid rule).
Coefficients curvature_pairing_modes(const InterfaceMesh& mesh, const Basis& basis);

/// chi(x_q, t) at every quadrature point by back-tracing along `history`.
std::vector<double> phase_on_grid(const GalerkinModel& model, double t, const VelocitySampler& history);

/// N evaluated with the indicator values chi (one per grid point; ignored
/// when the viscosity is phase independent).
NTerms apply_N(const GalerkinModel& model, const Coefficients& u, const Coefficients& b,
               const InterfaceMesh& mesh, const std::vector<double>& chi);
NTerms apply_N(const GalerkinModel& model, const GalerkinState& state, const VelocitySampler& history);

/// 2 (nu(chi) Du, Du) by grid quadrature.
double dissipation_rate(const GalerkinModel& model, const Coefficients& u, const std::vector<double>& chi);

/// C * (|u|^2 + |u| + |B|^2 + |chi|_BV) with |chi|_BV = volume + perimeter.
double n_bound(const GalerkinModel& model, const Coefficients& u, const Coefficients& b,
               const InterfaceMesh& mesh);

/// Window length R'/C(R') maximizing the a priori smallness condition
/// |u0| + C(R) T < R over R.
double smallness_window(const GalerkinModel& model, const GalerkinState& anchor);

/// B(u), chi(u) and the mesh along a window, all computed from one input
/// velocity trajectory.
struct WindowDependents {
  MagneticTrajectory magnetic;
  std::vector<InterfaceMesh> meshes;
  std::vector<std::vector<double>> chi;
};

struct KResult {
  std::vector<Coefficients> image;
  std::vector<NTerms> terms;
  WindowDependents dependents;
};

/// K(u)(t) = u_anchor + int_{t_m}^t N ds (composite trapezoid on t_grid).
/// `history` carries the accepted velocity on [0, t_m].
KResult apply_K(const GalerkinModel& model, const std::vector<double>& t_grid,
                const std::vector<Coefficients>& u_traj, const GalerkinState& anchor,
                const TrajectorySampler& history);

/// K(u)(t_i) from precomputed N values: anchor + cumulative trapezoid.
std::vector<Coefficients> integrate_trapezoid(const Coefficients& anchor, const std::vector<double>& t_grid,
                                              const std::vector<Coefficients>& n_values);

struct WindowSolve {
  std::vector<double> t_grid;
  std::vector<Coefficients> u_trajectory;
  std::vector<NTerms> terms;
  WindowDependents dependents;
  int iterations = 0;
  std::vector<double> residual_history;
  double certificate = 0.0;  // sup_t |u - K(u)| of the returned trajectory
};

/// Damped Picard iteration u <- (1 - omega) u + omega K(u) on
/// [anchor.t, anchor.t + delta]. Throws WindowFailure when max_iter is
/// exhausted or the iterates blow up.
WindowSolve fixed_point_window(const GalerkinModel& model, const GalerkinState& anchor,
                               const TrajectorySampler& history, double delta, int n_sub, double tol,
                               int max_iter, double omega);

struct WindowRecord {
  double t_start = 0.0;
  double delta = 0.0;
  int iterations = 0;
  double certificate = 0.0;
  double omega = 1.0;
};

struct RunResult {
  std::vector<GalerkinState> states;  // initial state and every accepted window end
  EnergyLedger ledger;
  std::vector<WindowRecord> windows;
  int window_failures = 0;
  int omega_halvings = 0;
  int delta_halvings = 0;
  double n_bound_constant = 0.0;
  std::vector<double> n_bound_ratios;  // |N| / bound at every sub-step
  double galerkin_residual = 0.0;      // max_{t,j} |u_j(t) - u_j(0) - int_0^t N_j|
  double smallness_window = 0.0;
  double energy_dt = 0.0;              // time-step scale entering the default tolerance

  const GalerkinState& final_state() const { return states.back(); }
};

using WindowObserver = std::function<void(const GalerkinState&)>;

/// Chains fixed-point windows from `initial` to time T.
RunResult run(const GalerkinModel& model, const GalerkinState& initial, double T,
              const WindowObserver& on_window = {});

}  // namespace varimhd
