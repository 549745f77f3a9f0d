#pragma once

#include "varimhd/flowmap.hpp"

#include <vector>

namespace varimhd {

/// Magnetic field samples over time. resistive[i] and transport_work[i]
/// accumulate sigma*||grad B||^2 dt and (B (x) B, grad u) dt over
/// (times[i-1], times[i]]; entry 0 is zero.
struct MagneticTrajectory {
  std::vector<double> times;
  std::vector<Coefficients> fields;
  double sigma = 0.0;
  std::vector<double> resistive;
  std::vector<double> transport_work;

  double resistive_total() const;
  double transport_total() const;
};

/// (u (x) B - B (x) u, grad eta_j) for every mode j.
Coefficients transport_pairing(const QuadratureGrid& grid, const Coefficients& u, const Coefficients& b);

/// (B (x) B, grad u): the power exchanged between the flow and the field.
double lorentz_power(const QuadratureGrid& grid, const Coefficients& u, const Coefficients& b);

/// ||grad f||^2 = sum_j |k_j|^2 c_j^2.
double dirichlet_energy(const Basis& basis, const Coefficients& c);

/// One IMEX Euler step: explicit transport at the current time, implicit
/// (diagonal) diffusion.
SpectralField step_B(const SpectralField& b, const SpectralField& u, double sigma, double dt,
                     const QuadratureGrid& grid);

/// Chained step_B over [t0, t1] with step dt (the last step shortened),
/// recording every step.
MagneticTrajectory solve_B(const TrajectorySampler& u, const SpectralField& b0, double t0, double t1,
                           double dt, double sigma, const QuadratureGrid& grid);

/// Chained step_B recording only at the given increasing knots; each knot
/// interval is split into ceil(length/dt) equal steps.
MagneticTrajectory solve_B_at(const TrajectorySampler& u, const SpectralField& b0,
                              const std::vector<double>& knots, double dt, double sigma,
                              const QuadratureGrid& grid);

}  // namespace varimhd
