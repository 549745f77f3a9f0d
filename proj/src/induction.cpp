#include "varimhd/induction.hpp"

#include <cmath>
#include <numeric>

namespace varimhd {

double MagneticTrajectory::resistive_total() const {
  return std::accumulate(resistive.begin(), resistive.end(), 0.0);
}

double MagneticTrajectory::transport_total() const {
  return std::accumulate(transport_work.begin(), transport_work.end(), 0.0);
}

Coefficients transport_pairing(const QuadratureGrid& grid, const Coefficients& u, const Coefficients& b) {
  std::vector<Vec3> uq, bq;
  sample_on_grid(grid, u, &uq, nullptr);
  sample_on_grid(grid, b, &bq, nullptr);
  std::vector<Mat3> m(grid.size());
  for (std::size_t q = 0; q < grid.size(); ++q) {
    m[q].noalias() = bq[q] * uq[q].transpose() - uq[q] * bq[q].transpose();
  }
  return pair_with_mode_gradients(grid, m);
}

double lorentz_power(const QuadratureGrid& grid, const Coefficients& u, const Coefficients& b) {
  std::vector<Mat3> ju;
  std::vector<Vec3> bq;
  sample_on_grid(grid, u, nullptr, &ju);
  sample_on_grid(grid, b, &bq, nullptr);
  double total = 0.0;
  for (std::size_t q = 0; q < grid.size(); ++q) total += bq[q].dot(ju[q] * bq[q]);
  return grid.weight() * total;
}

double dirichlet_energy(const Basis& basis, const Coefficients& c) {
  double e = 0.0;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const double cj = c[static_cast<Eigen::Index>(j)];
    e += basis[j].eigenvalue() * cj * cj;
  }
  return e;
}

namespace {

Coefficients imex_step(const Basis& basis, const Coefficients& b, const Coefficients& transport,
                       double sigma, double dt) {
  Coefficients next(b.size());
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    next[i] = (b[i] + dt * transport[i]) / (1.0 + sigma * basis[j].eigenvalue() * dt);
  }
  if (!next.allFinite()) throw NumericalError("non-finite magnetic coefficients in induction step");
  return next;
}

}  // namespace

SpectralField step_B(const SpectralField& b, const SpectralField& u, double sigma, double dt,
                     const QuadratureGrid& grid) {
  if (!(dt > 0.0)) throw InputError("induction step must be positive");
  const Coefficients t = transport_pairing(grid, u.coefficients, b.coefficients);
  if (!t.allFinite()) throw NumericalError("non-finite transport quadrature in induction step");
  return {b.basis, imex_step(*b.basis, b.coefficients, t, sigma, dt)};
}

MagneticTrajectory solve_B_at(const TrajectorySampler& u, const SpectralField& b0,
                              const std::vector<double>& knots, double dt, double sigma,
                              const QuadratureGrid& grid) {
  if (!(dt > 0.0)) throw InputError("induction step must be positive");
  if (knots.empty()) throw InputError("induction solve needs at least one knot");
  const Basis& basis = *b0.basis;
  MagneticTrajectory traj;
  traj.sigma = sigma;
  traj.times.push_back(knots.front());
  traj.fields.push_back(b0.coefficients);
  traj.resistive.push_back(0.0);
  traj.transport_work.push_back(0.0);

  Coefficients b = b0.coefficients;
  const bool quiescent_start = b.isZero(0.0);
  for (std::size_t k = 1; k < knots.size(); ++k) {
    const double len = knots[k] - knots[k - 1];
    if (!(len > 0.0)) throw InputError("induction knots must be strictly increasing");
    const int n = std::max(1, static_cast<int>(std::ceil(len / dt - 1e-9)));
    const double step = len / n;
    double resistive = 0.0;
    double work = 0.0;
    for (int s = 0; s < n; ++s) {
      if (quiescent_start && b.isZero(0.0)) continue;  // B = 0 is a fixed point
      const double t = knots[k - 1] + s * step;
      const Coefficients uc = u.coefficients_at(t);

      std::vector<Vec3> uq, bq;
      std::vector<Mat3> ju;
      sample_on_grid(grid, uc, &uq, &ju);
      sample_on_grid(grid, b, &bq, nullptr);
      std::vector<Mat3> m(grid.size());
      double power = 0.0;
      for (std::size_t q = 0; q < grid.size(); ++q) {
        m[q].noalias() = bq[q] * uq[q].transpose() - uq[q] * bq[q].transpose();
        power += bq[q].dot(ju[q] * bq[q]);
      }
      const Coefficients transport = pair_with_mode_gradients(grid, m);
      if (!transport.allFinite()) throw NumericalError("non-finite transport quadrature in induction step");
      b = imex_step(basis, b, transport, sigma, step);
      resistive += sigma * dirichlet_energy(basis, b) * step;
      work += grid.weight() * power * step;
    }
    traj.times.push_back(knots[k]);
    traj.fields.push_back(b);
    traj.resistive.push_back(resistive);
    traj.transport_work.push_back(work);
  }
  return traj;
}

MagneticTrajectory solve_B(const TrajectorySampler& u, const SpectralField& b0, double t0, double t1,
                           double dt, double sigma, const QuadratureGrid& grid) {
  if (!(dt > 0.0)) throw InputError("induction step must be positive");
  if (t1 < t0) throw InputError("induction end time precedes start time");
  std::vector<double> knots{t0};
  if (t1 > t0) {
    const int n = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt - 1e-9)));
    for (int s = 1; s < n; ++s) knots.push_back(t0 + s * dt);
    knots.push_back(t1);
  }
  return solve_B_at(u, b0, knots, dt, sigma, grid);
}

}  // namespace varimhd
