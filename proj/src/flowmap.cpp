#include "varimhd/flowmap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace varimhd {

Vec3 FieldSampler::velocity(double, const Vec3& x) const { return evaluate(field_, x); }

Mat3 FieldSampler::gradient(double, const Vec3& x) const { return evaluate_gradient(field_, x); }

void FieldSampler::velocity_and_gradient(double, const Vec3& x, Vec3& v, Mat3& g) const {
  synthesize(*field_.basis, field_.coefficients, x, &v, &g);
}

TrajectorySampler::TrajectorySampler(BasisPtr basis, std::vector<double> times,
                                     std::vector<Coefficients> coeffs)
    : basis_(std::move(basis)) {
  if (times.size() != coeffs.size()) throw InputError("trajectory times and knots differ in length");
  for (std::size_t i = 0; i < times.size(); ++i) append(times[i], std::move(coeffs[i]));
}

void TrajectorySampler::append(double t, Coefficients c) {
  if (static_cast<std::size_t>(c.size()) != basis_->size()) {
    throw InputError("trajectory knot does not match basis size");
  }
  if (!times_.empty()) {
    if (t < times_.back()) throw InputError("trajectory knots must be nondecreasing in time");
    if (t == times_.back()) {
      coeffs_.back() = std::move(c);
      return;
    }
  }
  times_.push_back(t);
  coeffs_.push_back(std::move(c));
}

void TrajectorySampler::append(const TrajectorySampler& other) {
  for (std::size_t i = 0; i < other.times_.size(); ++i) append(other.times_[i], other.coeffs_[i]);
}

void TrajectorySampler::locate(double t, std::size_t& i, double& s) const {
  if (times_.empty()) throw InputError("empty velocity trajectory");
  if (times_.size() == 1 || t <= times_.front()) {
    i = 0;
    s = 0.0;
    return;
  }
  if (t >= times_.back()) {
    i = times_.size() - 2;
    s = 1.0;
    return;
  }
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  i = static_cast<std::size_t>(it - times_.begin()) - 1;
  s = (t - times_[i]) / (times_[i + 1] - times_[i]);
}

Coefficients TrajectorySampler::coefficients_at(double t) const {
  std::size_t i;
  double s;
  locate(t, i, s);
  if (times_.size() == 1) return coeffs_[0];
  return (1.0 - s) * coeffs_[i] + s * coeffs_[i + 1];
}

Vec3 TrajectorySampler::velocity(double t, const Vec3& x) const {
  std::size_t i;
  double s;
  locate(t, i, s);
  Vec3 v;
  if (times_.size() == 1) {
    synthesize(*basis_, coeffs_[0], x, &v, nullptr);
  } else {
    synthesize(*basis_, coeffs_[i], x, &v, nullptr, &coeffs_[i + 1], 1.0 - s, s);
  }
  return v;
}

Mat3 TrajectorySampler::gradient(double t, const Vec3& x) const {
  std::size_t i;
  double s;
  locate(t, i, s);
  Mat3 g;
  if (times_.size() == 1) {
    synthesize(*basis_, coeffs_[0], x, nullptr, &g);
  } else {
    synthesize(*basis_, coeffs_[i], x, nullptr, &g, &coeffs_[i + 1], 1.0 - s, s);
  }
  return g;
}

void TrajectorySampler::velocity_and_gradient(double t, const Vec3& x, Vec3& v, Mat3& g) const {
  std::size_t i;
  double s;
  locate(t, i, s);
  if (times_.size() == 1) {
    synthesize(*basis_, coeffs_[0], x, &v, &g);
  } else {
    synthesize(*basis_, coeffs_[i], x, &v, &g, &coeffs_[i + 1], 1.0 - s, s);
  }
}

AnalyticSampler zero_velocity(int dim) {
  return AnalyticSampler(
      dim, [](double, const Vec3&) { return Vec3::Zero().eval(); },
      [](double, const Vec3&) { return Mat3::Zero().eval(); });
}

Vec3 wrap(const Vec3& x, int dim, double period) {
  Vec3 y = x;
  for (int a = 0; a < dim; ++a) {
    y[a] = std::fmod(y[a], period);
    if (y[a] < 0.0) y[a] += period;
    if (y[a] >= period) y[a] -= period;
  }
  return y;
}

namespace {

Vec3 checked_velocity(const VelocitySampler& u, double t, const Vec3& x) {
  const Vec3 v = u.velocity(t, x);
  if (!v.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite velocity at t = " << t << ", x = (" << x.transpose() << ")";
    throw IntegrationError(msg.str(), t, x);
  }
  return v;
}

// Step count and nominal signed step covering [t0, t1]; the last step is
// whatever remains.
int step_count(double t0, double t1, double h) {
  if (!(h > 0.0)) throw InputError("integration step must be positive");
  const double span = std::abs(t1 - t0);
  if (span == 0.0) return 0;
  return std::max(1, static_cast<int>(std::ceil(span / h - 1e-9)));
}

}  // namespace

Vec3 integrate(const Vec3& x, double t0, double t1, const VelocitySampler& u, double h) {
  const int n = step_count(t0, t1, h);
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  Vec3 y = x;
  double t = t0;
  for (int s = 0; s < n; ++s) {
    const double dt = s + 1 == n ? t1 - t : dir * h;
    const Vec3 k1 = checked_velocity(u, t, y);
    const Vec3 k2 = checked_velocity(u, t + 0.5 * dt, y + 0.5 * dt * k1);
    const Vec3 k3 = checked_velocity(u, t + 0.5 * dt, y + 0.5 * dt * k2);
    const Vec3 k4 = checked_velocity(u, t + dt, y + dt * k3);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = s + 1 == n ? t1 : t + dt;
  }
  return y;
}

ParticleCloud advance(const ParticleCloud& cloud, const VelocitySampler& u, double t1, double h,
                      double period) {
  if (t1 < cloud.t) throw InputError("advance target time precedes the cloud time");
  ParticleCloud out;
  out.t = t1;
  out.positions.resize(cloud.positions.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < cloud.positions.size(); ++i) {
    out.positions[i] = wrap(integrate(cloud.positions[i], cloud.t, t1, u, h), u.dim(), period);
  }
  return out;
}

Vec3 backtrace(const Vec3& x, double t, const VelocitySampler& u, double h, double t0) {
  return integrate(x, t, t0, u, h);
}

FlowJacobian flow_jacobian(const Vec3& x0, const VelocitySampler& u, double t, double h, double t0) {
  const int n = step_count(t0, t, h);
  const double dir = t >= t0 ? 1.0 : -1.0;
  Vec3 y = x0;
  Mat3 f = Mat3::Identity();
  double s_time = t0;
  auto rhs = [&](double tt, const Vec3& yy, const Mat3& ff, Vec3& dy, Mat3& df) {
    Mat3 g;
    u.velocity_and_gradient(tt, yy, dy, g);
    if (!dy.allFinite() || !g.allFinite()) {
      throw IntegrationError("non-finite velocity in variational equation", tt, yy);
    }
    df.noalias() = g * ff;
  };
  for (int s = 0; s < n; ++s) {
    const double dt = s + 1 == n ? t - s_time : dir * h;
    Vec3 k1, k2, k3, k4;
    Mat3 m1, m2, m3, m4;
    rhs(s_time, y, f, k1, m1);
    rhs(s_time + 0.5 * dt, y + 0.5 * dt * k1, f + 0.5 * dt * m1, k2, m2);
    rhs(s_time + 0.5 * dt, y + 0.5 * dt * k2, f + 0.5 * dt * m2, k3, m3);
    rhs(s_time + dt, y + dt * k3, f + dt * m3, k4, m4);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    f += (dt / 6.0) * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
    s_time = s + 1 == n ? t : s_time + dt;
  }
  return {y, f};
}

}  // namespace varimhd
