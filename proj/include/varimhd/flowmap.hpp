#pragma once

#include "varimhd/basis.hpp"

#include <functional>
#include <vector>

namespace varimhd {

/// Time-dependent velocity field t, x -> u(t, x) with its Jacobian.
class VelocitySampler {
 public:
  virtual ~VelocitySampler() = default;
  virtual int dim() const = 0;
  virtual Vec3 velocity(double t, const Vec3& x) const = 0;
  virtual Mat3 gradient(double t, const Vec3& x) const = 0;
  virtual void velocity_and_gradient(double t, const Vec3& x, Vec3& v, Mat3& g) const {
    v = velocity(t, x);
    g = gradient(t, x);
  }
};

/// Steady spectral field.
class FieldSampler final : public VelocitySampler {
 public:
  explicit FieldSampler(SpectralField field) : field_(std::move(field)) {}
  int dim() const override { return field_.dim(); }
  Vec3 velocity(double t, const Vec3& x) const override;
  Mat3 gradient(double t, const Vec3& x) const override;
  void velocity_and_gradient(double t, const Vec3& x, Vec3& v, Mat3& g) const override;
  const SpectralField& field() const { return field_; }

 private:
  SpectralField field_;
};

/// Piecewise-linear-in-time trajectory of coefficient vectors. Linear
/// interpolation of coefficients keeps every intermediate field divergence
/// free. Outside [front, back] the end values are held.
class TrajectorySampler final : public VelocitySampler {
 public:
  explicit TrajectorySampler(BasisPtr basis) : basis_(std::move(basis)) {}
  TrajectorySampler(BasisPtr basis, std::vector<double> times, std::vector<Coefficients> coeffs);

  /// Appends a knot; `t` must not precede the last knot. A knot at the same
  /// time as the last one replaces it.
  void append(double t, Coefficients c);
  void append(const TrajectorySampler& other);

  int dim() const override { return basis_->dim(); }
  Vec3 velocity(double t, const Vec3& x) const override;
  Mat3 gradient(double t, const Vec3& x) const override;
  void velocity_and_gradient(double t, const Vec3& x, Vec3& v, Mat3& g) const override;

  Coefficients coefficients_at(double t) const;
  const BasisPtr& basis() const { return basis_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Coefficients>& knots() const { return coeffs_; }
  bool empty() const { return times_.empty(); }

 private:
  // Index i and weight s such that the value is (1-s) knot[i] + s knot[i+1].
  void locate(double t, std::size_t& i, double& s) const;

  BasisPtr basis_;
  std::vector<double> times_;
  std::vector<Coefficients> coeffs_;
};

/// Closed-form test fields.
class AnalyticSampler final : public VelocitySampler {
 public:
  using ValueFn = std::function<Vec3(double, const Vec3&)>;
  using GradientFn = std::function<Mat3(double, const Vec3&)>;
  AnalyticSampler(int dim, ValueFn value, GradientFn gradient)
      : dim_(dim), value_(std::move(value)), gradient_(std::move(gradient)) {}
  int dim() const override { return dim_; }
  Vec3 velocity(double t, const Vec3& x) const override { return value_(t, x); }
  Mat3 gradient(double t, const Vec3& x) const override { return gradient_(t, x); }

 private:
  int dim_;
  ValueFn value_;
  GradientFn gradient_;
};

AnalyticSampler zero_velocity(int dim);

struct ParticleCloud {
  std::vector<Vec3> positions;
  double t = 0.0;
};

/// Wraps x into [0, period)^d.
Vec3 wrap(const Vec3& x, int dim, double period = kTwoPi);

/// Integrates dX/dt = u(t, X) from t0 to t1 (either direction) with fixed
/// step RK4; the last step is shortened to land on t1. No wrapping.
Vec3 integrate(const Vec3& x, double t0, double t1, const VelocitySampler& u, double h);

/// Positions advanced to t1 and wrapped into the periodic cell.
ParticleCloud advance(const ParticleCloud& cloud, const VelocitySampler& u, double t1, double h,
                      double period = kTwoPi);

/// X_t^{-1}(x): the point at time t0 (default 0) that the flow carries to x at time t.
Vec3 backtrace(const Vec3& x, double t, const VelocitySampler& u, double h, double t0 = 0.0);

/// Position and deformation gradient dX_{t}/dx at x0, integrating the
/// variational equation alongside the trajectory from t0.
struct FlowJacobian {
  Vec3 position;
  Mat3 jacobian;
};
FlowJacobian flow_jacobian(const Vec3& x0, const VelocitySampler& u, double t, double h,
                           double t0 = 0.0);

inline Mat3 jacobian(const Vec3& x0, const VelocitySampler& u, double t, double h) {
  return flow_jacobian(x0, u, t, h).jacobian;
}

}  // namespace varimhd
