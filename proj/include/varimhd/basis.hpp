#pragma once

#include "varimhd/types.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace varimhd {

enum class Phase : int { Cosine = 0, Sine = 1 };

/// One real trigonometric divergence-free mode
///   eta(x) = normalization * direction * cos(k.x)   or   ... * sin(k.x)
/// on the periodic cell [0, L)^d.
struct BasisMode {
  Vec3i wavevector = Vec3i::Zero();
  Phase phase = Phase::Cosine;
  int polarization = 0;
  Vec3 direction = Vec3::Zero();  // unit, orthogonal to wavevector
  double normalization = 0.0;
  std::size_t wave_index = 0;  // position of wavevector in Basis::wavevectors()

  /// Scaled wavevector 2*pi*k/L, the one that actually enters the phase.
  Vec3 frequency = Vec3::Zero();

  /// Stokes eigenvalue |frequency|^2.
  double eigenvalue() const { return frequency.squaredNorm(); }
};

/// Modes with wavevectors in the canonical half-space, 0 < max|k_i| <= kmax,
/// ordered by (|k|^2, k, polarization, phase).
std::vector<BasisMode> enumerate_modes(int dim, int kmax, double period = kTwoPi);

/// Enumerated divergence-free basis together with the data needed for fast
/// synthesis (per-wavevector grouping).
class Basis {
 public:
  Basis(int dim, int kmax, double period = kTwoPi);

  int dim() const { return dim_; }
  int kmax() const { return kmax_; }
  double period() const { return period_; }
  double volume() const;
  std::size_t size() const { return modes_.size(); }

  const std::vector<BasisMode>& modes() const { return modes_; }
  const BasisMode& operator[](std::size_t j) const { return modes_[j]; }

  /// Distinct wavevectors in first-appearance order. The modes of wavevector
  /// w occupy indices [modes_per_wave()*w, modes_per_wave()*(w+1)).
  const std::vector<Vec3i>& wavevectors() const { return waves_; }
  std::size_t modes_per_wave() const { return 2 * static_cast<std::size_t>(dim_ - 1); }

  /// cos(k_w . x) and sin(k_w . x) for every wavevector.
  void phases(const Vec3& x, double* cos_kx, double* sin_kx) const;

  Eigen::VectorXd eigenvalues() const;
  double max_frequency() const;

 private:
  int dim_;
  int kmax_;
  double period_;
  std::vector<BasisMode> modes_;
  std::vector<Vec3i> waves_;
};

using BasisPtr = std::shared_ptr<const Basis>;

BasisPtr make_basis(int dim, int kmax, double period = kTwoPi);

/// Coefficient vector over a basis; the field it represents is divergence
/// free by construction.
struct SpectralField {
  BasisPtr basis;
  Coefficients coefficients;

  static SpectralField zero(BasisPtr b);
  static SpectralField from(BasisPtr b, Coefficients c);

  int dim() const { return basis->dim(); }
  /// L2 norm, equal to the Euclidean coefficient norm by orthonormality.
  double norm() const { return coefficients.norm(); }
};

/// Value and Jacobian (entry (i, j) = d u_i / d x_j) of the field spanned by
/// `coeffs`. Either output may be null. When `coeffs_b` is given the
/// coefficients used are wa*coeffs + wb*coeffs_b (time interpolation without
/// a temporary).
void synthesize(const Basis& basis, const Coefficients& coeffs, const Vec3& x, Vec3* value,
                Mat3* gradient, const Coefficients* coeffs_b = nullptr, double wa = 1.0,
                double wb = 0.0);

Vec3 evaluate(const SpectralField& field, const Vec3& x);
Mat3 evaluate_gradient(const SpectralField& field, const Vec3& x);

/// Value of a single basis mode at x.
Vec3 evaluate_mode(const Basis& basis, std::size_t j, const Vec3& x);
/// Jacobian of a single basis mode at x.
Mat3 evaluate_mode_gradient(const Basis& basis, std::size_t j, const Vec3& x);

/// Tensor-product uniform grid with Q points per axis. For periodic
/// integrands the trapezoidal rule is spectrally exact; products of two
/// basis-resolved fields are integrated exactly once Q >= 2*kmax + 1.
class QuadratureGrid {
 public:
  QuadratureGrid(BasisPtr basis, int order);

  const Basis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  int order() const { return order_; }
  std::size_t size() const { return points_.size(); }
  double weight() const { return weight_; }
  const Vec3& point(std::size_t q) const { return points_[q]; }
  const std::vector<Vec3>& points() const { return points_; }

  /// cos(k_w . x_q) laid out as row q, column w.
  const Eigen::ArrayXXd& cos_table() const { return cos_; }
  const Eigen::ArrayXXd& sin_table() const { return sin_; }

  /// True when Q >= 2*kmax + 1.
  bool resolves_products() const { return order_ >= 2 * basis_->kmax() + 1; }

 private:
  BasisPtr basis_;
  int order_;
  double weight_;
  std::vector<Vec3> points_;
  Eigen::ArrayXXd cos_;
  Eigen::ArrayXXd sin_;
};

using GridPtr = std::shared_ptr<const QuadratureGrid>;

/// Values (and optionally Jacobians) of the field `coeffs` at every grid point.
void sample_on_grid(const QuadratureGrid& grid, const Coefficients& coeffs,
                    std::vector<Vec3>* values, std::vector<Mat3>* gradients);

/// (f, eta_j) for every mode j, with f given by its grid values.
Coefficients pair_with_modes(const QuadratureGrid& grid, const std::vector<Vec3>& values);

/// (M, grad eta_j) := sum_q w M(x_q) : J_{eta_j}(x_q) for every mode j, where
/// J is the Jacobian (d eta_a / d x_b) and ':' the Frobenius product.
Coefficients pair_with_mode_gradients(const QuadratureGrid& grid, const std::vector<Mat3>& tensors);

using VectorSampler = std::function<Vec3(const Vec3&)>;

/// Coefficients (sampler, eta_j) by quadrature of order Q. A quadrature order
/// below the product-resolving threshold appends a message to `warnings`.
SpectralField project_L2(const VectorSampler& sampler, BasisPtr basis, int order,
                         std::vector<std::string>* warnings = nullptr);

/// Quadrature Gram matrix (eta_i, eta_j).
Eigen::MatrixXd gram_matrix(BasisPtr basis, int order);

/// Basis specification embedded in a run configuration.
struct BasisSpec {
  int dimension = 2;
  int kmax = 2;
  int quadrature_order = 0;  // 0 selects 4*kmax

  int resolved_order() const { return quadrature_order > 0 ? quadrature_order : 4 * kmax; }
};

}  // namespace varimhd
