#include "varimhd/basis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <tuple>

namespace varimhd {

namespace {

// First nonzero component positive: one representative per {k, -k} pair.
bool canonical(const Vec3i& k) {
  for (int a = 0; a < 3; ++a) {
    if (k[a] != 0) return k[a] > 0;
  }
  return false;
}

std::array<Vec3, 2> polarizations(const Vec3i& k, int dim) {
  const Vec3 kd = k.cast<double>();
  if (dim == 2) {
    return {Vec3(-kd[1], kd[0], 0.0).normalized(), Vec3::Zero()};
  }
  // Cross with the coordinate axis least aligned with k.
  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (std::abs(k[a]) < std::abs(k[axis])) axis = a;
  }
  const Vec3 first = kd.cross(Vec3::Unit(axis)).normalized();
  const Vec3 second = kd.normalized().cross(first).normalized();
  return {first, second};
}

// Per-axis exp(i m theta), m = -kmax..kmax, theta = 2 pi x / L.
using AxisTable = std::vector<std::complex<double>>;

void axis_exponentials(double theta, int kmax, AxisTable& out) {
  out.assign(2 * kmax + 1, {1.0, 0.0});
  const std::complex<double> e1 = std::polar(1.0, theta);
  std::complex<double> z{1.0, 0.0};
  for (int m = 1; m <= kmax; ++m) {
    z *= e1;
    out[kmax + m] = z;
    out[kmax - m] = std::conj(z);
  }
}

}  // namespace

std::vector<BasisMode> enumerate_modes(int dim, int kmax, double period) {
  if (dim != 2 && dim != 3) {
    throw InputError("basis dimension must be 2 or 3, got " + std::to_string(dim));
  }
  if (kmax < 1) throw InputError("basis kmax must be >= 1, got " + std::to_string(kmax));
  if (!(period > 0.0)) throw InputError("basis period must be positive");

  std::vector<Vec3i> waves;
  const int kz = dim == 3 ? kmax : 0;
  for (int i = -kmax; i <= kmax; ++i) {
    for (int j = -kmax; j <= kmax; ++j) {
      for (int l = -kz; l <= kz; ++l) {
        const Vec3i k(i, j, l);
        if (canonical(k)) waves.push_back(k);
      }
    }
  }
  std::sort(waves.begin(), waves.end(), [](const Vec3i& a, const Vec3i& b) {
    return std::make_tuple(a.squaredNorm(), a[0], a[1], a[2]) <
           std::make_tuple(b.squaredNorm(), b[0], b[1], b[2]);
  });

  const double volume = std::pow(period, dim);
  const double normalization = std::sqrt(2.0 / volume);
  const double scale = kTwoPi / period;

  std::vector<BasisMode> modes;
  modes.reserve(waves.size() * 2 * (dim - 1));
  for (std::size_t w = 0; w < waves.size(); ++w) {
    const auto pols = polarizations(waves[w], dim);
    for (int p = 0; p < dim - 1; ++p) {
      for (Phase phase : {Phase::Cosine, Phase::Sine}) {
        BasisMode m;
        m.wavevector = waves[w];
        m.phase = phase;
        m.polarization = p;
        m.direction = pols[p];
        m.normalization = normalization;
        m.wave_index = w;
        m.frequency = scale * waves[w].cast<double>();
        modes.push_back(m);
      }
    }
  }
  return modes;
}

Basis::Basis(int dim, int kmax, double period)
    : dim_(dim), kmax_(kmax), period_(period), modes_(enumerate_modes(dim, kmax, period)) {
  const std::size_t per = modes_per_wave();
  waves_.reserve(modes_.size() / per);
  for (std::size_t j = 0; j < modes_.size(); j += per) waves_.push_back(modes_[j].wavevector);
}

double Basis::volume() const { return std::pow(period_, dim_); }

void Basis::phases(const Vec3& x, double* cos_kx, double* sin_kx) const {
  thread_local std::array<AxisTable, 3> axes;
  for (int a = 0; a < dim_; ++a) axis_exponentials(kTwoPi * x[a] / period_, kmax_, axes[a]);
  const int off = kmax_;
  for (std::size_t w = 0; w < waves_.size(); ++w) {
    const Vec3i& k = waves_[w];
    std::complex<double> z = axes[0][k[0] + off] * axes[1][k[1] + off];
    if (dim_ == 3) z *= axes[2][k[2] + off];
    cos_kx[w] = z.real();
    sin_kx[w] = z.imag();
  }
}

Eigen::VectorXd Basis::eigenvalues() const {
  Eigen::VectorXd ev(modes_.size());
  for (std::size_t j = 0; j < modes_.size(); ++j) ev[j] = modes_[j].eigenvalue();
  return ev;
}

double Basis::max_frequency() const {
  double m = 0.0;
  for (const auto& mode : modes_) m = std::max(m, mode.frequency.norm());
  return m;
}

BasisPtr make_basis(int dim, int kmax, double period) {
  return std::make_shared<const Basis>(dim, kmax, period);
}

SpectralField SpectralField::zero(BasisPtr b) {
  const auto n = static_cast<Eigen::Index>(b->size());
  return {std::move(b), Coefficients::Zero(n)};
}

SpectralField SpectralField::from(BasisPtr b, Coefficients c) {
  if (static_cast<std::size_t>(c.size()) != b->size()) {
    throw InputError("coefficient count " + std::to_string(c.size()) + " does not match basis size " +
                     std::to_string(b->size()));
  }
  return {std::move(b), std::move(c)};
}

void synthesize(const Basis& basis, const Coefficients& coeffs, const Vec3& x, Vec3* value,
                Mat3* gradient, const Coefficients* coeffs_b, double wa, double wb) {
  thread_local std::vector<double> cs, sn;
  const std::size_t nw = basis.wavevectors().size();
  cs.resize(nw);
  sn.resize(nw);
  basis.phases(x, cs.data(), sn.data());

  Vec3 v = Vec3::Zero();
  Mat3 g = Mat3::Zero();
  const std::size_t per = basis.modes_per_wave();
  const auto& modes = basis.modes();
  for (std::size_t w = 0; w < nw; ++w) {
    Vec3 gw = Vec3::Zero();  // sum of direction * (d/dphase amplitude)
    for (std::size_t p = 0; p < per; p += 2) {
      const std::size_t jc = w * per + p;
      double ac = coeffs[jc];
      double as = coeffs[jc + 1];
      if (coeffs_b != nullptr) {
        ac = wa * ac + wb * (*coeffs_b)[jc];
        as = wa * as + wb * (*coeffs_b)[jc + 1];
      }
      const BasisMode& m = modes[jc];
      if (value != nullptr) v += (m.normalization * (ac * cs[w] + as * sn[w])) * m.direction;
      if (gradient != nullptr) gw += (m.normalization * (as * cs[w] - ac * sn[w])) * m.direction;
    }
    if (gradient != nullptr) g.noalias() += gw * modes[w * per].frequency.transpose();
  }
  if (value != nullptr) *value = v;
  if (gradient != nullptr) *gradient = g;
}

Vec3 evaluate(const SpectralField& field, const Vec3& x) {
  Vec3 v;
  synthesize(*field.basis, field.coefficients, x, &v, nullptr);
  return v;
}

Mat3 evaluate_gradient(const SpectralField& field, const Vec3& x) {
  Mat3 g;
  synthesize(*field.basis, field.coefficients, x, nullptr, &g);
  return g;
}

Vec3 evaluate_mode(const Basis& basis, std::size_t j, const Vec3& x) {
  const BasisMode& m = basis[j];
  const double arg = m.frequency.dot(x);
  const double s = m.phase == Phase::Cosine ? std::cos(arg) : std::sin(arg);
  return m.normalization * s * m.direction;
}

Mat3 evaluate_mode_gradient(const Basis& basis, std::size_t j, const Vec3& x) {
  const BasisMode& m = basis[j];
  const double arg = m.frequency.dot(x);
  const double g = m.phase == Phase::Cosine ? -std::sin(arg) : std::cos(arg);
  return (m.normalization * g) * m.direction * m.frequency.transpose();
}

QuadratureGrid::QuadratureGrid(BasisPtr basis, int order) : basis_(std::move(basis)), order_(order) {
  if (order_ < 1) throw InputError("quadrature order must be positive");
  const int dim = basis_->dim();
  const double h = basis_->period() / order_;
  const int nz = dim == 3 ? order_ : 1;
  points_.reserve(static_cast<std::size_t>(order_) * order_ * nz);
  for (int i = 0; i < order_; ++i) {
    for (int j = 0; j < order_; ++j) {
      for (int l = 0; l < nz; ++l) points_.emplace_back(i * h, j * h, dim == 3 ? l * h : 0.0);
    }
  }
  weight_ = basis_->volume() / static_cast<double>(points_.size());

  const auto nw = static_cast<Eigen::Index>(basis_->wavevectors().size());
  const auto np = static_cast<Eigen::Index>(points_.size());
  // Row-major access per point: store transposed (wavevector-major columns per point).
  cos_.resize(nw, np);
  sin_.resize(nw, np);
  for (Eigen::Index q = 0; q < np; ++q) {
    basis_->phases(points_[q], cos_.col(q).data(), sin_.col(q).data());
  }
  cos_.transposeInPlace();
  sin_.transposeInPlace();
}

namespace {

using RowMat3 = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using RowMat9 = Eigen::Matrix<double, Eigen::Dynamic, 9, Eigen::RowMajor>;

}  // namespace

void sample_on_grid(const QuadratureGrid& grid, const Coefficients& coeffs, std::vector<Vec3>* values,
                    std::vector<Mat3>* gradients) {
  const Basis& basis = grid.basis();
  const auto np = static_cast<Eigen::Index>(grid.size());
  const std::size_t nw = basis.wavevectors().size();
  const std::size_t per = basis.modes_per_wave();
  const auto& modes = basis.modes();

  // Column a: sum over polarizations of N * coefficient * direction_a; the
  // gradient columns 3 + a + 3b additionally carry frequency_b.
  Eigen::MatrixXd wc = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nw), 12);
  Eigen::MatrixXd ws = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nw), 12);
  for (std::size_t w = 0; w < nw; ++w) {
    Vec3 vc = Vec3::Zero();
    Vec3 vs = Vec3::Zero();
    for (std::size_t p = 0; p < per; p += 2) {
      const std::size_t jc = w * per + p;
      const BasisMode& m = modes[jc];
      vc += m.normalization * coeffs[static_cast<Eigen::Index>(jc)] * m.direction;
      vs += m.normalization * coeffs[static_cast<Eigen::Index>(jc + 1)] * m.direction;
    }
    const Vec3& f = modes[w * per].frequency;
    const auto row = static_cast<Eigen::Index>(w);
    for (int a = 0; a < 3; ++a) {
      wc(row, a) = vc[a];
      ws(row, a) = vs[a];
      for (int b = 0; b < 3; ++b) {
        wc(row, 3 + a + 3 * b) = vs[a] * f[b];
        ws(row, 3 + a + 3 * b) = -vc[a] * f[b];
      }
    }
  }

  Eigen::MatrixXd out(np, 12);
  out.noalias() = grid.cos_table().matrix() * wc;
  out.noalias() += grid.sin_table().matrix() * ws;

  if (values != nullptr) {
    values->resize(static_cast<std::size_t>(np));
    Eigen::Map<RowMat3>(values->front().data(), np, 3) = out.leftCols(3);
  }
  if (gradients != nullptr) {
    gradients->resize(static_cast<std::size_t>(np));
    Eigen::Map<RowMat9>(gradients->front().data(), np, 9) = out.rightCols(9);
  }
}

Coefficients pair_with_modes(const QuadratureGrid& grid, const std::vector<Vec3>& values) {
  const Basis& basis = grid.basis();
  const std::size_t nw = basis.wavevectors().size();
  const std::size_t per = basis.modes_per_wave();
  const auto& modes = basis.modes();
  const auto np = static_cast<Eigen::Index>(values.size());
  const Eigen::Map<const RowMat3> v(values.front().data(), np, 3);

  const Eigen::MatrixXd pc = grid.cos_table().matrix().transpose() * v;
  const Eigen::MatrixXd ps = grid.sin_table().matrix().transpose() * v;

  Coefficients out(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t w = 0; w < nw; ++w) {
    const auto row = static_cast<Eigen::Index>(w);
    for (std::size_t p = 0; p < per; p += 2) {
      const std::size_t jc = w * per + p;
      const BasisMode& m = modes[jc];
      const double scale = grid.weight() * m.normalization;
      out[static_cast<Eigen::Index>(jc)] = scale * pc.row(row).dot(m.direction.transpose());
      out[static_cast<Eigen::Index>(jc + 1)] = scale * ps.row(row).dot(m.direction.transpose());
    }
  }
  return out;
}

Coefficients pair_with_mode_gradients(const QuadratureGrid& grid, const std::vector<Mat3>& tensors) {
  const Basis& basis = grid.basis();
  const std::size_t nw = basis.wavevectors().size();
  const std::size_t per = basis.modes_per_wave();
  const auto& modes = basis.modes();
  const auto np = static_cast<Eigen::Index>(tensors.size());
  const Eigen::Map<const RowMat9> m9(tensors.front().data(), np, 9);

  // J_eta = g(x) direction frequency^T with g = -N sin (cosine mode) or
  // N cos (sine mode), so M : J_eta = g(x) direction^T M frequency.
  const Eigen::MatrixXd ms = grid.sin_table().matrix().transpose() * m9;
  const Eigen::MatrixXd mc = grid.cos_table().matrix().transpose() * m9;

  Coefficients out(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t w = 0; w < nw; ++w) {
    const auto row = static_cast<Eigen::Index>(w);
    const Mat3 sum_s = Eigen::Map<const Mat3>(Eigen::RowVectorXd(ms.row(row)).data());
    const Mat3 sum_c = Eigen::Map<const Mat3>(Eigen::RowVectorXd(mc.row(row)).data());
    const Vec3& f = modes[w * per].frequency;
    const Vec3 sf = sum_s * f;
    const Vec3 cf = sum_c * f;
    for (std::size_t p = 0; p < per; p += 2) {
      const std::size_t jc = w * per + p;
      const BasisMode& m = modes[jc];
      const double scale = grid.weight() * m.normalization;
      out[static_cast<Eigen::Index>(jc)] = -scale * m.direction.dot(sf);
      out[static_cast<Eigen::Index>(jc + 1)] = scale * m.direction.dot(cf);
    }
  }
  return out;
}

SpectralField project_L2(const VectorSampler& sampler, BasisPtr basis, int order,
                         std::vector<std::string>* warnings) {
  if (order < 2 * basis->kmax() + 1 && warnings != nullptr) {
    std::ostringstream msg;
    msg << "quadrature order " << order << " is below 2*kmax+1 = " << 2 * basis->kmax() + 1
        << "; projection is not exact on basis-resolved fields";
    warnings->push_back(msg.str());
  }
  const QuadratureGrid grid(basis, order);
  std::vector<Vec3> values(grid.size());
  for (std::size_t q = 0; q < grid.size(); ++q) {
    values[q] = sampler(grid.point(q));
    if (basis->dim() == 2) values[q][2] = 0.0;
  }
  return {basis, pair_with_modes(grid, values)};
}

Eigen::MatrixXd gram_matrix(BasisPtr basis, int order) {
  const QuadratureGrid grid(basis, order);
  const int dim = basis->dim();
  const auto n = static_cast<Eigen::Index>(basis->size());
  const auto np = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd phi(np * dim, n);
  for (Eigen::Index q = 0; q < np; ++q) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const BasisMode& m = (*basis)[static_cast<std::size_t>(j)];
      const auto w = static_cast<Eigen::Index>(m.wave_index);
      const double s = m.phase == Phase::Cosine ? grid.cos_table()(q, w) : grid.sin_table()(q, w);
      for (int a = 0; a < dim; ++a) phi(q * dim + a, j) = m.normalization * s * m.direction[a];
    }
  }
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(phi.transpose(), grid.weight());
  return gram.selfadjointView<Eigen::Lower>();
}

}  // namespace varimhd
