#pragma once

#include "varimhd/flowmap.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace varimhd {

/// Analytic initial region: axis-aligned ellipse (d = 2) or ellipsoid (d = 3).
/// A disk or ball has equal semi-axes.
struct InitialPhase {
  int dim = 2;
  Vec3 center = Vec3::Zero();
  Vec3 semi_axes = Vec3::Ones();

  static InitialPhase disk(const Vec3& center, double radius);
  static InitialPhase ball(const Vec3& center, double radius);

  /// Membership of a point already reduced to the periodic cell.
  bool contains(const Vec3& x) const;
  double min_semi_axis() const;
  /// Throws InputError unless the closure lies inside the open cell with a
  /// margin of at least min_semi_axis()/10.
  void validate(double period = kTwoPi) const;
};

/// Closed oriented Lagrangian mesh: a polygon of segments (d = 2) or a
/// triangulated surface (d = 3). Vertices are not wrapped into the cell.
struct InterfaceMesh {
  int dim = 2;
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> elements;  // 2D uses the first two entries
  double t = 0.0;

  std::size_t size() const { return elements.size(); }
  double element_measure(std::size_t e) const;
  Vec3 element_centroid(std::size_t e) const;
  /// Unit outward normal; throws MeshQualityError on a degenerate element.
  Vec3 element_normal(std::size_t e) const;
};

/// nu(chi) = nu_plus * chi + nu_minus * (1 - chi).
struct PhaseViscosity {
  double nu_plus = 0.0;
  double nu_minus = 0.0;
  double operator()(double chi) const { return nu_plus * chi + nu_minus * (1.0 - chi); }
  double min() const { return std::min(nu_plus, nu_minus); }
  double max() const { return std::max(nu_plus, nu_minus); }
};

inline constexpr double kMinElementMeasure = 1e-12;

/// 2D: `resolution` vertices (>= 8) on the ellipse. 3D: icosphere with
/// `resolution` subdivision levels (>= 1) mapped onto the ellipsoid.
InterfaceMesh mesh_initial(const InitialPhase& phase, int resolution, double period = kTwoPi);

/// Closedness, element measures and positive orientation.
void validate_mesh(const InterfaceMesh& mesh);

/// Vertices transported by the flow map to t1.
InterfaceMesh advect(const InterfaceMesh& mesh, const VelocitySampler& u, double t1, double h);

/// chi(x, t) = chi_0(X_t^{-1}(x)) by back-tracing to time 0.
int indicator(const Vec3& x, double t, const VelocitySampler& u, const InitialPhase& phase, double h,
              double period = kTwoPi);

/// Point-in-mesh test (winding number over the nearby periodic images).
int geometric_indicator(const Vec3& x, const InterfaceMesh& mesh, double period = kTwoPi);

double perimeter(const InterfaceMesh& mesh);
std::vector<Vec3> normals(const InterfaceMesh& mesh);
double enclosed_volume(const InterfaceMesh& mesh);
double max_edge_length(const InterfaceMesh& mesh);

/// (I - n n^T) : J restricted to the leading dim x dim block.
double tangential_trace(const Mat3& jacobian, const Vec3& n, int dim);

using GradientField = std::function<Mat3(const Vec3&)>;

/// Element-centroid quadrature of int P_tau : grad eta d|grad chi|.
double curvature_pairing(const InterfaceMesh& mesh, const GradientField& grad_eta);

/// Uniform arc-length resampling of a polygon with the same vertex count.
InterfaceMesh resample_polygon(const InterfaceMesh& mesh);

std::string interface_filename(double t, int dim);
/// Writes CSV polyline (2D, columns x,y) or Wavefront OBJ (3D).
void write_mesh(const InterfaceMesh& mesh, const std::filesystem::path& path);

}  // namespace varimhd
