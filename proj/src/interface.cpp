#include "varimhd/interface.hpp"

#include "varimhd/io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace varimhd {

InitialPhase InitialPhase::disk(const Vec3& center, double radius) {
  return {2, Vec3(center[0], center[1], 0.0), Vec3(radius, radius, 1.0)};
}

InitialPhase InitialPhase::ball(const Vec3& center, double radius) {
  return {3, center, Vec3::Constant(radius)};
}

bool InitialPhase::contains(const Vec3& x) const {
  double r2 = 0.0;
  for (int a = 0; a < dim; ++a) {
    const double s = (x[a] - center[a]) / semi_axes[a];
    r2 += s * s;
  }
  return r2 < 1.0;
}

double InitialPhase::min_semi_axis() const { return semi_axes.head(dim).minCoeff(); }

void InitialPhase::validate(double period) const {
  if (dim != 2 && dim != 3) throw InputError("phase dimension must be 2 or 3");
  if (!(semi_axes.head(dim).minCoeff() > 0.0)) throw InputError("phase radii must be positive");
  const double margin = 0.1 * min_semi_axis();
  for (int a = 0; a < dim; ++a) {
    if (center[a] - semi_axes[a] < margin || center[a] + semi_axes[a] > period - margin) {
      std::ostringstream msg;
      msg << "initial phase is not strictly inside the cell: axis " << a << " spans ["
          << center[a] - semi_axes[a] << ", " << center[a] + semi_axes[a] << "], required margin "
          << margin << " inside [0, " << period << "]";
      throw InputError(msg.str());
    }
  }
}

double InterfaceMesh::element_measure(std::size_t e) const {
  const auto& el = elements[e];
  if (dim == 2) return (vertices[el[1]] - vertices[el[0]]).norm();
  return 0.5 * (vertices[el[1]] - vertices[el[0]]).cross(vertices[el[2]] - vertices[el[0]]).norm();
}

Vec3 InterfaceMesh::element_centroid(std::size_t e) const {
  const auto& el = elements[e];
  if (dim == 2) return 0.5 * (vertices[el[0]] + vertices[el[1]]);
  return (vertices[el[0]] + vertices[el[1]] + vertices[el[2]]) / 3.0;
}

Vec3 InterfaceMesh::element_normal(std::size_t e) const {
  const auto& el = elements[e];
  Vec3 n;
  if (dim == 2) {
    const Vec3 tangent = vertices[el[1]] - vertices[el[0]];
    n = Vec3(tangent[1], -tangent[0], 0.0);
  } else {
    n = (vertices[el[1]] - vertices[el[0]]).cross(vertices[el[2]] - vertices[el[0]]);
  }
  const double len = n.norm();
  if (!(len > kMinElementMeasure)) {
    throw MeshQualityError("degenerate interface element " + std::to_string(e),
                           static_cast<long>(e));
  }
  return n / len;
}

namespace {

InterfaceMesh polygon(const InitialPhase& phase, int n) {
  InterfaceMesh mesh;
  mesh.dim = 2;
  mesh.vertices.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double theta = kTwoPi * i / n;
    mesh.vertices.emplace_back(phase.center[0] + phase.semi_axes[0] * std::cos(theta),
                               phase.center[1] + phase.semi_axes[1] * std::sin(theta), 0.0);
  }
  for (int i = 0; i < n; ++i) mesh.elements.push_back({i, (i + 1) % n, 0});
  return mesh;
}

InterfaceMesh icosphere(const InitialPhase& phase, int levels) {
  const double g = 0.5 * (1.0 + std::sqrt(5.0));
  std::vector<Vec3> v = {{-1, g, 0}, {1, g, 0}, {-1, -g, 0}, {1, -g, 0}, {0, -1, g}, {0, 1, g},
                         {0, -1, -g}, {0, 1, -g}, {g, 0, -1}, {g, 0, 1}, {-g, 0, -1}, {-g, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int level = 0; level < levels; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      const auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(4 * f.size());
    for (const auto& t : f) {
      const int ab = mid(t[0], t[1]);
      const int bc = mid(t[1], t[2]);
      const int ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  InterfaceMesh mesh;
  mesh.dim = 3;
  mesh.vertices.reserve(v.size());
  for (const auto& p : v) mesh.vertices.push_back(phase.center + phase.semi_axes.cwiseProduct(p));
  mesh.elements = std::move(f);
  return mesh;
}

double signed_volume(const InterfaceMesh& mesh) {
  double vol = 0.0;
  for (const auto& el : mesh.elements) {
    const Vec3& a = mesh.vertices[el[0]];
    const Vec3& b = mesh.vertices[el[1]];
    if (mesh.dim == 2) {
      vol += 0.5 * (a[0] * b[1] - b[0] * a[1]);
    } else {
      vol += a.dot(b.cross(mesh.vertices[el[2]])) / 6.0;
    }
  }
  return vol;
}

void validate_topology(const InterfaceMesh& mesh) {
  const long nv = static_cast<long>(mesh.vertices.size());
  if (mesh.elements.empty()) throw MeshQualityError("interface mesh has no elements", -1);
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    for (int k = 0; k < (mesh.dim == 2 ? 2 : 3); ++k) {
      if (mesh.elements[e][k] < 0 || mesh.elements[e][k] >= nv) {
        throw MeshQualityError("element " + std::to_string(e) + " references a missing vertex",
                               static_cast<long>(e));
      }
    }
  }
  if (mesh.dim == 2) {
    std::vector<int> starts(nv, 0), ends(nv, 0);
    for (const auto& el : mesh.elements) {
      ++starts[el[0]];
      ++ends[el[1]];
    }
    for (long i = 0; i < nv; ++i) {
      if (starts[i] != 1 || ends[i] != 1) {
        throw MeshQualityError("polygon is not closed at vertex " + std::to_string(i), -1);
      }
    }
    return;
  }
  // Every directed edge exactly once, and its reverse present.
  std::unordered_map<long long, int> edges;
  edges.reserve(mesh.elements.size() * 3);
  auto key = [nv](int a, int b) { return static_cast<long long>(a) * nv + b; };
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto& el = mesh.elements[e];
    for (int k = 0; k < 3; ++k) {
      if (++edges[key(el[k], el[(k + 1) % 3])] != 1) {
        throw MeshQualityError("edge used twice with the same orientation in element " +
                                   std::to_string(e),
                               static_cast<long>(e));
      }
    }
  }
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto& el = mesh.elements[e];
    for (int k = 0; k < 3; ++k) {
      if (edges.find(key(el[(k + 1) % 3], el[k])) == edges.end()) {
        throw MeshQualityError("open surface: boundary edge in element " + std::to_string(e),
                               static_cast<long>(e));
      }
    }
  }
}

}  // namespace

InterfaceMesh mesh_initial(const InitialPhase& phase, int resolution, double period) {
  phase.validate(period);
  InterfaceMesh mesh;
  if (phase.dim == 2) {
    if (resolution < 8) throw InputError("2D interface resolution must be at least 8 vertices");
    mesh = polygon(phase, resolution);
  } else {
    if (resolution < 1 || resolution > 8) {
      throw InputError("3D interface resolution is an icosphere level in [1, 8]");
    }
    mesh = icosphere(phase, resolution);
  }
  validate_mesh(mesh);
  return mesh;
}

void validate_mesh(const InterfaceMesh& mesh) {
  if (mesh.dim != 2 && mesh.dim != 3) throw InputError("mesh dimension must be 2 or 3");
  validate_topology(mesh);
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const double m = mesh.element_measure(e);
    if (!(m > kMinElementMeasure)) {
      throw MeshQualityError("degenerate interface element " + std::to_string(e) + " (measure " +
                                 format_number(m) + ")",
                             static_cast<long>(e));
    }
  }
  const double vol = signed_volume(mesh);
  if (!(vol > 0.0)) {
    throw MeshQualityError("interface orientation is not outward (signed volume " +
                               format_number(vol) + ")",
                           -1);
  }
}

InterfaceMesh advect(const InterfaceMesh& mesh, const VelocitySampler& u, double t1, double h) {
  if (t1 < mesh.t) throw InputError("advect target time precedes the mesh time");
  InterfaceMesh out;
  out.dim = mesh.dim;
  out.elements = mesh.elements;
  out.t = t1;
  out.vertices.resize(mesh.vertices.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    out.vertices[i] = integrate(mesh.vertices[i], mesh.t, t1, u, h);
  }
  validate_mesh(out);
  return out;
}

int indicator(const Vec3& x, double t, const VelocitySampler& u, const InitialPhase& phase, double h,
              double period) {
  const Vec3 origin = t == 0.0 ? x : backtrace(x, t, u, h);
  return phase.contains(wrap(origin, phase.dim, period)) ? 1 : 0;
}

namespace {

double winding_number(const Vec3& x, const InterfaceMesh& mesh) {
  double total = 0.0;
  for (const auto& el : mesh.elements) {
    const Vec3 a = mesh.vertices[el[0]] - x;
    const Vec3 b = mesh.vertices[el[1]] - x;
    if (mesh.dim == 2) {
      total += std::atan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1]);
    } else {
      const Vec3 c = mesh.vertices[el[2]] - x;
      const double la = a.norm(), lb = b.norm(), lc = c.norm();
      const double num = a.dot(b.cross(c));
      const double den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
      total += 2.0 * std::atan2(num, den);
    }
  }
  return total / (mesh.dim == 2 ? kTwoPi : 2.0 * kTwoPi);
}

}  // namespace

int geometric_indicator(const Vec3& x, const InterfaceMesh& mesh, double period) {
  const int nz = mesh.dim == 3 ? 1 : 0;
  for (int i = -1; i <= 1; ++i) {
    for (int j = -1; j <= 1; ++j) {
      for (int l = -nz; l <= nz; ++l) {
        const Vec3 image = x + period * Vec3(i, j, l);
        if (std::abs(winding_number(image, mesh)) > 0.5) return 1;
      }
    }
  }
  return 0;
}

double perimeter(const InterfaceMesh& mesh) {
  double p = 0.0;
  for (std::size_t e = 0; e < mesh.size(); ++e) p += mesh.element_measure(e);
  return p;
}

std::vector<Vec3> normals(const InterfaceMesh& mesh) {
  validate_mesh(mesh);
  std::vector<Vec3> n(mesh.size());
  for (std::size_t e = 0; e < mesh.size(); ++e) n[e] = mesh.element_normal(e);
  return n;
}

double enclosed_volume(const InterfaceMesh& mesh) {
  validate_topology(mesh);
  return signed_volume(mesh);
}

double max_edge_length(const InterfaceMesh& mesh) {
  double m = 0.0;
  for (const auto& el : mesh.elements) {
    const int nk = mesh.dim == 2 ? 1 : 3;
    for (int k = 0; k < nk; ++k) {
      const int b = mesh.dim == 2 ? el[1] : el[(k + 1) % 3];
      m = std::max(m, (mesh.vertices[el[k]] - mesh.vertices[b]).norm());
    }
  }
  return m;
}

double tangential_trace(const Mat3& jacobian, const Vec3& n, int dim) {
  return jacobian.topLeftCorner(dim, dim).trace() - n.dot(jacobian * n);
}

double curvature_pairing(const InterfaceMesh& mesh, const GradientField& grad_eta) {
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.size(); ++e) {
    const Vec3 n = mesh.element_normal(e);
    total += mesh.element_measure(e) * tangential_trace(grad_eta(mesh.element_centroid(e)), n, mesh.dim);
  }
  return total;
}

InterfaceMesh resample_polygon(const InterfaceMesh& mesh) {
  if (mesh.dim != 2) throw InputError("resampling is only available for polygons");
  validate_mesh(mesh);
  // Walk the polygon in element order starting from element 0.
  const std::size_t n = mesh.size();
  std::vector<int> next(mesh.vertices.size());
  for (const auto& el : mesh.elements) next[el[0]] = el[1];
  std::vector<Vec3> ring;
  ring.reserve(n);
  int v = mesh.elements[0][0];
  for (std::size_t i = 0; i < n; ++i) {
    ring.push_back(mesh.vertices[v]);
    v = next[v];
  }
  std::vector<double> arc(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) arc[i + 1] = arc[i] + (ring[(i + 1) % n] - ring[i]).norm();
  const double total = arc[n];
  InterfaceMesh out;
  out.dim = 2;
  out.t = mesh.t;
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = total * static_cast<double>(i) / static_cast<double>(n);
    while (seg + 1 < n && arc[seg + 1] <= s) ++seg;
    const double len = arc[seg + 1] - arc[seg];
    const double w = len > 0.0 ? (s - arc[seg]) / len : 0.0;
    out.vertices.push_back((1.0 - w) * ring[seg] + w * ring[(seg + 1) % n]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.elements.push_back({static_cast<int>(i), static_cast<int>((i + 1) % n), 0});
  }
  validate_mesh(out);
  return out;
}

std::string interface_filename(double t, int dim) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "interface_t%.6f.%s", t, dim == 3 ? "obj" : "csv");
  return buf;
}

void write_mesh(const InterfaceMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  if (mesh.dim == 2) {
    out << "x,y\n";
    for (const auto& el : mesh.elements) {
      const Vec3& p = mesh.vertices[el[0]];
      out << format_number(p[0]) << ',' << format_number(p[1]) << '\n';
    }
    return;
  }
  out << "# interface t=" << format_number(mesh.t) << '\n';
  for (const auto& p : mesh.vertices) {
    out << "v " << format_number(p[0]) << ' ' << format_number(p[1]) << ' ' << format_number(p[2])
        << '\n';
  }
  for (const auto& el : mesh.elements) {
    out << "f " << el[0] + 1 << ' ' << el[1] + 1 << ' ' << el[2] + 1 << '\n';
  }
}

}  // namespace varimhd
