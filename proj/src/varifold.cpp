#include "varimhd/varifold.hpp"

#include "varimhd/io.hpp"

#include <cmath>
#include <fstream>

namespace varimhd {

double Varifold::mass() const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.w;
  return m;
}

void Varifold::validate() const {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (std::abs(atoms[i].s.norm() - 1.0) > 1e-12) {
      throw InputError("varifold atom " + std::to_string(i) + " has a non-unit direction");
    }
    if (!(atoms[i].w > 0.0)) {
      throw InputError("varifold atom " + std::to_string(i) + " has a non-positive weight");
    }
  }
}

Varifold lift(const InterfaceMesh& mesh) {
  validate_mesh(mesh);
  Varifold v;
  v.dim = mesh.dim;
  v.atoms.reserve(mesh.size());
  for (std::size_t e = 0; e < mesh.size(); ++e) {
    v.atoms.push_back({mesh.element_centroid(e), mesh.element_normal(e), mesh.element_measure(e)});
  }
  return v;
}

double first_variation(const Varifold& v, const TestFunction& phi) {
  double total = 0.0;
  for (const auto& a : v.atoms) total += a.w * tangential_trace(phi(a.x).gradient, a.s, v.dim);
  return total;
}

double coupling_residual(const Varifold& v, const InterfaceMesh& mesh, const VectorSampler& psi) {
  double from_varifold = 0.0;
  for (const auto& a : v.atoms) from_varifold += a.w * a.s.dot(psi(a.x));
  double from_mesh = 0.0;
  for (std::size_t e = 0; e < mesh.size(); ++e) {
    from_mesh += mesh.element_measure(e) * mesh.element_normal(e).dot(psi(mesh.element_centroid(e)));
  }
  return std::abs(from_varifold - from_mesh);
}

void write_varifold(const Varifold& v, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const char* axes = "xyz";
  for (int a = 0; a < v.dim; ++a) out << axes[a] << ',';
  for (int a = 0; a < v.dim; ++a) out << 's' << axes[a] << ',';
  out << "w\n";
  for (const auto& atom : v.atoms) {
    for (int a = 0; a < v.dim; ++a) out << format_number(atom.x[a]) << ',';
    for (int a = 0; a < v.dim; ++a) out << format_number(atom.s[a]) << ',';
    out << format_number(atom.w) << '\n';
  }
}

std::string varifold_filename(double t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "varifold_t%.6f.csv", t);
  return buf;
}

}  // namespace varimhd
