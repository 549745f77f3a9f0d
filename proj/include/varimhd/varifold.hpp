#pragma once

#include "varimhd/interface.hpp"

#include <filesystem>
#include <functional>
#include <vector>

namespace varimhd {

/// Weighted (position, unit direction) atom of an atomic varifold.
struct VarifoldAtom {
  Vec3 x;
  Vec3 s;
  double w;
};

/// Atomic varifold on Omega x S^{d-1}.
struct Varifold {
  int dim = 2;
  std::vector<VarifoldAtom> atoms;

  double mass() const;
  /// Throws InputError unless every |s| = 1 (1e-12) and every w > 0.
  void validate() const;
};

/// One atom per element at the centroid with the outward element normal and
/// the element measure as weight.
Varifold lift(const InterfaceMesh& mesh);

struct TestFunctionSample {
  Vec3 value;
  Mat3 gradient;
};
using TestFunction = std::function<TestFunctionSample(const Vec3&)>;

/// <delta V, phi> = sum_i w_i (I - s_i s_i^T) : grad phi(x_i).
double first_variation(const Varifold& v, const TestFunction& phi);

/// |sum_i w_i s_i . psi(x_i) - sum_e |e| n_e . psi(c_e)|: the defect in the
/// coupling between V and the boundary measure of the phase. grad chi points
/// into the phase, so -grad chi = n_outward dH^{d-1} and both sums carry the
/// same sign.
double coupling_residual(const Varifold& v, const InterfaceMesh& mesh, const VectorSampler& psi);

/// CSV with columns x1..xd, s1..sd, w.
void write_varifold(const Varifold& v, const std::filesystem::path& path);
std::string varifold_filename(double t);

}  // namespace varimhd
