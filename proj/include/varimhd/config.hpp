#pragma once

#include "varimhd/galerkin.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace varimhd {

/// Initial vector field description.
///   zero
///   taylor_green  amplitude
///   abc           amplitude (d = 3)
///   mode          amplitude, index or (wavevector, polarization, phase)
///   coefficients  values on the basis of kmax `source_kmax`
struct FieldSpec {
  std::string type = "zero";
  double amplitude = 1.0;
  int index = -1;
  Vec3i wavevector = Vec3i::Zero();
  int polarization = 0;
  Phase phase = Phase::Cosine;
  std::vector<double> values;
  int source_kmax = 0;  // 0 means the run kmax
};

struct PhaseSpec {
  Vec3 center = Vec3(kPi, kPi, kPi);
  Vec3 semi_axes = Vec3::Ones();
};

struct OutputSpec {
  std::string directory = "out";
  int cadence = 1;  // mesh and varifold dumps every `cadence` windows; 0 keeps only the ends
};

struct RunConfig {
  BasisSpec basis;
  double T = 0.5;
  FieldSpec u0;
  FieldSpec b0;
  PhaseSpec phase;
  PhysicalParams params;
  SolverSettings solver;
  OutputSpec output;

  /// Every constraint checked before any computation; throws InputError.
  void validate() const;
  InitialPhase initial_phase() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
/// Fully resolved configuration (defaults filled in); parse_config inverts it.
nlohmann::json to_json(const RunConfig& cfg);

/// Divergence-free initial field on `basis`, obtained by L2 projection.
SpectralField make_field(const FieldSpec& spec, const BasisPtr& basis, int quadrature_order,
                         std::vector<std::string>* warnings = nullptr);

}  // namespace varimhd
