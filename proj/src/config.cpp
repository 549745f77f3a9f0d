#include "varimhd/config.hpp"

#include <fstream>
#include <sstream>

namespace varimhd {

using nlohmann::json;

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("config field '") + key + "' has the wrong type");
  }
}

Vec3 read_vec(const json& j, int dim, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw InputError(std::string(what) + " must be an array of " + std::to_string(dim) + " numbers");
  }
  Vec3 v = Vec3::Zero();
  for (int a = 0; a < dim; ++a) {
    if (!j[static_cast<std::size_t>(a)].is_number()) throw InputError(std::string(what) + " must be numeric");
    v[a] = j[static_cast<std::size_t>(a)].get<double>();
  }
  return v;
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw InputError("unknown config field '" + it.key() + "' in " + where);
  }
}

FieldSpec parse_field(const json& j, int dim, const std::string& where) {
  FieldSpec f;
  if (j.is_null()) return f;
  if (j.is_string()) {
    f.type = j.get<std::string>();
  } else if (j.is_object()) {
    reject_unknown(j, {"type", "amplitude", "index", "wavevector", "polarization", "phase", "values", "kmax"},
                   where);
    f.type = get_or<std::string>(j, "type", "zero");
    f.amplitude = get_or(j, "amplitude", 1.0);
    f.index = get_or(j, "index", -1);
    f.polarization = get_or(j, "polarization", 0);
    const std::string ph = get_or<std::string>(j, "phase", "cos");
    if (ph == "cos" || ph == "cosine") {
      f.phase = Phase::Cosine;
    } else if (ph == "sin" || ph == "sine") {
      f.phase = Phase::Sine;
    } else {
      throw InputError(where + ".phase must be \"cos\" or \"sin\"");
    }
    if (j.contains("wavevector")) {
      const json& k = j.at("wavevector");
      if (!k.is_array() || static_cast<int>(k.size()) != dim) {
        throw InputError(where + ".wavevector must have " + std::to_string(dim) + " integer entries");
      }
      for (int a = 0; a < dim; ++a) f.wavevector[a] = k[static_cast<std::size_t>(a)].get<int>();
    }
    f.values = get_or(j, "values", std::vector<double>{});
    f.source_kmax = get_or(j, "kmax", 0);
  } else {
    throw InputError(where + " must be a string or an object");
  }
  return f;
}

json field_json(const FieldSpec& f, int dim) {
  json j;
  j["type"] = f.type;
  if (f.type == "taylor_green" || f.type == "abc") j["amplitude"] = f.amplitude;
  if (f.type == "mode") {
    j["amplitude"] = f.amplitude;
    if (f.index >= 0) {
      j["index"] = f.index;
    } else {
      j["wavevector"] = std::vector<int>(f.wavevector.data(), f.wavevector.data() + dim);
      j["polarization"] = f.polarization;
      j["phase"] = f.phase == Phase::Cosine ? "cos" : "sin";
    }
  }
  if (f.type == "coefficients") {
    j["values"] = f.values;
    if (f.source_kmax > 0) j["kmax"] = f.source_kmax;
  }
  return j;
}

void validate_field(const FieldSpec& f, int dim, int kmax, const char* name) {
  const std::string n(name);
  if (!std::isfinite(f.amplitude)) throw InputError(n + ".amplitude must be finite");
  if (f.type == "zero" || f.type == "taylor_green") return;
  if (f.type == "abc") {
    if (dim != 3) throw InputError(n + ": the ABC flow needs dimension 3");
    return;
  }
  if (f.type == "mode") {
    const auto modes = enumerate_modes(dim, kmax);
    if (f.index >= 0) {
      if (f.index >= static_cast<int>(modes.size())) {
        throw InputError(n + ".index exceeds the number of modes (" + std::to_string(modes.size()) + ")");
      }
      return;
    }
    for (const auto& m : modes) {
      if (m.wavevector == f.wavevector && m.polarization == f.polarization && m.phase == f.phase) return;
    }
    throw InputError(n + ": no basis mode with the given wavevector, polarization and phase");
  }
  if (f.type == "coefficients") {
    const int src = f.source_kmax > 0 ? f.source_kmax : kmax;
    const auto expected = enumerate_modes(dim, src).size();
    if (f.values.size() != expected) {
      throw InputError(n + ".values must list " + std::to_string(expected) + " coefficients for kmax " +
                       std::to_string(src));
    }
    for (double v : f.values) {
      if (!std::isfinite(v)) throw InputError(n + ".values must be finite");
    }
    return;
  }
  throw InputError(n + ".type '" + f.type + "' is not one of zero, taylor_green, abc, mode, coefficients");
}

}  // namespace

InitialPhase RunConfig::initial_phase() const {
  InitialPhase p;
  p.dim = basis.dimension;
  p.center = phase.center;
  p.semi_axes = phase.semi_axes;
  if (p.dim == 2) {
    p.center[2] = 0.0;
    p.semi_axes[2] = 1.0;
  }
  return p;
}

void RunConfig::validate() const {
  if (basis.dimension != 2 && basis.dimension != 3) throw InputError("dimension must be 2 or 3");
  if (basis.kmax < 1) throw InputError("kmax must be at least 1");
  if (basis.quadrature_order < 0) throw InputError("quadrature_order must be nonnegative");
  if (!(T >= 0.0) || !std::isfinite(T)) throw InputError("final time T must be finite and nonnegative");
  params.validate();
  solver.validate();
  if (basis.dimension == 2 && solver.mesh_resolution < 8) throw InputError("mesh_resolution must be >= 8 in 2D");
  if (basis.dimension == 3 && (solver.mesh_resolution < 1 || solver.mesh_resolution > 8)) {
    throw InputError("mesh_resolution (icosphere level) must lie in [1, 8] in 3D");
  }
  if (solver.remesh && basis.dimension != 2) throw InputError("remesh is only available in 2D");
  if (output.cadence < 0) throw InputError("output cadence must be nonnegative");
  validate_field(u0, basis.dimension, basis.kmax, "u0");
  validate_field(b0, basis.dimension, basis.kmax, "B0");
  initial_phase().validate();
  const bool magnetic = b0.type != "zero" && b0.amplitude != 0.0;
  if (params.nu_plus == 0.0 && params.nu_minus == 0.0 && (magnetic || params.kappa > 0.0)) {
    throw InputError("nu_plus = nu_minus = 0 is only allowed with B0 = 0 and kappa = 0");
  }
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  reject_unknown(j, {"dimension", "kmax", "quadrature_order", "T", "u0", "B0", "phase", "nu_plus", "nu_minus",
                     "sigma", "kappa", "solver", "output"},
                 "config");
  RunConfig c;
  c.basis.dimension = get_or(j, "dimension", 2);
  c.basis.kmax = get_or(j, "kmax", 2);
  c.basis.quadrature_order = get_or(j, "quadrature_order", 0);
  const int d = c.basis.dimension;
  if (d != 2 && d != 3) throw InputError("dimension must be 2 or 3");
  c.T = get_or(j, "T", 0.5);
  c.u0 = parse_field(j.value("u0", json()), d, "u0");
  c.b0 = parse_field(j.value("B0", json()), d, "B0");

  if (j.contains("phase")) {
    const json& p = j.at("phase");
    reject_unknown(p, {"center", "radius", "semi_axes"}, "phase");
    if (p.contains("center")) c.phase.center = read_vec(p.at("center"), d, "phase.center");
    if (p.contains("radius") && p.contains("semi_axes")) {
      throw InputError("phase takes either radius or semi_axes, not both");
    }
    if (p.contains("radius")) c.phase.semi_axes = Vec3::Constant(p.at("radius").get<double>());
    if (p.contains("semi_axes")) c.phase.semi_axes = read_vec(p.at("semi_axes"), d, "phase.semi_axes");
  }
  if (d == 2) {
    c.phase.center[2] = 0.0;
    c.phase.semi_axes[2] = 1.0;
  }

  c.params.nu_plus = get_or(j, "nu_plus", c.params.nu_plus);
  c.params.nu_minus = get_or(j, "nu_minus", c.params.nu_minus);
  c.params.sigma = get_or(j, "sigma", c.params.sigma);
  c.params.kappa = get_or(j, "kappa", c.params.kappa);

  c.solver.mesh_resolution = d == 2 ? 128 : 3;
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    reject_unknown(s, {"window", "n_sub", "tol", "max_iter", "relaxation", "h_flow", "dt_B", "mesh_resolution",
                       "min_window", "smallness_window", "remesh"},
                   "solver");
    SolverSettings& v = c.solver;
    v.window = get_or(s, "window", v.window);
    v.n_sub = get_or(s, "n_sub", v.n_sub);
    v.tol = get_or(s, "tol", v.tol);
    v.max_iter = get_or(s, "max_iter", v.max_iter);
    v.relaxation = get_or(s, "relaxation", v.relaxation);
    v.h_flow = get_or(s, "h_flow", v.h_flow);
    v.dt_b = get_or(s, "dt_B", v.dt_b);
    v.mesh_resolution = get_or(s, "mesh_resolution", v.mesh_resolution);
    v.min_window = get_or(s, "min_window", v.min_window);
    v.smallness_window = get_or(s, "smallness_window", v.smallness_window);
    v.remesh = get_or(s, "remesh", v.remesh);
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, {"directory", "cadence"}, "output");
    c.output.directory = get_or(o, "directory", c.output.directory);
    c.output.cadence = get_or(o, "cadence", c.output.cadence);
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InputError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  const int d = c.basis.dimension;
  json j;
  j["dimension"] = d;
  j["kmax"] = c.basis.kmax;
  j["quadrature_order"] = c.basis.resolved_order();
  j["T"] = c.T;
  j["u0"] = field_json(c.u0, d);
  j["B0"] = field_json(c.b0, d);
  j["phase"] = {{"center", std::vector<double>(c.phase.center.data(), c.phase.center.data() + d)},
                {"semi_axes", std::vector<double>(c.phase.semi_axes.data(), c.phase.semi_axes.data() + d)}};
  j["nu_plus"] = c.params.nu_plus;
  j["nu_minus"] = c.params.nu_minus;
  j["sigma"] = c.params.sigma;
  j["kappa"] = c.params.kappa;
  const SolverSettings& s = c.solver;
  j["solver"] = {{"window", s.window},
                 {"n_sub", s.n_sub},
                 {"tol", s.tol},
                 {"max_iter", s.max_iter},
                 {"relaxation", s.relaxation},
                 {"h_flow", s.h_flow},
                 {"dt_B", s.dt_b},
                 {"mesh_resolution", s.mesh_resolution},
                 {"min_window", s.min_window},
                 {"smallness_window", s.smallness_window},
                 {"remesh", s.remesh}};
  j["output"] = {{"directory", c.output.directory}, {"cadence", c.output.cadence}};
  return j;
}

SpectralField make_field(const FieldSpec& spec, const BasisPtr& basis, int quadrature_order,
                         std::vector<std::string>* warnings) {
  const double a = spec.amplitude;
  const int d = basis->dim();
  if (spec.type == "zero") return SpectralField::zero(basis);
  if (spec.type == "mode") {
    SpectralField f = SpectralField::zero(basis);
    for (std::size_t j = 0; j < basis->size(); ++j) {
      const BasisMode& m = (*basis)[j];
      const bool hit = spec.index >= 0 ? static_cast<int>(j) == spec.index
                                       : (m.wavevector == spec.wavevector && m.polarization == spec.polarization &&
                                          m.phase == spec.phase);
      if (hit) {
        f.coefficients[static_cast<Eigen::Index>(j)] = a;
        return f;
      }
    }
    throw InputError("requested mode is not in the basis");
  }
  if (spec.type == "taylor_green") {
    return project_L2(
        [a, d](const Vec3& x) {
          const double cz = d == 3 ? std::cos(x[2]) : 1.0;
          return Vec3(a * std::sin(x[0]) * std::cos(x[1]) * cz, -a * std::cos(x[0]) * std::sin(x[1]) * cz, 0.0);
        },
        basis, quadrature_order, warnings);
  }
  if (spec.type == "abc") {
    if (d != 3) throw InputError("the ABC flow needs dimension 3");
    return project_L2(
        [a](const Vec3& x) {
          return Vec3(a * (std::sin(x[2]) + std::cos(x[1])), a * (std::sin(x[0]) + std::cos(x[2])),
                      a * (std::sin(x[1]) + std::cos(x[0])));
        },
        basis, quadrature_order, warnings);
  }
  if (spec.type == "coefficients") {
    const int src = spec.source_kmax > 0 ? spec.source_kmax : basis->kmax();
    BasisPtr source = src == basis->kmax() ? basis : make_basis(d, src, basis->period());
    if (spec.values.size() != source->size()) throw InputError("coefficient list has the wrong length");
    Coefficients c = Eigen::Map<const Coefficients>(spec.values.data(), static_cast<Eigen::Index>(spec.values.size()));
    if (source == basis) return SpectralField::from(basis, c);
    const SpectralField field = SpectralField::from(source, c);
    const int order = std::max(quadrature_order, 2 * std::max(src, basis->kmax()) + 1);
    return project_L2([&field](const Vec3& x) { return evaluate(field, x); }, basis, order, warnings);
  }
  throw InputError("unknown field type '" + spec.type + "'");
}

}  // namespace varimhd
