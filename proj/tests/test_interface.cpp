#include "oracles.hpp"

#include "varimhd/interface.hpp"

#include <doctest.h>

#include <map>

using namespace varimhd;

namespace {

const Vec3 kCenter(kPi, kPi, kPi);

}  // namespace

TEST_SUITE("interface") {

TEST_CASE("polygon perimeter and area match the inscribed polygon") {
  for (int n : {8, 64, 256}) {
    for (double r : {0.5, 1.0}) {
      const InterfaceMesh m = mesh_initial(InitialPhase::disk(kCenter, r), n);
      CHECK(m.size() == static_cast<std::size_t>(n));
      CHECK(perimeter(m) == doctest::Approx(2.0 * n * r * std::sin(kPi / n)).epsilon(1e-13));
      CHECK(enclosed_volume(m) == doctest::Approx(0.5 * n * r * r * std::sin(kTwoPi / n)).epsilon(1e-13));
    }
  }
}

TEST_CASE("icosphere is closed with the right Euler characteristic and converges") {
  double prev_err = 1.0;
  for (int level = 1; level <= 4; ++level) {
    const InterfaceMesh m = mesh_initial(InitialPhase::ball(kCenter, 1.0), level);
    CHECK(m.size() == static_cast<std::size_t>(20 * (1 << (2 * level))));
    std::map<std::pair<int, int>, int> edges;
    for (const auto& e : m.elements) {
      for (int k = 0; k < 3; ++k) {
        const int a = e[k], b = e[(k + 1) % 3];
        edges[{std::min(a, b), std::max(a, b)}]++;
      }
    }
    bool manifold = true;
    for (const auto& [key, count] : edges) manifold = manifold && count == 2;
    CHECK(manifold);
    CHECK(static_cast<long>(m.vertices.size()) - static_cast<long>(edges.size()) + static_cast<long>(m.size()) == 2);
    const double err = std::abs(enclosed_volume(m) - 4.0 * kPi / 3.0);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err / (4.0 * kPi / 3.0) < 5e-3);
}

TEST_CASE("normals point outward") {
  for (int d : {2, 3}) {
    const InitialPhase p = d == 2 ? InitialPhase::disk(kCenter, 1.0) : InitialPhase::ball(kCenter, 1.0);
    const InterfaceMesh m = mesh_initial(p, d == 2 ? 32 : 2);
    const auto n = normals(m);
    for (std::size_t e = 0; e < m.size(); ++e) {
      CHECK(n[e].dot(m.element_centroid(e) - p.center) > 0.0);
      CHECK(n[e].norm() == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("ellipse mesh lies on the ellipse") {
  InitialPhase p;
  p.dim = 2;
  p.center = Vec3(3.0, 3.0, 0.0);
  p.semi_axes = Vec3(1.5, 0.7, 1.0);
  const InterfaceMesh m = mesh_initial(p, 40);
  for (const auto& v : m.vertices) {
    CHECK(std::pow((v[0] - 3.0) / 1.5, 2) + std::pow((v[1] - 3.0) / 0.7, 2) == doctest::Approx(1.0));
  }
}

TEST_CASE("flipped, open and degenerate meshes are rejected") {
  InterfaceMesh m = mesh_initial(InitialPhase::disk(kCenter, 1.0), 16);
  InterfaceMesh flipped = m;
  for (auto& e : flipped.elements) std::swap(e[0], e[1]);
  CHECK_THROWS_AS(validate_mesh(flipped), MeshQualityError);
  CHECK_THROWS_AS(normals(flipped), MeshQualityError);
  InterfaceMesh open = m;
  open.elements.pop_back();
  CHECK_THROWS_AS(validate_mesh(open), MeshQualityError);
  InterfaceMesh degenerate = m;
  degenerate.vertices[3] = degenerate.vertices[4];
  try {
    validate_mesh(degenerate);
    FAIL("degenerate element accepted");
  } catch (const MeshQualityError& e) {
    CHECK(e.element >= 0);
  }
}

TEST_CASE("phase shapes must sit inside the cell with margin") {
  CHECK_NOTHROW(InitialPhase::disk(kCenter, 1.0).validate());
  CHECK_THROWS_AS(InitialPhase::disk(Vec3(0.5, kPi, 0.0), 1.0).validate(), InputError);
  CHECK_THROWS_AS(InitialPhase::disk(Vec3(1.05, kPi, 0.0), 1.0).validate(), InputError);
  CHECK_THROWS_AS(InitialPhase::disk(kCenter, -1.0).validate(), InputError);
  CHECK_THROWS_AS(InitialPhase::ball(Vec3(kPi, kPi, 6.0), 1.0).validate(), InputError);
}

TEST_CASE("rotation advects the disk rigidly") {
  const Vec3 c(3.0, 3.2, 0.0);
  const InterfaceMesh m0 = mesh_initial(InitialPhase::disk(Vec3(kPi, kPi, 0.0), 1.0), 64);
  const auto u = oracle::rotation(c, 0.9);
  const InterfaceMesh m1 = advect(m0, u, 1.0, 1e-2);
  CHECK(m1.t == 1.0);
  for (std::size_t i = 0; i < m0.vertices.size(); ++i) {
    CHECK((m1.vertices[i] - oracle::rotate(m0.vertices[i], c, 0.9, 1.0)).norm() < 1e-9);
  }
  CHECK(perimeter(m1) == doctest::Approx(perimeter(m0)).epsilon(1e-10));
  CHECK(enclosed_volume(m1) == doctest::Approx(enclosed_volume(m0)).epsilon(1e-10));
}

TEST_CASE("back-traced and geometric indicators agree away from the interface") {
  auto basis = make_basis(2, 2);
  std::mt19937_64 rng(8);
  const FieldSampler u(SpectralField::from(basis, oracle::random_coefficients(basis->size(), rng, 0.3)));
  const InitialPhase phase = InitialPhase::disk(Vec3(kPi, kPi, 0.0), 1.0);
  const InterfaceMesh m1 = advect(mesh_initial(phase, 256), u, 0.5, 1e-2);
  const double h = max_edge_length(m1);
  std::uniform_real_distribution<double> U(0.0, kTwoPi);
  int tested = 0, inside = 0;
  while (tested < 100) {
    const Vec3 x(U(rng), U(rng), 0.0);
    double dist = 1e9;
    for (const auto& v : m1.vertices) dist = std::min(dist, (wrap(v, 2) - x).norm());
    if (dist < 2.0 * h) continue;
    const int a = indicator(x, 0.5, u, phase, 1e-2);
    CHECK(a == geometric_indicator(x, m1));
    inside += a;
    ++tested;
  }
  CHECK(inside > 0);
}

TEST_CASE("3D geometric indicator of a ball") {
  const InterfaceMesh m = mesh_initial(InitialPhase::ball(kCenter, 1.0), 3);
  CHECK(geometric_indicator(kCenter, m) == 1);
  CHECK(geometric_indicator(kCenter + Vec3(0.5, 0.3, -0.2), m) == 1);
  CHECK(geometric_indicator(kCenter + Vec3(1.2, 0.0, 0.0), m) == 0);
  CHECK(geometric_indicator(Vec3(0.2, 0.2, 0.2), m) == 0);
}

TEST_CASE("tangential trace and the identity-gradient pairing") {
  const Vec3 n(0.6, 0.8, 0.0);
  CHECK(tangential_trace(Mat3::Identity(), n, 2) == doctest::Approx(1.0));
  CHECK(tangential_trace(Mat3::Identity(), Vec3(0, 0, 1), 3) == doctest::Approx(2.0));
  // grad eta = I gives (d - 1) * perimeter
  const InterfaceMesh circle = mesh_initial(InitialPhase::disk(kCenter, 0.8), 64);
  CHECK(curvature_pairing(circle, [](const Vec3&) { return Mat3::Identity().eval(); }) ==
        doctest::Approx(perimeter(circle)).epsilon(1e-13));
  const InterfaceMesh sphere = mesh_initial(InitialPhase::ball(kCenter, 1.0), 2);
  CHECK(curvature_pairing(sphere, [](const Vec3&) { return Mat3::Identity().eval(); }) ==
        doctest::Approx(2.0 * perimeter(sphere)).epsilon(1e-13));
}

TEST_CASE("resampling keeps vertex count and perimeter") {
  const InterfaceMesh m = mesh_initial(InitialPhase::disk(Vec3(kPi, kPi, 0.0), 1.0), 128);
  const InterfaceMesh r = resample_polygon(m);
  CHECK(r.vertices.size() == m.vertices.size());
  CHECK(perimeter(r) == doctest::Approx(perimeter(m)).epsilon(1e-3));
}

TEST_CASE("mesh output names and headers") {
  CHECK(interface_filename(0.25, 2) == "interface_t0.250000.csv");
  CHECK(interface_filename(1.0, 3) == "interface_t1.000000.obj");
}

}
