#include "oracles.hpp"

#include "varimhd/flowmap.hpp"

#include <doctest.h>

#include <limits>

using namespace varimhd;

TEST_SUITE("flowmap") {

TEST_CASE("RK4 reproduces a rigid rotation") {
  const Vec3 c(kPi, kPi, 0.0);
  const auto u = oracle::rotation(c, 1.3);
  const Vec3 x0(kPi + 1.0, kPi + 0.5, 0.0);
  const Vec3 x1 = integrate(x0, 0.0, 1.0, u, 1e-2);
  CHECK((x1 - oracle::rotate(x0, c, 1.3, 1.0)).norm() < 1e-9);
  // reversed time returns to the start
  CHECK((integrate(x1, 1.0, 0.0, u, 1e-2) - x0).norm() < 1e-9);
}

TEST_CASE("RK4 error ratio under step halving is close to 16") {
  // u = (sin y, -sin x (1 + cos(t)/2)); reference from a tiny step
  const AnalyticSampler u(
      2, [](double t, const Vec3& x) { return Vec3(std::sin(x[1]), -std::sin(x[0]) * (1.0 + 0.5 * std::cos(t)), 0.0); },
      [](double t, const Vec3& x) {
        Mat3 J = Mat3::Zero();
        J(0, 1) = std::cos(x[1]);
        J(1, 0) = -std::cos(x[0]) * (1.0 + 0.5 * std::cos(t));
        return J;
      });
  const Vec3 x0(0.3, 1.1, 0.0);
  const Vec3 ref = integrate(x0, 0.0, 1.0, u, 1e-4);
  const double e1 = (integrate(x0, 0.0, 1.0, u, 0.1) - ref).norm();
  const double e2 = (integrate(x0, 0.0, 1.0, u, 0.05) - ref).norm();
  const double ratio = e1 / e2;
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("last step is shortened to land on t1") {
  const AnalyticSampler u(2, [](double, const Vec3&) { return Vec3(1.0, 0.0, 0.0); },
                          [](double, const Vec3&) { return Mat3::Zero().eval(); });
  CHECK(integrate(Vec3::Zero(), 0.0, 0.37, u, 0.1)[0] == doctest::Approx(0.37).epsilon(1e-15));
}

TEST_CASE("backtrace inverts the forward flow of a spectral field") {
  std::mt19937_64 rng(21);
  auto basis = make_basis(2, 3);
  const FieldSampler u(SpectralField::from(basis, oracle::random_coefficients(basis->size(), rng, 0.3)));
  std::uniform_real_distribution<double> U(0.0, kTwoPi);
  for (int i = 0; i < 10; ++i) {
    const Vec3 x0(U(rng), U(rng), 0.0);
    const Vec3 x1 = integrate(x0, 0.0, 0.8, u, 1e-2);
    CHECK((backtrace(x1, 0.8, u, 1e-2) - x0).norm() < 1e-8);
  }
}

TEST_CASE("deformation gradient matches finite differences and has unit determinant") {
  std::mt19937_64 rng(4);
  for (int d : {2, 3}) {
    auto basis = make_basis(d, 2);
    const FieldSampler u(SpectralField::from(basis, oracle::random_coefficients(basis->size(), rng, 0.2)));
    const Vec3 x0(1.0, 2.0, d == 3 ? 3.0 : 0.0);
    const FlowJacobian fj = flow_jacobian(x0, u, 1.0, 1e-2);
    const Mat3 fd = oracle::fd_jacobian([&](const Vec3& y) { return integrate(y, 0.0, 1.0, u, 1e-2); }, x0, d, 1e-6);
    CHECK((fj.jacobian.topLeftCorner(d, d) - fd.topLeftCorner(d, d)).norm() < 1e-6);
    CHECK((fj.position - integrate(x0, 0.0, 1.0, u, 1e-2)).norm() < 1e-14);
    CHECK(std::abs(fj.jacobian.topLeftCorner(d, d).determinant() - 1.0) < 1e-6);
  }
}

TEST_CASE("non-finite velocity raises an integration error with the time") {
  const AnalyticSampler bad(
      2,
      [](double t, const Vec3&) {
        return t > 0.25 ? Vec3(std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0) : Vec3(1.0, 0.0, 0.0);
      },
      [](double, const Vec3&) { return Mat3::Zero().eval(); });
  try {
    (void)integrate(Vec3::Zero(), 0.0, 1.0, bad, 0.1);
    FAIL("no exception");
  } catch (const IntegrationError& e) {
    CHECK(e.time > 0.2);
    CHECK(e.time < 0.4);
  }
}

TEST_CASE("trajectory sampler interpolates linearly and holds its ends") {
  auto basis = make_basis(2, 1);
  Coefficients a = Coefficients::Zero(8), b = Coefficients::Zero(8);
  a[0] = 1.0;
  b[0] = 3.0;
  TrajectorySampler s(basis);
  s.append(0.0, a);
  s.append(1.0, b);
  CHECK(s.coefficients_at(0.25)[0] == doctest::Approx(1.5));
  CHECK(s.coefficients_at(-1.0)[0] == 1.0);
  CHECK(s.coefficients_at(2.0)[0] == 3.0);
  s.append(1.0, a);  // same time replaces the last knot
  CHECK(s.times().size() == 2);
  CHECK(s.coefficients_at(1.0)[0] == 1.0);
  CHECK_THROWS(s.append(0.5, a));
  const Vec3 x(0.4, 0.9, 0.0);
  const FieldSampler steady(SpectralField::from(basis, a));
  CHECK((s.velocity(0.3, x) - steady.velocity(0.0, x)).norm() < 1e-14);
}

TEST_CASE("advance wraps particles into the cell") {
  const AnalyticSampler u(2, [](double, const Vec3&) { return Vec3(2.0, -1.0, 0.0); },
                          [](double, const Vec3&) { return Mat3::Zero().eval(); });
  ParticleCloud cloud{{Vec3(6.0, 0.5, 0.0)}, 0.0};
  const ParticleCloud out = advance(cloud, u, 1.0, 0.1);
  CHECK(out.t == 1.0);
  CHECK(out.positions[0][0] == doctest::Approx(8.0 - kTwoPi));
  CHECK(out.positions[0][1] == doctest::Approx(kTwoPi - 0.5));
  CHECK_THROWS(advance(out, u, 0.5, 0.1));
}

}
