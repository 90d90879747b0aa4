#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gyrostat/sampling.hpp"
#include "gyrostat/so3.hpp"

using namespace gyrostat;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("hat: examples") {
  CHECK(frobenius_norm(hat({0, 0, 0})) == 0.0);

  const Mat3 m = hat({1, 2, 3});
  CHECK(m(0, 0) == 0.0);
  CHECK(m(0, 1) == -3.0);
  CHECK(m(0, 2) == 2.0);
  CHECK(m(1, 0) == 3.0);
  CHECK(m(1, 2) == -1.0);
  CHECK(m(2, 0) == -2.0);
  CHECK(m(2, 1) == 1.0);

  const Vec3 r = hat({0, 0, 1}) * Vec3{1, 0, 0};
  CHECK(r.x == 0.0);
  CHECK(r.y == 1.0);
  CHECK(r.z == 0.0);
}

TEST_CASE("hat acts as the cross product") {
  SampleRng rng(11);
  for (int i = 0; i < 200; ++i) {
    const Vec3 v = rng.vec3(-5, 5), w = rng.vec3(-5, 5);
    CHECK(max_abs(hat(v) * w - cross(v, w)) <= 1e-15);
    CHECK(frobenius_norm(hat(v) + transpose(hat(v))) == 0.0);
  }
}

TEST_CASE("vee: examples and round trip") {
  const Vec3 z = vee(Mat3::zero());
  CHECK(z.x == 0.0);
  CHECK(z.y == 0.0);
  CHECK(z.z == 0.0);

  SampleRng rng(12);
  for (int i = 0; i < 100; ++i) {
    const Vec3 v = rng.vec3(-10, 10);
    const Vec3 r = vee(hat(v));
    CHECK(r.x == v.x);
    CHECK(r.y == v.y);
    CHECK(r.z == v.z);
  }
  const Vec3 r = vee(hat({-4, 0, 7}));
  CHECK(r.x == -4.0);
  CHECK(r.z == 7.0);

  CHECK_THROWS_AS(vee(Mat3::identity()), NotSkewError);
}

TEST_CASE("exp_so3: examples") {
  CHECK(frobenius_norm(exp_so3(Vec3{}).matrix() - Mat3::identity()) == 0.0);

  const Mat3 qz = exp_so3({0, 0, kPi / 2}).matrix();
  CHECK(std::fabs(qz(0, 0)) < 1e-15);
  CHECK(std::fabs(qz(0, 1) + 1.0) < 1e-15);
  CHECK(std::fabs(qz(1, 0) - 1.0) < 1e-15);
  CHECK(std::fabs(qz(2, 2) - 1.0) < 1e-15);

  const Mat3 hx = exp_so3({kPi, 0, 0}).matrix();
  CHECK(std::fabs(hx(0, 0) - 1.0) < 1e-15);
  CHECK(std::fabs(hx(1, 1) + 1.0) < 1e-15);
  CHECK(std::fabs(hx(2, 2) + 1.0) < 1e-15);
}

TEST_CASE("exp_so3: rotation invariants and inverse") {
  SampleRng rng(13);
  for (int i = 0; i < 200; ++i) {
    const Vec3 v = rng.uniform(0, 6) * rng.unit_vec3();
    const Mat3 r = exp_so3(v).matrix();
    CHECK(is_rotation(r, 1e-12));
    CHECK(frobenius_norm(r * exp_so3(-1.0 * v).matrix() - Mat3::identity()) <= 1e-12);
  }
  // Small-angle branch continuity.
  const Mat3 tiny = exp_so3({1e-9, -2e-9, 1e-9}).matrix();
  CHECK(is_rotation(tiny, 1e-12));
}

TEST_CASE("cross product is SO(3)-equivariant") {
  SampleRng rng(14);
  for (int i = 0; i < 200; ++i) {
    const Mat3 a = rng.rotation().matrix();
    const Vec3 v = rng.vec3(-3, 3), w = rng.vec3(-3, 3);
    CHECK(max_abs(cross(a * v, a * w) - a * cross(v, w)) <= 1e-12);
  }
}

TEST_CASE("reorthonormalize: examples") {
  SampleRng rng(15);
  const Mat3 r = rng.rotation().matrix();
  CHECK(frobenius_norm(reorthonormalize(r).matrix() - r) <= 1e-14);

  const Mat3 drifted = Mat3::identity() + 1e-6 * hat({1, 1, 1});
  const Mat3 fixed = reorthonormalize(drifted).matrix();
  CHECK(orthogonality_residual(fixed) < 1e-12);
  CHECK(frobenius_norm(fixed - drifted) < 1e-5);

  const Mat3 scaled = 2.0 * Mat3::identity();
  CHECK(frobenius_norm(reorthonormalize(scaled).matrix() - Mat3::identity()) <= 1e-14);

  CHECK_THROWS_AS(reorthonormalize(-1.0 * Mat3::identity()), DegenerateError);
  CHECK_THROWS_AS(reorthonormalize(Mat3::zero()), DegenerateError);
}

TEST_CASE("reorthonormalize is the polar projection") {
  // Oracle: for M = R * S with S symmetric positive definite, the polar factor
  // is R itself.
  SampleRng rng(16);
  for (int i = 0; i < 50; ++i) {
    const Mat3 r = rng.rotation().matrix();
    Mat3 s = Mat3::identity();
    const Vec3 d = rng.vec3(0.5, 1.5);
    s(0, 0) = d.x;
    s(1, 1) = d.y;
    s(2, 2) = d.z;
    const double off = rng.uniform(-0.1, 0.1);
    s(0, 1) = s(1, 0) = off;
    const Mat3 recovered = reorthonormalize(r * s).matrix();
    CHECK(frobenius_norm(recovered - r) <= 1e-12);
  }
}

TEST_CASE("spatial_momentum: examples") {
  const Vec3 i1 = spatial_momentum(Mat3::identity(), {1, 2, 3});
  CHECK(i1.x == 1.0);
  CHECK(i1.y == 2.0);
  CHECK(i1.z == 3.0);

  const Vec3 r = spatial_momentum(exp_so3({0, 0, kPi / 2}).matrix(), {1, 0, 0});
  CHECK(std::fabs(r.x) < 1e-15);
  CHECK(std::fabs(r.y - 1.0) < 1e-15);

  SampleRng rng(17);
  CHECK(max_abs(spatial_momentum(rng.rotation().matrix(), Vec3{})) == 0.0);
}

TEST_CASE("Rotation: validated construction") {
  CHECK_THROWS_AS(Rotation::from_matrix(2.0 * Mat3::identity()), DegenerateError);
  const Rotation r = Rotation::from_matrix(exp_so3({0.3, -0.2, 0.9}).matrix());
  CHECK(is_rotation(r.matrix(), 1e-12));
  CHECK(is_rotation((r * r.transposed()).matrix(), 1e-12));
}
