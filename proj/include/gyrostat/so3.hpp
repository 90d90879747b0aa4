#pragma once

#include <cmath>

#include "gyrostat/errors.hpp"
#include "gyrostat/mat3.hpp"
#include "gyrostat/vec3.hpp"

namespace gyrostat {

/// hat(v)*w == cross(v, w) for all w.
constexpr Mat3 hat(const Vec3& v) {
  Mat3 m;
  m.a = {0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0};
  return m;
}

/// Orthogonality defect ||R^T R - I||_F.
inline double orthogonality_residual(const Mat3& r) {
  return frobenius_norm(transpose(r) * r - Mat3::identity());
}

inline bool is_rotation(const Mat3& r, double tol = 1e-12) {
  return orthogonality_residual(r) <= tol && std::fabs(det(r) - 1.0) <= tol;
}

/// Inverse of hat. Requires ||M + M^T|| < 1e-10.
inline Vec3 vee(const Mat3& m) {
  const Mat3 sym = m + transpose(m);
  if (frobenius_norm(sym) >= 1e-10) throw NotSkewError("vee: matrix is not skew-symmetric");
  return {m(2, 1), m(0, 2), m(1, 0)};
}

/// Rodrigues formula, exp(hat(v)). The small-angle branch switches to the
/// 2nd-order Taylor coefficients below ||v|| = 1e-8 to avoid 0/0.
inline Mat3 exp_so3_matrix(const Vec3& v) {
  const double t2 = norm_sq(v);
  const double t = std::sqrt(t2);
  double a, b;  // R = I + a*hat(v) + b*hat(v)^2
  if (t < 1e-8) {
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    a = std::sin(t) / t;
    b = (1.0 - std::cos(t)) / t2;
  }
  const Mat3 k = hat(v);
  return Mat3::identity() + a * k + b * (k * k);
}

/// Inverse right-trivialized tangent of exp, truncated to the order needed by
/// a 4th-order Lie group step: dexpinv(theta, w) = w - theta x w / 2
/// + theta x (theta x w) / 12.
inline Vec3 dexpinv(const Vec3& theta, const Vec3& w) {
  const Vec3 c = cross(theta, w);
  return w - 0.5 * c + (1.0 / 12.0) * cross(theta, c);
}

/// Nearest rotation in the Frobenius sense (polar factor), computed by the
/// inverse-transpose Newton iteration. Requires det > 0.
inline Mat3 reorthonormalize_matrix(const Mat3& m) {
  if (!is_finite(m)) throw DegenerateError("reorthonormalize: non-finite input");
  const double d = det(m);
  if (!(d > 0.0)) throw DegenerateError("reorthonormalize: determinant is not positive");
  Mat3 x = m;
  for (int it = 0; it < 100; ++it) {
    const double dx = det(x);
    if (std::fabs(dx) < 1e-300) throw DegenerateError("reorthonormalize: rank-deficient matrix");
    const Mat3 next = 0.5 * (x + transpose(inverse(x)));
    const double step = frobenius_norm(next - x);
    x = next;
    if (step < 1e-15) break;
  }
  if (orthogonality_residual(x) > 1e-10)
    throw DegenerateError("reorthonormalize: iteration failed to converge");
  return x;
}

/// Attitude matrix with the SO(3) invariants enforced at construction.
class Rotation {
 public:
  Rotation() : m_(Mat3::identity()) {}

  static Rotation identity() { return Rotation(); }

  /// Validates R^T R = I and det R = +1 within 1e-12.
  static Rotation from_matrix(const Mat3& m) {
    if (!is_rotation(m, 1e-12))
      throw DegenerateError("Rotation::from_matrix: matrix is not a rotation");
    return Rotation(m);
  }

  const Mat3& matrix() const { return m_; }

  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_); }
  Rotation transposed() const { return Rotation(transpose(m_)); }

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}
  friend Rotation exp_so3(const Vec3&);
  friend Rotation reorthonormalize(const Mat3&);
  Mat3 m_;
};

inline Rotation exp_so3(const Vec3& v) { return Rotation(exp_so3_matrix(v)); }

inline Rotation reorthonormalize(const Mat3& m) { return Rotation(reorthonormalize_matrix(m)); }

/// Body-to-spatial transport of angular momentum, A*Pi.
inline Vec3 spatial_momentum(const Mat3& attitude, const Vec3& pi) { return attitude * pi; }

inline Vec3 spatial_momentum(const Rotation& attitude, const Vec3& pi) {
  return attitude.matrix() * pi;
}

}  // namespace gyrostat
