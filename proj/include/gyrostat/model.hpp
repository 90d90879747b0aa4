#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "gyrostat/vec3.hpp"

namespace gyrostat {

/// Physical parameters of the carrier body plus rotor.
///
/// Ibar1..Ibar3 are the augmented principal inertias (carrier inertia plus the
/// rotor's transverse contributions on axes 1 and 2), J3 the rotor's axial
/// inertia. Gravity enters only through the product gh = g * h, paired with
/// the body-frame unit vector chi from the center of buoyancy toward the
/// center of gravity. Total mass is normalized to 1, so no mass field exists.
struct InertiaParams {
  double Ibar1{1.0};
  double Ibar2{1.0};
  double Ibar3{1.0};
  double J3{1.0};
  double gh{0.0};
  Vec3 chi{0.0, 0.0, 1.0};

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const {
    if (!(Ibar1 > 0.0) || !(Ibar2 > 0.0) || !(Ibar3 > 0.0))
      throw std::invalid_argument("InertiaParams: augmented inertias must be positive");
    if (!(J3 > 0.0)) throw std::invalid_argument("InertiaParams: J3 must be positive");
    if (!(gh >= 0.0)) throw std::invalid_argument("InertiaParams: gh must be non-negative");
    if (std::fabs(norm(chi) - 1.0) > 1e-12)
      throw std::invalid_argument("InertiaParams: chi must be a unit vector");
  }
};

/// Velocity-side state (Omega, alpha, alphadot).
struct VelocityState {
  Vec3 Omega{};
  double alpha{0.0};
  double alphadot{0.0};
};

/// Reduced state for the coincident-centers case, (Pi, alpha, l).
struct ReducedStateC {
  Vec3 Pi{};
  double alpha{0.0};
  double l{0.0};
};

/// Reduced state for the non-coincident-centers case, (Pi, Gamma, alpha, l).
/// Gamma is the gravity direction seen from the body frame; its norm is
/// preserved by the flow, not by construction.
struct ReducedStateN {
  Vec3 Pi{};
  Vec3 Gamma{};
  double alpha{0.0};
  double l{0.0};
};

inline bool is_finite(const ReducedStateC& s) {
  return is_finite(s.Pi) && std::isfinite(s.alpha) && std::isfinite(s.l);
}

inline bool is_finite(const ReducedStateN& s) {
  return is_finite(s.Pi) && is_finite(s.Gamma) && std::isfinite(s.alpha) && std::isfinite(s.l);
}

/// Body angular velocity recovered from momenta:
/// Omega = (Pi1/Ibar1, Pi2/Ibar2, (Pi3 - l)/Ibar3).
inline Vec3 body_angular_velocity(const Vec3& pi, double l, const InertiaParams& p) {
  return {pi.x / p.Ibar1, pi.y / p.Ibar2, (pi.z - l) / p.Ibar3};
}

/// Momenta from velocities:
/// Pi_k = Ibar_k Omega_k (k = 1, 2), Pi_3 = Ibar3 Omega3 + J3 (Omega3 + alphadot),
/// l = J3 (Omega3 + alphadot).
inline ReducedStateC legendre_forward(const VelocityState& v, const InertiaParams& p) {
  const double l = p.J3 * (v.Omega.z + v.alphadot);
  return {{p.Ibar1 * v.Omega.x, p.Ibar2 * v.Omega.y, p.Ibar3 * v.Omega.z + l}, v.alpha, l};
}

inline VelocityState legendre_inverse(const ReducedStateC& s, const InertiaParams& p) {
  const Vec3 omega = body_angular_velocity(s.Pi, s.l, p);
  return {omega, s.alpha, s.l / p.J3 - omega.z};
}

/// Kinetic energy in momentum variables:
/// H = (Pi1^2/Ibar1 + Pi2^2/Ibar2 + (Pi3 - l)^2/Ibar3 + l^2/J3) / 2.
/// Independent of alpha.
inline double hamiltonian_c(const ReducedStateC& s, const InertiaParams& p) {
  const double r = s.Pi.z - s.l;
  return 0.5 * (s.Pi.x * s.Pi.x / p.Ibar1 + s.Pi.y * s.Pi.y / p.Ibar2 + r * r / p.Ibar3 +
                s.l * s.l / p.J3);
}

/// Kinetic part plus the potential gh * (Gamma . chi).
inline double hamiltonian_n(const ReducedStateN& s, const InertiaParams& p) {
  return hamiltonian_c({s.Pi, s.alpha, s.l}, p) + p.gh * dot(s.Gamma, p.chi);
}

struct GradientC {
  Vec3 dPi{};
  double dalpha{0.0};
  double dl{0.0};
};

struct GradientN {
  Vec3 dPi{};
  Vec3 dGamma{};
  double dalpha{0.0};
  double dl{0.0};
};

/// Time-derivative of a ReducedStateC.
struct TangentC {
  Vec3 dPi{};
  double dalpha{0.0};
  double dl{0.0};
};

/// Time-derivative of a ReducedStateN.
struct TangentN {
  Vec3 dPi{};
  Vec3 dGamma{};
  double dalpha{0.0};
  double dl{0.0};
};

inline TangentC operator+(const TangentC& a, const TangentC& b) {
  return {a.dPi + b.dPi, a.dalpha + b.dalpha, a.dl + b.dl};
}
inline TangentC operator*(double s, const TangentC& t) { return {s * t.dPi, s * t.dalpha, s * t.dl}; }

inline TangentN operator+(const TangentN& a, const TangentN& b) {
  return {a.dPi + b.dPi, a.dGamma + b.dGamma, a.dalpha + b.dalpha, a.dl + b.dl};
}
inline TangentN operator*(double s, const TangentN& t) {
  return {s * t.dPi, s * t.dGamma, s * t.dalpha, s * t.dl};
}

inline GradientC grad_hamiltonian_c(const ReducedStateC& s, const InertiaParams& p) {
  const Vec3 omega = body_angular_velocity(s.Pi, s.l, p);
  return {omega, 0.0, -omega.z + s.l / p.J3};
}

inline GradientN grad_hamiltonian_n(const ReducedStateN& s, const InertiaParams& p) {
  const GradientC g = grad_hamiltonian_c({s.Pi, s.alpha, s.l}, p);
  return {g.dPi, p.gh * p.chi, 0.0, g.dl};
}

/// Flat coordinates used by the bracket and Hamilton-Jacobi evaluators.
/// Coincident: [Pi1, Pi2, Pi3, alpha, l].
/// Non-coincident: [Pi1, Pi2, Pi3, Gamma1, Gamma2, Gamma3, alpha, l].
using PointC = std::array<double, 5>;
using PointN = std::array<double, 8>;

inline PointC pack(const ReducedStateC& s) { return {s.Pi.x, s.Pi.y, s.Pi.z, s.alpha, s.l}; }

inline ReducedStateC unpack_c(const PointC& x) { return {{x[0], x[1], x[2]}, x[3], x[4]}; }

inline PointN pack(const ReducedStateN& s) {
  return {s.Pi.x, s.Pi.y, s.Pi.z, s.Gamma.x, s.Gamma.y, s.Gamma.z, s.alpha, s.l};
}

inline ReducedStateN unpack_n(const PointN& x) {
  return {{x[0], x[1], x[2]}, {x[3], x[4], x[5]}, x[6], x[7]};
}

inline PointC pack(const TangentC& t) { return {t.dPi.x, t.dPi.y, t.dPi.z, t.dalpha, t.dl}; }

inline TangentC unpack_tangent_c(const PointC& x) { return {{x[0], x[1], x[2]}, x[3], x[4]}; }

inline PointN pack(const TangentN& t) {
  return {t.dPi.x, t.dPi.y, t.dPi.z, t.dGamma.x, t.dGamma.y, t.dGamma.z, t.dalpha, t.dl};
}

inline TangentN unpack_tangent_n(const PointN& x) {
  return {{x[0], x[1], x[2]}, {x[3], x[4], x[5]}, x[6], x[7]};
}

}  // namespace gyrostat
