#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "gyrostat/dynamics.hpp"
#include "gyrostat/model.hpp"
#include "gyrostat/so3.hpp"
#include "gyrostat/vec3.hpp"

namespace gyrostat {

/// Value of the momentum map. The coincident case carries only the spatial
/// angular momentum mu; the non-coincident case pairs it with the advected
/// spatial vector a.
struct MomentumValue {
  Vec3 mu{};
  std::optional<Vec3> a{};
};

/// mu = A Pi, the spatial angular momentum. Conserved along every torque-free
/// trajectory of the coincident system (and under rotor torque, which is
/// internal).
inline MomentumValue momentum_map_c(const FullStateC& s) {
  return {s.A * s.reduced.Pi, std::nullopt};
}

/// (mu, a) = (A Pi, A Gamma). Only the pairing mu . a (equal to the Casimir
/// Pi . Gamma) and the component of mu along the gravity axis are conserved
/// scalars; a itself is constant along reconstructed trajectories.
inline MomentumValue momentum_map_n(const FullStateN& s) {
  return {s.A * s.reduced.Pi, s.A * s.reduced.Gamma};
}

/// Orbit invariants of the so*(3) bracket: [ |Pi|^2 ].
inline std::vector<double> casimirs(const ReducedStateC& s) { return {norm_sq(s.Pi)}; }

/// Orbit invariants of the se*(3) bracket: [ Pi . Gamma, |Gamma|^2 ].
inline std::vector<double> casimirs(const ReducedStateN& s) {
  return {dot(s.Pi, s.Gamma), norm_sq(s.Gamma)};
}

namespace detail {

inline double tangent_gap(const TangentC& a, const TangentC& b) {
  return std::fmax(max_abs(a.dPi - b.dPi),
                   std::fmax(std::fabs(a.dalpha - b.dalpha), std::fabs(a.dl - b.dl)));
}

inline double tangent_gap(const TangentN& a, const TangentN& b) {
  return std::fmax(std::fmax(max_abs(a.dPi - b.dPi), max_abs(a.dGamma - b.dGamma)),
                   std::fmax(std::fabs(a.dalpha - b.dalpha), std::fabs(a.dl - b.dl)));
}

}  // namespace detail

/// Commutation of reduction with dynamics: push the controlled full-state
/// field through the projection that forgets the attitude, and compare with
/// the controlled reduced field at the projected point. The projection is
/// coordinate-forgetting, so the two routes agree to rounding.
inline double commutation_residual(const FullStateC& s, const InertiaParams& p,
                                   const ControlLaw<ReducedStateC>& u = {}, double t = 0.0) {
  const FullTangentC full = vf_full(s, p, u, t);
  const TangentC reduced = apply_control(vf_reduced_c(s.reduced, p), u, s.reduced, t);
  return detail::tangent_gap(full.reduced, reduced);
}

inline double commutation_residual(const FullStateN& s, const InertiaParams& p,
                                   const ControlLaw<ReducedStateN>& u = {}, double t = 0.0) {
  const FullTangentN full = vf_full(s, p, u, t);
  const TangentN reduced = apply_control(vf_reduced_n(s.reduced, p), u, s.reduced, t);
  return detail::tangent_gap(full.reduced, reduced);
}

}  // namespace gyrostat
