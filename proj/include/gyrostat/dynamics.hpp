#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gyrostat/errors.hpp"
#include "gyrostat/mat3.hpp"
#include "gyrostat/model.hpp"
#include "gyrostat/so3.hpp"
#include "gyrostat/vec3.hpp"

namespace gyrostat {

/// Rotor torque as a function of the reduced state and time. Taking the
/// reduced state (never the attitude) encodes the group-invariance the
/// reduction requires: the same law drives the full and the reduced dynamics.
template <class State>
using ControlLaw = std::function<double(const State&, double)>;

template <class State>
ControlLaw<State> constant_control(double u) {
  return [u](const State&, double) { return u; };
}

/// u = -gain * l.
template <class State>
ControlLaw<State> feedback_control(double gain) {
  return [gain](const State& s, double) { return -gain * s.l; };
}

/// Reduced Euler equations of the coincident case:
///   Pidot  = Pi x Omega,  Omega = (Pi1/Ibar1, Pi2/Ibar2, (Pi3 - l)/Ibar3)
///   alphadot = -(Pi3 - l)/Ibar3 + l/J3
///   ldot   = 0
inline TangentC vf_reduced_c(const ReducedStateC& s, const InertiaParams& p) {
  const Vec3 omega = body_angular_velocity(s.Pi, s.l, p);
  return {cross(s.Pi, omega), -omega.z + s.l / p.J3, 0.0};
}

/// Non-coincident case adds the gravity torque and the advected direction:
///   Pidot    = Pi x Omega + gh * (Gamma x chi)
///   Gammadot = Gamma x Omega
inline TangentN vf_reduced_n(const ReducedStateN& s, const InertiaParams& p) {
  const Vec3 omega = body_angular_velocity(s.Pi, s.l, p);
  return {cross(s.Pi, omega) + p.gh * cross(s.Gamma, p.chi), cross(s.Gamma, omega),
          -omega.z + s.l / p.J3, 0.0};
}

namespace detail {

inline double checked_torque(double u) {
  if (!std::isfinite(u)) throw NonFiniteError("control law returned a non-finite torque");
  return u;
}

}  // namespace detail

/// Vertical lift of the rotor torque: the only effect of u is an additive
/// contribution to ldot. All other tangent components pass through untouched.
inline TangentC apply_control(TangentC base, const ControlLaw<ReducedStateC>& u,
                              const ReducedStateC& s, double t) {
  if (u) base.dl += detail::checked_torque(u(s, t));
  return base;
}

inline TangentN apply_control(TangentN base, const ControlLaw<ReducedStateN>& u,
                              const ReducedStateN& s, double t) {
  if (u) base.dl += detail::checked_torque(u(s, t));
  return base;
}

/// Attitude plus reduced state. The attitude matrix is expected to satisfy
/// the rotation invariants; fixed-step integration lets it drift slightly and
/// repairs it on the reorthonormalization cadence.
struct FullStateC {
  Mat3 A{Mat3::identity()};
  ReducedStateC reduced{};
};

struct FullStateN {
  Mat3 A{Mat3::identity()};
  ReducedStateN reduced{};
};

struct FullTangentC {
  Mat3 dA{};
  TangentC reduced{};
};

struct FullTangentN {
  Mat3 dA{};
  TangentN reduced{};
};

inline FullTangentC operator+(const FullTangentC& a, const FullTangentC& b) {
  return {a.dA + b.dA, a.reduced + b.reduced};
}
inline FullTangentC operator*(double s, const FullTangentC& t) {
  return {s * t.dA, s * t.reduced};
}
inline FullTangentN operator+(const FullTangentN& a, const FullTangentN& b) {
  return {a.dA + b.dA, a.reduced + b.reduced};
}
inline FullTangentN operator*(double s, const FullTangentN& t) {
  return {s * t.dA, s * t.reduced};
}

inline bool is_finite(const FullStateC& s) { return is_finite(s.A) && is_finite(s.reduced); }
inline bool is_finite(const FullStateN& s) { return is_finite(s.A) && is_finite(s.reduced); }

/// Left-trivialized kinematics Adot = A hat(Omega) on top of the controlled
/// reduced field.
inline FullTangentC vf_full(const FullStateC& s, const InertiaParams& p,
                            const ControlLaw<ReducedStateC>& u = {}, double t = 0.0) {
  const Vec3 omega = body_angular_velocity(s.reduced.Pi, s.reduced.l, p);
  return {s.A * hat(omega), apply_control(vf_reduced_c(s.reduced, p), u, s.reduced, t)};
}

inline FullTangentN vf_full(const FullStateN& s, const InertiaParams& p,
                            const ControlLaw<ReducedStateN>& u = {}, double t = 0.0) {
  const Vec3 omega = body_angular_velocity(s.reduced.Pi, s.reduced.l, p);
  return {s.A * hat(omega), apply_control(vf_reduced_n(s.reduced, p), u, s.reduced, t)};
}

// --- state + c * tangent, per state type -----------------------------------

inline ReducedStateC advanced(const ReducedStateC& s, double c, const TangentC& k) {
  return {s.Pi + c * k.dPi, s.alpha + c * k.dalpha, s.l + c * k.dl};
}

inline ReducedStateN advanced(const ReducedStateN& s, double c, const TangentN& k) {
  return {s.Pi + c * k.dPi, s.Gamma + c * k.dGamma, s.alpha + c * k.dalpha, s.l + c * k.dl};
}

inline FullStateC advanced(const FullStateC& s, double c, const FullTangentC& k) {
  return {s.A + c * k.dA, advanced(s.reduced, c, k.reduced)};
}

inline FullStateN advanced(const FullStateN& s, double c, const FullTangentN& k) {
  return {s.A + c * k.dA, advanced(s.reduced, c, k.reduced)};
}

// Attitude repair: a no-op for reduced states.
inline void repair_attitude(ReducedStateC&) {}
inline void repair_attitude(ReducedStateN&) {}
inline void repair_attitude(FullStateC& s) { s.A = reorthonormalize_matrix(s.A); }
inline void repair_attitude(FullStateN& s) { s.A = reorthonormalize_matrix(s.A); }

/// One classical RK4 step of ds/dt = f(s, t).
template <class State, class Field>
State rk4_step(const Field& f, const State& s, double t, double dt) {
  const auto k1 = f(s, t);
  const auto k2 = f(advanced(s, 0.5 * dt, k1), t + 0.5 * dt);
  const auto k3 = f(advanced(s, 0.5 * dt, k2), t + 0.5 * dt);
  const auto k4 = f(advanced(s, dt, k3), t + dt);
  return advanced(s, dt / 6.0, k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Time-stamped trajectory sample.
template <class State>
struct TrajectorySample {
  double t{0.0};
  State state{};
};

template <class State>
using Trajectory = std::vector<TrajectorySample<State>>;

template <class State>
struct IntegrateOptions {
  int stride{1};              // retain every stride-th step (plus t = 0)
  int reorth_every{100};      // attitude repair cadence; <= 0 disables
  std::function<void(double, const State&)> observer{};  // called on retained samples
};

namespace detail {

template <class State>
void check_finite(const State& s, long step) {
  if (!is_finite(s))
    throw NonFiniteError("integration produced a non-finite state at step " +
                         std::to_string(step));
}

}  // namespace detail

/// Fixed-step RK4 integration. dt > 0, steps >= 1. Full-state attitudes are
/// reorthonormalized every reorth_every steps.
template <class State, class Field>
Trajectory<State> integrate_rk4(const Field& f, State s, double dt, long steps,
                                const IntegrateOptions<State>& opt = {}) {
  Trajectory<State> out;
  const int stride = opt.stride > 0 ? opt.stride : 1;
  out.reserve(static_cast<std::size_t>(steps / stride) + 2);
  double t = 0.0;
  detail::check_finite(s, 0);
  out.push_back({t, s});
  if (opt.observer) opt.observer(t, s);
  for (long k = 1; k <= steps; ++k) {
    s = rk4_step(f, s, t, dt);
    t = static_cast<double>(k) * dt;
    if (opt.reorth_every > 0 && k % opt.reorth_every == 0) repair_attitude(s);
    detail::check_finite(s, k);
    if (k % stride == 0) {
      out.push_back({t, s});
      if (opt.observer) opt.observer(t, s);
    }
  }
  return out;
}

namespace detail {

// Body angular velocity extracted from a left-trivialized full tangent,
// hat(omega) = A^T dA. The product is skew to rounding when A is orthogonal.
inline Vec3 body_velocity_of(const Mat3& A, const Mat3& dA) {
  const Mat3 k = transpose(A) * dA;
  return {0.5 * (k(2, 1) - k(1, 2)), 0.5 * (k(0, 2) - k(2, 0)), 0.5 * (k(1, 0) - k(0, 1))};
}

// Stage state of the Munthe-Kaas step: exponential coordinate relative to the
// step's base attitude, plus the reduced state.
template <class Reduced, class Tangent>
struct MkStage {
  Vec3 theta{};
  Reduced reduced{};
};

}  // namespace detail

/// Lie group Munthe-Kaas RK4: the attitude is updated by exp increments, so
/// A never leaves SO(3) and no reorthonormalization is needed. The reduced
/// part sees the same classical RK4 stages.
template <class FullState, class Field>
Trajectory<FullState> integrate_lie_rkmk4(const Field& f, FullState s, double dt, long steps,
                                          const IntegrateOptions<FullState>& opt = {}) {
  Trajectory<FullState> out;
  const int stride = opt.stride > 0 ? opt.stride : 1;
  out.reserve(static_cast<std::size_t>(steps / stride) + 2);
  double t = 0.0;
  detail::check_finite(s, 0);
  out.push_back({t, s});
  if (opt.observer) opt.observer(t, s);

  using Reduced = decltype(s.reduced);
  auto stage_derivative = [&f](const FullState& base, const Vec3& theta, const Reduced& red,
                               double time) {
    FullState probe;
    probe.A = base.A * exp_so3_matrix(theta);
    probe.reduced = red;
    const auto tan = f(probe, time);
    const Vec3 omega = detail::body_velocity_of(probe.A, tan.dA);
    // Left-trivialized kinematics A exp(theta): theta' = dexpinv(-theta, omega).
    return std::make_pair(dexpinv(-1.0 * theta, omega), tan.reduced);
  };

  for (long k = 1; k <= steps; ++k) {
    const auto [w1, r1] = stage_derivative(s, Vec3{}, s.reduced, t);
    const auto [w2, r2] =
        stage_derivative(s, 0.5 * dt * w1, advanced(s.reduced, 0.5 * dt, r1), t + 0.5 * dt);
    const auto [w3, r3] =
        stage_derivative(s, 0.5 * dt * w2, advanced(s.reduced, 0.5 * dt, r2), t + 0.5 * dt);
    const auto [w4, r4] = stage_derivative(s, dt * w3, advanced(s.reduced, dt, r3), t + dt);
    const Vec3 theta = (dt / 6.0) * (w1 + 2.0 * w2 + 2.0 * w3 + w4);
    s.A = s.A * exp_so3_matrix(theta);
    s.reduced = advanced(s.reduced, dt / 6.0, r1 + 2.0 * r2 + 2.0 * r3 + r4);
    t = static_cast<double>(k) * dt;
    detail::check_finite(s, k);
    if (k % stride == 0) {
      out.push_back({t, s});
      if (opt.observer) opt.observer(t, s);
    }
  }
  return out;
}

}  // namespace gyrostat
