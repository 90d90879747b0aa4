#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>

#include "gyrostat/errors.hpp"
#include "gyrostat/model.hpp"
#include "gyrostat/vec3.hpp"

namespace gyrostat {

/// Central-difference step, 1e-6 * max(1, |x|).
inline double fd_step(double x) { return 1e-6 * std::fmax(1.0, std::fabs(x)); }

/// Smooth real-valued function on a Dim-dimensional coordinate patch together
/// with its gradient. The gradient slot is exact for built-in coordinate
/// functions and a central difference for wrapped user functions, so a bracket
/// with a coordinate function in one slot only approximates the other factor.
///
/// Evaluation must be thread-safe: property tests may probe fields from
/// several threads at once. The Jacobi identity of the brackets below holds
/// analytically and is not asserted numerically (triple differencing is too
/// noisy to gate on).
template <std::size_t Dim>
struct ScalarField {
  using Point = std::array<double, Dim>;

  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;

  double operator()(const Point& x) const { return value(x); }
};

/// Wraps a callable; gradient by central differences.
template <std::size_t Dim, class F>
ScalarField<Dim> make_field(F f) {
  ScalarField<Dim> sf;
  sf.value = std::move(f);
  auto val = sf.value;
  sf.gradient = [val](const std::array<double, Dim>& x) {
    std::array<double, Dim> g{};
    for (std::size_t i = 0; i < Dim; ++i) {
      const double h = fd_step(x[i]);
      auto xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      g[i] = (val(xp) - val(xm)) / (2.0 * h);
    }
    return g;
  };
  return sf;
}

/// The i-th coordinate function, with exact gradient e_i.
template <std::size_t Dim>
ScalarField<Dim> coordinate_field(std::size_t i) {
  ScalarField<Dim> sf;
  sf.value = [i](const std::array<double, Dim>& x) { return x[i]; };
  sf.gradient = [i](const std::array<double, Dim>&) {
    std::array<double, Dim> g{};
    g[i] = 1.0;
    return g;
  };
  return sf;
}

namespace detail {

template <std::size_t Dim>
std::array<double, Dim> checked_gradient(const ScalarField<Dim>& f,
                                         const std::array<double, Dim>& x) {
  auto g = f.gradient(x);
  for (double v : g)
    if (!std::isfinite(v)) throw NonFiniteError("bracket: gradient probe is not finite");
  return g;
}

inline Vec3 slice3(const std::array<double, 5>& g, std::size_t k) {
  return {g[k], g[k + 1], g[k + 2]};
}
inline Vec3 slice3(const std::array<double, 8>& g, std::size_t k) {
  return {g[k], g[k + 1], g[k + 2]};
}
inline Vec3 slice3(const std::array<double, 3>& g, std::size_t k) {
  return {g[k], g[k + 1], g[k + 2]};
}
inline Vec3 slice3(const std::array<double, 6>& g, std::size_t k) {
  return {g[k], g[k + 1], g[k + 2]};
}

}  // namespace detail

/// Rigid-body Lie-Poisson bracket on so*(3):
/// {F, K}(Pi) = -Pi . (grad_Pi F x grad_Pi K).
inline double bracket_so3(const ScalarField<3>& F, const ScalarField<3>& K, const Vec3& pi) {
  const std::array<double, 3> x{pi.x, pi.y, pi.z};
  const Vec3 gf = detail::slice3(detail::checked_gradient(F, x), 0);
  const Vec3 gk = detail::slice3(detail::checked_gradient(K, x), 0);
  return -dot(pi, cross(gf, gk));
}

/// Canonical bracket on T*R:
/// {F, K}(alpha, l) = dF/dalpha dK/dl - dK/dalpha dF/dl.
inline double bracket_canonical_r(const ScalarField<2>& F, const ScalarField<2>& K, double alpha,
                                  double l) {
  const std::array<double, 2> x{alpha, l};
  const auto gf = detail::checked_gradient(F, x);
  const auto gk = detail::checked_gradient(K, x);
  return gf[0] * gk[1] - gk[0] * gf[1];
}

/// Product bracket on so*(3) x R x R*: the so*(3) term plus the canonical term.
inline double bracket_product_c(const ScalarField<5>& F, const ScalarField<5>& K,
                                const ReducedStateC& s) {
  const PointC x = pack(s);
  const auto gf = detail::checked_gradient(F, x);
  const auto gk = detail::checked_gradient(K, x);
  const Vec3 gf_pi = detail::slice3(gf, 0);
  const Vec3 gk_pi = detail::slice3(gk, 0);
  return -dot(s.Pi, cross(gf_pi, gk_pi)) + (gf[3] * gk[4] - gk[3] * gf[4]);
}

/// Heavy-top Lie-Poisson bracket on se*(3):
/// {F, K}(Pi, Gamma) = -Pi . (grad_Pi F x grad_Pi K)
///                     - Gamma . (grad_Pi F x grad_Gamma K - grad_Pi K x grad_Gamma F).
inline double bracket_se3(const ScalarField<6>& F, const ScalarField<6>& K, const Vec3& pi,
                          const Vec3& gamma) {
  const std::array<double, 6> x{pi.x, pi.y, pi.z, gamma.x, gamma.y, gamma.z};
  const auto gf = detail::checked_gradient(F, x);
  const auto gk = detail::checked_gradient(K, x);
  const Vec3 gf_pi = detail::slice3(gf, 0), gf_ga = detail::slice3(gf, 3);
  const Vec3 gk_pi = detail::slice3(gk, 0), gk_ga = detail::slice3(gk, 3);
  return -dot(pi, cross(gf_pi, gk_pi)) - dot(gamma, cross(gf_pi, gk_ga) - cross(gk_pi, gf_ga));
}

/// Product bracket on se*(3) x R x R*.
inline double bracket_product_n(const ScalarField<8>& F, const ScalarField<8>& K,
                                const ReducedStateN& s) {
  const PointN x = pack(s);
  const auto gf = detail::checked_gradient(F, x);
  const auto gk = detail::checked_gradient(K, x);
  const Vec3 gf_pi = detail::slice3(gf, 0), gf_ga = detail::slice3(gf, 3);
  const Vec3 gk_pi = detail::slice3(gk, 0), gk_ga = detail::slice3(gk, 3);
  return -dot(s.Pi, cross(gf_pi, gk_pi)) -
         dot(s.Gamma, cross(gf_pi, gk_ga) - cross(gk_pi, gf_ga)) + (gf[6] * gk[7] - gk[6] * gf[7]);
}

/// Hamiltonian vector field from the bracket alone: component i of the tangent
/// is {x_i, H} with the product bracket. The coordinate slot is exact; only
/// grad H is approximated, so this is an oracle independent of the closed-form
/// fields in dynamics.hpp.
inline TangentC hamiltonian_vf_via_bracket(const ScalarField<5>& H, const ReducedStateC& s) {
  PointC t{};
  for (std::size_t i = 0; i < 5; ++i) t[i] = bracket_product_c(coordinate_field<5>(i), H, s);
  return unpack_tangent_c(t);
}

inline TangentN hamiltonian_vf_via_bracket(const ScalarField<8>& H, const ReducedStateN& s) {
  PointN t{};
  for (std::size_t i = 0; i < 8; ++i) t[i] = bracket_product_n(coordinate_field<8>(i), H, s);
  return unpack_tangent_n(t);
}

/// hamiltonian_c as a field on [Pi, alpha, l].
inline ScalarField<5> hamiltonian_field_c(const InertiaParams& p) {
  return make_field<5>([p](const PointC& x) { return hamiltonian_c(unpack_c(x), p); });
}

/// hamiltonian_n as a field on [Pi, Gamma, alpha, l].
inline ScalarField<8> hamiltonian_field_n(const InertiaParams& p) {
  return make_field<8>([p](const PointN& x) { return hamiltonian_n(unpack_n(x), p); });
}

}  // namespace gyrostat
