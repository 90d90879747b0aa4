#pragma once

#include <cstdint>
#include <random>

#include "gyrostat/model.hpp"
#include "gyrostat/so3.hpp"
#include "gyrostat/vec3.hpp"

namespace gyrostat {

/// Seeded sampler for property tests and the residual suites. The uniform
/// mapping is spelled out (instead of std::uniform_real_distribution) so that
/// a given seed produces the same stream on every standard library.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) {
    const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  Vec3 vec3(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }

  Vec3 unit_vec3() {
    for (;;) {
      const Vec3 v = vec3(-1.0, 1.0);
      const double n = norm(v);
      if (n > 1e-3) return v / n;
    }
  }

  Rotation rotation() { return exp_so3(uniform(0.0, 3.0) * unit_vec3()); }

  /// Inertias and J3 in [lo, hi]; gh likewise when with_gravity; chi random unit.
  InertiaParams params(double lo, double hi, bool with_gravity) {
    InertiaParams p;
    p.Ibar1 = uniform(lo, hi);
    p.Ibar2 = uniform(lo, hi);
    p.Ibar3 = uniform(lo, hi);
    p.J3 = uniform(lo, hi);
    p.gh = with_gravity ? uniform(lo, hi) : 0.0;
    p.chi = with_gravity ? unit_vec3() : Vec3{0.0, 0.0, 1.0};
    return p;
  }

  ReducedStateC state_c(double amp = 2.0) {
    return {vec3(-amp, amp), uniform(-amp, amp), uniform(-amp, amp)};
  }

  ReducedStateN state_n(double amp = 2.0) {
    return {vec3(-amp, amp), vec3(-amp, amp), uniform(-amp, amp), uniform(-amp, amp)};
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace gyrostat
