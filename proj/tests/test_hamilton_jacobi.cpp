#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gyrostat/hamilton_jacobi.hpp"
#include "gyrostat/sampling.hpp"

using namespace gyrostat;

namespace {

const InertiaParams kRef{3.0, 2.0, 1.0, 1.0, 0.0, {0, 0, 1}};
const InertiaParams kRefG{3.0, 2.0, 1.0, 1.0, 1.0, {0, 0, 1}};

}  // namespace

TEST_CASE("type1_residual_c: worked point") {
  const PointC g{1, 1, 1, 0, 1};
  CHECK(type1_residual_c(g, kRef) <= 1e-15);
  const TangentC common = type1_lhs_c(g, kRef);
  CHECK(common.dPi.x == Catch::Approx(-0.5).margin(1e-15));
  CHECK(common.dPi.y == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(common.dPi.z == Catch::Approx(1.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("type1_residual_c: equilibrium and random audit") {
  CHECK(type1_residual_c({0, 0, 0, 1.3, 0}, kRef) == 0.0);
  CHECK(max_abs(type1_lhs_c({0, 0, 0, 1.3, 0}, kRef).dPi) == 0.0);

  SampleRng rng(61);
  for (int i = 0; i < 1000; ++i) {
    const InertiaParams p = rng.params(0.5, 5.0, false);
    PointC g{};
    for (auto& v : g) v = rng.uniform(-2, 2);
    CHECK(type1_residual_c(g, p) <= 1e-15);
  }
}

TEST_CASE("type1_residual_n: worked point") {
  const PointN g{1, 1, 1, 0, 0, 1, 0, 1};
  CHECK(type1_residual_n(g, kRefG) <= 1e-15);
  const TangentN common = type1_lhs_n(g, kRefG);
  CHECK(common.dPi.x == Catch::Approx(-0.5).margin(1e-15));
  CHECK(common.dPi.y == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(common.dPi.z == Catch::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(common.dGamma.x == Catch::Approx(-0.5).margin(1e-15));
  CHECK(common.dGamma.y == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(common.dGamma.z == 0.0);

  // Gravity slots vanish when the Gamma slots align with chi and Pi is zero.
  const PointN rest{0, 0, 0, 0, 0, 2, 0.4, 0};
  CHECK(max_abs(type1_lhs_n(rest, kRefG).dPi) == 0.0);
  CHECK(max_abs(type1_rhs_n(rest, kRefG).dPi) == 0.0);
}

TEST_CASE("type1_residual_n: random audit") {
  SampleRng rng(62);
  for (int i = 0; i < 1000; ++i) {
    const InertiaParams p = rng.params(0.5, 5.0, true);
    PointN g{};
    for (auto& v : g) v = rng.uniform(-2, 2);
    CHECK(type1_residual_n(g, p) <= 1e-15);
  }
}

TEST_CASE("type1 sides equal the closed-form reduced fields") {
  SampleRng rng(63);
  for (int i = 0; i < 200; ++i) {
    const InertiaParams p = rng.params(0.5, 5.0, true);
    const ReducedStateN s = rng.state_n();
    const TangentN a = type1_rhs_n(pack(s), p);
    const TangentN b = vf_reduced_n(s, p);
    CHECK(max_abs(a.dPi - b.dPi) <= 1e-13);
    CHECK(max_abs(a.dGamma - b.dGamma) <= 1e-13);
    CHECK(std::fabs(a.dalpha - b.dalpha) <= 1e-13);
  }
}

TEST_CASE("closedness_residual: examples") {
  const std::array<double, 4> q{0.2, -0.1, 0.3, 0.8};

  const OneForm<4> constant = [](const std::array<double, 4>&) {
    return std::array<double, 4>{0.4, -1.2, 3.3, 0.7};
  };
  CHECK(closedness_residual<4>(constant, q) <= 1e-9);

  const auto w = [](const std::array<double, 4>& y) {
    return std::sin(y[0]) * std::cos(y[1]) + y[2] * y[2] * y[3] + 0.3 * y[0] * y[3];
  };
  CHECK(closedness_residual<4>(differential_of<4>(w), q) <= 1e-6);

  const OneForm<4> non_closed = [](const std::array<double, 4>& y) {
    return std::array<double, 4>{y[1], 0.0, 0.0, 0.0};
  };
  const double r = closedness_residual<4>(non_closed, q);
  CHECK(r == Catch::Approx(1.0).margin(1e-6));
  CHECK(r > 1e-3);
}

TEST_CASE("momentum_membership_residual: the mu = 0 family") {
  // A section whose covector is the differential of a function of alpha alone
  // sits inside the zero momentum level exactly.
  const ReducedOneFormC section = [](const ChartPoint& q) {
    return PointC{0.0, 0.0, 0.0, q.alpha, std::cos(q.alpha)};
  };
  SampleRng rng(66);
  for (int i = 0; i < 50; ++i) {
    const ChartPoint q{rng.uniform(0, 1) * rng.unit_vec3(), rng.uniform(-2, 2)};
    CHECK(momentum_membership_residual(section, q, {0, 0, 0}) == 0.0);
  }
  // A generic section misses a generic level set; the diagnostic reports it.
  const ReducedOneFormC off_level = [](const ChartPoint&) {
    return PointC{1.0, 0.0, 0.0, 0.0, 0.0};
  };
  CHECK(momentum_membership_residual(off_level, {{0, 0, 0}, 0.0}, {0, 1, 0}) ==
        Catch::Approx(std::sqrt(2.0)));
}

TEST_CASE("chart_covector extracts the genuine covector slots") {
  // A section holding a constant covector is closed regardless of the alpha
  // pass-through slot.
  const ReducedOneFormC section = [](const ChartPoint& q) {
    return PointC{1.5, -0.2, 0.8, q.alpha, 2.0};
  };
  const std::array<double, 4> q{0.1, 0.0, -0.2, 0.5};
  CHECK(closedness_residual<4>(chart_covector(section), q) <= 1e-9);
}

TEST_CASE("type2_residual_c: identity map") {
  const ReducedStateC s{{1, 1, 1}, 0.0, 1.0};
  const auto [lhs, rhs] = type2_residual_c(identity_map<5>(), identity_map<5>(), s, kRef);
  CHECK(lhs <= 1e-6);
  CHECK(rhs <= 1e-6);
}

TEST_CASE("type2_residual_c: flow maps are solutions") {
  SampleRng rng(64);
  for (double t : {0.01, 0.05, 0.1}) {
    const auto flow = reduced_flow_map_c(kRef, t);
    for (int i = 0; i < 3; ++i) {
      const ReducedStateC s = rng.state_c();
      const auto [lhs, rhs] = type2_residual_c(flow, identity_map<5>(), s, kRef);
      CHECK(lhs <= 1e-5);
      CHECK(rhs <= 1e-5);
    }
  }
}

TEST_CASE("type2_residual_c: broken map fails on both sides") {
  const ReducedPointMapC broken = [](const PointC& x) {
    return PointC{2 * x[0], x[1], x[2], x[3], x[4]};
  };
  const ReducedStateC s{{1, 1, 1}, 0.0, 1.0};
  const auto [lhs, rhs] = type2_residual_c(broken, broken, s, kRef);
  CHECK(lhs > 1e-2);
  CHECK(rhs > 1e-2);
}

TEST_CASE("type2_residual_n: battery shape") {
  SampleRng rng(65);
  const auto battery = type2_battery_n(kRefG);
  REQUIRE(battery.size() == 5);
  const ReducedStateN s = rng.state_n();
  for (const auto& entry : battery) {
    const auto [lhs, rhs] = type2_residual_n(entry.eps, entry.lam, s, kRefG);
    const bool lhs_ok = lhs < 1e-4;
    const bool rhs_ok = rhs < 1e-4;
    CHECK(lhs_ok == rhs_ok);  // never discordant
    if (entry.expect_solution) {
      CHECK(lhs_ok);
      CHECK(rhs_ok);
    }
  }
}

TEST_CASE("poisson_map_residual: examples") {
  const ReducedStateC s{{1, 1, 1}, 0.2, 0.5};
  CHECK(poisson_map_residual_c(identity_map<5>(), s) <= 1e-9);

  const auto flow = reduced_flow_map_c(kRef, 0.1);
  CHECK(poisson_map_residual_c(flow, s) <= 1e-5);

  // Doubling Pi scales the so*(3) bracket wrongly; the defect is of order |Pi|.
  const ReducedPointMapC doubling = [](const PointC& x) {
    return PointC{2 * x[0], 2 * x[1], 2 * x[2], x[3], x[4]};
  };
  const double r = poisson_map_residual_c(doubling, s);
  CHECK(r == Catch::Approx(2.0).epsilon(1e-3));  // 4{Pi_i,Pi_j} vs {.,.} at 2Pi: gap = 2|Pi_k|
}

TEST_CASE("poisson_map_residual_n: flow of the heavy direction field") {
  const ReducedStateN s{{1, 0.5, -0.3}, {0.1, 0.8, 0.4}, 0.0, 0.7};
  CHECK(poisson_map_residual_n(identity_map<8>(), s) <= 1e-9);
  const auto flow = reduced_flow_map_n(kRefG, 0.1);
  CHECK(poisson_map_residual_n(flow, s) <= 1e-5);
}
