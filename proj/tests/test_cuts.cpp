#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "pooling/cuts.hpp"
#include "pooling/rng.hpp"

using namespace pooling;
using namespace pooling::cuts;

namespace {

constexpr double kTight = 1e-12;
constexpr double kValid = 1e-9;

// Feasible upper endpoint of the segment at grid value r.
double top(double gamma, double upsilon, double r) {
  if (r == 0.0 || gamma * r <= upsilon) return gamma;
  return upsilon / r;
}

std::vector<double> dyadic_grid(int level) {
  std::vector<double> grid;
  double step = grid_step(level);
  int points = 1 << (level - 1);
  for (int k = 0; k <= points; ++k) grid.push_back(k * step);
  return grid;
}

// Canonical bit decomposition of a grid value: r = sum 2^(1-p) z_p.
std::vector<int> bits_of(double r, int level) {
  std::vector<int> z(level, 0);
  for (int p = 1; p <= level; ++p) {
    double w = std::ldexp(1.0, 1 - p);
    if (r >= w - 1e-12) {
      z[p - 1] = 1;
      r -= w;
    }
  }
  return z;
}

void check_cut_family_valid(double gamma, double upsilon, int level) {
  auto params = hull_params(gamma, upsilon, level);
  auto rounding = rounding_cuts(params);
  auto bit_bounds = p_dependent_bounds(gamma, upsilon, level);
  auto tangent = lti_cuts(gamma, upsilon, level);
  std::vector<LinearCut> secant;
  if (level >= 2) secant = lti_strengthened(gamma, upsilon, level);

  for (double r : dyadic_grid(level)) {
    double t_max = top(gamma, upsilon, r);
    auto bits = bits_of(r, level);
    for (int s = 0; s <= 11; ++s) {
      double t = t_max * s / 11.0;
      double w = t * r;
      for (const auto& cut : rounding)
        CHECK(cut.violation(r, t, w) <= kValid);
      for (const auto& cut : tangent) CHECK(cut.violation(r, t, w) <= kValid);
      for (const auto& cut : secant) CHECK(cut.violation(r, t, w) <= kValid);
      // p-dependent bounds act on the lifted variables V_p = t * z_p.
      for (const auto& b : bit_bounds) {
        double z = bits[b.bit - 1];
        CHECK(t * z <= b.coefficient * z + kValid);
      }
    }
  }
}

}  // namespace

TEST_CASE("grid step halves per level") {
  CHECK(grid_step(1) == 1.0);
  CHECK(grid_step(3) == 0.25);
  CHECK(grid_step(8) == std::ldexp(1.0, -7));
  CHECK_THROWS_AS(grid_step(0), std::invalid_argument);
}

TEST_CASE("hull parameters: worked example with one cut") {
  HullParams p = hull_params(4.0, 2.2, 3);
  CHECK(p.r_low == 0.5);
  CHECK(p.r_high == 0.75);
  // Defining formula evaluated bitwise: one ulp off the decimal literal -3.6
  // because 2.2 itself is not exactly representable.
  CHECK(p.chord_slope == (4.0 - 2.2) / (0.5 - 1.0));
  CHECK(std::abs(p.step_slope - (-64.0 / 15.0)) <= kTight);
  CHECK(p.single_cut());

  auto cuts = rounding_cuts(p);
  REQUIRE(cuts.size() == 1);
  CHECK(cuts[0].split_coef == doctest::Approx(3.6).epsilon(1e-12));
  CHECK(cuts[0].inflow_coef == 1.0);
  CHECK(cuts[0].outflow_coef == 0.0);
  CHECK(cuts[0].rhs == doctest::Approx(5.8).epsilon(1e-12));
}

TEST_CASE("hull parameters: worked example with two cuts") {
  HullParams p = hull_params(4.0, 2.8, 3);
  CHECK(p.r_low == 0.5);
  CHECK(p.r_high == 0.75);
  CHECK(std::abs(p.chord_slope - (-2.4)) <= kTight);
  CHECK(std::abs(p.step_slope - (-16.0 / 15.0)) <= kTight);
  CHECK(!p.single_cut());

  auto cuts = rounding_cuts(p);
  REQUIRE(cuts.size() == 2);
  CHECK(cuts[0].label == "upper-step");
  CHECK(std::abs(cuts[0].split_coef - 16.0 / 15.0) <= kTight);
  CHECK(std::abs(cuts[0].rhs - 68.0 / 15.0) <= kTight);
  CHECK(cuts[1].label == "lower-secant");
  CHECK(std::abs(cuts[1].split_coef - 56.0 / 15.0) <= kTight);
  CHECK(std::abs(cuts[1].rhs - 98.0 / 15.0) <= kTight);
}

TEST_CASE("hull parameters: coarsest grid degenerates to one chord") {
  HullParams p = hull_params(4.0, 3.9, 1);
  CHECK(p.r_low == 0.0);
  CHECK(p.r_high == 1.0);
  CHECK(std::abs(p.chord_slope - (-0.1)) <= kTight);
  // r_high == 1 forces the chord regardless of the slope comparison.
  auto cuts = rounding_cuts(p);
  REQUIRE(cuts.size() == 1);
  CHECK(cuts[0].label == "chord");
  CHECK(std::abs(cuts[0].rhs - 4.0) <= kTight);
}

TEST_CASE("degenerate bounds are rejected") {
  CHECK_THROWS_AS(hull_params(4.0, 4.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(hull_params(4.0, 5.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(hull_params(4.0, 0.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(hull_params(4.0, 2.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(brute_force_hull(4.0, 2.0, 21), std::invalid_argument);
}

TEST_CASE("closed-form hull vertices match the worked examples") {
  auto one = hull_facets(hull_params(4.0, 2.2, 3));
  std::vector<std::array<double, 2>> expect_one = {
      {0.0, 0.0}, {1.0, 0.0}, {1.0, 2.2}, {0.5, 4.0}, {0.0, 4.0}};
  CHECK(one.vertices == expect_one);

  auto two = hull_facets(hull_params(4.0, 2.8, 3));
  REQUIRE(two.vertices.size() == 6);
  CHECK(two.vertices[3][0] == 0.75);
  CHECK(std::abs(two.vertices[3][1] - 56.0 / 15.0) <= kTight);
}

TEST_CASE("brute force agrees with the closed form across a seeded sweep") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    double gamma = rng.uniform(1.0, 100.0);
    double upsilon = gamma * rng.uniform(1e-6, 1.0 - 1e-9);
    int level = 1 + static_cast<int>(rng.next() % 8);
    CAPTURE(gamma);
    CAPTURE(upsilon);
    CAPTURE(level);
    auto closed = hull_facets(hull_params(gamma, upsilon, level));
    auto oracle = brute_force_hull(gamma, upsilon, level);
    REQUIRE(closed.vertices.size() == oracle.vertices.size());
    for (std::size_t v = 0; v < closed.vertices.size(); ++v) {
      CHECK(std::abs(closed.vertices[v][0] - oracle.vertices[v][0]) <= kValid);
      CHECK(std::abs(closed.vertices[v][1] - oracle.vertices[v][1]) <= kValid);
    }
  }
}

TEST_CASE("knife-edge: bound exactly on a grid point") {
  // gamma * r == upsilon exactly at r = 0.25: the breakpoint lands on r.
  HullParams p = hull_params(8.0, 2.0, 3);
  CHECK(p.r_low == 0.25);
  auto closed = hull_facets(p);
  auto oracle = brute_force_hull(8.0, 2.0, 3);
  REQUIRE(closed.vertices.size() == oracle.vertices.size());
  for (std::size_t v = 0; v < closed.vertices.size(); ++v)
    for (int d = 0; d < 2; ++d)
      CHECK(std::abs(closed.vertices[v][d] - oracle.vertices[v][d]) <= kValid);
}

TEST_CASE("hull collapses cleanly when the low breakpoint is zero") {
  HullParams p = hull_params(4.0, 0.5, 2);
  CHECK(p.r_low == 0.0);
  auto closed = hull_facets(p);
  auto oracle = brute_force_hull(4.0, 0.5, 2);
  CHECK(closed.vertices == std::vector<std::array<double, 2>>{
                               {0.0, 0.0}, {1.0, 0.0}, {1.0, 0.5}, {0.0, 4.0}});
  REQUIRE(closed.vertices.size() == oracle.vertices.size());
}

TEST_CASE("facets support every feasible grid segment") {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    double gamma = rng.uniform(1.0, 50.0);
    double upsilon = gamma * rng.uniform(0.05, 0.95);
    int level = 1 + static_cast<int>(rng.next() % 6);
    auto hull = hull_facets(hull_params(gamma, upsilon, level));
    for (double r : dyadic_grid(level))
      for (double t : {0.0, 0.5 * top(gamma, upsilon, r),
                       top(gamma, upsilon, r)})
        for (const auto& facet : hull.facets)
          CHECK(facet.violation(r, t, t * r) <= kValid);
  }
}

TEST_CASE("rounding cuts are tight at the hull breakpoints") {
  SplitMix64 rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    double gamma = rng.uniform(1.0, 50.0);
    double upsilon = gamma * rng.uniform(0.05, 0.95);
    int level = 1 + static_cast<int>(rng.next() % 6);
    auto params = hull_params(gamma, upsilon, level);
    auto cuts = rounding_cuts(params);
    auto envelope = [&](double r) {
      double cap = gamma;
      for (const auto& cut : cuts)
        cap = std::min(cap, cut.rhs - cut.split_coef * r);
      return cap;
    };
    // Never below the feasible top of any grid segment...
    for (double r : dyadic_grid(level))
      CHECK(envelope(r) >= top(gamma, upsilon, r) - kValid);
    // ...and exactly on it at the breakpoints each cut interpolates.
    double scale = gamma;
    CHECK(std::abs(envelope(params.r_low) - gamma) <= kValid * scale);
    CHECK(std::abs(envelope(1.0) - upsilon) <= kValid * scale);
    if (!params.single_cut())
      CHECK(std::abs(envelope(params.r_high) - upsilon / params.r_high) <=
            kValid * scale);
  }
}

TEST_CASE("p-dependent bounds: worked examples and strictness") {
  auto one = p_dependent_bounds(4.0, 2.2, 3);
  REQUIRE(one.size() == 1);
  CHECK(one[0].bit == 1);
  CHECK(one[0].coefficient == 2.2);

  auto three = p_dependent_bounds(4.0, 0.9, 4);
  REQUIRE(three.size() == 3);
  CHECK(three[0].coefficient == 0.9);
  CHECK(three[1].coefficient == 1.8);
  CHECK(three[2].coefficient == 3.6);  // p = 4 would give 7.2 >= 4, dropped

  // A coefficient exactly at the inflow bound is not an improvement.
  auto strict = p_dependent_bounds(4.0, 2.0, 5);
  REQUIRE(strict.size() == 1);
  CHECK(strict[0].coefficient == 2.0);
}

TEST_CASE("lifted tangent cuts: shape and the full validity sweep") {
  auto tangent = lti_cuts(4.0, 2.8, 3);
  REQUIRE(tangent.size() == 3);
  // At rho = 1 the cut reads 2w - upsilon*r - f <= 0.
  CHECK(tangent[0].split_coef == -2.8);
  CHECK(tangent[0].inflow_coef == -1.0);
  CHECK(tangent[0].outflow_coef == 2.0);
  CHECK(tangent[0].rhs == 0.0);

  auto secant = lti_strengthened(4.0, 2.8, 3);
  REQUIRE(secant.size() == 2);
  CHECK(std::abs(secant[0].split_coef - (-2.8 / 2.25)) <= kTight);
  CHECK(std::abs(secant[0].inflow_coef - (-1.25 / 2.25)) <= kTight);
  CHECK(secant[0].outflow_coef == 1.0);
  CHECK_THROWS_AS(lti_strengthened(4.0, 2.8, 1), std::invalid_argument);

  SplitMix64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    double gamma = rng.uniform(1.0, 100.0);
    double upsilon = gamma * rng.uniform(0.01, 0.99);
    int level = 2 + static_cast<int>(rng.next() % 5);
    check_cut_family_valid(gamma, upsilon, level);
  }
}

TEST_CASE("value-list parameters mirror the dyadic ones") {
  ValueHullParams p = value_hull_params(4.0, 2.2, {0.0, 0.5, 1.0});
  CHECK(p.low_index == 1);
  CHECK(p.r_low == 0.5);
  CHECK(p.r_high == 1.0);
  CHECK(p.chord_slope == (4.0 - 2.2) / (0.5 - 1.0));
  // Next value is 1, so both lines coincide bitwise.
  CHECK(p.step_slope == p.chord_slope);
  CHECK(p.single_cut());
  auto cuts = rounding_cuts(p);
  REQUIRE(cuts.size() == 1);
  CHECK(cuts[0].split_coef == doctest::Approx(3.6).epsilon(1e-12));
  CHECK(cuts[0].rhs == doctest::Approx(5.8).epsilon(1e-12));
}

TEST_CASE("value-list boundary: capacity exactly reachable at a value") {
  // 4 * 0.55 == 2.2 in floating point, so 0.55 still fits.
  ValueHullParams p = value_hull_params(4.0, 2.2, {0.0, 0.55, 0.6, 1.0});
  CHECK(p.low_index == 1);
  CHECK(p.r_high == 0.6);
}

TEST_CASE("value lists must run 0 to 1 strictly increasing") {
  CHECK_THROWS_AS(value_hull_params(4.0, 2.2, {0.5, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(value_hull_params(4.0, 2.2, {0.0, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(value_hull_params(4.0, 2.2, {0.0, 0.5, 0.5, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(value_bounds(4.0, 2.2, {0.0, 0.9, 0.5, 1.0}),
                  std::invalid_argument);
}

TEST_CASE("value bounds cover exactly the infeasible-at-capacity entries") {
  auto bounds = value_bounds(4.0, 2.2, {0.0, 0.5, 1.0});
  REQUIRE(bounds.size() == 1);
  CHECK(bounds[0].index == 2);
  CHECK(bounds[0].value == 1.0);
  CHECK(bounds[0].coefficient == 2.2);

  // On the fine dyadic list, every value above 2.2/4 = 0.55 needs one.
  std::vector<double> grid = dyadic_grid(4);
  auto fine = value_bounds(4.0, 2.2, grid);
  REQUIRE(fine.size() == 4);  // 0.625, 0.75, 0.875, 1.0
  CHECK(fine[0].value == 0.625);
  CHECK(std::abs(fine[0].coefficient - 2.2 / 0.625) <= kTight);
}

TEST_CASE("sbn grid reproduces its own single-cut parameters") {
  std::vector<double> grid = dyadic_grid(4);
  ValueHullParams p = value_hull_params(4.0, 2.2, grid);
  CHECK(p.r_low == 0.5);
  CHECK(p.r_high == 0.625);
  CHECK(p.chord_slope == (4.0 - 2.2) / (0.5 - 1.0));
  CHECK(std::abs(p.step_slope - (-3.84)) <= kTight);
  CHECK(p.single_cut());
}
