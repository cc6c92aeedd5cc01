#pragma once

// Closed-form tightening machinery for a single bilinear block
//
//   w = f * r,   0 <= f <= inflow_bound,   w <= outflow_bound,   r in G
//
// where r is a split fraction restricted to a finite grid G (the dyadic grid
// {0, 2^(1-n), ..., 1} at level n, or an explicit strictly increasing value
// list).  Provides:
//   * the two-variable hull parameters (breakpoints and chord slopes),
//   * the rounding cuts that complete the hull description,
//   * p-dependent upper bounds on the bit-indexed linearization variables,
//   * lifted tangent inequalities and their strengthened secant form,
//   * a brute-force convex-hull oracle for verification.

#include <array>
#include <string>
#include <vector>

namespace pooling::cuts {

// Grid step 2^(1-n) of the level-n dyadic grid {0, 2^(1-n), ..., 1}.
double grid_step(int level);

// Parameters of conv{ (r, f) : r in grid, 0 <= f <= inflow_bound,
//                               f * r <= outflow_bound }.
struct HullParams {
  double inflow_bound = 0.0;   // upper bound on f (total flow into the pool)
  double outflow_bound = 0.0;  // upper bound on w = f*r (one outgoing pipe)
  int level = 0;               // grid level n; 0 for explicit value lists
  double r_low = 0.0;   // largest grid point r with inflow_bound*r <= outflow_bound
  double r_high = 0.0;  // next grid point above r_low
  double chord_slope = 0.0;  // slope of the line through (r_low, inflow_bound)
                             // and (1, outflow_bound)
  double step_slope = 0.0;   // slope of the line through (r_low, inflow_bound)
                             // and (r_high, outflow_bound / r_high)
  // True when one cut (the chord) closes the hull: chord_slope >= step_slope.
  bool single_cut() const { return chord_slope >= step_slope; }
};

// One inequality
//   split_coef * r + inflow_coef * f + outflow_coef * w <= rhs
// over the split fraction r, the pool inflow f, and the routed flow w = f*r.
// Cuts that do not involve w have outflow_coef = 0.
struct LinearCut {
  std::string label;
  double split_coef = 0.0;
  double inflow_coef = 0.0;
  double outflow_coef = 0.0;
  double rhs = 0.0;

  double violation(double r, double f, double w) const {
    return split_coef * r + inflow_coef * f + outflow_coef * w - rhs;
  }
};

// Vertex list (counterclockwise) plus a complete facet list of the
// two-variable hull in (r, f) space.
struct HullDescription {
  std::vector<std::array<double, 2>> vertices;
  std::vector<LinearCut> facets;
};

// Upper bound on one bit-indexed linearization variable:
//   f * z_bit <= coefficient * z_bit  (coefficient < inflow_bound).
struct BitBound {
  int bit = 0;  // 1-based bit index p; the bit has weight 2^(1-p)
  double coefficient = 0.0;
};

// Upper bound tied to one entry of an explicit value list.
struct ValueBound {
  int index = 0;        // 0-based position m in the value list
  double value = 0.0;   // the list entry itself
  double coefficient = 0.0;  // outflow_bound / value
};

// Hull parameters over the explicit value list variant.
struct ValueHullParams {
  double inflow_bound = 0.0;
  double outflow_bound = 0.0;
  std::vector<double> values;  // strictly increasing, first 0, last 1
  int low_index = 0;           // position of r_low in values
  double r_low = 0.0;
  double r_high = 0.0;
  double chord_slope = 0.0;
  double step_slope = 0.0;
  bool single_cut() const { return chord_slope >= step_slope; }
};

// Throws std::invalid_argument unless 0 < outflow_bound < inflow_bound and
// level >= 1.  The breakpoint r_low uses the floating-point predicate
// inflow_bound * r <= outflow_bound, so boundary grid points land on r_low.
HullParams hull_params(double inflow_bound, double outflow_bound, int level);

// The one or two inequalities that, together with the variable bounds,
// describe the hull: one chord cut when chord_slope >= step_slope, otherwise
// an upper-step cut through (r_low, inflow_bound) and (r_high, w_cap/r_high)
// plus a lower-secant cut through that point and (1, outflow_bound).
std::vector<LinearCut> rounding_cuts(const HullParams& params);

// Closed-form hull: vertices in counterclockwise order starting at (0, 0)
// plus facets = variable bounds and rounding_cuts.
HullDescription hull_facets(const HullParams& params);

// Verification oracle: monotone-chain convex hull of the segment endpoints
//   { (r, 0), (r, min(inflow_bound, outflow_bound / r)) : r in grid }.
// Requires level <= 20.  Vertices counterclockwise starting at (0, 0);
// facets derived from consecutive vertex pairs.
HullDescription brute_force_hull(double inflow_bound, double outflow_bound,
                                 int level);

// Bits p in [level] whose forced minimum split 2^(1-p) caps the inflow below
// inflow_bound: emits (p, 2^(p-1) * outflow_bound) exactly when that
// coefficient is strictly below inflow_bound.
std::vector<BitBound> p_dependent_bounds(double inflow_bound,
                                         double outflow_bound, int level);

// Lifted tangent inequalities: for each p in [level], the cut
//   2w - (outflow_bound / rho) r - rho f <= 0,    rho = 2^(1-p),
// tangent to the curve f = outflow_bound / r at r = rho.
std::vector<LinearCut> lti_cuts(double inflow_bound, double outflow_bound,
                                int level);

// Strengthened form: for each p in [level-1], the secant through the curve
// points at adjacent grid values rho1 = 2^(1-p) and rho2 = rho1 + 2^(1-level):
//   w - [outflow_bound / (rho1+rho2)] r - [rho1*rho2 / (rho1+rho2)] f <= 0.
// Requires level >= 2.
std::vector<LinearCut> lti_strengthened(double inflow_bound,
                                        double outflow_bound, int level);

// Value-list analogue of hull_params.  Requires the list to be strictly
// increasing with first entry 0 and last entry 1.
ValueHullParams value_hull_params(double inflow_bound, double outflow_bound,
                                  const std::vector<double>& values);

// Rounding cuts over the value list (same chord / step formulas).
std::vector<LinearCut> rounding_cuts(const ValueHullParams& params);

// Per-value upper bounds: for entries v with inflow_bound * v > outflow_bound,
// selecting v caps the inflow at outflow_bound / v.
std::vector<ValueBound> value_bounds(double inflow_bound, double outflow_bound,
                                     const std::vector<double>& values);

}  // namespace pooling::cuts
