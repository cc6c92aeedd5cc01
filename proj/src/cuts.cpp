#include "pooling/cuts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace pooling::cuts {

double grid_step(int level) {
  if (level < 1) throw std::invalid_argument("grid level must be >= 1");
  return std::ldexp(1.0, 1 - level);
}

namespace {

void check_bounds(double inflow_bound, double outflow_bound) {
  if (!(inflow_bound > 0.0) || !std::isfinite(inflow_bound) ||
      !(outflow_bound > 0.0) || !std::isfinite(outflow_bound))
    throw std::invalid_argument("hull bounds must be positive and finite");
  if (outflow_bound >= inflow_bound)
    throw std::invalid_argument(
        "trivial bound: outflow bound >= inflow bound, no cuts apply");
}

// Shared predicate deciding whether the inflow can reach its upper bound at
// split fraction r.  Both the closed-form construction and the brute-force
// oracle must branch on exactly this expression.
bool full_inflow_fits(double inflow_bound, double outflow_bound, double r) {
  return inflow_bound * r <= outflow_bound;
}

std::vector<LinearCut> rounding_cuts_impl(double gamma, double ups, double lo,
                                          double hi, double chord,
                                          double step) {
  std::vector<LinearCut> out;
  if (hi == 1.0 || chord >= step) {
    // f <= chord*(r - 1) + outflow_bound
    out.push_back({"chord", -chord, 1.0, 0.0, ups - chord});
    return out;
  }
  // f <= step*(r - r_low) + inflow_bound
  out.push_back({"upper-step", -step, 1.0, 0.0, gamma - step * lo});
  // f <= secant*(r - 1) + outflow_bound through (r_high, ups/r_high), (1, ups)
  double secant = (ups / hi - ups) / (hi - 1.0);
  out.push_back({"lower-secant", -secant, 1.0, 0.0, ups - secant});
  return out;
}

}  // namespace

HullParams hull_params(double inflow_bound, double outflow_bound, int level) {
  check_bounds(inflow_bound, outflow_bound);
  double step = grid_step(level);
  // Number of grid intervals; the grid is {k*step : k = 0..points}.
  std::int64_t points = std::int64_t{1} << (level - 1);
  std::int64_t k =
      static_cast<std::int64_t>(std::floor(outflow_bound / (step * inflow_bound)));
  k = std::clamp(k, std::int64_t{0}, points - 1);
  // The floor above involves two roundings; nudge k so that r_low is exactly
  // the largest grid point passing the shared feasibility predicate.
  while (k > 0 && !full_inflow_fits(inflow_bound, outflow_bound, k * step)) --k;
  while (k + 1 < points &&
         full_inflow_fits(inflow_bound, outflow_bound, (k + 1) * step))
    ++k;

  HullParams p;
  p.inflow_bound = inflow_bound;
  p.outflow_bound = outflow_bound;
  p.level = level;
  p.r_low = static_cast<double>(k) * step;
  p.r_high = static_cast<double>(k + 1) * step;
  p.chord_slope = (inflow_bound - outflow_bound) / (p.r_low - 1.0);
  p.step_slope =
      (inflow_bound - outflow_bound / p.r_high) / (p.r_low - p.r_high);
  return p;
}

std::vector<LinearCut> rounding_cuts(const HullParams& params) {
  return rounding_cuts_impl(params.inflow_bound, params.outflow_bound,
                            params.r_low, params.r_high, params.chord_slope,
                            params.step_slope);
}

namespace {

HullDescription assemble_hull(double gamma,
                              std::vector<std::array<double, 2>> vertices,
                              std::vector<LinearCut> cuts) {
  HullDescription hull;
  // Drop coincident consecutive vertices (r_low = 0 collapses two of them).
  for (const auto& v : vertices)
    if (hull.vertices.empty() || hull.vertices.back() != v)
      hull.vertices.push_back(v);
  hull.facets.push_back({"split-lb", -1.0, 0.0, 0.0, 0.0});
  hull.facets.push_back({"split-ub", 1.0, 0.0, 0.0, 1.0});
  hull.facets.push_back({"inflow-lb", 0.0, -1.0, 0.0, 0.0});
  hull.facets.push_back({"inflow-ub", 0.0, 1.0, 0.0, gamma});
  for (auto& c : cuts) hull.facets.push_back(std::move(c));
  return hull;
}

}  // namespace

HullDescription hull_facets(const HullParams& params) {
  const double g = params.inflow_bound, u = params.outflow_bound;
  std::vector<std::array<double, 2>> vertices{{0.0, 0.0}, {1.0, 0.0}, {1.0, u}};
  if (!params.single_cut())
    vertices.push_back({params.r_high, u / params.r_high});
  vertices.push_back({params.r_low, g});
  vertices.push_back({0.0, g});
  return assemble_hull(g, std::move(vertices), rounding_cuts(params));
}

namespace {

double cross(const std::array<double, 2>& o, const std::array<double, 2>& a,
             const std::array<double, 2>& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

}  // namespace

HullDescription brute_force_hull(double inflow_bound, double outflow_bound,
                                 int level) {
  check_bounds(inflow_bound, outflow_bound);
  if (level > 20) throw std::invalid_argument("brute-force hull: level > 20");
  double step = grid_step(level);
  std::int64_t points = std::int64_t{1} << (level - 1);

  std::vector<std::array<double, 2>> pts;
  pts.reserve(2 * static_cast<std::size_t>(points + 1));
  for (std::int64_t k = 0; k <= points; ++k) {
    double r = static_cast<double>(k) * step;
    double top = full_inflow_fits(inflow_bound, outflow_bound, r)
                     ? inflow_bound
                     : outflow_bound / r;
    pts.push_back({r, 0.0});
    pts.push_back({r, top});
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  // Andrew's monotone chain; strict turns only, so collinear points vanish.
  std::vector<std::array<double, 2>> hull(2 * pts.size());
  std::size_t h = 0;
  for (const auto& p : pts) {
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], p) <= 0.0) --h;
    hull[h++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = h + 1; i-- > 0;) {
    const auto& p = pts[i];
    while (h >= lower && cross(hull[h - 2], hull[h - 1], p) <= 0.0) --h;
    hull[h++] = p;
  }
  hull.resize(h - 1);  // last point repeats the first

  HullDescription out;
  out.vertices = std::move(hull);
  for (std::size_t i = 0; i < out.vertices.size(); ++i) {
    const auto& a = out.vertices[i];
    const auto& b = out.vertices[(i + 1) % out.vertices.size()];
    // Edge a->b of a counterclockwise polygon: interior satisfies
    // (b.y-a.y)(x-a.x) - (b.x-a.x)(y-a.y) <= 0.
    out.facets.push_back({"edge" + std::to_string(i), b[1] - a[1],
                          -(b[0] - a[0]), 0.0,
                          (b[1] - a[1]) * a[0] - (b[0] - a[0]) * a[1]});
  }
  return out;
}

std::vector<BitBound> p_dependent_bounds(double inflow_bound,
                                         double outflow_bound, int level) {
  check_bounds(inflow_bound, outflow_bound);
  (void)grid_step(level);
  std::vector<BitBound> out;
  for (int p = 1; p <= level; ++p) {
    double coefficient = std::ldexp(outflow_bound, p - 1);
    if (!(coefficient < inflow_bound)) break;
    out.push_back({p, coefficient});
  }
  return out;
}

std::vector<LinearCut> lti_cuts(double inflow_bound, double outflow_bound,
                                int level) {
  check_bounds(inflow_bound, outflow_bound);
  (void)grid_step(level);
  std::vector<LinearCut> out;
  for (int p = 1; p <= level; ++p) {
    double rho = std::ldexp(1.0, 1 - p);
    out.push_back({"tangent(" + std::to_string(p) + ")", -outflow_bound / rho,
                   -rho, 2.0, 0.0});
  }
  return out;
}

std::vector<LinearCut> lti_strengthened(double inflow_bound,
                                        double outflow_bound, int level) {
  check_bounds(inflow_bound, outflow_bound);
  if (level < 2)
    throw std::invalid_argument("strengthened tangent cuts need level >= 2");
  double step = grid_step(level);
  std::vector<LinearCut> out;
  for (int p = 1; p <= level - 1; ++p) {
    double rho1 = std::ldexp(1.0, 1 - p);
    double rho2 = rho1 + step;
    double denom = rho1 + rho2;
    out.push_back({"secant(" + std::to_string(p) + ")",
                   -outflow_bound / denom, -rho1 * rho2 / denom, 1.0, 0.0});
  }
  return out;
}

namespace {

void check_value_list(const std::vector<double>& values) {
  if (values.size() < 2 || values.front() != 0.0 || values.back() != 1.0 ||
      !std::is_sorted(values.begin(), values.end(),
                      [](double a, double b) { return a <= b; }))
    throw std::invalid_argument(
        "value list must increase strictly from 0 to 1");
}

}  // namespace

ValueHullParams value_hull_params(double inflow_bound, double outflow_bound,
                                  const std::vector<double>& values) {
  check_bounds(inflow_bound, outflow_bound);
  check_value_list(values);

  ValueHullParams p;
  p.inflow_bound = inflow_bound;
  p.outflow_bound = outflow_bound;
  p.values = values;
  int low = 0;
  for (std::size_t m = 1; m < values.size(); ++m)
    if (full_inflow_fits(inflow_bound, outflow_bound, values[m]))
      low = static_cast<int>(m);
  p.low_index = low;
  p.r_low = values[static_cast<std::size_t>(low)];
  p.r_high = values[static_cast<std::size_t>(low) + 1];
  p.chord_slope = (inflow_bound - outflow_bound) / (p.r_low - 1.0);
  p.step_slope =
      (inflow_bound - outflow_bound / p.r_high) / (p.r_low - p.r_high);
  return p;
}

std::vector<LinearCut> rounding_cuts(const ValueHullParams& params) {
  return rounding_cuts_impl(params.inflow_bound, params.outflow_bound,
                            params.r_low, params.r_high, params.chord_slope,
                            params.step_slope);
}

std::vector<ValueBound> value_bounds(double inflow_bound, double outflow_bound,
                                     const std::vector<double>& values) {
  check_bounds(inflow_bound, outflow_bound);
  check_value_list(values);
  std::vector<ValueBound> out;
  for (std::size_t m = 0; m < values.size(); ++m) {
    double v = values[m];
    if (v <= 0.0 || full_inflow_fits(inflow_bound, outflow_bound, v)) continue;
    out.push_back({static_cast<int>(m), v, outflow_bound / v});
  }
  return out;
}

}  // namespace pooling::cuts
