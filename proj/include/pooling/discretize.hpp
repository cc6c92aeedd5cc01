#pragma once

// Builders for the discretization-based MILP models of the pooling problem.
// Three formulations share one variant descriptor:
//   * sb  — split-fraction model: R(j,k) restricted to a dyadic grid via
//           binary expansion, per-stream products linearized exactly.
//   * pq  — inlet-proportion model: q(i,j) restricted to the same grid,
//           pool-outlet flows linearized against the q bits.
//   * sbn — split-fraction model with an explicit value list and a
//           one-of-N binary choice per (pool, product).
// Cut flags attach the tightening constraint families from pooling::cuts.

#include <string>
#include <vector>

#include "pooling/instance.hpp"
#include "pooling/milp_model.hpp"

namespace pooling::discretize {

struct DiscretizationGrid {
  int level = 0;               // 0 for explicit value lists
  std::vector<double> values;  // strictly increasing, 0 .. 1
};

// The dyadic grid {0, 2^(1-n), ..., 1} with 2^(n-1)+1 exact values.
DiscretizationGrid grid_values(int level);

struct VariantSpec {
  enum class Formulation { sb, pq, sbn };
  Formulation formulation = Formulation::sb;
  int level = 4;               // grid level n (sb, pq, and sbn shorthand)
  std::vector<double> values;  // sbn only; empty = grid_values(level)
  bool rounding = false;       // hull-closing rounding cuts        (flag f)
  bool bit_bounds = false;     // per-bit inflow upper bounds       (flag t)
  bool tangent = false;        // lifted tangent inequalities       (flag lti)
  bool secant = false;         // strengthened secant form          (flag ltis)

  // Canonical short name, e.g. "sb4", "sb4-ft", "pq5-f-lti", "sbn9-t".
  std::string name() const;

  // Accepts the canonical compact form ("sb4-ft") and a colon form
  // ("sb:4:ft", "sbn:0,0.5,1:f").  Cut token: f|t|ft|lti|ltis|none or
  // combinations joined with '-' or '+'.  Throws on malformed input.
  static VariantSpec parse(const std::string& text);

  // The grid/value list this variant discretizes over.
  DiscretizationGrid grid() const;

  // Throws std::invalid_argument on inconsistent fields (bad level, bad
  // value list, tangent flags on sbn).
  void validate() const;
};

// Build the MILP for one (instance, variant) pair.  Pairs whose routed-flow
// bound is not strictly below the pool capacity get no cuts; a note per
// skipped pair is appended to *warnings when given.
MilpModel build_sb(const PoolingInstance& inst, const VariantSpec& spec,
                   std::vector<std::string>* warnings = nullptr);
MilpModel build_pq(const PoolingInstance& inst, const VariantSpec& spec,
                   std::vector<std::string>* warnings = nullptr);
MilpModel build_sbn(const PoolingInstance& inst, const VariantSpec& spec,
                    std::vector<std::string>* warnings = nullptr);

// Dispatch on spec.formulation.
MilpModel build_model(const PoolingInstance& inst, const VariantSpec& spec,
                      std::vector<std::string>* warnings = nullptr);

}  // namespace pooling::discretize
