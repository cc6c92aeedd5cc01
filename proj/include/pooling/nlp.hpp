#pragma once

// Evaluation of candidate flow solutions against the original nonlinear
// pooling models (split-fraction and inlet-proportion forms): per-family
// feasibility violations, objective value, and lifting of discretized-model
// solutions back to flow space.

#include <vector>

#include "pooling/discretize.hpp"
#include "pooling/instance.hpp"
#include "pooling/milp_model.hpp"

namespace pooling::nlp {

using Cube = std::vector<Table>;  // [i][j][k]

// A point in flow space.  `split` is used by the split-fraction form,
// `inlet_fraction` by the inlet-proportion form; the other may be empty.
struct FlowSolution {
  Table inflow;          // F[i][j], stream -> pool
  Cube routed;           // Fhat[i][j][k], stream through pool -> product
  Table split;           // R[j][k], fraction of pool j sent to product k
  Table inlet_fraction;  // q[i][j], fraction of stream i in pool j's outflow
};

// Worst absolute violation per constraint family, plus the objective.
struct FeasibilityReport {
  double capacity = 0.0;       // pool capacity
  double demand = 0.0;         // product demand
  double specification = 0.0;  // product quality limits
  double splitting = 0.0;      // bilinear identity Fhat = F*R (resp. q*Fbar)
  double simplex = 0.0;        // fractions sum to one
  double pipe = 0.0;           // pool -> product pipeline bounds
  double inlet = 0.0;          // per-inlet bounds (inlet-proportion form)
  double range = 0.0;          // nonnegativity / fraction range
  double objective = 0.0;
  double tolerance = 1e-6;

  double worst() const;
  bool feasible() const { return worst() <= tolerance; }
};

// Checks a split-fraction-form solution (F, Fhat, R) against the nonlinear
// model and reports the worst violation in each family.
FeasibilityReport evaluate_sb(const PoolingInstance& inst,
                              const FlowSolution& sol, double tol = 1e-6);

// Checks an inlet-proportion-form solution (Fhat, q) likewise; the pool
// outlet totals are recovered as Fbar[j][k] = sum_i Fhat[i][j][k].
// Requires the instance to carry inlet capacities.
FeasibilityReport evaluate_pq(const PoolingInstance& inst,
                              const FlowSolution& sol, double tol = 1e-6);

// Maps a solution of the variant's discretized model back to flow space.
// Fractions are recomputed from the binary block, so they land exactly on
// the grid.  Throws if the solution does not assign every model variable.
FlowSolution lift_milp_solution(const PoolingInstance& inst,
                                const discretize::VariantSpec& variant,
                                const MilpSolution& solution);

}  // namespace pooling::nlp
