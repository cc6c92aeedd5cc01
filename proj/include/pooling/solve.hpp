#pragma once

// Desk-scale solving kernel: a dense two-phase primal simplex, an exhaustive
// enumeration oracle for small MILPs, and an adapter that shells out to an
// external MILP solver via MPS files.

#include <string>

#include "pooling/milp_model.hpp"

namespace pooling::solve {

struct SolverConfig {
  enum class Mode { internal, external };
  Mode mode = Mode::internal;
  // External command template; {mps} and {sol} expand to temp file paths.
  std::string command;
  double time_limit_seconds = 300.0;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-7;
  int max_binaries = 20;  // enumeration guard
  int workers = 0;        // 0 = one per hardware thread
};

// Primal simplex (two phase, Bland's rule, dense tableau).  The model must
// contain no binary variables; call lp_relaxation first if it does.
// Status limit is returned if the iteration cap is hit.
LpSolution simplex_solve(const MilpModel& model);

// Exact optimum by enumerating every binary assignment, fixing it, presolving
// and solving the continuous rest with simplex_solve.  Throws if the model
// has more than max_binaries binaries.  Ties between assignments are broken
// toward the lexicographically smallest binary vector, so the result does not
// depend on the worker count.
MilpSolution enumerate_milp(const MilpModel& model, int max_binaries = 20,
                            int workers = 0);

// Writes the model to a temp MPS file, substitutes {mps}/{sol} into
// cfg.command, runs it under a wall-clock limit, and parses the solution
// file.  Throws on nonzero exit or unparsable output.  On timeout the child
// is killed and a limit-status solution is returned.
MilpSolution external_solve(const MilpModel& model, const SolverConfig& cfg);

// Dispatch on cfg.mode (internal -> enumerate_milp, external -> external_solve).
MilpSolution solve_model(const MilpModel& model, const SolverConfig& cfg);

// Solution-file grammar shared with external solvers: optional status line
// ("optimal" | "infeasible" | "limit"), optional "=obj= <number>", then
// "name value" pairs; '#' starts a comment.  Variables absent from the file
// default to 0.  Throws on unknown variable names or malformed lines.
MilpSolution parse_solution_file(const std::string& text,
                                 const MilpModel& model);

}  // namespace pooling::solve
