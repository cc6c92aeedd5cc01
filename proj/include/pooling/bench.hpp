#pragma once

// Benchmark harness: run an (instance x variant) matrix, filter instances the
// way the timing study does, compute Dolan-More performance profiles and
// optimality gaps, and serialize everything as CSV / gnuplot data.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pooling/discretize.hpp"
#include "pooling/instance.hpp"
#include "pooling/solve.hpp"

namespace pooling::bench {

struct BenchRecord {
  std::string instance;
  std::string variant;
  SolveStatus status = SolveStatus::limit;
  double wall_seconds = 0.0;   // solver call only
  double build_seconds = 0.0;  // model construction, reported separately
  double objective = 0.0;
  double bound = 0.0;
  std::string error;  // nonempty when the solver failed outright
};

struct ProfileCurve {
  std::string variant;
  std::vector<std::pair<double, double>> points;  // (tau, fraction <= tau)
};

struct BenchConfig {
  solve::SolverConfig solver;
  int workers = 1;  // matrix cells solved in parallel
};

// One record per (instance, variant) pair, sorted by (instance, variant).
// Solver failures are recorded in the record's error field, never thrown.
std::vector<BenchRecord> run_matrix(
    const std::vector<std::pair<std::string, PoolingInstance>>& instances,
    const std::vector<discretize::VariantSpec>& variants,
    const BenchConfig& cfg);

// Keeps an instance iff some variant solved it to optimality within t_max
// seconds AND it is not trivially easy (slowest variant above t_min seconds,
// or some variant unsolved).  Requires a complete matrix.
std::vector<std::string> filter_instances(
    const std::vector<BenchRecord>& records, double t_max = 300.0,
    double t_min = 5.0);

// Dolan-More profiles over the filtered instances: per instance, each
// variant's ratio is wall time over the fastest optimal wall time; unsolved
// cells get an infinite ratio.  Curves are sampled at every distinct finite
// ratio.  Requires a nonempty filtered set.
std::vector<ProfileCurve> performance_profile(
    const std::vector<BenchRecord>& records,
    const std::vector<std::string>& filtered);

// Relative shortfall 1 - milp_obj / best_possible of a discretized model's
// objective against the best possible nonlinear objective (> 0 required).
double gap(double milp_obj, double best_possible);

// "-" for an exact match, otherwise a two-decimal percentage like "1.79%".
std::string render_gap(double fraction);

std::string records_csv(const std::vector<BenchRecord>& records);
std::vector<BenchRecord> parse_records_csv(const std::string& text);

std::string profiles_csv(const std::vector<ProfileCurve>& curves);
std::string profiles_gnuplot(const std::vector<ProfileCurve>& curves);

// instance id -> best-known value, from a two-column CSV (header optional).
std::map<std::string, double> parse_value_csv(const std::string& text);

// Per-record gap table against the supplied best-known values; records whose
// instance has no value, or which did not solve, get an empty gap column.
std::string gap_table_csv(const std::vector<BenchRecord>& records,
                          const std::map<std::string, double>& best_known);

// Writes records.csv, profiles.csv, and profiles.dat under out_dir.
void emit_reports(const std::vector<BenchRecord>& records,
                  const std::vector<ProfileCurve>& profiles,
                  const std::string& out_dir);

}  // namespace pooling::bench
