#pragma once

#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pooling {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarKind { continuous, binary };
enum class RowSense { le, eq, ge };
enum class ObjSense { maximize, minimize };
enum class SolveStatus { optimal, infeasible, unbounded, limit };

struct Variable {
  std::string name;
  double lb = 0.0;
  double ub = kInfinity;
  VarKind kind = VarKind::continuous;
  std::string tag;  // free-form metadata, carried through the format writers

  bool operator==(const Variable&) const = default;
};

struct Row {
  std::string name;
  std::vector<std::pair<int, double>> coefs;  // (variable index, coefficient)
  RowSense sense = RowSense::le;
  double rhs = 0.0;

  bool operator==(const Row&) const = default;
};

// Solver-independent linear model. Variables and rows keep insertion order so
// every writer output is deterministic.
class MilpModel {
 public:
  explicit MilpModel(std::string name = "model") : name_(std::move(name)) {}

  int add_variable(const std::string& name, double lb, double ub, VarKind kind,
                   const std::string& tag = "");
  int add_continuous(const std::string& name, double lb, double ub,
                     const std::string& tag = "") {
    return add_variable(name, lb, ub, VarKind::continuous, tag);
  }
  int add_binary(const std::string& name, const std::string& tag = "") {
    return add_variable(name, 0.0, 1.0, VarKind::binary, tag);
  }

  void add_row(const std::string& name,
               std::vector<std::pair<int, double>> coefs, RowSense sense,
               double rhs);
  bool has_row(const std::string& name) const {
    return row_index_.count(name) != 0;
  }

  void set_objective_sense(ObjSense sense) { obj_sense_ = sense; }
  void add_objective_term(int var, double coef);

  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Row>& rows() const { return rows_; }
  ObjSense objective_sense() const { return obj_sense_; }
  const std::vector<double>& objective() const { return obj_; }

  int var_index(const std::string& name) const;  // -1 when absent
  std::size_t num_binaries() const;

  // Sanity pass over the invariants the builders rely on; throws on violation.
  void check() const;

  double objective_value(const std::vector<double>& values) const;
  // Largest row violation, each scaled by 1/(1 + |row coefficients|_1).
  double max_row_violation(const std::vector<double>& values) const;

  // Same variables, objective, and constraints. Rows compare as constraints:
  // term order and explicit zero coefficients do not matter, so a model
  // survives a trip through a column-major format like MPS.
  bool operator==(const MilpModel& other) const;

 private:
  std::string name_;
  std::vector<Variable> vars_;
  std::vector<Row> rows_;
  std::vector<double> obj_;  // dense, by variable index
  ObjSense obj_sense_ = ObjSense::minimize;
  std::unordered_map<std::string, int> var_index_;
  std::unordered_map<std::string, int> row_index_;
};

struct LpSolution {
  SolveStatus status = SolveStatus::infeasible;
  double objective = 0.0;
  std::vector<double> values;  // by variable index, empty unless optimal
};

struct MilpSolution {
  SolveStatus status = SolveStatus::infeasible;
  double objective = 0.0;
  double best_bound = 0.0;
  std::vector<double> values;
  double wall_seconds = 0.0;
};

const char* to_string(SolveStatus s);

// Same model with every binary re-kinded continuous in [0,1].
MilpModel lp_relaxation(const MilpModel& m);

}  // namespace pooling
