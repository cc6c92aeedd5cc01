#include "pooling/milp_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pooling {

int MilpModel::add_variable(const std::string& name, double lb, double ub,
                            VarKind kind, const std::string& tag) {
  if (var_index_.count(name))
    throw std::invalid_argument("duplicate variable '" + name + "'");
  if (kind == VarKind::binary && (lb != 0.0 || ub != 1.0))
    throw std::invalid_argument("binary variable '" + name +
                                "' must have bounds [0,1]");
  if (lb > ub)
    throw std::invalid_argument("variable '" + name + "' has empty bound range");
  int idx = static_cast<int>(vars_.size());
  vars_.push_back({name, lb, ub, kind, tag});
  obj_.push_back(0.0);
  var_index_.emplace(name, idx);
  return idx;
}

void MilpModel::add_row(const std::string& name,
                        std::vector<std::pair<int, double>> coefs,
                        RowSense sense, double rhs) {
  if (row_index_.count(name))
    throw std::invalid_argument("duplicate row '" + name + "'");
  for (const auto& [v, c] : coefs) {
    (void)c;
    if (v < 0 || v >= static_cast<int>(vars_.size()))
      throw std::invalid_argument("row '" + name +
                                  "' references an undeclared variable");
  }
  row_index_.emplace(name, static_cast<int>(rows_.size()));
  rows_.push_back({name, std::move(coefs), sense, rhs});
}

void MilpModel::add_objective_term(int var, double coef) {
  if (var < 0 || var >= static_cast<int>(vars_.size()))
    throw std::invalid_argument("objective references an undeclared variable");
  obj_[var] += coef;
}

int MilpModel::var_index(const std::string& name) const {
  auto it = var_index_.find(name);
  return it == var_index_.end() ? -1 : it->second;
}

std::size_t MilpModel::num_binaries() const {
  std::size_t n = 0;
  for (const auto& v : vars_)
    if (v.kind == VarKind::binary) ++n;
  return n;
}

void MilpModel::check() const {
  for (const auto& v : vars_) {
    if (v.kind == VarKind::binary && (v.lb != 0.0 || v.ub != 1.0))
      throw std::logic_error("binary '" + v.name + "' has non-unit bounds");
    if (!(v.lb <= v.ub)) throw std::logic_error("bad bounds on '" + v.name + "'");
  }
  for (const auto& r : rows_)
    for (const auto& [v, c] : r.coefs) {
      if (v < 0 || v >= static_cast<int>(vars_.size()))
        throw std::logic_error("row '" + r.name + "' out of range");
      if (!std::isfinite(c))
        throw std::logic_error("row '" + r.name + "' has non-finite coefficient");
    }
}

double MilpModel::objective_value(const std::vector<double>& values) const {
  double obj = 0.0;
  for (std::size_t v = 0; v < obj_.size() && v < values.size(); ++v)
    obj += obj_[v] * values[v];
  return obj;
}

double MilpModel::max_row_violation(const std::vector<double>& values) const {
  double worst = 0.0;
  for (const auto& r : rows_) {
    double activity = 0.0, scale = 1.0;
    for (const auto& [v, c] : r.coefs) {
      activity += c * values[v];
      scale += std::fabs(c);
    }
    double viol = 0.0;
    switch (r.sense) {
      case RowSense::le: viol = activity - r.rhs; break;
      case RowSense::ge: viol = r.rhs - activity; break;
      case RowSense::eq: viol = std::fabs(activity - r.rhs); break;
    }
    worst = std::max(worst, viol / scale);
  }
  return worst;
}

namespace {

// A row viewed as a constraint: explicit zero terms dropped, remaining terms
// in variable order. Stable, so repeated entries keep their relative order.
std::vector<std::pair<int, double>> canonical_terms(const Row& r) {
  std::vector<std::pair<int, double>> terms;
  for (const auto& t : r.coefs)
    if (t.second != 0.0) terms.push_back(t);
  std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    return a.first < b.first;
  });
  return terms;
}

}  // namespace

bool MilpModel::operator==(const MilpModel& other) const {
  if (!(name_ == other.name_ && vars_ == other.vars_ && obj_ == other.obj_ &&
        obj_sense_ == other.obj_sense_ && rows_.size() == other.rows_.size()))
    return false;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const Row& a = rows_[i];
    const Row& b = other.rows_[i];
    if (a.name != b.name || a.sense != b.sense || a.rhs != b.rhs) return false;
    if (canonical_terms(a) != canonical_terms(b)) return false;
  }
  return true;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::limit: return "limit";
  }
  return "unknown";
}

MilpModel lp_relaxation(const MilpModel& m) {
  MilpModel out(m.name());
  for (const auto& v : m.variables())
    out.add_variable(v.name, v.lb, v.ub, VarKind::continuous, v.tag);
  for (const auto& r : m.rows()) out.add_row(r.name, r.coefs, r.sense, r.rhs);
  out.set_objective_sense(m.objective_sense());
  for (std::size_t v = 0; v < m.objective().size(); ++v)
    if (m.objective()[v] != 0.0)
      out.add_objective_term(static_cast<int>(v), m.objective()[v]);
  return out;
}

}  // namespace pooling
