#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pooling/solve.hpp"

namespace pooling::solve {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kPhaseOneTol = 1e-7;

// How one model variable maps into the nonnegative tableau columns:
//   model value = offset + sign * x[primary] - x[negative]
// (negative only used for free variables; fixed variables have no column).
struct VarMap {
  int primary = -1;
  int negative = -1;
  double offset = 0.0;
  double sign = 1.0;
};

struct Tableau {
  std::vector<std::vector<double>> rows;  // each of width ncols + 1 (rhs last)
  std::vector<int> basis;                 // basic column per row
  std::size_t ncols = 0;

  double& at(std::size_t r, std::size_t c) { return rows[r][c]; }
  double rhs(std::size_t r) const { return rows[r][ncols]; }

  void pivot(std::size_t r, std::size_t c, std::vector<double>& cost) {
    std::vector<double>& prow = rows[r];
    double inv = 1.0 / prow[c];
    for (double& v : prow) v *= inv;
    prow[c] = 1.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r) continue;
      double f = rows[i][c];
      if (f == 0.0) continue;
      std::vector<double>& row = rows[i];
      for (std::size_t j = 0; j <= ncols; ++j) row[j] -= f * prow[j];
      row[c] = 0.0;
    }
    double f = cost[c];
    if (f != 0.0) {
      for (std::size_t j = 0; j <= ncols; ++j) cost[j] -= f * prow[j];
      cost[c] = 0.0;
    }
    basis[r] = static_cast<int>(c);
  }
};

enum class IterateResult { optimal, unbounded, iteration_limit };

// Bland's rule: entering = smallest eligible column index, leaving = ratio
// minimizer with smallest basic column index.  Guarantees termination.
IterateResult iterate(Tableau& t, std::vector<double>& cost,
                      const std::vector<bool>& banned, long max_iter) {
  for (long iter = 0; iter < max_iter; ++iter) {
    std::size_t enter = t.ncols;
    for (std::size_t j = 0; j < t.ncols; ++j)
      if (!banned[j] && cost[j] < -kCostTol) {
        enter = j;
        break;
      }
    if (enter == t.ncols) return IterateResult::optimal;

    std::size_t leave = t.rows.size();
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      double a = t.rows[i][enter];
      if (a <= kPivotTol) continue;
      double ratio = std::max(t.rhs(i), 0.0) / a;
      if (leave == t.rows.size() || ratio < best_ratio ||
          (ratio == best_ratio && t.basis[i] < t.basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == t.rows.size()) return IterateResult::unbounded;
    t.pivot(leave, enter, cost);
  }
  return IterateResult::iteration_limit;
}

}  // namespace

LpSolution simplex_solve(const MilpModel& model) {
  if (model.num_binaries() > 0)
    throw std::invalid_argument(
        "simplex_solve: model still has binary variables");

  const auto& vars = model.variables();
  const std::size_t nvars = vars.size();

  // Map every model variable to nonnegative columns.
  std::vector<VarMap> map(nvars);
  std::vector<std::pair<int, double>> upper_rows;  // column, cap
  int ncols = 0;
  for (std::size_t v = 0; v < nvars; ++v) {
    double lb = vars[v].lb, ub = vars[v].ub;
    if (lb > ub) return {SolveStatus::infeasible, 0.0, {}};
    if (lb == ub) {
      map[v].offset = lb;
      continue;
    }
    if (std::isfinite(lb)) {
      map[v] = {ncols, -1, lb, 1.0};
      if (std::isfinite(ub)) upper_rows.push_back({ncols, ub - lb});
      ++ncols;
    } else if (std::isfinite(ub)) {
      map[v] = {ncols, -1, ub, -1.0};
      ++ncols;
    } else {
      map[v] = {ncols, ncols + 1, 0.0, 1.0};
      ncols += 2;
    }
  }
  const int nstruct = ncols;

  // Assemble structural rows in column space.
  struct BuildRow {
    std::vector<double> coef;
    RowSense sense;
    double rhs;
  };
  std::vector<BuildRow> build;
  build.reserve(model.rows().size() + upper_rows.size());
  for (const auto& row : model.rows()) {
    BuildRow r{std::vector<double>(static_cast<std::size_t>(nstruct), 0.0),
               row.sense, row.rhs};
    for (const auto& [v, a] : row.coefs) {
      const VarMap& vm = map[static_cast<std::size_t>(v)];
      r.rhs -= a * vm.offset;
      if (vm.primary >= 0) r.coef[static_cast<std::size_t>(vm.primary)] += a * vm.sign;
      if (vm.negative >= 0) r.coef[static_cast<std::size_t>(vm.negative)] -= a;
    }
    build.push_back(std::move(r));
  }
  for (const auto& [c, cap] : upper_rows) {
    BuildRow r{std::vector<double>(static_cast<std::size_t>(nstruct), 0.0),
               RowSense::le, cap};
    r.coef[static_cast<std::size_t>(c)] = 1.0;
    build.push_back(std::move(r));
  }

  // Canonical form: nonnegative right-hand sides.
  for (auto& r : build) {
    if (r.rhs < 0.0) {
      for (double& a : r.coef) a = -a;
      r.rhs = -r.rhs;
      if (r.sense == RowSense::le) r.sense = RowSense::ge;
      else if (r.sense == RowSense::ge) r.sense = RowSense::le;
    }
  }

  // Count slack and artificial columns.
  const std::size_t m = build.size();
  int nslack = 0, nart = 0;
  for (const auto& r : build) {
    if (r.sense != RowSense::eq) ++nslack;
    if (r.sense != RowSense::le) ++nart;
  }
  const std::size_t total =
      static_cast<std::size_t>(nstruct + nslack + nart);

  Tableau t;
  t.ncols = total;
  t.rows.assign(m, std::vector<double>(total + 1, 0.0));
  t.basis.assign(m, -1);
  std::vector<bool> is_artificial(total, false);

  int next_slack = nstruct, next_art = nstruct + nslack;
  for (std::size_t i = 0; i < m; ++i) {
    auto& row = t.rows[i];
    std::copy(build[i].coef.begin(), build[i].coef.end(), row.begin());
    row[total] = build[i].rhs;
    if (build[i].sense == RowSense::le) {
      row[static_cast<std::size_t>(next_slack)] = 1.0;
      t.basis[i] = next_slack++;
    } else {
      if (build[i].sense == RowSense::ge)
        row[static_cast<std::size_t>(next_slack++)] = -1.0;
      row[static_cast<std::size_t>(next_art)] = 1.0;
      is_artificial[static_cast<std::size_t>(next_art)] = true;
      t.basis[i] = next_art++;
    }
  }

  const long max_iter = 2000 + 40L * static_cast<long>(m + total);
  std::vector<bool> banned(total, false);

  // Phase 1: minimize the sum of artificials.
  if (nart > 0) {
    std::vector<double> cost(total + 1, 0.0);
    for (std::size_t j = 0; j < total; ++j)
      if (is_artificial[j]) cost[j] = 1.0;
    for (std::size_t i = 0; i < m; ++i)
      if (is_artificial[static_cast<std::size_t>(t.basis[i])])
        for (std::size_t j = 0; j <= total; ++j) cost[j] -= t.rows[i][j];

    IterateResult res = iterate(t, cost, banned, max_iter);
    if (res == IterateResult::iteration_limit)
      return {SolveStatus::limit, 0.0, {}};

    double infeas = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (is_artificial[static_cast<std::size_t>(t.basis[i])])
        infeas += t.rhs(i);
    if (infeas > kPhaseOneTol) return {SolveStatus::infeasible, 0.0, {}};

    // Pivot leftover artificials out; drop rows that turn out redundant.
    for (std::size_t i = m; i-- > 0;) {
      if (!is_artificial[static_cast<std::size_t>(t.basis[i])]) continue;
      std::size_t col = total;
      for (std::size_t j = 0; j < static_cast<std::size_t>(nstruct + nslack); ++j)
        if (std::fabs(t.rows[i][j]) > kPivotTol) {
          col = j;
          break;
        }
      if (col < total) {
        t.pivot(i, col, cost);
      } else {
        t.rows.erase(t.rows.begin() + static_cast<std::ptrdiff_t>(i));
        t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
    for (std::size_t j = 0; j < total; ++j)
      if (is_artificial[j]) banned[j] = true;
  }

  // Phase 2: the real objective, always minimized internally.
  const double factor = model.objective_sense() == ObjSense::maximize ? -1.0 : 1.0;
  std::vector<double> cost(total + 1, 0.0);
  for (std::size_t v = 0; v < nvars; ++v) {
    double c = model.objective()[v];
    if (c == 0.0) continue;
    const VarMap& vm = map[v];
    if (vm.primary >= 0)
      cost[static_cast<std::size_t>(vm.primary)] += factor * c * vm.sign;
    if (vm.negative >= 0)
      cost[static_cast<std::size_t>(vm.negative)] -= factor * c;
  }
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    double cb = cost[static_cast<std::size_t>(t.basis[i])];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j <= total; ++j) cost[j] -= cb * t.rows[i][j];
  }

  IterateResult res = iterate(t, cost, banned, max_iter);
  if (res == IterateResult::iteration_limit)
    return {SolveStatus::limit, 0.0, {}};
  if (res == IterateResult::unbounded)
    return {SolveStatus::unbounded,
            model.objective_sense() == ObjSense::maximize ? kInfinity
                                                          : -kInfinity,
            {}};

  std::vector<double> col_value(total, 0.0);
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    col_value[static_cast<std::size_t>(t.basis[i])] = t.rhs(i);

  std::vector<double> values(nvars, 0.0);
  for (std::size_t v = 0; v < nvars; ++v) {
    const VarMap& vm = map[v];
    double x = vm.offset;
    if (vm.primary >= 0)
      x += vm.sign * col_value[static_cast<std::size_t>(vm.primary)];
    if (vm.negative >= 0) x -= col_value[static_cast<std::size_t>(vm.negative)];
    values[v] = x;
  }
  return {SolveStatus::optimal, model.objective_value(values),
          std::move(values)};
}

}  // namespace pooling::solve
