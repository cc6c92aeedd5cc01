#include "pooling/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pooling::nlp {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("flow solution: " + what);
}

void check_dims(const PoolingInstance& inst, const FlowSolution& sol,
                bool split_form) {
  std::size_t ni = inst.streams.size(), nj = inst.pools.size(),
              nk = inst.products.size();
  require(sol.inflow.size() == ni, "inflow table has wrong stream count");
  for (const auto& row : sol.inflow)
    require(row.size() == nj, "inflow table has wrong pool count");
  require(sol.routed.size() == ni, "routed table has wrong stream count");
  for (const auto& plane : sol.routed) {
    require(plane.size() == nj, "routed table has wrong pool count");
    for (const auto& row : plane)
      require(row.size() == nk, "routed table has wrong product count");
  }
  if (split_form) {
    require(sol.split.size() == nj, "split table has wrong pool count");
    for (const auto& row : sol.split)
      require(row.size() == nk, "split table has wrong product count");
  } else {
    require(sol.inlet_fraction.size() == ni,
            "fraction table has wrong stream count");
    for (const auto& row : sol.inlet_fraction)
      require(row.size() == nj, "fraction table has wrong pool count");
  }
}

double profit(const PoolingInstance& inst, const FlowSolution& sol) {
  double obj = 0.0;
  for (std::size_t i = 0; i < inst.streams.size(); ++i)
    for (std::size_t j = 0; j < inst.pools.size(); ++j) {
      for (std::size_t k = 0; k < inst.products.size(); ++k)
        obj += inst.price[k] * sol.routed[i][j][k];
      obj -= inst.cost[i] * sol.inflow[i][j];
    }
  return obj;
}

void shared_families(const PoolingInstance& inst, const FlowSolution& sol,
                     FeasibilityReport& rep) {
  std::size_t ni = inst.streams.size(), nj = inst.pools.size(),
              nk = inst.products.size(), nl = inst.properties.size();
  for (std::size_t k = 0; k < nk; ++k) {
    double total = 0.0;
    for (std::size_t i = 0; i < ni; ++i)
      for (std::size_t j = 0; j < nj; ++j) total += sol.routed[i][j][k];
    rep.demand = std::max(rep.demand, total - inst.demand[k]);
    for (std::size_t l = 0; l < nl; ++l) {
      double excess = 0.0;
      for (std::size_t i = 0; i < ni; ++i)
        for (std::size_t j = 0; j < nj; ++j)
          excess += (inst.property_value[i][l] - inst.spec_limit[k][l]) *
                    sol.routed[i][j][k];
      rep.specification = std::max(rep.specification, excess);
    }
  }
  for (std::size_t i = 0; i < ni; ++i)
    for (std::size_t j = 0; j < nj; ++j) {
      rep.range = std::max(rep.range, -sol.inflow[i][j]);
      for (std::size_t k = 0; k < nk; ++k)
        rep.range = std::max(rep.range, -sol.routed[i][j][k]);
    }
}

}  // namespace

double FeasibilityReport::worst() const {
  double w = capacity;
  w = std::max(w, demand);
  w = std::max(w, specification);
  w = std::max(w, splitting);
  w = std::max(w, simplex);
  w = std::max(w, pipe);
  w = std::max(w, inlet);
  w = std::max(w, range);
  return w;
}

FeasibilityReport evaluate_sb(const PoolingInstance& inst,
                              const FlowSolution& sol, double tol) {
  check_dims(inst, sol, /*split_form=*/true);
  std::size_t ni = inst.streams.size(), nj = inst.pools.size(),
              nk = inst.products.size();
  FeasibilityReport rep;
  rep.tolerance = tol;
  shared_families(inst, sol, rep);
  for (std::size_t j = 0; j < nj; ++j) {
    double in = 0.0;
    for (std::size_t i = 0; i < ni; ++i) in += sol.inflow[i][j];
    rep.capacity = std::max(rep.capacity, in - inst.pool_capacity[j]);
    double fractions = 0.0;
    for (std::size_t k = 0; k < nk; ++k) {
      fractions += sol.split[j][k];
      rep.range = std::max(rep.range, -sol.split[j][k]);
      rep.range = std::max(rep.range, sol.split[j][k] - 1.0);
      double piped = 0.0;
      for (std::size_t i = 0; i < ni; ++i) {
        piped += sol.routed[i][j][k];
        rep.splitting = std::max(
            rep.splitting, std::abs(sol.routed[i][j][k] -
                                    sol.inflow[i][j] * sol.split[j][k]));
      }
      rep.pipe = std::max(rep.pipe, piped - inst.pipe_capacity[j][k]);
    }
    rep.simplex = std::max(rep.simplex, std::abs(fractions - 1.0));
  }
  rep.objective = profit(inst, sol);
  return rep;
}

FeasibilityReport evaluate_pq(const PoolingInstance& inst,
                              const FlowSolution& sol, double tol) {
  check_dims(inst, sol, /*split_form=*/false);
  if (!inst.inlet_capacity.has_value())
    throw std::invalid_argument(
        "evaluate_pq: instance has no inlet capacities (sigma)");
  const Table& sigma = *inst.inlet_capacity;
  std::size_t ni = inst.streams.size(), nj = inst.pools.size(),
              nk = inst.products.size();
  FeasibilityReport rep;
  rep.tolerance = tol;
  shared_families(inst, sol, rep);
  for (std::size_t j = 0; j < nj; ++j) {
    double fractions = 0.0;
    for (std::size_t i = 0; i < ni; ++i) {
      fractions += sol.inlet_fraction[i][j];
      rep.range = std::max(rep.range, -sol.inlet_fraction[i][j]);
      rep.range = std::max(rep.range, sol.inlet_fraction[i][j] - 1.0);
    }
    rep.simplex = std::max(rep.simplex, std::abs(fractions - 1.0));
    double outlet_total = 0.0;
    for (std::size_t k = 0; k < nk; ++k) {
      double outlet = 0.0;
      for (std::size_t i = 0; i < ni; ++i) outlet += sol.routed[i][j][k];
      outlet_total += outlet;
      rep.pipe = std::max(rep.pipe, outlet - inst.pipe_capacity[j][k]);
      for (std::size_t i = 0; i < ni; ++i)
        rep.splitting = std::max(
            rep.splitting, std::abs(sol.routed[i][j][k] -
                                    sol.inlet_fraction[i][j] * outlet));
    }
    rep.capacity = std::max(rep.capacity, outlet_total - inst.pool_capacity[j]);
    for (std::size_t i = 0; i < ni; ++i) {
      double routed_total = 0.0;
      for (std::size_t k = 0; k < nk; ++k) routed_total += sol.routed[i][j][k];
      rep.inlet = std::max(rep.inlet, routed_total - sigma[i][j]);
    }
  }
  rep.objective = profit(inst, sol);
  return rep;
}

FlowSolution lift_milp_solution(const PoolingInstance& inst,
                                const discretize::VariantSpec& variant,
                                const MilpSolution& solution) {
  MilpModel model = discretize::build_model(inst, variant);
  if (solution.values.size() != model.variables().size())
    throw std::invalid_argument(
        "lift: solution does not assign every model variable");
  auto value = [&](const std::string& name) {
    int idx = model.var_index(name);
    if (idx < 0)
      throw std::invalid_argument("lift: missing variable assignment for " +
                                  name);
    return solution.values[static_cast<std::size_t>(idx)];
  };
  auto tag = [](std::initializer_list<std::string> parts) {
    std::string s = "(";
    bool first = true;
    for (const auto& p : parts) {
      if (!first) s += ",";
      s += p;
      first = false;
    }
    return s + ")";
  };

  const auto& S = inst.streams;
  const auto& P = inst.pools;
  const auto& K = inst.products;
  using Form = discretize::VariantSpec::Formulation;

  FlowSolution sol;
  sol.routed.assign(S.size(), Table(P.size(), std::vector<double>(K.size())));
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j)
      for (std::size_t k = 0; k < K.size(); ++k)
        sol.routed[i][j][k] = value("H" + tag({S[i], P[j], K[k]}));

  // Fractions are recomputed from the binary block so they land exactly on
  // the grid even when the linking rows were only satisfied to tolerance.
  if (variant.formulation == Form::pq) {
    sol.inlet_fraction.assign(S.size(), std::vector<double>(P.size(), 0.0));
    sol.inflow.assign(S.size(), std::vector<double>(P.size(), 0.0));
    for (std::size_t i = 0; i < S.size(); ++i)
      for (std::size_t j = 0; j < P.size(); ++j) {
        double q = 0.0;
        for (int p = 1; p <= variant.level; ++p)
          q += std::ldexp(1.0, 1 - p) *
               std::round(value("ZQ" + tag({S[i], P[j], std::to_string(p)})));
        sol.inlet_fraction[i][j] = q;
        double total = 0.0;
        for (std::size_t k = 0; k < K.size(); ++k)
          total += sol.routed[i][j][k];
        sol.inflow[i][j] = total;
      }
    return sol;
  }

  sol.inflow.assign(S.size(), std::vector<double>(P.size(), 0.0));
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j)
      sol.inflow[i][j] = value("F" + tag({S[i], P[j]}));
  sol.split.assign(P.size(), std::vector<double>(K.size(), 0.0));
  if (variant.formulation == Form::sb) {
    for (std::size_t j = 0; j < P.size(); ++j)
      for (std::size_t k = 0; k < K.size(); ++k) {
        double r = 0.0;
        for (int p = 1; p <= variant.level; ++p)
          r += std::ldexp(1.0, 1 - p) *
               std::round(value("Z" + tag({P[j], K[k], std::to_string(p)})));
        sol.split[j][k] = r;
      }
  } else {
    std::vector<double> grid = variant.grid().values;
    for (std::size_t j = 0; j < P.size(); ++j)
      for (std::size_t k = 0; k < K.size(); ++k) {
        double r = 0.0;
        for (std::size_t m = 0; m < grid.size(); ++m)
          r += grid[m] *
               std::round(value("ZN" + tag({P[j], K[k], std::to_string(m)})));
        sol.split[j][k] = r;
      }
  }
  return sol;
}

}  // namespace pooling::nlp
