#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "pooling/milp_model.hpp"
#include "pooling/mps_io.hpp"
#include "pooling/rng.hpp"
#include "pooling/solve.hpp"

using namespace pooling;
using namespace pooling::solve;

namespace {

// Independent LP oracle for small models: enumerate every candidate vertex
// (intersection of n tight constraints drawn from rows and finite bounds),
// keep the feasible ones, and take the best objective.  Only usable when all
// variables have finite bounds, so every feasible LP attains its optimum at
// a vertex of the polytope.
struct OracleResult {
  SolveStatus status = SolveStatus::infeasible;
  double objective = 0.0;
};

bool solve_square(std::vector<std::vector<double>> a, std::vector<double>& b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-11) return false;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t col = 0; col < n; ++col) b[col] /= a[col][col];
  return true;
}

OracleResult lp_vertex_oracle(const MilpModel& m) {
  const std::size_t n = m.variables().size();
  struct Plane {
    std::vector<double> a;
    double rhs;
  };
  std::vector<Plane> planes;
  for (const auto& row : m.rows()) {
    Plane p{std::vector<double>(n, 0.0), row.rhs};
    for (const auto& [v, c] : row.coefs) p.a[static_cast<std::size_t>(v)] += c;
    planes.push_back(std::move(p));
  }
  for (std::size_t v = 0; v < n; ++v) {
    REQUIRE(std::isfinite(m.variables()[v].lb));
    REQUIRE(std::isfinite(m.variables()[v].ub));
    Plane lo{std::vector<double>(n, 0.0), m.variables()[v].lb};
    lo.a[v] = 1.0;
    planes.push_back(lo);
    Plane hi{std::vector<double>(n, 0.0), m.variables()[v].ub};
    hi.a[v] = 1.0;
    planes.push_back(hi);
  }

  auto feasible = [&](const std::vector<double>& x) {
    for (std::size_t v = 0; v < n; ++v)
      if (x[v] < m.variables()[v].lb - 1e-7 ||
          x[v] > m.variables()[v].ub + 1e-7)
        return false;
    for (const auto& row : m.rows()) {
      double act = 0.0;
      for (const auto& [v, c] : row.coefs) act += c * x[static_cast<std::size_t>(v)];
      double slack = act - row.rhs;
      if (row.sense == RowSense::le && slack > 1e-7) return false;
      if (row.sense == RowSense::ge && slack < -1e-7) return false;
      if (row.sense == RowSense::eq && std::abs(slack) > 1e-7) return false;
    }
    return true;
  };

  OracleResult best;
  double sign = m.objective_sense() == ObjSense::maximize ? 1.0 : -1.0;
  std::vector<std::size_t> pick(n, 0);
  auto consider = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (std::size_t s : idx) {
      a.push_back(planes[s].a);
      b.push_back(planes[s].rhs);
    }
    if (!solve_square(std::move(a), b)) return;
    if (!feasible(b)) return;
    double obj = m.objective_value(b);
    if (best.status != SolveStatus::optimal || sign * obj > sign * best.objective) {
      best.status = SolveStatus::optimal;
      best.objective = obj;
    }
  };
  // All size-n subsets of planes.
  std::vector<std::size_t> idx;
  auto recurse = [&](auto&& self, std::size_t from) -> void {
    if (idx.size() == n) {
      consider(idx);
      return;
    }
    for (std::size_t s = from; s < planes.size(); ++s) {
      idx.push_back(s);
      self(self, s + 1);
      idx.pop_back();
    }
  };
  recurse(recurse, 0);
  return best;
}

MilpModel boxed_random_lp(SplitMix64& rng) {
  MilpModel m("random");
  m.set_objective_sense(rng.next() % 2 ? ObjSense::maximize
                                       : ObjSense::minimize);
  int nvars = 2 + static_cast<int>(rng.next() % 3);
  for (int v = 0; v < nvars; ++v) {
    double lo = rng.uniform(-2.0, 0.0);
    m.add_continuous("x" + std::to_string(v), lo, lo + rng.uniform(1.0, 8.0));
    m.add_objective_term(v, rng.uniform(-10.0, 10.0));
  }
  int nrows = 1 + static_cast<int>(rng.next() % 4);
  for (int r = 0; r < nrows; ++r) {
    std::vector<std::pair<int, double>> coefs;
    for (int v = 0; v < nvars; ++v)
      if (rng.next() % 4 != 0) coefs.push_back({v, rng.uniform(-5.0, 5.0)});
    if (coefs.empty()) coefs.push_back({0, 1.0});
    RowSense sense = std::array<RowSense, 3>{
        RowSense::le, RowSense::ge, RowSense::eq}[rng.next() % 3];
    m.add_row("r" + std::to_string(r), std::move(coefs), sense,
              rng.uniform(-4.0, 12.0));
  }
  return m;
}

std::filesystem::path temp_file(const std::string& stem) {
  return std::filesystem::temp_directory_path() /
         (stem + "-" + std::to_string(::getpid()));
}

void write_text(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p);
  REQUIRE(out.good());
  out << body;
}

}  // namespace

TEST_CASE("simplex solves pinned textbook cases") {
  SUBCASE("bounded maximization") {
    MilpModel m;
    m.set_objective_sense(ObjSense::maximize);
    m.add_continuous("x", 0.0, 10.0);
    m.add_continuous("y", 0.0, 10.0);
    m.add_objective_term(0, 3.0);
    m.add_objective_term(1, 5.0);
    m.add_row("c1", {{0, 1.0}}, RowSense::le, 4.0);
    m.add_row("c2", {{1, 2.0}}, RowSense::le, 12.0);
    m.add_row("c3", {{0, 3.0}, {1, 2.0}}, RowSense::le, 18.0);
    LpSolution sol = simplex_solve(m);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.objective == doctest::Approx(36.0));
    CHECK(sol.values[0] == doctest::Approx(2.0));
    CHECK(sol.values[1] == doctest::Approx(6.0));
  }
  SUBCASE("equalities, shifted and mirrored bounds") {
    MilpModel m;
    m.set_objective_sense(ObjSense::minimize);
    m.add_continuous("x", -5.0, 5.0);
    m.add_continuous("y", -kInfinity, 2.0);
    m.add_continuous("z", 1.0, 1.0);  // fixed
    m.add_objective_term(0, 1.0);
    m.add_objective_term(1, 1.0);
    m.add_objective_term(2, 10.0);
    m.add_row("sum", {{0, 1.0}, {1, 1.0}, {2, 1.0}}, RowSense::eq, 0.0);
    m.add_row("cap", {{0, 1.0}, {1, -1.0}}, RowSense::ge, -3.0);
    LpSolution sol = simplex_solve(m);
    REQUIRE(sol.status == SolveStatus::optimal);
    // x + y = -1 with x - y >= -3: minimum of x + y + 10z is -1 + 10 = 9.
    CHECK(sol.objective == doctest::Approx(9.0));
    CHECK(sol.values[2] == 1.0);
  }
  SUBCASE("free variable") {
    MilpModel m;
    m.set_objective_sense(ObjSense::minimize);
    m.add_continuous("f", -kInfinity, kInfinity);
    m.add_objective_term(0, 2.0);
    m.add_row("lo", {{0, 1.0}}, RowSense::ge, -7.5);
    LpSolution sol = simplex_solve(m);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.objective == doctest::Approx(-15.0));
  }
  SUBCASE("infeasible") {
    MilpModel m;
    m.add_continuous("x", 0.0, 1.0);
    m.add_row("hi", {{0, 1.0}}, RowSense::ge, 2.0);
    CHECK(simplex_solve(m).status == SolveStatus::infeasible);
  }
  SUBCASE("unbounded") {
    MilpModel m;
    m.set_objective_sense(ObjSense::maximize);
    m.add_continuous("x", 0.0, kInfinity);
    m.add_objective_term(0, 1.0);
    LpSolution sol = simplex_solve(m);
    CHECK(sol.status == SolveStatus::unbounded);
  }
}

TEST_CASE("simplex matches an independent vertex-enumeration oracle") {
  SplitMix64 rng(1234);
  int optimal_seen = 0;
  for (int trial = 0; trial < 120; ++trial) {
    MilpModel m = boxed_random_lp(rng);
    CAPTURE(trial);
    OracleResult want = lp_vertex_oracle(m);
    LpSolution got = simplex_solve(m);
    REQUIRE(got.status == want.status);
    if (want.status == SolveStatus::optimal) {
      ++optimal_seen;
      CHECK(got.objective ==
            doctest::Approx(want.objective).epsilon(1e-6).scale(1.0));
      CHECK(m.max_row_violation(got.values) <= 1e-7);
    }
  }
  CHECK(optimal_seen > 30);  // the sweep must actually exercise the solver
}

TEST_CASE("enumeration solves small MILPs exactly") {
  SUBCASE("pure binary knapsack") {
    MilpModel m;
    m.set_objective_sense(ObjSense::maximize);
    m.add_binary("x1");
    m.add_binary("x2");
    m.add_binary("x3");
    m.add_objective_term(0, 3.0);
    m.add_objective_term(1, 4.0);
    m.add_objective_term(2, 2.0);
    m.add_row("w", {{0, 2.0}, {1, 3.0}, {2, 1.0}}, RowSense::le, 4.0);
    MilpSolution sol = enumerate_milp(m);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.objective == doctest::Approx(6.0));
    CHECK(sol.values == std::vector<double>{0.0, 1.0, 1.0});
  }
  SUBCASE("ties break toward the lexicographically smallest binaries") {
    MilpModel m;
    m.set_objective_sense(ObjSense::maximize);
    m.add_binary("a");
    m.add_binary("b");
    m.add_objective_term(0, 1.0);
    m.add_objective_term(1, 1.0);
    m.add_row("pick", {{0, 1.0}, {1, 1.0}}, RowSense::le, 1.0);
    MilpSolution sol = enumerate_milp(m);
    CHECK(sol.objective == doctest::Approx(1.0));
    CHECK(sol.values == std::vector<double>{0.0, 1.0});
  }
  SUBCASE("mixed model with continuous tail") {
    MilpModel m;
    m.set_objective_sense(ObjSense::maximize);
    m.add_continuous("f", 0.0, 10.0);
    m.add_binary("open");
    m.add_objective_term(0, 2.0);
    m.add_objective_term(1, -5.0);
    m.add_row("gate", {{0, 1.0}, {1, -10.0}}, RowSense::le, 0.0);
    MilpSolution sol = enumerate_milp(m);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.objective == doctest::Approx(15.0));  // open, f = 10
    CHECK(sol.values[1] == 1.0);
  }
  SUBCASE("worker count does not change the answer") {
    SplitMix64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
      MilpModel m = boxed_random_lp(rng);
      for (int b = 0; b < 6; ++b) {
        int z = m.add_binary("z" + std::to_string(b));
        m.add_objective_term(z, rng.uniform(-3.0, 3.0));
      }
      m.add_row("mix", {{0, 1.0}, {m.var_index("z0"), 2.5}}, RowSense::le,
                2.0);
      MilpSolution one = enumerate_milp(m, 20, 1);
      MilpSolution four = enumerate_milp(m, 20, 4);
      CHECK(one.status == four.status);
      CHECK(one.objective == four.objective);
      CHECK(one.values == four.values);
    }
  }
  SUBCASE("binary budget is enforced") {
    MilpModel m;
    for (int b = 0; b < 21; ++b) m.add_binary("z" + std::to_string(b));
    CHECK_THROWS_AS(enumerate_milp(m, 20), std::invalid_argument);
  }
  SUBCASE("infeasible when every assignment fails") {
    MilpModel m;
    m.add_binary("z");
    m.add_row("no", {{0, 1.0}}, RowSense::ge, 2.0);
    CHECK(enumerate_milp(m).status == SolveStatus::infeasible);
  }
}

TEST_CASE("solution files parse per the shared grammar") {
  MilpModel m;
  m.set_objective_sense(ObjSense::maximize);
  m.add_continuous("x", 0.0, 5.0);
  m.add_continuous("y", 0.0, 5.0);
  m.add_objective_term(0, 1.0);
  m.add_objective_term(1, 2.0);

  SUBCASE("status, objective line, values, comments") {
    auto sol = parse_solution_file(
        "# solver log\noptimal\n=obj= 7\nx 3\ny 2\n", m);
    CHECK(sol.status == SolveStatus::optimal);
    CHECK(sol.objective == 7.0);
    CHECK(sol.values == std::vector<double>{3.0, 2.0});
    CHECK(sol.best_bound == 7.0);
  }
  SUBCASE("missing variables default to zero") {
    auto sol = parse_solution_file("optimal\ny 2.5\n", m);
    CHECK(sol.values == std::vector<double>{0.0, 2.5});
    CHECK(sol.objective == doctest::Approx(5.0));  // recomputed
  }
  SUBCASE("no status line means optimal") {
    auto sol = parse_solution_file("x 1\n", m);
    CHECK(sol.status == SolveStatus::optimal);
  }
  SUBCASE("infeasible clears values") {
    auto sol = parse_solution_file("infeasible\n", m);
    CHECK(sol.status == SolveStatus::infeasible);
    CHECK(sol.values.empty());
  }
  SUBCASE("unknown variables are an error") {
    CHECK_THROWS_WITH_AS(parse_solution_file("optimal\nbogus 1\n", m),
                         doctest::Contains("unknown variable"),
                         std::runtime_error);
  }
  SUBCASE("trailing garbage in numbers is an error") {
    CHECK_THROWS_AS(parse_solution_file("optimal\nx 1.5garbage\n", m),
                    std::runtime_error);
  }
}

TEST_CASE("external adapter round-trips through a scripted solver") {
  MilpModel m;
  m.set_objective_sense(ObjSense::maximize);
  m.add_continuous("x", 0.0, 4.0);
  m.add_binary("pick");
  m.add_objective_term(0, 1.0);
  m.add_objective_term(1, 2.0);
  m.add_row("cap", {{0, 1.0}, {1, 1.0}}, RowSense::le, 4.5);

  auto sol_path = temp_file("stub-sol");
  auto mps_path = temp_file("stub-mps");
  write_text(sol_path, "optimal\n=obj= 5.5\nx 3.5\npick 1\n");

  SUBCASE("solution is read back and the model is written out") {
    SolverConfig cfg;
    cfg.mode = SolverConfig::Mode::external;
    cfg.command = "cp {mps} " + mps_path.string() + " && cp " +
                  sol_path.string() + " {sol}";
    MilpSolution sol = external_solve(m, cfg);
    CHECK(sol.status == SolveStatus::optimal);
    CHECK(sol.objective == 5.5);
    CHECK(sol.values[1] == 1.0);
    // The adapter handed the solver this exact model.
    std::ifstream in(mps_path);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(read_mps(buf.str()) == m);
  }
  SUBCASE("nonzero exit codes are propagated as errors") {
    SolverConfig cfg;
    cfg.mode = SolverConfig::Mode::external;
    cfg.command = "exit 3";
    CHECK_THROWS_WITH_AS(external_solve(m, cfg), doctest::Contains("exit"),
                         std::runtime_error);
  }
  SUBCASE("a command that writes nothing is an error") {
    SolverConfig cfg;
    cfg.mode = SolverConfig::Mode::external;
    cfg.command = "true";
    CHECK_THROWS_AS(external_solve(m, cfg), std::runtime_error);
  }
  SUBCASE("timeouts kill the child and report the limit") {
    SolverConfig cfg;
    cfg.mode = SolverConfig::Mode::external;
    cfg.command = "sleep 30";
    cfg.time_limit_seconds = 0.2;
    auto t0 = std::chrono::steady_clock::now();
    MilpSolution sol = external_solve(m, cfg);
    double waited =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    CHECK(sol.status == SolveStatus::limit);
    CHECK(waited < 5.0);
  }
  std::filesystem::remove(sol_path);
  std::filesystem::remove(mps_path);
}

TEST_CASE("solve_model dispatches on the configured mode") {
  MilpModel m;
  m.set_objective_sense(ObjSense::maximize);
  m.add_binary("z");
  m.add_objective_term(0, 2.0);
  SolverConfig cfg;  // internal by default
  MilpSolution sol = solve_model(m, cfg);
  CHECK(sol.status == SolveStatus::optimal);
  CHECK(sol.objective == 2.0);
  CHECK(sol.wall_seconds >= 0.0);
}
