#include "pooling/solve.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pooling/mps_io.hpp"

namespace pooling::solve {

namespace {

constexpr double kRowFeasTol = 1e-7;

struct Assignment {
  std::uint64_t code = 0;  // bit (B-1-q) holds the value of the q-th binary
  double objective = 0.0;
  std::vector<double> values;
  bool feasible = false;
};

// Deterministic preference: higher score, then lexicographically smaller
// binary vector (== smaller code, because the first binary is the top bit).
bool better(const Assignment& a, const Assignment& b, double sense) {
  if (!b.feasible) return a.feasible;
  if (!a.feasible) return false;
  double sa = sense * a.objective, sb = sense * b.objective;
  if (sa != sb) return sa > sb;
  return a.code < b.code;
}

// Evaluate one binary assignment: substitute the fixed binaries, turn
// singleton rows into bounds, reject constant rows that fail, and solve the
// continuous remainder.
Assignment evaluate_assignment(const MilpModel& model,
                               const std::vector<int>& binaries,
                               std::uint64_t code) {
  const std::size_t nvars = model.variables().size();
  const std::size_t nbin = binaries.size();

  Assignment result;
  result.code = code;

  std::vector<char> fixed(nvars, 0);
  std::vector<double> value(nvars, 0.0);
  for (std::size_t q = 0; q < nbin; ++q) {
    double v = static_cast<double>((code >> (nbin - 1 - q)) & 1u);
    fixed[static_cast<std::size_t>(binaries[q])] = 1;
    value[static_cast<std::size_t>(binaries[q])] = v;
  }

  std::vector<double> lb(nvars), ub(nvars);
  for (std::size_t v = 0; v < nvars; ++v) {
    lb[v] = model.variables()[v].lb;
    ub[v] = model.variables()[v].ub;
  }

  struct Kept {
    const Row* row;
    double rhs;
  };
  std::vector<Kept> kept;
  kept.reserve(model.rows().size());

  for (const auto& row : model.rows()) {
    double rhs = row.rhs;
    int live = -1;
    int live_count = 0;
    double live_coef = 0.0;
    for (const auto& [v, a] : row.coefs) {
      if (fixed[static_cast<std::size_t>(v)]) {
        rhs -= a * value[static_cast<std::size_t>(v)];
      } else if (live_count == 0 || v != live) {
        if (++live_count == 1) {
          live = v;
          live_coef = a;
        }
      }
    }
    if (live_count == 0) {
      double margin = kRowFeasTol * (1.0 + std::fabs(row.rhs));
      bool ok = true;
      switch (row.sense) {
        case RowSense::le: ok = 0.0 <= rhs + margin; break;
        case RowSense::ge: ok = 0.0 >= rhs - margin; break;
        case RowSense::eq: ok = std::fabs(rhs) <= margin; break;
      }
      if (!ok) return result;
      continue;
    }
    if (live_count == 1) {
      std::size_t v = static_cast<std::size_t>(live);
      double bound = rhs / live_coef;
      bool upper = (row.sense == RowSense::le) == (live_coef > 0.0);
      if (row.sense == RowSense::eq) {
        lb[v] = std::max(lb[v], bound);
        ub[v] = std::min(ub[v], bound);
      } else if (upper) {
        ub[v] = std::min(ub[v], bound);
      } else {
        lb[v] = std::max(lb[v], bound);
      }
      continue;
    }
    kept.push_back({&row, rhs});
  }

  for (std::size_t v = 0; v < nvars; ++v) {
    if (fixed[v]) continue;
    if (lb[v] > ub[v]) {
      if (lb[v] > ub[v] + kRowFeasTol * (1.0 + std::fabs(ub[v]))) return result;
      lb[v] = ub[v];
    }
  }

  // Continuous remainder in original variable order.
  MilpModel lp;
  lp.set_objective_sense(model.objective_sense());
  std::vector<int> to_reduced(nvars, -1);
  for (std::size_t v = 0; v < nvars; ++v) {
    if (fixed[v]) continue;
    to_reduced[v] = lp.add_continuous(model.variables()[v].name, lb[v], ub[v]);
    double c = model.objective()[v];
    if (c != 0.0) lp.add_objective_term(to_reduced[v], c);
  }
  for (std::size_t r = 0; r < kept.size(); ++r) {
    std::vector<std::pair<int, double>> coefs;
    for (const auto& [v, a] : kept[r].row->coefs)
      if (!fixed[static_cast<std::size_t>(v)])
        coefs.push_back({to_reduced[static_cast<std::size_t>(v)], a});
    lp.add_row("r" + std::to_string(r), std::move(coefs),
               kept[r].row->sense, kept[r].rhs);
  }

  LpSolution sol = simplex_solve(lp);
  if (sol.status != SolveStatus::optimal) return result;

  for (std::size_t v = 0; v < nvars; ++v)
    if (to_reduced[v] >= 0)
      value[v] = sol.values[static_cast<std::size_t>(to_reduced[v])];
  result.values = std::move(value);
  result.objective = model.objective_value(result.values);
  result.feasible = true;
  return result;
}

}  // namespace

MilpSolution enumerate_milp(const MilpModel& model, int max_binaries,
                            int workers) {
  auto start = std::chrono::steady_clock::now();
  auto elapsed = [&start]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };

  std::vector<int> binaries;
  for (std::size_t v = 0; v < model.variables().size(); ++v)
    if (model.variables()[v].kind == VarKind::binary)
      binaries.push_back(static_cast<int>(v));
  if (static_cast<int>(binaries.size()) > max_binaries)
    throw std::invalid_argument(
        "enumerate_milp: model has " + std::to_string(binaries.size()) +
        " binaries, limit is " + std::to_string(max_binaries));

  const std::size_t nbin = binaries.size();
  const std::uint64_t total = std::uint64_t{1} << nbin;
  const double sense =
      model.objective_sense() == ObjSense::maximize ? 1.0 : -1.0;

  // Rows over binaries only can veto an assignment without touching the LP.
  struct PureRow {
    std::vector<std::pair<std::size_t, double>> terms;  // binary position, coef
    RowSense sense;
    double rhs;
    double margin;
  };
  std::vector<PureRow> pure;
  {
    std::vector<int> position(model.variables().size(), -1);
    for (std::size_t q = 0; q < nbin; ++q)
      position[static_cast<std::size_t>(binaries[q])] = static_cast<int>(q);
    for (const auto& row : model.rows()) {
      bool all_binary = !row.coefs.empty();
      for (const auto& [v, a] : row.coefs)
        all_binary = all_binary && position[static_cast<std::size_t>(v)] >= 0;
      if (!all_binary) continue;
      PureRow p{{}, row.sense, row.rhs,
                kRowFeasTol * (1.0 + std::fabs(row.rhs))};
      for (const auto& [v, a] : row.coefs)
        p.terms.push_back(
            {static_cast<std::size_t>(position[static_cast<std::size_t>(v)]), a});
      pure.push_back(std::move(p));
    }
  }
  auto passes_pure_rows = [&](std::uint64_t code) {
    for (const auto& p : pure) {
      double lhs = 0.0;
      for (const auto& [q, a] : p.terms)
        if ((code >> (nbin - 1 - q)) & 1u) lhs += a;
      switch (p.sense) {
        case RowSense::le:
          if (lhs > p.rhs + p.margin) return false;
          break;
        case RowSense::ge:
          if (lhs < p.rhs - p.margin) return false;
          break;
        case RowSense::eq:
          if (std::fabs(lhs - p.rhs) > p.margin) return false;
          break;
      }
    }
    return true;
  };

  int nworkers = workers > 0
                     ? workers
                     : static_cast<int>(std::thread::hardware_concurrency());
  nworkers = std::max(1, std::min<int>(nworkers, 32));
  nworkers = static_cast<int>(
      std::min<std::uint64_t>(static_cast<std::uint64_t>(nworkers), total));

  std::vector<Assignment> best_per_worker(static_cast<std::size_t>(nworkers));
  auto run_range = [&](int w, std::uint64_t lo, std::uint64_t hi) {
    Assignment best;
    for (std::uint64_t code = lo; code < hi; ++code) {
      if (!passes_pure_rows(code)) continue;
      Assignment cand = evaluate_assignment(model, binaries, code);
      if (better(cand, best, sense)) best = std::move(cand);
    }
    best_per_worker[static_cast<std::size_t>(w)] = std::move(best);
  };

  if (nworkers == 1) {
    run_range(0, 0, total);
  } else {
    std::vector<std::thread> pool;
    std::uint64_t chunk = total / static_cast<std::uint64_t>(nworkers);
    for (int w = 0; w < nworkers; ++w) {
      std::uint64_t lo = chunk * static_cast<std::uint64_t>(w);
      std::uint64_t hi = w + 1 == nworkers
                             ? total
                             : chunk * static_cast<std::uint64_t>(w + 1);
      pool.emplace_back(run_range, w, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  Assignment best;
  for (auto& cand : best_per_worker)
    if (better(cand, best, sense)) best = std::move(cand);

  MilpSolution out;
  out.wall_seconds = elapsed();
  if (!best.feasible) {
    out.status = SolveStatus::infeasible;
    out.objective = -sense * kInfinity;
    out.best_bound = out.objective;
    return out;
  }
  out.status = SolveStatus::optimal;
  out.objective = best.objective;
  out.best_bound = best.objective;
  out.values = std::move(best.values);
  return out;
}

MilpSolution parse_solution_file(const std::string& text,
                                 const MilpModel& model) {
  MilpSolution out;
  out.status = SolveStatus::optimal;
  out.values.assign(model.variables().size(), 0.0);

  std::optional<double> stated_objective;
  bool saw_content = false;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos)
      raw.resize(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty()) continue;

    auto fail = [&](const std::string& what) -> void {
      throw std::runtime_error("solution file, line " +
                               std::to_string(number) + ": " + what);
    };

    if (tok.size() == 1 && !saw_content) {
      std::string word = tok[0];
      std::transform(word.begin(), word.end(), word.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      if (word == "optimal") out.status = SolveStatus::optimal;
      else if (word == "infeasible") out.status = SolveStatus::infeasible;
      else if (word == "limit") out.status = SolveStatus::limit;
      else fail("unknown status '" + tok[0] + "'");
      saw_content = true;
      continue;
    }
    saw_content = true;
    auto number_or_fail = [&fail](const std::string& s) {
      char* end = nullptr;
      double v = std::strtod(s.c_str(), &end);
      if (end != s.c_str() + s.size() || s.empty())
        fail("bad number '" + s + "'");
      return v;
    };
    if (tok[0] == "=obj=") {
      if (tok.size() != 2) fail("expected '=obj= <number>'");
      stated_objective = number_or_fail(tok[1]);
      continue;
    }
    if (tok.size() != 2) fail("expected 'name value'");
    int idx = model.var_index(tok[0]);
    if (idx < 0) fail("unknown variable '" + tok[0] + "'");
    out.values[static_cast<std::size_t>(idx)] = number_or_fail(tok[1]);
  }

  if (out.status == SolveStatus::infeasible) {
    out.values.clear();
    out.objective = model.objective_sense() == ObjSense::maximize ? -kInfinity
                                                                  : kInfinity;
    out.best_bound = out.objective;
    return out;
  }
  out.objective = stated_objective ? *stated_objective
                                   : model.objective_value(out.values);
  out.best_bound = out.status == SolveStatus::optimal
                       ? out.objective
                       : (model.objective_sense() == ObjSense::maximize
                              ? kInfinity
                              : -kInfinity);
  return out;
}

MilpSolution external_solve(const MilpModel& model, const SolverConfig& cfg) {
  namespace fs = std::filesystem;
  auto start = std::chrono::steady_clock::now();

  char tmpl[] = "/tmp/poolmilp.XXXXXX";
  char* dir = mkdtemp(tmpl);
  if (dir == nullptr)
    throw std::runtime_error("external_solve: cannot create temp directory");
  fs::path base(dir);
  fs::path mps_path = base / "model.mps";
  fs::path sol_path = base / "model.sol";
  {
    std::ofstream out(mps_path);
    out << write_mps(model);
    if (!out) throw std::runtime_error("external_solve: cannot write " +
                                       mps_path.string());
  }

  std::string cmd = cfg.command;
  auto substitute = [&cmd](const std::string& key, const std::string& val) {
    for (std::string::size_type at = cmd.find(key); at != std::string::npos;
         at = cmd.find(key, at + val.size()))
      cmd.replace(at, key.size(), val);
  };
  substitute("{mps}", mps_path.string());
  substitute("{sol}", sol_path.string());

  pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("external_solve: fork failed");
  if (pid == 0) {
    setpgid(0, 0);
    execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);

  bool timed_out = false;
  int wstatus = 0;
  for (;;) {
    pid_t done = waitpid(pid, &wstatus, WNOHANG);
    if (done == pid) break;
    if (done < 0) throw std::runtime_error("external_solve: waitpid failed");
    double spent = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    if (spent > cfg.time_limit_seconds) {
      timed_out = true;
      kill(-pid, SIGKILL);
      waitpid(pid, &wstatus, 0);
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  auto cleanup = [&]() {
    std::error_code ec;
    fs::remove_all(base, ec);
  };

  std::string sol_text;
  if (fs::exists(sol_path)) {
    std::ifstream in(sol_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    sol_text = buf.str();
  }

  if (timed_out) {
    MilpSolution out;
    if (!sol_text.empty()) {
      try {
        out = parse_solution_file(sol_text, model);
      } catch (const std::exception&) {
        out.values.clear();
      }
    }
    out.status = SolveStatus::limit;
    if (out.values.empty()) {
      out.objective = model.objective_sense() == ObjSense::maximize
                          ? -kInfinity
                          : kInfinity;
    }
    out.best_bound = model.objective_sense() == ObjSense::maximize
                         ? kInfinity
                         : -kInfinity;
    out.wall_seconds = wall;
    cleanup();
    return out;
  }

  int exit_code = WIFEXITED(wstatus) ? WEXITSTATUS(wstatus) : -1;
  if (exit_code != 0) {
    cleanup();
    throw std::runtime_error("external solver command failed (exit " +
                             std::to_string(exit_code) + "): " + cmd);
  }
  if (sol_text.empty()) {
    cleanup();
    throw std::runtime_error(
        "external solver produced no solution file: " + cmd);
  }
  MilpSolution out;
  try {
    out = parse_solution_file(sol_text, model);
  } catch (const std::exception&) {
    cleanup();
    throw;
  }
  out.wall_seconds = wall;
  cleanup();
  return out;
}

MilpSolution solve_model(const MilpModel& model, const SolverConfig& cfg) {
  if (cfg.mode == SolverConfig::Mode::external)
    return external_solve(model, cfg);
  return enumerate_milp(model, cfg.max_binaries, cfg.workers);
}

}  // namespace pooling::solve
