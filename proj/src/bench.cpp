#include "pooling/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pooling/mps_io.hpp"

namespace pooling::bench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t at = 0; at < line.size(); ++at) {
    char c = line[at];
    if (quoted) {
      if (c == '"' && at + 1 < line.size() && line[at + 1] == '"') {
        cur += '"';
        ++at;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, const std::string& what) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw std::invalid_argument("csv: bad " + what + " '" + s + "'");
  return v;
}

SolveStatus status_from_string(const std::string& s) {
  if (s == "optimal") return SolveStatus::optimal;
  if (s == "infeasible") return SolveStatus::infeasible;
  if (s == "unbounded") return SolveStatus::unbounded;
  if (s == "limit") return SolveStatus::limit;
  throw std::invalid_argument("csv: unknown status '" + s + "'");
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Timings persist to six decimals; snap them at measurement so in-memory
// records, the CSV on disk, and anything recomputed from it agree exactly.
double recorded_seconds(double v) {
  return std::strtod(fixed6(v).c_str(), nullptr);
}

}  // namespace

std::vector<BenchRecord> run_matrix(
    const std::vector<std::pair<std::string, PoolingInstance>>& instances,
    const std::vector<discretize::VariantSpec>& variants,
    const BenchConfig& cfg) {
  struct Cell {
    std::size_t instance = 0, variant = 0;
  };
  std::vector<Cell> cells;
  for (std::size_t a = 0; a < instances.size(); ++a)
    for (std::size_t b = 0; b < variants.size(); ++b) cells.push_back({a, b});
  std::vector<BenchRecord> records(cells.size());

  auto run_cell = [&](std::size_t c) {
    const auto& [id, inst] = instances[cells[c].instance];
    const auto& variant = variants[cells[c].variant];
    BenchRecord rec;
    rec.instance = id;
    rec.variant = variant.name();
    try {
      auto t0 = std::chrono::steady_clock::now();
      MilpModel model = discretize::build_model(inst, variant);
      rec.build_seconds = recorded_seconds(seconds_since(t0));
      t0 = std::chrono::steady_clock::now();
      MilpSolution sol = solve::solve_model(model, cfg.solver);
      rec.wall_seconds = recorded_seconds(
          sol.wall_seconds > 0.0 ? sol.wall_seconds : seconds_since(t0));
      rec.status = sol.status;
      rec.objective = sol.objective;
      rec.bound = sol.best_bound;
    } catch (const std::exception& e) {
      rec.status = SolveStatus::limit;
      rec.error = e.what();
    }
    records[c] = std::move(rec);
  };

  int workers = std::clamp(cfg.workers, 1, 32);
  workers = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(workers), cells.size()));
  if (workers <= 1) {
    for (std::size_t c = 0; c < cells.size(); ++c) run_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t c = next.fetch_add(1); c < cells.size();
             c = next.fetch_add(1))
          run_cell(c);
      });
    for (auto& t : pool) t.join();
  }

  std::sort(records.begin(), records.end(),
            [](const BenchRecord& a, const BenchRecord& b) {
              if (a.instance != b.instance) return a.instance < b.instance;
              return a.variant < b.variant;
            });
  return records;
}

namespace {

struct MatrixView {
  std::vector<std::string> instances;  // first-appearance order
  std::vector<std::string> variants;
  std::map<std::string, std::map<std::string, const BenchRecord*>> cell;
};

MatrixView matrix_view(const std::vector<BenchRecord>& records) {
  MatrixView view;
  for (const auto& rec : records) {
    if (!view.cell.count(rec.instance)) view.instances.push_back(rec.instance);
    auto& row = view.cell[rec.instance];
    if (row.count(rec.variant))
      throw std::invalid_argument("benchmark matrix: duplicate record for " +
                                  rec.instance + " / " + rec.variant);
    row[rec.variant] = &rec;
    if (std::find(view.variants.begin(), view.variants.end(), rec.variant) ==
        view.variants.end())
      view.variants.push_back(rec.variant);
  }
  for (const auto& id : view.instances)
    if (view.cell[id].size() != view.variants.size())
      throw std::invalid_argument(
          "benchmark matrix: incomplete record set for instance " + id);
  return view;
}

}  // namespace

std::vector<std::string> filter_instances(
    const std::vector<BenchRecord>& records, double t_max, double t_min) {
  MatrixView view = matrix_view(records);
  std::vector<std::string> kept;
  for (const auto& id : view.instances) {
    bool solvable = false;   // some variant optimal within t_max
    bool too_easy = true;    // every variant optimal within t_min
    for (const auto& [variant, rec] : view.cell[id]) {
      bool optimal = rec->status == SolveStatus::optimal && rec->error.empty();
      if (optimal && rec->wall_seconds <= t_max) solvable = true;
      if (!optimal || rec->wall_seconds > t_min) too_easy = false;
    }
    if (solvable && !too_easy) kept.push_back(id);
  }
  return kept;
}

std::vector<ProfileCurve> performance_profile(
    const std::vector<BenchRecord>& records,
    const std::vector<std::string>& filtered) {
  if (filtered.empty())
    throw std::invalid_argument("performance profile: empty instance set");
  MatrixView view = matrix_view(records);
  for (const auto& id : filtered)
    if (!view.cell.count(id))
      throw std::invalid_argument("performance profile: no records for " + id);

  // ratio[variant][instance position]
  std::map<std::string, std::vector<double>> ratio;
  std::set<double> taus;
  for (std::size_t at = 0; at < filtered.size(); ++at) {
    const auto& row = view.cell[filtered[at]];
    double best = kInf;
    for (const auto& [variant, rec] : row)
      if (rec->status == SolveStatus::optimal && rec->error.empty())
        best = std::min(best, std::max(rec->wall_seconds, 1e-9));
    for (const auto& [variant, rec] : row) {
      auto& column = ratio[variant];
      column.resize(filtered.size(), kInf);
      bool optimal = rec->status == SolveStatus::optimal && rec->error.empty();
      double r = kInf;
      if (optimal && std::isfinite(best))
        r = std::max(rec->wall_seconds, 1e-9) / best;
      column[at] = r;
      if (std::isfinite(r)) taus.insert(r);
    }
  }

  std::vector<ProfileCurve> curves;
  for (const auto& variant : view.variants) {
    ProfileCurve curve;
    curve.variant = variant;
    const auto& column = ratio[variant];
    for (double tau : taus) {
      std::size_t hits = 0;
      for (double r : column)
        if (r <= tau) ++hits;
      curve.points.push_back(
          {tau, static_cast<double>(hits) / static_cast<double>(filtered.size())});
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

double gap(double milp_obj, double best_possible) {
  if (!(best_possible > 0.0))
    throw std::invalid_argument("gap: best-possible value must be positive");
  return 1.0 - milp_obj / best_possible;
}

std::string render_gap(double fraction) {
  if (fraction == 0.0) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f%%", fraction * 100.0);
  return buf;
}

std::string records_csv(const std::vector<BenchRecord>& records) {
  std::string out =
      "instance,variant,status,wall_seconds,build_seconds,objective,bound,"
      "error\n";
  for (const auto& rec : records) {
    out += csv_field(rec.instance) + "," + csv_field(rec.variant) + "," +
           to_string(rec.status) + "," + fixed6(rec.wall_seconds) + "," +
           fixed6(rec.build_seconds) + "," + format_number(rec.objective) +
           "," + format_number(rec.bound) + "," + csv_field(rec.error) + "\n";
  }
  return out;
}

std::vector<BenchRecord> parse_records_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<BenchRecord> records;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("instance,", 0) == 0) continue;
    }
    auto fields = split_csv_line(line);
    if (fields.size() != 8)
      throw std::invalid_argument("records csv: expected 8 fields, got " +
                                  std::to_string(fields.size()));
    BenchRecord rec;
    rec.instance = fields[0];
    rec.variant = fields[1];
    rec.status = status_from_string(fields[2]);
    rec.wall_seconds = parse_double(fields[3], "wall time");
    rec.build_seconds = parse_double(fields[4], "build time");
    rec.objective = parse_double(fields[5], "objective");
    rec.bound = parse_double(fields[6], "bound");
    rec.error = fields[7];
    records.push_back(std::move(rec));
  }
  return records;
}

std::string profiles_csv(const std::vector<ProfileCurve>& curves) {
  std::string out = "variant,tau,fraction\n";
  for (const auto& curve : curves)
    for (const auto& [tau, fraction] : curve.points)
      out += csv_field(curve.variant) + "," + format_number(tau) + "," +
             format_number(fraction) + "\n";
  return out;
}

std::string profiles_gnuplot(const std::vector<ProfileCurve>& curves) {
  std::string out;
  for (const auto& curve : curves) {
    out += "# " + curve.variant + "\n";
    for (const auto& [tau, fraction] : curve.points)
      out += format_number(tau) + " " + format_number(fraction) + "\n";
    out += "\n";
  }
  return out;
}

std::map<std::string, double> parse_value_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::map<std::string, double> values;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 2)
      throw std::invalid_argument("value csv: expected 2 fields per line");
    char* end = nullptr;
    double v = std::strtod(fields[1].c_str(), &end);
    if (fields[1].empty() || end != fields[1].c_str() + fields[1].size()) {
      if (values.empty()) continue;  // tolerate a header line
      throw std::invalid_argument("value csv: bad value '" + fields[1] + "'");
    }
    values[fields[0]] = v;
  }
  return values;
}

std::string gap_table_csv(const std::vector<BenchRecord>& records,
                          const std::map<std::string, double>& best_known) {
  std::string out = "instance,variant,objective,best_known,gap\n";
  for (const auto& rec : records) {
    auto it = best_known.find(rec.instance);
    std::string best = it == best_known.end() ? "" : format_number(it->second);
    std::string g;
    if (it != best_known.end() && rec.status == SolveStatus::optimal &&
        rec.error.empty())
      g = render_gap(gap(rec.objective, it->second));
    out += csv_field(rec.instance) + "," + csv_field(rec.variant) + "," +
           format_number(rec.objective) + "," + best + "," + g + "\n";
  }
  return out;
}

void emit_reports(const std::vector<BenchRecord>& records,
                  const std::vector<ProfileCurve>& profiles,
                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto write = [&](const std::string& name, const std::string& body) {
    fs::path path = fs::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
  };
  write("records.csv", records_csv(records));
  write("profiles.csv", profiles_csv(profiles));
  write("profiles.dat", profiles_gnuplot(profiles));
}

}  // namespace pooling::bench
