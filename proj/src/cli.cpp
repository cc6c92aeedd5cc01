#include "pooling/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pooling/bench.hpp"
#include "pooling/cuts.hpp"
#include "pooling/discretize.hpp"
#include "pooling/instance.hpp"
#include "pooling/mps_io.hpp"
#include "pooling/nlp.hpp"
#include "pooling/solve.hpp"

namespace pooling::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body;
}

void emit(const std::string& out_path, const std::string& body) {
  if (out_path.empty())
    std::cout << body;
  else
    write_file(out_path, body);
}

std::string describe(const cuts::LinearCut& cut) {
  std::string s = cut.label + ": ";
  bool lead = true;
  auto term = [&](double c, const char* v) {
    if (c == 0.0) return;
    if (!lead) s += c < 0 ? " - " : " + ";
    else if (c < 0) s += "-";
    lead = false;
    double a = std::abs(c);
    if (a != 1.0) s += format_number(a) + "*";
    s += v;
  };
  term(cut.split_coef, "r");
  term(cut.inflow_coef, "f");
  term(cut.outflow_coef, "w");
  if (lead) s += "0";
  s += " <= " + format_number(cut.rhs);
  return s;
}

ordered_json cut_json(const cuts::LinearCut& cut) {
  return ordered_json{{"label", cut.label},
                      {"split_coef", cut.split_coef},
                      {"inflow_coef", cut.inflow_coef},
                      {"outflow_coef", cut.outflow_coef},
                      {"rhs", cut.rhs},
                      {"text", describe(cut)}};
}

ordered_json vertices_json(const std::vector<std::array<double, 2>>& vs) {
  ordered_json out = ordered_json::array();
  for (const auto& v : vs) out.push_back({v[0], v[1]});
  return out;
}

discretize::VariantSpec assemble_variant(const std::string& formulation,
                                         int level,
                                         const std::string& values,
                                         const std::string& cut_string) {
  std::string text = formulation + ":";
  text += values.empty() ? std::to_string(level) : values;
  text += ":" + (cut_string.empty() ? std::string("none") : cut_string);
  return discretize::VariantSpec::parse(text);
}

std::string solution_file(const MilpModel& model, const MilpSolution& sol) {
  std::string out = std::string(to_string(sol.status)) + "\n";
  if (!sol.values.empty()) {
    out += "=obj= " + format_number(sol.objective) + "\n";
    const auto& vars = model.variables();
    for (std::size_t v = 0; v < vars.size(); ++v)
      out += vars[v].name + " " + format_number(sol.values[v]) + "\n";
  }
  return out;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

struct Options {
  // generate
  int streams = 3, pools = 2, products = 2, props = 1;
  std::uint64_t seed = 1;
  // shared
  std::string out, out_dir = "bench-out", instance_path, formulation = "sb";
  int level = 4;
  std::string values, cut_string, format = "mps";
  // cuts / verify-hull
  double gamma = 0.0, upsilon = 0.0;
  bool as_json = false;
  // solve
  std::string model_path, variant_text, solver_cmd, records_path, best_known;
  bool relax = false;
  double time_limit = 300.0, filter_min = 5.0;
  int workers = 1;
  std::string variants_list;
};

int cmd_generate(const Options& opt) {
  InstanceDims dims;
  dims.streams = opt.streams;
  dims.pools = opt.pools;
  dims.products = opt.products;
  dims.properties = opt.props;
  PoolingInstance inst = generate_instance(dims, opt.seed);
  emit(opt.out, write_instance(inst));
  return 0;
}

int cmd_build(const Options& opt) {
  PoolingInstance inst = load_instance(opt.instance_path);
  discretize::VariantSpec variant = assemble_variant(
      opt.formulation, opt.level, opt.values, opt.cut_string);
  std::vector<std::string> warnings;
  MilpModel model = discretize::build_model(inst, variant, &warnings);
  print_warnings(warnings);
  emit(opt.out, opt.format == "lp" ? write_lp(model) : write_mps(model));
  return 0;
}

int cmd_cuts(const Options& opt) {
  ordered_json doc;
  std::ostringstream text;
  if (!opt.values.empty()) {
    std::vector<double> grid;
    std::istringstream vs(opt.values);
    std::string tok;
    while (std::getline(vs, tok, ',')) grid.push_back(std::stod(tok));
    auto params = cuts::value_hull_params(opt.gamma, opt.upsilon, grid);
    auto rc = cuts::rounding_cuts(params);
    auto vb = cuts::value_bounds(opt.gamma, opt.upsilon, grid);
    text << "parameters: inflow_bound " << format_number(params.inflow_bound)
         << "  outflow_bound " << format_number(params.outflow_bound)
         << "  values " << grid.size() << "\n"
         << "  r_low " << format_number(params.r_low) << "  r_high "
         << format_number(params.r_high) << "  chord_slope "
         << format_number(params.chord_slope) << "  step_slope "
         << format_number(params.step_slope) << "  single_cut "
         << (params.single_cut() ? "yes" : "no") << "\n";
    text << "rounding cuts:\n";
    for (const auto& cut : rc) text << "  " << describe(cut) << "\n";
    text << "value bounds:\n";
    for (const auto& b : vb)
      text << "  value " << format_number(b.value) << " (position " << b.index
           << "): coefficient " << format_number(b.coefficient) << "\n";
    doc["parameters"] = {{"inflow_bound", params.inflow_bound},
                         {"outflow_bound", params.outflow_bound},
                         {"values", params.values},
                         {"r_low", params.r_low},
                         {"r_high", params.r_high},
                         {"chord_slope", params.chord_slope},
                         {"step_slope", params.step_slope},
                         {"single_cut", params.single_cut()}};
    doc["rounding_cuts"] = ordered_json::array();
    for (const auto& cut : rc) doc["rounding_cuts"].push_back(cut_json(cut));
    doc["value_bounds"] = ordered_json::array();
    for (const auto& b : vb)
      doc["value_bounds"].push_back({{"index", b.index},
                                     {"value", b.value},
                                     {"coefficient", b.coefficient}});
  } else {
    auto params = cuts::hull_params(opt.gamma, opt.upsilon, opt.level);
    auto rc = cuts::rounding_cuts(params);
    auto hull = cuts::hull_facets(params);
    auto pb = cuts::p_dependent_bounds(opt.gamma, opt.upsilon, opt.level);
    auto lti = cuts::lti_cuts(opt.gamma, opt.upsilon, opt.level);
    std::vector<cuts::LinearCut> ltis;
    if (opt.level >= 2)
      ltis = cuts::lti_strengthened(opt.gamma, opt.upsilon, opt.level);
    text << "parameters: inflow_bound " << format_number(params.inflow_bound)
         << "  outflow_bound " << format_number(params.outflow_bound)
         << "  level " << params.level << "\n"
         << "  r_low " << format_number(params.r_low) << "  r_high "
         << format_number(params.r_high) << "  chord_slope "
         << format_number(params.chord_slope) << "  step_slope "
         << format_number(params.step_slope) << "  single_cut "
         << (params.single_cut() ? "yes" : "no") << "\n";
    text << "rounding cuts:\n";
    for (const auto& cut : rc) text << "  " << describe(cut) << "\n";
    text << "hull vertices (counterclockwise):\n";
    for (const auto& v : hull.vertices)
      text << "  (" << format_number(v[0]) << ", " << format_number(v[1])
           << ")\n";
    text << "bit bounds:\n";
    for (const auto& b : pb)
      text << "  bit " << b.bit << ": coefficient "
           << format_number(b.coefficient) << "\n";
    text << "tangent cuts:\n";
    for (const auto& cut : lti) text << "  " << describe(cut) << "\n";
    if (!ltis.empty()) {
      text << "secant cuts:\n";
      for (const auto& cut : ltis) text << "  " << describe(cut) << "\n";
    }
    doc["parameters"] = {{"inflow_bound", params.inflow_bound},
                         {"outflow_bound", params.outflow_bound},
                         {"level", params.level},
                         {"r_low", params.r_low},
                         {"r_high", params.r_high},
                         {"chord_slope", params.chord_slope},
                         {"step_slope", params.step_slope},
                         {"single_cut", params.single_cut()}};
    doc["rounding_cuts"] = ordered_json::array();
    for (const auto& cut : rc) doc["rounding_cuts"].push_back(cut_json(cut));
    doc["hull_vertices"] = vertices_json(hull.vertices);
    doc["bit_bounds"] = ordered_json::array();
    for (const auto& b : pb)
      doc["bit_bounds"].push_back(
          {{"bit", b.bit}, {"coefficient", b.coefficient}});
    doc["tangent_cuts"] = ordered_json::array();
    for (const auto& cut : lti) doc["tangent_cuts"].push_back(cut_json(cut));
    doc["secant_cuts"] = ordered_json::array();
    for (const auto& cut : ltis) doc["secant_cuts"].push_back(cut_json(cut));
  }
  emit(opt.out, opt.as_json ? doc.dump(2) + "\n" : text.str());
  return 0;
}

int cmd_verify_hull(const Options& opt) {
  auto closed = cuts::hull_facets(
      cuts::hull_params(opt.gamma, opt.upsilon, opt.level));
  auto oracle = cuts::brute_force_hull(opt.gamma, opt.upsilon, opt.level);
  bool match = closed.vertices.size() == oracle.vertices.size();
  double worst = 0.0;
  if (match)
    for (std::size_t v = 0; v < closed.vertices.size(); ++v)
      for (int d = 0; d < 2; ++d)
        worst = std::max(
            worst, std::abs(closed.vertices[v][d] - oracle.vertices[v][d]));
  match = match && worst <= 1e-9;
  if (opt.as_json) {
    ordered_json doc{{"match", match},
                     {"max_deviation", worst},
                     {"closed_form", vertices_json(closed.vertices)},
                     {"brute_force", vertices_json(oracle.vertices)}};
    emit(opt.out, doc.dump(2) + "\n");
  } else {
    std::ostringstream text;
    text << "closed-form vertices:\n";
    for (const auto& v : closed.vertices)
      text << "  (" << format_number(v[0]) << ", " << format_number(v[1])
           << ")\n";
    text << "brute-force vertices:\n";
    for (const auto& v : oracle.vertices)
      text << "  (" << format_number(v[0]) << ", " << format_number(v[1])
           << ")\n";
    text << (match ? "hulls match" : "HULLS DIFFER") << " ("
         << closed.vertices.size() << " vs " << oracle.vertices.size()
         << " vertices, max deviation " << format_number(worst) << ")\n";
    emit(opt.out, text.str());
  }
  if (!match) {
    std::cerr << "error: closed-form hull disagrees with brute force\n";
    return 1;
  }
  return 0;
}

solve::SolverConfig solver_config(const Options& opt) {
  solve::SolverConfig cfg;
  if (!opt.solver_cmd.empty()) {
    cfg.mode = solve::SolverConfig::Mode::external;
    cfg.command = opt.solver_cmd;
  }
  cfg.time_limit_seconds = opt.time_limit;
  cfg.workers = opt.workers;
  return cfg;
}

int cmd_solve(const Options& opt) {
  MilpModel model;
  if (!opt.model_path.empty()) {
    model = read_mps(read_file(opt.model_path));
  } else {
    PoolingInstance inst = load_instance(opt.instance_path);
    auto variant = discretize::VariantSpec::parse(
        opt.variant_text.empty() ? "sb4" : opt.variant_text);
    std::vector<std::string> warnings;
    model = discretize::build_model(inst, variant, &warnings);
    print_warnings(warnings);
  }
  if (opt.relax) model = lp_relaxation(model);
  MilpSolution sol = solve::solve_model(model, solver_config(opt));
  std::cout << "status: " << to_string(sol.status) << "\n"
            << "objective: " << format_number(sol.objective) << "\n"
            << "bound: " << format_number(sol.best_bound) << "\n"
            << "wall_seconds: " << format_number(sol.wall_seconds) << "\n";
  if (!opt.out.empty()) write_file(opt.out, solution_file(model, sol));
  return 0;
}

std::vector<discretize::VariantSpec> parse_variant_list(
    const std::string& list) {
  std::vector<discretize::VariantSpec> variants;
  std::istringstream in(list);
  std::string tok;
  while (std::getline(in, tok, ','))
    if (!tok.empty()) variants.push_back(discretize::VariantSpec::parse(tok));
  if (variants.empty())
    throw std::invalid_argument("no variants given");
  return variants;
}

int finish_reports(const std::vector<bench::BenchRecord>& records,
                   const Options& opt) {
  auto kept = bench::filter_instances(records, opt.time_limit, opt.filter_min);
  std::vector<bench::ProfileCurve> profiles;
  if (!kept.empty()) profiles = bench::performance_profile(records, kept);
  bench::emit_reports(records, profiles, opt.out_dir);
  if (!opt.best_known.empty()) {
    auto values = bench::parse_value_csv(read_file(opt.best_known));
    write_file((fs::path(opt.out_dir) / "gaps.csv").string(),
               bench::gap_table_csv(records, values));
  }
  std::cout << "records: " << records.size() << "\n";
  std::cout << "kept instances: " << kept.size();
  for (const auto& id : kept) std::cout << " " << id;
  std::cout << "\nreports: " << opt.out_dir << "/records.csv "
            << opt.out_dir << "/profiles.csv " << opt.out_dir
            << "/profiles.dat";
  if (!opt.best_known.empty()) std::cout << " " << opt.out_dir << "/gaps.csv";
  std::cout << "\n";
  return 0;
}

int cmd_bench(const Options& opt) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(opt.instance_path))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw std::invalid_argument("no .json instances under " +
                                opt.instance_path);
  std::vector<std::pair<std::string, PoolingInstance>> instances;
  for (const auto& path : files)
    instances.push_back({path.stem().string(), load_instance(path.string())});
  auto variants = parse_variant_list(opt.variants_list);
  bench::BenchConfig cfg;
  cfg.solver = solver_config(opt);
  cfg.workers = opt.workers;
  cfg.solver.workers = 1;  // parallelism lives at the matrix level
  auto records = bench::run_matrix(instances, variants, cfg);
  return finish_reports(records, opt);
}

int cmd_profile(const Options& opt) {
  auto records = bench::parse_records_csv(read_file(opt.records_path));
  if (records.empty()) throw std::invalid_argument("records file is empty");
  return finish_reports(records, opt);
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"discretized pooling models: build, tighten, verify, solve, "
               "benchmark"};
  app.require_subcommand(1);
  Options opt;

  auto* gen = app.add_subcommand("generate", "write a random instance (JSON)");
  gen->add_option("--streams", opt.streams, "number of input streams");
  gen->add_option("--pools", opt.pools, "number of pools");
  gen->add_option("--products", opt.products, "number of products");
  gen->add_option("--props", opt.props, "number of quality properties");
  gen->add_option("--seed", opt.seed, "random seed");
  gen->add_option("--out", opt.out, "output path (default: stdout)");

  auto* build = app.add_subcommand("build", "build a discretized model");
  build->add_option("--formulation", opt.formulation, "sb, pq, or sbn")
      ->check(CLI::IsMember({"sb", "pq", "sbn"}));
  build->add_option("--n", opt.level, "discretization level");
  build->add_option("--values", opt.values,
                    "explicit grid values for sbn, comma separated");
  build->add_option("--cuts", opt.cut_string,
                    "cut selection: f, t, ft, lti, ltis, none (combine with "
                    "'-')");
  build->add_option("--instance", opt.instance_path, "instance JSON path")
      ->required();
  build->add_option("--out", opt.out, "output path (default: stdout)");
  build->add_option("--format", opt.format, "mps or lp")
      ->check(CLI::IsMember({"mps", "lp"}));

  auto* cc = app.add_subcommand("cuts", "print tightening cuts for one pair");
  cc->add_option("--gamma", opt.gamma, "pool capacity (inflow bound)")
      ->required();
  cc->add_option("--upsilon", opt.upsilon, "pipeline capacity (outflow bound)")
      ->required();
  cc->add_option("--n", opt.level, "discretization level");
  cc->add_option("--values", opt.values, "explicit grid values");
  cc->add_flag("--json", opt.as_json, "JSON output");
  cc->add_option("--out", opt.out, "output path (default: stdout)");

  auto* vh = app.add_subcommand(
      "verify-hull", "compare closed-form hull against brute force");
  vh->add_option("--gamma", opt.gamma, "pool capacity")->required();
  vh->add_option("--upsilon", opt.upsilon, "pipeline capacity")->required();
  vh->add_option("--n", opt.level, "discretization level")->required();
  vh->add_flag("--json", opt.as_json, "JSON output");
  vh->add_option("--out", opt.out, "output path (default: stdout)");

  auto* solve_cmd = app.add_subcommand("solve", "solve a model or instance");
  auto* model_opt = solve_cmd->add_option("--model", opt.model_path, "MPS path");
  auto* inst_opt =
      solve_cmd->add_option("--instance", opt.instance_path, "instance JSON path");
  solve_cmd->add_option("--variant", opt.variant_text,
                    "variant such as sb4-ft or sbn:0,0.5,1:f");
  solve_cmd->add_flag("--relax", opt.relax, "solve the LP relaxation");
  solve_cmd->add_option("--solver-cmd", opt.solver_cmd,
                    "external command template with {mps} and {sol}");
  solve_cmd->add_option("--time-limit", opt.time_limit, "seconds");
  solve_cmd->add_option("--workers", opt.workers, "internal solver threads");
  solve_cmd->add_option("--out", opt.out, "write the solution file here");
  model_opt->excludes(inst_opt);

  auto* bench_cmd = app.add_subcommand("bench", "run an instance x variant "
                                                "matrix and emit reports");
  bench_cmd->add_option("--instances", opt.instance_path,
                        "directory of instance JSON files")
      ->required();
  bench_cmd->add_option("--variants", opt.variants_list,
                        "comma-separated variant list")
      ->required();
  bench_cmd->add_option("--time-limit", opt.time_limit, "per-cell seconds");
  bench_cmd->add_option("--filter-min", opt.filter_min,
                        "drop instances every variant solves this fast");
  bench_cmd->add_option("--workers", opt.workers, "parallel matrix cells");
  bench_cmd->add_option("--solver-cmd", opt.solver_cmd,
                        "external command template");
  bench_cmd->add_option("--out-dir", opt.out_dir, "report directory");
  bench_cmd->add_option("--best-known", opt.best_known,
                        "CSV of best-known objective values");

  auto* profile = app.add_subcommand(
      "profile", "recompute filtering and profiles from a records CSV");
  profile->add_option("--records", opt.records_path, "records CSV path")
      ->required();
  profile->add_option("--time-limit", opt.time_limit, "filter upper bound");
  profile->add_option("--filter-min", opt.filter_min, "filter lower bound");
  profile->add_option("--out-dir", opt.out_dir, "report directory");
  profile->add_option("--best-known", opt.best_known,
                      "CSV of best-known objective values");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(opt);
    if (build->parsed()) return cmd_build(opt);
    if (cc->parsed()) return cmd_cuts(opt);
    if (vh->parsed()) return cmd_verify_hull(opt);
    if (solve_cmd->parsed()) {
      if (opt.model_path.empty() && opt.instance_path.empty()) {
        std::cerr << "error: solve needs --model or --instance\n";
        return 2;
      }
      return cmd_solve(opt);
    }
    if (bench_cmd->parsed()) return cmd_bench(opt);
    if (profile->parsed()) return cmd_profile(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no command\n";
  return 2;
}

}  // namespace pooling::cli
