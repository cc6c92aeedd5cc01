#include "pooling/mps_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace pooling {

std::string format_number(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

const char* sense_tag(RowSense s) {
  switch (s) {
    case RowSense::le: return "L";
    case RowSense::eq: return "E";
    case RowSense::ge: return "G";
  }
  return "?";
}

}  // namespace

std::string write_mps(const MilpModel& m) {
  std::ostringstream out;
  for (const auto& v : m.variables())
    if (!v.tag.empty()) out << "* TAG " << v.name << " " << v.tag << "\n";
  out << "NAME " << m.name() << "\n";
  out << "OBJSENSE\n    "
      << (m.objective_sense() == ObjSense::maximize ? "MAX" : "MIN") << "\n";
  out << "ROWS\n N  obj\n";
  for (const auto& r : m.rows())
    out << " " << sense_tag(r.sense) << "  " << r.name << "\n";

  // One COLUMNS block per variable, entries in row order, objective first.
  out << "COLUMNS\n";
  std::vector<std::vector<std::pair<std::string, double>>> entries(
      m.variables().size());
  for (std::size_t v = 0; v < m.variables().size(); ++v)
    if (m.objective()[v] != 0.0) entries[v].push_back({"obj", m.objective()[v]});
  for (const auto& r : m.rows())
    for (const auto& [v, c] : r.coefs)
      if (c != 0.0) entries[v].push_back({r.name, c});

  bool in_integer_block = false;
  int marker = 0;
  for (std::size_t v = 0; v < m.variables().size(); ++v) {
    const Variable& var = m.variables()[v];
    bool want_integer = var.kind == VarKind::binary;
    if (want_integer != in_integer_block) {
      out << "    M" << marker++ << "  'MARKER'  "
          << (want_integer ? "'INTORG'" : "'INTEND'") << "\n";
      in_integer_block = want_integer;
    }
    if (entries[v].empty()) entries[v].push_back({"obj", 0.0});
    for (std::size_t e = 0; e < entries[v].size(); e += 2) {
      out << "    " << var.name;
      for (std::size_t f = e; f < std::min(e + 2, entries[v].size()); ++f)
        out << "  " << entries[v][f].first << "  "
            << format_number(entries[v][f].second);
      out << "\n";
    }
  }
  if (in_integer_block) out << "    M" << marker++ << "  'MARKER'  'INTEND'\n";

  out << "RHS\n";
  for (const auto& r : m.rows())
    if (r.rhs != 0.0)
      out << "    RHS  " << r.name << "  " << format_number(r.rhs) << "\n";

  out << "BOUNDS\n";
  for (const auto& var : m.variables()) {
    if (var.kind == VarKind::binary) {
      out << " UP BND  " << var.name << "  1\n";
      continue;
    }
    if (var.lb == var.ub) {
      out << " FX BND  " << var.name << "  " << format_number(var.lb) << "\n";
      continue;
    }
    if (std::isinf(var.lb) && std::isinf(var.ub)) {
      out << " FR BND  " << var.name << "\n";
      continue;
    }
    if (std::isinf(var.lb))
      out << " MI BND  " << var.name << "\n";
    else if (var.lb != 0.0)
      out << " LO BND  " << var.name << "  " << format_number(var.lb) << "\n";
    if (!std::isinf(var.ub))
      out << " UP BND  " << var.name << "  " << format_number(var.ub) << "\n";
  }
  out << "ENDATA\n";
  return out.str();
}

namespace {

struct Line {
  int number;
  std::vector<std::string> tokens;
};

[[noreturn]] void fail(int line, const std::string& what) {
  throw std::runtime_error("mps parse error at line " + std::to_string(line) +
                           ": " + what);
}

double parse_num(const std::string& tok, int line) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size()) fail(line, "bad number '" + tok + "'");
  return v;
}

}  // namespace

MilpModel read_mps(const std::string& text) {
  // Tokenize, keeping "* TAG" comments and dropping everything else.
  std::vector<Line> lines;
  std::map<std::string, std::string> tags;
  {
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
      ++number;
      if (!raw.empty() && raw[0] == '*') {
        std::istringstream ls(raw.substr(1));
        std::string kw, var, tag;
        if (ls >> kw >> var >> tag && kw == "TAG") tags[var] = tag;
        continue;
      }
      std::istringstream ls(raw);
      Line line{number, {}};
      std::string tok;
      while (ls >> tok) line.tokens.push_back(tok);
      if (!line.tokens.empty()) lines.push_back(std::move(line));
    }
  }

  MilpModel model;
  ObjSense obj_sense = ObjSense::minimize;
  std::string obj_row;
  struct RowDef {
    std::string name;
    RowSense sense;
    std::vector<std::pair<int, double>> coefs;
    double rhs = 0.0;
  };
  std::vector<RowDef> rows;
  std::map<std::string, int> row_index;
  struct VarDef {
    std::string name;
    bool integer = false;
    bool lb_set = false, ub_set = false;
    double lb = 0.0, ub = kInfinity;
    double obj = 0.0;
  };
  std::vector<VarDef> vars;
  std::map<std::string, int> var_index;

  enum Section { none, objsense, rws, cols, rhs, bounds, done };
  Section section = none;
  bool integer_block = false;

  auto get_var = [&](const std::string& name, int line) -> VarDef& {
    auto it = var_index.find(name);
    if (it == var_index.end()) {
      if (section != cols) fail(line, "unknown variable '" + name + "'");
      var_index.emplace(name, static_cast<int>(vars.size()));
      vars.push_back({name, integer_block, false, false, 0.0, kInfinity, 0.0});
      return vars.back();
    }
    return vars[it->second];
  };

  for (const auto& line : lines) {
    const auto& t = line.tokens;
    // Section keywords start in the original column 1; after tokenizing we
    // recognize them by name, which is unambiguous for this grammar.
    if (t[0] == "NAME") {
      model.set_name(t.size() > 1 ? t[1] : "model");
      continue;
    }
    if (t[0] == "OBJSENSE") {
      section = objsense;
      if (t.size() > 1) {
        obj_sense = (t[1] == "MAX" || t[1] == "MAXIMIZE") ? ObjSense::maximize
                                                          : ObjSense::minimize;
        section = none;
      }
      continue;
    }
    if (t[0] == "ROWS") { section = rws; continue; }
    if (t[0] == "COLUMNS") { section = cols; continue; }
    if (t[0] == "RHS" && t.size() == 1) { section = rhs; continue; }
    if (t[0] == "RANGES") fail(line.number, "RANGES section not supported");
    if (t[0] == "BOUNDS") { section = bounds; continue; }
    if (t[0] == "ENDATA") { section = done; break; }

    switch (section) {
      case objsense:
        obj_sense = (t[0] == "MAX" || t[0] == "MAXIMIZE") ? ObjSense::maximize
                                                          : ObjSense::minimize;
        section = none;
        break;
      case rws: {
        if (t.size() != 2) fail(line.number, "expected '<sense> <row>'");
        if (t[0] == "N") {
          if (!obj_row.empty()) fail(line.number, "multiple objective rows");
          obj_row = t[1];
          break;
        }
        RowSense s;
        if (t[0] == "L") s = RowSense::le;
        else if (t[0] == "G") s = RowSense::ge;
        else if (t[0] == "E") s = RowSense::eq;
        else { fail(line.number, "unknown row sense '" + t[0] + "'"); }
        if (row_index.count(t[1])) fail(line.number, "duplicate row '" + t[1] + "'");
        row_index.emplace(t[1], static_cast<int>(rows.size()));
        rows.push_back({t[1], s, {}, 0.0});
        break;
      }
      case cols: {
        if (t.size() >= 3 && t[1] == "'MARKER'") {
          if (t[2] == "'INTORG'") integer_block = true;
          else if (t[2] == "'INTEND'") integer_block = false;
          else fail(line.number, "unknown marker '" + t[2] + "'");
          break;
        }
        if (t.size() != 3 && t.size() != 5)
          fail(line.number, "expected '<var> <row> <value>' pairs");
        VarDef& var = get_var(t[0], line.number);
        int self = var_index[t[0]];
        for (std::size_t f = 1; f + 1 < t.size(); f += 2) {
          double value = parse_num(t[f + 1], line.number);
          if (t[f] == obj_row) {
            vars[self].obj += value;
            continue;
          }
          auto it = row_index.find(t[f]);
          if (it == row_index.end())
            fail(line.number, "unknown row '" + t[f] + "'");
          rows[it->second].coefs.push_back({self, value});
        }
        break;
      }
      case rhs: {
        if (t.size() != 3 && t.size() != 5)
          fail(line.number, "expected 'RHS <row> <value>' pairs");
        for (std::size_t f = 1; f + 1 < t.size(); f += 2) {
          if (t[f] == obj_row) continue;  // objective offset, ignored
          auto it = row_index.find(t[f]);
          if (it == row_index.end())
            fail(line.number, "unknown row '" + t[f] + "'");
          rows[it->second].rhs = parse_num(t[f + 1], line.number);
        }
        break;
      }
      case bounds: {
        if (t.size() < 3) fail(line.number, "expected '<type> <set> <var> [value]'");
        VarDef& var = get_var(t[2], line.number);
        const std::string& type = t[0];
        auto value = [&]() {
          if (t.size() < 4) fail(line.number, type + " bound needs a value");
          return parse_num(t[3], line.number);
        };
        if (type == "UP") { var.ub = value(); var.ub_set = true; }
        else if (type == "LO") { var.lb = value(); var.lb_set = true; }
        else if (type == "FX") { var.lb = var.ub = value(); var.lb_set = var.ub_set = true; }
        else if (type == "FR") { var.lb = -kInfinity; var.ub = kInfinity; var.lb_set = var.ub_set = true; }
        else if (type == "MI") { var.lb = -kInfinity; var.lb_set = true; }
        else if (type == "PL") { var.ub = kInfinity; var.ub_set = true; }
        else if (type == "BV") { var.integer = true; var.lb = 0.0; var.ub = 1.0; var.lb_set = var.ub_set = true; }
        else { fail(line.number, "unknown bound type '" + type + "'"); }
        break;
      }
      case none:
      case done:
        fail(line.number, "unexpected token '" + t[0] + "'");
    }
  }
  if (section != done) fail(lines.empty() ? 0 : lines.back().number,
                            "missing ENDATA");
  if (obj_row.empty()) fail(0, "no objective row");

  for (const auto& v : vars) {
    VarKind kind = VarKind::continuous;
    double lb = v.lb, ub = v.ub;
    if (v.integer) {
      if ((v.lb_set && v.lb != 0.0) || (v.ub_set && v.ub != 1.0))
        fail(0, "integer variable '" + v.name + "' is not binary");
      kind = VarKind::binary;
      lb = 0.0;
      ub = 1.0;
    }
    auto tag = tags.find(v.name);
    int idx = model.add_variable(v.name, lb, ub, kind,
                                 tag == tags.end() ? "" : tag->second);
    if (v.obj != 0.0) model.add_objective_term(idx, v.obj);
  }
  for (const auto& r : rows) model.add_row(r.name, r.coefs, r.sense, r.rhs);
  model.set_objective_sense(obj_sense);
  return model;
}

std::string write_lp(const MilpModel& m) {
  std::ostringstream out;
  out << "\\ " << m.name() << "\n";
  out << (m.objective_sense() == ObjSense::maximize ? "Maximize" : "Minimize")
      << "\n obj:";
  bool first = true;
  for (std::size_t v = 0; v < m.variables().size(); ++v) {
    double c = m.objective()[v];
    if (c == 0.0) continue;
    out << (c < 0 ? " - " : (first ? " " : " + "))
        << format_number(std::fabs(c)) << " " << m.variables()[v].name;
    first = false;
  }
  if (first && !m.variables().empty())
    out << " 0 " << m.variables()[0].name;
  out << "\nSubject To\n";
  for (const auto& r : m.rows()) {
    out << " " << r.name << ":";
    bool lead = true;
    for (const auto& [v, c] : r.coefs) {
      if (c == 0.0) continue;
      out << (c < 0 ? " - " : (lead ? " " : " + "))
          << format_number(std::fabs(c)) << " " << m.variables()[v].name;
      lead = false;
    }
    if (lead) out << " 0 " << (m.variables().empty() ? "" : m.variables()[0].name);
    switch (r.sense) {
      case RowSense::le: out << " <= "; break;
      case RowSense::ge: out << " >= "; break;
      case RowSense::eq: out << " = "; break;
    }
    out << format_number(r.rhs) << "\n";
  }
  out << "Bounds\n";
  for (const auto& var : m.variables()) {
    if (var.kind == VarKind::binary) continue;
    if (var.lb == var.ub) {
      out << " " << var.name << " = " << format_number(var.lb) << "\n";
    } else if (std::isinf(var.lb) && std::isinf(var.ub)) {
      out << " " << var.name << " free\n";
    } else {
      out << " " << (std::isinf(var.lb) ? "-inf" : format_number(var.lb))
          << " <= " << var.name << " <= "
          << (std::isinf(var.ub) ? "+inf" : format_number(var.ub)) << "\n";
    }
  }
  bool any_binary = false;
  for (const auto& var : m.variables())
    if (var.kind == VarKind::binary) {
      if (!any_binary) out << "Binaries\n";
      any_binary = true;
      out << " " << var.name << "\n";
    }
  out << "End\n";
  return out.str();
}

}  // namespace pooling
