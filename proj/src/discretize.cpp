#include "pooling/discretize.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "pooling/cuts.hpp"

namespace pooling::discretize {

namespace {

std::string join(std::initializer_list<std::string> parts) {
  std::string s = "(";
  bool first = true;
  for (const auto& p : parts) {
    if (!first) s += ",";
    s += p;
    first = false;
  }
  return s + ")";
}

double parse_number(const std::string& tok) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size())
    throw std::invalid_argument("variant spec: bad number '" + tok + "'");
  return v;
}

}  // namespace

DiscretizationGrid grid_values(int level) {
  if (level < 1 || level > 20)
    throw std::invalid_argument("grid level must be in [1, 20]");
  DiscretizationGrid g;
  g.level = level;
  double step = cuts::grid_step(level);
  std::int64_t points = std::int64_t{1} << (level - 1);
  g.values.reserve(static_cast<std::size_t>(points) + 1);
  for (std::int64_t k = 0; k <= points; ++k)
    g.values.push_back(static_cast<double>(k) * step);
  return g;
}

DiscretizationGrid VariantSpec::grid() const {
  if (formulation == Formulation::sbn && !values.empty())
    return {0, values};
  return grid_values(level);
}

void VariantSpec::validate() const {
  if (formulation != Formulation::sbn && !values.empty())
    throw std::invalid_argument(
        "variant spec: explicit value lists are only valid for sbn");
  if (values.empty() && (level < 1 || level > 20))
    throw std::invalid_argument("variant spec: level must be in [1, 20]");
  if (!values.empty()) {
    if (values.size() < 2 || values.front() != 0.0 || values.back() != 1.0)
      throw std::invalid_argument(
          "variant spec: value list must run from 0 to 1");
    for (std::size_t m = 1; m < values.size(); ++m)
      if (!(values[m] > values[m - 1]))
        throw std::invalid_argument(
            "variant spec: value list must be strictly increasing");
  }
  if (formulation == Formulation::sbn && (tangent || secant))
    throw std::invalid_argument(
        "variant spec: tangent cuts require a dyadic grid, not sbn");
  if (secant && formulation != Formulation::sbn && level < 2)
    throw std::invalid_argument(
        "variant spec: secant cuts require level >= 2");
}

std::string VariantSpec::name() const {
  std::string base;
  switch (formulation) {
    case Formulation::sb: base = "sb" + std::to_string(level); break;
    case Formulation::pq: base = "pq" + std::to_string(level); break;
    case Formulation::sbn: {
      std::size_t count = values.empty()
                              ? static_cast<std::size_t>(
                                    (std::int64_t{1} << (level - 1)) + 1)
                              : values.size();
      base = "sbn" + std::to_string(count);
      break;
    }
  }
  std::vector<std::string> parts;
  if (rounding && bit_bounds) parts.push_back("ft");
  else if (rounding) parts.push_back("f");
  else if (bit_bounds) parts.push_back("t");
  if (tangent) parts.push_back("lti");
  if (secant) parts.push_back("ltis");
  for (const auto& p : parts) base += "-" + p;
  return base;
}

namespace {

void apply_cut_token(VariantSpec& spec, const std::string& token) {
  if (token == "none" || token.empty()) return;
  if (token == "f") spec.rounding = true;
  else if (token == "t") spec.bit_bounds = true;
  else if (token == "ft") spec.rounding = spec.bit_bounds = true;
  else if (token == "lti") spec.tangent = true;
  else if (token == "ltis") spec.secant = true;
  else
    throw std::invalid_argument("variant spec: unknown cut token '" + token +
                                "'");
}

void apply_cut_string(VariantSpec& spec, const std::string& text) {
  std::string token;
  for (char c : text + "-") {
    if (c == '-' || c == '+') {
      apply_cut_token(spec, token);
      token.clear();
    } else {
      token += c;
    }
  }
}

int level_for_value_count(long count) {
  // count = 2^(n-1) + 1 for some grid level n
  long intervals = count - 1;
  if (intervals >= 1 && (intervals & (intervals - 1)) == 0) {
    int level = 1;
    while ((long{1} << (level - 1)) != intervals) ++level;
    return level + 0;
  }
  throw std::invalid_argument(
      "variant spec: sbn value count must be a grid size (2^k + 1)");
}

}  // namespace

VariantSpec VariantSpec::parse(const std::string& text) {
  VariantSpec spec;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, ':')) parts.push_back(part);
    if (parts.size() < 2 || parts.size() > 3)
      throw std::invalid_argument(
          "variant spec: expected form:<level>[:<cuts>], got '" + text + "'");
    if (parts[0] == "sb") spec.formulation = Formulation::sb;
    else if (parts[0] == "pq") spec.formulation = Formulation::pq;
    else if (parts[0] == "sbn") spec.formulation = Formulation::sbn;
    else
      throw std::invalid_argument("variant spec: unknown formulation '" +
                                  parts[0] + "'");
    if (parts[1].find(',') != std::string::npos) {
      std::istringstream vs(parts[1]);
      std::string num;
      while (std::getline(vs, num, ',')) spec.values.push_back(parse_number(num));
    } else {
      spec.level = static_cast<int>(parse_number(parts[1]));
    }
    if (parts.size() == 3) apply_cut_string(spec, parts[2]);
  } else {
    std::size_t at = 0;
    while (at < text.size() && std::isalpha(static_cast<unsigned char>(text[at])))
      ++at;
    std::string form = text.substr(0, at);
    std::size_t digits = at;
    while (digits < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[digits])))
      ++digits;
    if (form.empty() || digits == at)
      throw std::invalid_argument("variant spec: cannot parse '" + text + "'");
    long number = std::strtol(text.substr(at, digits - at).c_str(), nullptr, 10);
    if (form == "sb") { spec.formulation = Formulation::sb; spec.level = static_cast<int>(number); }
    else if (form == "pq") { spec.formulation = Formulation::pq; spec.level = static_cast<int>(number); }
    else if (form == "sbn") {
      spec.formulation = Formulation::sbn;
      spec.level = level_for_value_count(number);
    } else {
      throw std::invalid_argument("variant spec: unknown formulation '" + form +
                                  "'");
    }
    if (digits < text.size()) {
      if (text[digits] != '-')
        throw std::invalid_argument("variant spec: cannot parse '" + text +
                                    "'");
      apply_cut_string(spec, text.substr(digits + 1));
    }
  }
  spec.validate();
  return spec;
}

namespace {

// Everything the sb and sbn builders share: both discretize the split
// fraction R(j,k), differing only in the value weights, the binary-block
// naming, and which tightening families apply.
struct SplitWeights {
  std::vector<double> weight;       // expansion coefficient per position
  std::vector<std::string> label;   // name suffix per position
  bool one_of_n = false;            // add the single-choice equality row
};

void check_instance(const PoolingInstance& inst) {
  ValidationReport report = validate_instance(inst);
  if (!report.ok())
    throw std::invalid_argument("invalid instance: " + report.errors.front());
}

MilpModel build_split_form(const PoolingInstance& inst,
                           const VariantSpec& spec, const SplitWeights& sw,
                           const std::string& bit_prefix,
                           const std::string& prod_prefix,
                           std::vector<std::string>* warnings) {
  check_instance(inst);
  const auto& S = inst.streams;
  const auto& P = inst.pools;
  const auto& K = inst.products;
  const auto& L = inst.properties;
  const std::size_t nw = sw.weight.size();

  MilpModel m;
  m.set_name(spec.name());
  m.set_objective_sense(ObjSense::maximize);

  // Continuous block first, binaries last (single integer block in MPS).
  std::vector<std::vector<int>> F(S.size(), std::vector<int>(P.size()));
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j) {
      F[i][j] = m.add_continuous("F" + join({S[i], P[j]}), 0.0, kInfinity,
                                 "flow");
      m.add_objective_term(F[i][j], -inst.cost[i]);
    }
  auto H = [&](std::size_t i, std::size_t j, std::size_t k) {
    return m.var_index("H" + join({S[i], P[j], K[k]}));
  };
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j)
      for (std::size_t k = 0; k < K.size(); ++k) {
        int h = m.add_continuous("H" + join({S[i], P[j], K[k]}), 0.0,
                                 kInfinity, "routed");
        m.add_objective_term(h, inst.price[k]);
      }
  std::vector<std::vector<int>> R(P.size(), std::vector<int>(K.size()));
  for (std::size_t j = 0; j < P.size(); ++j)
    for (std::size_t k = 0; k < K.size(); ++k)
      R[j][k] = m.add_continuous("R" + join({P[j], K[k]}), 0.0, 1.0, "split");
  auto V = [&](std::size_t i, std::size_t j, std::size_t k, std::size_t q) {
    return m.var_index(prod_prefix + join({S[i], P[j], K[k], sw.label[q]}));
  };
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j)
      for (std::size_t k = 0; k < K.size(); ++k)
        for (std::size_t q = 0; q < nw; ++q)
          m.add_continuous(prod_prefix + join({S[i], P[j], K[k], sw.label[q]}),
                           0.0, kInfinity, "bilinear");
  std::vector<std::vector<std::vector<int>>> Z(
      P.size(), std::vector<std::vector<int>>(K.size(), std::vector<int>(nw)));
  for (std::size_t j = 0; j < P.size(); ++j)
    for (std::size_t k = 0; k < K.size(); ++k)
      for (std::size_t q = 0; q < nw; ++q)
        Z[j][k][q] =
            m.add_binary(bit_prefix + join({P[j], K[k], sw.label[q]}), "bit");

  // Network rows.
  for (std::size_t j = 0; j < P.size(); ++j) {
    std::vector<std::pair<int, double>> c;
    for (std::size_t i = 0; i < S.size(); ++i) c.push_back({F[i][j], 1.0});
    m.add_row("cap" + join({P[j]}), std::move(c), RowSense::le,
              inst.pool_capacity[j]);
  }
  for (std::size_t k = 0; k < K.size(); ++k) {
    std::vector<std::pair<int, double>> c;
    for (std::size_t i = 0; i < S.size(); ++i)
      for (std::size_t j = 0; j < P.size(); ++j) c.push_back({H(i, j, k), 1.0});
    m.add_row("dem" + join({K[k]}), std::move(c), RowSense::le,
              inst.demand[k]);
  }
  for (std::size_t k = 0; k < K.size(); ++k)
    for (std::size_t l = 0; l < L.size(); ++l) {
      std::vector<std::pair<int, double>> c;
      for (std::size_t i = 0; i < S.size(); ++i)
        for (std::size_t j = 0; j < P.size(); ++j)
          c.push_back(
              {H(i, j, k), inst.property_value[i][l] - inst.spec_limit[k][l]});
      m.add_row("spec" + join({K[k], L[l]}), std::move(c), RowSense::le, 0.0);
    }
  for (std::size_t j = 0; j < P.size(); ++j) {
    std::vector<std::pair<int, double>> c;
    for (std::size_t k = 0; k < K.size(); ++k) c.push_back({R[j][k], 1.0});
    m.add_row("split" + join({P[j]}), std::move(c), RowSense::eq, 1.0);
  }
  for (std::size_t j = 0; j < P.size(); ++j)
    for (std::size_t k = 0; k < K.size(); ++k) {
      std::vector<std::pair<int, double>> c;
      for (std::size_t i = 0; i < S.size(); ++i) c.push_back({H(i, j, k), 1.0});
      m.add_row("pipe" + join({P[j], K[k]}), std::move(c), RowSense::le,
                inst.pipe_capacity[j][k]);
    }
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j) {
      std::vector<std::pair<int, double>> c;
      for (std::size_t k = 0; k < K.size(); ++k) c.push_back({H(i, j, k), 1.0});
      c.push_back({F[i][j], -1.0});
      m.add_row("bal" + join({S[i], P[j]}), std::move(c), RowSense::eq, 0.0);
    }
  for (std::size_t j = 0; j < P.size(); ++j)
    for (std::size_t k = 0; k < K.size(); ++k) {
      std::vector<std::pair<int, double>> c;
      for (std::size_t i = 0; i < S.size(); ++i) c.push_back({H(i, j, k), 1.0});
      c.push_back({R[j][k], -inst.pool_capacity[j]});
      m.add_row("splitcap" + join({P[j], K[k]}), std::move(c), RowSense::le,
                0.0);
    }

  // Split-fraction selection: expansion plus, for value lists, one-of-N.
  for (std::size_t j = 0; j < P.size(); ++j)
    for (std::size_t k = 0; k < K.size(); ++k) {
      if (sw.one_of_n) {
        std::vector<std::pair<int, double>> c;
        for (std::size_t q = 0; q < nw; ++q) c.push_back({Z[j][k][q], 1.0});
        m.add_row("pick" + join({P[j], K[k]}), std::move(c), RowSense::eq,
                  1.0);
      }
      std::vector<std::pair<int, double>> c;
      c.push_back({R[j][k], 1.0});
      for (std::size_t q = 0; q < nw; ++q)
        c.push_back({Z[j][k][q], -sw.weight[q]});
      m.add_row("expand" + join({P[j], K[k]}), std::move(c), RowSense::eq,
                0.0);
    }

  // Exact linearization of the per-stream products.
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j)
      for (std::size_t k = 0; k < K.size(); ++k) {
        std::vector<std::pair<int, double>> c;
        c.push_back({H(i, j, k), 1.0});
        for (std::size_t q = 0; q < nw; ++q)
          c.push_back({V(i, j, k, q), -sw.weight[q]});
        m.add_row("link" + join({S[i], P[j], K[k]}), std::move(c),
                  RowSense::eq, 0.0);
      }
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j)
      for (std::size_t k = 0; k < K.size(); ++k)
        for (std::size_t q = 0; q < nw; ++q) {
          double g = inst.pool_capacity[j];
          int v = V(i, j, k, q), z = Z[j][k][q], f = F[i][j];
          m.add_row("vz" + join({S[i], P[j], K[k], sw.label[q]}),
                    {{v, 1.0}, {z, -g}}, RowSense::le, 0.0);
          m.add_row("vf" + join({S[i], P[j], K[k], sw.label[q]}),
                    {{v, 1.0}, {f, -1.0}}, RowSense::le, 0.0);
          m.add_row("vlo" + join({S[i], P[j], K[k], sw.label[q]}),
                    {{v, 1.0}, {f, -1.0}, {z, -g}}, RowSense::ge, -g);
        }

  // Aggregated tightening pair on the per-bit sums.
  for (std::size_t j = 0; j < P.size(); ++j)
    for (std::size_t k = 0; k < K.size(); ++k)
      for (std::size_t q = 0; q < nw; ++q) {
        double g = inst.pool_capacity[j];
        std::vector<std::pair<int, double>> up, lo;
        for (std::size_t i = 0; i < S.size(); ++i) {
          up.push_back({V(i, j, k, q), 1.0});
          lo.push_back({V(i, j, k, q), 1.0});
        }
        up.push_back({Z[j][k][q], -g});
        for (std::size_t i = 0; i < S.size(); ++i)
          lo.push_back({F[i][j], -1.0});
        lo.push_back({Z[j][k][q], -g});
        m.add_row("avz" + join({P[j], K[k], sw.label[q]}), std::move(up),
                  RowSense::le, 0.0);
        m.add_row("avlo" + join({P[j], K[k], sw.label[q]}), std::move(lo),
                  RowSense::ge, -g);
      }

  // Tightening families requested by the variant, per (pool, product) pair.
  bool any_flag = spec.rounding || spec.bit_bounds || spec.tangent ||
                  spec.secant;
  for (std::size_t j = 0; j < P.size() && any_flag; ++j)
    for (std::size_t k = 0; k < K.size(); ++k) {
      double g = inst.pool_capacity[j];
      double u = inst.pipe_capacity[j][k];
      if (u >= g) {
        if (warnings)
          warnings->push_back("no cuts for pair " + join({P[j], K[k]}) +
                              ": routed-flow bound not strictly below pool "
                              "capacity");
        continue;
      }
      auto inflow_terms = [&]() {
        std::vector<std::pair<int, double>> c;
        for (std::size_t i = 0; i < S.size(); ++i) c.push_back({F[i][j], 1.0});
        return c;
      };
      auto routed_terms = [&]() {
        std::vector<std::pair<int, double>> c;
        for (std::size_t i = 0; i < S.size(); ++i)
          c.push_back({H(i, j, k), 1.0});
        return c;
      };
      if (spec.rounding) {
        std::vector<cuts::LinearCut> rc;
        if (sw.one_of_n) {
          rc = cuts::rounding_cuts(cuts::value_hull_params(g, u, sw.weight));
        } else {
          rc = cuts::rounding_cuts(cuts::hull_params(g, u, spec.level));
        }
        for (std::size_t c = 0; c < rc.size(); ++c) {
          auto coefs = inflow_terms();
          for (auto& term : coefs) term.second *= rc[c].inflow_coef;
          coefs.push_back({R[j][k], rc[c].split_coef});
          m.add_row("cut" + std::to_string(c + 1) + join({P[j], K[k]}),
                    std::move(coefs), RowSense::le, rc[c].rhs);
        }
      }
      if (spec.bit_bounds) {
        if (sw.one_of_n) {
          for (const auto& b : cuts::value_bounds(g, u, sw.weight)) {
            std::size_t q = static_cast<std::size_t>(b.index);
            std::vector<std::pair<int, double>> c;
            for (std::size_t i = 0; i < S.size(); ++i)
              c.push_back({V(i, j, k, q), 1.0});
            c.push_back({Z[j][k][q], -b.coefficient});
            m.add_row("val" + join({P[j], K[k], sw.label[q]}), std::move(c),
                      RowSense::le, 0.0);
          }
        } else {
          for (const auto& b : cuts::p_dependent_bounds(g, u, spec.level)) {
            std::size_t q = static_cast<std::size_t>(b.bit - 1);
            std::vector<std::pair<int, double>> c;
            for (std::size_t i = 0; i < S.size(); ++i)
              c.push_back({V(i, j, k, q), 1.0});
            c.push_back({Z[j][k][q], -b.coefficient});
            m.add_row("bit" + join({P[j], K[k], sw.label[q]}), std::move(c),
                      RowSense::le, 0.0);
          }
        }
      }
      if (spec.tangent) {
        auto tc = cuts::lti_cuts(g, u, spec.level);
        for (std::size_t p = 0; p < tc.size(); ++p) {
          auto coefs = routed_terms();
          for (auto& term : coefs) term.second *= tc[p].outflow_coef;
          auto in = inflow_terms();
          for (auto& term : in) term.second *= tc[p].inflow_coef;
          coefs.insert(coefs.end(), in.begin(), in.end());
          coefs.push_back({R[j][k], tc[p].split_coef});
          m.add_row("tan" + join({P[j], K[k], sw.label[p]}), std::move(coefs),
                    RowSense::le, tc[p].rhs);
        }
      }
      if (spec.secant) {
        auto sc = cuts::lti_strengthened(g, u, spec.level);
        for (std::size_t p = 0; p < sc.size(); ++p) {
          auto coefs = routed_terms();
          for (auto& term : coefs) term.second *= sc[p].outflow_coef;
          auto in = inflow_terms();
          for (auto& term : in) term.second *= sc[p].inflow_coef;
          coefs.insert(coefs.end(), in.begin(), in.end());
          coefs.push_back({R[j][k], sc[p].split_coef});
          m.add_row("sec" + join({P[j], K[k], sw.label[p]}), std::move(coefs),
                    RowSense::le, sc[p].rhs);
        }
      }
    }

  return m;
}

}  // namespace

MilpModel build_sb(const PoolingInstance& inst, const VariantSpec& spec,
                   std::vector<std::string>* warnings) {
  spec.validate();
  if (spec.formulation != VariantSpec::Formulation::sb)
    throw std::invalid_argument("build_sb: variant is not sb");
  SplitWeights sw;
  for (int p = 1; p <= spec.level; ++p) {
    sw.weight.push_back(std::ldexp(1.0, 1 - p));
    sw.label.push_back(std::to_string(p));
  }
  return build_split_form(inst, spec, sw, "Z", "V", warnings);
}

MilpModel build_sbn(const PoolingInstance& inst, const VariantSpec& spec,
                    std::vector<std::string>* warnings) {
  spec.validate();
  if (spec.formulation != VariantSpec::Formulation::sbn)
    throw std::invalid_argument("build_sbn: variant is not sbn");
  SplitWeights sw;
  sw.weight = spec.grid().values;
  for (std::size_t q = 0; q < sw.weight.size(); ++q)
    sw.label.push_back(std::to_string(q));
  sw.one_of_n = true;
  return build_split_form(inst, spec, sw, "ZN", "VN", warnings);
}

MilpModel build_pq(const PoolingInstance& inst, const VariantSpec& spec,
                   std::vector<std::string>* warnings) {
  spec.validate();
  if (spec.formulation != VariantSpec::Formulation::pq)
    throw std::invalid_argument("build_pq: variant is not pq");
  check_instance(inst);
  if (!inst.inlet_capacity.has_value())
    throw std::invalid_argument(
        "build_pq: instance has no inlet capacities (sigma)");
  const Table& sigma = *inst.inlet_capacity;
  const auto& S = inst.streams;
  const auto& P = inst.pools;
  const auto& K = inst.products;
  const auto& L = inst.properties;
  const int n = spec.level;

  MilpModel m;
  m.set_name(spec.name());
  m.set_objective_sense(ObjSense::maximize);

  std::vector<std::vector<int>> Q(S.size(), std::vector<int>(P.size()));
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j)
      Q[i][j] = m.add_continuous("Q" + join({S[i], P[j]}), 0.0, 1.0,
                                 "fraction");
  std::vector<std::vector<int>> D(P.size(), std::vector<int>(K.size()));
  for (std::size_t j = 0; j < P.size(); ++j)
    for (std::size_t k = 0; k < K.size(); ++k)
      D[j][k] = m.add_continuous("D" + join({P[j], K[k]}), 0.0,
                                 inst.pipe_capacity[j][k], "outlet");
  auto H = [&](std::size_t i, std::size_t j, std::size_t k) {
    return m.var_index("H" + join({S[i], P[j], K[k]}));
  };
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j)
      for (std::size_t k = 0; k < K.size(); ++k) {
        int h = m.add_continuous("H" + join({S[i], P[j], K[k]}), 0.0,
                                 kInfinity, "routed");
        m.add_objective_term(h, inst.price[k] - inst.cost[i]);
      }
  auto W = [&](std::size_t i, std::size_t j, std::size_t k, int p) {
    return m.var_index("W" +
                       join({S[i], P[j], K[k], std::to_string(p)}));
  };
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j)
      for (std::size_t k = 0; k < K.size(); ++k)
        for (int p = 1; p <= n; ++p)
          m.add_continuous("W" + join({S[i], P[j], K[k], std::to_string(p)}),
                           0.0, kInfinity, "bilinear");
  std::vector<std::vector<std::vector<int>>> Z(
      S.size(), std::vector<std::vector<int>>(
                    P.size(), std::vector<int>(static_cast<std::size_t>(n))));
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j)
      for (int p = 1; p <= n; ++p)
        Z[i][j][static_cast<std::size_t>(p - 1)] = m.add_binary(
            "ZQ" + join({S[i], P[j], std::to_string(p)}), "bit");

  for (std::size_t j = 0; j < P.size(); ++j) {
    std::vector<std::pair<int, double>> c;
    for (std::size_t i = 0; i < S.size(); ++i) c.push_back({Q[i][j], 1.0});
    m.add_row("qsplit" + join({P[j]}), std::move(c), RowSense::eq, 1.0);
  }
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j) {
      std::vector<std::pair<int, double>> c;
      c.push_back({Q[i][j], 1.0});
      for (int p = 1; p <= n; ++p)
        c.push_back({Z[i][j][static_cast<std::size_t>(p - 1)],
                     -std::ldexp(1.0, 1 - p)});
      m.add_row("qexpand" + join({S[i], P[j]}), std::move(c), RowSense::eq,
                0.0);
    }
  for (std::size_t j = 0; j < P.size(); ++j) {
    std::vector<std::pair<int, double>> c;
    for (std::size_t k = 0; k < K.size(); ++k) c.push_back({D[j][k], 1.0});
    m.add_row("cap" + join({P[j]}), std::move(c), RowSense::le,
              inst.pool_capacity[j]);
  }
  for (std::size_t k = 0; k < K.size(); ++k) {
    std::vector<std::pair<int, double>> c;
    for (std::size_t i = 0; i < S.size(); ++i)
      for (std::size_t j = 0; j < P.size(); ++j) c.push_back({H(i, j, k), 1.0});
    m.add_row("dem" + join({K[k]}), std::move(c), RowSense::le,
              inst.demand[k]);
  }
  for (std::size_t k = 0; k < K.size(); ++k)
    for (std::size_t l = 0; l < L.size(); ++l) {
      std::vector<std::pair<int, double>> c;
      for (std::size_t i = 0; i < S.size(); ++i)
        for (std::size_t j = 0; j < P.size(); ++j)
          c.push_back(
              {H(i, j, k), inst.property_value[i][l] - inst.spec_limit[k][l]});
      m.add_row("spec" + join({K[k], L[l]}), std::move(c), RowSense::le, 0.0);
    }
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j) {
      std::vector<std::pair<int, double>> c;
      for (std::size_t k = 0; k < K.size(); ++k) c.push_back({H(i, j, k), 1.0});
      m.add_row("inlet" + join({S[i], P[j]}), std::move(c), RowSense::le,
                sigma[i][j]);
    }
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j)
      for (std::size_t k = 0; k < K.size(); ++k) {
        std::vector<std::pair<int, double>> c;
        c.push_back({H(i, j, k), 1.0});
        for (int p = 1; p <= n; ++p)
          c.push_back({W(i, j, k, p), -std::ldexp(1.0, 1 - p)});
        m.add_row("link" + join({S[i], P[j], K[k]}), std::move(c),
                  RowSense::eq, 0.0);
      }
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j)
      for (std::size_t k = 0; k < K.size(); ++k)
        for (int p = 1; p <= n; ++p) {
          double u = inst.pipe_capacity[j][k];
          int w = W(i, j, k, p), d = D[j][k];
          int z = Z[i][j][static_cast<std::size_t>(p - 1)];
          std::string suffix = join({S[i], P[j], K[k], std::to_string(p)});
          m.add_row("wz" + suffix, {{w, 1.0}, {z, -u}}, RowSense::le, 0.0);
          m.add_row("wf" + suffix, {{w, 1.0}, {d, -1.0}}, RowSense::le, 0.0);
          m.add_row("wlo" + suffix, {{w, 1.0}, {d, -1.0}, {z, -u}},
                    RowSense::ge, -u);
        }
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < P.size(); ++j)
      for (int p = 1; p <= n; ++p) {
        double g = inst.pool_capacity[j];
        int z = Z[i][j][static_cast<std::size_t>(p - 1)];
        std::vector<std::pair<int, double>> up, lo;
        for (std::size_t k = 0; k < K.size(); ++k) {
          up.push_back({W(i, j, k, p), 1.0});
          lo.push_back({W(i, j, k, p), 1.0});
        }
        up.push_back({z, -g});
        for (std::size_t k = 0; k < K.size(); ++k)
          lo.push_back({D[j][k], -1.0});
        lo.push_back({z, -g});
        std::string suffix = join({S[i], P[j], std::to_string(p)});
        m.add_row("awz" + suffix, std::move(up), RowSense::le, 0.0);
        m.add_row("awlo" + suffix, std::move(lo), RowSense::ge, -g);
      }

  // Tightening families, per (stream, pool) pair: the pool outlet total
  // plays the capped-inflow role, the stream's routed total the product role.
  bool any_flag =
      spec.rounding || spec.bit_bounds || spec.tangent || spec.secant;
  for (std::size_t i = 0; i < S.size() && any_flag; ++i)
    for (std::size_t j = 0; j < P.size(); ++j) {
      double g = inst.pool_capacity[j];
      double u = sigma[i][j];
      if (u >= g) {
        if (warnings)
          warnings->push_back("no cuts for pair " + join({S[i], P[j]}) +
                              ": inlet bound not strictly below pool "
                              "capacity");
        continue;
      }
      auto outlet_terms = [&]() {
        std::vector<std::pair<int, double>> c;
        for (std::size_t k = 0; k < K.size(); ++k) c.push_back({D[j][k], 1.0});
        return c;
      };
      auto routed_terms = [&]() {
        std::vector<std::pair<int, double>> c;
        for (std::size_t k = 0; k < K.size(); ++k)
          c.push_back({H(i, j, k), 1.0});
        return c;
      };
      if (spec.rounding) {
        auto rc = cuts::rounding_cuts(cuts::hull_params(g, u, n));
        for (std::size_t c = 0; c < rc.size(); ++c) {
          auto coefs = outlet_terms();
          for (auto& term : coefs) term.second *= rc[c].inflow_coef;
          coefs.push_back({Q[i][j], rc[c].split_coef});
          m.add_row("cut" + std::to_string(c + 1) + join({S[i], P[j]}),
                    std::move(coefs), RowSense::le, rc[c].rhs);
        }
      }
      if (spec.bit_bounds) {
        for (const auto& b : cuts::p_dependent_bounds(g, u, n)) {
          std::vector<std::pair<int, double>> c;
          for (std::size_t k = 0; k < K.size(); ++k)
            c.push_back({W(i, j, k, b.bit), 1.0});
          c.push_back({Z[i][j][static_cast<std::size_t>(b.bit - 1)],
                       -b.coefficient});
          m.add_row("bit" + join({S[i], P[j], std::to_string(b.bit)}),
                    std::move(c), RowSense::le, 0.0);
        }
      }
      auto add_product_cut = [&](const std::string& prefix, std::size_t p,
                                 const cuts::LinearCut& cut) {
        auto coefs = routed_terms();
        for (auto& term : coefs) term.second *= cut.outflow_coef;
        auto out = outlet_terms();
        for (auto& term : out) term.second *= cut.inflow_coef;
        coefs.insert(coefs.end(), out.begin(), out.end());
        coefs.push_back({Q[i][j], cut.split_coef});
        m.add_row(prefix + join({S[i], P[j], std::to_string(p + 1)}),
                  std::move(coefs), RowSense::le, cut.rhs);
      };
      if (spec.tangent) {
        auto tc = cuts::lti_cuts(g, u, n);
        for (std::size_t p = 0; p < tc.size(); ++p)
          add_product_cut("tan", p, tc[p]);
      }
      if (spec.secant) {
        auto sc = cuts::lti_strengthened(g, u, n);
        for (std::size_t p = 0; p < sc.size(); ++p)
          add_product_cut("sec", p, sc[p]);
      }
    }

  return m;
}

MilpModel build_model(const PoolingInstance& inst, const VariantSpec& spec,
                      std::vector<std::string>* warnings) {
  switch (spec.formulation) {
    case VariantSpec::Formulation::sb: return build_sb(inst, spec, warnings);
    case VariantSpec::Formulation::pq: return build_pq(inst, spec, warnings);
    case VariantSpec::Formulation::sbn: return build_sbn(inst, spec, warnings);
  }
  throw std::logic_error("unreachable");
}

}  // namespace pooling::discretize
