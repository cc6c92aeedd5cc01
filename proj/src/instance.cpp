#include "pooling/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "pooling/rng.hpp"

namespace pooling {

namespace {

using json = nlohmann::ordered_json;

bool bad_number(double v) { return !std::isfinite(v) || v < 0.0; }

std::string cell(const std::string& a) { return "[" + a + "]"; }
std::string cell(const std::string& a, const std::string& b) {
  return "[" + a + "," + b + "]";
}

void check_ids(const std::string& what, const std::vector<std::string>& ids,
               ValidationReport& rep) {
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (id.empty()) {
      rep.errors.push_back(what + ": empty id");
      continue;
    }
    if (id.find_first_of(",()[] \t\n") != std::string::npos)
      rep.errors.push_back(what + " id '" + id + "' contains a reserved character");
    if (!seen.insert(id).second)
      rep.errors.push_back(what + " id '" + id + "' is duplicated");
  }
}

void check_vector(const std::string& name, const std::vector<double>& v,
                  const std::vector<std::string>& ids, ValidationReport& rep) {
  if (v.size() != ids.size()) {
    rep.errors.push_back(name + ": expected " + std::to_string(ids.size()) +
                         " entries, found " + std::to_string(v.size()));
    return;
  }
  for (std::size_t i = 0; i < v.size(); ++i)
    if (bad_number(v[i]))
      rep.errors.push_back("negative or non-finite " + name + cell(ids[i]));
}

void check_table(const std::string& name, const Table& t,
                 const std::vector<std::string>& rows,
                 const std::vector<std::string>& cols, ValidationReport& rep) {
  if (t.size() != rows.size()) {
    rep.errors.push_back(name + ": expected " + std::to_string(rows.size()) +
                         " rows, found " + std::to_string(t.size()));
    return;
  }
  for (std::size_t r = 0; r < t.size(); ++r) {
    if (t[r].size() != cols.size()) {
      rep.errors.push_back(name + cell(rows[r]) + ": expected " +
                           std::to_string(cols.size()) + " entries");
      continue;
    }
    for (std::size_t c = 0; c < cols.size(); ++c)
      if (bad_number(t[r][c]))
        rep.errors.push_back("negative or non-finite " + name +
                             cell(rows[r], cols[c]));
  }
}

}  // namespace

ValidationReport validate_instance(const PoolingInstance& inst) {
  ValidationReport rep;

  if (inst.streams.empty()) rep.errors.push_back("no streams");
  if (inst.pools.empty()) rep.errors.push_back("no pools");
  if (inst.products.empty()) rep.errors.push_back("no products");

  check_ids("stream", inst.streams, rep);
  check_ids("pool", inst.pools, rep);
  check_ids("product", inst.products, rep);
  check_ids("property", inst.properties, rep);

  check_vector("cost", inst.cost, inst.streams, rep);
  check_vector("price", inst.price, inst.products, rep);
  check_vector("pool_capacity", inst.pool_capacity, inst.pools, rep);
  check_vector("demand", inst.demand, inst.products, rep);
  check_table("pipe_capacity", inst.pipe_capacity, inst.pools, inst.products, rep);
  check_table("property_value", inst.property_value, inst.streams, inst.properties, rep);
  check_table("spec_limit", inst.spec_limit, inst.products, inst.properties, rep);
  if (inst.inlet_capacity)
    check_table("inlet_capacity", *inst.inlet_capacity, inst.streams, inst.pools, rep);

  if (!rep.errors.empty()) return rep;

  // A pipe bound at or above pool capacity carries no information; the cut
  // machinery skips such pairs, so surface them here.
  for (std::size_t j = 0; j < inst.num_pools(); ++j)
    for (std::size_t k = 0; k < inst.num_products(); ++k)
      if (inst.pipe_capacity[j][k] >= inst.pool_capacity[j])
        rep.warnings.push_back("trivial bound at (" + inst.pools[j] + "," +
                               inst.products[k] + ")");
  if (inst.inlet_capacity)
    for (std::size_t i = 0; i < inst.num_streams(); ++i)
      for (std::size_t j = 0; j < inst.num_pools(); ++j)
        if ((*inst.inlet_capacity)[i][j] >= inst.pool_capacity[j])
          rep.warnings.push_back("trivial inlet bound at (" + inst.streams[i] +
                                 "," + inst.pools[j] + ")");
  return rep;
}

PoolingInstance generate_instance(const InstanceDims& dims, std::uint64_t seed) {
  if (dims.streams < 1 || dims.pools < 1 || dims.products < 1 ||
      dims.properties < 0)
    throw std::invalid_argument("generate_instance: invalid dimensions");

  PoolingInstance inst;
  auto make_ids = [](const char* prefix, int count) {
    std::vector<std::string> ids;
    ids.reserve(count);
    for (int v = 1; v <= count; ++v) ids.push_back(prefix + std::to_string(v));
    return ids;
  };
  inst.streams = make_ids("i", dims.streams);
  inst.pools = make_ids("j", dims.pools);
  inst.products = make_ids("k", dims.products);
  inst.properties = make_ids("l", dims.properties);

  // Draw order is fixed; changing it would silently change every seeded
  // instance.
  SplitMix64 rng(seed);
  inst.pool_capacity.resize(dims.pools);
  for (auto& g : inst.pool_capacity) g = rng.uniform(50.0, 150.0);

  inst.pipe_capacity.assign(dims.pools, std::vector<double>(dims.products));
  for (int j = 0; j < dims.pools; ++j)
    for (int k = 0; k < dims.products; ++k)
      inst.pipe_capacity[j][k] = inst.pool_capacity[j] * rng.uniform(0.2, 0.8);

  Table sigma(dims.streams, std::vector<double>(dims.pools));
  for (int i = 0; i < dims.streams; ++i)
    for (int j = 0; j < dims.pools; ++j)
      sigma[i][j] = inst.pool_capacity[j] * rng.uniform(0.2, 0.8);
  inst.inlet_capacity = std::move(sigma);

  inst.cost.resize(dims.streams);
  for (auto& a : inst.cost) a = rng.uniform(5.0, 15.0);
  inst.price.resize(dims.products);
  for (auto& b : inst.price) b = rng.uniform(10.0, 25.0);

  inst.property_value.assign(dims.streams, std::vector<double>(dims.properties));
  for (int i = 0; i < dims.streams; ++i)
    for (int l = 0; l < dims.properties; ++l)
      inst.property_value[i][l] = rng.uniform(0.0, 3.0);

  // Clip each specification to the best available stream so every product can
  // be produced in-spec.
  inst.spec_limit.assign(dims.products, std::vector<double>(dims.properties));
  for (int k = 0; k < dims.products; ++k)
    for (int l = 0; l < dims.properties; ++l) {
      double best = inst.property_value[0][l];
      for (int i = 1; i < dims.streams; ++i)
        best = std::min(best, inst.property_value[i][l]);
      inst.spec_limit[k][l] = std::max(rng.uniform(1.0, 2.5), best);
    }

  inst.demand.resize(dims.products);
  for (auto& w : inst.demand) w = rng.uniform(30.0, 120.0);
  return inst;
}

namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw std::runtime_error("instance schema error: " + what);
}

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) schema_error(std::string("missing field '") + key + "'");
  return *it;
}

std::vector<std::string> read_id_array(const json& doc, const char* key) {
  const json& arr = require(doc, key);
  if (!arr.is_array()) schema_error(std::string(key) + " must be an array");
  std::vector<std::string> out;
  for (const auto& v : arr) {
    if (!v.is_string()) schema_error(std::string(key) + " entries must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

double number_at(const json& table, const char* name, const std::string& key) {
  auto it = table.find(key);
  if (it == table.end())
    schema_error(std::string("missing entry ") + name + "[" + key + "]");
  if (!it->is_number())
    schema_error(std::string(name) + "[" + key + "] must be a number");
  return it->get<double>();
}

std::vector<double> read_vector(const json& doc, const char* name,
                                const std::vector<std::string>& ids) {
  const json& table = require(doc, name);
  if (!table.is_object()) schema_error(std::string(name) + " must be an object");
  std::vector<double> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(number_at(table, name, id));
  return out;
}

Table read_table(const json& doc, const char* name,
                 const std::vector<std::string>& rows,
                 const std::vector<std::string>& cols) {
  const json& table = require(doc, name);
  if (!table.is_object()) schema_error(std::string(name) + " must be an object");
  Table out(rows.size(), std::vector<double>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      out[r][c] = number_at(table, name, rows[r] + "," + cols[c]);
  return out;
}

json write_vector(const std::vector<double>& v,
                  const std::vector<std::string>& ids) {
  json out = json::object();
  for (std::size_t i = 0; i < ids.size(); ++i) out[ids[i]] = v[i];
  return out;
}

json write_table(const Table& t, const std::vector<std::string>& rows,
                 const std::vector<std::string>& cols) {
  json out = json::object();
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      out[rows[r] + "," + cols[c]] = t[r][c];
  return out;
}

}  // namespace

PoolingInstance read_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // nlohmann reports a byte offset; convert it to a line number.
    std::size_t line = 1;
    for (std::size_t p = 0; p < e.byte && p < text.size(); ++p)
      if (text[p] == '\n') ++line;
    throw std::runtime_error("instance parse error at line " +
                             std::to_string(line) + ": " + e.what());
  }
  if (!doc.is_object()) schema_error("document must be an object");
  const json& version = require(doc, "version");
  if (!version.is_string() || version.get<std::string>() != "pooling-instance/1")
    schema_error("unsupported version (want \"pooling-instance/1\")");

  PoolingInstance inst;
  inst.streams = read_id_array(doc, "streams");
  inst.pools = read_id_array(doc, "pools");
  inst.products = read_id_array(doc, "products");
  inst.properties = read_id_array(doc, "properties");
  inst.cost = read_vector(doc, "cost", inst.streams);
  inst.price = read_vector(doc, "price", inst.products);
  inst.pool_capacity = read_vector(doc, "pool_capacity", inst.pools);
  inst.pipe_capacity = read_table(doc, "pipe_capacity", inst.pools, inst.products);
  inst.property_value = read_table(doc, "property_value", inst.streams, inst.properties);
  inst.spec_limit = read_table(doc, "spec_limit", inst.products, inst.properties);
  inst.demand = read_vector(doc, "demand", inst.products);
  if (doc.contains("inlet_capacity"))
    inst.inlet_capacity = read_table(doc, "inlet_capacity", inst.streams, inst.pools);
  return inst;
}

std::string write_instance(const PoolingInstance& inst) {
  json doc = json::object();
  doc["version"] = "pooling-instance/1";
  doc["streams"] = inst.streams;
  doc["pools"] = inst.pools;
  doc["products"] = inst.products;
  doc["properties"] = inst.properties;
  doc["cost"] = write_vector(inst.cost, inst.streams);
  doc["price"] = write_vector(inst.price, inst.products);
  doc["pool_capacity"] = write_vector(inst.pool_capacity, inst.pools);
  doc["pipe_capacity"] = write_table(inst.pipe_capacity, inst.pools, inst.products);
  doc["property_value"] = write_table(inst.property_value, inst.streams, inst.properties);
  doc["spec_limit"] = write_table(inst.spec_limit, inst.products, inst.properties);
  doc["demand"] = write_vector(inst.demand, inst.products);
  if (inst.inlet_capacity)
    doc["inlet_capacity"] = write_table(*inst.inlet_capacity, inst.streams, inst.pools);
  return doc.dump(2) + "\n";
}

PoolingInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_instance(buf.str());
}

void save_instance(const PoolingInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  out << write_instance(inst);
}

}  // namespace pooling
