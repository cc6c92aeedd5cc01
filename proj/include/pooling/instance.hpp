#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pooling {

using Table = std::vector<std::vector<double>>;

// Single-layer pooling network: streams feed pools, pools feed products,
// products carry upper specifications on stream properties.
struct PoolingInstance {
  std::vector<std::string> streams;     // index i
  std::vector<std::string> pools;       // index j
  std::vector<std::string> products;    // index k
  std::vector<std::string> properties;  // index l

  std::vector<double> cost;           // alpha[i], unit cost of stream i
  std::vector<double> price;          // beta[k], unit price of product k
  std::vector<double> pool_capacity;  // gamma[j]
  Table pipe_capacity;                // upsilon[j][k], pool -> product pipeline
  Table property_value;               // pi[i][l]
  Table spec_limit;                   // psi[k][l], upper specification
  std::vector<double> demand;         // omega[k]
  // sigma[i][j], stream -> pool pipeline; only the pq-style model uses it
  std::optional<Table> inlet_capacity;

  std::size_t num_streams() const { return streams.size(); }
  std::size_t num_pools() const { return pools.size(); }
  std::size_t num_products() const { return products.size(); }
  std::size_t num_properties() const { return properties.size(); }

  bool operator==(const PoolingInstance&) const = default;
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
};

struct InstanceDims {
  int streams = 1;
  int pools = 1;
  int products = 1;
  int properties = 0;
};

// Structural checks. Errors are fatal for the model builders; warnings flag
// degenerate data such as a pipeline bound that is not below pool capacity.
ValidationReport validate_instance(const PoolingInstance& inst);

// Deterministic random instance: same dims + seed give the same instance.
// Every pipe and inlet capacity is drawn strictly below the pool capacity and
// every product admits at least one in-spec stream.
PoolingInstance generate_instance(const InstanceDims& dims, std::uint64_t seed);

// JSON document <-> instance ("pooling-instance/1" schema).
PoolingInstance read_instance(const std::string& text);
std::string write_instance(const PoolingInstance& inst);

PoolingInstance load_instance(const std::string& path);
void save_instance(const PoolingInstance& inst, const std::string& path);

}  // namespace pooling
