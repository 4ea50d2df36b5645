#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace scplan {

/// Raised when a chain or scenario cannot be used as given.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Link {
  int source = 0;
  int dest = 0;

  friend bool operator==(const Link&, const Link&) = default;
};

/// How a factory's decoded shipment cuts are denominated.
enum class FactoryCutUnits {
  raw,      // cuts are raw material consumed; product shipped = raw / r
  product,  // cuts are product units; raw consumed = r * cut
};

/// Layered supply chain: topology, capacities, unit costs and initial
/// material. Nodes are numbered echelon by echelon; links are sorted by
/// (source, dest).
///
/// Per-node vectors are indexed by node even where a value only has meaning
/// for some echelon (production_cost is zero outside suppliers, and so on).
struct ChainConfig {
  std::vector<int> echelon_layout;
  std::vector<std::string> node_names;
  std::vector<Link> links;
  int horizon = 0;

  std::vector<bool> is_factory;
  std::vector<double> processing_ratio;

  std::vector<double> stock_cost;
  std::vector<double> production_cost;
  std::vector<double> processing_cost;
  double transport_cost = 0.0;
  double excess_penalty = 0.0;
  double unmet_penalty = 0.0;

  std::vector<double> production_cap;
  std::vector<double> processing_cap;
  std::vector<double> stock_cap;
  std::vector<double> transport_cap;

  std::vector<double> initial_stock;
  // [node][k] = units available at step k + 1; only suppliers may be non-empty.
  std::vector<std::vector<double>> initial_production;
  // [link][k] = units arriving at step k + 1.
  std::vector<std::vector<double>> initial_transport;

  FactoryCutUnits factory_cut_units = FactoryCutUnits::raw;

  int num_nodes() const { return static_cast<int>(node_names.size()); }
  int num_links() const { return static_cast<int>(links.size()); }
  int num_echelons() const { return static_cast<int>(echelon_layout.size()); }

  int echelon_of(int node) const;
  bool is_supplier(int node) const { return echelon_of(node) == 0; }
  bool is_retailer(int node) const { return echelon_of(node) == num_echelons() - 1; }

  std::vector<int> suppliers() const;
  std::vector<int> retailers() const;
  /// Indices into `links` leaving / entering `node`, in link order.
  std::vector<int> outgoing_links(int node) const;
  std::vector<int> incoming_links(int node) const;
  /// -1 when the link does not exist.
  int link_index(int source, int dest) const;

  /// Production entries followed by one shipment entry per link.
  int action_size() const { return static_cast<int>(suppliers().size()) + num_links(); }
  /// Stocks, (next, later) arrivals per node, retailer demands, remaining steps.
  int observation_size() const {
    return 3 * num_nodes() + static_cast<int>(retailers().size()) + 1;
  }
};

struct ValidationResult {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Checks every structural and numeric invariant; never throws.
ValidationResult validate_config(const ChainConfig& config);

/// Full adjacent-echelon links for a layout, sorted by (source, dest).
std::vector<Link> layered_links(const std::vector<int>& echelon_layout);

/// Default names: supplier1.., factory1.., wholesaler1.., retailer1.. for a
/// four-echelon chain; e<k>n<i> otherwise.
std::vector<std::string> default_node_names(const std::vector<int>& echelon_layout);

/// The two-per-echelon chain with the common parameters of every catalog
/// scenario.
ChainConfig default_chain();

}  // namespace scplan
