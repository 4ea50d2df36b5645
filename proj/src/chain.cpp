#include "scplan/chain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scplan {

int ChainConfig::echelon_of(int node) const {
  int first = 0;
  for (int e = 0; e < num_echelons(); ++e) {
    if (node < first + echelon_layout[e]) return e;
    first += echelon_layout[e];
  }
  throw ConfigError("node index " + std::to_string(node) + " outside the chain");
}

std::vector<int> ChainConfig::suppliers() const {
  std::vector<int> out;
  for (int n = 0; n < num_nodes(); ++n)
    if (is_supplier(n)) out.push_back(n);
  return out;
}

std::vector<int> ChainConfig::retailers() const {
  std::vector<int> out;
  for (int n = 0; n < num_nodes(); ++n)
    if (is_retailer(n)) out.push_back(n);
  return out;
}

std::vector<int> ChainConfig::outgoing_links(int node) const {
  std::vector<int> out;
  for (int l = 0; l < num_links(); ++l)
    if (links[l].source == node) out.push_back(l);
  return out;
}

std::vector<int> ChainConfig::incoming_links(int node) const {
  std::vector<int> out;
  for (int l = 0; l < num_links(); ++l)
    if (links[l].dest == node) out.push_back(l);
  return out;
}

int ChainConfig::link_index(int source, int dest) const {
  for (int l = 0; l < num_links(); ++l)
    if (links[l].source == source && links[l].dest == dest) return l;
  return -1;
}

std::vector<Link> layered_links(const std::vector<int>& echelon_layout) {
  std::vector<Link> links;
  int first = 0;
  for (std::size_t e = 0; e + 1 < echelon_layout.size(); ++e) {
    const int next_first = first + echelon_layout[e];
    for (int s = first; s < next_first; ++s)
      for (int d = next_first; d < next_first + echelon_layout[e + 1]; ++d)
        links.push_back({s, d});
    first = next_first;
  }
  return links;
}

std::vector<std::string> default_node_names(const std::vector<int>& echelon_layout) {
  static const char* kFourEchelon[] = {"supplier", "factory", "wholesaler", "retailer"};
  std::vector<std::string> names;
  for (std::size_t e = 0; e < echelon_layout.size(); ++e) {
    for (int i = 0; i < echelon_layout[e]; ++i) {
      if (echelon_layout.size() == 4)
        names.push_back(kFourEchelon[e] + std::to_string(i + 1));
      else
        names.push_back("e" + std::to_string(e) + "n" + std::to_string(i + 1));
    }
  }
  return names;
}

namespace {

class Checker {
 public:
  void require(bool condition, const std::string& message) {
    if (!condition) result_.violations.push_back(message);
  }

  void non_negative(const std::vector<double>& values, const std::string& field,
                    const ChainConfig& config) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i]) || values[i] < 0.0) {
        std::ostringstream os;
        os << field << " at " << config.node_names.at(i)
           << " must be non-negative and finite (got " << values[i] << ")";
        result_.violations.push_back(os.str());
      }
    }
  }

  void non_negative(double value, const std::string& field) {
    if (!std::isfinite(value) || value < 0.0)
      result_.violations.push_back(field + " must be non-negative and finite");
  }

  ValidationResult take() { return std::move(result_); }

 private:
  ValidationResult result_;
};

}  // namespace

ValidationResult validate_config(const ChainConfig& config) {
  Checker check;
  const auto& layout = config.echelon_layout;
  check.require(layout.size() >= 2, "chain needs at least two echelons");
  check.require(std::all_of(layout.begin(), layout.end(), [](int s) { return s >= 1; }),
                "every echelon needs at least one node");
  check.require(config.horizon >= 1, "horizon must be at least one step");

  int expected_nodes = 0;
  for (int s : layout) expected_nodes += s;
  if (config.num_nodes() != expected_nodes) {
    check.require(false, "node_names does not match the echelon layout");
    return check.take();
  }
  const auto q = static_cast<std::size_t>(expected_nodes);
  const auto per_node = [&](std::size_t size, const char* field) {
    check.require(size == q, std::string(field) + " must have one entry per node");
    return size == q;
  };
  bool sized = per_node(config.is_factory.size(), "is_factory");
  sized &= per_node(config.processing_ratio.size(), "processing_ratio");
  sized &= per_node(config.stock_cost.size(), "stock_cost");
  sized &= per_node(config.production_cost.size(), "production_cost");
  sized &= per_node(config.processing_cost.size(), "processing_cost");
  sized &= per_node(config.production_cap.size(), "production_cap");
  sized &= per_node(config.processing_cap.size(), "processing_cap");
  sized &= per_node(config.stock_cap.size(), "stock_cap");
  sized &= per_node(config.transport_cap.size(), "transport_cap");
  sized &= per_node(config.initial_stock.size(), "initial_stock");
  sized &= per_node(config.initial_production.size(), "initial_production");
  check.require(config.initial_transport.size() == config.links.size(),
                "initial_transport must have one entry per link");
  if (!sized || config.initial_transport.size() != config.links.size()) return check.take();

  check.non_negative(config.stock_cost, "stock_cost", config);
  check.non_negative(config.production_cost, "production_cost", config);
  check.non_negative(config.processing_cost, "processing_cost", config);
  check.non_negative(config.production_cap, "production_cap", config);
  check.non_negative(config.processing_cap, "processing_cap", config);
  check.non_negative(config.stock_cap, "stock_cap", config);
  check.non_negative(config.transport_cap, "transport_cap", config);
  check.non_negative(config.initial_stock, "initial_stock", config);
  check.non_negative(config.transport_cost, "transport_cost");
  check.non_negative(config.excess_penalty, "excess_penalty");
  check.non_negative(config.unmet_penalty, "unmet_penalty");

  for (int n = 0; n < config.num_nodes(); ++n) {
    const std::string& name = config.node_names[n];
    if (config.initial_stock[n] > config.stock_cap[n])
      check.require(false, "initial stock exceeds capacity at " + name);
    const double r = config.processing_ratio[n];
    if (!config.is_factory[n] && r != 1.0)
      check.require(false, "processing ratio must be 1 at non-factory " + name);
    if (config.is_factory[n] && !(std::isfinite(r) && r > 0.0))
      check.require(false, "processing ratio must be positive at factory " + name);
    if (config.is_factory[n] && (config.is_supplier(n) || config.is_retailer(n)))
      check.require(false, "factories must sit between suppliers and retailers: " + name);
    if (!config.is_supplier(n) && !config.initial_production[n].empty())
      check.require(false, "initial production given for non-supplier " + name);
    for (double v : config.initial_production[n])
      check.non_negative(v, "initial_production at " + name);
  }

  for (int l = 0; l < config.num_links(); ++l) {
    const Link& link = config.links[l];
    if (link.source < 0 || link.source >= config.num_nodes() || link.dest < 0 ||
        link.dest >= config.num_nodes()) {
      check.require(false, "link " + std::to_string(l) + " references an unknown node");
      continue;
    }
    const std::string label =
        config.node_names[link.source] + "->" + config.node_names[link.dest];
    if (config.echelon_of(link.dest) != config.echelon_of(link.source) + 1)
      check.require(false, "non-adjacent echelon link " + label);
    for (int m = 0; m < l; ++m)
      if (config.links[m] == link) check.require(false, "duplicate link " + label);
    for (double v : config.initial_transport[l])
      check.non_negative(v, "initial_transport on " + label);
  }
  for (int n = 0; n < config.num_nodes(); ++n) {
    if (config.is_retailer(n) && !config.outgoing_links(n).empty())
      check.require(false, "retailer " + config.node_names[n] + " has outgoing links");
    if (config.is_supplier(n) && !config.incoming_links(n).empty())
      check.require(false, "supplier " + config.node_names[n] + " has incoming links");
  }
  return check.take();
}

ChainConfig default_chain() {
  ChainConfig c;
  c.echelon_layout = {2, 2, 2, 2};
  c.node_names = default_node_names(c.echelon_layout);
  c.links = layered_links(c.echelon_layout);
  c.horizon = 360;

  c.is_factory = {false, false, true, true, false, false, false, false};
  c.processing_ratio = {1, 1, 3, 3, 1, 1, 1, 1};

  c.stock_cost = std::vector<double>(8, 1.0);
  c.production_cost = {6, 4, 0, 0, 0, 0, 0, 0};
  c.processing_cost = {0, 0, 12, 10, 0, 0, 0, 0};
  c.transport_cost = 2;
  c.excess_penalty = 10;
  c.unmet_penalty = 216;

  c.production_cap = {600, 840, 0, 0, 0, 0, 0, 0};
  c.processing_cap = {0, 0, 840, 960, 0, 0, 0, 0};
  c.stock_cap = {1600, 1800, 6400, 7200, 1600, 1800, 1600, 1800};
  c.transport_cap = c.stock_cap;

  c.initial_stock = std::vector<double>(8, 800.0);
  c.initial_production.assign(8, {});
  c.initial_production[0] = {600, 600};
  c.initial_production[1] = {840, 840};

  // Factory totals per arrival step are split evenly over both supplier links;
  // wholesalers and retailers receive 240 per incoming link.
  c.initial_transport.resize(c.links.size());
  for (std::size_t l = 0; l < c.links.size(); ++l) {
    const int dest = c.links[l].dest;
    double units = 240.0;
    if (dest == 2) units = 600.0 / 2.0;
    if (dest == 3) units = 840.0 / 2.0;
    c.initial_transport[l] = {units, units};
  }
  return c;
}

}  // namespace scplan
