#include "scplan/codec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace scplan {

namespace {

constexpr double kRelativeSlack = 1e-9;

double to_unit(double a) { return (a + 1.0) / 2.0; }
double from_unit(double u) { return 2.0 * u - 1.0; }

// Order in which sorted cuts are handed out: ascending value, ties by
// position (and so by successor index, since links are sorted).
std::vector<std::size_t> cut_order(const std::vector<double>& cuts) {
  std::vector<std::size_t> order(cuts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cuts[a] < cuts[b]; });
  return order;
}

bool product_cuts(const ChainConfig& config, int node) {
  return config.is_factory[node] && config.factory_cut_units == FactoryCutUnits::product;
}

}  // namespace

std::vector<double> observation_maxima(const ScenarioSpec& scenario) {
  const ChainConfig& config = scenario.chain;
  std::vector<double> maxima;
  maxima.reserve(static_cast<std::size_t>(config.observation_size()));
  for (int n = 0; n < config.num_nodes(); ++n) maxima.push_back(config.stock_cap[n]);
  const double later_steps = static_cast<double>(std::max(1, scenario.lead_time.maximum - 1));
  for (int n = 0; n < config.num_nodes(); ++n) {
    double next = 0.0;
    if (config.is_supplier(n)) {
      next = config.production_cap[n];
    } else {
      for (int l : config.incoming_links(n)) next += config.stock_cap[config.links[l].source];
    }
    maxima.push_back(next);
    maxima.push_back(next * later_steps);
  }
  for (std::size_t k = 0; k < config.retailers().size(); ++k)
    maxima.push_back(scenario.demand.clip_max);
  maxima.push_back(static_cast<double>(config.horizon));
  return maxima;
}

std::vector<double> normalize_observation(const Observation& obs,
                                          const std::vector<double>& maxima) {
  if (obs.values.size() != maxima.size())
    throw std::invalid_argument("observation and maxima differ in length");
  std::vector<double> out(obs.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double m = maxima[i];
    out[i] = m > 0.0 ? std::clamp(2.0 * (obs.values[i] / m) - 1.0, -1.0, 1.0) : -1.0;
  }
  return out;
}

std::vector<double> normalize_observation(const Observation& obs, const ScenarioSpec& scenario) {
  return normalize_observation(obs, observation_maxima(scenario));
}

std::vector<double> clip_action(const std::vector<double>& action) {
  std::vector<double> out(action.size());
  for (std::size_t i = 0; i < action.size(); ++i)
    out[i] = std::isnan(action[i]) ? -1.0 : std::clamp(action[i], -1.0, 1.0);
  return out;
}

double cut_base(const SupplyChainState& state, const ChainConfig& config, int node) {
  const double stock = dispatchable_stock(state, config, node);
  return config.is_factory[node] ? std::min(stock, config.processing_cap[node]) : stock;
}

RawAction decode_action(const std::vector<double>& action, const SupplyChainState& state,
                        const ChainConfig& config) {
  if (static_cast<int>(action.size()) != config.action_size())
    throw std::invalid_argument("action has " + std::to_string(action.size()) +
                                " entries, expected " + std::to_string(config.action_size()));
  const auto a = clip_action(action);
  RawAction raw = RawAction::zeros(config);
  const auto suppliers = config.suppliers();
  for (std::size_t i = 0; i < suppliers.size(); ++i)
    raw.production[i] = to_unit(a[i]) * config.production_cap[suppliers[i]];

  const std::size_t offset = suppliers.size();
  for (int n = 0; n < config.num_nodes(); ++n) {
    const auto out_links = config.outgoing_links(n);
    if (out_links.empty()) continue;
    const double base = cut_base(state, config, n);
    if (base <= 0.0) continue;
    std::vector<double> cuts;
    for (int l : out_links) cuts.push_back(to_unit(a[offset + static_cast<std::size_t>(l)]) * base);
    double previous = 0.0;
    for (std::size_t idx : cut_order(cuts)) {
      raw.shipments[out_links[idx]] = cuts[idx] - previous;
      previous = cuts[idx];
    }
    if (product_cuts(config, n)) {
      // Cuts are product units; the stock pays r per unit, within the base.
      const double ratio = config.processing_ratio[n];
      double consumed = 0.0;
      for (int l : out_links) consumed += raw.shipments[l] * ratio;
      const double scale = consumed > base ? base / consumed : 1.0;
      for (int l : out_links) raw.shipments[l] *= ratio * scale;
    }
  }
  return raw;
}

std::vector<double> encode_plan(const RawAction& quantities, const SupplyChainState& state,
                                const ChainConfig& config) {
  const auto suppliers = config.suppliers();
  if (quantities.production.size() != suppliers.size() ||
      quantities.shipments.size() != config.links.size())
    throw EncodingError("plan has the wrong shape");
  const auto slack = [](double bound) { return kRelativeSlack * std::max(1.0, std::abs(bound)); };

  std::vector<double> action(static_cast<std::size_t>(config.action_size()), -1.0);
  for (std::size_t i = 0; i < suppliers.size(); ++i) {
    const int n = suppliers[i];
    const double q = quantities.production[i];
    const double cap = config.production_cap[n];
    if (!(q >= 0.0) || q > cap + slack(cap)) {
      std::ostringstream os;
      os << "production " << q << " at " << config.node_names[n] << " exceeds capacity " << cap;
      throw EncodingError(os.str());
    }
    action[i] = cap > 0.0 ? from_unit(std::min(q, cap) / cap) : -1.0;
  }

  const std::size_t offset = suppliers.size();
  for (int n = 0; n < config.num_nodes(); ++n) {
    const auto out_links = config.outgoing_links(n);
    if (out_links.empty()) continue;
    const double base = cut_base(state, config, n);
    std::vector<double> amounts;
    double consumed = 0.0;
    for (int l : out_links) {
      const double q = quantities.shipments[l];
      if (!(q >= 0.0)) throw EncodingError("negative shipment on link " + std::to_string(l));
      consumed += q;
      amounts.push_back(product_cuts(config, n) ? q / config.processing_ratio[n] : q);
    }
    if (consumed > base + slack(base)) {
      std::ostringstream os;
      os << "shipments " << consumed << " from " << config.node_names[n]
         << (config.is_factory[n] ? " exceed min(stock, processing capacity) "
                                  : " exceed dispatchable stock ")
         << base;
      throw EncodingError(os.str());
    }
    if (base <= 0.0) continue;
    double cumulative = 0.0;
    for (std::size_t idx : cut_order(amounts)) {
      cumulative += amounts[idx];
      action[offset + static_cast<std::size_t>(out_links[idx])] =
          from_unit(std::min(cumulative / base, 1.0));
    }
  }
  return action;
}

}  // namespace scplan
