#pragma once

#include <stdexcept>
#include <vector>

#include "scplan/simulator.hpp"

namespace scplan {

/// Raised by encode_plan when quantities exceed what the state allows.
class EncodingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maximum of each observation entry, in observation order.
std::vector<double> observation_maxima(const ScenarioSpec& scenario);

/// 2 * (v / M) - 1 per entry, clipped to [-1, 1].
std::vector<double> normalize_observation(const Observation& obs, const ScenarioSpec& scenario);
std::vector<double> normalize_observation(const Observation& obs,
                                          const std::vector<double>& maxima);

/// Clamps every entry to [-1, 1]; NaN maps to -1.
std::vector<double> clip_action(const std::vector<double>& action);

/// Stock a node's shipment cuts are taken from, in the units of the cuts.
double cut_base(const SupplyChainState& state, const ChainConfig& config, int node);

/// Maps an action in [-1, 1] (clipped first) to physical quantities. Shipment
/// values of a node are cuts of its base; sorted cuts are handed out as
/// increments, the smallest going to the successor that produced it. Equal
/// cuts favour the lower-index successor.
RawAction decode_action(const std::vector<double>& action, const SupplyChainState& state,
                        const ChainConfig& config);

/// Inverse of decode_action for feasible quantities.
std::vector<double> encode_plan(const RawAction& quantities, const SupplyChainState& state,
                                const ChainConfig& config);

}  // namespace scplan
