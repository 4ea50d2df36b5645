#pragma once

#include <string>

#include "scplan/simulator.hpp"

namespace scplan {

/// A decision rule that maps the live simulator state to the next action.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  /// Called once after every reset.
  virtual void begin_episode(const Simulator&) {}
  virtual RawAction act(const Simulator& sim) = 0;
};

}  // namespace scplan
