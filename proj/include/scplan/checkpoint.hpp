#pragma once

#include <stdexcept>
#include <string>

#include "scplan/ppo.hpp"

namespace scplan {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kCheckpointVersion = 1;

/// JSON document with every bundle field; doubles round-trip exactly.
std::string checkpoint_to_json(const PolicyBundle& bundle);
PolicyBundle checkpoint_from_json(const std::string& text);

/// Writes to a temporary sibling and renames it into place.
void save_checkpoint(const PolicyBundle& bundle, const std::string& path);
PolicyBundle load_checkpoint(const std::string& path);

/// Atomic whole-file write used by every exporter.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace scplan
