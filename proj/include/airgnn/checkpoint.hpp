#pragma once

#include <string>

#include "airgnn/gnn.hpp"

namespace airgnn::checkpoint {

/// Versioned binary container for one policy bundle; round-trip is bit-exact.
/// Byte layout documented in docs/formats.md.
void save(const gnn::PolicyModel& model, const std::string& path);
gnn::PolicyModel load(const std::string& path);

}  // namespace airgnn::checkpoint
