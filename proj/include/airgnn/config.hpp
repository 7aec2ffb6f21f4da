#pragma once

#include <string>

#include "airgnn/evalmetrics.hpp"
#include "airgnn/gnn.hpp"
#include "airgnn/netgen.hpp"
#include "airgnn/train.hpp"

namespace airgnn::config {

/// Resolved run configuration; defaults reproduce the reference scenario
/// (K=20, 500 m field, 5 MHz at 2.4 GHz, 40 dBm, batch 50, 2000 iterations).
struct RunConfig {
    netgen::DatasetConfig data;  // [channel] section
    gnn::PolicyKind kind = gnn::PolicyKind::mpnn;  // [model] section
    int layers = 3;
    train::TrainConfig train;                 // [train] section
    evalmetrics::OverheadConfig overhead;     // [overhead] section
};

/// INI-style parser: [channel]/[model]/[train]/[overhead] sections of
/// key = value lines, '#' or ';' comments. Unknown sections or keys raise
/// std::runtime_error naming the offending line.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

}  // namespace airgnn::config
