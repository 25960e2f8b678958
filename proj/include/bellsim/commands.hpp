#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bellsim/config.hpp"

namespace bellsim {

struct CommandOutcome {
    std::vector<std::string> files;  // paths written, CSVs first
    nlohmann::json summary;          // also written to <out_dir>/summary.json
};

/// Full CHSH run: per-setting-pair tally CSV plus fair and post-selected S.
CommandOutcome cmd_run(const RunConfig& cfg);

/// One CHSH run per grid value of the swept parameter, same seed base per point.
CommandOutcome cmd_sweep(const RunConfig& cfg);

/// Coincidence-rate curves against a theta_B grid at fixed theta_A.
CommandOutcome cmd_curves(const RunConfig& cfg);

/// Single-channel phase scan with the two-curve decomposition labels.
CommandOutcome cmd_scan(const RunConfig& cfg);

/// Voltage-difference histogram under uniformly random LO phase.
CommandOutcome cmd_hist(const RunConfig& cfg);

}  // namespace bellsim
