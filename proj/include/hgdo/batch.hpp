// Runs independent scenarios. Each run is single-threaded; the parallel
// runner distributes whole runs over OpenMP threads.
#pragma once

#include "hgdo/simulation.hpp"

#include <vector>

namespace hgdo::sim {

/// Results are in input order. The first exception raised by any run is
/// rethrown after all runs finish.
std::vector<SimResult> run_batch(const std::vector<ScenarioConfig>& configs);

/// Sequential reference with identical results.
std::vector<SimResult> run_batch_serial(const std::vector<ScenarioConfig>& configs);

}  // namespace hgdo::sim
