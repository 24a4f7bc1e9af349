#pragma once

// Brute-force reference implementations the property tests compare against.

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "swsforge/behavior.hpp"
#include "swsforge/pim.hpp"

namespace swsforge::testing {

using TaskTrace = std::vector<std::string>;

/// Atomic services reachable from `name` through components, as a set.
std::set<std::string> closure_oracle(const pim::ServiceModel& model, const std::string& name);

/// Every complete run of the graph as a token game, recorded as the sequence
/// of task ids fired. Exclusive splits branch nondeterministically (conditions
/// are ignored); parallel splits put a token on every branch. Runs that fire
/// any task more than `max_repeat` times are cut.
std::set<TaskTrace> token_game_traces(const behavior::BehaviorModel& b, int max_repeat = 2);

/// All order-preserving merges of the given sequences.
std::set<TaskTrace> interleavings(const std::vector<TaskTrace>& branches);

/// (rule id, model path) for every model element of one service that the
/// forward transformation must map, enumerated from the model directly.
std::vector<std::pair<std::string, std::string>> expected_sources(const pim::ServiceModel& model,
                                                                  const std::string& service);

}  // namespace swsforge::testing
