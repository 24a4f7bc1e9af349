#pragma once

// Seeded random generators for property tests. Everything they build is
// valid by construction; callers still validate to catch generator drift.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "swsforge/behavior.hpp"
#include "swsforge/pim.hpp"
#include "swsforge/sawsdl.hpp"

namespace swsforge::testing {

using Rng = std::mt19937_64;

int uniform(Rng& rng, int lo, int hi);  // inclusive
bool coin(Rng& rng, double p = 0.5);

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
    return items[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(items.size()) - 1))];
}

std::string random_builtin(Rng& rng);
std::string random_uri(Rng& rng);

struct ModelShape {
    int min_atomic = 1;
    int max_atomic = 3;
    bool composite = false;  // adds one composite over two or more atomics
};

pim::ServiceModel random_model(Rng& rng, const ModelShape& shape = {});

/// A description in the supported subset, built directly (not through the
/// forward transformation) so it reaches attributes the generator never
/// writes, such as message labels and every message exchange pattern.
sawsdl::WSDLDescription random_description(Rng& rng);

// ----------------------------------------------------------------- behaviors

/// Abstract shape of a structured orchestration; leaves are invoke tasks.
struct Shape {
    enum class Kind { task, sequence, choice, parallel, loop };
    Kind kind = Kind::task;
    std::vector<Shape> children;
    bool has_default = true;  // choice
};

Shape random_shape(Rng& rng, int max_depth, int max_tasks);
int count_tasks(const Shape& s);

/// Services W0..W(n-1), each with operation `op` taking and returning Job,
/// and the composite Orchestrator over all of them with behavior
/// OrchestratorProcess.
pim::ServiceModel worker_model(int workers);

/// Builds the behavior graph of a shape, independently of the library's
/// expander: receive first, reply last, gateways named after their role.
/// Task i invokes worker i % workers.
behavior::BehaviorModel build_graph(const Shape& s, int workers);

}  // namespace swsforge::testing
