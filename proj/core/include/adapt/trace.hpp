#pragma once

#include <string>

#include "adapt/controller.hpp"

namespace adapt {

/// Pretty-printed JSON of the decomposition tree, trajectories included.
std::string trace_json(const TaskNode& root, int indent = 2);

/// Tree plus episode-level fields (reward, k_max, call counts).
std::string trace_json(const EpisodeResult& episode, int indent = 2);

}  // namespace adapt
