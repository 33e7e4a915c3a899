#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace adapt {

enum class StepKind { kThought, kAction, kObservation };

std::string_view to_string(StepKind kind);

struct TrajectoryStep {
  StepKind kind = StepKind::kThought;
  std::string text;
  int iteration = 0;

  bool operator==(const TrajectoryStep&) const = default;
};

using Trajectory = std::vector<TrajectoryStep>;

/// The executor's self-assessed outcome of a (sub-)task.
enum class Verdict { kCompleted, kFailed };

}  // namespace adapt
