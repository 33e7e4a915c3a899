#include <numeric>

#include "adapt/llm_backend.hpp"

namespace adapt {

int64_t CallLedger::record(CallRecord rec) {
  rec.call_id = static_cast<int64_t>(records_.size()) + 1;
  if (rec.module == Module::kExecutor) {
    ++executor_calls_;
  } else {
    ++planner_calls_;
  }
  records_.push_back(rec);
  return rec.call_id;
}

int CallLedger::transport_attempts() const {
  return std::accumulate(records_.begin(), records_.end(), 0,
                         [](int acc, const CallRecord& r) { return acc + r.transport_attempts; });
}

}  // namespace adapt
