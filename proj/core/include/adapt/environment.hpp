#pragma once

#include <map>
#include <string>
#include <string_view>

namespace adapt {

using StringMap = std::map<std::string, std::string>;

/// A text environment shared by every (sub-)task of one episode.
class Environment {
 public:
  virtual ~Environment() = default;

  /// Starts a fresh episode and returns the initial observation.
  virtual std::string reset() = 0;
  /// Applies untrusted model output; never throws on bad actions.
  virtual std::string step(std::string_view action) = 0;
  virtual bool done() const = 0;
  virtual int gold_reward() const = 0;
  /// Environment-specific state that context policies may propagate.
  virtual StringMap salient_state() const = 0;
};

}  // namespace adapt
