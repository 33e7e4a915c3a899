#pragma once

// Prompt templates with {task}, {context}, {demos} and {trajectory}
// placeholders. Built-in TextCraft templates can be overridden by files
// named <id>.txt in a template directory.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "adapt/environment.hpp"
#include "adapt/trajectory.hpp"

namespace adapt {

class PromptLibrary {
 public:
  /// Built-in templates only.
  PromptLibrary();
  /// Built-ins, then every *.txt file in `dir` overriding by stem.
  explicit PromptLibrary(const std::filesystem::path& dir);

  bool has(std::string_view id) const;
  /// Throws ConfigError for an unknown id.
  const std::string& get(std::string_view id) const;
  void set(std::string id, std::string text);

  /// Shared read-only instance holding the built-ins.
  static const PromptLibrary& builtin();

 private:
  std::map<std::string, std::string, std::less<>> templates_;
};

/// Substitutes known placeholders; unknown braces are left as they are.
std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& vars);

/// "key: value" lines in key order; empty map renders as "".
std::string render_context(const StringMap& context);

std::string render_trajectory(const Trajectory& trajectory,
                              std::string_view thought_prefix = "think:",
                              std::string_view action_prefix = "action:");

}  // namespace adapt
