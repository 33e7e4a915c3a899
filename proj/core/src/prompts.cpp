#include "adapt/prompts.hpp"

#include <fstream>
#include <sstream>

#include "adapt/errors.hpp"

namespace adapt {

namespace {

constexpr const char* kExecutor = R"txt(You are crafting items in a text world. Each turn, write one line
starting with "think:" and then either one line starting with "action:"
or a final verdict. Available actions:
  get [count] <item>                      fetch a raw item
  craft [count] <item> using <n> <ingredient>, ...
                                          craft following a listed command
  inventory                               list what you carry
When the task is done write "task completed". If you cannot finish it,
write "task failed".

{demos}

{context}
Task: {task}

{trajectory})txt";

constexpr const char* kExecutorDemos = R"txt(Example.
Crafting commands:
craft 4 oak planks using 1 oak log
craft 1 beehive using 6 planks, 3 honeycomb
Task: craft 1 beehive
think: I need 6 planks and 3 honeycomb. Planks come from oak logs.
action: get 2 oak log
Observation: Got 2 oak log
think: Two logs give 8 planks.
action: craft 8 oak planks using 2 oak log
Observation: Crafted 8 oak planks
think: Now the honeycomb.
action: get 3 honeycomb
Observation: Got 3 honeycomb
think: I have everything for the beehive.
action: craft 1 beehive using 6 oak planks, 3 honeycomb
Observation: Crafted 1 beehive
think: I have the beehive.
task completed)txt";

constexpr const char* kPlanner = R"txt(The task below could not be finished in one go. Break it into a few
smaller steps (usually 3 to 5). For each item, work out its ingredients
from the crafting commands and add a step that obtains each ingredient
before the step that crafts the item. Write each step as
"Step <i>: <description>" and finish with a line
"Execution Order: ..." combining the steps with AND and OR, for example
"Execution Order: Step 1 OR (Step 2 AND Step 3)".

{demos}

{context}
Task: {task}
)txt";

constexpr const char* kPlannerDemos = R"txt(Example.
Task: craft beehive
Step 1: obtain 6 planks
Step 2: obtain 3 honeycomb
Step 3: craft 1 beehive using 6 planks, 3 honeycomb
Execution Order: Step 1 AND Step 2 AND Step 3

Example.
Task: obtain 4 stick
Step 1: fetch 4 stick directly
Step 2: obtain 2 planks
Step 3: craft 4 stick using 2 planks
Execution Order: Step 1 OR (Step 2 AND Step 3))txt";

constexpr const char* kPlannerDetailed = R"txt(Write a complete plan for the task below. Every step must be a single
crafting command that can be carried out without further breakdown;
list steps so that ingredients are crafted before the items that use
them. Write each step as "Step <i>: <description>" and finish with a
line "Execution Order: ..." combining the steps with AND and OR.

{demos}

{context}
Task: {task}
)txt";

constexpr const char* kPlannerDetailedDemos = R"txt(Example.
Task: craft beehive
Step 1: craft 8 oak planks using 2 oak log
Step 2: craft 1 beehive using 6 oak planks, 3 honeycomb
Execution Order: Step 1 AND Step 2)txt";

}  // namespace

PromptLibrary::PromptLibrary() {
  templates_.emplace("textcraft_executor", kExecutor);
  templates_.emplace("textcraft_executor.demos", kExecutorDemos);
  templates_.emplace("textcraft_planner", kPlanner);
  templates_.emplace("textcraft_planner.demos", kPlannerDemos);
  templates_.emplace("textcraft_planner_detailed", kPlannerDetailed);
  templates_.emplace("textcraft_planner_detailed.demos", kPlannerDetailedDemos);
}

PromptLibrary::PromptLibrary(const std::filesystem::path& dir) : PromptLibrary() {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw ConfigError("prompt directory not found: " + dir.string());
  }
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path());
    std::ostringstream text;
    text << in.rdbuf();
    templates_[entry.path().stem().string()] = text.str();
  }
}

bool PromptLibrary::has(std::string_view id) const {
  return templates_.find(id) != templates_.end();
}

const std::string& PromptLibrary::get(std::string_view id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) {
    throw ConfigError("unknown prompt template '" + std::string(id) + "'");
  }
  return it->second;
}

void PromptLibrary::set(std::string id, std::string text) {
  templates_[std::move(id)] = std::move(text);
}

const PromptLibrary& PromptLibrary::builtin() {
  static const PromptLibrary lib;
  return lib;
}

std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      auto close = tmpl.find('}', i);
      if (close != std::string_view::npos) {
        auto it = vars.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != vars.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

std::string render_context(const StringMap& context) {
  std::string out;
  for (const auto& [k, v] : context) out += k + ": " + v + "\n";
  return out;
}

std::string render_trajectory(const Trajectory& trajectory,
                              std::string_view thought_prefix,
                              std::string_view action_prefix) {
  std::string out;
  for (const auto& s : trajectory) {
    switch (s.kind) {
      case StepKind::kThought:
        out += std::string(thought_prefix) + " " + s.text + "\n";
        break;
      case StepKind::kAction:
        out += std::string(action_prefix) + " " + s.text + "\n";
        break;
      case StepKind::kObservation:
        out += "Observation: " + s.text + "\n";
        break;
    }
  }
  return out;
}

}  // namespace adapt
