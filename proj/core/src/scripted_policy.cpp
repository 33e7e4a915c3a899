#include "adapt/scripted_policy.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "adapt/errors.hpp"

namespace adapt {

using textcraft::Inventory;
using textcraft::RecipeBook;

namespace {

std::string lower_trim(std::string_view text) {
  std::string out;
  bool space = false;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(c));
  }
  while (!out.empty() && (out.back() == '.' || out.back() == ' ')) out.pop_back();
  return out;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

std::string join_ingredients(const RecipeBook& book, const textcraft::Recipe& r,
                             int apps, bool concrete) {
  std::string out;
  for (const auto& slot : r.ingredients) {
    if (!out.empty()) out += ", ";
    out += std::to_string(slot.count * apps) + " " +
           (concrete ? book.concrete_item(slot) : slot.ref);
  }
  return out;
}

}  // namespace

GoalForm parse_goal(const RecipeBook& book, std::string_view task) {
  std::string text = lower_trim(task);
  if (auto pos = text.find(" using "); pos != std::string::npos) text.resize(pos);
  GoalForm goal;
  if (ends_with(text, " directly")) {
    goal.directly = true;
    text.resize(text.size() - 9);
  }
  auto space = text.find(' ');
  if (space == std::string::npos) {
    throw UnknownGoalForm("cannot read a goal from \"" + std::string(task) + "\"");
  }
  goal.verb = text.substr(0, space);
  if (goal.verb != "craft" && goal.verb != "obtain" && goal.verb != "get" &&
      goal.verb != "fetch") {
    throw UnknownGoalForm("unsupported goal verb in \"" + std::string(task) + "\"");
  }
  std::string rest = text.substr(space + 1);
  if (!rest.empty() && std::isdigit(static_cast<unsigned char>(rest[0]))) {
    size_t end = 0;
    goal.count = std::stoi(rest, &end);
    rest = end < rest.size() ? rest.substr(end + 1) : std::string();
    if (goal.count < 1) {
      throw UnknownGoalForm("non-positive count in \"" + std::string(task) + "\"");
    }
  }
  auto name = book.resolve_name(rest);
  if (!name) {
    throw UnknownGoalForm("unknown item '" + rest + "' in \"" + std::string(task) + "\"");
  }
  goal.name = *name;
  if (goal.verb == "fetch") goal.directly = true;
  return goal;
}

std::string ScriptedStep::render() const {
  std::string out = "think: " + thought;
  if (verdict) {
    out += *verdict == Verdict::kCompleted ? "\ntask completed" : "\ntask failed";
  } else if (action) {
    out += "\naction: " + *action;
  }
  return out;
}

ScriptedStep scripted_executor_step(const ScriptedPolicyConfig& policy,
                                    const RecipeBook& book, std::string_view task,
                                    const Trajectory& history,
                                    const StringMap& context, bool misdeclare) {
  GoalForm goal = parse_goal(book, task);

  std::vector<const TrajectoryStep*> actions;
  std::vector<const TrajectoryStep*> observations;
  for (const auto& s : history) {
    if (s.kind == StepKind::kAction) actions.push_back(&s);
    if (s.kind == StepKind::kObservation) observations.push_back(&s);
  }

  auto fail = [&](std::string why) {
    ScriptedStep st;
    st.thought = std::move(why);
    st.verdict = misdeclare ? Verdict::kCompleted : Verdict::kFailed;
    return st;
  };

  Inventory start;
  size_t offset = 0;
  if (auto it = context.find("inventory"); it != context.end()) {
    start = textcraft::parse_inventory(it->second);
  } else if (actions.empty()) {
    return {"I should check what I am carrying first.", std::string("inventory"),
            std::nullopt};
  } else {
    if (observations.empty()) return fail("I could not see my inventory.");
    start = textcraft::parse_inventory(observations.front()->text);
    offset = 1;
  }

  for (size_t i = offset; i < observations.size(); ++i) {
    if (observations[i]->text.rfind("Could not", 0) == 0) {
      return fail("The last action did not work, so I cannot finish this.");
    }
  }

  std::vector<std::string> planned;
  bool capable = true;
  std::string item = goal.name;
  if (goal.directly) {
    if (book.is_tag(item) && !book.is_known_item(item)) {
      item = book.preferred_member(item);
    }
    int have = start.count(item) ? start.at(item) : 0;
    if (have < goal.count) {
      planned.push_back("get " + std::to_string(goal.count - have) + " " + item);
    }
  } else {
    textcraft::AcquisitionPlan plan;
    try {
      plan = textcraft::plan_acquisition(book, start, goal.name, goal.count);
    } catch (const NoDerivation&) {
      return fail("I do not know how to make " + goal.name + ".");
    }
    item = plan.item;
    capable = plan.craft_actions <= policy.competence;
    planned = capable ? plan.actions : plan.get_actions();
  }

  size_t done = actions.size() - offset;
  if (done < planned.size()) {
    ScriptedStep st;
    st.thought = planned[done].rfind("get ", 0) == 0
                     ? "I need to fetch the raw materials."
                     : "I have the ingredients, so I can craft.";
    st.action = planned[done];
    return st;
  }
  if (!capable) {
    return fail("This needs more crafting steps than I can manage.");
  }
  return {"I now have " + std::to_string(goal.count) + " " + item + ".", std::nullopt,
          Verdict::kCompleted};
}

std::string scripted_planner_plan(const ScriptedPolicyConfig& policy,
                                  const RecipeBook& book, std::string_view task,
                                  PlanDetail detail) {
  (void)policy;  // recipe_decomposer is the only style
  GoalForm goal = parse_goal(book, task);
  std::ostringstream os;

  if (goal.directly) {
    // Nothing smaller than a direct fetch; hand the task back unchanged.
    os << "Step 1: " << lower_trim(task) << "\nExecution Order: Step 1\n";
    return os.str();
  }

  std::string item = goal.name;
  if (book.is_tag(item) && !book.is_known_item(item)) item = book.preferred_member(item);
  if (!book.is_craftable(item)) {
    throw NoRecipeKnown("no recipe produces '" + goal.name + "'");
  }
  const textcraft::Recipe* recipe = nullptr;
  try {
    recipe = &book.derivation_recipe(item);
  } catch (const NoDerivation& e) {
    throw NoRecipeKnown(e.what());
  }

  std::vector<std::string> steps;
  std::string order;
  if (detail == PlanDetail::kDetailed) {
    for (const auto& req : textcraft::expand_requirements(book, item, goal.count)) {
      steps.push_back("craft " + std::to_string(req.count) + " " + req.item + " using " +
                      join_ingredients(book, *req.recipe, req.applications, true));
    }
  } else {
    int apps = ceil_div(goal.count, recipe->output_count);
    if (goal.verb == "obtain") {
      steps.push_back("fetch " + std::to_string(goal.count) + " " + item + " directly");
    }
    for (const auto& slot : recipe->ingredients) {
      steps.push_back("obtain " + std::to_string(slot.count * apps) + " " + slot.ref);
    }
    steps.push_back("craft " + std::to_string(goal.count) + " " + item + " using " +
                    join_ingredients(book, *recipe, apps, false));
  }

  auto chain = [&](size_t from) {
    std::string s;
    for (size_t i = from; i <= steps.size(); ++i) {
      if (!s.empty()) s += " AND ";
      s += "Step " + std::to_string(i);
    }
    return s;
  };
  if (detail == PlanDetail::kAbstract && goal.verb == "obtain") {
    order = "Step 1 OR (" + chain(2) + ")";
  } else {
    order = chain(1);
  }

  for (size_t i = 0; i < steps.size(); ++i) {
    os << "Step " << i + 1 << ": " << steps[i] << "\n";
  }
  os << "Execution Order: " << order << "\n";
  return os.str();
}

bool misdeclares(double rate, uint64_t ordinal) {
  if (rate <= 0.0) return false;
  constexpr double kEps = 1e-9;
  auto before = std::floor(static_cast<double>(ordinal) * rate + kEps);
  auto after = std::floor(static_cast<double>(ordinal + 1) * rate + kEps);
  return after > before;
}

ScriptedBackend::ScriptedBackend(BackendConfig cfg,
                                 std::shared_ptr<const RecipeBook> book,
                                 uint64_t episode_ordinal)
    : cfg_(std::move(cfg)),
      book_(std::move(book)),
      misdeclare_(misdeclares(cfg_.scripted.misdeclare_rate, episode_ordinal)) {
  if (!book_) throw ConfigError("scripted backend needs a recipe book");
}

GenResponse ScriptedBackend::complete(const GenRequest& req) {
  req.validate();
  if (!req.hint) {
    throw BackendError("scripted backend needs a structured request hint");
  }
  const ScriptHint& h = *req.hint;
  GenResponse resp;
  if (h.module == Module::kExecutor) {
    resp.text = scripted_executor_step(cfg_.scripted, *book_, h.task, h.transcript,
                                       h.context, misdeclare_)
                    .render();
  } else {
    resp.text = scripted_planner_plan(cfg_.scripted, *book_, h.task, h.detail);
  }
  return resp;
}

}  // namespace adapt
