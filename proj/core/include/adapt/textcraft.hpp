#pragma once

// TextCraft: a text-only crafting game over Minecraft crafting-table
// recipes. Items without a recipe are fetched with `get`, everything else
// must be crafted from listed commands.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "adapt/environment.hpp"

namespace adapt::textcraft {

/// "minecraft:oak_planks" -> "oak planks".
std::string normalize_item_name(std::string_view raw);

using Inventory = std::map<std::string, int>;

/// "[oak planks] (4) [stick] (2)", or "nothing" when empty.
std::string render_inventory(const Inventory& inv);
/// Inverse of render_inventory; also accepts an "Inventory:" prefix.
Inventory parse_inventory(std::string_view text);

struct Ingredient {
  std::string ref;  // item name, or tag name when is_tag
  bool is_tag = false;
  int count = 1;

  bool operator==(const Ingredient&) const = default;
};

struct Recipe {
  std::string id;
  std::string output;
  int output_count = 1;
  std::vector<Ingredient> ingredients;

  /// "craft 4 stick using 2 planks"
  std::string command() const;
};

class RecipeBook {
 public:
  /// Throws UnresolvedTagReference for a tag ingredient missing from `tags`.
  RecipeBook(std::vector<Recipe> recipes,
             std::map<std::string, std::set<std::string>> tags);

  const std::vector<Recipe>& recipes() const { return recipes_; }
  std::vector<const Recipe*> recipes_for(std::string_view item) const;

  bool is_known_item(std::string_view name) const;
  bool is_craftable(std::string_view item) const;
  /// Known item with no crafting recipe; obtainable with `get`.
  bool is_raw(std::string_view item) const;
  bool is_tag(std::string_view name) const;
  const std::set<std::string>& tag_members(std::string_view tag) const;
  const std::map<std::string, std::set<std::string>>& tags() const {
    return tags_;
  }
  /// All known item names, sorted.
  const std::set<std::string>& items() const { return items_; }

  /// Minimal number of crafting layers above raw items; nullopt when the
  /// item only appears in cyclic derivations.
  std::optional<int> depth_of(std::string_view item_or_tag) const;
  /// Throws NoDerivation.
  int recipe_depth(std::string_view item_or_tag) const;

  /// First recipe (in load order) achieving the item's minimal depth.
  const Recipe& derivation_recipe(std::string_view item) const;
  /// Lexicographically first tag member of minimal depth.
  const std::string& preferred_member(std::string_view tag) const;
  /// Concrete item for a goal or ingredient reference.
  std::string concrete_item(const Ingredient& ing) const;

  bool satisfies(const Ingredient& slot, std::string_view item) const;

  /// Maps free text to an item or tag name, tolerating a plural "s".
  std::optional<std::string> resolve_name(std::string_view text) const;

 private:
  void compute_depths();

  std::vector<Recipe> recipes_;
  std::map<std::string, std::set<std::string>> tags_;
  std::set<std::string> items_;
  std::map<std::string, std::vector<size_t>, std::less<>> by_output_;
  std::map<std::string, int, std::less<>> depth_;
  std::map<std::string, size_t, std::less<>> derivation_;
  std::map<std::string, std::string, std::less<>> preferred_member_;
};

struct LoadReport {
  int loaded = 0;
  int skipped_other_type = 0;
  int malformed = 0;
  std::vector<std::string> warnings;
};

/// Reads data-pack recipe JSON from `dir/recipes` and item tags from
/// `dir/tags/items` (a `data/minecraft/` prefix is also accepted).
/// Malformed records are skipped and counted; unresolved tags throw.
RecipeBook load_recipes(const std::filesystem::path& dir,
                        LoadReport* report = nullptr);

/// Location of the miniature recipe book shipped with the library.
std::filesystem::path bundled_minibook_dir();

enum class Split { kDev, kTest };
std::string_view to_string(Split s);
Split split_from_string(std::string_view s);

struct TaskInstance {
  std::string id;
  std::string target;
  std::string goal;  // "craft <target>"
  std::vector<std::string> commands;
  int depth = 0;
  Split split = Split::kTest;
  uint64_t seed = 0;
  /// Commands of the gold recipe tree, a subset of `commands`.
  std::vector<std::string> gold_commands;

  bool operator==(const TaskInstance&) const = default;
};

std::string to_jsonl(const TaskInstance& task);
TaskInstance task_from_jsonl(std::string_view line);
std::vector<TaskInstance> load_tasks(const std::filesystem::path& path);
void save_tasks(const std::filesystem::path& path,
                const std::vector<TaskInstance>& tasks);

/// Throws NoDerivation when the target cannot be crafted from raw items.
TaskInstance build_task(std::string_view target, const RecipeBook& book,
                        uint64_t seed, int max_distractors = 10);

struct TaskGenOptions {
  int min_depth = 2;
  int max_depth = 4;
  uint64_t seed = 0;
  /// Depth-2 items moved into the test split; remaining ones go to dev.
  int test_depth2_quota = 77;
  int max_distractors = 10;
};

/// One task per craftable item in the depth range, split assigned.
std::vector<TaskInstance> generate_tasks(const RecipeBook& book,
                                         const TaskGenOptions& opts);

/// Craftable-item counts per recipe depth.
std::map<int, int> depth_histogram(const RecipeBook& book);

struct GameState {
  Inventory inventory;
  std::vector<std::string> allowed_commands;
  std::string target;
  bool done = false;
  int step_count = 0;  // successfully applied actions

  bool operator==(const GameState&) const = default;
};

GameState reset_game(const TaskInstance& task);
std::string initial_observation(const TaskInstance& task);

/// Applies one action. Failed actions leave `state` untouched.
std::string step_game(const RecipeBook& book, GameState& state,
                      std::string_view action);

/// Gold action sequence, one recipe application per craft. Throws
/// NoSolution.
std::vector<std::string> oracle_solve(const TaskInstance& task,
                                      const RecipeBook& book);
std::vector<std::string> oracle_solve(std::string_view target,
                                      const RecipeBook& book);

/// Actions that bring `count` of an item (or any member of a tag) into an
/// inventory, crafting exact multiples in one action per item.
struct AcquisitionPlan {
  std::string item;
  std::vector<std::string> actions;
  int craft_actions = 0;

  std::vector<std::string> get_actions() const;
};

AcquisitionPlan plan_acquisition(const RecipeBook& book, const Inventory& start,
                                 std::string_view item_or_tag, int count);

/// Aggregate demand for building `count` of `item` from nothing, one entry
/// per craftable item, ingredients before the items that consume them.
struct Requirement {
  std::string item;
  int count = 0;  // units produced
  const Recipe* recipe = nullptr;
  int applications = 0;
};

std::vector<Requirement> expand_requirements(const RecipeBook& book,
                                             std::string_view item, int count);

class TextCraftEnv : public Environment {
 public:
  TextCraftEnv(std::shared_ptr<const RecipeBook> book, TaskInstance task);

  std::string reset() override;
  std::string step(std::string_view action) override;
  bool done() const override { return state_.done; }
  int gold_reward() const override { return state_.done ? 1 : 0; }
  StringMap salient_state() const override;

  const GameState& state() const { return state_; }
  const TaskInstance& task() const { return task_; }
  const RecipeBook& book() const { return *book_; }

 private:
  std::shared_ptr<const RecipeBook> book_;
  TaskInstance task_;
  GameState state_;
};

}  // namespace adapt::textcraft
