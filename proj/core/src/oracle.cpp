#include <functional>

#include "adapt/errors.hpp"
#include "adapt/textcraft.hpp"

namespace adapt::textcraft {

std::vector<std::string> oracle_solve(std::string_view target,
                                      const RecipeBook& book) {
  std::string goal(target);
  if (!book.is_known_item(goal) || !book.depth_of(goal)) {
    throw NoSolution("no derivation for '" + goal + "'");
  }

  Inventory inv;
  std::vector<std::string> actions;
  std::function<void(const std::string&)> apply;

  auto ensure = [&](const std::string& item, int n) {
    while (inv[item] < n) {
      if (book.is_raw(item)) {
        actions.push_back("get " + std::to_string(n - inv[item]) + " " + item);
        inv[item] = n;
      } else {
        apply(item);
      }
    }
  };

  apply = [&](const std::string& item) {
    const Recipe& r = book.derivation_recipe(item);
    // A later ingredient's sub-crafts may eat an earlier one; re-check
    // until all slots hold at once.
    for (int pass = 0;; ++pass) {
      if (pass > 64) throw NoSolution("ingredient contention crafting '" + item + "'");
      for (const auto& slot : r.ingredients) ensure(book.concrete_item(slot), slot.count);
      bool all = true;
      for (const auto& slot : r.ingredients) {
        all = all && inv[book.concrete_item(slot)] >= slot.count;
      }
      if (all) break;
    }
    std::string cmd = "craft " + std::to_string(r.output_count) + " " + item + " using ";
    for (size_t i = 0; i < r.ingredients.size(); ++i) {
      const auto& slot = r.ingredients[i];
      std::string member = book.concrete_item(slot);
      inv[member] -= slot.count;
      if (i > 0) cmd += ", ";
      cmd += std::to_string(slot.count) + " " + member;
    }
    inv[item] += r.output_count;
    actions.push_back(std::move(cmd));
  };

  ensure(goal, 1);
  return actions;
}

std::vector<std::string> oracle_solve(const TaskInstance& task,
                                      const RecipeBook& book) {
  return oracle_solve(task.target, book);
}

}  // namespace adapt::textcraft
