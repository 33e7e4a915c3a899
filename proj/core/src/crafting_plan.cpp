#include <functional>
#include <sstream>

#include "adapt/errors.hpp"
#include "adapt/textcraft.hpp"

namespace adapt::textcraft {

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

std::string pick_member(const RecipeBook& book, const Ingredient& slot,
                        const Inventory& inv, int need) {
  if (!slot.is_tag) return slot.ref;
  for (const auto& m : book.tag_members(slot.ref)) {
    auto it = inv.find(m);
    if (it != inv.end() && it->second >= need) return m;
  }
  return book.preferred_member(slot.ref);
}

}  // namespace

std::vector<std::string> AcquisitionPlan::get_actions() const {
  std::vector<std::string> out;
  for (const auto& a : actions) {
    if (a.rfind("get ", 0) == 0) out.push_back(a);
  }
  return out;
}

AcquisitionPlan plan_acquisition(const RecipeBook& book, const Inventory& start,
                                 std::string_view item_or_tag, int count) {
  AcquisitionPlan plan;
  Inventory inv = start;

  std::string target(item_or_tag);
  if (book.is_tag(target) && !book.is_known_item(target)) {
    target = pick_member(book, Ingredient{target, true, count}, inv, count);
  }
  if (!book.is_known_item(target)) {
    throw NoDerivation("unknown item '" + target + "'");
  }
  plan.item = target;

  std::function<void(const std::string&, int)> produce =
      [&](const std::string& item, int n) {
        int have = inv.count(item) ? inv[item] : 0;
        if (have >= n) return;
        int deficit = n - have;
        if (book.is_raw(item)) {
          plan.actions.push_back("get " + std::to_string(deficit) + " " + item);
          inv[item] += deficit;
          return;
        }
        const Recipe& r = book.derivation_recipe(item);
        int apps = ceil_div(deficit, r.output_count);
        std::ostringstream cmd;
        cmd << "craft " << apps * r.output_count << ' ' << item << " using ";
        bool first = true;
        for (const auto& slot : r.ingredients) {
          int need = slot.count * apps;
          std::string member = pick_member(book, slot, inv, need);
          produce(member, need);
          inv[member] -= need;  // reserved for this craft
          if (!first) cmd << ", ";
          first = false;
          cmd << need << ' ' << member;
        }
        plan.actions.push_back(cmd.str());
        ++plan.craft_actions;
        inv[item] += apps * r.output_count;
      };

  produce(target, count);
  return plan;
}

std::vector<Requirement> expand_requirements(const RecipeBook& book,
                                             std::string_view item, int count) {
  std::vector<std::string> post_order;
  std::set<std::string> seen;
  std::function<void(const std::string&)> visit = [&](const std::string& it) {
    if (book.is_raw(it) || !seen.insert(it).second) return;
    for (const auto& slot : book.derivation_recipe(it).ingredients) {
      visit(book.concrete_item(slot));
    }
    post_order.push_back(it);
  };
  std::string root = book.is_tag(item) && !book.is_known_item(item)
                         ? book.preferred_member(item)
                         : std::string(item);
  visit(root);

  std::map<std::string, int> demand{{root, count}};
  std::map<std::string, int> apps;
  for (auto it = post_order.rbegin(); it != post_order.rend(); ++it) {
    const Recipe& r = book.derivation_recipe(*it);
    int a = ceil_div(demand[*it], r.output_count);
    apps[*it] = a;
    for (const auto& slot : r.ingredients) {
      demand[book.concrete_item(slot)] += slot.count * a;
    }
  }

  std::vector<Requirement> out;
  for (const auto& it : post_order) {
    out.push_back({it, demand[it], &book.derivation_recipe(it), apps[it]});
  }
  return out;
}

}  // namespace adapt::textcraft
