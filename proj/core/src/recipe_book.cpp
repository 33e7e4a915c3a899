#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>

#include "adapt/errors.hpp"
#include "adapt/textcraft.hpp"

namespace adapt::textcraft {

std::string normalize_item_name(std::string_view raw) {
  if (auto colon = raw.find(':'); colon != std::string_view::npos) {
    raw.remove_prefix(colon + 1);
  }
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char ch : raw) {
    auto c = static_cast<unsigned char>(ch);
    if (ch == '_' || std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

std::string render_inventory(const Inventory& inv) {
  std::string out;
  for (const auto& [item, n] : inv) {
    if (n <= 0) continue;
    if (!out.empty()) out += ' ';
    out += '[' + item + "] (" + std::to_string(n) + ')';
  }
  return out.empty() ? "nothing" : out;
}

Inventory parse_inventory(std::string_view text) {
  Inventory inv;
  size_t pos = 0;
  while ((pos = text.find('[', pos)) != std::string_view::npos) {
    size_t close = text.find(']', pos);
    if (close == std::string_view::npos) break;
    std::string item(text.substr(pos + 1, close - pos - 1));
    size_t open = text.find('(', close);
    size_t end = open == std::string_view::npos ? open : text.find(')', open);
    if (end == std::string_view::npos) break;
    inv[item] += std::stoi(std::string(text.substr(open + 1, end - open - 1)));
    pos = end;
  }
  return inv;
}

std::string Recipe::command() const {
  std::ostringstream os;
  os << "craft " << output_count << ' ' << output << " using ";
  for (size_t i = 0; i < ingredients.size(); ++i) {
    if (i > 0) os << ", ";
    os << ingredients[i].count << ' ' << ingredients[i].ref;
  }
  return os.str();
}

RecipeBook::RecipeBook(std::vector<Recipe> recipes,
                       std::map<std::string, std::set<std::string>> tags)
    : recipes_(std::move(recipes)), tags_(std::move(tags)) {
  for (size_t i = 0; i < recipes_.size(); ++i) {
    const Recipe& r = recipes_[i];
    if (r.output_count < 1) {
      throw std::invalid_argument("recipe " + r.id + " has output count < 1");
    }
    if (r.ingredients.empty()) {
      throw std::invalid_argument("recipe " + r.id + " has no ingredients");
    }
    items_.insert(r.output);
    by_output_[r.output].push_back(i);
    for (const auto& ing : r.ingredients) {
      if (ing.is_tag) {
        if (!tags_.count(ing.ref)) {
          throw UnresolvedTagReference("recipe " + r.id +
                                       " references unknown tag '" + ing.ref +
                                       "'");
        }
      } else {
        items_.insert(ing.ref);
      }
    }
  }
  for (const auto& [tag, members] : tags_) {
    items_.insert(members.begin(), members.end());
  }
  compute_depths();
}

void RecipeBook::compute_depths() {
  for (const auto& item : items_) {
    if (!by_output_.count(item)) depth_[item] = 0;
  }

  auto ingredient_depth = [&](const Ingredient& ing) -> std::optional<int> {
    if (!ing.is_tag) {
      auto it = depth_.find(ing.ref);
      if (it == depth_.end()) return std::nullopt;
      return it->second;
    }
    std::optional<int> best;
    for (const auto& m : tags_.at(ing.ref)) {
      if (auto it = depth_.find(m); it != depth_.end()) {
        if (!best || it->second < *best) best = it->second;
      }
    }
    return best;
  };

  auto candidate = [&](const Recipe& r) -> std::optional<int> {
    int worst = 0;
    for (const auto& ing : r.ingredients) {
      auto d = ingredient_depth(ing);
      if (!d) return std::nullopt;
      worst = std::max(worst, *d);
    }
    return worst + 1;
  };

  // Relax to the least fixed point; values only ever decrease, so cycles
  // (ingot <-> block) settle on the shallowest acyclic derivation.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : recipes_) {
      auto c = candidate(r);
      if (!c) continue;
      auto it = depth_.find(r.output);
      if (it == depth_.end() || *c < it->second) {
        depth_[r.output] = *c;
        changed = true;
      }
    }
  }

  for (size_t i = 0; i < recipes_.size(); ++i) {
    const Recipe& r = recipes_[i];
    if (derivation_.count(r.output)) continue;
    auto c = candidate(r);
    auto it = depth_.find(r.output);
    if (c && it != depth_.end() && *c == it->second) derivation_[r.output] = i;
  }

  for (const auto& [tag, members] : tags_) {
    std::optional<int> best;
    const std::string* pick = nullptr;
    for (const auto& m : members) {  // std::set iterates lexicographically
      auto it = depth_.find(m);
      if (it == depth_.end()) continue;
      if (!best || it->second < *best) {
        best = it->second;
        pick = &m;
      }
    }
    if (pick) preferred_member_[tag] = *pick;
  }
}

std::vector<const Recipe*> RecipeBook::recipes_for(std::string_view item) const {
  std::vector<const Recipe*> out;
  if (auto it = by_output_.find(item); it != by_output_.end()) {
    for (size_t i : it->second) out.push_back(&recipes_[i]);
  }
  return out;
}

bool RecipeBook::is_known_item(std::string_view name) const {
  return items_.count(std::string(name)) > 0;
}

bool RecipeBook::is_craftable(std::string_view item) const {
  return by_output_.find(item) != by_output_.end();
}

bool RecipeBook::is_raw(std::string_view item) const {
  return is_known_item(item) && !is_craftable(item);
}

bool RecipeBook::is_tag(std::string_view name) const {
  return tags_.count(std::string(name)) > 0;
}

const std::set<std::string>& RecipeBook::tag_members(std::string_view tag) const {
  auto it = tags_.find(std::string(tag));
  if (it == tags_.end()) {
    throw UnresolvedTagReference("unknown tag '" + std::string(tag) + "'");
  }
  return it->second;
}

std::optional<int> RecipeBook::depth_of(std::string_view item_or_tag) const {
  if (auto it = depth_.find(item_or_tag); it != depth_.end()) return it->second;
  if (auto it = preferred_member_.find(item_or_tag);
      it != preferred_member_.end()) {
    return depth_.find(it->second)->second;
  }
  return std::nullopt;
}

int RecipeBook::recipe_depth(std::string_view item_or_tag) const {
  auto d = depth_of(item_or_tag);
  if (!d) {
    throw NoDerivation("'" + std::string(item_or_tag) +
                       "' cannot be derived from raw items");
  }
  return *d;
}

const Recipe& RecipeBook::derivation_recipe(std::string_view item) const {
  auto it = derivation_.find(item);
  if (it == derivation_.end()) {
    throw NoDerivation("no acyclic recipe for '" + std::string(item) + "'");
  }
  return recipes_[it->second];
}

const std::string& RecipeBook::preferred_member(std::string_view tag) const {
  auto it = preferred_member_.find(tag);
  if (it == preferred_member_.end()) {
    throw NoDerivation("no derivable member in tag '" + std::string(tag) + "'");
  }
  return it->second;
}

std::string RecipeBook::concrete_item(const Ingredient& ing) const {
  return ing.is_tag ? preferred_member(ing.ref) : ing.ref;
}

bool RecipeBook::satisfies(const Ingredient& slot, std::string_view item) const {
  if (!slot.is_tag) return slot.ref == item;
  return tag_members(slot.ref).count(std::string(item)) > 0;
}

std::optional<std::string> RecipeBook::resolve_name(std::string_view text) const {
  std::string name = normalize_item_name(text);
  auto known = [&](const std::string& n) { return is_known_item(n) || is_tag(n); };
  if (known(name)) return name;
  for (std::string_view suffix : {"es", "s"}) {
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      std::string singular = name.substr(0, name.size() - suffix.size());
      if (known(singular)) return singular;
    }
  }
  return std::nullopt;
}

}  // namespace adapt::textcraft
