#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>

#include "adapt/textcraft.hpp"

namespace adapt::textcraft {

namespace {

constexpr std::string_view kParseError = "Could not parse action";
constexpr std::string_view kMissing = "Could not craft: missing ingredients";
constexpr std::string_view kNoRecipe = "Could not craft: no matching recipe";

std::string clean(std::string_view text) {
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

bool starts_with_word(std::string_view s, std::string_view word) {
  return s.size() >= word.size() && s.substr(0, word.size()) == word &&
         (s.size() == word.size() || s[word.size()] == ' ');
}

// "[count] name" -> (count, name). Count defaults to nullopt.
std::optional<std::pair<std::optional<int>, std::string>> counted_name(
    std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  std::optional<int> count;
  if (std::isdigit(static_cast<unsigned char>(s.front()))) {
    int n = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc() || n < 1) return std::nullopt;
    s.remove_prefix(static_cast<size_t>(ptr - s.data()));
    if (s.empty() || s.front() != ' ') return std::nullopt;
    s.remove_prefix(1);
    count = n;
  }
  if (s.empty()) return std::nullopt;
  return std::make_pair(count, std::string(s));
}

struct Declared {
  std::string ref;
  bool is_tag = false;
  int count = 1;
};

bool compatible(const RecipeBook& book, const Declared& d, const Ingredient& slot) {
  if (d.is_tag) return slot.is_tag && slot.ref == d.ref;
  return book.satisfies(slot, d.ref);
}

// Assigns every declared entry to one slot so each slot is filled exactly.
bool assign(const RecipeBook& book, const std::vector<Declared>& decl,
            const std::vector<Ingredient>& slots, int multiple) {
  std::vector<int> remaining;
  remaining.reserve(slots.size());
  for (const auto& s : slots) remaining.push_back(s.count * multiple);

  std::function<bool(size_t)> place = [&](size_t i) -> bool {
    if (i == decl.size()) {
      return std::all_of(remaining.begin(), remaining.end(),
                         [](int r) { return r == 0; });
    }
    for (size_t s = 0; s < slots.size(); ++s) {
      if (remaining[s] >= decl[i].count && compatible(book, decl[i], slots[s])) {
        remaining[s] -= decl[i].count;
        if (place(i + 1)) return true;
        remaining[s] += decl[i].count;
      }
    }
    return false;
  };
  return place(0);
}

void refresh_done(GameState& state) {
  auto it = state.inventory.find(state.target);
  state.done = it != state.inventory.end() && it->second >= 1;
}

std::string success(GameState& state, std::string msg) {
  ++state.step_count;
  bool was_done = state.done;
  refresh_done(state);
  if (state.done && !was_done) {
    msg += "\nYou have obtained the target item: " + state.target + ".";
  }
  return msg;
}

std::string do_get(const RecipeBook& book, GameState& state, std::string_view rest) {
  auto parsed = counted_name(rest);
  if (!parsed) return std::string(kParseError);
  auto [count, raw_name] = *parsed;
  auto name = book.resolve_name(raw_name);
  if (!name || !book.is_raw(*name)) return "Could not find " + raw_name;
  int n = count.value_or(1);
  state.inventory[*name] += n;
  return success(state, "Got " + std::to_string(n) + " " + *name);
}

std::string do_craft(const RecipeBook& book, GameState& state, std::string_view rest) {
  auto using_pos = rest.find(" using ");
  if (using_pos == std::string_view::npos) return std::string(kParseError);
  auto head = counted_name(rest.substr(0, using_pos));
  if (!head) return std::string(kParseError);

  std::vector<Declared> decl;
  std::string_view list = rest.substr(using_pos + 7);
  bool unknown = false;
  while (!list.empty()) {
    size_t comma = list.find(',');
    std::string_view part = list.substr(0, comma);
    auto entry = counted_name(part);
    if (!entry) return std::string(kParseError);
    std::string item_text = entry->second;
    while (!item_text.empty() && item_text.back() == ' ') item_text.pop_back();
    auto name = book.resolve_name(item_text);
    if (!name) {
      unknown = true;
    } else {
      bool is_item = book.is_known_item(*name);
      decl.push_back({*name, !is_item, entry->first.value_or(1)});
    }
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (decl.empty() && !unknown) return std::string(kParseError);

  auto item = book.resolve_name(head->second);
  if (unknown || !item || !book.is_craftable(*item)) return std::string(kNoRecipe);

  int declared_total = 0;
  for (const auto& d : decl) declared_total += d.count;

  std::optional<int> multiple;
  const Recipe* matched = nullptr;
  for (const Recipe* r : book.recipes_for(*item)) {
    int per_craft = 0;
    for (const auto& s : r->ingredients) per_craft += s.count;
    if (declared_total % per_craft != 0) continue;
    int m = declared_total / per_craft;
    if (m < 1) continue;
    if (head->first && *head->first != m * r->output_count) continue;
    if (assign(book, decl, r->ingredients, m)) {
      matched = r;
      multiple = m;
      break;
    }
  }
  if (!matched) return std::string(kNoRecipe);

  // Work on a copy so a shortfall leaves the state untouched.
  Inventory inv = state.inventory;
  for (const auto& d : decl) {
    if (d.is_tag) continue;
    auto it = inv.find(d.ref);
    if (it == inv.end() || it->second < d.count) return std::string(kMissing);
    it->second -= d.count;
  }
  for (const auto& d : decl) {
    if (!d.is_tag) continue;
    int need = d.count;
    for (const auto& member : book.tag_members(d.ref)) {
      auto it = inv.find(member);
      if (it == inv.end()) continue;
      int take = std::min(need, it->second);
      it->second -= take;
      need -= take;
      if (need == 0) break;
    }
    if (need > 0) return std::string(kMissing);
  }
  for (auto it = inv.begin(); it != inv.end();) {
    it = it->second == 0 ? inv.erase(it) : std::next(it);
  }
  int produced = *multiple * matched->output_count;
  inv[*item] += produced;
  state.inventory = std::move(inv);
  return success(state, "Crafted " + std::to_string(produced) + " " + *item);
}

}  // namespace

GameState reset_game(const TaskInstance& task) {
  GameState s;
  s.allowed_commands = task.commands;
  s.target = task.target;
  return s;
}

std::string initial_observation(const TaskInstance& task) {
  std::string obs = "Crafting commands:\n";
  for (const auto& c : task.commands) obs += c + "\n";
  obs += "\nGoal: " + task.goal + ".";
  return obs;
}

std::string step_game(const RecipeBook& book, GameState& state,
                      std::string_view action) {
  std::string a = clean(action);
  if (a == "inventory") {
    ++state.step_count;
    std::string inv = render_inventory(state.inventory);
    return inv == "nothing" ? "Inventory: You are not carrying anything."
                            : "Inventory: " + inv;
  }
  if (starts_with_word(a, "get")) return do_get(book, state, std::string_view(a).substr(3));
  if (starts_with_word(a, "craft")) {
    return do_craft(book, state, std::string_view(a).substr(5));
  }
  return std::string(kParseError);
}

TextCraftEnv::TextCraftEnv(std::shared_ptr<const RecipeBook> book, TaskInstance task)
    : book_(std::move(book)), task_(std::move(task)), state_(reset_game(task_)) {}

std::string TextCraftEnv::reset() {
  state_ = reset_game(task_);
  return initial_observation(task_);
}

std::string TextCraftEnv::step(std::string_view action) {
  return step_game(*book_, state_, action);
}

StringMap TextCraftEnv::salient_state() const {
  return {{"inventory", render_inventory(state_.inventory)}};
}

}  // namespace adapt::textcraft
