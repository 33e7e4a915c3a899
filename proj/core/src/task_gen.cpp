#include <algorithm>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <random>

#include "adapt/errors.hpp"
#include "adapt/textcraft.hpp"

namespace adapt::textcraft {

using nlohmann::json;

namespace {

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 1469598103934665603ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

// mt19937_64 output is fixed by the standard; distributions are not, so
// index selection uses the raw engine output.
template <typename T>
void shuffle_stable(std::vector<T>& v, std::mt19937_64& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

template <typename T>
std::vector<T> sample_stable(std::vector<T> v, size_t k, std::mt19937_64& rng) {
  if (v.size() <= k) return v;
  for (size_t i = 0; i < k; ++i) {
    size_t j = i + static_cast<size_t>(rng() % (v.size() - i));
    std::swap(v[i], v[j]);
  }
  v.resize(k);
  return v;
}

bool consumes(const RecipeBook& book, const Recipe& r, const std::string& item) {
  for (const auto& slot : r.ingredients) {
    if (book.satisfies(slot, item)) return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(Split s) { return s == Split::kDev ? "dev" : "test"; }

Split split_from_string(std::string_view s) {
  if (s == "dev") return Split::kDev;
  if (s == "test") return Split::kTest;
  throw ConfigError("unknown split '" + std::string(s) + "'");
}

TaskInstance build_task(std::string_view target, const RecipeBook& book,
                        uint64_t seed, int max_distractors) {
  std::string item(target);
  TaskInstance task;
  task.target = item;
  task.goal = "craft " + item;
  task.depth = book.recipe_depth(item);
  task.seed = seed;
  task.id = item;
  std::replace(task.id.begin(), task.id.end(), ' ', '_');

  // Gold tree, ingredients before the items that use them.
  std::vector<const Recipe*> gold;
  std::set<std::string> visited;
  std::function<void(const std::string&)> walk = [&](const std::string& it) {
    if (book.is_raw(it) || !visited.insert(it).second) return;
    const Recipe& r = book.derivation_recipe(it);
    for (const auto& slot : r.ingredients) walk(book.concrete_item(slot));
    gold.push_back(&r);
  };
  walk(item);

  std::mt19937_64 rng(seed ^ fnv1a(item));
  std::set<const Recipe*> gold_set(gold.begin(), gold.end());
  std::set<std::string> gold_text;
  for (const Recipe* r : gold) {
    task.gold_commands.push_back(r->command());
    gold_text.insert(r->command());
  }

  // Pool: per ingredient, up to 10 recipes producing or consuming it.
  std::set<size_t> pool;
  const auto& all = book.recipes();
  for (const Recipe* r : gold) {
    for (const auto& slot : r->ingredients) {
      std::vector<std::string> related;
      if (slot.is_tag) {
        const auto& m = book.tag_members(slot.ref);
        related.assign(m.begin(), m.end());
      } else {
        related.push_back(slot.ref);
      }
      std::vector<size_t> candidates;
      for (size_t i = 0; i < all.size(); ++i) {
        const Recipe& cand = all[i];
        if (gold_set.count(&cand) || gold_text.count(cand.command())) continue;
        bool hit = std::any_of(related.begin(), related.end(), [&](const std::string& x) {
          return cand.output == x || consumes(book, cand, x);
        });
        if (hit) candidates.push_back(i);
      }
      for (size_t i : sample_stable(std::move(candidates), 10, rng)) pool.insert(i);
    }
  }

  std::vector<size_t> pool_vec(pool.begin(), pool.end());
  std::set<std::string> lines(gold_text);
  std::vector<std::string> commands(task.gold_commands);
  for (size_t i : sample_stable(std::move(pool_vec),
                                static_cast<size_t>(std::max(0, max_distractors)), rng)) {
    std::string cmd = all[i].command();
    if (lines.insert(cmd).second) commands.push_back(std::move(cmd));
  }
  shuffle_stable(commands, rng);
  task.commands = std::move(commands);
  return task;
}

std::vector<TaskInstance> generate_tasks(const RecipeBook& book,
                                         const TaskGenOptions& opts) {
  std::vector<std::string> depth2;
  std::vector<TaskInstance> tasks;
  for (const auto& item : book.items()) {
    if (!book.is_craftable(item)) continue;
    auto d = book.depth_of(item);
    if (!d || *d < opts.min_depth || *d > opts.max_depth) continue;
    tasks.push_back(build_task(item, book, opts.seed, opts.max_distractors));
    if (*d == 2) depth2.push_back(item);
  }

  std::mt19937_64 rng(opts.seed);
  shuffle_stable(depth2, rng);
  if (depth2.size() > static_cast<size_t>(std::max(0, opts.test_depth2_quota))) {
    depth2.resize(static_cast<size_t>(std::max(0, opts.test_depth2_quota)));
  }
  std::set<std::string> depth2_test(depth2.begin(), depth2.end());
  for (auto& t : tasks) {
    if (t.depth >= 3) {
      t.split = Split::kTest;
    } else if (t.depth == 2) {
      t.split = depth2_test.count(t.target) ? Split::kTest : Split::kDev;
    } else {
      t.split = Split::kDev;
    }
  }
  return tasks;
}

std::map<int, int> depth_histogram(const RecipeBook& book) {
  std::map<int, int> hist;
  for (const auto& item : book.items()) {
    if (!book.is_craftable(item)) continue;
    if (auto d = book.depth_of(item)) ++hist[*d];
  }
  return hist;
}

std::string to_jsonl(const TaskInstance& t) {
  json j{{"id", t.id},
         {"target", t.target},
         {"goal", t.goal},
         {"commands", t.commands},
         {"gold_commands", t.gold_commands},
         {"depth", t.depth},
         {"split", std::string(to_string(t.split))},
         {"seed", t.seed}};
  return j.dump();
}

TaskInstance task_from_jsonl(std::string_view line) {
  try {
    json j = json::parse(line);
    TaskInstance t;
    t.id = j.at("id").get<std::string>();
    t.target = j.at("target").get<std::string>();
    t.goal = j.value("goal", "craft " + t.target);
    t.commands = j.at("commands").get<std::vector<std::string>>();
    t.gold_commands = j.value("gold_commands", std::vector<std::string>{});
    t.depth = j.at("depth").get<int>();
    t.split = split_from_string(j.value("split", std::string("test")));
    t.seed = j.value("seed", uint64_t{0});
    return t;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad task record: ") + e.what());
  }
}

std::vector<TaskInstance> load_tasks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open task file " + path.string());
  std::vector<TaskInstance> tasks;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    tasks.push_back(task_from_jsonl(line));
  }
  return tasks;
}

void save_tasks(const std::filesystem::path& path,
                const std::vector<TaskInstance>& tasks) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write task file " + path.string());
  for (const auto& t : tasks) out << to_jsonl(t) << '\n';
}

}  // namespace adapt::textcraft
