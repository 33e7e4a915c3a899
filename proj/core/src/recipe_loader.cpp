#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <json.hpp>

#include "adapt/errors.hpp"
#include "adapt/textcraft.hpp"

namespace adapt::textcraft {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Malformed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<fs::path> json_files(const fs::path& root) {
  std::vector<fs::path> out;
  if (!fs::is_directory(root)) return out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Malformed("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Malformed(p.string() + ": " + e.what());
  }
}

// Tag name from a path like tags/items/planks.json or tags/items/a/b.json.
std::string tag_name(const fs::path& root, const fs::path& file) {
  fs::path rel = fs::relative(file, root);
  rel.replace_extension();
  return normalize_item_name(rel.generic_string());
}

using TagMap = std::map<std::string, std::set<std::string>>;

TagMap load_tags(const fs::path& tag_dir, LoadReport& report) {
  std::map<std::string, json> raw;
  for (const auto& file : json_files(tag_dir)) {
    try {
      json doc = read_json(file);
      if (!doc.contains("values") || !doc["values"].is_array()) {
        throw Malformed(file.string() + ": missing values array");
      }
      raw[tag_name(tag_dir, file)] = doc["values"];
    } catch (const Malformed& e) {
      ++report.malformed;
      report.warnings.emplace_back(e.what());
    }
  }

  TagMap tags;
  std::set<std::string> visiting;
  std::function<const std::set<std::string>&(const std::string&)> expand =
      [&](const std::string& name) -> const std::set<std::string>& {
    if (auto it = tags.find(name); it != tags.end()) return it->second;
    auto src = raw.find(name);
    if (src == raw.end()) {
      throw UnresolvedTagReference("tag '" + name + "' is not defined");
    }
    if (!visiting.insert(name).second) {
      throw UnresolvedTagReference("tag '" + name + "' includes itself");
    }
    std::set<std::string> members;
    for (const auto& v : src->second) {
      std::string id;
      if (v.is_string()) {
        id = v.get<std::string>();
      } else if (v.is_object() && v.contains("id")) {
        id = v["id"].get<std::string>();
      } else {
        continue;
      }
      if (!id.empty() && id[0] == '#') {
        const auto& nested = expand(normalize_item_name(id.substr(1)));
        members.insert(nested.begin(), nested.end());
      } else {
        members.insert(normalize_item_name(id));
      }
    }
    visiting.erase(name);
    return tags.emplace(name, std::move(members)).first->second;
  };
  for (const auto& [name, _] : raw) expand(name);
  return tags;
}

// Resolves one ingredient JSON value (object or list of alternatives) to a
// slot reference. Alternative lists become synthetic tags.
Ingredient ingredient_ref(const json& v, TagMap& tags) {
  if (v.is_object()) {
    if (v.contains("item")) {
      return {normalize_item_name(v["item"].get<std::string>()), false, 1};
    }
    if (v.contains("tag")) {
      return {normalize_item_name(v["tag"].get<std::string>()), true, 1};
    }
    throw Malformed("ingredient needs 'item' or 'tag'");
  }
  if (v.is_array() && !v.empty()) {
    if (v.size() == 1) return ingredient_ref(v[0], tags);
    std::string name;
    std::set<std::string> members;
    for (const auto& alt : v) {
      Ingredient one = ingredient_ref(alt, tags);
      if (!name.empty()) name += " or ";
      name += one.ref;
      if (one.is_tag) {
        auto it = tags.find(one.ref);
        if (it == tags.end()) {
          throw UnresolvedTagReference("tag '" + one.ref + "' is not defined");
        }
        members.insert(it->second.begin(), it->second.end());
      } else {
        members.insert(one.ref);
      }
    }
    tags.emplace(name, std::move(members));
    return {name, true, 1};
  }
  throw Malformed("unsupported ingredient shape");
}

void add_slot(std::vector<Ingredient>& slots, Ingredient ing) {
  for (auto& s : slots) {
    if (s.ref == ing.ref && s.is_tag == ing.is_tag) {
      s.count += ing.count;
      return;
    }
  }
  slots.push_back(std::move(ing));
}

Recipe parse_recipe(const std::string& id, const json& doc, TagMap& tags) {
  Recipe r;
  r.id = id;
  const json& result = doc.at("result");
  if (result.is_string()) {
    r.output = normalize_item_name(result.get<std::string>());
  } else if (result.is_object() && result.contains("item")) {
    r.output = normalize_item_name(result["item"].get<std::string>());
    r.output_count = result.value("count", 1);
  } else {
    throw Malformed("result must name an item");
  }
  if (r.output.empty() || r.output_count < 1) {
    throw Malformed("invalid result");
  }

  const std::string type = normalize_item_name(doc.at("type").get<std::string>());
  if (type == "crafting shaped") {
    const json& pattern = doc.at("pattern");
    const json& key = doc.at("key");
    if (!pattern.is_array() || pattern.empty() || pattern.size() > 3) {
      throw Malformed("pattern must have 1-3 rows");
    }
    // Positions are irrelevant in the text game: count symbol occurrences.
    std::map<char, int> counts;
    std::vector<char> order;
    for (const auto& row : pattern) {
      const auto& s = row.get_ref<const std::string&>();
      if (s.size() > 3) throw Malformed("pattern rows are at most 3 wide");
      for (char c : s) {
        if (c == ' ') continue;
        if (counts[c]++ == 0) order.push_back(c);
      }
    }
    for (char c : order) {
      std::string k(1, c);
      if (!key.contains(k)) throw Malformed("pattern symbol '" + k + "' has no key");
      Ingredient ing = ingredient_ref(key[k], tags);
      ing.count = counts[c];
      add_slot(r.ingredients, std::move(ing));
    }
  } else {
    const json& ings = doc.at("ingredients");
    if (!ings.is_array()) throw Malformed("ingredients must be a list");
    for (const auto& v : ings) add_slot(r.ingredients, ingredient_ref(v, tags));
  }
  if (r.ingredients.empty()) throw Malformed("recipe has no ingredients");
  return r;
}

}  // namespace

RecipeBook load_recipes(const fs::path& dir, LoadReport* report_out) {
  fs::path base = dir;
  if (!fs::is_directory(base / "recipes") &&
      fs::is_directory(base / "data" / "minecraft" / "recipes")) {
    base = base / "data" / "minecraft";
  }
  if (!fs::is_directory(base / "recipes")) {
    throw ConfigError("no recipes directory under " + dir.string());
  }

  LoadReport report;
  TagMap tags = load_tags(base / "tags" / "items", report);

  std::vector<Recipe> recipes;
  for (const auto& file : json_files(base / "recipes")) {
    std::string id = fs::relative(file, base / "recipes").replace_extension().generic_string();
    try {
      json doc = read_json(file);
      if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string()) {
        throw Malformed("missing type");
      }
      const std::string type = normalize_item_name(doc["type"].get<std::string>());
      if (type != "crafting shaped" && type != "crafting shapeless") {
        ++report.skipped_other_type;
        continue;
      }
      recipes.push_back(parse_recipe(id, doc, tags));
      ++report.loaded;
    } catch (const Malformed& e) {
      ++report.malformed;
      report.warnings.push_back(id + ": " + e.what());
    } catch (const json::exception& e) {
      ++report.malformed;
      report.warnings.push_back(id + ": " + e.what());
    }
  }
  for (const auto& w : report.warnings) spdlog::warn("recipe loader: {}", w);

  RecipeBook book(std::move(recipes), std::move(tags));
  if (report_out) *report_out = std::move(report);
  return book;
}

fs::path bundled_minibook_dir() {
  fs::path installed = fs::path(ADAPT_INSTALL_DATA_DIR) / "textcraft" / "minibook";
  fs::path source = fs::path(ADAPT_DATA_DIR) / "textcraft" / "minibook";
  if (fs::is_directory(source)) return source;
  return installed;
}

}  // namespace adapt::textcraft
