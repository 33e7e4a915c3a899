#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>

#include "adapt/errors.hpp"
#include "adapt/harness.hpp"

namespace adapt {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

template <typename T>
T as(const std::string& value, const std::string& key) {
  try {
    return boost::lexical_cast<T>(value);
  } catch (const boost::bad_lexical_cast&) {
    throw ConfigError("bad value '" + value + "' for " + key);
  }
}

bool as_bool(const std::string& value, const std::string& key) {
  std::string v = lower(value);
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError("bad boolean '" + value + "' for " + key);
}

std::vector<std::string> split_list(const std::string& value, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : value) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// INI values cannot hold raw newlines; accept \n and \t escapes instead.
std::string unescape(const std::string& s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size() && (s[i + 1] == 'n' || s[i + 1] == 't')) {
      out += s[++i] == 'n' ? '\n' : '\t';
    } else {
      out += s[i];
    }
  }
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

void apply_backend(BackendConfig& b, const std::string& key, const std::string& value,
                   const std::string& where) {
  const std::string name = where + "." + key;
  if (key == "kind") {
    b.kind = backend_kind_from_string(value);
  } else if (key == "model") {
    b.model_name = value;
  } else if (key == "endpoint") {
    b.endpoint_url = value;
  } else if (key == "temperature") {
    b.default_temperature = as<double>(value, name);
  } else if (key == "timeout_ms") {
    b.request_timeout = std::chrono::milliseconds(as<int64_t>(value, name));
  } else if (key == "max_retries") {
    b.max_retries = as<int>(value, name);
  } else if (key == "retry_base_ms") {
    b.retry_base_delay = std::chrono::milliseconds(as<int64_t>(value, name));
  } else if (key == "api_key_env") {
    b.api_key_env = value;
  } else if (key == "max_tokens") {
    b.max_tokens = as<int>(value, name);
  } else if (key == "stop") {
    b.stop_sequences.clear();
    for (const auto& part : split_list(value, '|')) b.stop_sequences.push_back(unescape(part));
  } else if (key == "competence") {
    b.scripted.competence = as<int>(value, name);
  } else if (key == "misdeclare_rate") {
    b.scripted.misdeclare_rate = as<double>(value, name);
  } else if (key == "rng_seed") {
    b.scripted.rng_seed = as<uint64_t>(value, name);
  } else if (key == "planner_style") {
    b.scripted.planner_style = value;
  } else {
    throw ConfigError("unknown setting " + name);
  }
}

}  // namespace

void RunConfig::validate() const {
  if (environment != "textcraft") {
    throw ConfigError("unsupported environment '" + environment + "'");
  }
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (limit && *limit < 0) throw ConfigError("limit must be >= 0");
  if (!tasks.empty() && !std::filesystem::exists(tasks)) {
    throw ConfigError("task file not found: " + tasks.string());
  }
  if (!recipes.empty() && !std::filesystem::is_directory(recipes)) {
    throw ConfigError("recipe directory not found: " + recipes.string());
  }
  if (!prompts_dir.empty() && !std::filesystem::is_directory(prompts_dir)) {
    throw ConfigError("prompt directory not found: " + prompts_dir.string());
  }
  strategy.validate();
  executor_backend.validate();
  planner_backend.validate();
}

void apply_setting(RunConfig& cfg, const std::string& section, const std::string& key,
                   const std::string& value) {
  const std::string name = section + "." + key;
  ControllerConfig& cc = cfg.strategy.controller;
  if (section == "run") {
    if (key == "environment") cfg.environment = value;
    else if (key == "tasks") cfg.tasks = value;
    else if (key == "recipes") cfg.recipes = value;
    else if (key == "split") {
      if (value.empty() || value == "all") cfg.split.reset();
      else cfg.split = textcraft::split_from_string(value);
    }
    else if (key == "min_depth") cfg.task_gen.min_depth = as<int>(value, name);
    else if (key == "max_depth") cfg.task_gen.max_depth = as<int>(value, name);
    else if (key == "depth2_quota") cfg.task_gen.test_depth2_quota = as<int>(value, name);
    else if (key == "max_distractors") cfg.task_gen.max_distractors = as<int>(value, name);
    else if (key == "limit") cfg.limit = as<int>(value, name);
    else if (key == "parallelism") cfg.parallelism = as<int>(value, name);
    else if (key == "out") cfg.out_dir = value;
    else if (key == "seed") cfg.seed = as<uint64_t>(value, name);
    else if (key == "record_tree") cfg.record_tree = as_bool(value, name);
    else if (key == "prompts") cfg.prompts_dir = value;
    else throw ConfigError("unknown setting " + name);
  } else if (section == "strategy") {
    if (key == "name") cfg.strategy.strategy = strategy_from_string(value);
    else if (key == "d_max") cc.d_max = as<int>(value, name);
    else if (key == "retry_temperature") cfg.strategy.retry_temperature = as<double>(value, name);
    else if (key == "max_iterations") cc.executor.max_iterations = as<int>(value, name);
    else if (key == "call_ceiling") cc.call_ceiling = as<int>(value, name);
    else if (key == "context_policy") cc.context_policy = value;
    else if (key == "min_steps") cc.planner.min_steps = as<int>(value, name);
    else if (key == "max_steps") cc.planner.max_steps = as<int>(value, name);
    else if (key == "max_parse_retries") {
      cc.planner.max_parse_retries = as<int>(value, name);
      cfg.strategy.detailed_planner.max_parse_retries = cc.planner.max_parse_retries;
    }
    else if (key == "executor_template") cc.executor.prompt_template = value;
    else if (key == "planner_template") cc.planner.prompt_template = value;
    else if (key == "detailed_template") cfg.strategy.detailed_planner.prompt_template = value;
    else throw ConfigError("unknown setting " + name);
  } else if (section == "executor_backend") {
    apply_backend(cfg.executor_backend, key, value, section);
  } else if (section == "planner_backend") {
    apply_backend(cfg.planner_backend, key, value, section);
  } else {
    throw ConfigError("unknown config section [" + section + "]");
  }
}

BackendConfig parse_backend_spec(const std::string& spec, BackendConfig base) {
  auto parts = split_list(spec, ',');
  if (parts.empty() || trim(parts[0]).empty()) {
    throw ConfigError("empty backend spec");
  }
  base.kind = backend_kind_from_string(trim(parts[0]));
  for (size_t i = 1; i < parts.size(); ++i) {
    auto eq = parts[i].find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value in '" + parts[i] + "'");
    apply_backend(base, trim(parts[i].substr(0, eq)), trim(parts[i].substr(eq + 1)), "backend");
  }
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  namespace pt = boost::property_tree;
  if (!std::filesystem::is_regular_file(path)) {
    throw ConfigError("config file not found: " + path.string());
  }
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("cannot parse config: ") + e.what());
  }

  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError("setting '" + section + "' must sit inside a [section]");
    }
    for (const auto& [key, value] : body) {
      apply_setting(cfg, section, key, trim(value.get_value<std::string>()));
    }
  }

  // Relative paths in the file are relative to the file itself.
  auto base = path.parent_path();
  for (auto* p : {&cfg.tasks, &cfg.recipes, &cfg.out_dir, &cfg.prompts_dir}) {
    if (!p->empty() && p->is_relative()) *p = base / *p;
  }
  return cfg;
}

}  // namespace adapt
