#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "adapt/baselines.hpp"
#include "adapt/llm_backend.hpp"
#include "adapt/plan_logic.hpp"
#include "adapt/textcraft.hpp"

namespace adapt::testing {

inline std::shared_ptr<const textcraft::RecipeBook> minibook() {
  static auto book = std::make_shared<const textcraft::RecipeBook>(
      textcraft::load_recipes(textcraft::bundled_minibook_dir()));
  return book;
}

/// Returns canned generations in order, repeating the last one.
class ReplayBackend : public LlmBackend {
 public:
  explicit ReplayBackend(std::vector<std::string> replies) : replies_(std::move(replies)) {
    cfg_.model_name = "replay";
  }

  GenResponse complete(const GenRequest& req) override {
    requests.push_back(req);
    GenResponse r;
    size_t i = std::min(next_++, replies_.size() - 1);
    r.text = replies_[i];
    return r;
  }
  const BackendConfig& config() const override { return cfg_; }

  std::vector<GenRequest> requests;

 private:
  BackendConfig cfg_;
  std::vector<std::string> replies_;
  size_t next_ = 0;
};

/// Answers through a callback that sees the structured hint.
class FunctionBackend : public LlmBackend {
 public:
  using Fn = std::function<std::string(const GenRequest&)>;
  explicit FunctionBackend(Fn fn) : fn_(std::move(fn)) { cfg_.model_name = "function"; }

  GenResponse complete(const GenRequest& req) override {
    requests.push_back(req);
    GenResponse r;
    r.text = fn_(req);
    return r;
  }
  const BackendConfig& config() const override { return cfg_; }

  std::vector<GenRequest> requests;

 private:
  BackendConfig cfg_;
  Fn fn_;
};

/// Records every action and answers with a fixed observation.
class RecordingEnv : public Environment {
 public:
  std::string reset() override {
    actions.clear();
    ++resets;
    return "start";
  }
  std::string step(std::string_view action) override {
    actions.emplace_back(action);
    return "ok";
  }
  bool done() const override { return false; }
  int gold_reward() const override { return 0; }
  StringMap salient_state() const override { return {{"steps", std::to_string(actions.size())}}; }

  std::vector<std::string> actions;
  int resets = 0;
};

/// Recipe depth by plain fixed-point iteration over the recipe list, kept
/// separate from RecipeBook's own depth computation.
inline std::map<std::string, int> reference_depths(const textcraft::RecipeBook& book) {
  std::map<std::string, int> depth;
  for (const auto& item : book.items()) {
    if (book.is_raw(item)) depth[item] = 0;
  }
  auto slot_depth = [&](const textcraft::Ingredient& slot) -> int {
    if (!slot.is_tag) {
      auto it = depth.find(slot.ref);
      return it == depth.end() ? -1 : it->second;
    }
    int best = -1;
    for (const auto& m : book.tag_members(slot.ref)) {
      auto it = depth.find(m);
      if (it != depth.end() && (best < 0 || it->second < best)) best = it->second;
    }
    return best;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : book.recipes()) {
      int worst = 0;
      bool ok = true;
      for (const auto& slot : r.ingredients) {
        int d = slot_depth(slot);
        if (d < 0) {
          ok = false;
          break;
        }
        worst = std::max(worst, d);
      }
      if (!ok) continue;
      auto it = depth.find(r.output);
      if (it == depth.end() || worst + 1 < it->second) {
        depth[r.output] = worst + 1;
        changed = true;
      }
    }
  }
  return depth;
}

/// Truth-table evaluation by structural recursion, no short-circuit.
inline bool brute_force(const LogicExpr& e, const std::function<bool(int)>& truth) {
  if (e.is_leaf()) return truth(e.step_id());
  std::vector<bool> vals;
  for (const auto& c : e.children()) vals.push_back(brute_force(c, truth));
  bool acc = e.kind() == LogicExpr::Kind::kAnd;
  for (bool v : vals) acc = e.kind() == LogicExpr::Kind::kAnd ? (acc && v) : (acc || v);
  return acc;
}

/// Random expression over leaves drawn from 1..max_id with at most
/// `max_leaves` leaves.
inline LogicExpr random_expr(std::mt19937_64& rng, int max_leaves, int max_id) {
  int leaves = 1 + static_cast<int>(rng() % static_cast<uint64_t>(max_leaves));
  std::function<LogicExpr(int)> build = [&](int n) -> LogicExpr {
    if (n == 1) return LogicExpr::leaf(1 + static_cast<int>(rng() % static_cast<uint64_t>(max_id)));
    int parts = 2 + static_cast<int>(rng() % static_cast<uint64_t>(n - 1));
    std::vector<int> sizes(static_cast<size_t>(parts), 1);
    for (int extra = n - parts; extra > 0; --extra) ++sizes[rng() % sizes.size()];
    std::vector<LogicExpr> kids;
    for (int s : sizes) kids.push_back(build(s));
    return rng() % 2 ? LogicExpr::all_of(std::move(kids)) : LogicExpr::any_of(std::move(kids));
  };
  return build(leaves);
}

inline EpisodeResult run_scripted(std::string_view target, Strategy strategy, int d_max,
                                  int competence, double misdeclare_rate = 0.0,
                                  uint64_t ordinal = 0) {
  auto book = minibook();
  auto task = textcraft::build_task(target, *book, 0);
  textcraft::TextCraftEnv env(book, task);
  BackendConfig bc;
  bc.scripted.competence = competence;
  bc.scripted.misdeclare_rate = misdeclare_rate;
  auto executor = make_backend(bc, book, ordinal);
  auto planner = make_backend(bc, book, ordinal);
  CallLedger ledger;
  EpisodeIO io{env, *executor, *planner, ledger, nullptr, {}};
  StrategyConfig cfg;
  cfg.strategy = strategy;
  cfg.controller.d_max = d_max;
  return run_strategy(task.goal, cfg, io);
}

}  // namespace adapt::testing
