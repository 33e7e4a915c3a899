#pragma once

// Execution-order expressions emitted by the planner: AND/OR trees over
// numbered plan steps, with a strict text syntax and short-circuit
// evaluation.
//
//   expr := disj ("AND" disj)*
//   disj := atom ("OR" atom)*
//   atom := "Step" <integer> | "(" expr ")"
//
// OR binds tighter than AND, keywords are case-insensitive.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adapt {

class LogicExpr {
 public:
  enum class Kind { kLeaf, kAnd, kOr };

  static LogicExpr leaf(int step_id);
  /// Throws std::invalid_argument for fewer than two children.
  static LogicExpr all_of(std::vector<LogicExpr> children);
  static LogicExpr any_of(std::vector<LogicExpr> children);

  Kind kind() const { return kind_; }
  bool is_leaf() const { return kind_ == Kind::kLeaf; }
  int step_id() const { return step_id_; }
  const std::vector<LogicExpr>& children() const { return children_; }

  /// Step ids in left-to-right leaf order, duplicates kept.
  std::vector<int> leaves() const;
  int max_step_id() const;
  /// True when every child is a leaf (or the node is a leaf itself).
  bool is_homogeneous() const;

  bool operator==(const LogicExpr&) const = default;

 private:
  LogicExpr(Kind kind, int step_id, std::vector<LogicExpr> children)
      : kind_(kind), step_id_(step_id), children_(std::move(children)) {}

  Kind kind_;
  int step_id_;
  std::vector<LogicExpr> children_;
};

/// Parses the text after "Execution Order:". Throws MalformedExpression.
LogicExpr parse_logic(std::string_view text);

/// Accepts a whole plan line; the "Execution Order:" prefix is matched
/// case-insensitively. Returns nullopt when the prefix is absent.
std::optional<LogicExpr> parse_execution_order_line(std::string_view line);

/// Canonical form, parenthesizing every compound node below the root.
std::string format_logic(const LogicExpr& expr);

struct EvalResult {
  bool value = false;
  /// Set when a step evaluation raised instead of answering.
  std::optional<std::string> cause;
};

/// Runs one step and reports its truth value. May throw adapt::Error.
using StepEvaluator = std::function<bool(int step_id)>;

/// Short-circuit evaluation, children strictly left to right. Errors thrown
/// by `eval` count as false for that leaf and are reported in `cause`.
EvalResult evaluate_lazy(const LogicExpr& expr, const StepEvaluator& eval);

/// One homogeneous stage of a split schedule. `result_id` names the value
/// the stage produces; the final stage has none.
struct LogicLayer {
  std::optional<int> result_id;
  LogicExpr expr;

  bool operator==(const LogicLayer&) const = default;
};

/// Rewrites a mixed expression into homogeneous stages. Synthetic ids are
/// allocated after `max_step_id` (defaults to the largest leaf id).
std::vector<LogicLayer> layer_split(const LogicExpr& expr,
                                    std::optional<int> max_step_id = {});

/// Evaluates every stage in order (no short-circuit across stages).
bool evaluate_layers_eager(const std::vector<LogicLayer>& layers,
                           const std::function<bool(int)>& truth);

/// Evaluates the final stage lazily, materializing synthetic ids on first
/// reference. Equivalent to evaluate_lazy on the unsplit expression.
EvalResult evaluate_layers_lazy(const std::vector<LogicLayer>& layers,
                                const StepEvaluator& eval);

}  // namespace adapt
