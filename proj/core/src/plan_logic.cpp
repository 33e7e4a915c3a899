#include "adapt/plan_logic.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>

#include "adapt/errors.hpp"

namespace adapt {

LogicExpr LogicExpr::leaf(int step_id) {
  if (step_id < 1) {
    throw std::invalid_argument("step ids are positive");
  }
  return LogicExpr(Kind::kLeaf, step_id, {});
}

LogicExpr LogicExpr::all_of(std::vector<LogicExpr> children) {
  if (children.size() < 2) {
    throw std::invalid_argument("AND needs at least two operands");
  }
  return LogicExpr(Kind::kAnd, 0, std::move(children));
}

LogicExpr LogicExpr::any_of(std::vector<LogicExpr> children) {
  if (children.size() < 2) {
    throw std::invalid_argument("OR needs at least two operands");
  }
  return LogicExpr(Kind::kOr, 0, std::move(children));
}

std::vector<int> LogicExpr::leaves() const {
  std::vector<int> out;
  std::function<void(const LogicExpr&)> walk = [&](const LogicExpr& e) {
    if (e.is_leaf()) {
      out.push_back(e.step_id());
      return;
    }
    for (const auto& c : e.children()) walk(c);
  };
  walk(*this);
  return out;
}

int LogicExpr::max_step_id() const {
  auto ids = leaves();
  return *std::max_element(ids.begin(), ids.end());
}

bool LogicExpr::is_homogeneous() const {
  return std::all_of(children_.begin(), children_.end(),
                     [](const LogicExpr& c) { return c.is_leaf(); });
}

namespace {

enum class Tok { kStep, kAnd, kOr, kLParen, kRParen, kEnd };

struct Token {
  Tok kind;
  int value = 0;
  size_t pos = 0;
};

bool iequals_prefix(std::string_view text, size_t pos, std::string_view word) {
  if (text.size() - pos < word.size()) return false;
  for (size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[pos + i])) != word[i]) {
      return false;
    }
  }
  // keywords must not run into an identifier character
  size_t end = pos + word.size();
  return end == text.size() ||
         !std::isalpha(static_cast<unsigned char>(text[end]));
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> toks;
  size_t i = 0;
  auto fail = [&](const std::string& why) {
    throw MalformedExpression(why + " at offset " + std::to_string(i) +
                              " in \"" + std::string(text) + "\"");
  };
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (c == '(') {
      toks.push_back({Tok::kLParen, 0, i++});
    } else if (c == ')') {
      toks.push_back({Tok::kRParen, 0, i++});
    } else if (iequals_prefix(text, i, "and")) {
      toks.push_back({Tok::kAnd, 0, i});
      i += 3;
    } else if (iequals_prefix(text, i, "or")) {
      toks.push_back({Tok::kOr, 0, i});
      i += 2;
    } else if (text.size() - i >= 4 &&
               std::tolower(c) == 's' &&
               std::tolower(static_cast<unsigned char>(text[i + 1])) == 't' &&
               std::tolower(static_cast<unsigned char>(text[i + 2])) == 'e' &&
               std::tolower(static_cast<unsigned char>(text[i + 3])) == 'p') {
      size_t start = i;
      i += 4;
      while (i < text.size() &&
             std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
      }
      size_t digits = i;
      while (i < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[i]))) {
        ++i;
      }
      if (digits == i) fail("expected step number");
      if (i - digits > 6) fail("step number too large");
      int value = std::stoi(std::string(text.substr(digits, i - digits)));
      if (value < 1) fail("step numbers start at 1");
      toks.push_back({Tok::kStep, value, start});
    } else {
      fail("unknown token");
    }
  }
  toks.push_back({Tok::kEnd, 0, text.size()});
  return toks;
}

class Parser {
 public:
  Parser(std::string_view text, std::vector<Token> toks)
      : text_(text), toks_(std::move(toks)) {}

  LogicExpr parse() {
    if (peek().kind == Tok::kEnd) fail("empty expression");
    LogicExpr e = expr();
    if (peek().kind != Tok::kEnd) fail("unexpected trailing input");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& why) const {
    throw MalformedExpression(why + " at offset " +
                              std::to_string(peek().pos) + " in \"" +
                              std::string(text_) + "\"");
  }

  LogicExpr expr() {
    std::vector<LogicExpr> parts;
    parts.push_back(disj());
    while (peek().kind == Tok::kAnd) {
      next();
      parts.push_back(disj());
    }
    return parts.size() == 1 ? std::move(parts.front())
                             : LogicExpr::all_of(std::move(parts));
  }

  LogicExpr disj() {
    std::vector<LogicExpr> parts;
    parts.push_back(atom());
    while (peek().kind == Tok::kOr) {
      next();
      parts.push_back(atom());
    }
    return parts.size() == 1 ? std::move(parts.front())
                             : LogicExpr::any_of(std::move(parts));
  }

  LogicExpr atom() {
    const Token& t = peek();
    if (t.kind == Tok::kStep) {
      next();
      return LogicExpr::leaf(t.value);
    }
    if (t.kind == Tok::kLParen) {
      next();
      if (peek().kind == Tok::kRParen) fail("empty parentheses");
      LogicExpr inner = expr();
      if (peek().kind != Tok::kRParen) fail("unbalanced parentheses");
      next();
      return inner;
    }
    if (t.kind == Tok::kRParen) fail("unbalanced parentheses");
    fail("expected a step reference");
  }

  std::string_view text_;
  std::vector<Token> toks_;
  size_t pos_ = 0;
};

void format_into(const LogicExpr& e, bool root, std::string& out) {
  if (e.is_leaf()) {
    out += "Step " + std::to_string(e.step_id());
    return;
  }
  if (!root) out += '(';
  const char* op = e.kind() == LogicExpr::Kind::kAnd ? " AND " : " OR ";
  for (size_t i = 0; i < e.children().size(); ++i) {
    if (i > 0) out += op;
    format_into(e.children()[i], false, out);
  }
  if (!root) out += ')';
}

}  // namespace

LogicExpr parse_logic(std::string_view text) {
  return Parser(text, tokenize(text)).parse();
}

std::optional<LogicExpr> parse_execution_order_line(std::string_view line) {
  constexpr std::string_view kPrefix = "execution order:";
  size_t start = 0;
  while (start < line.size() &&
         std::isspace(static_cast<unsigned char>(line[start]))) {
    ++start;
  }
  if (line.size() - start < kPrefix.size()) return std::nullopt;
  for (size_t i = 0; i < kPrefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(line[start + i])) !=
        kPrefix[i]) {
      return std::nullopt;
    }
  }
  return parse_logic(line.substr(start + kPrefix.size()));
}

std::string format_logic(const LogicExpr& expr) {
  std::string out;
  format_into(expr, true, out);
  return out;
}

EvalResult evaluate_lazy(const LogicExpr& expr, const StepEvaluator& eval) {
  if (expr.is_leaf()) {
    try {
      return {eval(expr.step_id()), std::nullopt};
    } catch (const Error& e) {
      return {false, std::string(e.what())};
    }
  }
  const bool is_and = expr.kind() == LogicExpr::Kind::kAnd;
  EvalResult acc{is_and, std::nullopt};
  for (const auto& child : expr.children()) {
    EvalResult r = evaluate_lazy(child, eval);
    if (r.cause && !acc.cause) acc.cause = r.cause;
    if (is_and && !r.value) {
      acc.value = false;
      return acc;
    }
    if (!is_and && r.value) {
      acc.value = true;
      return acc;
    }
  }
  return acc;
}

std::vector<LogicLayer> layer_split(const LogicExpr& expr,
                                    std::optional<int> max_step_id) {
  int next_id = max_step_id.value_or(expr.max_step_id());
  std::vector<LogicLayer> layers;

  // Post-order: compound children become synthetic leaves.
  std::function<LogicExpr(const LogicExpr&)> flatten =
      [&](const LogicExpr& e) -> LogicExpr {
    if (e.is_leaf()) return e;
    std::vector<LogicExpr> kids;
    kids.reserve(e.children().size());
    for (const auto& c : e.children()) {
      if (c.is_leaf()) {
        kids.push_back(c);
      } else {
        LogicExpr inner = flatten(c);
        int id = ++next_id;
        layers.push_back({id, std::move(inner)});
        kids.push_back(LogicExpr::leaf(id));
      }
    }
    return e.kind() == LogicExpr::Kind::kAnd ? LogicExpr::all_of(std::move(kids))
                                             : LogicExpr::any_of(std::move(kids));
  };

  LogicExpr top = flatten(expr);
  layers.push_back({std::nullopt, std::move(top)});
  return layers;
}

bool evaluate_layers_eager(const std::vector<LogicLayer>& layers,
                           const std::function<bool(int)>& truth) {
  std::map<int, bool> synthetic;
  auto value_of = [&](int id) {
    auto it = synthetic.find(id);
    return it != synthetic.end() ? it->second : truth(id);
  };
  bool last = false;
  for (const auto& layer : layers) {
    const auto& e = layer.expr;
    if (e.is_leaf()) {
      last = value_of(e.step_id());
    } else {
      const bool is_and = e.kind() == LogicExpr::Kind::kAnd;
      bool v = is_and;
      for (const auto& c : e.children()) {
        bool cv = value_of(c.step_id());
        v = is_and ? (v && cv) : (v || cv);
      }
      last = v;
    }
    if (layer.result_id) synthetic[*layer.result_id] = last;
  }
  return last;
}

EvalResult evaluate_layers_lazy(const std::vector<LogicLayer>& layers,
                                const StepEvaluator& eval) {
  std::map<int, const LogicExpr*> by_id;
  for (const auto& layer : layers) {
    if (layer.result_id) by_id[*layer.result_id] = &layer.expr;
  }
  std::map<int, bool> memo;
  std::optional<std::string> first_cause;

  std::function<bool(int)> resolve = [&](int id) -> bool {
    auto it = by_id.find(id);
    if (it == by_id.end()) return eval(id);
    if (auto m = memo.find(id); m != memo.end()) return m->second;
    EvalResult r = evaluate_lazy(*it->second, resolve);
    if (r.cause && !first_cause) first_cause = r.cause;
    memo[id] = r.value;
    return r.value;
  };

  EvalResult r = evaluate_lazy(layers.back().expr, resolve);
  if (!r.cause) r.cause = first_cause;
  return r;
}

}  // namespace adapt
