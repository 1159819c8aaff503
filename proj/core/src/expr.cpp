#include "pixelarray/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

namespace pixelarray {

ExprPtr make_number(double value) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::number;
  e->number = value;
  return e;
}

ExprPtr make_variable(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::variable;
  e->name = std::move(name);
  return e;
}

ExprPtr make_unary(Expr::Kind kind, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->a = std::move(a);
  return e;
}

ExprPtr make_binary(Expr::Kind kind, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

ExprPtr make_call(std::string function, ExprPtr argument) {
  if (!is_known_function(function)) {
    fail(Errc::unknown_function, "'" + function + "' is not a supported function");
  }
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::call;
  e->name = std::move(function);
  e->a = std::move(argument);
  return e;
}

bool is_known_function(const std::string& name) {
  static const std::set<std::string> kFunctions = {
      "sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "ln", "sqrt", "abs"};
  return kFunctions.count(name) > 0;
}

TargetSet TargetSet::interval(double lo, double hi) {
  if (!(lo <= hi)) fail(Errc::bad_input, "interval target needs lo <= hi");
  return {Kind::interval, lo, hi};
}

namespace {

// ---- tokenizer ----

struct Token {
  enum class Kind { number, ident, op, cmp, end };
  Kind kind = Kind::end;
  double number = 0.0;
  std::string text;  // ident name, operator or comparator spelling
  std::size_t pos = 0;
};

[[noreturn]] void syntax_error(std::size_t pos, const std::string& what) {
  fail(Errc::syntax_error, what + " at position " + std::to_string(pos));
}

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }
    std::size_t start = i;
    if ((c >= '0' && c <= '9') || (c == '.' && i + 1 < n && text[i + 1] >= '0' && text[i + 1] <= '9')) {
      while (i < n && text[i] >= '0' && text[i] <= '9') ++i;
      if (i < n && text[i] == '.') {
        ++i;
        while (i < n && text[i] >= '0' && text[i] <= '9') ++i;
      }
      if (i < n && (text[i] == 'e' || text[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (text[j] == '+' || text[j] == '-')) ++j;
        if (j < n && text[j] >= '0' && text[j] <= '9') {
          i = j;
          while (i < n && text[i] >= '0' && text[i] <= '9') ++i;
        }
      }
      double value = 0.0;
      auto res = std::from_chars(text.data() + start, text.data() + i, value);
      if (res.ec != std::errc() || res.ptr != text.data() + i) {
        syntax_error(start, "bad number literal");
      }
      out.push_back({Token::Kind::number, value, text.substr(start, i - start), start});
      continue;
    }
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
      while (i < n && ((text[i] >= 'a' && text[i] <= 'z') || (text[i] >= 'A' && text[i] <= 'Z') ||
                       (text[i] >= '0' && text[i] <= '9') || text[i] == '_')) {
        ++i;
      }
      out.push_back({Token::Kind::ident, 0.0, text.substr(start, i - start), start});
      continue;
    }
    if (c == '<' || c == '>') {
      std::string spelling(1, c);
      ++i;
      if (i < n && text[i] == '=') {
        spelling += '=';
        ++i;
      }
      out.push_back({Token::Kind::cmp, 0.0, spelling, start});
      continue;
    }
    if (c == '=') {
      out.push_back({Token::Kind::cmp, 0.0, "=", start});
      ++i;
      continue;
    }
    if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^' || c == '(' || c == ')') {
      out.push_back({Token::Kind::op, 0.0, std::string(1, c), start});
      ++i;
      continue;
    }
    syntax_error(start, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Token::Kind::end, 0.0, "", n});
  return out;
}

// ---- recursive descent parser ----
//
// expr   := term (('+'|'-') term)*
// term   := factor (('*'|'/') factor)*
// factor := '-' factor | power
// power  := atom ('^' factor)?        (right-associative, binds above unary -)
// atom   := number | ident | ident '(' expr ')' | '(' expr ')'

class Parser {
 public:
  explicit Parser(const std::string& text) : tokens_(tokenize(text)) {}

  ExprPtr parse_full_expression() {
    ExprPtr e = parse_expr();
    expect_end();
    return e;
  }

  // <expr> <cmp> <expr>; returns (lhs - rhs or rhs - lhs, target kind).
  std::pair<ExprPtr, TargetSet> parse_comparison() {
    ExprPtr lhs = parse_expr();
    const Token& t = peek();
    if (t.kind != Token::Kind::cmp) {
      syntax_error(t.pos, "expected a comparison (=, <=, <, >=, >)");
    }
    std::string cmp = t.text;
    ++index_;
    ExprPtr rhs = parse_expr();
    expect_end();

    ExprPtr diff;
    TargetSet target;
    if (cmp == "=") {
      diff = make_binary(Expr::Kind::sub, lhs, rhs);
      target = TargetSet::eq_zero();
    } else if (cmp == "<=") {
      diff = make_binary(Expr::Kind::sub, lhs, rhs);
      target = TargetSet::leq_zero();
    } else if (cmp == "<") {
      diff = make_binary(Expr::Kind::sub, lhs, rhs);
      target = TargetSet::lt_zero();
    } else if (cmp == ">=") {
      diff = make_binary(Expr::Kind::sub, rhs, lhs);
      target = TargetSet::leq_zero();
    } else {  // ">"
      diff = make_binary(Expr::Kind::sub, rhs, lhs);
      target = TargetSet::lt_zero();
    }
    return {diff, target};
  }

 private:
  const Token& peek() const { return tokens_[index_]; }

  bool accept_op(const char* spelling) {
    const Token& t = peek();
    if (t.kind == Token::Kind::op && t.text == spelling) {
      ++index_;
      return true;
    }
    return false;
  }

  void expect_end() {
    const Token& t = peek();
    if (t.kind != Token::Kind::end) {
      syntax_error(t.pos, "unexpected '" + t.text + "'");
    }
  }

  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    while (true) {
      if (accept_op("+")) {
        e = make_binary(Expr::Kind::add, e, parse_term());
      } else if (accept_op("-")) {
        e = make_binary(Expr::Kind::sub, e, parse_term());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_factor();
    while (true) {
      if (accept_op("*")) {
        e = make_binary(Expr::Kind::mul, e, parse_factor());
      } else if (accept_op("/")) {
        e = make_binary(Expr::Kind::div, e, parse_factor());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_factor() {
    if (accept_op("-")) {
      return make_unary(Expr::Kind::negate, parse_factor());
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (accept_op("^")) {
      return make_binary(Expr::Kind::pow, base, parse_factor());
    }
    return base;
  }

  ExprPtr parse_atom() {
    const Token& t = peek();
    if (t.kind == Token::Kind::number) {
      ++index_;
      return make_number(t.number);
    }
    if (t.kind == Token::Kind::ident) {
      ++index_;
      if (accept_op("(")) {
        if (!is_known_function(t.text)) {
          fail(Errc::unknown_function,
               "'" + t.text + "' at position " + std::to_string(t.pos));
        }
        ExprPtr arg = parse_expr();
        if (!accept_op(")")) syntax_error(peek().pos, "expected ')'");
        return make_call(t.text, arg);
      }
      return make_variable(t.text);
    }
    if (accept_op("(")) {
      ExprPtr e = parse_expr();
      if (!accept_op(")")) syntax_error(peek().pos, "expected ')'");
      return e;
    }
    syntax_error(t.pos, t.kind == Token::Kind::end ? std::string("unexpected end of input")
                                                   : "unexpected '" + t.text + "'");
  }

  std::vector<Token> tokens_;
  std::size_t index_ = 0;
};

void collect_variables(const Expr& e, std::set<std::string>& out) {
  switch (e.kind) {
    case Expr::Kind::number:
      return;
    case Expr::Kind::variable:
      out.insert(e.name);
      return;
    case Expr::Kind::negate:
    case Expr::Kind::call:
      collect_variables(*e.a, out);
      return;
    default:
      collect_variables(*e.a, out);
      collect_variables(*e.b, out);
      return;
  }
}

// Evaluation core, parameterized on variable lookup. Every arithmetic node
// checks for a finite result so UNDEFINED propagates from any subterm.
template <class Lookup>
std::optional<double> eval_impl(const Expr& e, const Lookup& lookup) {
  auto finite = [](double v) -> std::optional<double> {
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  };
  switch (e.kind) {
    case Expr::Kind::number:
      return finite(e.number);
    case Expr::Kind::variable:
      return finite(lookup(e.name));
    case Expr::Kind::negate: {
      auto a = eval_impl(*e.a, lookup);
      if (!a) return std::nullopt;
      return finite(-*a);
    }
    case Expr::Kind::add: {
      auto a = eval_impl(*e.a, lookup);
      auto b = eval_impl(*e.b, lookup);
      if (!a || !b) return std::nullopt;
      return finite(*a + *b);
    }
    case Expr::Kind::sub: {
      auto a = eval_impl(*e.a, lookup);
      auto b = eval_impl(*e.b, lookup);
      if (!a || !b) return std::nullopt;
      return finite(*a - *b);
    }
    case Expr::Kind::mul: {
      auto a = eval_impl(*e.a, lookup);
      auto b = eval_impl(*e.b, lookup);
      if (!a || !b) return std::nullopt;
      return finite(*a * *b);
    }
    case Expr::Kind::div: {
      auto a = eval_impl(*e.a, lookup);
      auto b = eval_impl(*e.b, lookup);
      if (!a || !b || *b == 0.0) return std::nullopt;
      return finite(*a / *b);
    }
    case Expr::Kind::pow: {
      auto a = eval_impl(*e.a, lookup);
      auto b = eval_impl(*e.b, lookup);
      if (!a || !b) return std::nullopt;
      if (*a == 0.0 && *b < 0.0) return std::nullopt;
      if (*a < 0.0 && *b != std::floor(*b)) return std::nullopt;
      return finite(std::pow(*a, *b));
    }
    case Expr::Kind::call: {
      auto a = eval_impl(*e.a, lookup);
      if (!a) return std::nullopt;
      double x = *a;
      double v = 0.0;
      if (e.name == "sin") v = std::sin(x);
      else if (e.name == "cos") v = std::cos(x);
      else if (e.name == "tan") v = std::tan(x);
      else if (e.name == "sinh") v = std::sinh(x);
      else if (e.name == "cosh") v = std::cosh(x);
      else if (e.name == "tanh") v = std::tanh(x);
      else if (e.name == "exp") v = std::exp(x);
      else if (e.name == "sqrt") {
        if (x < 0.0) return std::nullopt;
        v = std::sqrt(x);
      } else if (e.name == "ln") {
        if (x <= 0.0) return std::nullopt;
        v = std::log(x);
      } else if (e.name == "abs") {
        v = std::fabs(x);
      } else {
        fail(Errc::unknown_function, "'" + e.name + "'");
      }
      return finite(v);
    }
  }
  return std::nullopt;
}

int precedence_required(Expr::Kind kind) {
  switch (kind) {
    case Expr::Kind::add:
    case Expr::Kind::sub:
      return 1;
    case Expr::Kind::mul:
    case Expr::Kind::div:
      return 2;
    case Expr::Kind::negate:
      return 3;
    case Expr::Kind::pow:
      return 4;
    default:
      return 5;
  }
}

std::string format_number(double v) {
  // Shortest decimal form that parses back to the same double.
  char buf[64];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    double back = 0.0;
    auto res = std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
    if (res.ec == std::errc() && back == v) break;
  }
  return buf;
}

void print_expr(const Expr& e, int min_prec, std::string& out) {
  int prec = precedence_required(e.kind);
  bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (e.kind) {
    case Expr::Kind::number:
      out += format_number(e.number);
      break;
    case Expr::Kind::variable:
      out += e.name;
      break;
    case Expr::Kind::negate:
      out += '-';
      print_expr(*e.a, 3, out);
      break;
    case Expr::Kind::add:
      print_expr(*e.a, 1, out);
      out += " + ";
      print_expr(*e.b, 2, out);
      break;
    case Expr::Kind::sub:
      print_expr(*e.a, 1, out);
      out += " - ";
      print_expr(*e.b, 2, out);
      break;
    case Expr::Kind::mul:
      print_expr(*e.a, 2, out);
      out += "*";
      print_expr(*e.b, 3, out);
      break;
    case Expr::Kind::div:
      print_expr(*e.a, 2, out);
      out += "/";
      print_expr(*e.b, 3, out);
      break;
    case Expr::Kind::pow:
      print_expr(*e.a, 5, out);
      out += "^";
      print_expr(*e.b, 3, out);
      break;
    case Expr::Kind::call:
      out += e.name;
      out += '(';
      print_expr(*e.a, 0, out);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

}  // namespace

Relation make_relation(std::string id, ExprPtr lhs, TargetSet target) {
  Relation rel;
  rel.id = std::move(id);
  rel.variables = free_variables(lhs);
  rel.lhs = std::move(lhs);
  rel.target = target;
  return rel;
}

Relation parse_relation(const std::string& id, const std::string& text) {
  Parser parser(text);
  auto [lhs, target] = parser.parse_comparison();
  return make_relation(id, std::move(lhs), target);
}

ExprPtr parse_expression(const std::string& text) {
  Parser parser(text);
  return parser.parse_full_expression();
}

std::optional<double> eval(const ExprPtr& expr, const std::map<std::string, double>& assignment) {
  return eval_impl(*expr, [&](const std::string& name) -> double {
    auto it = assignment.find(name);
    if (it == assignment.end()) {
      fail(Errc::missing_variable, "variable '" + name + "' has no value");
    }
    return it->second;
  });
}

std::optional<double> eval_sorted(const Expr& expr, std::span<const std::string> names,
                                  std::span<const double> values) {
  return eval_impl(expr, [&](const std::string& name) -> double {
    auto it = std::lower_bound(names.begin(), names.end(), name);
    if (it == names.end() || *it != name) {
      fail(Errc::missing_variable, "variable '" + name + "' has no value");
    }
    return values[static_cast<std::size_t>(it - names.begin())];
  });
}

double distance_to_target(std::optional<double> value, const TargetSet& target) {
  if (!value) return std::numeric_limits<double>::infinity();
  double v = *value;
  switch (target.kind) {
    case TargetSet::Kind::eq_zero:
      return std::fabs(v);
    case TargetSet::Kind::leq_zero:
    case TargetSet::Kind::lt_zero:
      return std::max(v, 0.0);
    case TargetSet::Kind::interval:
      return std::max({target.lo - v, v - target.hi, 0.0});
  }
  return std::numeric_limits<double>::infinity();
}

std::string to_string(const ExprPtr& expr) {
  std::string out;
  print_expr(*expr, 0, out);
  return out;
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expr::Kind::number:
      return a->number == b->number;
    case Expr::Kind::variable:
      return a->name == b->name;
    case Expr::Kind::negate:
      return structurally_equal(a->a, b->a);
    case Expr::Kind::call:
      return a->name == b->name && structurally_equal(a->a, b->a);
    default:
      return structurally_equal(a->a, b->a) && structurally_equal(a->b, b->b);
  }
}

std::vector<std::string> free_variables(const ExprPtr& expr) {
  std::set<std::string> names;
  collect_variables(*expr, names);
  return {names.begin(), names.end()};
}

}  // namespace pixelarray
