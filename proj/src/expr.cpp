#include "patch/expr.hpp"

#include <cctype>

#include "patch/error.hpp"
#include "patch/identifier.hpp"
#include "patch/literal.hpp"

namespace patch {

Expr Expr::lit(Value v) {
  Expr e;
  e.kind = Kind::Literal;
  e.literal = std::move(v);
  return e;
}

Expr Expr::var(std::string_view name) {
  Expr e;
  e.kind = Kind::Var;
  e.name = normalize_identifier(name);
  return e;
}

Expr Expr::index(Expr collection, Expr position) {
  Expr e;
  e.kind = Kind::Index;
  e.args.push_back(std::move(collection));
  e.args.push_back(std::move(position));
  return e;
}

Expr Expr::field(Expr tuple, std::string_view name) {
  Expr e;
  e.kind = Kind::Field;
  e.name = normalize_identifier(name);
  e.args.push_back(std::move(tuple));
  return e;
}

Expr Expr::unary(Op op, Expr operand) {
  Expr e;
  e.kind = Kind::Unary;
  e.op = op;
  e.args.push_back(std::move(operand));
  return e;
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = Kind::Binary;
  e.op = op;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  return e;
}

bool Expr::is_lvalue() const {
  if (kind == Kind::Var) return true;
  if (kind == Kind::Index || kind == Kind::Field) return args.front().is_lvalue();
  return false;
}

const std::string& Expr::root_var() const {
  return kind == Kind::Var ? name : args.front().root_var();
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Literal: return a.literal == b.literal;
    case Expr::Kind::Var: return a.name == b.name;
    case Expr::Kind::Field: return a.name == b.name && a.args == b.args;
    case Expr::Kind::Index: return a.args == b.args;
    case Expr::Kind::Unary:
    case Expr::Kind::Binary: return a.op == b.op && a.args == b.args;
  }
  return false;
}

std::string_view op_symbol(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Pow: return "^";
    case Op::Lt: return "<";
    case Op::Gt: return ">";
    case Op::Eq: return "=";
    case Op::Le: return "≤";
    case Op::Ge: return "≥";
    case Op::And: return "AND";
    case Op::Or: return "OR";
    case Op::Not: return "NOT";
    case Op::In: return "∈";
    case Op::Diff: return "∖";
    case Op::Union: return "∪";
    case Op::Inter: return "∩";
    case Op::Cross: return "×";
    case Op::Neg: return "-";
    case Op::Size: return "#";
  }
  return "?";
}

namespace {

// Binding strength, loosest first.
enum Prec : int {
  kOr = 1,
  kAnd = 2,
  kNot = 3,
  kCompare = 4,
  kAdditive = 5,
  kMultiplicative = 6,
  kPrefix = 7,
  kPower = 8,
  kPostfix = 9,
  kAtom = 10,
};

int binary_prec(Op op) {
  switch (op) {
    case Op::Or: return kOr;
    case Op::And: return kAnd;
    case Op::Lt:
    case Op::Gt:
    case Op::Eq:
    case Op::Le:
    case Op::Ge:
    case Op::In: return kCompare;
    case Op::Add:
    case Op::Sub:
    case Op::Union:
    case Op::Diff: return kAdditive;
    case Op::Mul:
    case Op::Div:
    case Op::Inter:
    case Op::Cross: return kMultiplicative;
    case Op::Pow: return kPower;
    default: return kAtom;
  }
}

int expr_prec(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Binary: return binary_prec(e.op);
    case Expr::Kind::Unary: return e.op == Op::Not ? kNot : kPrefix;
    case Expr::Kind::Index:
    case Expr::Kind::Field: return kPostfix;
    default: return kAtom;
  }
}

struct Token {
  enum class Type { End, Number, String, Ident, Symbol } type = Type::End;
  std::string text;
  std::size_t pos = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) { advance(); }

  Expr parse() {
    Expr e = parse_or();
    if (tok_.type != Token::Type::End) fail("unexpected '" + tok_.text + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw PatchError(ErrorKind::ParseError,
                     "expression: " + msg + " at column " + std::to_string(tok_.pos + 1));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void advance() {
    skip_ws();
    tok_ = Token{};
    tok_.pos = pos_;
    if (pos_ >= text_.size()) return;
    const char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      tok_.type = Token::Type::Ident;
      tok_.text = std::string(text_.substr(start, pos_ - start));
      return;
    }
    static constexpr std::string_view kSymbols[] = {
        "<=", ">=", "≤", "≥", "∈", "∖", "∪", "∩", "×",
        "−", "+", "-", "*", "/", "^", "<", ">", "=", "(", ")", "[", "]", ",", ".", "#",
        "\\"};
    for (auto sym : kSymbols) {
      if (text_.substr(pos_, sym.size()) == sym) {
        tok_.type = Token::Type::Symbol;
        tok_.text = std::string(sym);
        pos_ += sym.size();
        return;
      }
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '"' || c == '{') {
      tok_.type = Token::Type::Number;  // any literal; parsed lazily
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  bool is_symbol(std::string_view s) const {
    return tok_.type == Token::Type::Symbol && tok_.text == s;
  }

  bool is_word(std::string_view w) const {
    if (tok_.type != Token::Type::Ident) return false;
    if (tok_.text.size() != w.size()) return false;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(tok_.text[i])) != w[i]) return false;
    }
    return true;
  }

  void expect_symbol(std::string_view s) {
    if (!is_symbol(s)) fail("expected '" + std::string(s) + "'");
    advance();
  }

  Expr parse_or() {
    Expr lhs = parse_and();
    while (is_word("or")) {
      advance();
      lhs = Expr::binary(Op::Or, std::move(lhs), parse_and());
    }
    return lhs;
  }

  Expr parse_and() {
    Expr lhs = parse_not();
    while (is_word("and")) {
      advance();
      lhs = Expr::binary(Op::And, std::move(lhs), parse_not());
    }
    return lhs;
  }

  Expr parse_not() {
    if (is_word("not")) {
      advance();
      return Expr::unary(Op::Not, parse_not());
    }
    return parse_compare();
  }

  std::optional<Op> compare_op() const {
    if (is_symbol("<")) return Op::Lt;
    if (is_symbol(">")) return Op::Gt;
    if (is_symbol("=")) return Op::Eq;
    if (is_symbol("<=") || is_symbol("≤")) return Op::Le;
    if (is_symbol(">=") || is_symbol("≥")) return Op::Ge;
    if (is_symbol("∈") || is_word("in")) return Op::In;
    return std::nullopt;
  }

  Expr parse_compare() {
    Expr lhs = parse_additive();
    if (auto op = compare_op()) {
      advance();
      lhs = Expr::binary(*op, std::move(lhs), parse_additive());
      if (compare_op()) fail("comparisons do not chain; add parentheses");
    }
    return lhs;
  }

  std::optional<Op> additive_op() const {
    if (is_symbol("+")) return Op::Add;
    if (is_symbol("-") || is_symbol("−")) return Op::Sub;
    if (is_symbol("∪") || is_word("union")) return Op::Union;
    if (is_symbol("∖") || is_symbol("\\")) return Op::Diff;
    return std::nullopt;
  }

  Expr parse_additive() {
    Expr lhs = parse_multiplicative();
    while (auto op = additive_op()) {
      advance();
      lhs = Expr::binary(*op, std::move(lhs), parse_multiplicative());
    }
    return lhs;
  }

  std::optional<Op> multiplicative_op() const {
    if (is_symbol("*")) return Op::Mul;
    if (is_symbol("/")) return Op::Div;
    if (is_symbol("∩") || is_word("intersect")) return Op::Inter;
    if (is_symbol("×") || is_word("cross")) return Op::Cross;
    return std::nullopt;
  }

  Expr parse_multiplicative() {
    Expr lhs = parse_prefix();
    while (auto op = multiplicative_op()) {
      advance();
      lhs = Expr::binary(*op, std::move(lhs), parse_prefix());
    }
    return lhs;
  }

  Expr parse_prefix() {
    if (is_symbol("-") || is_symbol("−")) {
      // "-3" is a literal; "-(3)" and "-x" are negations.
      if (is_symbol("-") && pos_ < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        return parse_power_from_literal(tok_.pos);
      }
      advance();
      return Expr::unary(Op::Neg, parse_prefix());
    }
    if (is_symbol("#")) {
      advance();
      return Expr::unary(Op::Size, parse_prefix());
    }
    return parse_power();
  }

  Expr parse_power_from_literal(std::size_t at) {
    Expr base = literal_at(at);
    return finish_power(parse_postfix_tail(std::move(base)));
  }

  Expr parse_power() { return finish_power(parse_postfix()); }

  Expr finish_power(Expr base) {
    if (is_symbol("^")) {
      advance();
      return Expr::binary(Op::Pow, std::move(base), parse_prefix());
    }
    return base;
  }

  Expr literal_at(std::size_t at) {
    std::size_t p = at;
    Value v;
    try {
      v = parse_literal_at(text_, p);
    } catch (const PatchError& e) {
      throw PatchError(ErrorKind::ParseError, std::string("expression: ") + e.what());
    }
    pos_ = p;
    advance();
    return Expr::lit(std::move(v));
  }

  Expr parse_postfix() { return parse_postfix_tail(parse_primary()); }

  Expr parse_postfix_tail(Expr e) {
    while (true) {
      if (is_symbol("[")) {
        advance();
        Expr idx = parse_or();
        expect_symbol("]");
        e = Expr::index(std::move(e), std::move(idx));
      } else if (is_symbol(".")) {
        advance();
        if (tok_.type != Token::Type::Ident || !is_valid_identifier(tok_.text)) {
          fail("expected a field name");
        }
        e = Expr::field(std::move(e), tok_.text);
        advance();
      } else {
        return e;
      }
    }
  }

  Expr parse_primary() {
    if (tok_.type == Token::Type::Number) return literal_at(tok_.pos);
    if (is_symbol("[") || is_symbol("<")) return literal_at(tok_.pos);
    if (is_symbol("(")) {
      advance();
      Expr e = parse_or();
      expect_symbol(")");
      return e;
    }
    if (is_word("true") || is_word("false")) {
      bool v = is_word("true");
      advance();
      return Expr::lit(Value::boolean(v));
    }
    if (tok_.type == Token::Type::Ident) {
      if (!is_valid_identifier(tok_.text)) fail("'" + tok_.text + "' is reserved");
      Expr e = Expr::var(tok_.text);
      advance();
      return e;
    }
    if (tok_.type == Token::Type::End) fail("unexpected end of expression");
    fail("unexpected '" + tok_.text + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token tok_;
};

std::string print_with(const Expr& e);

std::string wrap(const Expr& e, bool parens) {
  std::string s = print_with(e);
  return parens ? "(" + s + ")" : s;
}

bool is_numeric_literal(const Expr& e) {
  return e.kind == Expr::Kind::Literal && e.literal.is_numeric();
}

std::string print_with(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Literal: return render_value(e.literal);
    case Expr::Kind::Var: return e.name;
    case Expr::Kind::Index:
      return wrap(e.args[0], expr_prec(e.args[0]) < kPostfix || is_numeric_literal(e.args[0])) +
             "[" + print_with(e.args[1]) + "]";
    case Expr::Kind::Field:
      return wrap(e.args[0], expr_prec(e.args[0]) < kPostfix || is_numeric_literal(e.args[0])) +
             "." + e.name;
    case Expr::Kind::Unary: {
      const Expr& x = e.args[0];
      if (e.op == Op::Not) return "NOT " + wrap(x, expr_prec(x) < kNot);
      // A numeric literal right after '-' or '#' would fold into the literal.
      const bool parens = expr_prec(x) < kPrefix || is_numeric_literal(x);
      return std::string(op_symbol(e.op)) + wrap(x, parens);
    }
    case Expr::Kind::Binary: {
      const int p = binary_prec(e.op);
      const Expr& l = e.args[0];
      const Expr& r = e.args[1];
      bool lp = false;
      bool rp = false;
      if (e.op == Op::Pow) {
        lp = expr_prec(l) <= p;
        rp = expr_prec(r) < kPrefix;
      } else if (p == kCompare) {
        lp = expr_prec(l) <= p;
        rp = expr_prec(r) <= p;
      } else {
        lp = expr_prec(l) < p;
        rp = expr_prec(r) <= p;
      }
      return wrap(l, lp) + " " + std::string(op_symbol(e.op)) + " " + wrap(r, rp);
    }
  }
  return {};
}

}  // namespace

Expr parse_expr(std::string_view text) { return Parser(text).parse(); }

std::string print_expr(const Expr& e) { return print_with(e); }

void collect_vars(const Expr& e, std::vector<std::string>& out) {
  if (e.kind == Expr::Kind::Var) {
    out.push_back(e.name);
    return;
  }
  for (const auto& a : e.args) collect_vars(a, out);
}

}  // namespace patch
