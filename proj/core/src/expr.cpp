// SPDX-License-Identifier: Apache-2.0
#include "mathsynth/expr.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <numeric>
#include <vector>

namespace mathsynth {
namespace {

constexpr std::size_t kVarHash = 0x9e3779b97f4a7c15ULL;

std::size_t mix(std::size_t h, std::size_t v) noexcept {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::size_t const_hash(std::int64_t v) noexcept {
  auto x = static_cast<std::uint64_t>(v) * 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 31;
  return static_cast<std::size_t>(x ^ 0x94d049bb133111ebULL);
}

}  // namespace

char op_symbol(Op op) noexcept {
  switch (op) {
    case Op::Eq: return '=';
    case Op::Add: return '+';
    case Op::Sub: return '-';
    case Op::Mul: return '*';
    case Op::Div: return '/';
  }
  return '?';
}

// ---- construction ---------------------------------------------------------

Expr Expr::constant(std::int64_t value) {
  constexpr std::int64_t kLow = -16;
  constexpr std::int64_t kHigh = 127;
  auto build = [](std::int64_t v) {
    auto n = std::make_shared<detail::ExprNode>();
    n->kind = Kind::Const;
    n->value = v;
    n->hash = const_hash(v);
    return Expr(std::move(n));
  };
  if (value >= kLow && value <= kHigh) {
    static const auto cache = [&] {
      std::vector<Expr> table;
      table.reserve(kHigh - kLow + 1);
      for (std::int64_t v = kLow; v <= kHigh; ++v) table.push_back(build(v));
      return table;
    }();
    return cache[value - kLow];
  }
  return build(value);
}

Expr Expr::var() {
  static const Expr x = [] {
    auto n = std::make_shared<detail::ExprNode>();
    n->kind = Kind::Var;
    n->has_var = true;
    n->hash = kVarHash;
    return Expr(std::move(n));
  }();
  return x;
}

Expr Expr::node(Op op, Expr left, Expr right) {
  auto n = std::make_shared<detail::ExprNode>();
  n->kind = Kind::Node;
  n->op = op;
  n->has_var = left.has_var() || right.has_var();
  n->has_eq = op == Op::Eq || left.has_equality() || right.has_equality();
  n->size = 1 + left.size() + right.size();
  n->hash = mix(mix(static_cast<std::size_t>(op) + 1, left.hash()), right.hash());
  n->left = std::move(left);
  n->right = std::move(right);
  return Expr(std::move(n));
}

bool operator==(const Expr& a, const Expr& b) noexcept {
  if (a.p_ == b.p_) return true;
  if (a.hash() != b.hash() || a.size() != b.size() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Const: return a.value() == b.value();
    case Expr::Kind::Var: return true;
    case Expr::Kind::Node:
      return a.op() == b.op() && a.left() == b.left() && a.right() == b.right();
  }
  return false;
}

Equation trusted_equation(Expr tree) { return Equation(std::move(tree)); }

Equation Equation::make(Expr tree) {
  if (!tree.is_op(Op::Eq)) throw ValidationError("equation root must be '='");
  if (tree.left().has_equality() || tree.right().has_equality()) {
    throw ValidationError("'=' may only appear at the root");
  }
  return Equation(std::move(tree));
}

Equation Equation::from_sides(Expr lhs, Expr rhs) {
  return make(Expr::node(Op::Eq, std::move(lhs), std::move(rhs)));
}

// ---- tokenizer shared by both codecs ---------------------------------------

namespace {

enum class Tok { LParen, RParen, Op, Int, Var, End };

struct Token {
  Tok kind = Tok::End;
  Op op = Op::Add;
  std::int64_t value = 0;
  std::size_t pos = 0;
};

class Lexer {
 public:
  // In prefix mode a '-' directly followed by a digit is a negative literal.
  Lexer(std::string_view text, bool prefix_mode) : text_(text), prefix_(prefix_mode) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.pos = i_;
      if (i_ >= text_.size()) {
        out.push_back(t);
        return out;
      }
      char c = text_[i_];
      if (c == '(') {
        t.kind = Tok::LParen;
        ++i_;
      } else if (c == ')') {
        t.kind = Tok::RParen;
        ++i_;
      } else if (c == 'x' || c == 'X') {
        t.kind = Tok::Var;
        ++i_;
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (prefix_ && c == '-' && i_ + 1 < text_.size() &&
                  std::isdigit(static_cast<unsigned char>(text_[i_ + 1])))) {
        t.kind = Tok::Int;
        t.value = read_int();
      } else if (match_minus_sign()) {
        t.kind = Tok::Op;
        t.op = Op::Sub;
      } else if (c == '=' || c == '+' || c == '-' || c == '*' || c == '/') {
        t.kind = Tok::Op;
        t.op = c == '=' ? Op::Eq : c == '+' ? Op::Add : c == '-' ? Op::Sub : c == '*' ? Op::Mul : Op::Div;
        ++i_;
      } else {
        throw ParseError(std::string("unknown token '") + c + "'", i_);
      }
      out.push_back(t);
    }
  }

 private:
  void skip_space() {
    while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) ++i_;
  }

  // U+2212 MINUS SIGN, as it appears in typeset equations.
  bool match_minus_sign() {
    if (text_.substr(i_, 3) == "\xE2\x88\x92") {
      i_ += 3;
      return true;
    }
    return false;
  }

  std::int64_t read_int() {
    std::size_t start = i_;
    if (text_[i_] == '-') ++i_;
    while (i_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i_]))) ++i_;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + i_, v);
    if (ec != std::errc()) throw ParseError("integer literal out of range", start);
    (void)ptr;
    return v;
  }

  std::string_view text_;
  bool prefix_;
  std::size_t i_ = 0;
};

// ---- prefix ----------------------------------------------------------------

class PrefixParser {
 public:
  explicit PrefixParser(std::string_view text) : toks_(Lexer(text, true).run()) {}

  Expr parse_all() {
    Expr e = parse();
    if (peek().kind != Tok::End) throw ParseError("trailing input", peek().pos);
    return e;
  }

 private:
  const Token& peek() const { return toks_[k_]; }
  const Token& next() { return toks_[k_ < toks_.size() - 1 ? k_++ : k_]; }

  Expr parse() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::Int: return Expr::constant(t.value);
      case Tok::Var: return Expr::var();
      case Tok::LParen: {
        const Token& op = next();
        if (op.kind != Tok::Op) throw ParseError("expected an operator after '('", op.pos);
        if (peek().kind == Tok::RParen) throw ParseError("arity error: operator takes exactly 2 operands", peek().pos);
        Expr l = parse();
        if (peek().kind == Tok::RParen) throw ParseError("arity error: operator takes exactly 2 operands", peek().pos);
        Expr r = parse();
        const Token& close = next();
        if (close.kind != Tok::RParen) {
          if (close.kind == Tok::End) throw ParseError("unbalanced parentheses", close.pos);
          throw ParseError("arity error: operator takes exactly 2 operands", close.pos);
        }
        return Expr::node(op.op, std::move(l), std::move(r));
      }
      case Tok::End: throw ParseError("unexpected end of input", t.pos);
      default: throw ParseError("malformed token", t.pos);
    }
  }

  std::vector<Token> toks_;
  std::size_t k_ = 0;
};

void write_prefix(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::Const: out += std::to_string(e.value()); return;
    case Expr::Kind::Var: out += 'x'; return;
    case Expr::Kind::Node:
      out += '(';
      out += op_symbol(e.op());
      out += ' ';
      write_prefix(e.left(), out);
      out += ' ';
      write_prefix(e.right(), out);
      out += ')';
      return;
  }
}

// ---- infix -----------------------------------------------------------------

int precedence(Op op) {
  switch (op) {
    case Op::Eq: return 0;
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
  }
  return 0;
}

constexpr int kAtom = 3;

bool is_coefficient_form(const Expr& e) {
  return e.is_op(Op::Mul) && e.left().is_const() && e.left().value() >= 0 && e.right().is_var();
}

void write_infix(const Expr& e, int parent_prec, bool right_child, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::Const:
      if (e.value() < 0 && parent_prec > 0) {
        out += '(' + std::to_string(e.value()) + ')';
      } else {
        out += std::to_string(e.value());
      }
      return;
    case Expr::Kind::Var: out += 'x'; return;
    case Expr::Kind::Node: break;
  }
  if (is_coefficient_form(e)) {
    out += std::to_string(e.left().value());
    out += 'x';
    return;
  }
  int p = precedence(e.op());
  bool parens = p < parent_prec || (p == parent_prec && right_child);
  if (parens) out += '(';
  write_infix(e.left(), p, false, out);
  out += op_symbol(e.op());
  write_infix(e.right(), p, true, out);
  if (parens) out += ')';
}

class InfixParser {
 public:
  explicit InfixParser(std::string_view text) : toks_(Lexer(text, false).run()) {}

  Expr parse_expression_only() {
    Expr e = expr();
    finish();
    return e;
  }

  Equation parse_equation() {
    Expr l = expr();
    const Token& t = next();
    if (t.kind != Tok::Op || t.op != Op::Eq) {
      if (t.kind == Tok::RParen) throw ParseError("unbalanced parentheses", t.pos);
      throw ParseError("expected '='", t.pos);
    }
    Expr r = expr();
    finish();
    return Equation::from_sides(std::move(l), std::move(r));
  }

 private:
  const Token& peek() const { return toks_[k_]; }
  const Token& next() { return toks_[k_ < toks_.size() - 1 ? k_++ : k_]; }

  void finish() {
    const Token& t = peek();
    if (t.kind == Tok::RParen) throw ParseError("unbalanced parentheses", t.pos);
    if (t.kind != Tok::End) throw ParseError("unexpected token", t.pos);
  }

  bool peek_op(Op a, Op b) const {
    return peek().kind == Tok::Op && (peek().op == a || peek().op == b);
  }

  Expr expr() {
    Expr acc = term();
    while (peek_op(Op::Add, Op::Sub)) {
      Op op = next().op;
      acc = Expr::node(op, std::move(acc), term());
    }
    return acc;
  }

  Expr term() {
    Expr acc = factor();
    while (peek_op(Op::Mul, Op::Div)) {
      Op op = next().op;
      acc = Expr::node(op, std::move(acc), factor());
    }
    return acc;
  }

  Expr literal(std::int64_t v) {
    Expr c = Expr::constant(v);
    // Implicit coefficient: "2x" and "2(x+1)".
    if (peek().kind == Tok::Var) {
      next();
      return Expr::node(Op::Mul, std::move(c), Expr::var());
    }
    if (peek().kind == Tok::LParen) return Expr::node(Op::Mul, std::move(c), factor());
    return c;
  }

  Expr factor() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::Int: return literal(t.value);
      case Tok::Var: return Expr::var();
      case Tok::LParen: {
        Expr inner = expr();
        const Token& close = next();
        if (close.kind != Tok::RParen) throw ParseError("unbalanced parentheses", close.pos);
        return inner;
      }
      case Tok::Op:
        if (t.op == Op::Sub && peek().kind == Tok::Int) {
          std::int64_t v = next().value;
          return literal(-v);
        }
        throw ParseError("unexpected operator", t.pos);
      case Tok::RParen: throw ParseError("unbalanced parentheses", t.pos);
      case Tok::End: throw ParseError("unexpected end of input", t.pos);
    }
    throw ParseError("malformed token", t.pos);
  }

  std::vector<Token> toks_;
  std::size_t k_ = 0;
};

}  // namespace

std::string to_prefix(const Expr& e) {
  std::string out;
  write_prefix(e, out);
  return out;
}

std::string to_prefix(const Equation& e) { return to_prefix(e.tree()); }

Expr parse_prefix_expr(std::string_view text) { return PrefixParser(text).parse_all(); }

Equation parse_prefix(std::string_view text) {
  Expr e = parse_prefix_expr(text);
  if (!e.is_op(Op::Eq)) throw ParseError("missing root '='", 0);
  if (e.left().has_equality() || e.right().has_equality()) throw ParseError("nested '='", 0);
  return trusted_equation(std::move(e));
}

std::string to_infix(const Expr& e) {
  std::string out;
  write_infix(e, 0, false, out);
  return out;
}

std::string to_infix(const Equation& e) { return to_infix(e.lhs()) + " = " + to_infix(e.rhs()); }

Expr parse_infix_expr(std::string_view text) { return InfixParser(text).parse_expression_only(); }

Equation parse_infix(std::string_view text) { return InfixParser(text).parse_equation(); }

Equation parse_equation(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  std::size_t j = i + 1;
  while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
  if (i < text.size() && text[i] == '(' && j < text.size() && text[j] == '=') return parse_prefix(text);
  return parse_infix(text);
}

// ---- structure ---------------------------------------------------------------

Outcome<Expr> try_subtree_at(const Expr& root, std::size_t index) {
  if (index >= root.size()) return Fault{FaultCode::IndexOutOfRange, ""};
  const Expr* cur = &root;
  while (index != 0) {
    std::size_t left_size = cur->left().size();
    if (index <= left_size) {
      index -= 1;
      cur = &cur->left();
    } else {
      index -= 1 + left_size;
      cur = &cur->right();
    }
  }
  return *cur;
}

namespace {

Expr rebuild(const Expr& node, std::size_t index, const Expr& replacement) {
  if (index == 0) return replacement;
  std::size_t left_size = node.left().size();
  if (index <= left_size) {
    return Expr::node(node.op(), rebuild(node.left(), index - 1, replacement), node.right());
  }
  return Expr::node(node.op(), node.left(), rebuild(node.right(), index - 1 - left_size, replacement));
}

}  // namespace

Outcome<Expr> try_replace_subtree(const Expr& root, std::size_t index, const Expr& replacement) {
  if (index >= root.size()) return Fault{FaultCode::IndexOutOfRange, ""};
  return rebuild(root, index, replacement);
}

Expr subtree_at(const Equation& e, SubtreeIndex index) {
  auto r = try_subtree_at(e.tree(), index.value);
  if (!r) {
    throw IndexError("subtree index " + std::to_string(index.value) + " out of range for " +
                     std::to_string(e.size()) + " nodes");
  }
  return *r;
}

Equation replace_subtree(const Equation& e, SubtreeIndex index, const Expr& replacement) {
  if (index.value >= e.size()) {
    throw IndexError("subtree index " + std::to_string(index.value) + " out of range for " +
                     std::to_string(e.size()) + " nodes");
  }
  if (replacement.has_equality()) throw ValidationError("replacement contains '='");
  if (index.value == 0) throw ValidationError("cannot replace the '=' root");
  return trusted_equation(rebuild(e.tree(), index.value, replacement));
}

// ---- numeric -------------------------------------------------------------------

std::optional<Rational> try_eval_at(const Expr& e, const Rational& x) noexcept {
  switch (e.kind()) {
    case Expr::Kind::Const: return Rational(e.value());
    case Expr::Kind::Var: return x;
    case Expr::Kind::Node: break;
  }
  auto l = try_eval_at(e.left(), x);
  if (!l) return std::nullopt;
  auto r = try_eval_at(e.right(), x);
  if (!r) return std::nullopt;
  switch (e.op()) {
    case Op::Add: return Rational::try_add(*l, *r);
    case Op::Sub: return Rational::try_sub(*l, *r);
    case Op::Mul: return Rational::try_mul(*l, *r);
    case Op::Div: return Rational::try_div(*l, *r);
    case Op::Eq: return std::nullopt;
  }
  return std::nullopt;
}

Rational eval_at(const Expr& e, const Rational& x) {
  if (e.has_equality()) throw ValidationError("cannot evaluate a tree containing '='");
  switch (e.kind()) {
    case Expr::Kind::Const: return Rational(e.value());
    case Expr::Kind::Var: return x;
    case Expr::Kind::Node: break;
  }
  Rational l = eval_at(e.left(), x);
  Rational r = eval_at(e.right(), x);
  switch (e.op()) {
    case Op::Add: return l + r;
    case Op::Sub: return l - r;
    case Op::Mul: return l * r;
    case Op::Div:
      if (r.is_zero()) throw ArithmeticError("division by zero at x = " + x.str());
      return l / r;
    case Op::Eq: break;
  }
  throw ValidationError("cannot evaluate '='");
}

std::optional<Rational> as_rational_constant(const Expr& e) noexcept {
  if (e.is_const()) return Rational(e.value());
  if (e.is_op(Op::Div) && e.left().is_const() && e.right().is_const()) {
    std::int64_t p = e.left().value();
    std::int64_t q = e.right().value();
    if (q > 1 && std::gcd(p, q) == 1) return Rational::try_make(p, q);
  }
  return std::nullopt;
}

Expr rational_expr(const Rational& r) {
  if (r.is_integer()) return Expr::constant(r.num());
  return Expr::node(Op::Div, Expr::constant(r.num()), Expr::constant(r.den()));
}

std::optional<Rational> check_solved(const Equation& e) noexcept {
  if (e.lhs().is_var()) return as_rational_constant(e.rhs());
  if (e.rhs().is_var()) return as_rational_constant(e.lhs());
  return std::nullopt;
}

}  // namespace mathsynth
