#pragma once

// Small arithmetic expression language for coefficient descriptions.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'x' | 't' | 'pi' | 'e' | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Functions: sin cos tan exp log sqrt abs tanh atan (one argument),
// min max (two), step(s) = [s >= 0], sign(s).

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hjft/errors.hpp"

namespace hjft {

class Expression {
 public:
  Expression() : Expression(parse("0")) {}

  static Expression parse(const std::string& text) {
    Parser ps{text, 0};
    auto root = ps.expr();
    ps.skip();
    if (ps.pos != text.size()) ps.fail("unexpected trailing input");
    return Expression(text, std::move(root));
  }

  static Expression constant(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return parse(os.str());
  }

  /// Evaluates with both `x` and `t` bound to `s`.
  double operator()(double s) const {
    const double v = root_->eval(s);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "expression '" << text_ << "' is not finite at " << s;
      throw SpecError(os.str());
    }
    return v;
  }

  const std::string& text() const { return text_; }

 private:
  struct Node {
    enum Op { num, var, add, sub, mul, div, pow, neg, call } op = num;
    double value = 0.0;
    std::string fn;
    std::vector<std::shared_ptr<const Node>> args;

    double eval(double s) const {
      switch (op) {
        case num: return value;
        case var: return s;
        case add: return args[0]->eval(s) + args[1]->eval(s);
        case sub: return args[0]->eval(s) - args[1]->eval(s);
        case mul: return args[0]->eval(s) * args[1]->eval(s);
        case div: return args[0]->eval(s) / args[1]->eval(s);
        case pow: return std::pow(args[0]->eval(s), args[1]->eval(s));
        case neg: return -args[0]->eval(s);
        case call: break;
      }
      const double u = args[0]->eval(s);
      if (fn == "sin") return std::sin(u);
      if (fn == "cos") return std::cos(u);
      if (fn == "tan") return std::tan(u);
      if (fn == "exp") return std::exp(u);
      if (fn == "log") return std::log(u);
      if (fn == "sqrt") return std::sqrt(u);
      if (fn == "abs") return std::abs(u);
      if (fn == "tanh") return std::tanh(u);
      if (fn == "atan") return std::atan(u);
      if (fn == "step") return u >= 0.0 ? 1.0 : 0.0;
      if (fn == "sign") return u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
      if (fn == "min") return std::min(u, args[1]->eval(s));
      return std::max(u, args[1]->eval(s));  // "max"
    }
  };
  using NodePtr = std::shared_ptr<const Node>;

  static int arity(const std::string& fn) {
    static const char* unary[] = {"sin", "cos", "tan", "exp", "log", "sqrt", "abs", "tanh", "atan", "step", "sign"};
    for (const char* u : unary) {
      if (fn == u) return 1;
    }
    if (fn == "min" || fn == "max") return 2;
    return -1;
  }

  static NodePtr make(Node::Op op, std::vector<NodePtr> args, double v = 0.0, std::string fn = {}) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = v;
    n->fn = std::move(fn);
    n->args = std::move(args);
    return n;
  }

  struct Parser {
    const std::string& s;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& what) const {
      std::ostringstream os;
      os << "expression '" << s << "': " << what << " at position " << pos;
      throw SpecError(os.str());
    }
    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
      skip();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    NodePtr expr() {
      auto lhs = term();
      for (;;) {
        if (eat('+')) {
          lhs = make(Node::add, {lhs, term()});
        } else if (eat('-')) {
          lhs = make(Node::sub, {lhs, term()});
        } else {
          return lhs;
        }
      }
    }
    NodePtr term() {
      auto lhs = unary();
      for (;;) {
        if (eat('*')) {
          lhs = make(Node::mul, {lhs, unary()});
        } else if (eat('/')) {
          lhs = make(Node::div, {lhs, unary()});
        } else {
          return lhs;
        }
      }
    }
    NodePtr unary() {
      if (eat('-')) return make(Node::neg, {unary()});
      if (eat('+')) return unary();
      return power();
    }
    NodePtr power() {
      auto base = primary();
      if (eat('^')) return make(Node::pow, {base, unary()});
      return base;
    }
    NodePtr primary() {
      skip();
      if (pos >= s.size()) fail("unexpected end of input");
      if (eat('(')) {
        auto e = expr();
        if (!eat(')')) fail("expected ')'");
        return e;
      }
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const char* begin = s.c_str() + pos;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos += static_cast<std::size_t>(end - begin);
        return make(Node::num, {}, v);
      }
      if (!std::isalpha(static_cast<unsigned char>(c))) fail(std::string("unexpected character '") + c + "'");
      const std::size_t start = pos;
      while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
      const std::string name = s.substr(start, pos - start);
      if (eat('(')) {
        const int n = arity(name);
        if (n < 0) fail("unknown function '" + name + "'");
        std::vector<NodePtr> args{expr()};
        while (eat(',')) args.push_back(expr());
        if (!eat(')')) fail("expected ')'");
        if (static_cast<int>(args.size()) != n) fail("wrong argument count for '" + name + "'");
        return make(Node::call, std::move(args), 0.0, name);
      }
      if (name == "x" || name == "t") return make(Node::var, {});
      if (name == "pi") return make(Node::num, {}, std::numbers::pi);
      if (name == "e") return make(Node::num, {}, std::numbers::e);
      pos = start;
      fail("unknown identifier '" + name + "'");
    }
  };

  Expression(std::string text, NodePtr root) : text_(std::move(text)), root_(std::move(root)) {}

  std::string text_;
  NodePtr root_;
};

}  // namespace hjft
