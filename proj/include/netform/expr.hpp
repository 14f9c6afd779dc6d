#pragma once

// Small expression language for ambient test fields.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'x'<k> | 'dist:'<i> | 'bump:'<i>','<R>
//            | fn '(' expr (',' expr)* ')' | '(' expr ')'
//   fn      := abs | min | max | sin | cos | exp | sqrt
//
// dist:<i> is the distance to sample point i and bump:<i>,<R> is
// max{0, 1 - d(., p_i) / R}.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "netform/ambient.hpp"
#include "netform/error.hpp"

namespace netform {

class FieldExpr {
 public:
  static FieldExpr parse(std::string_view text) {
    Parser p{text, 0};
    auto root = p.expr();
    p.skip_space();
    if (p.pos != text.size()) p.fail("unexpected trailing input");
    FieldExpr e;
    e.text_ = std::string(text);
    e.root_ = std::move(root);
    return e;
  }

  const std::string& text() const { return text_; }

  double at(const AmbientSpace& space, std::size_t i) const { return eval(*root_, space, i); }

  ScalarField evaluate(const AmbientSpace& space) const {
    std::vector<double> values(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) values[i] = at(space, i);
    return ScalarField(std::move(values));
  }

 private:
  enum class Op { number, coord, dist, bump, neg, add, sub, mul, div, pow, call };

  struct Node {
    Op op = Op::number;
    double value = 0.0;
    std::size_t index = 0;
    std::string fn;
    std::vector<std::shared_ptr<const Node>> args;
  };
  using NodePtr = std::shared_ptr<const Node>;

  static NodePtr leaf(Op op, double value = 0.0, std::size_t index = 0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = value;
    n->index = index;
    return n;
  }
  static NodePtr binary(Op op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = {std::move(a), std::move(b)};
    return n;
  }

  struct Parser {
    std::string_view s;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& what) const {
      throw InputError("field expression '" + std::string(s) + "': " + what + " at offset " +
                       std::to_string(pos));
    }
    void skip_space() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
      skip_space();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    double number() {
      skip_space();
      const std::string rest(s.substr(pos));
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(rest, &used);
      } catch (const std::exception&) {
        fail("expected a number");
      }
      pos += used;
      return v;
    }
    std::size_t index() {
      skip_space();
      const std::size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos == start) fail("expected an index");
      return std::stoul(std::string(s.substr(start, pos - start)));
    }
    std::string word() {
      std::size_t start = pos;
      while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
      return std::string(s.substr(start, pos - start));
    }

    NodePtr expr() {
      auto lhs = term();
      while (true) {
        if (eat('+')) {
          lhs = binary(Op::add, lhs, term());
        } else if (eat('-')) {
          lhs = binary(Op::sub, lhs, term());
        } else {
          return lhs;
        }
      }
    }
    NodePtr term() {
      auto lhs = unary();
      while (true) {
        if (eat('*')) {
          lhs = binary(Op::mul, lhs, unary());
        } else if (eat('/')) {
          lhs = binary(Op::div, lhs, unary());
        } else {
          return lhs;
        }
      }
    }
    NodePtr unary() {
      if (eat('-')) {
        auto n = std::make_shared<Node>();
        n->op = Op::neg;
        n->args = {unary()};
        return n;
      }
      return power();
    }
    NodePtr power() {
      auto base = primary();
      if (eat('^')) return binary(Op::pow, base, unary());
      return base;
    }
    NodePtr primary() {
      skip_space();
      if (pos >= s.size()) fail("unexpected end of input");
      if (eat('(')) {
        auto inner = expr();
        if (!eat(')')) fail("expected ')'");
        return inner;
      }
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return leaf(Op::number, number());
      if (c == 'x') {
        ++pos;
        return leaf(Op::coord, 0.0, index());
      }
      const std::string w = word();
      if (w == "dist" && eat(':')) return leaf(Op::dist, 0.0, index());
      if (w == "bump" && eat(':')) {
        const std::size_t i = index();
        if (!eat(',')) fail("bump needs <index>,<radius>");
        const double radius = number();
        if (!(radius > 0.0)) fail("bump radius must be positive");
        return leaf(Op::bump, radius, i);
      }
      if (w == "abs" || w == "min" || w == "max" || w == "sin" || w == "cos" || w == "exp" || w == "sqrt") {
        if (!eat('(')) fail("expected '(' after " + w);
        auto n = std::make_shared<Node>();
        n->op = Op::call;
        n->fn = w;
        n->args.push_back(expr());
        while (eat(',')) n->args.push_back(expr());
        if (!eat(')')) fail("expected ')'");
        const std::size_t want = (w == "min" || w == "max") ? 2 : 1;
        if (n->args.size() != want) fail(w + " takes " + std::to_string(want) + " argument(s)");
        return n;
      }
      if (w == "pi") return leaf(Op::number, 3.14159265358979323846);
      fail("unknown token '" + w + "'");
    }
  };

  static double eval(const Node& n, const AmbientSpace& space, std::size_t i) {
    switch (n.op) {
      case Op::number: return n.value;
      case Op::coord: return space.coordinate(i, n.index);
      case Op::dist: return space.distance(i, n.index);
      case Op::bump: return std::max(0.0, 1.0 - space.distance(i, n.index) / n.value);
      case Op::neg: return -eval(*n.args[0], space, i);
      case Op::add: return eval(*n.args[0], space, i) + eval(*n.args[1], space, i);
      case Op::sub: return eval(*n.args[0], space, i) - eval(*n.args[1], space, i);
      case Op::mul: return eval(*n.args[0], space, i) * eval(*n.args[1], space, i);
      case Op::div: return eval(*n.args[0], space, i) / eval(*n.args[1], space, i);
      case Op::pow: {
        const double b = eval(*n.args[0], space, i);
        const double e = eval(*n.args[1], space, i);
        if (e == 2.0) return b * b;
        return std::pow(b, e);
      }
      case Op::call: {
        const double a = eval(*n.args[0], space, i);
        if (n.fn == "abs") return std::abs(a);
        if (n.fn == "sin") return std::sin(a);
        if (n.fn == "cos") return std::cos(a);
        if (n.fn == "exp") return std::exp(a);
        if (n.fn == "sqrt") return std::sqrt(a);
        const double b = eval(*n.args[1], space, i);
        return n.fn == "min" ? std::min(a, b) : std::max(a, b);
      }
    }
    return 0.0;
  }

  std::string text_;
  NodePtr root_;
};

/// Parses and evaluates in one step.
inline ScalarField evaluate_field(const AmbientSpace& space, std::string_view text) {
  return FieldExpr::parse(text).evaluate(space);
}

}  // namespace netform
