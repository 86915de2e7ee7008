#include "homog/expression.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace homog {

namespace {

using Fn = std::function<double(double, double)>;

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  Fn parse() {
    Fn e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression error at position " +
                                std::to_string(pos_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Fn expr() {
    Fn lhs = term();
    for (;;) {
      if (consume('+')) {
        Fn rhs = term();
        lhs = [lhs, rhs](double a, double b) { return lhs(a, b) + rhs(a, b); };
      } else if (consume('-')) {
        Fn rhs = term();
        lhs = [lhs, rhs](double a, double b) { return lhs(a, b) - rhs(a, b); };
      } else {
        return lhs;
      }
    }
  }

  Fn term() {
    Fn lhs = unary();
    for (;;) {
      if (consume('*')) {
        Fn rhs = unary();
        lhs = [lhs, rhs](double a, double b) { return lhs(a, b) * rhs(a, b); };
      } else if (consume('/')) {
        Fn rhs = unary();
        lhs = [lhs, rhs](double a, double b) { return lhs(a, b) / rhs(a, b); };
      } else {
        return lhs;
      }
    }
  }

  Fn unary() {
    if (consume('-')) {
      Fn inner = unary();
      return [inner](double a, double b) { return -inner(a, b); };
    }
    if (consume('+')) return unary();
    return power();
  }

  Fn power() {
    Fn base = atom();
    if (consume('^')) {
      Fn exponent = unary();
      return [base, exponent](double a, double b) {
        return std::pow(base(a, b), exponent(a, b));
      };
    }
    return base;
  }

  Fn atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Fn inner = expr();
      if (!consume(')')) fail("missing ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  Fn number() {
    size_t end = pos_;
    while (end < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.' ||
            text_[end] == 'e' || text_[end] == 'E' ||
            ((text_[end] == '+' || text_[end] == '-') && end > pos_ &&
             (text_[end - 1] == 'e' || text_[end - 1] == 'E'))))
      ++end;
    double value;
    try {
      value = std::stod(text_.substr(pos_, end - pos_));
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos_ = end;
    return [value](double, double) { return value; };
  }

  Fn identifier() {
    size_t end = pos_;
    while (end < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
      ++end;
    std::string name = text_.substr(pos_, end - pos_);
    pos_ = end;

    if (name == "x1" || name == "y1") return [](double a, double) { return a; };
    if (name == "x2" || name == "y2") return [](double, double b) { return b; };
    if (name == "pi")
      return [](double, double) { return 3.14159265358979323846; };

    if (!consume('(')) fail("unknown identifier '" + name + "'");
    std::vector<Fn> args;
    args.push_back(expr());
    while (consume(',')) args.push_back(expr());
    if (!consume(')')) fail("missing ')' after arguments of " + name);

    auto unary_fn = [&](double (*f)(double)) -> Fn {
      if (args.size() != 1) fail(name + " takes one argument");
      Fn a0 = args[0];
      return [a0, f](double a, double b) { return f(a0(a, b)); };
    };
    auto binary_fn = [&](double (*f)(double, double)) -> Fn {
      if (args.size() != 2) fail(name + " takes two arguments");
      Fn a0 = args[0], a1 = args[1];
      return [a0, a1, f](double a, double b) { return f(a0(a, b), a1(a, b)); };
    };

    if (name == "sin") return unary_fn(std::sin);
    if (name == "cos") return unary_fn(std::cos);
    if (name == "tan") return unary_fn(std::tan);
    if (name == "exp") return unary_fn(std::exp);
    if (name == "log") return unary_fn(std::log);
    if (name == "sqrt") return unary_fn(std::sqrt);
    if (name == "abs") return unary_fn(std::fabs);
    if (name == "tanh") return unary_fn(std::tanh);
    if (name == "min") return binary_fn([](double a, double b) { return std::min(a, b); });
    if (name == "max") return binary_fn([](double a, double b) { return std::max(a, b); });
    if (name == "pow") return binary_fn([](double a, double b) { return std::pow(a, b); });
    fail("unknown function '" + name + "'");
  }

  const std::string& text_;
  size_t pos_ = 0;
};

}  // namespace

std::function<double(double, double)> parse_expression(const std::string& text) {
  return Parser(text).parse();
}

}  // namespace homog
