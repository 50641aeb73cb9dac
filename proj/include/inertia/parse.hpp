#pragma once

#include <cctype>
#include <cstdlib>
#include <string>

#include "inertia/expr.hpp"

namespace inertia {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, std::size_t pos)
      : std::runtime_error(msg + " at position " + std::to_string(pos)), position_(pos) {}
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

namespace detail {

// Recursive descent with one function per precedence level:
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := ('-'|'+') unary | power
//   power := primary ('^' unary)?
class Parser {
public:
  explicit Parser(const std::string& text) : s_(text) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (;;) {
      if (accept('+')) lhs = lhs + parse_term();
      else if (accept('-')) lhs = lhs - parse_term();
      else return lhs;
    }
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) lhs = lhs * parse_unary();
      else if (accept('/')) lhs = lhs / parse_unary();
      else return lhs;
    }
  }

  Expr parse_unary() {
    if (accept('-')) return neg(parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) {
      Expr e = parse_unary();
      return pow(base, e);
    }
    return base;
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      skip_ws();
      bool call = pos_ < s_.size() && s_[pos_] == '(';
      if (call) {
        if (id != "ln" && id != "exp") {
          pos_ = start;
          fail("unknown function '" + id + "'");
        }
        ++pos_;
        Expr arg = parse_expr();
        expect(')');
        return id == "ln" ? ln(arg) : exp(arg);
      }
      if (id == "rho") return rho();
      if (id == "rhodot") return rhodot();
      if (id == "ln" || id == "exp") {
        pos_ = start;
        fail("function '" + id + "' used without arguments");
      }
      return param(id);
    }
    fail(std::string("unexpected '") + c + "'");
  }

  // Decimal literals are kept exact (digits over a power of ten) when they fit.
  Expr parse_number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    std::string lit = s_.substr(start, pos_ - start);
    if (lit == ".") {
      pos_ = start;
      fail("malformed number");
    }
    double v = std::strtod(lit.c_str(), nullptr);
    if (auto r = exact_decimal(lit)) return constant(*r);
    return constant(v);
  }

  static std::optional<Rational> exact_decimal(const std::string& lit) {
    std::string mant = lit;
    long e10 = 0;
    auto epos = lit.find_first_of("eE");
    if (epos != std::string::npos) {
      mant = lit.substr(0, epos);
      e10 = std::strtol(lit.c_str() + epos + 1, nullptr, 10);
    }
    auto dot = mant.find('.');
    std::string digits = mant;
    if (dot != std::string::npos) {
      digits = mant.substr(0, dot) + mant.substr(dot + 1);
      e10 -= static_cast<long>(mant.size() - dot - 1);
    }
    if (digits.empty() || digits.size() > 17 || std::labs(e10) > 18) return std::nullopt;
    auto n = static_cast<std::int64_t>(std::strtoll(digits.c_str(), nullptr, 10));
    auto ten = Rational::checked_pow(Rational(10), e10);
    if (!ten) return std::nullopt;
    return Rational::checked_mul(Rational(n), *ten);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse(const std::string& text) {
  detail::Parser p(text);
  return p.parse_all();
}

}  // namespace inertia
