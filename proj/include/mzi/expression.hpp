#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace mzi {

/// A real-valued circuit parameter together with the source text it was
/// written as. Equality is by value only; the text exists so that
/// `t=sqrt(1/3)` or `phi=pi` survive a parse/serialize round trip.
struct RealExpr {
  double value = 0.0;
  std::string text;

  RealExpr() = default;
  RealExpr(double v) : value(v) {}  // NOLINT(google-explicit-constructor)
  RealExpr(double v, std::string t) : value(v), text(std::move(t)) {}

  bool operator==(const RealExpr& other) const { return value == other.value; }
};

/// Shortest decimal text that reads back to exactly `v`.
inline std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_real: conversion failed");
  return std::string(buf, end);
}

inline std::string expr_text(const RealExpr& e) {
  return e.text.empty() ? format_real(e.value) : e.text;
}

class ExpressionError : public std::runtime_error {
 public:
  ExpressionError(std::size_t offset, const std::string& what)
      : std::runtime_error(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

namespace detail {

// Recursive-descent evaluator over a character range:
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := ('-'|'+') unary | primary
//   primary := NUMBER | "pi" | "sqrt" '(' expr ')' | '(' expr ')'
// Parsing stops at the first character that cannot continue an expression;
// the caller decides whether trailing input is legal.
class ExprReader {
 public:
  explicit ExprReader(std::string_view src, std::size_t pos = 0) : src_(src), pos_(pos) {}

  double parse() {
    skip_ws();
    start_ = pos_;
    double v = expr();
    return v;
  }

  std::size_t position() const { return pos_; }

  /// Canonical text: the consumed characters with whitespace removed.
  std::string canonical() const {
    std::string out;
    for (std::size_t i = start_; i < pos_; ++i)
      if (src_[i] != ' ' && src_[i] != '\t') out.push_back(src_[i]);
    return out;
  }

 private:
  std::string_view src_;
  std::size_t pos_;
  std::size_t start_ = 0;
  int depth_ = 0;

  static constexpr int kMaxDepth = 256;

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  double expr() {
    double v = term();
    for (;;) {
      if (peek('+')) {
        ++pos_;
        v += term();
      } else if (peek('-')) {
        ++pos_;
        v -= term();
      } else {
        return v;
      }
    }
  }

  double term() {
    double v = unary();
    for (;;) {
      if (peek('*')) {
        ++pos_;
        v *= unary();
      } else if (peek('/')) {
        std::size_t at = pos_++;
        double d = unary();
        if (d == 0.0) throw ExpressionError(at, "division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }

  double unary() {
    struct DepthGuard {
      int& d;
      ~DepthGuard() { --d; }
    } guard{++depth_};
    if (depth_ > kMaxDepth) throw ExpressionError(pos_, "expression nested too deeply");
    if (peek('-')) {
      ++pos_;
      return -unary();
    }
    if (peek('+')) {
      ++pos_;
      return unary();
    }
    return primary();
  }

  double primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ExpressionError(pos_, "expected a number");
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      double v = expr();
      if (!peek(')')) throw ExpressionError(pos_, "expected ')'");
      ++pos_;
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t begin = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      std::string_view word = src_.substr(begin, pos_ - begin);
      if (word == "pi") return std::numbers::pi;
      if (word == "sqrt") {
        if (!peek('(')) throw ExpressionError(pos_, "expected '(' after sqrt");
        ++pos_;
        double v = expr();
        if (!peek(')')) throw ExpressionError(pos_, "expected ')'");
        ++pos_;
        if (v < 0.0) throw ExpressionError(begin, "sqrt of a negative value");
        return std::sqrt(v);
      }
      throw ExpressionError(begin, "unknown identifier '" + std::string(word) + "' in expression");
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    throw ExpressionError(pos_, std::string("unexpected character '") + c + "' in expression");
  }

  double number() {
    std::size_t begin = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t n = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) throw ExpressionError(begin, "malformed number");
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) {
        pos_ = save;
        throw ExpressionError(save, "malformed exponent");
      }
    }
    double v = 0.0;
    auto [p, ec] = std::from_chars(src_.data() + begin, src_.data() + pos_, v);
    if (ec != std::errc{} || p != src_.data() + pos_)
      throw ExpressionError(begin, "number out of range");
    return v;
  }
};

}  // namespace detail

/// Evaluates a complete expression such as "pi/2" or "sqrt(1/3)".
inline RealExpr evaluate_expression(std::string_view text) {
  detail::ExprReader reader(text);
  double v = reader.parse();
  std::size_t pos = reader.position();
  while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  if (pos != text.size()) throw ExpressionError(pos, "unexpected trailing input");
  if (!std::isfinite(v)) throw ExpressionError(0, "expression is not finite");
  return {v, reader.canonical()};
}

}  // namespace mzi
