#pragma once

// Line-oriented circuit description language (.mzi).
//
//   source LABEL
//   detect LABEL
//   tags NAME...                      (optional; mirror order in the tag vector)
//   bs NAME in=(LABEL?,LABEL?) out=(LABEL,LABEL) t=EXPR
//   mirror NAME path=LABEL freq=EXPR amp=EXPR [phase=EXPR]
//   phase path=LABEL phi=EXPR
//   block path=LABEL
//   discard LABEL
//
// '#' starts a comment. Key/value pairs may appear in any order. EXPR accepts
// decimals, pi, sqrt(), parentheses and + - * /.

#include <array>
#include <cctype>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mzi/circuit.hpp"
#include "mzi/expression.hpp"

namespace mzi {

struct ParseResult {
  std::optional<Circuit> circuit;
  /// Errors when parsing failed; otherwise any validator warnings.
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return circuit.has_value(); }
};

namespace detail {

inline constexpr std::array<std::string_view, 8> kKeywords = {"source", "detect", "tags",  "bs",
                                                              "mirror", "phase",  "block", "discard"};

inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

struct SyntaxError {
  std::size_t offset;
  std::string message;
};

// Cursor over a single line with comments already stripped.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  std::size_t pos() const { return pos_; }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) throw SyntaxError{pos_, std::string("expected '") + c + "'" + found()};
  }

  bool peek_ident() {
    skip_ws();
    return pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_');
  }

  std::string ident(const char* what) {
    if (!peek_ident()) throw SyntaxError{pos_, std::string("expected ") + what + found()};
    std::size_t begin = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    return std::string(text_.substr(begin, pos_ - begin));
  }

  RealExpr expression() {
    skip_ws();
    ExprReader reader(text_, pos_);
    try {
      double v = reader.parse();
      pos_ = reader.position();
      if (!std::isfinite(v)) throw SyntaxError{pos_, "expression is not finite"};
      return {v, reader.canonical()};
    } catch (const ExpressionError& e) {
      throw SyntaxError{e.offset(), e.what()};
    }
  }

  std::string found() {
    skip_ws();
    if (pos_ >= text_.size()) return ", found end of line";
    return std::string(", found '") + text_[pos_] + "'";
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

enum class ValueKind { label, ports, expr };

struct KeySpec {
  std::string_view key;
  ValueKind kind;
  bool required;
};

struct KeyValues {
  std::map<std::string, std::string> labels;
  std::map<std::string, std::pair<std::optional<std::string>, std::optional<std::string>>> ports;
  std::map<std::string, RealExpr> exprs;
};

inline KeyValues read_key_values(LineReader& in, std::initializer_list<KeySpec> specs, std::size_t stmt_offset,
                                 std::string_view stmt) {
  KeyValues kv;
  std::map<std::string, bool> seen;
  while (!in.at_end()) {
    std::size_t key_at = in.pos();
    std::string key = in.ident("key");
    const KeySpec* spec = nullptr;
    for (const auto& s : specs)
      if (s.key == key) spec = &s;
    if (!spec) throw SyntaxError{key_at, "unknown key '" + key + "' for '" + std::string(stmt) + "'"};
    if (seen[key]) throw SyntaxError{key_at, "duplicate key '" + key + "'"};
    seen[key] = true;
    in.expect('=');
    switch (spec->kind) {
      case ValueKind::label:
        kv.labels[key] = in.ident("label");
        break;
      case ValueKind::ports: {
        in.expect('(');
        std::optional<std::string> first, second;
        if (in.peek_ident()) first = in.ident("label");
        in.expect(',');
        if (in.peek_ident()) second = in.ident("label");
        in.expect(')');
        kv.ports[key] = {first, second};
        break;
      }
      case ValueKind::expr:
        kv.exprs[key] = in.expression();
        break;
    }
  }
  for (const auto& s : specs)
    if (s.required && !seen[std::string(s.key)])
      throw SyntaxError{stmt_offset, "'" + std::string(stmt) + "' is missing '" + std::string(s.key) + "='"};
  return kv;
}

}  // namespace detail

/// Parses .mzi text. Succeeds with a validated Circuit (possibly with
/// warnings) or fails with at least one positioned error.
inline ParseResult parse(std::string_view text) {
  ParseResult result;
  auto& diags = result.diagnostics;
  Circuit circuit;
  bool seen_tags = false;
  std::vector<std::string> placement_order;
  std::vector<std::size_t> mirror_elements;

  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(begin, end - begin);
    ++line_no;
    const int line = static_cast<int>(line_no);
    auto col_of = [](std::size_t offset) { return static_cast<int>(offset) + 1; };

    // Strip comment and a trailing CR; reject characters outside the language.
    std::string_view body = raw;
    if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    if (!body.empty() && body.back() == '\r' && body.size() == raw.size()) body.remove_suffix(1);
    bool lexical_ok = true;
    for (std::size_t i = 0; i < body.size(); ++i) {
      unsigned char c = static_cast<unsigned char>(body[i]);
      bool allowed = std::isalnum(c) || c == '_' || c == ' ' || c == '\t' || c == '=' || c == '(' || c == ')' ||
                     c == ',' || c == '.' || c == '+' || c == '-' || c == '*' || c == '/';
      if (!allowed) {
        char hex[8];
        std::snprintf(hex, sizeof(hex), "0x%02X", c);
        std::string shown = (c >= 0x20 && c < 0x7f) ? std::string("'") + static_cast<char>(c) + "'" : hex;
        diags.push_back({Severity::error, line, col_of(i), "unexpected character " + shown});
        lexical_ok = false;
        break;
      }
    }

    if (lexical_ok) {
      detail::LineReader in(body);
      try {
        if (!in.at_end()) {
          const std::size_t kw_at = in.pos();
          const SourceLoc loc{line, col_of(kw_at)};
          std::string kw = in.ident("statement keyword");
          if (kw == "source" || kw == "detect") {
            std::string label = in.ident("label");
            if (!in.at_end()) throw detail::SyntaxError{in.pos(), "unexpected input after label"};
            std::string& slot = kw == "source" ? circuit.source : circuit.detector;
            if (!slot.empty()) throw detail::SyntaxError{kw_at, "duplicate '" + kw + "' statement"};
            slot = label;
            (kw == "source" ? circuit.source_loc : circuit.detector_loc) = loc;
          } else if (kw == "tags") {
            if (seen_tags) throw detail::SyntaxError{kw_at, "duplicate 'tags' statement"};
            seen_tags = true;
            circuit.tags_loc = loc;
            do {
              circuit.tag_order.push_back(in.ident("mirror name"));
            } while (!in.at_end());
          } else if (kw == "bs") {
            BeamSplitter bs;
            bs.name = in.ident("beam splitter name");
            auto kv = detail::read_key_values(in,
                                              {{"in", detail::ValueKind::ports, true},
                                               {"out", detail::ValueKind::ports, true},
                                               {"t", detail::ValueKind::expr, true}},
                                              kw_at, kw);
            std::tie(bs.in_first, bs.in_second) = kv.ports["in"];
            auto [o1, o2] = kv.ports["out"];
            if (!o1 || !o2) throw detail::SyntaxError{kw_at, "beam splitter outputs must both be named"};
            bs.out_first = *o1;
            bs.out_second = *o2;
            bs.transmission = kv.exprs["t"];
            circuit.elements.emplace_back(std::move(bs));
            circuit.element_locs.push_back(loc);
          } else if (kw == "mirror") {
            Mirror m;
            m.name = in.ident("mirror name");
            auto kv = detail::read_key_values(in,
                                              {{"path", detail::ValueKind::label, true},
                                               {"freq", detail::ValueKind::expr, true},
                                               {"amp", detail::ValueKind::expr, true},
                                               {"phase", detail::ValueKind::expr, false}},
                                              kw_at, kw);
            m.path = kv.labels["path"];
            m.frequency = kv.exprs["freq"];
            m.amplitude = kv.exprs["amp"];
            if (kv.exprs.count("phase")) m.phase = kv.exprs["phase"];
            placement_order.push_back(m.name);
            mirror_elements.push_back(circuit.elements.size());
            circuit.elements.emplace_back(std::move(m));
            circuit.element_locs.push_back(loc);
          } else if (kw == "phase") {
            auto kv = detail::read_key_values(
                in, {{"path", detail::ValueKind::label, true}, {"phi", detail::ValueKind::expr, true}}, kw_at, kw);
            circuit.elements.emplace_back(PhaseShift{kv.labels["path"], kv.exprs["phi"]});
            circuit.element_locs.push_back(loc);
          } else if (kw == "block") {
            auto kv = detail::read_key_values(in, {{"path", detail::ValueKind::label, true}}, kw_at, kw);
            circuit.elements.emplace_back(Block{kv.labels["path"]});
            circuit.element_locs.push_back(loc);
          } else if (kw == "discard") {
            std::string label = in.ident("label");
            if (!in.at_end()) throw detail::SyntaxError{in.pos(), "unexpected input after label"};
            circuit.elements.emplace_back(Discard{label});
            circuit.element_locs.push_back(loc);
          } else {
            std::string msg = "unknown statement '" + kw + "'";
            for (auto known : detail::kKeywords)
              if (detail::edit_distance(kw, known) <= 2) {
                msg += " (did you mean '" + std::string(known) + "'?)";
                break;
              }
            throw detail::SyntaxError{kw_at, msg};
          }
        }
      } catch (const detail::SyntaxError& e) {
        diags.push_back({Severity::error, line, col_of(std::min(e.offset, body.size())), e.message});
      }
    }
    if (end == text.size()) break;
    begin = end + 1;
  }

  if (has_errors(diags)) return result;

  if (!seen_tags) circuit.tag_order = placement_order;
  for (std::size_t at : mirror_elements) {
    auto& m = std::get<Mirror>(circuit.elements[at]);
    auto pos = std::find(circuit.tag_order.begin(), circuit.tag_order.end(), m.name);
    m.index = static_cast<std::size_t>(pos - circuit.tag_order.begin());
  }

  auto checks = validate(circuit);
  diags.insert(diags.end(), checks.begin(), checks.end());
  // Positionless validator messages point at the first line.
  for (auto& d : diags) {
    if (d.line == 0) {
      d.line = 1;
      d.column = 1;
    }
  }
  if (!has_errors(diags)) result.circuit = std::move(circuit);
  return result;
}

/// Canonical text: source first, optional tags line, elements in order,
/// detect last. Always LF line endings.
inline std::string serialize(const Circuit& circuit) {
  std::string out = "source " + circuit.source + "\n";
  std::vector<std::string> placement;
  for (const auto& el : circuit.elements)
    if (const auto* m = std::get_if<Mirror>(&el)) placement.push_back(m->name);
  if (placement != circuit.tag_order) {
    out += "tags";
    for (const auto& name : circuit.tag_order) out += " " + name;
    out += "\n";
  }
  for (const auto& el : circuit.elements) {
    std::visit(
        [&](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, BeamSplitter>) {
            out += "bs " + e.name + " in=(" + e.in_first.value_or("") + "," + e.in_second.value_or("") + ") out=(" +
                   e.out_first + "," + e.out_second + ") t=" + expr_text(e.transmission);
          } else if constexpr (std::is_same_v<T, Mirror>) {
            out += "mirror " + e.name + " path=" + e.path + " freq=" + expr_text(e.frequency) +
                   " amp=" + expr_text(e.amplitude);
            if (e.phase.value != 0.0) out += " phase=" + expr_text(e.phase);
          } else if constexpr (std::is_same_v<T, PhaseShift>) {
            out += "phase path=" + e.path + " phi=" + expr_text(e.phi);
          } else if constexpr (std::is_same_v<T, Block>) {
            out += "block path=" + e.path;
          } else {
            out += "discard " + e.path;
          }
        },
        el);
    out += "\n";
  }
  out += "detect " + circuit.detector + "\n";
  return out;
}

}  // namespace mzi
