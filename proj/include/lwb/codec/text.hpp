#pragma once

// Text grammars.
//
//   term     := product
//   product  := atom ('*' atom)*              -- '*' is binary f0, left-assoc
//   atom     := 'x' N | 'f' N [ '(' term (',' term)* ')' ] | '(' term ')'
//   equation := term ('=' | '≈') term
//
//   formula  := conj ('->' formula)?          -- right-assoc
//   conj     := unary ('&' unary)*            -- left-assoc
//   unary    := 'box0' unary | 'box1' unary | '~' unary | 'p' N | 'bot' | 'top'
//             | '(' formula ')'
//
//   frame    := '{' size ':' N ',' edges ':' '[' ( '[' N ',' N ']' ),* ']' '}'
//
// Keys in the frame record may be quoted, so JSON input is accepted too.

#include <cctype>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lwb/codec/formula.hpp"
#include "lwb/codec/frame.hpp"
#include "lwb/codec/term.hpp"
#include "lwb/core/error.hpp"

namespace lwb::codec {

namespace detail {

class Lexer {
 public:
  explicit Lexer(std::string_view text) : s_(text) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }
  bool peek(std::string_view tok) {
    skip_ws();
    return s_.substr(pos_, tok.size()) == tok;
  }
  bool accept(std::string_view tok) {
    if (!peek(tok)) return false;
    pos_ += tok.size();
    return true;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }
  bool peek_digit() {
    skip_ws();
    return pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]));
  }
  std::uint64_t number() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a number");
    return require_u64(Natural(std::string(s_.substr(start, pos_ - start))), "index");
  }
  /// Index glued to a prefix letter, e.g. the 12 in `x12`.
  std::uint64_t glued_number() {
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
      fail("expected an index");
    return number();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at column " + std::to_string(pos_ + 1) + " in '" +
                     std::string(s_) + "'");
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

class TermParser {
 public:
  TermParser(Lexer& lx, Signature& sig, bool infer) : lx_(lx), sig_(sig), infer_(infer) {}

  Term term() {
    Term t = atom();
    while (lx_.accept("*")) {
      Term rhs = atom();
      declare(0, 2);
      t = Term::app(0, {std::move(t), std::move(rhs)});
    }
    return t;
  }

 private:
  Term atom() {
    if (lx_.accept("(")) {
      Term t = term();
      lx_.expect(")");
      return t;
    }
    if (lx_.accept("x")) return Term::var(lx_.glued_number());
    if (lx_.accept("f")) {
      std::uint64_t k = lx_.glued_number();
      std::vector<Term> args;
      if (lx_.accept("(")) {
        if (!lx_.accept(")")) {
          do args.push_back(term());
          while (lx_.accept(","));
          lx_.expect(")");
        }
      }
      declare(k, static_cast<unsigned>(args.size()));
      return Term::app(k, std::move(args));
    }
    lx_.fail("expected a term");
  }

  void declare(std::uint64_t k, unsigned arity) {
    if (sig_.has(k)) {
      if (sig_.arity(k) != arity)
        lx_.fail("f" + std::to_string(k) + " used with arity " + std::to_string(arity) +
                 ", declared " + std::to_string(sig_.arity(k)));
      return;
    }
    if (!infer_) lx_.fail("unknown function symbol f" + std::to_string(k));
    auto [it, inserted] = pending_.emplace(k, arity);
    if (!inserted && it->second != arity)
      lx_.fail("f" + std::to_string(k) + " used with arities " + std::to_string(it->second) +
               " and " + std::to_string(arity));
  }

 public:
  /// Appends inferred symbols. Symbols stay contiguous; unused indices below
  /// the largest one become constants.
  void finish() {
    if (pending_.empty()) return;
    const std::uint64_t top = pending_.rbegin()->first;
    for (std::uint64_t k = sig_.size(); k <= top; ++k) {
      auto it = pending_.find(k);
      sig_.add(it == pending_.end() ? 0 : it->second);
    }
    pending_.clear();
  }

 private:
  std::map<std::uint64_t, unsigned> pending_;

  Lexer& lx_;
  Signature& sig_;
  bool infer_;
};

class FormulaParser {
 public:
  explicit FormulaParser(Lexer& lx) : lx_(lx) {}

  Formula formula() {
    Formula lhs = conj();
    if (lx_.accept("->")) return Formula::implies(std::move(lhs), formula());
    return lhs;
  }

 private:
  Formula conj() {
    Formula f = unary();
    while (lx_.accept("&")) f = Formula::conj(std::move(f), unary());
    return f;
  }

  Formula unary() {
    if (lx_.accept("(")) {
      Formula f = formula();
      lx_.expect(")");
      return f;
    }
    if (lx_.accept("box0")) return Formula::box(0, unary());
    if (lx_.accept("box1")) return Formula::box(1, unary());
    if (lx_.accept("~")) return Formula::neg(unary());
    if (lx_.accept("bot")) return Formula::bottom();
    if (lx_.accept("top")) return Formula::top();
    if (lx_.accept("p")) return Formula::var(lx_.glued_number());
    lx_.fail("expected a formula");
  }

  Lexer& lx_;
};

inline void accept_key(Lexer& lx, std::string_view key) {
  bool quoted = lx.accept("\"");
  lx.expect(key);
  if (quoted) lx.expect("\"");
  lx.expect(":");
}

}  // namespace detail

/// Parses a term. With `infer` set, unseen symbols are appended to `sig`
/// with the arity of their first use; otherwise they are an error.
inline Term parse_term(std::string_view text, Signature& sig, bool infer = true) {
  detail::Lexer lx(text);
  detail::TermParser p(lx, sig, infer);
  Term t = p.term();
  if (!lx.at_end()) lx.fail("trailing input");
  p.finish();
  return t;
}

inline Term parse_term(std::string_view text, const Signature& sig) {
  Signature copy = sig;
  return parse_term(text, copy, false);
}

inline Equation parse_equation(std::string_view text, Signature& sig, bool infer = true) {
  detail::Lexer lx(text);
  detail::TermParser p(lx, sig, infer);
  Term l = p.term();
  if (!lx.accept("=") && !lx.accept("≈")) lx.fail("expected '='");
  Term r = p.term();
  if (!lx.at_end()) lx.fail("trailing input");
  p.finish();
  return {std::move(l), std::move(r)};
}

inline Equation parse_equation(std::string_view text, const Signature& sig) {
  Signature copy = sig;
  return parse_equation(text, copy, false);
}

inline Formula parse_formula(std::string_view text) {
  detail::Lexer lx(text);
  detail::FormulaParser p(lx);
  Formula f = p.formula();
  if (!lx.at_end()) lx.fail("trailing input");
  return f;
}

inline FiniteFrame parse_frame(std::string_view text, Mode mode = Mode::Unimodal) {
  detail::Lexer lx(text);
  lx.expect("{");
  detail::accept_key(lx, "size");
  const std::uint64_t n = lx.number();
  if (n == 0) lx.fail("frame size must be at least 1");
  if (n > kMaxFramePoints) lx.fail("frame too large");
  lx.expect(",");
  detail::accept_key(lx, "edges");
  lx.expect("[");
  FiniteFrame f(n, mode);
  if (!lx.accept("]")) {
    do {
      lx.expect("[");
      std::uint64_t i = lx.number();
      lx.expect(",");
      std::uint64_t j = lx.number();
      lx.expect("]");
      if (i >= n || j >= n) lx.fail("edge endpoint out of range");
      f.add_edge(i, j);
    } while (lx.accept(","));
    lx.expect("]");
  }
  lx.expect("}");
  if (!lx.at_end()) lx.fail("trailing input");
  return f;
}

}  // namespace lwb::codec
