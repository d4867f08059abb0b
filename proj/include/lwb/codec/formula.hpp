#pragma once

// Modal and tense formulas and their codes. A code is pair(tag, payload):
//
//   tag  constructor   payload
//   0    p_i           i
//   1    bottom        0
//   2    f & g         pair(code f, code g)
//   3    f -> g        pair(code f, code g)
//   4    box0 f        code f
//   5    box1 f        code f      (tense mode only)

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lwb/core/error.hpp"
#include "lwb/core/natural.hpp"

namespace lwb::codec {

enum class Mode : std::uint8_t { Unimodal, Tense };

inline const char* mode_name(Mode m) { return m == Mode::Tense ? "tense" : "unimodal"; }

class Formula {
 public:
  enum class Kind : std::uint8_t { Var = 0, Bottom = 1, And = 2, Implies = 3, Box = 4 };

  Formula() = default;

  static Formula var(std::uint64_t i) {
    Formula f;
    f.kind_ = Kind::Var;
    f.index_ = i;
    return f;
  }
  static Formula bottom() {
    Formula f;
    f.kind_ = Kind::Bottom;
    return f;
  }
  static Formula conj(Formula a, Formula b) { return binary(Kind::And, std::move(a), std::move(b)); }
  static Formula implies(Formula a, Formula b) {
    return binary(Kind::Implies, std::move(a), std::move(b));
  }
  static Formula box(unsigned slot, Formula a) {
    Formula f;
    f.kind_ = Kind::Box;
    f.index_ = slot;
    f.kids_.push_back(std::move(a));
    return f;
  }
  static Formula neg(Formula a) { return implies(std::move(a), bottom()); }
  static Formula top() { return neg(bottom()); }

  Kind kind() const { return kind_; }
  /// Variable index for Var, slot for Box, 0 otherwise.
  std::uint64_t index() const { return index_; }
  unsigned slot() const { return static_cast<unsigned>(index_); }
  const Formula& lhs() const { return kids_.at(0); }
  const Formula& rhs() const { return kids_.at(1); }
  const Formula& body() const { return kids_.at(0); }
  const std::vector<Formula>& kids() const { return kids_; }

  bool is_var() const { return kind_ == Kind::Var; }
  bool is_bottom() const { return kind_ == Kind::Bottom; }
  bool is_box() const { return kind_ == Kind::Box; }
  bool is_implies() const { return kind_ == Kind::Implies; }
  bool is_and() const { return kind_ == Kind::And; }

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& k : kids_) n += k.size();
    return n;
  }
  std::size_t depth() const {
    std::size_t d = 0;
    for (const auto& k : kids_) d = std::max(d, k.depth() + 1);
    return d;
  }

  void collect_vars(std::set<std::uint64_t>& out) const {
    if (kind_ == Kind::Var) out.insert(index_);
    for (const auto& k : kids_) k.collect_vars(out);
  }
  std::set<std::uint64_t> vars() const {
    std::set<std::uint64_t> out;
    collect_vars(out);
    return out;
  }

  bool uses_slot1() const {
    if (kind_ == Kind::Box && index_ == 1) return true;
    for (const auto& k : kids_)
      if (k.uses_slot1()) return true;
    return false;
  }
  bool fits(Mode m) const { return m == Mode::Tense || !uses_slot1(); }

  Formula substitute(const std::map<std::uint64_t, Formula>& subst) const {
    if (kind_ == Kind::Var) {
      auto it = subst.find(index_);
      return it == subst.end() ? *this : it->second;
    }
    Formula f = *this;
    for (auto& k : f.kids_) k = k.substitute(subst);
    return f;
  }

  void collect_subformulas(std::set<Formula>& out) const {
    if (!out.insert(*this).second) return;
    for (const auto& k : kids_) k.collect_subformulas(out);
  }

  friend bool operator==(const Formula& a, const Formula& b) {
    return a.kind_ == b.kind_ && a.index_ == b.index_ && a.kids_ == b.kids_;
  }
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
    if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
    if (auto c = a.index_ <=> b.index_; c != 0) return c;
    if (auto c = a.kids_.size() <=> b.kids_.size(); c != 0) return c;
    for (std::size_t i = 0; i < a.kids_.size(); ++i)
      if (auto c = a.kids_[i] <=> b.kids_[i]; c != 0) return c;
    return std::strong_ordering::equal;
  }

  /// Text form with minimal parentheses: box binds tightest, then &, then
  /// right-associative ->.
  std::string str() const { return render(0); }

 private:
  static Formula binary(Kind k, Formula a, Formula b) {
    Formula f;
    f.kind_ = k;
    f.kids_.push_back(std::move(a));
    f.kids_.push_back(std::move(b));
    return f;
  }

  // prec: 0 = top / right of ->, 1 = left of -> or operand of &, 2 = under box
  std::string render(int prec) const {
    switch (kind_) {
      case Kind::Var:
        return "p" + std::to_string(index_);
      case Kind::Bottom:
        return "bot";
      case Kind::Box:
        return "box" + std::to_string(index_) + " " + kids_[0].render(2);
      case Kind::And: {
        std::string s = kids_[0].render(1) + " & " + kids_[1].render(2);
        return prec >= 2 ? "(" + s + ")" : s;
      }
      case Kind::Implies: {
        std::string s = kids_[0].render(1) + " -> " + kids_[1].render(0);
        return prec >= 1 ? "(" + s + ")" : s;
      }
    }
    return {};
  }

  Kind kind_ = Kind::Bottom;
  std::uint64_t index_ = 0;
  std::vector<Formula> kids_;
};

inline Code encode_formula(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Var:
      return pair(0, Natural(f.index()));
    case Formula::Kind::Bottom:
      return pair(1, 0);
    case Formula::Kind::And:
      return pair(2, pair(encode_formula(f.lhs()), encode_formula(f.rhs())));
    case Formula::Kind::Implies:
      return pair(3, pair(encode_formula(f.lhs()), encode_formula(f.rhs())));
    case Formula::Kind::Box:
      return pair(4 + f.slot(), encode_formula(f.body()));
  }
  return 0;
}

/// Rejects tag >= 6, a bottom with non-zero payload, and box1 outside tense
/// mode.
inline Formula decode_formula(const Code& c, Mode mode = Mode::Tense) {
  if (c < 0) throw MalformedCode("negative");
  auto [tag, payload] = unpair(c);
  if (tag > 5) throw MalformedCode("unknown formula tag " + tag.str());
  switch (static_cast<int>(tag)) {
    case 0:
      return Formula::var(require_u64(payload, "propositional variable"));
    case 1:
      if (payload != 0) throw MalformedCode("bottom with payload " + payload.str());
      return Formula::bottom();
    case 2:
    case 3: {
      auto [a, b] = unpair(payload);
      Formula l = decode_formula(a, mode);
      Formula r = decode_formula(b, mode);
      return tag == 2 ? Formula::conj(std::move(l), std::move(r))
                      : Formula::implies(std::move(l), std::move(r));
    }
    case 4:
      return Formula::box(0, decode_formula(payload, mode));
    default:
      if (mode != Mode::Tense) throw MalformedCode("box1 outside tense mode");
      return Formula::box(1, decode_formula(payload, mode));
  }
}

inline bool is_formula_code(const Code& c, Mode mode = Mode::Tense) {
  try {
    decode_formula(c, mode);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace lwb::codec
