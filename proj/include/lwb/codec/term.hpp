#pragma once

// Terms and equations over a finite signature, with their numeric codes.
//
//   code(x_i)               = 2i
//   code(f_k(t_1 .. t_n))   = 2 * pair(k, seq(code(t_1) .. code(t_n))) + 1
//   code(s = t)             = pair(code(s), code(t))

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lwb/core/error.hpp"
#include "lwb/core/natural.hpp"

namespace lwb::codec {

/// Function symbols f_0 .. f_{k-1} with their arities. Variables are
/// unbounded (x_0, x_1, ...).
class Signature {
 public:
  Signature() = default;
  explicit Signature(std::vector<unsigned> arities) : arities_(std::move(arities)) {}

  std::size_t size() const { return arities_.size(); }
  unsigned arity(std::size_t symbol) const { return arities_.at(symbol); }
  const std::vector<unsigned>& arities() const { return arities_; }
  bool has(std::uint64_t symbol) const { return symbol < arities_.size(); }

  std::size_t add(unsigned arity) {
    arities_.push_back(arity);
    return arities_.size() - 1;
  }

  bool operator==(const Signature&) const = default;

  /// "2,1" -> f0 binary, f1 unary. Empty string is the empty signature.
  static Signature parse(const std::string& spec) {
    Signature sig;
    std::size_t pos = 0;
    while (pos < spec.size()) {
      std::size_t next = spec.find(',', pos);
      if (next == std::string::npos) next = spec.size();
      std::string item = spec.substr(pos, next - pos);
      auto n = parse_natural(item);
      sig.add(static_cast<unsigned>(require_u64(n, "arity")));
      pos = next + 1;
    }
    return sig;
  }

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < arities_.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(arities_[i]);
    }
    return out;
  }

 private:
  std::vector<unsigned> arities_;
};

class Term {
 public:
  enum class Kind : std::uint8_t { Variable, Application };

  Term() = default;

  static Term var(std::uint64_t index) {
    Term t;
    t.kind_ = Kind::Variable;
    t.index_ = index;
    return t;
  }
  static Term app(std::uint64_t symbol, std::vector<Term> args) {
    Term t;
    t.kind_ = Kind::Application;
    t.index_ = symbol;
    t.args_ = std::move(args);
    return t;
  }

  Kind kind() const { return kind_; }
  bool is_var() const { return kind_ == Kind::Variable; }
  /// Variable index or function-symbol index.
  std::uint64_t index() const { return index_; }
  const std::vector<Term>& args() const { return args_; }

  /// Number of nodes in the syntax tree.
  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& a : args_) n += a.size();
    return n;
  }

  void collect_vars(std::set<std::uint64_t>& out) const {
    if (is_var()) {
      out.insert(index_);
      return;
    }
    for (const auto& a : args_) a.collect_vars(out);
  }

  /// Largest variable index + 1, or 0 for ground terms.
  std::uint64_t var_bound() const {
    if (is_var()) return index_ + 1;
    std::uint64_t m = 0;
    for (const auto& a : args_) m = std::max(m, a.var_bound());
    return m;
  }

  bool well_formed(const Signature& sig) const {
    if (is_var()) return true;
    if (!sig.has(index_) || sig.arity(index_) != args_.size()) return false;
    for (const auto& a : args_)
      if (!a.well_formed(sig)) return false;
    return true;
  }

  /// Simultaneous substitution; variables without an entry stay put.
  Term substitute(const std::vector<Term>& subst) const {
    if (is_var()) return index_ < subst.size() ? subst[index_] : *this;
    std::vector<Term> args;
    args.reserve(args_.size());
    for (const auto& a : args_) args.push_back(a.substitute(subst));
    return app(index_, std::move(args));
  }

  friend bool operator==(const Term& a, const Term& b) {
    return a.kind_ == b.kind_ && a.index_ == b.index_ && a.args_ == b.args_;
  }
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
    if (auto c = a.index_ <=> b.index_; c != 0) return c;
    if (auto c = a.args_.size() <=> b.args_.size(); c != 0) return c;
    for (std::size_t i = 0; i < a.args_.size(); ++i)
      if (auto c = a.args_[i] <=> b.args_[i]; c != 0) return c;
    return std::strong_ordering::equal;
  }

  /// Text form: x3, f1(x0, x2); binary f0 prints infix as `*`.
  std::string str() const {
    if (is_var()) return "x" + std::to_string(index_);
    if (index_ == 0 && args_.size() == 2) {
      auto side = [](const Term& t) {
        bool wrap = !t.is_var() && t.index_ == 0 && t.args_.size() == 2;
        return wrap ? "(" + t.str() + ")" : t.str();
      };
      return side(args_[0]) + " * " + side(args_[1]);
    }
    std::string out = "f" + std::to_string(index_);
    if (args_.empty()) return out;
    out += '(';
    for (std::size_t i = 0; i < args_.size(); ++i) {
      if (i) out += ", ";
      out += args_[i].str();
    }
    return out + ')';
  }

 private:
  Kind kind_ = Kind::Variable;
  std::uint64_t index_ = 0;
  std::vector<Term> args_;
};

struct Equation {
  Term left;
  Term right;

  std::size_t size() const { return left.size() + right.size(); }
  Equation flipped() const { return {right, left}; }
  bool well_formed(const Signature& sig) const {
    return left.well_formed(sig) && right.well_formed(sig);
  }
  std::uint64_t var_bound() const { return std::max(left.var_bound(), right.var_bound()); }
  Equation substitute(const std::vector<Term>& subst) const {
    return {left.substitute(subst), right.substitute(subst)};
  }
  std::string str() const { return left.str() + " = " + right.str(); }

  friend bool operator==(const Equation&, const Equation&) = default;
  friend std::strong_ordering operator<=>(const Equation& a, const Equation& b) {
    if (auto c = a.left <=> b.left; c != 0) return c;
    return a.right <=> b.right;
  }
};

inline Term var(std::uint64_t i) { return Term::var(i); }
inline Term app(std::uint64_t k, std::vector<Term> args) { return Term::app(k, std::move(args)); }

inline Code encode_term(const Term& t, const Signature& sig) {
  if (t.is_var()) return Code(2) * t.index();
  if (!sig.has(t.index()) || sig.arity(t.index()) != t.args().size())
    throw SignatureMismatch("term " + t.str() + " is not well formed over signature [" +
                            sig.str() + "]");
  std::vector<Natural> codes;
  codes.reserve(t.args().size());
  for (const auto& a : t.args()) codes.push_back(encode_term(a, sig));
  return 2 * pair(Natural(t.index()), encode_seq(codes)) + 1;
}

inline Term decode_term(const Code& c, const Signature& sig) {
  if (c < 0) throw MalformedCode("negative");
  if ((c & 1) == 0) return Term::var(require_u64(c / 2, "variable index"));
  auto [k, s] = unpair((c - 1) / 2);
  auto sym = to_u64(k);
  if (!sym || !sig.has(*sym)) throw MalformedCode("unknown function symbol " + k.str());
  const unsigned arity = sig.arity(*sym);
  // Decode the argument sequence lazily so an over-long payload is rejected
  // before we recurse into it.
  std::vector<Term> args;
  Natural rest = s;
  while (rest != 0) {
    if (args.size() == arity) throw MalformedCode("too many arguments for f" + k.str());
    auto [head, tail] = unpair(rest - 1);
    args.push_back(decode_term(head, sig));
    rest = std::move(tail);
  }
  if (args.size() != arity) throw MalformedCode("too few arguments for f" + k.str());
  return Term::app(*sym, std::move(args));
}

inline Code encode_equation(const Equation& e, const Signature& sig) {
  return pair(encode_term(e.left, sig), encode_term(e.right, sig));
}

inline Equation decode_equation(const Code& c, const Signature& sig) {
  auto [l, r] = unpair(c);
  return {decode_term(l, sig), decode_term(r, sig)};
}

}  // namespace lwb::codec
