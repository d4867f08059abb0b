#pragma once

// Recursive syntactic predicates on codes. All predicates here are total:
// malformed inputs yield false, never an exception.

#include <map>
#include <optional>
#include <vector>

#include "lwb/codec/formula.hpp"
#include "lwb/codec/term.hpp"

namespace lwb::codec {

inline std::optional<Term> try_decode_term(const Code& c, const Signature& sig) {
  try {
    return decode_term(c, sig);
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline std::optional<Equation> try_decode_equation(const Code& c, const Signature& sig) {
  try {
    return decode_equation(c, sig);
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline std::optional<Formula> try_decode_formula(const Code& c, Mode mode = Mode::Tense) {
  try {
    return decode_formula(c, mode);
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline bool is_term_code(const Code& c, const Signature& sig) {
  return try_decode_term(c, sig).has_value();
}

inline bool is_eq_code(const Code& c, const Signature& sig) {
  return try_decode_equation(c, sig).has_value();
}

/// True iff `after` is `before` with exactly one occurrence of `from`
/// replaced by `to`.
inline bool replaces_one_occurrence(const Term& before, const Term& after, const Term& from,
                                    const Term& to) {
  if (before == from && after == to) return true;
  if (before.is_var() || after.is_var()) return false;
  if (before.index() != after.index() || before.args().size() != after.args().size())
    return false;
  const auto& a = before.args();
  const auto& b = after.args();
  std::optional<std::size_t> differing;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    if (differing) return false;
    differing = i;
  }
  if (differing) return replaces_one_occurrence(a[*differing], b[*differing], from, to);
  // Identical terms: replacing an occurrence of `from` by itself (from == to)
  // somewhere below.
  for (std::size_t i = 0; i < a.size(); ++i)
    if (replaces_one_occurrence(a[i], b[i], from, to)) return true;
  return false;
}

/// Rep(result, t, e): `result` codes t = t' where t' arises from t by
/// replacing one occurrence of e's left side by e's right side.
inline bool is_replacement_instance(const Code& result, const Code& t, const Code& e,
                                    const Signature& sig) {
  auto r = try_decode_equation(result, sig);
  if (!r) return false;
  auto term = try_decode_term(t, sig);
  if (!term || !(r->left == *term)) return false;
  auto eq = try_decode_equation(e, sig);
  if (!eq) return false;
  return replaces_one_occurrence(r->left, r->right, eq->left, eq->right);
}

/// Code of e with x_i simultaneously replaced by the term coded by subst[i].
/// Variables beyond the list map to themselves.
inline Code substitution_instance(const Code& e, const std::vector<Code>& subst,
                                  const Signature& sig) {
  Equation eq = decode_equation(e, sig);
  std::vector<Term> terms;
  terms.reserve(subst.size());
  for (const auto& c : subst) terms.push_back(decode_term(c, sig));
  return encode_equation(eq.substitute(terms), sig);
}

/// Extends `subst` so that pattern instantiates to target; false on clash.
inline bool match_term(const Term& pattern, const Term& target,
                       std::map<std::uint64_t, Term>& subst) {
  if (pattern.is_var()) {
    auto [it, inserted] = subst.emplace(pattern.index(), target);
    return inserted || it->second == target;
  }
  if (target.is_var() || pattern.index() != target.index() ||
      pattern.args().size() != target.args().size())
    return false;
  for (std::size_t i = 0; i < pattern.args().size(); ++i)
    if (!match_term(pattern.args()[i], target.args()[i], subst)) return false;
  return true;
}

inline std::optional<std::map<std::uint64_t, Term>> match_equation(const Equation& pattern,
                                                                   const Equation& target) {
  std::map<std::uint64_t, Term> subst;
  if (!match_term(pattern.left, target.left, subst)) return std::nullopt;
  if (!match_term(pattern.right, target.right, subst)) return std::nullopt;
  return subst;
}

/// SubstInst(i, j): equation i is a substitution instance of equation j.
inline bool is_substitution_instance(const Code& instance, const Code& general,
                                     const Signature& sig) {
  auto a = try_decode_equation(instance, sig);
  if (!a) return false;
  auto b = try_decode_equation(general, sig);
  if (!b) return false;
  return match_equation(*b, *a).has_value();
}

inline bool match_formula(const Formula& pattern, const Formula& target,
                          std::map<std::uint64_t, Formula>& subst) {
  if (pattern.is_var()) {
    auto [it, inserted] = subst.emplace(pattern.index(), target);
    return inserted || it->second == target;
  }
  if (pattern.kind() != target.kind() || pattern.index() != target.index()) return false;
  for (std::size_t i = 0; i < pattern.kids().size(); ++i)
    if (!match_formula(pattern.kids()[i], target.kids()[i], subst)) return false;
  return true;
}

inline std::optional<std::map<std::uint64_t, Formula>> match_formula(const Formula& pattern,
                                                                     const Formula& target) {
  std::map<std::uint64_t, Formula> subst;
  if (!match_formula(pattern, target, subst)) return std::nullopt;
  return subst;
}

}  // namespace lwb::codec
