#pragma once

// Hilbert-style proofs for normal modal and tense logics.
//
// A proof is a list of lines, numbered from 1. Each line carries a formula
// and its justification; MP and Nec refer to strictly earlier lines.
// Uniform substitution lives in the justifications: an axiom line may be
// any substitution instance of its axiom.
//
// Proof codes: seq of pair(code formula, code justification), with
//
//   tag  justification     payload
//   0    InBase            0
//   1    Axiom i, s        pair(i, code s)
//   2    Tautology         0
//   3    K slot            slot
//   4    Dual slot         slot
//   5    Extra s           code s
//   6    MP major minor    pair(major, minor)
//   7    Nec line slot     pair(line, slot)
//
// and a substitution s coded as seq of pair(variable, code formula) in
// strictly increasing variable order.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lwb/codec/formula.hpp"
#include "lwb/codec/predicates.hpp"
#include "lwb/core/error.hpp"
#include "lwb/core/natural.hpp"
#include "lwb/kripke/frames.hpp"
#include "lwb/kripke/validity.hpp"

namespace lwb::hilbert {

using codec::Code;
using codec::Formula;
using codec::Mode;
using kripke::LogicPresentation;

using Substitution = std::map<std::uint64_t, Formula>;

struct Justification {
  enum class Kind : std::uint8_t { InBase, Axiom, Tautology, K, Dual, Extra, MP, Nec };

  Kind kind = Kind::Tautology;
  std::size_t axiom = 0;  // Axiom
  std::size_t major = 0;  // MP: the line holding minor -> formula
  std::size_t minor = 0;
  std::size_t line = 0;   // Nec
  unsigned slot = 0;      // K, Dual, Nec
  Substitution subst;     // Axiom, Extra

  static Justification in_base() { return of(Kind::InBase); }
  static Justification tautology() { return of(Kind::Tautology); }
  static Justification axiom_instance(std::size_t i, Substitution s = {}) {
    Justification j = of(Kind::Axiom);
    j.axiom = i;
    j.subst = std::move(s);
    return j;
  }
  static Justification k(unsigned slot) {
    Justification j = of(Kind::K);
    j.slot = slot;
    return j;
  }
  static Justification dual(unsigned slot) {
    Justification j = of(Kind::Dual);
    j.slot = slot;
    return j;
  }
  static Justification extra(Substitution s = {}) {
    Justification j = of(Kind::Extra);
    j.subst = std::move(s);
    return j;
  }
  static Justification mp(std::size_t major, std::size_t minor) {
    Justification j = of(Kind::MP);
    j.major = major;
    j.minor = minor;
    return j;
  }
  static Justification nec(std::size_t line, unsigned slot) {
    Justification j = of(Kind::Nec);
    j.line = line;
    j.slot = slot;
    return j;
  }

  friend bool operator==(const Justification&, const Justification&) = default;

 private:
  static Justification of(Kind k) {
    Justification j;
    j.kind = k;
    return j;
  }
};

struct ProofStep {
  Formula formula;
  Justification why;

  friend bool operator==(const ProofStep&, const ProofStep&) = default;
};

using ProofObject = std::vector<ProofStep>;

/// The logic a proof works over: either a finite list of axioms on top of
/// the minimal logic of the mode, or an arbitrary membership test on
/// formula codes.
class ProofBase {
 public:
  using Oracle = std::function<bool(const Code&)>;

  static ProofBase axiomatic(LogicPresentation L) {
    L.validate();
    ProofBase b;
    b.mode_ = L.mode;
    b.logic_ = std::move(L);
    return b;
  }
  static ProofBase oracle(Oracle member, Mode mode) {
    ProofBase b;
    b.mode_ = mode;
    b.oracle_ = std::move(member);
    return b;
  }

  Mode mode() const { return mode_; }
  bool is_oracle() const { return static_cast<bool>(oracle_); }
  /// Empty in oracle mode.
  const std::vector<Formula>& axioms() const { return logic_.axioms; }

  bool contains(const Formula& f) const {
    if (oracle_) return oracle_(codec::encode_formula(f));
    for (const auto& a : logic_.axioms)
      if (a == f) return true;
    return false;
  }

 private:
  Mode mode_ = Mode::Unimodal;
  LogicPresentation logic_;
  Oracle oracle_;
};

/// Truth-table check of the propositional skeleton; boxed subformulas are
/// opaque atoms.
inline bool tautology_check(const Formula& f) {
  std::map<Formula, std::size_t> atoms;
  std::function<void(const Formula&)> collect = [&](const Formula& g) {
    if (g.is_var() || g.is_box()) {
      atoms.emplace(g, atoms.size());
      return;
    }
    for (const auto& k : g.kids()) collect(k);
  };
  collect(f);
  // 64 rows per word: atoms 0..5 vary inside a word, the rest per block.
  static constexpr std::uint64_t kPattern[6] = {
      0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
      0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
  const std::size_t n = atoms.size();
  const std::uint64_t used = n >= 6 ? ~std::uint64_t{0} : (std::uint64_t{1} << (std::uint64_t{1} << n)) - 1;
  const std::uint64_t blocks = n > 6 ? std::uint64_t{1} << (n - 6) : 1;
  std::function<std::uint64_t(const Formula&, std::uint64_t)> eval = [&](const Formula& g,
                                                                         std::uint64_t block) {
    if (g.is_var() || g.is_box()) {
      const std::size_t a = atoms.at(g);
      if (a < 6) return kPattern[a];
      return ((block >> (a - 6)) & 1U) ? ~std::uint64_t{0} : std::uint64_t{0};
    }
    switch (g.kind()) {
      case Formula::Kind::Bottom: return std::uint64_t{0};
      case Formula::Kind::And: return eval(g.lhs(), block) & eval(g.rhs(), block);
      default: return ~eval(g.lhs(), block) | eval(g.rhs(), block);
    }
  };
  for (std::uint64_t b = 0; b < blocks; ++b)
    if ((eval(f, b) & used) != used) return false;
  return true;
}

namespace detail {

inline void require_fits(const Formula& f, Mode mode, const std::string& where) {
  if (!f.fits(mode)) throw MalformedProof(where + ": box1 in a unimodal proof");
}

inline void require_slot(unsigned slot, Mode mode, const std::string& where) {
  if (slot > 1 || (slot == 1 && mode == Mode::Unimodal))
    throw MalformedProof(where + ": slot " + std::to_string(slot) + " not available in " +
                         codec::mode_name(mode) + " mode");
}

inline void require_earlier(std::size_t ref, std::size_t line, const std::string& where) {
  if (ref == 0 || ref >= line)
    throw MalformedProof(where + ": reference " + std::to_string(ref) +
                         " is not an earlier line");
}

inline bool is_instance(const Formula& schema, const Formula& f) {
  return codec::match_formula(schema, f).has_value();
}

}  // namespace detail

/// True iff every line is justified and the last line is `goal`. Structural
/// faults (bad references, unavailable slots, a missing axiom or extra
/// formula) raise MalformedProof; a line that simply does not follow from
/// its justification makes the result false.
inline bool check_proof(const ProofBase& base, const std::optional<Formula>& extra,
                        const ProofObject& proof, const Formula& goal) {
  const Mode mode = base.mode();
  if (extra) detail::require_fits(*extra, mode, "extra formula");
  bool ok = !proof.empty();
  for (std::size_t i = 0; i < proof.size(); ++i) {
    const std::size_t line = i + 1;
    const std::string where = "line " + std::to_string(line);
    const auto& [f, why] = proof[i];
    detail::require_fits(f, mode, where);
    for (const auto& [v, g] : why.subst) detail::require_fits(g, mode, where);
    bool step = false;
    switch (why.kind) {
      case Justification::Kind::InBase: step = base.contains(f); break;
      case Justification::Kind::Axiom:
        if (base.is_oracle()) throw MalformedProof(where + ": no axiom list in oracle mode");
        if (why.axiom >= base.axioms().size())
          throw MalformedProof(where + ": no axiom " + std::to_string(why.axiom));
        step = base.axioms()[why.axiom].substitute(why.subst) == f;
        break;
      case Justification::Kind::Tautology: step = tautology_check(f); break;
      case Justification::Kind::K:
        detail::require_slot(why.slot, mode, where);
        step = detail::is_instance(kripke::k_axiom(why.slot), f);
        break;
      case Justification::Kind::Dual:
        if (mode != Mode::Tense) throw MalformedProof(where + ": duality outside tense mode");
        detail::require_slot(why.slot, mode, where);
        step = detail::is_instance(kripke::tense_duality(why.slot), f);
        break;
      case Justification::Kind::Extra:
        if (!extra) throw MalformedProof(where + ": no extra formula");
        step = extra->substitute(why.subst) == f;
        break;
      case Justification::Kind::MP: {
        detail::require_earlier(why.major, line, where);
        detail::require_earlier(why.minor, line, where);
        const Formula& major = proof[why.major - 1].formula;
        step = major.is_implies() && major.lhs() == proof[why.minor - 1].formula && major.rhs() == f;
        break;
      }
      case Justification::Kind::Nec:
        detail::require_earlier(why.line, line, where);
        detail::require_slot(why.slot, mode, where);
        step = f == Formula::box(why.slot, proof[why.line - 1].formula);
        break;
    }
    ok = ok && step;
  }
  return ok && proof.back().formula == goal;
}

// Codes.

inline Code encode_substitution(const Substitution& s) {
  std::vector<Natural> items;
  for (const auto& [v, f] : s) items.push_back(pair(Natural(v), codec::encode_formula(f)));
  return encode_seq(items);
}

inline Substitution decode_substitution(const Code& c, Mode mode) {
  Substitution s;
  std::optional<std::uint64_t> last;
  for (const auto& item : decode_seq(c)) {
    auto [v, f] = unpair(item);
    const std::uint64_t var = require_u64(v, "variable");
    if (last && var <= *last) throw MalformedCode("substitution variables not increasing");
    last = var;
    s.emplace(var, codec::decode_formula(f, mode));
  }
  return s;
}

inline Code encode_justification(const Justification& j) {
  using K = Justification::Kind;
  switch (j.kind) {
    case K::InBase: return pair(0, 0);
    case K::Axiom: return pair(1, pair(Natural(j.axiom), encode_substitution(j.subst)));
    case K::Tautology: return pair(2, 0);
    case K::K: return pair(3, Natural(j.slot));
    case K::Dual: return pair(4, Natural(j.slot));
    case K::Extra: return pair(5, encode_substitution(j.subst));
    case K::MP: return pair(6, pair(Natural(j.major), Natural(j.minor)));
    case K::Nec: return pair(7, pair(Natural(j.line), Natural(j.slot)));
  }
  return 0;
}

inline Justification decode_justification(const Code& c, Mode mode) {
  auto [tag, payload] = unpair(c);
  auto small = [](const Natural& n, const char* what) { return require_u64(n, what); };
  auto slot = [&](const Natural& n) {
    if (n > 1) throw MalformedCode("slot " + n.str());
    return static_cast<unsigned>(small(n, "slot"));
  };
  switch (small(tag, "justification tag")) {
    case 0:
      if (payload != 0) throw MalformedCode("InBase takes no payload");
      return Justification::in_base();
    case 1: {
      auto [i, s] = unpair(payload);
      return Justification::axiom_instance(small(i, "axiom index"), decode_substitution(s, mode));
    }
    case 2:
      if (payload != 0) throw MalformedCode("Tautology takes no payload");
      return Justification::tautology();
    case 3: return Justification::k(slot(payload));
    case 4: return Justification::dual(slot(payload));
    case 5: return Justification::extra(decode_substitution(payload, mode));
    case 6: {
      auto [a, b] = unpair(payload);
      return Justification::mp(small(a, "line"), small(b, "line"));
    }
    case 7: {
      auto [a, s] = unpair(payload);
      return Justification::nec(small(a, "line"), slot(s));
    }
    default: throw MalformedCode("justification tag " + tag.str());
  }
}

inline Code encode_proof(const ProofObject& p) {
  std::vector<Natural> lines;
  for (const auto& [f, why] : p) lines.push_back(pair(codec::encode_formula(f), encode_justification(why)));
  return encode_seq(lines);
}

inline ProofObject decode_proof(const Code& c, Mode mode = Mode::Tense) {
  ProofObject p;
  for (const auto& line : decode_seq(c)) {
    auto [f, j] = unpair(line);
    p.push_back({codec::decode_formula(f, mode), decode_justification(j, mode)});
  }
  return p;
}

/// Proof(A, i, p, j) on codes: p codes a proof of formula j from A plus
/// formula i. Codes that do not decode, and malformed proofs, give false.
inline bool is_proof_code(const ProofBase& base, const Code& extra, const Code& proof,
                          const Code& goal) {
  auto e = codec::try_decode_formula(extra, base.mode());
  auto g = codec::try_decode_formula(goal, base.mode());
  if (!e || !g) return false;
  try {
    return check_proof(base, e, decode_proof(proof, base.mode()), *g);
  } catch (const Error&) {
    return false;
  }
}

}  // namespace lwb::hilbert
