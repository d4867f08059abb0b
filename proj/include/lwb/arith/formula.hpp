#pragma once

// Arithmetical formulas over a fixed library of decidable predicates on
// codes, with set variables read through reals.
//
// A formula is a conjunction of conjuncts, each with its own quantifier
// prefix over a quantifier-free matrix. Keeping the prefixes apart lets the
// evaluator treat each condition on its own; prenex() merges them block by
// block (variables renamed apart) for dumps and classification.
//
// Sets are numbered slots. Slot 0 is the free set variable; the others hold
// parameter reals fixed when the formula is built.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lwb/arith/real.hpp"
#include "lwb/codec/formula.hpp"
#include "lwb/codec/term.hpp"
#include "lwb/hilbert/search.hpp"

namespace lwb::arith {

enum class Quant : std::uint8_t { Forall, Exists };

/// What a variable ranges over. Code and Frame variables range over codes
/// up to their bound; Proof variables over proofs produced by search; Tab
/// variables over the indices of the tab table.
enum class Sort : std::uint8_t { Code, Frame, Proof, Tab };

inline const char* sort_name(Sort s) {
  switch (s) {
    case Sort::Code: return "code";
    case Sort::Frame: return "frame";
    case Sort::Proof: return "proof";
    case Sort::Tab: return "tab";
  }
  return "?";
}

struct Variable {
  std::string name;
  Quant quant = Quant::Forall;
  Sort sort = Sort::Code;
};

/// Variable, constant, or the code of tab_n for a variable n.
struct Arg {
  enum class Kind : std::uint8_t { Var, Const, TabOf };
  Kind kind = Kind::Const;
  std::size_t var = 0;
  Code value = 0;

  static Arg v(std::size_t i) { return {Kind::Var, i, 0}; }
  static Arg c(Code x) { return {Kind::Const, 0, std::move(x)}; }
  static Arg tab(std::size_t n) { return {Kind::TabOf, n, 0}; }
};

enum class Pred : std::uint8_t {
  IsTerm,        // (x)
  IsEq,          // (x)
  IsFml,         // (x)
  IsFrame,       // (x)
  CodeEq,        // (x, l, r)       x = pair(l, r)
  Rep,           // (i, t, e)       i codes t = t' with t' a replacement of t by e
  SubstInst,     // (i, j)          equation i is a substitution instance of j
  FmlSubstInst,  // (i, j)          formula i is a substitution instance of j
  IsImp,         // (k, i, j)       phi_k = phi_i -> phi_j
  IsBox,         // (k, i, s)       phi_k = box_s phi_i
  IsTaut,        // (i)
  IsAx,          // (i)             instance of K or, in tense mode, duality
  Val,           // (f, i)          frame f validates phi_i
  Proof,         // [S] (i, p, j)   p proves phi_j from S plus phi_i
  In,            // [S] (x)
};

inline const char* pred_name(Pred p) {
  switch (p) {
    case Pred::IsTerm: return "is-term";
    case Pred::IsEq: return "is-eq";
    case Pred::IsFml: return "is-fml";
    case Pred::IsFrame: return "is-frame";
    case Pred::CodeEq: return "code-eq";
    case Pred::Rep: return "rep";
    case Pred::SubstInst: return "subst-inst";
    case Pred::FmlSubstInst: return "fml-subst-inst";
    case Pred::IsImp: return "is-imp";
    case Pred::IsBox: return "is-box";
    case Pred::IsTaut: return "is-taut";
    case Pred::IsAx: return "is-ax";
    case Pred::Val: return "val";
    case Pred::Proof: return "proof";
    case Pred::In: return "in";
  }
  return "?";
}

struct Atom {
  Pred pred;
  std::vector<Arg> args;
  std::size_t set = 0;  // In, Proof
};

struct Expr {
  enum class Kind : std::uint8_t { Atom, Not, And, Or, Implies };
  Kind kind = Kind::And;
  Atom atom{Pred::In, {}, 0};
  std::vector<Expr> kids;

  static Expr of(Atom a) {
    Expr e;
    e.kind = Kind::Atom;
    e.atom = std::move(a);
    return e;
  }
  static Expr make(Kind k, std::vector<Expr> kids) {
    Expr e;
    e.kind = k;
    e.kids = std::move(kids);
    return e;
  }
};

inline Expr atom(Pred p, std::vector<Arg> args, std::size_t set = 0) {
  return Expr::of({p, std::move(args), set});
}
inline Expr in(std::size_t set, Arg x) { return atom(Pred::In, {std::move(x)}, set); }
inline Expr neg(Expr e) { return Expr::make(Expr::Kind::Not, {std::move(e)}); }
inline Expr all_of(std::vector<Expr> es) { return Expr::make(Expr::Kind::And, std::move(es)); }
inline Expr any_of(std::vector<Expr> es) { return Expr::make(Expr::Kind::Or, std::move(es)); }
inline Expr implies(Expr a, Expr b) {
  return Expr::make(Expr::Kind::Implies, {std::move(a), std::move(b)});
}

struct Conjunct {
  std::string label;
  std::vector<Variable> prefix;
  Expr matrix;
};

struct SetSlot {
  std::string name;
  std::optional<Real> value;  // empty for the free variable
};

struct ArithFormula {
  std::string name;
  codec::Signature signature;
  codec::Mode mode = codec::Mode::Unimodal;
  hilbert::TabTable tabs;
  std::vector<SetSlot> sets;
  std::vector<Conjunct> conjuncts;
};

// Classification.

enum class Level : std::uint8_t { Sigma, Pi };

struct Classification {
  Level level;
  std::size_t n;
  friend bool operator==(const Classification&, const Classification&) = default;
};

inline std::string classification_str(const Classification& c) {
  return std::string(c.level == Level::Pi ? "Pi" : "Sigma") + "^0_" + std::to_string(c.n);
}

/// Alternating blocks of a prefix. Empty prefix is (Pi, 0).
inline Classification classify(const std::vector<Variable>& prefix) {
  if (prefix.empty()) return {Level::Pi, 0};
  std::size_t blocks = 1;
  for (std::size_t i = 1; i < prefix.size(); ++i)
    if (prefix[i].quant != prefix[i - 1].quant) ++blocks;
  return {prefix.front().quant == Quant::Forall ? Level::Pi : Level::Sigma, blocks};
}

struct Prenex {
  std::vector<Variable> prefix;
  /// Per conjunct, the merged index of each of its variables.
  std::vector<std::vector<std::size_t>> renaming;
};

/// Merges conjunct prefixes block by block, starting from a (possibly
/// empty) universal block, so a conjunction of Pi_n formulas stays Pi_n.
inline Prenex prenex(const ArithFormula& f) {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> blocks;  // (conjunct, var)
  for (std::size_t c = 0; c < f.conjuncts.size(); ++c) {
    const auto& pre = f.conjuncts[c].prefix;
    std::size_t block = 0;
    Quant current = Quant::Forall;
    for (std::size_t v = 0; v < pre.size(); ++v) {
      if (pre[v].quant != current) {
        ++block;
        current = pre[v].quant;
      }
      if (blocks.size() <= block) blocks.resize(block + 1);
      blocks[block].emplace_back(c, v);
    }
  }
  Prenex out;
  out.renaming.resize(f.conjuncts.size());
  for (std::size_t c = 0; c < f.conjuncts.size(); ++c)
    out.renaming[c].resize(f.conjuncts[c].prefix.size());
  for (const auto& block : blocks)
    for (auto [c, v] : block) {
      Variable var = f.conjuncts[c].prefix[v];
      var.name += "_" + std::to_string(c + 1);
      out.renaming[c][v] = out.prefix.size();
      out.prefix.push_back(std::move(var));
    }
  return out;
}

inline Classification classify(const ArithFormula& f) { return classify(prenex(f).prefix); }

// Dump.

namespace detail {

inline std::string arg_str(const Arg& a, const std::vector<std::string>& names) {
  switch (a.kind) {
    case Arg::Kind::Var: return names.at(a.var);
    case Arg::Kind::Const: return a.value.str();
    case Arg::Kind::TabOf: return "(tab " + names.at(a.var) + ")";
  }
  return "?";
}

inline std::string expr_str(const Expr& e, const std::vector<std::string>& names,
                            const std::vector<SetSlot>& sets) {
  switch (e.kind) {
    case Expr::Kind::Atom: {
      std::string out = "(" + std::string(pred_name(e.atom.pred));
      if (e.atom.pred == Pred::In || e.atom.pred == Pred::Proof) out += " " + sets.at(e.atom.set).name;
      for (const auto& a : e.atom.args) out += " " + arg_str(a, names);
      return out + ")";
    }
    case Expr::Kind::Not: return "(not " + expr_str(e.kids[0], names, sets) + ")";
    default: {
      std::string out = e.kind == Expr::Kind::And ? "(and" : e.kind == Expr::Kind::Or ? "(or" : "(implies";
      for (const auto& k : e.kids) out += " " + expr_str(k, names, sets);
      return out + ")";
    }
  }
}

}  // namespace detail

/// Prenex S-expression: (forall ((i_1 code) ...) (exists (...) (and ...))).
inline std::string dump(const ArithFormula& f) {
  const Prenex p = prenex(f);
  std::string out;
  std::size_t open = 0;
  for (std::size_t i = 0; i < p.prefix.size();) {
    const Quant q = p.prefix[i].quant;
    out += std::string(q == Quant::Forall ? "(forall (" : "(exists (");
    bool first = true;
    for (; i < p.prefix.size() && p.prefix[i].quant == q; ++i) {
      out += (first ? "(" : " (") + p.prefix[i].name + " " + sort_name(p.prefix[i].sort) + ")";
      first = false;
    }
    out += ")\n  ";
    ++open;
  }
  out += "(and";
  for (std::size_t c = 0; c < f.conjuncts.size(); ++c) {
    std::vector<std::string> names;
    for (auto idx : p.renaming[c]) names.push_back(p.prefix[idx].name);
    out += "\n    ; " + f.conjuncts[c].label + "\n    " +
           detail::expr_str(f.conjuncts[c].matrix, names, f.sets);
  }
  out += ")" + std::string(open, ')') + "\n";
  return out;
}

// Builders.

namespace detail {

inline Conjunct forall(std::string label, std::vector<std::string> vars, Expr matrix) {
  Conjunct c{std::move(label), {}, std::move(matrix)};
  for (auto& v : vars) c.prefix.push_back({std::move(v), Quant::Forall, Sort::Code});
  return c;
}

inline Arg V(std::size_t i) { return Arg::v(i); }

/// Normal-logic closure of set slot X over L0 (slot p).
inline std::vector<Conjunct> normal_logic_conditions(std::size_t X, std::size_t p,
                                                     codec::Mode mode) {
  std::vector<Conjunct> out;
  out.push_back(forall("X contains only formula codes", {"i"},
                       implies(in(X, V(0)), atom(Pred::IsFml, {V(0)}))));
  out.push_back(forall("L0 is contained in X", {"i"}, implies(in(p, V(0)), in(X, V(0)))));
  out.push_back(forall("X contains the tautologies", {"i"},
                       implies(atom(Pred::IsTaut, {V(0)}), in(X, V(0)))));
  out.push_back(forall(mode == codec::Mode::Tense ? "X contains K and duality instances"
                                                  : "X contains K instances",
                       {"i"}, implies(atom(Pred::IsAx, {V(0)}), in(X, V(0)))));
  // j = i -> k, listed first so i and k are read off j.
  out.push_back(forall("X is closed under modus ponens", {"j", "i", "k"},
                       implies(all_of({atom(Pred::IsImp, {V(0), V(1), V(2)}), in(X, V(1)),
                                       in(X, V(0))}),
                               in(X, V(2)))));
  const unsigned slots = mode == codec::Mode::Tense ? 2 : 1;
  for (unsigned s = 0; s < slots; ++s)
    out.push_back(forall("X is closed under necessitation for box" + std::to_string(s),
                         {"k", "i"},
                         implies(all_of({atom(Pred::IsBox, {V(0), V(1), Arg::c(s)}), in(X, V(1))}),
                                 in(X, V(0)))));
  out.push_back(forall("X is closed under substitution", {"i", "k"},
                       implies(all_of({in(X, V(0)), atom(Pred::FmlSubstInst, {V(1), V(0)})}),
                               in(X, V(1)))));
  return out;
}

}  // namespace detail

/// The seven conditions for Phi (slot 0) to be an equational theory between
/// Phi0 (slot 1) and Phi1 (slot 2). Every conjunct is universal.
inline ArithFormula build_interval_formula(Real phi0, Real phi1, codec::Signature sig) {
  using detail::forall;
  using detail::V;
  ArithFormula f;
  f.name = "interval";
  f.signature = std::move(sig);
  f.sets = {{"Phi", std::nullopt}, {"Phi0", std::move(phi0)}, {"Phi1", std::move(phi1)}};
  constexpr std::size_t Phi = 0, Phi0 = 1, Phi1 = 2;
  f.conjuncts.push_back(forall("(1) Phi contains only equation codes", {"i"},
                               implies(in(Phi, V(0)), atom(Pred::IsEq, {V(0)}))));
  f.conjuncts.push_back(forall("(2) reflexivity", {"i", "s"},
                               implies(all_of({atom(Pred::IsTerm, {V(1)}),
                                               atom(Pred::CodeEq, {V(0), V(1), V(1)})}),
                                       in(Phi, V(0)))));
  f.conjuncts.push_back(forall("(3) symmetry", {"i", "s", "t", "j"},
                               implies(all_of({atom(Pred::CodeEq, {V(0), V(1), V(2)}),
                                               atom(Pred::CodeEq, {V(3), V(2), V(1)}), in(Phi, V(0))}),
                                       in(Phi, V(3)))));
  f.conjuncts.push_back(forall("(4) transitivity", {"a", "s", "t", "b", "u", "c"},
                               implies(all_of({atom(Pred::CodeEq, {V(0), V(1), V(2)}),
                                               atom(Pred::CodeEq, {V(3), V(2), V(4)}),
                                               atom(Pred::CodeEq, {V(5), V(1), V(4)}),
                                               in(Phi, V(0)), in(Phi, V(3))}),
                                       in(Phi, V(5)))));
  f.conjuncts.push_back(forall("(5) replacement", {"i", "j", "k"},
                               implies(all_of({atom(Pred::IsTerm, {V(1)}), in(Phi, V(2)),
                                               atom(Pred::Rep, {V(0), V(1), V(2)})}),
                                       in(Phi, V(0)))));
  f.conjuncts.push_back(forall("(6) substitution", {"j", "i"},
                               implies(all_of({in(Phi, V(0)), atom(Pred::SubstInst, {V(1), V(0)})}),
                                       in(Phi, V(1)))));
  f.conjuncts.push_back(forall("(7) Phi0 <= Phi <= Phi1", {"i"},
                               all_of({implies(in(Phi0, V(0)), in(Phi, V(0))),
                                       implies(in(Phi, V(0)), in(Phi1, V(0)))})));
  return f;
}

/// alpha(L') for normal extensions of L0, conjoined with the two halves of
///   forall f [f in FFr -> ((forall i in L' Val(f,i)) <-> (forall j in L Val(f,j)))]
/// in prenex form. L' is slot 0, L0 slot 1, L slot 2.
inline ArithFormula build_fmp_formula(Real L0, Real L, codec::Mode mode = codec::Mode::Unimodal) {
  using detail::V;
  ArithFormula f;
  f.name = "fmp";
  f.mode = mode;
  f.sets = {{"L'", std::nullopt}, {"L0", std::move(L0)}, {"L", std::move(L)}};
  constexpr std::size_t Lp = 0, Lz = 1, Lx = 2;
  for (auto& c : detail::normal_logic_conditions(Lp, Lz, mode)) {
    c.label = "alpha: " + c.label;
    f.conjuncts.push_back(std::move(c));
  }
  auto half = [&](std::string label, std::size_t from, std::size_t to) {
    // forall f forall j exists i: f in FFr and j in `to` and not Val(f, j)
    //   -> i in `from` and not Val(f, i)
    Conjunct c{std::move(label),
               {{"f", Quant::Forall, Sort::Frame}, {"j", Quant::Forall, Sort::Code},
                {"i", Quant::Exists, Sort::Code}},
               implies(all_of({atom(Pred::IsFrame, {V(0)}), in(to, V(1)),
                               neg(atom(Pred::Val, {V(0), V(1)}))}),
                       all_of({in(from, V(2)), neg(atom(Pred::Val, {V(0), V(2)}))}))};
    f.conjuncts.push_back(std::move(c));
  };
  half("beta: a frame refuting L refutes L'", Lp, Lx);
  half("beta: a frame refuting L' refutes L", Lx, Lp);
  return f;
}

/// alpha(L') over L, and for every formula phi_i: phi_i in L', or L' + phi_i
/// proves some tab_n, or L' + phi_i proves bottom. L' is slot 0, L slot 1.
inline ArithFormula build_pretab_formula(Real L, hilbert::TabTable tabs,
                                         codec::Mode mode = codec::Mode::Tense) {
  using detail::V;
  ArithFormula f;
  f.name = "pretab";
  f.mode = mode;
  f.tabs = std::move(tabs);
  f.sets = {{"L'", std::nullopt}, {"L", std::move(L)}};
  constexpr std::size_t Lp = 0, Lx = 1;
  for (auto& c : detail::normal_logic_conditions(Lp, Lx, mode)) {
    c.label = "alpha: " + c.label;
    f.conjuncts.push_back(std::move(c));
  }
  const Code bottom = codec::encode_formula(codec::Formula::bottom());
  f.conjuncts.push_back(
      {"every extension by one formula is trivial, tabular or inconsistent",
       {{"i", Quant::Forall, Sort::Code}, {"n", Quant::Exists, Sort::Tab},
        {"p", Quant::Exists, Sort::Proof}, {"q", Quant::Exists, Sort::Proof}},
       implies(atom(Pred::IsFml, {V(0)}),
               any_of({in(Lp, V(0)), atom(Pred::Proof, {V(0), V(2), Arg::tab(1)}, Lp),
                       atom(Pred::Proof, {V(0), V(3), Arg::c(bottom)}, Lp)}))});
  return f;
}

}  // namespace lwb::arith
