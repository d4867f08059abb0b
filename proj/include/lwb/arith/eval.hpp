#pragma once

// Bounded evaluation of arithmetical formulas.
//
// Every Code variable ranges over [0, bound] and every Frame variable over
// [0, frame_bound]. Proof variables range over proofs found by search for
// the Proof atoms that mention them (plus the empty proof), Tab variables
// over the keys of the tab table. Universal variables that a guard atom pins
// down (x = pair(l, r), k = i -> j, the members of a set, ...) only visit
// the pinned values. The matrix is evaluated three-valued after each
// binding, so a tuple is abandoned as soon as its value is settled.
//
// Set membership answers may be uncertain (see Real). A verdict reached
// after consulting such an answer carries `caveat`.

#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lwb/arith/formula.hpp"
#include "lwb/codec/frame.hpp"
#include "lwb/codec/predicates.hpp"
#include "lwb/core/error.hpp"
#include "lwb/core/parallel.hpp"
#include "lwb/hilbert/proof.hpp"
#include "lwb/hilbert/search.hpp"
#include "lwb/kripke/validity.hpp"

namespace lwb::arith {

/// Ranges are cached in flat tables, so bounds are capped.
inline constexpr std::uint64_t kMaxEvalBound = std::uint64_t{1} << 22;

struct EvalOptions {
  std::uint64_t bound = 256;
  /// Defaults to `bound`.
  std::optional<std::uint64_t> frame_bound;
  hilbert::SearchBounds proof_search{4, 12, 20000};
  unsigned threads = 1;
};

struct Binding {
  std::string name;
  Code value;
  friend bool operator==(const Binding&, const Binding&) = default;
};

/// The bounded formula is false: the universal variables of `conjunct` take
/// the values in `assignment` (variables left out were never reached) and no
/// existential witness exists within the bounds.
struct Falsified {
  std::size_t conjunct = 0;
  std::string label;
  std::vector<Binding> assignment;
  bool caveat = false;
};
/// Universal formula, true on the whole bounded range.
struct ConsistentUpTo {
  std::uint64_t bound = 0;
  bool caveat = false;
};
/// Forall-exists formula, every universal tuple in range has a witness.
struct WitnessedUpTo {
  std::uint64_t bound = 0;
  bool caveat = false;
};
using EvalVerdict = std::variant<ConsistentUpTo, WitnessedUpTo, Falsified>;

inline bool caveat_of(const EvalVerdict& v) {
  return std::visit([](const auto& x) { return x.caveat; }, v);
}

inline std::string verdict_str(const EvalVerdict& v) {
  std::string out;
  if (auto* c = std::get_if<ConsistentUpTo>(&v)) {
    out = "ConsistentUpTo(" + std::to_string(c->bound) + ")";
  } else if (auto* w = std::get_if<WitnessedUpTo>(&v)) {
    out = "WitnessedUpTo(" + std::to_string(w->bound) + ")";
  } else {
    const auto& f = std::get<Falsified>(v);
    out = "Falsified(conjunct " + std::to_string(f.conjunct + 1) + ": " + f.label + ";";
    for (const auto& b : f.assignment) out += " " + b.name + "=" + b.value.str();
    out += ")";
  }
  if (caveat_of(v)) out += " [uses uncertain membership answers]";
  return out;
}

namespace detail {

enum class Tri : std::uint8_t { False, True, Unknown };

using Values = std::vector<std::optional<Code>>;

/// Tri-state cache of a predicate on [0, size): 0 unknown, 1 false, 2 true,
/// and +2 when the answer was uncertain.
class FlatCache {
 public:
  explicit FlatCache(std::uint64_t size) : cells_(size) {}

  template <typename F>
  Answer get(const Code& c, F compute) {
    if (c >= cells_.size()) return compute();
    auto& cell = cells_[static_cast<std::size_t>(c)];
    std::uint8_t s = cell.load(std::memory_order_relaxed);
    if (s == 0) {
      const Answer a = compute();
      s = static_cast<std::uint8_t>((a.value ? 2 : 1) + (a.certain ? 0 : 2));
      cell.store(s, std::memory_order_relaxed);
    }
    return {s == 2 || s == 4, s <= 2};
  }

 private:
  std::vector<std::atomic<std::uint8_t>> cells_;
};

/// Per-task state: whether an uncertain answer was consulted.
struct Context {
  bool caveat = false;
};

class Evaluator {
 public:
  Evaluator(const ArithFormula& f, Real candidate, const EvalOptions& opts)
      : f_(f), opts_(opts) {
    if (opts.bound >= kMaxEvalBound || opts.frame_bound.value_or(0) >= kMaxEvalBound)
      throw EnumerationTooLarge("evaluation bound above " + std::to_string(kMaxEvalBound));
    if (f.sets.empty() || f.sets[0].value)
      throw Error("formula has no free set variable in slot 0");
    sets_.push_back(std::move(candidate));
    for (std::size_t s = 1; s < f.sets.size(); ++s) {
      if (!f.sets[s].value) throw Error("set slot " + f.sets[s].name + " has no value");
      sets_.push_back(*f.sets[s].value);
    }
    const std::uint64_t size = std::max(opts.bound, frame_bound()) + 1;
    for (std::size_t s = 0; s < sets_.size(); ++s) in_.push_back(std::make_unique<FlatCache>(size));
    is_term_ = std::make_unique<FlatCache>(size);
    is_eq_ = std::make_unique<FlatCache>(size);
    is_fml_ = std::make_unique<FlatCache>(size);
    for (const auto& [n, tab] : f.tabs) tab_codes_.emplace(n, codec::encode_formula(tab));
  }

  std::uint64_t frame_bound() const { return opts_.frame_bound.value_or(opts_.bound); }

  /// Checks one conjunct, with `pinned` values fixed in advance. Returns the
  /// failing assignment, if any.
  std::optional<Values> check(std::size_t conjunct, const Values& pinned, Context& ctx) const {
    const Conjunct& c = f_.conjuncts.at(conjunct);
    Values vals = pinned;
    vals.resize(c.prefix.size());
    if (c.prefix.empty() || c.prefix[0].quant != Quant::Forall || (!pinned.empty() && pinned[0])) {
      if (holds(c, 0, vals, ctx)) return std::nullopt;
      return vals;
    }
    // Outer universal variable: fixed-size chunks, so the result and the
    // caveat flag do not depend on the thread count.
    const std::vector<Code> outer = candidates(c, 0, vals, ctx);
    constexpr std::size_t kChunk = 16;
    const std::size_t chunks = (outer.size() + kChunk - 1) / kChunk;
    std::vector<std::optional<Values>> fail(chunks);
    std::vector<char> caveat(chunks, 0);
    std::atomic<std::size_t> first_fail{chunks};
    parallel_for(chunks, opts_.threads, [&](std::size_t k) {
      if (k > first_fail.load()) return;
      Context local;
      Values v = vals;
      for (std::size_t i = k * kChunk; i < std::min(outer.size(), (k + 1) * kChunk); ++i) {
        v[0] = outer[i];
        if (!holds(c, 1, v, local)) {
          fail[k] = v;
          std::size_t cur = first_fail.load();
          while (k < cur && !first_fail.compare_exchange_weak(cur, k)) {
          }
          break;
        }
      }
      caveat[k] = local.caveat;
    });
    const std::size_t stop = first_fail.load();
    for (std::size_t k = 0; k < std::min(stop + 1, chunks); ++k) ctx.caveat |= caveat[k] != 0;
    if (stop < chunks) return fail[stop];
    return std::nullopt;
  }

 private:
  // Quantifier recursion.

  bool holds(const Conjunct& c, std::size_t k, Values& vals, Context& ctx) const {
    const Tri t = eval(c.matrix, vals, ctx);
    if (t != Tri::Unknown) return t == Tri::True;
    if (k >= c.prefix.size()) throw Error("unbound variable in " + c.label);
    if (vals[k]) return holds(c, k + 1, vals, ctx);
    const std::vector<Code> cands = candidates(c, k, vals, ctx);
    if (c.prefix[k].quant == Quant::Forall) {
      for (const auto& v : cands) {
        vals[k] = v;
        if (!holds(c, k + 1, vals, ctx)) return false;
      }
      vals[k].reset();
      return true;
    }
    for (const auto& v : cands) {
      vals[k] = v;
      if (holds(c, k + 1, vals, ctx)) {
        vals[k].reset();
        return true;
      }
    }
    vals[k].reset();
    return false;
  }

  std::uint64_t bound_of(Sort s) const { return s == Sort::Frame ? frame_bound() : opts_.bound; }

  std::vector<Code> range(std::uint64_t hi) const {
    std::vector<Code> out;
    out.reserve(hi + 1);
    for (std::uint64_t i = 0; i <= hi; ++i) out.emplace_back(i);
    return out;
  }

  std::vector<Code> candidates(const Conjunct& c, std::size_t k, const Values& vals,
                               Context& ctx) const {
    const Variable& var = c.prefix[k];
    switch (var.sort) {
      case Sort::Tab: {
        std::vector<Code> out;
        for (const auto& [n, code] : tab_codes_) out.emplace_back(n);
        if (out.empty()) out.emplace_back(0);  // refers to no tab, so atoms on it are false
        return out;
      }
      case Sort::Proof: {
        std::vector<Code> out;
        proof_hints(c.matrix, k, vals, ctx, out);
        out.emplace_back(0);  // the empty proof, which proves nothing
        return out;
      }
      default: break;
    }
    const std::uint64_t hi = bound_of(var.sort);
    const Expr* pins = nullptr;
    if (c.matrix.kind == Expr::Kind::Implies)
      pins = var.quant == Quant::Forall ? &c.matrix.kids[0] : &c.matrix.kids[1];
    else if (var.quant == Quant::Exists)
      pins = &c.matrix;
    if (pins) {
      if (auto forced = pinned(*pins, k, vals, ctx)) {
        std::erase_if(*forced, [&](const Code& x) { return x > hi; });
        return *forced;
      }
    }
    return range(hi);
  }

  /// Values of variable k that can make the conjunction `e` true, when some
  /// atom of `e` determines them; nullopt when none does.
  std::optional<std::vector<Code>> pinned(const Expr& e, std::size_t k, const Values& vals,
                                          Context& ctx) const {
    std::vector<const Atom*> atoms;
    if (e.kind == Expr::Kind::Atom) atoms.push_back(&e.atom);
    if (e.kind == Expr::Kind::And)
      for (const auto& kid : e.kids)
        if (kid.kind == Expr::Kind::Atom) atoms.push_back(&kid.atom);
    auto is_v = [&](const Arg& a) { return a.kind == Arg::Kind::Var && a.var == k; };
    auto val = [&](const Arg& a) { return resolve(a, vals); };
    for (const Atom* a : atoms) {
      const auto& x = a->args;
      switch (a->pred) {
        case Pred::CodeEq: {
          if (is_v(x[0]) && val(x[1]) && val(x[2])) return std::vector{pair(*val(x[1]), *val(x[2]))};
          if ((is_v(x[1]) || is_v(x[2])) && val(x[0])) {
            auto [l, r] = unpair(*val(x[0]));
            return std::vector{is_v(x[1]) ? l : r};
          }
          break;
        }
        case Pred::IsImp: {
          if (is_v(x[0]) && val(x[1]) && val(x[2]))
            return std::vector{pair(3, pair(*val(x[1]), *val(x[2])))};
          if ((is_v(x[1]) || is_v(x[2])) && val(x[0])) {
            auto [tag, payload] = unpair(*val(x[0]));
            if (tag != 3) return std::vector<Code>{};
            auto [l, r] = unpair(payload);
            return std::vector{is_v(x[1]) ? l : r};
          }
          break;
        }
        case Pred::IsBox: {
          if (!val(x[2])) break;
          const Code s = *val(x[2]);
          if (is_v(x[0]) && val(x[1])) return std::vector{pair(4 + s, *val(x[1]))};
          if (is_v(x[1]) && val(x[0])) {
            auto [tag, payload] = unpair(*val(x[0]));
            if (tag != 4 + s) return std::vector<Code>{};
            return std::vector{payload};
          }
          break;
        }
        case Pred::Rep: {
          if (is_v(x[1]) && val(x[0])) {
            auto eq = codec::try_decode_equation(*val(x[0]), f_.signature);
            if (!eq) return std::vector<Code>{};
            return std::vector{codec::encode_term(eq->left, f_.signature)};
          }
          break;
        }
        default: break;
      }
    }
    // Members of a set, when membership is part of the conjunction.
    for (const Atom* a : atoms)
      if (a->pred == Pred::In && is_v(a->args[0])) {
        std::vector<Code> out;
        const std::uint64_t hi = bound_of(Sort::Code);
        for (std::uint64_t i = 0; i <= hi; ++i)
          if (member(a->set, Code(i), ctx)) out.emplace_back(i);
        return out;
      }
    return std::nullopt;
  }

  void proof_hints(const Expr& e, std::size_t k, const Values& vals, Context& ctx,
                   std::vector<Code>& out) const {
    if (e.kind != Expr::Kind::Atom) {
      for (const auto& kid : e.kids) proof_hints(kid, k, vals, ctx, out);
      return;
    }
    const Atom& a = e.atom;
    if (a.pred != Pred::Proof) return;
    if (a.args[1].kind != Arg::Kind::Var || a.args[1].var != k) return;
    auto i = resolve(a.args[0], vals);
    auto j = resolve(a.args[2], vals);
    if (!i || !j) return;
    auto extra = codec::try_decode_formula(*i, f_.mode);
    auto goal = codec::try_decode_formula(*j, f_.mode);
    if (!extra || !goal) return;
    // Searching through a membership oracle asks it about every formula in
    // the pool. For a theorem set of a finite presentation, search the
    // presentation instead and cite its axiom lines as members.
    if (const auto* L = sets_[a.set].presentation(); L && L->mode == f_.mode) {
      auto r = hilbert::search_proof(hilbert::ProofBase::axiomatic(*L), extra, *goal,
                                     opts_.proof_search);
      if (auto* found = std::get_if<hilbert::Found>(&r)) {
        for (auto& step : found->proof)
          if (step.why.kind == hilbert::Justification::Kind::Axiom)
            step.why = hilbert::Justification::in_base();
        out.push_back(hilbert::encode_proof(found->proof));
      }
      return;
    }
    auto r = hilbert::search_proof(proof_base(a.set, ctx), extra, *goal, opts_.proof_search);
    if (auto* found = std::get_if<hilbert::Found>(&r))
      out.push_back(hilbert::encode_proof(found->proof));
  }

  // Three-valued evaluation.

  Tri eval(const Expr& e, const Values& vals, Context& ctx) const {
    switch (e.kind) {
      case Expr::Kind::Atom: return eval_atom(e.atom, vals, ctx);
      case Expr::Kind::Not: {
        const Tri t = eval(e.kids[0], vals, ctx);
        return t == Tri::Unknown ? t : t == Tri::True ? Tri::False : Tri::True;
      }
      case Expr::Kind::And: {
        Tri out = Tri::True;
        for (const Expr* kid : by_cost(e)) {
          const Tri t = eval(*kid, vals, ctx);
          if (t == Tri::False) return t;
          if (t == Tri::Unknown) out = t;
        }
        return out;
      }
      case Expr::Kind::Or: {
        Tri out = Tri::False;
        for (const Expr* kid : by_cost(e)) {
          const Tri t = eval(*kid, vals, ctx);
          if (t == Tri::True) return t;
          if (t == Tri::Unknown) out = t;
        }
        return out;
      }
      case Expr::Kind::Implies: {
        const Tri a = eval(e.kids[0], vals, ctx);
        if (a == Tri::False) return Tri::True;
        const Tri b = eval(e.kids[1], vals, ctx);
        if (b == Tri::True) return Tri::True;
        return a == Tri::True ? b : Tri::Unknown;
      }
    }
    return Tri::Unknown;
  }

  static int cost(const Expr& e) {
    if (e.kind != Expr::Kind::Atom) {
      int c = 0;
      for (const auto& k : e.kids) c = std::max(c, cost(k));
      return c;
    }
    switch (e.atom.pred) {
      case Pred::CodeEq: return 0;
      case Pred::In:
      case Pred::IsTerm:
      case Pred::IsEq:
      case Pred::IsFml:
      case Pred::IsFrame: return 1;
      case Pred::IsImp:
      case Pred::IsBox: return 2;
      case Pred::Val:
      case Pred::Proof: return 4;
      default: return 3;
    }
  }

  static std::vector<const Expr*> by_cost(const Expr& e) {
    std::vector<const Expr*> out;
    for (const auto& k : e.kids) out.push_back(&k);
    std::stable_sort(out.begin(), out.end(),
                     [](const Expr* a, const Expr* b) { return cost(*a) < cost(*b); });
    return out;
  }

  /// nullopt when unbound. A tab of an unknown index resolves to a code that
  /// is no formula.
  std::optional<Code> resolve(const Arg& a, const Values& vals) const {
    switch (a.kind) {
      case Arg::Kind::Const: return a.value;
      case Arg::Kind::Var: return vals.at(a.var);
      case Arg::Kind::TabOf: {
        const auto& n = vals.at(a.var);
        if (!n) return std::nullopt;
        auto it = *n > std::numeric_limits<std::uint64_t>::max()
                      ? tab_codes_.end()
                      : tab_codes_.find(static_cast<std::uint64_t>(*n));
        return it == tab_codes_.end() ? Code(4) : it->second;
      }
    }
    return std::nullopt;
  }

  bool member(std::size_t set, const Code& x, Context& ctx) const {
    const Answer a = in_.at(set)->get(x, [&] { return sets_[set].query(x); });
    if (!a.certain) ctx.caveat = true;
    return a.value;
  }

  bool is_fml(const Code& x) const {
    return is_fml_->get(x, [&] { return Answer{codec::is_formula_code(x, f_.mode), true}; }).value;
  }
  bool is_term(const Code& x) const {
    return is_term_->get(x, [&] { return Answer{codec::is_term_code(x, f_.signature), true}; }).value;
  }
  bool is_eq(const Code& x) const {
    return is_eq_->get(x, [&] { return Answer{codec::is_eq_code(x, f_.signature), true}; }).value;
  }

  hilbert::ProofBase proof_base(std::size_t set, Context& ctx) const {
    return hilbert::ProofBase::oracle([this, set, &ctx](const Code& c) { return member(set, c, ctx); },
                                      f_.mode);
  }

  bool is_axiom(const codec::Formula& g) const {
    const unsigned slots = f_.mode == codec::Mode::Tense ? 2 : 1;
    for (unsigned s = 0; s < slots; ++s) {
      if (codec::match_formula(kripke::k_axiom(s), g)) return true;
      if (f_.mode == codec::Mode::Tense && codec::match_formula(kripke::tense_duality(s), g))
        return true;
    }
    return false;
  }

  Tri eval_atom(const Atom& a, const Values& vals, Context& ctx) const {
    std::vector<Code> x;
    x.reserve(a.args.size());
    for (const auto& arg : a.args) {
      auto v = resolve(arg, vals);
      if (!v) return Tri::Unknown;
      x.push_back(std::move(*v));
    }
    return holds_atom(a, x, ctx) ? Tri::True : Tri::False;
  }

  bool holds_atom(const Atom& a, const std::vector<Code>& x, Context& ctx) const {
    const codec::Mode mode = f_.mode;
    switch (a.pred) {
      case Pred::IsTerm: return is_term(x[0]);
      case Pred::IsEq: return is_eq(x[0]);
      case Pred::IsFml: return is_fml(x[0]);
      case Pred::IsFrame: return codec::is_frame_code(x[0]);
      case Pred::CodeEq: return x[0] == pair(x[1], x[2]);
      case Pred::Rep: return codec::is_replacement_instance(x[0], x[1], x[2], f_.signature);
      case Pred::SubstInst: return codec::is_substitution_instance(x[0], x[1], f_.signature);
      case Pred::FmlSubstInst: {
        if (!is_fml(x[0]) || !is_fml(x[1])) return false;
        return codec::match_formula(codec::decode_formula(x[1], mode),
                                    codec::decode_formula(x[0], mode))
            .has_value();
      }
      case Pred::IsImp: return x[0] == pair(3, pair(x[1], x[2])) && is_fml(x[1]) && is_fml(x[2]);
      case Pred::IsBox:
        if (x[2] > 1 || (x[2] == 1 && mode != codec::Mode::Tense)) return false;
        return x[0] == pair(4 + x[2], x[1]) && is_fml(x[1]);
      case Pred::IsTaut: return is_fml(x[0]) && hilbert::tautology_check(codec::decode_formula(x[0], mode));
      case Pred::IsAx: return is_fml(x[0]) && is_axiom(codec::decode_formula(x[0], mode));
      case Pred::Val: {
        if (!codec::is_frame_code(x[0]) || !is_fml(x[1])) return false;
        return kripke::validates(codec::decode_frame(x[0], mode), codec::decode_formula(x[1], mode));
      }
      case Pred::Proof: {
        if (!is_fml(x[0]) || !is_fml(x[2])) return false;
        try {
          const auto proof = hilbert::decode_proof(x[1], mode);
          return hilbert::check_proof(proof_base(a.set, ctx), codec::decode_formula(x[0], mode), proof,
                                      codec::decode_formula(x[2], mode));
        } catch (const Error&) {
          return false;
        }
      }
      case Pred::In: return member(a.set, x[0], ctx);
    }
    return false;
  }

  const ArithFormula& f_;
  EvalOptions opts_;
  std::vector<Real> sets_;
  std::vector<std::unique_ptr<FlatCache>> in_;
  std::unique_ptr<FlatCache> is_term_, is_eq_, is_fml_;
  std::map<std::uint64_t, Code> tab_codes_;
};

inline std::vector<Binding> bindings(const Conjunct& c, const Values& vals) {
  std::vector<Binding> out;
  for (std::size_t i = 0; i < c.prefix.size(); ++i)
    if (c.prefix[i].quant == Quant::Forall && vals[i]) out.push_back({c.prefix[i].name, *vals[i]});
  return out;
}

}  // namespace detail

/// Evaluates `f` with `candidate` as the free set, conjunct by conjunct.
/// Falsified names the first failing conjunct and its least failing tuple
/// in enumeration order.
inline EvalVerdict eval_bounded(const ArithFormula& f, const Real& candidate,
                                const EvalOptions& opts = {}) {
  const detail::Evaluator ev(f, candidate, opts);
  detail::Context ctx;
  for (std::size_t i = 0; i < f.conjuncts.size(); ++i)
    if (auto fail = ev.check(i, {}, ctx))
      return Falsified{i, f.conjuncts[i].label, detail::bindings(f.conjuncts[i], *fail), ctx.caveat};
  const Classification c = classify(f);
  if (c.level == Level::Pi && c.n <= 1) return ConsistentUpTo{opts.bound, ctx.caveat};
  return WitnessedUpTo{opts.bound, ctx.caveat};
}

/// Re-checks a Falsified verdict from scratch: the named conjunct must fail
/// again with the reported values pinned.
inline bool replay(const ArithFormula& f, const Real& candidate, const Falsified& v,
                   const EvalOptions& opts = {}) {
  if (v.conjunct >= f.conjuncts.size()) return false;
  const Conjunct& c = f.conjuncts[v.conjunct];
  detail::Values pinned(c.prefix.size());
  for (const auto& b : v.assignment) {
    auto it = std::find_if(c.prefix.begin(), c.prefix.end(),
                           [&](const Variable& x) { return x.name == b.name; });
    if (it == c.prefix.end()) return false;
    pinned[static_cast<std::size_t>(it - c.prefix.begin())] = b.value;
  }
  EvalOptions serial = opts;
  serial.threads = 1;
  const detail::Evaluator ev(f, candidate, serial);
  detail::Context ctx;
  return ev.check(v.conjunct, pinned, ctx).has_value();
}

}  // namespace lwb::arith
