#pragma once

// Reals as membership procedures on codes.
//
// A query answers with a value and whether that value is certain. Exact
// realizations are always certain. Theory approximations answer true only
// with a derivation in hand, so their negative answers are uncertain; the
// evaluator reports when such an answer was used.

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lwb/codec/predicates.hpp"
#include "lwb/core/natural.hpp"
#include "lwb/eqlogic/saturate.hpp"
#include "lwb/hilbert/search.hpp"
#include "lwb/kripke/frames.hpp"

namespace lwb::arith {

using codec::Code;

struct Answer {
  bool value = false;
  bool certain = true;
};

class Real {
 public:
  class Impl {
   public:
    virtual ~Impl() = default;
    virtual Answer query(const Code& n) const = 0;
    virtual std::string describe() const = 0;
    /// The finite presentation this real enumerates the theorems of, if any.
    virtual const kripke::LogicPresentation* presentation() const { return nullptr; }
  };

  Real() : Real(finite({})) {}
  explicit Real(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  Answer query(const Code& n) const { return impl_->query(n); }
  bool contains(const Code& n) const { return query(n).value; }
  std::string describe() const { return impl_->describe(); }
  const kripke::LogicPresentation* presentation() const { return impl_->presentation(); }

  static Real finite(std::set<Code> members);
  /// Everything except `excluded`.
  static Real cofinite(std::set<Code> excluded);
  /// bits[n] for n < bits.size(), `rest` beyond.
  static Real prefix(std::vector<bool> bits, bool rest);
  /// {2n : n in a} u {2n+1 : n in b}
  static Real join(Real a, Real b);
  static Real predicate(std::string name, std::function<bool(const Code&)> member);
  static Real all_equations(codec::Signature sig);
  static Real all_formulas(codec::Mode mode);
  /// Equations derivable from `axioms` within `budget`.
  static Real equational_theory(eqlogic::AxiomSet axioms, eqlogic::SaturationBudget budget);
  /// Formulas with a proof from L found within `bounds`.
  static Real logic_theorems(kripke::LogicPresentation L, hilbert::SearchBounds bounds);

 private:
  std::shared_ptr<const Impl> impl_;
};

namespace detail {

inline std::string list_codes(const std::set<Code>& s) {
  std::string out = "{";
  for (const auto& c : s) out += (out.size() > 1 ? ", " : "") + c.str();
  return out + "}";
}

class FiniteReal : public Real::Impl {
 public:
  FiniteReal(std::set<Code> s, bool complement) : s_(std::move(s)), complement_(complement) {}
  Answer query(const Code& n) const override { return {(s_.count(n) > 0) != complement_, true}; }
  std::string describe() const override {
    return (complement_ ? "cofinite, omitting " : "finite ") + list_codes(s_);
  }

 private:
  std::set<Code> s_;
  bool complement_;
};

class PrefixReal : public Real::Impl {
 public:
  PrefixReal(std::vector<bool> bits, bool rest) : bits_(std::move(bits)), rest_(rest) {}
  Answer query(const Code& n) const override {
    if (n < bits_.size()) return {bits_[static_cast<std::size_t>(n)], true};
    return {rest_, true};
  }
  std::string describe() const override {
    std::string out = "prefix ";
    for (bool b : bits_) out += b ? '1' : '0';
    return out + (rest_ ? " then 1s" : " then 0s");
  }

 private:
  std::vector<bool> bits_;
  bool rest_;
};

class JoinReal : public Real::Impl {
 public:
  JoinReal(Real a, Real b) : a_(std::move(a)), b_(std::move(b)) {}
  Answer query(const Code& n) const override {
    return (n & 1) == 0 ? a_.query(n / 2) : b_.query((n - 1) / 2);
  }
  std::string describe() const override {
    return "join(" + a_.describe() + ", " + b_.describe() + ")";
  }

 private:
  Real a_, b_;
};

class PredicateReal : public Real::Impl {
 public:
  PredicateReal(std::string name, std::function<bool(const Code&)> f)
      : name_(std::move(name)), f_(std::move(f)) {}
  Answer query(const Code& n) const override { return {f_(n), true}; }
  std::string describe() const override { return name_; }

 private:
  std::string name_;
  std::function<bool(const Code&)> f_;
};

/// Saturates once, on first use. Equations are looked up after renaming
/// their variables to x0, x1, ... in order of first occurrence; theories
/// are closed under renaming, so this loses nothing inside the region.
class EquationalReal : public Real::Impl {
 public:
  EquationalReal(eqlogic::AxiomSet ax, eqlogic::SaturationBudget budget)
      : ax_(std::move(ax)), budget_(budget) {}

  Answer query(const Code& n) const override {
    auto e = codec::try_decode_equation(n, ax_.signature);
    if (!e) return {false, true};
    std::call_once(once_, [&] { result_ = eqlogic::saturate(ax_, budget_); });
    std::map<std::uint64_t, codec::Term> rename;
    std::function<void(const codec::Term&)> visit = [&](const codec::Term& t) {
      if (t.is_var()) {
        rename.emplace(t.index(), codec::var(rename.size()));
        return;
      }
      for (const auto& a : t.args()) visit(a);
    };
    visit(e->left);
    visit(e->right);
    std::vector<codec::Term> subst;
    for (const auto& [v, t] : rename) {
      if (subst.size() <= v) subst.resize(v + 1);
      subst[v] = t;
    }
    const codec::Equation canon = e->substitute(subst);
    if (result_.contains(canon)) return {true, true};
    return {false, false};
  }
  std::string describe() const override {
    std::string out = "equational theory of {";
    for (std::size_t i = 0; i < ax_.axioms.size(); ++i)
      out += (i ? ", " : "") + ax_.axioms[i].str();
    return out + "} within term size " + std::to_string(budget_.max_term_size) + ", " +
           std::to_string(budget_.max_vars) + " variables";
  }

 private:
  eqlogic::AxiomSet ax_;
  eqlogic::SaturationBudget budget_;
  mutable std::once_flag once_;
  mutable eqlogic::SaturationResult result_;
};

class LogicReal : public Real::Impl {
 public:
  LogicReal(kripke::LogicPresentation L, hilbert::SearchBounds bounds)
      : base_(hilbert::ProofBase::axiomatic(L)), L_(std::move(L)), bounds_(bounds) {}

  Answer query(const Code& n) const override {
    {
      std::lock_guard lock(mu_);
      if (auto it = cache_.find(n); it != cache_.end()) return it->second;
    }
    Answer a{false, true};
    if (auto f = codec::try_decode_formula(n, L_.mode)) {
      const bool found = std::holds_alternative<hilbert::Found>(
          hilbert::search_proof(base_, std::nullopt, *f, bounds_));
      a = {found, found};
    }
    std::lock_guard lock(mu_);
    cache_.emplace(n, a);
    return a;
  }
  std::string describe() const override {
    return "theorems of " + L_.str() + " with proofs of length <= " +
           std::to_string(bounds_.length);
  }
  const kripke::LogicPresentation* presentation() const override { return &L_; }

 private:
  hilbert::ProofBase base_;
  kripke::LogicPresentation L_;
  hilbert::SearchBounds bounds_;
  mutable std::mutex mu_;
  mutable std::map<Code, Answer> cache_;
};

}  // namespace detail

inline Real Real::finite(std::set<Code> members) {
  return Real(std::make_shared<detail::FiniteReal>(std::move(members), false));
}
inline Real Real::cofinite(std::set<Code> excluded) {
  return Real(std::make_shared<detail::FiniteReal>(std::move(excluded), true));
}
inline Real Real::prefix(std::vector<bool> bits, bool rest) {
  return Real(std::make_shared<detail::PrefixReal>(std::move(bits), rest));
}
inline Real Real::join(Real a, Real b) {
  return Real(std::make_shared<detail::JoinReal>(std::move(a), std::move(b)));
}
inline Real Real::predicate(std::string name, std::function<bool(const Code&)> member) {
  return Real(std::make_shared<detail::PredicateReal>(std::move(name), std::move(member)));
}
inline Real Real::all_equations(codec::Signature sig) {
  return predicate("all equations over [" + sig.str() + "]",
                   [sig](const Code& c) { return codec::is_eq_code(c, sig); });
}
inline Real Real::all_formulas(codec::Mode mode) {
  return predicate(std::string("all ") + codec::mode_name(mode) + " formulas",
                   [mode](const Code& c) { return codec::is_formula_code(c, mode); });
}
inline Real Real::equational_theory(eqlogic::AxiomSet axioms, eqlogic::SaturationBudget budget) {
  return Real(std::make_shared<detail::EquationalReal>(std::move(axioms), budget));
}
inline Real Real::logic_theorems(kripke::LogicPresentation L, hilbert::SearchBounds bounds) {
  return Real(std::make_shared<detail::LogicReal>(std::move(L), bounds));
}

}  // namespace lwb::arith
