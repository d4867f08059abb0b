// lwb: command-line front end to the logic workbench.
//
// Exit codes: 0 success, 1 domain error (or Falsified under
// --expect-consistent), 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lwb/arith/eval.hpp"
#include "lwb/arith/formula.hpp"
#include "lwb/arith/real.hpp"
#include "lwb/codec.hpp"
#include "lwb/eqlogic/algebra.hpp"
#include "lwb/eqlogic/saturate.hpp"
#include "lwb/hilbert/proof.hpp"
#include "lwb/hilbert/search.hpp"
#include "lwb/hilbert/text.hpp"
#include "lwb/kripke/frames.hpp"
#include "lwb/kripke/validity.hpp"
#include "lwb/lattice/lattice.hpp"

namespace {

using json = nlohmann::json;
using namespace lwb;
using codec::Code;
using codec::Formula;
using codec::Mode;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// What a subcommand produced: the same content as text and as JSON.
struct Output {
  json data = json::object();
  std::string text;
  int status = 0;

  void line(const std::string& s) { text += s + "\n"; }
};

// Input helpers.

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Non-blank lines with '#' comments removed.
std::vector<std::string> content_lines(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> out;
  std::string raw;
  while (std::getline(in, raw)) {
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    const auto b = raw.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = raw.find_last_not_of(" \t\r");
    out.push_back(raw.substr(b, e - b + 1));
  }
  return out;
}

std::uint64_t env_u64(const char* name, std::uint64_t fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  char* end = nullptr;
  const auto n = std::strtoull(v, &end, 10);
  if (*end != '\0') throw UsageError(std::string(name) + " must be a natural number");
  return n;
}

Mode mode_of(bool tense) { return tense ? Mode::Tense : Mode::Unimodal; }

Code parse_code(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw UsageError("not a natural number: " + s);
  return Code(s);
}

/// Signature from --sig, or inferred from the equations (symbols f0, f1,
/// ... with the arities they are used at).
struct EquationInput {
  codec::Signature sig;
  bool fixed = false;

  codec::Equation equation(const std::string& text) {
    return fixed ? codec::parse_equation(text, static_cast<const codec::Signature&>(sig))
                 : codec::parse_equation(text, sig, true);
  }
  codec::Term term(const std::string& text) {
    return fixed ? codec::parse_term(text, static_cast<const codec::Signature&>(sig))
                 : codec::parse_term(text, sig, true);
  }
};

EquationInput equation_input(const std::string& sig) {
  EquationInput in;
  if (!sig.empty()) {
    in.sig = codec::Signature::parse(sig == "-" ? "" : sig);
    in.fixed = true;
  }
  return in;
}

kripke::LogicPresentation logic_from(const std::vector<std::string>& files,
                                     const std::vector<std::string>& formulas, bool tense) {
  kripke::LogicPresentation L;
  L.mode = mode_of(tense);
  for (const auto& f : files)
    for (const auto& line : content_lines(f)) L.axioms.push_back(codec::parse_formula(line));
  for (const auto& f : formulas) L.axioms.push_back(codec::parse_formula(f));
  L.validate();
  return L;
}

json frame_json(const codec::FiniteFrame& f) {
  json edges = json::array();
  for (auto [i, j] : f.edges()) edges.push_back({i, j});
  return {{"code", codec::encode_frame(f).str()}, {"size", f.size()}, {"edges", edges}};
}

std::string set_str(std::uint64_t mask, std::size_t n) {
  std::string out = "{";
  for (std::size_t x = 0; x < n; ++x)
    if (mask >> x & 1) out += (out.size() > 1 ? "," : "") + std::to_string(x);
  return out + "}";
}

// Real parameters for eval, given as JSON:
//   {"kind": "finite", "codes": [0, 5]}      {"kind": "cofinite", "codes": [...]}
//   {"kind": "prefix", "bits": "1011", "rest": false}
//   {"kind": "join", "left": {...}, "right": {...}}
//   {"kind": "all-equations", "sig": "2"}    {"kind": "all-formulas", "tense": true}
//   {"kind": "equational-theory", "sig": "2", "axioms": ["x0*x1 = x1*x0"],
//    "max_term_size": 5, "max_vars": 2}
//   {"kind": "logic", "tense": false, "axioms": ["box0 p0 -> p0"],
//    "proof_bound": 8, "formula_size": 16}
arith::Real real_from(const json& j) {
  const std::string kind = j.at("kind");
  auto codes = [&] {
    std::set<Code> s;
    for (const auto& c : j.value("codes", json::array()))
      s.insert(c.is_string() ? parse_code(c.get<std::string>()) : Code(c.get<std::uint64_t>()));
    return s;
  };
  if (kind == "finite") return arith::Real::finite(codes());
  if (kind == "cofinite") return arith::Real::cofinite(codes());
  if (kind == "prefix") {
    std::vector<bool> bits;
    for (char c : j.at("bits").get<std::string>()) {
      if (c != '0' && c != '1') throw Error("prefix bits must be 0 or 1");
      bits.push_back(c == '1');
    }
    return arith::Real::prefix(bits, j.value("rest", false));
  }
  if (kind == "join") return arith::Real::join(real_from(j.at("left")), real_from(j.at("right")));
  if (kind == "all-equations")
    return arith::Real::all_equations(codec::Signature::parse(j.at("sig").get<std::string>()));
  if (kind == "all-formulas") return arith::Real::all_formulas(mode_of(j.value("tense", false)));
  if (kind == "equational-theory") {
    auto in = equation_input(j.at("sig").get<std::string>());
    std::vector<codec::Equation> axioms;
    for (const auto& a : j.at("axioms")) axioms.push_back(in.equation(a.get<std::string>()));
    eqlogic::SaturationBudget budget;
    budget.max_term_size = j.value("max_term_size", budget.max_term_size);
    budget.max_vars = j.value("max_vars", budget.max_vars);
    return arith::Real::equational_theory(eqlogic::AxiomSet::make(in.sig, std::move(axioms)), budget);
  }
  if (kind == "logic") {
    kripke::LogicPresentation L;
    L.mode = mode_of(j.value("tense", false));
    for (const auto& a : j.value("axioms", json::array()))
      L.axioms.push_back(codec::parse_formula(a.get<std::string>()));
    L.validate();
    hilbert::SearchBounds b;
    b.length = j.value("proof_bound", b.length);
    b.formula_size = j.value("formula_size", b.formula_size);
    return arith::Real::logic_theorems(std::move(L), b);
  }
  throw Error("unknown real kind '" + kind + "'");
}

arith::Real real_file(const std::string& path) {
  try {
    return real_from(json::parse(read_file(path)));
  } catch (const json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

lattice::FiniteLattice lattice_file(const std::string& path, std::string& name) {
  try {
    const json j = json::parse(read_file(path));
    name = j.value("name", path);
    const auto names = j.at("elements").get<std::vector<std::string>>();
    auto idx = [&](const std::string& s) {
      auto it = std::find(names.begin(), names.end(), s);
      if (it == names.end()) throw Error(path + ": unknown element " + s);
      return static_cast<std::size_t>(it - names.begin());
    };
    std::vector<std::pair<std::size_t, std::size_t>> order;
    for (const auto& p : j.at("order")) order.emplace_back(idx(p.at(0)), idx(p.at(1)));
    return lattice::FiniteLattice::from_order(names, lattice::FinitePoset(names.size(), order));
  } catch (const json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lwb: Goedel codes, equational and modal logic, bounded arithmetical checks"};
  app.require_subcommand(1);
  std::string format = "text";
  unsigned threads = 1;
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 256u))->capture_default_str();

  std::function<Output()> run;

  // encode / decode

  auto* encode = app.add_subcommand("encode", "Print the code of a term, equation, formula or frame");
  std::string enc_term, enc_eq, enc_fml, enc_frame, sig;
  bool tense = false;
  {
    auto* t = encode->add_option("--term", enc_term, "Term, e.g. f0(x0, x1)");
    auto* e = encode->add_option("--equation", enc_eq, "Equation, e.g. x0*x1 = x1*x0");
    auto* f = encode->add_option("--formula", enc_fml, "Formula, e.g. box0 p0 -> p0");
    auto* r = encode->add_option("--frame", enc_frame, "Frame record {size: n, edges: [[i,j],...]}");
    t->excludes(e, f, r);
    e->excludes(f, r);
    f->excludes(r);
    encode->add_option("--sig", sig, "Arities of f0, f1, ... e.g. 2,1 (inferred when omitted)");
    encode->callback([&] {
      run = [&] {
        Output out;
        if (!enc_term.empty()) {
          auto in = equation_input(sig);
          const auto term = in.term(enc_term);
          const Code c = codec::encode_term(term, in.sig);
          out.data = {{"kind", "term"}, {"text", term.str()}, {"sig", in.sig.str()}, {"code", c.str()}};
          out.line(c.str());
        } else if (!enc_eq.empty()) {
          auto in = equation_input(sig);
          const auto eq = in.equation(enc_eq);
          const Code c = codec::encode_equation(eq, in.sig);
          out.data = {{"kind", "equation"}, {"text", eq.str()}, {"sig", in.sig.str()}, {"code", c.str()}};
          out.line(c.str());
        } else if (!enc_fml.empty()) {
          const auto f = codec::parse_formula(enc_fml);
          const Code c = codec::encode_formula(f);
          out.data = {{"kind", "formula"}, {"text", f.str()}, {"code", c.str()}};
          out.line(c.str());
        } else if (!enc_frame.empty()) {
          const auto f = codec::parse_frame(enc_frame);
          out.data = frame_json(f);
          out.data["kind"] = "frame";
          out.line(out.data["code"].get<std::string>());
        } else {
          throw UsageError("encode needs one of --term, --equation, --formula, --frame");
        }
        return out;
      };
    });
  }

  auto* decode = app.add_subcommand("decode", "Decode a code as a term, equation, formula or frame");
  std::string dec_code, dec_as = "formula";
  {
    decode->add_option("code", dec_code, "The code")->required();
    decode->add_option("--as", dec_as, "Syntactic category")
        ->check(CLI::IsMember({"term", "equation", "formula", "frame"}))
        ->capture_default_str();
    decode->add_option("--sig", sig, "Arities of f0, f1, ... (required for terms and equations)");
    decode->add_flag("--tense", tense, "Tense mode (box1 allowed)");
    decode->callback([&] {
      run = [&] {
        Output out;
        const Code c = parse_code(dec_code);
        std::string text;
        if (dec_as == "term" || dec_as == "equation") {
          if (sig.empty()) throw UsageError("decoding terms and equations needs --sig");
          const auto s = codec::Signature::parse(sig == "-" ? "" : sig);
          text = dec_as == "term" ? codec::decode_term(c, s).str() : codec::decode_equation(c, s).str();
        } else if (dec_as == "formula") {
          text = codec::decode_formula(c, mode_of(tense)).str();
        } else {
          text = codec::decode_frame(c, mode_of(tense)).str();
        }
        out.data = {{"kind", dec_as}, {"code", c.str()}, {"text", text}};
        out.line(text);
        return out;
      };
    });
  }

  // saturate / derive / refute

  std::string axioms_file, target;
  eqlogic::SaturationBudget budget;
  std::uint32_t max_algebra = 3;
  bool trace = false;
  auto add_budget = [&](CLI::App* c) {
    c->add_option("--axioms", axioms_file, "Axiom file, one equation per line")->required();
    c->add_option("--sig", sig, "Arities of f0, f1, ... (inferred when omitted)");
    c->add_option("--max-term-size", budget.max_term_size, "Largest term size in the universe")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->add_option("--max-vars", budget.max_vars, "Number of variables in the universe")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->add_option("--max-iterations", budget.max_iterations, "Cap on processed equations")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };
  auto load_axioms = [&](EquationInput& in) {
    std::vector<codec::Equation> eqs;
    for (const auto& line : content_lines(axioms_file)) eqs.push_back(in.equation(line));
    return eqs;
  };
  auto step_json = [](const eqlogic::DerivationStep& s) {
    json premises = json::array();
    for (const auto& p : s.premises) premises.push_back(p.str());
    json j = {{"rule", eqlogic::rule_name(s.rule)}, {"equation", s.conclusion.str()}, {"premises", premises}};
    if (!s.substitution.empty()) {
      json sub = json::array();
      for (const auto& t : s.substitution) sub.push_back(t.str());
      j["substitution"] = sub;
    }
    return j;
  };
  auto step_str = [](std::size_t n, const eqlogic::DerivationStep& s) {
    std::string out = std::to_string(n) + ": " + s.conclusion.str() + "  [" + eqlogic::rule_name(s.rule);
    for (std::size_t i = 0; i < s.premises.size(); ++i)
      out += (i ? "; " : " from ") + s.premises[i].str();
    if (!s.substitution.empty()) {
      out += " with";
      for (std::size_t i = 0; i < s.substitution.size(); ++i)
        out += " x" + std::to_string(i) + ":=" + s.substitution[i].str();
    }
    return out + "]";
  };

  auto* saturate = app.add_subcommand("saturate", "Close an axiom set under the equational rules");
  add_budget(saturate);
  saturate->add_flag("--trace", trace, "Show the rule that produced each equation");
  saturate->callback([&] {
    run = [&] {
      auto in = equation_input(sig);
      auto axioms = load_axioms(in);
      const auto ax = eqlogic::AxiomSet::make(in.sig, std::move(axioms));
      const auto res = eqlogic::saturate(ax, budget);
      Output out;
      json eqs = json::array();
      out.line("derived " + std::to_string(res.derived.size()) + " equations (exhausted: " +
               (res.exhausted ? "yes" : "no") + ", iterations: " + std::to_string(res.iterations) +
               ", term size <= " + std::to_string(res.term_size_bound) +
               ", variables: " + std::to_string(res.var_bound) + ")");
      std::vector<std::pair<Code, codec::Equation>> sorted;
      for (const auto& e : res.derived) sorted.emplace_back(codec::encode_equation(e, in.sig), e);
      std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      for (const auto& [c, e] : sorted) {
        json item = {{"equation", e.str()}, {"code", c.str()}};
        std::string row = c.str() + "\t" + e.str();
        if (trace) {
          const auto& step = res.traces.at(e);
          item["rule"] = eqlogic::rule_name(step.rule);
          row += "\t[" + std::string(eqlogic::rule_name(step.rule)) + "]";
        }
        eqs.push_back(item);
        out.line(row);
      }
      out.data = {{"sig", in.sig.str()},
                  {"exhausted", res.exhausted},
                  {"iterations", res.iterations},
                  {"term_size_bound", res.term_size_bound},
                  {"var_bound", res.var_bound},
                  {"derived", eqs}};
      return out;
    };
  });

  auto* derive = app.add_subcommand("derive", "Look for a derivation of an equation");
  add_budget(derive);
  derive->add_option("--equation", target, "Target equation")->required();
  derive->callback([&] {
    run = [&] {
      auto in = equation_input(sig);
      auto axioms = load_axioms(in);
      const auto goal = in.equation(target);
      const auto ax = eqlogic::AxiomSet::make(in.sig, std::move(axioms));
      Output out;
      const auto r = eqlogic::derives(ax, goal, budget);
      if (const auto* d = std::get_if<eqlogic::Derived>(&r)) {
        json steps = json::array();
        out.line("Derived " + goal.str());
        for (std::size_t i = 0; i < d->trace.size(); ++i) {
          steps.push_back(step_json(d->trace[i]));
          out.line(step_str(i + 1, d->trace[i]));
        }
        out.data = {{"verdict", "Derived"}, {"equation", goal.str()}, {"trace", steps}};
      } else {
        out.line("Unknown: " + goal.str() + " not derived within the budget");
        out.data = {{"verdict", "Unknown"}, {"equation", goal.str()}};
      }
      return out;
    };
  });

  auto* refute = app.add_subcommand("refute", "Look for a finite algebra separating an equation from the axioms");
  refute->add_option("--axioms", axioms_file, "Axiom file, one equation per line")->required();
  refute->add_option("--sig", sig, "Arities of f0, f1, ... (inferred when omitted)");
  refute->add_option("--equation", target, "Equation to refute")->required();
  refute->add_option("--max-algebra-size", max_algebra, "Largest carrier tried")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  refute->callback([&] {
    run = [&] {
      auto in = equation_input(sig);
      auto axioms = load_axioms(in);
      const auto goal = in.equation(target);
      const auto ax = eqlogic::AxiomSet::make(in.sig, std::move(axioms));
      const auto ceiling = env_u64("LWB_ALGEBRA_CEILING", eqlogic::kDefaultAlgebraCeiling);
      Output out;
      const auto r = eqlogic::refutes(ax, goal, max_algebra, ceiling);
      if (const auto* m = std::get_if<eqlogic::CounterModel>(&r)) {
        json tables = json::array();
        for (std::size_t s = 0; s < in.sig.size(); ++s) tables.push_back(m->algebra.table(s));
        std::string assignment;
        for (std::size_t i = 0; i < m->assignment.size(); ++i)
          assignment += (i ? ", x" : "x") + std::to_string(i) + "=" + std::to_string(m->assignment[i]);
        out.line("CounterModel: " + m->algebra.str());
        out.line("falsified at " + assignment);
        out.data = {{"verdict", "CounterModel"},
                    {"carrier", m->algebra.size()},
                    {"tables", tables},
                    {"assignment", m->assignment}};
      } else {
        out.line("Unknown: no counter-model with at most " + std::to_string(max_algebra) + " elements");
        out.data = {{"verdict", "Unknown"}, {"max_algebra_size", max_algebra}};
      }
      return out;
    };
  });

  // validate / frames / ffr / fmp-equal

  std::size_t max_size = 3;
  std::vector<std::string> axiom_files, axiom_formulas;
  auto frame_options = [&] {
    kripke::EnumerationOptions o;
    o.ceiling = env_u64("LWB_ENUM_CEILING", kripke::kDefaultFrameCeiling);
    o.threads = threads;
    return o;
  };
  auto add_logic = [&](CLI::App* c) {
    c->add_option("--axioms", axiom_files, "File of extra axioms, one formula per line");
    c->add_option("--axiom", axiom_formulas, "Extra axiom (repeatable)");
    c->add_flag("--tense", tense, "Tense mode (box1 allowed; duality axioms built in)");
  };

  auto* validate = app.add_subcommand("validate", "Check whether a frame validates a formula");
  std::string frame_text, formula_text;
  validate->add_option("--frame", frame_text, "Frame record")->required();
  validate->add_option("--formula", formula_text, "Formula")->required();
  validate->add_flag("--tense", tense, "Tense mode");
  validate->callback([&] {
    run = [&] {
      const auto F = codec::parse_frame(frame_text, mode_of(tense));
      const auto f = codec::parse_formula(formula_text);
      Output out;
      if (auto cm = kripke::falsifying_valuation(F, f)) {
        json val = json::object();
        std::string vs;
        for (std::size_t i = 0; i < cm->vars.size(); ++i) {
          const std::string name = "p" + std::to_string(cm->vars[i]);
          val[name] = set_str(cm->masks[i], F.size());
          vs += (i ? ", " : "") + name + " = " + set_str(cm->masks[i], F.size());
        }
        out.line("not valid: fails at point " + std::to_string(cm->point) + (vs.empty() ? "" : " with " + vs));
        out.data = {{"valid", false}, {"point", cm->point}, {"valuation", val}};
      } else {
        out.line("valid");
        out.data = {{"valid", true}};
      }
      return out;
    };
  });

  auto* frames = app.add_subcommand("frames", "List frames up to isomorphism");
  frames->add_option("--max-size", max_size, "Largest frame size")->check(CLI::PositiveNumber)->capture_default_str();
  frames->add_flag("--tense", tense, "Tense mode");
  auto list_frames = [&](const std::vector<codec::FiniteFrame>& fs, Output& out) {
    json items = json::array();
    for (const auto& F : fs) {
      items.push_back(frame_json(F));
      out.line(codec::encode_frame(F).str() + "\t" + F.str());
    }
    out.line(std::to_string(fs.size()) + " frames");
    out.data["count"] = fs.size();
    out.data["frames"] = items;
  };
  frames->callback([&] {
    run = [&] {
      Output out;
      list_frames(kripke::enumerate_frames(max_size, mode_of(tense), frame_options()), out);
      return out;
    };
  });

  auto* ffr = app.add_subcommand("ffr", "List the frames of a logic up to isomorphism");
  add_logic(ffr);
  ffr->add_option("--max-size", max_size, "Largest frame size")->check(CLI::PositiveNumber)->capture_default_str();
  ffr->callback([&] {
    run = [&] {
      const auto L = logic_from(axiom_files, axiom_formulas, tense);
      Output out;
      out.data["logic"] = L.str();
      list_frames(kripke::finite_frames_of(L, max_size, frame_options()), out);
      return out;
    };
  });

  auto* fmp = app.add_subcommand("fmp-equal", "Compare the finite frames of two logics");
  std::vector<std::string> left_files, left_axioms, right_files, right_axioms;
  fmp->add_option("--left", left_axioms, "Axiom of the left logic (repeatable)");
  fmp->add_option("--left-file", left_files, "Axiom file of the left logic");
  fmp->add_option("--right", right_axioms, "Axiom of the right logic (repeatable)");
  fmp->add_option("--right-file", right_files, "Axiom file of the right logic");
  fmp->add_option("--max-size", max_size, "Largest frame size")->check(CLI::PositiveNumber)->capture_default_str();
  fmp->add_flag("--tense", tense, "Tense mode");
  fmp->callback([&] {
    run = [&] {
      const auto L1 = logic_from(left_files, left_axioms, tense);
      const auto L2 = logic_from(right_files, right_axioms, tense);
      Output out;
      out.data = {{"left", L1.str()}, {"right", L2.str()}};
      const auto v = kripke::fmp_equal_bounded(L1, L2, max_size, frame_options());
      if (const auto* d = std::get_if<kripke::Distinguished>(&v)) {
        out.line("Distinguished by " + d->frame.str() + " (code " + codec::encode_frame(d->frame).str() +
                 "): " + kripke::side_name(d->side));
        out.data["verdict"] = "Distinguished";
        out.data["frame"] = frame_json(d->frame);
        out.data["side"] = kripke::side_name(d->side);
      } else {
        out.line("EqualUpTo(" + std::to_string(std::get<kripke::EqualUpTo>(v).bound) + ")");
        out.data["verdict"] = "EqualUpTo";
        out.data["bound"] = std::get<kripke::EqualUpTo>(v).bound;
      }
      return out;
    };
  });

  // check-proof / search-proof / pretab

  std::string proof_file, goal_text, extra_text, tabs_file;
  hilbert::SearchBounds search;
  std::string code_bound = "20";
  auto proof_base = [&] {
    return hilbert::ProofBase::axiomatic(logic_from(axiom_files, axiom_formulas, tense));
  };
  auto extra_formula = [&]() -> std::optional<Formula> {
    if (extra_text.empty()) return std::nullopt;
    return codec::parse_formula(extra_text);
  };

  auto* check = app.add_subcommand("check-proof", "Check a Hilbert-style proof");
  add_logic(check);
  check->add_option("--proof", proof_file, "Proof file, lines 'n: <formula> [Justification]'")->required();
  check->add_option("--goal", goal_text, "Formula the proof must end with")->required();
  check->add_option("--extra", extra_text, "Extra hypothesis (closed under substitution)");
  check->callback([&] {
    run = [&] {
      const auto base = proof_base();
      std::ifstream in(proof_file);
      if (!in) throw Error("cannot open " + proof_file);
      const auto proof = hilbert::parse_proof(in);
      const auto goal = codec::parse_formula(goal_text);
      const bool ok = hilbert::check_proof(base, extra_formula(), proof, goal);
      Output out;
      out.line(ok ? "accepted" : "rejected");
      out.data = {{"accepted", ok}, {"lines", proof.size()}, {"code", hilbert::encode_proof(proof).str()}};
      return out;
    };
  });

  auto add_search = [&](CLI::App* c) {
    c->add_option("--proof-bound", search.length, "Longest proof searched")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->add_option("--max-formula-size", search.formula_size, "Largest formula in a proof")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };

  auto* sp = app.add_subcommand("search-proof", "Search for a proof within bounds");
  add_logic(sp);
  add_search(sp);
  sp->add_option("--goal", goal_text, "Formula to prove")->required();
  sp->add_option("--extra", extra_text, "Extra hypothesis (closed under substitution)");
  sp->callback([&] {
    run = [&] {
      const auto base = proof_base();
      const auto goal = codec::parse_formula(goal_text);
      const auto r = hilbert::search_proof(base, extra_formula(), goal, search);
      Output out;
      if (const auto* f = std::get_if<hilbert::Found>(&r)) {
        out.text = "Found\n" + hilbert::proof_str(f->proof);
        json lines = json::array();
        for (const auto& s : f->proof)
          lines.push_back({{"formula", s.formula.str()}, {"why", hilbert::justification_str(s.why)}});
        out.data = {{"verdict", "Found"}, {"proof", lines}};
      } else {
        out.line("Unknown: no proof of length <= " + std::to_string(search.length));
        out.data = {{"verdict", "Unknown"}};
      }
      return out;
    };
  });

  auto* pretab = app.add_subcommand("pretab", "Bounded pretabularity check");
  add_logic(pretab);
  add_search(pretab);
  pretab->add_option("--tabs", tabs_file, "Tab table file, lines 'n <formula>'")->required();
  pretab->add_option("--code-bound", code_bound, "Largest formula code checked")->capture_default_str();
  pretab->callback([&] {
    run = [&] {
      const auto L = logic_from(axiom_files, axiom_formulas, tense);
      std::ifstream in(tabs_file);
      if (!in) throw Error("cannot open " + tabs_file);
      const auto tabs = hilbert::parse_tabs(in);
      hilbert::PretabOptions o;
      o.search = search;
      o.threads = threads;
      const auto v = hilbert::pretabular_bounded(L, tabs, parse_code(code_bound), o);
      const auto& report = std::visit([](const auto& x) -> const hilbert::PretabReport& { return x.report; }, v);
      Output out;
      json entries = json::array();
      out.line("code\tin-logic\ttab\tinconsistent\tformula");
      for (const auto& e : report.entries) {
        entries.push_back({{"code", e.code.str()},
                           {"formula", e.formula.str()},
                           {"in_logic", e.in_logic},
                           {"tab", e.tab ? json(*e.tab) : json(nullptr)},
                           {"inconsistent", e.inconsistent}});
        out.line(e.code.str() + "\t" + (e.in_logic ? "yes" : "no") + "\t" +
                 (e.tab ? std::to_string(*e.tab) : "-") + "\t" + (e.inconsistent ? "yes" : "no") + "\t" +
                 e.formula.str());
      }
      json skipped = json::array();
      for (const auto& c : report.skipped) skipped.push_back(c.str());
      out.line("skipped " + std::to_string(report.skipped.size()) + " codes that are not formulas");
      out.data = {{"logic", L.str()}, {"entries", entries}, {"skipped", skipped}};
      if (const auto* f = std::get_if<hilbert::Falsified>(&v)) {
        out.line("Falsified at code " + f->witness.str() + " (bounded evidence)");
        out.data["verdict"] = "Falsified";
        out.data["witness"] = f->witness.str();
      } else {
        out.line("Consistent up to code " + code_bound);
        out.data["verdict"] = "Consistent";
      }
      return out;
    };
  });

  // eval

  auto* eval = app.add_subcommand("eval", "Bounded evaluation of an arithmetical formula");
  std::string which, phi_file, phi0_file, phi1_file, l0_file, l_file;
  std::uint64_t bound = 64;
  std::optional<std::uint64_t> frame_bound;
  bool dump = false, expect_consistent = false;
  eval->add_option("--formula", which, "Which formula")
      ->check(CLI::IsMember({"interval", "fmp", "pretab"}))
      ->required();
  eval->add_option("--bound", bound, "Bound on code variables")->capture_default_str();
  eval->add_option("--frame-bound", frame_bound, "Bound on frame variables (defaults to --bound)");
  eval->add_option("--proof-bound", search.length, "Proof search length for proof witnesses");
  eval->add_option("--phi", phi_file, "Real for the free set variable (JSON)")->required();
  eval->add_option("--phi0", phi0_file, "interval: lower bound Phi0 (JSON)");
  eval->add_option("--phi1", phi1_file, "interval: upper bound Phi1 (JSON)");
  eval->add_option("--l0", l0_file, "fmp: base logic L0 (JSON)");
  eval->add_option("--l", l_file, "fmp: logic L to compare with; pretab: base logic L (JSON)");
  eval->add_option("--sig", sig, "interval: signature of the equations");
  eval->add_option("--tabs", tabs_file, "pretab: tab table file");
  eval->add_flag("--tense", tense, "fmp/pretab: tense mode");
  eval->add_flag("--dump", dump, "Print the formula in prenex form");
  eval->add_flag("--expect-consistent", expect_consistent, "Exit 1 on a Falsified verdict");
  eval->callback([&] {
    run = [&] {
      auto need = [](const std::string& v, const char* flag) {
        if (v.empty()) throw UsageError(std::string("eval --formula needs ") + flag);
        return real_file(v);
      };
      arith::ArithFormula f;
      if (which == "interval") {
        if (sig.empty()) throw UsageError("eval --formula interval needs --sig");
        f = arith::build_interval_formula(need(phi0_file, "--phi0"), need(phi1_file, "--phi1"),
                                          codec::Signature::parse(sig == "-" ? "" : sig));
      } else if (which == "fmp") {
        f = arith::build_fmp_formula(need(l0_file, "--l0"), need(l_file, "--l"), mode_of(tense));
      } else {
        if (tabs_file.empty()) throw UsageError("eval --formula pretab needs --tabs");
        std::ifstream in(tabs_file);
        if (!in) throw Error("cannot open " + tabs_file);
        f = arith::build_pretab_formula(need(l_file, "--l"), hilbert::parse_tabs(in), mode_of(tense));
      }
      arith::EvalOptions o;
      o.bound = bound;
      o.frame_bound = frame_bound;
      o.proof_search.length = search.length == hilbert::SearchBounds{}.length ? o.proof_search.length
                                                                              : search.length;
      o.threads = threads;
      const auto cls = arith::classify(f);
      const auto v = arith::eval_bounded(f, real_file(phi_file), o);
      Output out;
      if (dump) out.text += arith::dump(f);
      out.line("class: " + arith::classification_str(cls));
      out.line(arith::verdict_str(v));
      out.data = {{"formula", which},
                  {"class", arith::classification_str(cls)},
                  {"bound", bound},
                  {"caveat", arith::caveat_of(v)}};
      if (frame_bound) out.data["frame_bound"] = *frame_bound;
      if (dump) out.data["dump"] = arith::dump(f);
      if (const auto* fail = std::get_if<arith::Falsified>(&v)) {
        json a = json::object();
        for (const auto& b : fail->assignment) a[b.name] = b.value.str();
        out.data["verdict"] = "Falsified";
        out.data["conjunct"] = fail->conjunct + 1;
        out.data["label"] = fail->label;
        out.data["assignment"] = a;
        out.data["replayed"] = arith::replay(f, real_file(phi_file), *fail, o);
        if (expect_consistent) out.status = 1;
      } else {
        out.data["verdict"] = std::holds_alternative<arith::ConsistentUpTo>(v) ? "ConsistentUpTo" : "WitnessedUpTo";
      }
      return out;
    };
  });

  // lattice-demo

  auto* ld = app.add_subcommand("lattice-demo", "Downset lattice of a finite chain");
  std::size_t chain_n = 3;
  std::string fixture;
  ld->add_option("--n", chain_n, "Chain size")->check(CLI::Range(std::size_t{1}, lattice::kMaxPosetPoints - 1))->capture_default_str();
  ld->add_option("--fixture", fixture, "Also check a lattice given as JSON {elements, order}");
  ld->callback([&] {
    run = [&] {
      const auto lat = lattice::downset_lattice(chain_n);
      const auto r = lattice::principal_downset_compactness_demo(chain_n);
      const auto yn = [](bool b) { return std::string(b ? "yes" : "no"); };
      Output out;
      json downsets = json::array();
      std::string ds;
      for (auto d : lat.elements()) {
        downsets.push_back(lattice::DownsetLattice::downset_str(d));
        ds += " " + lattice::DownsetLattice::downset_str(d);
      }
      out.line("chain size: " + std::to_string(chain_n));
      out.line("elements: " + std::to_string(r.elements));
      out.line("downsets:" + ds);
      out.line("chain: " + yn(r.chain));
      out.line("incomparable pair: " + std::string(r.chain ? "none" : "yes"));
      out.line("distributive: " + yn(r.distributive));
      out.line("meet/join are intersection/union: " + yn(r.lattice_ops_agree));
      out.line("unions of principal downsets: " + std::to_string(r.unions_checked) + " checked, " +
               std::to_string(r.union_failures) + " failures");
      out.line("covering families (" + std::string(r.exhaustive_families ? "all" : "pairs only") +
               "): " + std::to_string(r.covers_checked) + " covers checked, " +
               std::to_string(r.compactness_failures) + " failures");
      out.data = {{"chain_size", chain_n},
                  {"elements", r.elements},
                  {"downsets", downsets},
                  {"chain", r.chain},
                  {"distributive", r.distributive},
                  {"lattice_ops_agree", r.lattice_ops_agree},
                  {"unions_checked", r.unions_checked},
                  {"union_failures", r.union_failures},
                  {"exhaustive_families", r.exhaustive_families},
                  {"covers_checked", r.covers_checked},
                  {"compactness_failures", r.compactness_failures}};
      if (!fixture.empty()) {
        std::string name;
        const auto L = lattice_file(fixture, name);
        const bool d = lattice::check_distributive(L);
        out.line("fixture " + name + ": " + std::to_string(L.size()) + " elements, distributive: " + yn(d));
        out.data["fixture"] = {{"name", name}, {"elements", L.size()}, {"distributive", d}};
      }
      return out;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    const CLI::App* where = &app;
    for (auto* sub = &app; !sub->get_subcommands().empty();) where = sub = sub->get_subcommands().front();
    std::cerr << "usage error: " << e.what() << "\n\n" << where->help();
    return 2;
  }

  try {
    const Output out = run();
    if (format == "json")
      std::cout << out.data.dump(2) << "\n";
    else
      std::cout << out.text;
    return out.status;
  } catch (const UsageError& e) {
    const CLI::App* where = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    std::cerr << "usage error: " << e.what() << "\n\n" << where->help();
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
