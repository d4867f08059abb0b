#pragma once

// Text forms.
//
// Proof file, one line per step, numbered from 1:
//
//   1: p0 -> p0 [Tautology]
//   2: box0 (p0 -> p0) [Nec 1 0]
//
// Justifications: [InBase] [Tautology] [K s] [Dual s] [MP major minor]
// [Nec line slot] [Axiom i p0:=f; p1:=g] [Extra p0:=f]. Blank lines and
// lines starting with '#' are ignored.
//
// Tab table file: lines `n <formula>`.

#include <istream>
#include <sstream>
#include <string>

#include "lwb/codec/text.hpp"
#include "lwb/hilbert/proof.hpp"
#include "lwb/hilbert/search.hpp"

namespace lwb::hilbert {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::size_t parse_index(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ParseError(where + ": expected a number, got '" + s + "'");
  }
}

inline Substitution parse_substitution(const std::string& text, const std::string& where) {
  Substitution s;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find(":=");
    if (eq == std::string::npos || item[0] != 'p')
      throw ParseError(where + ": expected p<n>:=<formula>, got '" + item + "'");
    const auto var = parse_index(trim(item.substr(1, eq - 1)), where);
    if (!s.emplace(var, codec::parse_formula(item.substr(eq + 2))).second)
      throw ParseError(where + ": p" + std::to_string(var) + " substituted twice");
  }
  return s;
}

inline std::string substitution_str(const Substitution& s) {
  std::string out;
  for (const auto& [v, f] : s) {
    if (!out.empty()) out += "; ";
    out += "p" + std::to_string(v) + ":=" + f.str();
  }
  return out;
}

}  // namespace detail

inline Justification parse_justification(const std::string& text, const std::string& where) {
  std::stringstream in(text);
  std::string name;
  in >> name;
  std::string rest;
  std::getline(in, rest);
  rest = detail::trim(rest);
  std::vector<std::size_t> nums;
  auto numbers = [&](std::size_t count) {
    std::stringstream ns(rest);
    std::string tok;
    while (ns >> tok) nums.push_back(detail::parse_index(tok, where));
    if (nums.size() != count)
      throw ParseError(where + ": " + name + " takes " + std::to_string(count) + " numbers");
  };
  auto slot = [&](std::size_t v) {
    if (v > 1) throw ParseError(where + ": slot must be 0 or 1");
    return static_cast<unsigned>(v);
  };
  if (name == "InBase" || name == "Tautology") {
    numbers(0);
    return name == "InBase" ? Justification::in_base() : Justification::tautology();
  }
  if (name == "K" || name == "Dual") {
    numbers(1);
    return name == "K" ? Justification::k(slot(nums[0])) : Justification::dual(slot(nums[0]));
  }
  if (name == "MP") {
    numbers(2);
    return Justification::mp(nums[0], nums[1]);
  }
  if (name == "Nec") {
    numbers(2);
    return Justification::nec(nums[0], slot(nums[1]));
  }
  if (name == "Extra") return Justification::extra(detail::parse_substitution(rest, where));
  if (name == "Axiom") {
    const auto sp = rest.find_first_of(" \t");
    const auto idx = detail::parse_index(rest.substr(0, sp), where);
    return Justification::axiom_instance(
        idx, detail::parse_substitution(sp == std::string::npos ? "" : rest.substr(sp), where));
  }
  throw ParseError(where + ": unknown justification '" + name + "'");
}

inline std::string justification_str(const Justification& j) {
  using K = Justification::Kind;
  switch (j.kind) {
    case K::InBase: return "InBase";
    case K::Tautology: return "Tautology";
    case K::K: return "K " + std::to_string(j.slot);
    case K::Dual: return "Dual " + std::to_string(j.slot);
    case K::MP: return "MP " + std::to_string(j.major) + " " + std::to_string(j.minor);
    case K::Nec: return "Nec " + std::to_string(j.line) + " " + std::to_string(j.slot);
    case K::Extra: {
      std::string s = detail::substitution_str(j.subst);
      return s.empty() ? "Extra" : "Extra " + s;
    }
    case K::Axiom: {
      std::string s = detail::substitution_str(j.subst);
      return "Axiom " + std::to_string(j.axiom) + (s.empty() ? "" : " " + s);
    }
  }
  return "";
}

inline ProofObject parse_proof(std::istream& in) {
  ProofObject proof;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string s = detail::trim(raw);
    if (s.empty() || s[0] == '#') continue;
    const std::string where = "proof line " + std::to_string(lineno);
    const auto colon = s.find(':');
    const auto open = s.rfind('[');
    if (colon == std::string::npos || open == std::string::npos || open < colon || s.back() != ']')
      throw ParseError(where + ": expected 'n: <formula> [justification]'");
    const auto n = detail::parse_index(detail::trim(s.substr(0, colon)), where);
    if (n != proof.size() + 1)
      throw ParseError(where + ": step numbered " + std::to_string(n) + ", expected " +
                       std::to_string(proof.size() + 1));
    Formula f = codec::parse_formula(s.substr(colon + 1, open - colon - 1));
    proof.push_back({std::move(f), parse_justification(s.substr(open + 1, s.size() - open - 2), where)});
  }
  return proof;
}

inline ProofObject parse_proof(const std::string& text) {
  std::istringstream in(text);
  return parse_proof(in);
}

inline std::string proof_str(const ProofObject& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i)
    out += std::to_string(i + 1) + ": " + p[i].formula.str() + " [" +
           justification_str(p[i].why) + "]\n";
  return out;
}

inline TabTable parse_tabs(std::istream& in) {
  TabTable tabs;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string s = detail::trim(raw);
    if (s.empty() || s[0] == '#') continue;
    const std::string where = "tab line " + std::to_string(lineno);
    const auto sp = s.find_first_of(" \t");
    if (sp == std::string::npos) throw ParseError(where + ": expected 'n <formula>'");
    const auto n = detail::parse_index(s.substr(0, sp), where);
    if (!tabs.emplace(n, codec::parse_formula(s.substr(sp))).second)
      throw ParseError(where + ": tab " + std::to_string(n) + " given twice");
  }
  return tabs;
}

}  // namespace lwb::hilbert
