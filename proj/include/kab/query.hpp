#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "kab/kb.hpp"

namespace kab {

struct Term {
  enum class Kind { Var, Const, Call };
  Kind kind = Kind::Var;
  std::string name;
  std::vector<Term> args;  // Call only; flat

  static Term var(std::string n) { return {Kind::Var, std::move(n), {}}; }
  static Term constant(std::string n) { return {Kind::Const, std::move(n), {}}; }
  static Term call(std::string f, std::vector<Term> args) { return {Kind::Call, std::move(f), std::move(args)}; }

  bool is_var() const { return kind == Kind::Var; }
  bool is_const() const { return kind == Kind::Const; }
  bool is_call() const { return kind == Kind::Call; }
  std::string str() const;
  bool operator==(const Term& o) const;
  bool operator<(const Term& o) const;
};

// Relational atom, or equality when pred == "=".
struct Atom {
  std::string pred;
  std::vector<Term> args;

  bool is_eq() const { return pred == "="; }
  std::string str() const;
  bool operator==(const Atom& o) const { return pred == o.pred && args == o.args; }
  bool operator<(const Atom& o) const { return pred != o.pred ? pred < o.pred : args < o.args; }
};

Atom make_atom(std::string pred, std::vector<Term> args);
Atom eq_atom(Term a, Term b);

// Variables starting with '_' are existential; all others are free.
bool is_existential_var(const std::string& v);

struct CQ {
  std::vector<Atom> atoms;
  bool operator==(const CQ& o) const { return atoms == o.atoms; }
  bool operator<(const CQ& o) const { return atoms < o.atoms; }
};

struct UCQ {
  std::vector<std::string> free;  // sorted
  std::vector<CQ> cqs;
  bool plain = false;  // evaluated over the ABox as a database, without rewriting

  std::string str() const;
  bool operator==(const UCQ&) const = default;
};

// Builds a UCQ, collecting free variables from the disjuncts.
UCQ make_ucq(std::vector<CQ> cqs, bool plain = false);

using Substitution = std::map<std::string, std::string>;
std::string to_string(const Substitution& s);

struct Ecq;
using EcqPtr = std::shared_ptr<const Ecq>;

struct Ecq {
  enum class Kind { Query, Not, And, Or, Exists, Forall, True, False };
  Kind kind = Kind::True;
  UCQ q;
  EcqPtr a;
  EcqPtr b;
  std::string var;
};

namespace ecq {
EcqPtr query(UCQ q);
EcqPtr atom(Atom a, bool plain = false);
EcqPtr neg(EcqPtr a);
EcqPtr conj(EcqPtr a, EcqPtr b);
EcqPtr disj(EcqPtr a, EcqPtr b);
EcqPtr exists(std::string v, EcqPtr a);
EcqPtr forall(std::string v, EcqPtr a);
EcqPtr top();
EcqPtr bottom();
EcqPtr conj_all(const std::vector<EcqPtr>& xs);
EcqPtr disj_all(const std::vector<EcqPtr>& xs);
}  // namespace ecq

std::set<std::string> free_vars(const Ecq& q);
std::string to_string(const Ecq& q);
bool equal(const Ecq& a, const Ecq& b);
bool mentions_markers(const Ecq& q);
std::set<std::string> predicates(const Ecq& q);
std::set<std::string> constants_of(const Ecq& q);

// Safe-range style domain-independence check; `bound` are externally bound variables.
void validate_domain_independent(const Ecq& q, const std::set<std::string>& bound = {});

UCQ rewrite_ucq(const UCQ& q, const TBox& t, std::size_t cap = 10000);

std::set<Substitution> certain_answers_ucq(const UCQ& q, const TBox& t, const ABox& a);

std::set<Substitution> eval_ecq(const EcqPtr& q, const TBox& t, const ABox& a, const Substitution& partial = {});

// Boolean shortcut: some answer exists under `partial`.
bool holds(const EcqPtr& q, const TBox& t, const ABox& a, const Substitution& partial = {});

Term substitute(const Term& t, const Substitution& s);
Atom substitute(const Atom& a, const Substitution& s);

}  // namespace kab
