#include "kab/instance.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kab/errors.hpp"

namespace kab {

namespace {

struct Token {
  enum Kind { Ident, Punct, End };
  Kind kind = End;
  std::string text;
  int line = 1;
  int col = 1;
};

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  static const char* multi[] = {"<=", "<>", "->", "=>", "[]"};
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    Token t{Token::Punct, "", line, col};
    if (ident_char(c)) {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      t.kind = Token::Ident;
      t.text = s.substr(i, j - i);
      advance(j - i);
      out.push_back(t);
      continue;
    }
    bool matched = false;
    for (const char* m : multi) {
      if (s.compare(i, 2, m) == 0) {
        t.text = m;
        advance(2);
        matched = true;
        break;
      }
    }
    if (!matched) {
      if (std::string("{}()[],;.:=!&|-$").find(c) == std::string::npos)
        throw ParseError(line, col, std::string("unexpected character '") + c + "'");
      t.text = std::string(1, c);
      advance(1);
    }
    out.push_back(t);
  }
  out.push_back({Token::End, "", line, col});
  return out;
}

const std::set<std::string> kKeywords = {"tbox",  "constants", "abox", "action", "process", "program",
                                         "formula", "service",  "limits"};

struct RawInclusion {
  bool lhs_exists, lhs_inv, rhs_exists, rhs_inv, negated;
  std::string lhs, rhs;
  int line, col;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Token::End; }
  bool is(const std::string& p, std::size_t k = 0) const {
    return peek(k).kind != Token::End && peek(k).text == p;
  }
  bool is_ident(std::size_t k = 0) const { return peek(k).kind == Token::Ident; }
  bool accept(const std::string& p) {
    if (!is(p)) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(t.line, t.col, msg + (t.kind == Token::End ? " at end of input" : " near '" + t.text + "'"));
  }
  void expect(const std::string& p) {
    if (!accept(p)) fail("expected '" + p + "'");
  }
  std::string ident(const std::string& what) {
    if (!is_ident()) fail("expected " + what);
    return toks_[pos_++].text;
  }

  // Terms, atoms and queries. Names are parsed as variables and resolved later.
  Term term() {
    std::string n = ident("term");
    if (!accept("(")) return Term::var(n);
    std::vector<Term> args;
    if (!is(")")) {
      do args.push_back(term());
      while (accept(","));
    }
    expect(")");
    return Term::call(n, std::move(args));
  }

  Atom atom() {
    Term t = term();
    if (accept("=")) return eq_atom(t, term());
    if (!t.is_call()) fail("expected atom");
    return make_atom(t.name, t.args);
  }

  CQ cq() {
    CQ q;
    if (accept("true")) return q;
    do q.atoms.push_back(atom());
    while (accept("&") || accept(","));
    return q;
  }

  UCQ ucq() {
    bool plain = accept("$");
    expect("[");
    std::vector<CQ> cqs;
    if (!accept("false")) {
      do cqs.push_back(cq());
      while (accept("|"));
    }
    expect("]");
    return make_ucq(std::move(cqs), plain);
  }

  // Single-atom queries may omit the brackets.
  bool bare_atom() const { return is_ident() && (is("(", 1) || is("=", 1)); }

  EcqPtr ecq_or() {
    EcqPtr e = ecq_and();
    while (accept("|")) e = ecq::disj(e, ecq_and());
    return e;
  }
  EcqPtr ecq_and() {
    EcqPtr e = ecq_unary();
    while (accept("&")) e = ecq::conj(e, ecq_unary());
    return e;
  }
  EcqPtr ecq_unary() {
    if (accept("!")) return ecq::neg(ecq_unary());
    if (accept("(")) {
      EcqPtr e = ecq_or();
      expect(")");
      return e;
    }
    for (const char* kw : {"exists", "forall"}) {
      if (!accept(kw)) continue;
      std::string v = ident("variable");
      expect(".");
      EcqPtr body = ecq_or();
      return std::string(kw) == "exists" ? ecq::exists(v, body) : ecq::forall(v, body);
    }
    if (accept("true")) return ecq::top();
    if (accept("false")) return ecq::bottom();
    if (is("[") || is("$")) return ecq::query(ucq());
    if (bare_atom()) return ecq::query(make_ucq({CQ{{atom()}}}));
    fail("expected query");
  }

  MuPtr mu_or() {
    MuPtr f = mu_and();
    while (accept("|")) f = mu::disj(f, mu_and());
    return f;
  }
  MuPtr mu_and() {
    MuPtr f = mu_unary();
    while (accept("&")) f = mu::conj(f, mu_unary());
    return f;
  }
  MuPtr mu_unary() {
    if (accept("!")) return mu::neg(mu_unary());
    if (accept("<>")) return mu::diamond(mu_unary());
    if (accept("[]")) return mu::box(mu_unary());
    if (accept("(")) {
      MuPtr f = mu_or();
      expect(")");
      return f;
    }
    for (const char* kw : {"exists", "forall", "mu", "nu"}) {
      if (!accept(kw)) continue;
      std::string v = ident("variable");
      expect(".");
      MuPtr body = mu_or();
      std::string k = kw;
      if (k == "exists") return mu::exists(v, body);
      if (k == "forall") return mu::forall(v, body);
      if (k == "mu") return mu::lfp(v, body);
      return mu::gfp(v, body);
    }
    if (accept("true")) return mu::top();
    if (accept("false")) return mu::bottom();
    if (is("[") || is("$")) return mu::query(ecq::query(ucq()));
    if (bare_atom()) return mu::query(ecq::query(make_ucq({CQ{{atom()}}})));
    if (is_ident() && !kKeywords.count(peek().text)) return mu::var(ident("predicate variable"));
    fail("expected formula");
  }

  std::vector<std::string> name_list() {
    expect("(");
    std::vector<std::string> xs;
    if (!is(")")) {
      do xs.push_back(ident("name"));
      while (accept(","));
    }
    expect(")");
    return xs;
  }

  bool starts_program(std::size_t k) const {
    return is("skip", k) || is("pick", k) || is("(", k) || is("if", k) || is("while", k);
  }
  ProgramPtr program() {
    ProgramPtr p = program_seq();
    while (accept("|")) p = prog::choice(p, program_seq());
    return p;
  }
  ProgramPtr program_seq() {
    std::vector<ProgramPtr> xs{program_primary()};
    while (is(";") && starts_program(1)) {
      ++pos_;
      xs.push_back(program_primary());
    }
    return prog::seq_all(xs);
  }
  ProgramPtr program_primary() {
    if (accept("skip")) return prog::empty();
    if (accept("pick")) {
      EcqPtr g = ecq_or();
      expect(".");
      std::string a = ident("action name");
      return prog::invoke(g, a, name_list());
    }
    if (accept("(")) {
      ProgramPtr p = program();
      expect(")");
      return p;
    }
    if (accept("if")) {
      EcqPtr c = ecq_or();
      expect("then");
      ProgramPtr a = program();
      expect("else");
      return prog::ite(c, a, program_primary());
    }
    if (accept("while")) {
      EcqPtr c = ecq_or();
      expect("do");
      return prog::loop(c, program_primary());
    }
    fail("expected program");
  }

  Instance instance() {
    Instance inst;
    bool enumerate = false, oracle = false;
    while (!at_end()) {
      if (accept("tbox")) {
        tbox_block(inst.tbox);
      } else if (accept("constants")) {
        expect("{");
        while (!accept("}")) {
          bool dist = accept("distinguished");
          do inst.constants.add(ident("constant"), dist);
          while (accept(","));
          expect(";");
        }
      } else if (accept("abox")) {
        expect("{");
        while (!accept("}")) {
          const Token& at = peek();
          std::string p = ident("predicate");
          auto args = name_list();
          if (args.size() == 1) {
            inst.abox.insert(concept_fact(p, args[0]));
          } else if (args.size() == 2) {
            inst.abox.insert(role_fact(p, args[0], args[1]));
          } else {
            throw ParseError(at.line, at.col, "facts are unary or binary");
          }
          fact_pos_.push_back(at);
          if (!accept(";")) accept(",");
        }
      } else if (accept("action")) {
        Action a;
        a.name = ident("action name");
        a.params = name_list();
        expect("{");
        while (!accept("}")) {
          expect("effect");
          Effect e;
          e.guard = ecq_or();
          expect("->");
          do {
            bool add = accept("add");
            if (!add) expect("del");
            expect("{");
            std::vector<Atom>& dst = add ? e.add : e.del;
            while (!accept("}")) {
              dst.push_back(atom());
              if (!accept(",")) accept(";");
            }
          } while (accept(","));
          expect(";");
          a.effects.push_back(std::move(e));
        }
        inst.actions.push_back(std::move(a));
      } else if (accept("process")) {
        expect("{");
        if (!inst.process) inst.process.emplace();
        while (!accept("}")) {
          ProcessRule r;
          r.cond = ecq_or();
          expect("=>");
          r.action = ident("action name");
          r.args = name_list();
          expect(";");
          inst.process->push_back(std::move(r));
        }
      } else if (accept("program")) {
        if (inst.program) fail("duplicate program");
        inst.program = program();
        accept(";");
      } else if (accept("formula")) {
        std::string n = ident("formula name");
        expect(":");
        inst.formulas.emplace_back(n, mu_or());
        accept(";");
      } else if (accept("service")) {
        if (accept("enumerate")) {
          enumerate = true;
          inst.services.mode = ServiceConfig::Mode::Enumerate;
          expect("{");
          while (!accept("}")) {
            inst.services.values.push_back(ident("value"));
            if (!accept(",")) accept(";");
          }
        } else {
          oracle = true;
          inst.services.mode = ServiceConfig::Mode::Oracle;
          std::string f = ident("service name");
          expect("{");
          while (!accept("}")) {
            if (accept("default")) {
              expect("=");
              inst.services.defaults[f] = ident("value");
            } else {
              Term t = term();
              if (!t.is_call() || t.name != f) fail("expected call of " + f);
              for (const auto& x : t.args)
                if (x.is_call()) fail("service arguments are constants");
              expect("=");
              inst.services.table[t.str()] = ident("value");
            }
            expect(";");
          }
        }
        if (enumerate && oracle) fail("enumerate and table services cannot be mixed");
      } else if (accept("limits")) {
        expect("{");
        Limits l;
        while (!accept("}")) {
          std::string k = ident("limit name");
          expect("=");
          const Token& at = peek();
          std::string v = ident("number");
          std::size_t n = 0;
          try {
            n = std::stoull(v);
          } catch (const std::exception&) {
            throw ParseError(at.line, at.col, "expected number");
          }
          if (k == "max_states") {
            l.max_states = n;
          } else if (k == "max_run_adom") {
            l.max_run_adom = n;
          } else {
            throw ParseError(at.line, at.col, "unknown limit " + k);
          }
          expect(";");
        }
        inst.limits = l;
      } else {
        fail("expected block");
      }
    }
    return inst;
  }

 private:
  void tbox_block(TBox& t) {
    expect("{");
    std::vector<RawInclusion> incs;
    std::vector<std::pair<BasicRole, Token>> functs;
    while (!accept("}")) {
      if (accept("concept")) {
        do t.declare_concept(ident("concept name"));
        while (accept(","));
      } else if (accept("role")) {
        do t.declare_role(ident("role name"));
        while (accept(","));
      } else if (accept("funct")) {
        Token at = peek();
        BasicRole r{ident("role name"), false};
        r.inverse = accept("-");
        functs.emplace_back(r, at);
      } else {
        RawInclusion ri{};
        ri.line = peek().line;
        ri.col = peek().col;
        ri.lhs_exists = accept("exists");
        ri.lhs = ident("concept or role");
        ri.lhs_inv = accept("-");
        expect("<=");
        ri.negated = accept("not");
        ri.rhs_exists = accept("exists");
        ri.rhs = ident("concept or role");
        ri.rhs_inv = accept("-");
        incs.push_back(ri);
      }
      expect(";");
    }
    for (const auto& [r, at] : functs) {
      if (!t.has_role(r.name)) throw ValidationError(pos(at) + "undeclared role " + r.name);
      t.add_funct(r);
    }
    for (const auto& ri : incs) {
      std::string where = std::to_string(ri.line) + ":" + std::to_string(ri.col) + ": ";
      bool lrole = !ri.lhs_exists && t.has_role(ri.lhs);
      bool rrole = !ri.rhs_exists && t.has_role(ri.rhs);
      if (lrole != rrole) throw ValidationError(where + "inclusion mixes a role and a concept");
      if (lrole) {
        t.add(RoleInclusion{{ri.lhs, ri.lhs_inv}, {ri.rhs, ri.rhs_inv}, ri.negated});
        continue;
      }
      auto basic = [&](bool ex, const std::string& n, bool inv) {
        if (ex) {
          if (!t.has_role(n)) throw ValidationError(where + "undeclared role " + n);
          return BasicConcept::some({n, inv});
        }
        if (inv) throw ValidationError(where + "inverse of a concept name " + n);
        if (!t.has_concept(n)) throw ValidationError(where + "undeclared concept " + n);
        return BasicConcept::atomic(n);
      };
      t.add(ConceptInclusion{basic(ri.lhs_exists, ri.lhs, ri.lhs_inv), basic(ri.rhs_exists, ri.rhs, ri.rhs_inv),
                             ri.negated});
    }
  }

  static std::string pos(const Token& t) { return std::to_string(t.line) + ":" + std::to_string(t.col) + ": "; }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;

 public:
  std::vector<Token> fact_pos_;
};

// Name resolution: identifiers naming constants become constant terms.
class Resolver {
 public:
  Resolver(const ConstantTable& c, const TBox* t) : c_(c), t_(t) {}

  Term term(const Term& x) const {
    if (x.is_var()) return c_.contains(x.name) ? Term::constant(x.name) : x;
    if (x.is_call()) {
      Term out = x;
      for (auto& a : out.args) a = term(a);
      return out;
    }
    return x;
  }

  Atom atom(const Atom& a, bool allow_calls) const {
    Atom out = a;
    for (auto& x : out.args) {
      if (x.is_call() && !allow_calls) throw ValidationError("service call outside an add set: " + a.str());
      x = term(x);
    }
    if (a.is_eq()) return out;
    if (!t_) return out;
    std::size_t arity = 0;
    if (is_marker_pred(a.pred) || t_->has_concept(a.pred)) {
      arity = 1;
    } else if (t_->has_role(a.pred)) {
      arity = 2;
    } else {
      throw ValidationError("unknown predicate " + a.pred);
    }
    if (a.args.size() != arity) throw ValidationError("wrong arity for " + a.pred + " in " + a.str());
    return out;
  }

  void check_var(const std::string& v) const {
    if (c_.contains(v)) throw ValidationError("variable " + v + " clashes with a constant");
  }

  EcqPtr ecq(const EcqPtr& e) const {
    using K = Ecq::Kind;
    switch (e->kind) {
      case K::Query: {
        std::vector<CQ> cqs;
        for (const auto& q : e->q.cqs) {
          CQ c;
          for (const auto& a : q.atoms) c.atoms.push_back(atom(a, false));
          cqs.push_back(std::move(c));
        }
        return ecq::query(make_ucq(std::move(cqs), e->q.plain));
      }
      case K::Not: return ecq::neg(ecq(e->a));
      case K::And: return ecq::conj(ecq(e->a), ecq(e->b));
      case K::Or: return ecq::disj(ecq(e->a), ecq(e->b));
      case K::Exists: check_var(e->var); return ecq::exists(e->var, ecq(e->a));
      case K::Forall: check_var(e->var); return ecq::forall(e->var, ecq(e->a));
      case K::True:
      case K::False: return e;
    }
    return e;
  }

  MuPtr mu(const MuPtr& f, std::set<std::string>& bound) const {
    using K = Mu::Kind;
    switch (f->kind) {
      case K::Query: {
        EcqPtr q = ecq(f->q);
        if (t_) validate_domain_independent(*q, bound);
        return mu::query(q);
      }
      case K::Not: return mu::neg(mu(f->a, bound));
      case K::And: return mu::conj(mu(f->a, bound), mu(f->b, bound));
      case K::Or: return mu::disj(mu(f->a, bound), mu(f->b, bound));
      case K::Exists:
      case K::Forall: {
        check_var(f->var);
        bool fresh = bound.insert(f->var).second;
        MuPtr body = mu(f->a, bound);
        if (fresh) bound.erase(f->var);
        return f->kind == K::Exists ? mu::exists(f->var, body) : mu::forall(f->var, body);
      }
      case K::Diamond: return mu::diamond(mu(f->a, bound));
      case K::Box: return mu::box(mu(f->a, bound));
      case K::Lfp: return mu::lfp(f->var, mu(f->a, bound));
      case K::Gfp: return mu::gfp(f->var, mu(f->a, bound));
      case K::Var:
      case K::True:
      case K::False: return f;
    }
    return f;
  }

  ProgramPtr program(const ProgramPtr& p) const {
    using K = Program::Kind;
    switch (p->kind) {
      case K::Empty: return p;
      case K::Invoke:
        for (const auto& a : p->args) check_var(a);
        return prog::invoke(ecq(p->cond), p->action, p->args, p->pid);
      case K::Choice: return prog::choice(program(p->a), program(p->b), p->pid);
      case K::Seq: return prog::seq(program(p->a), program(p->b), p->pid);
      case K::If: return prog::ite(ecq(p->cond), program(p->a), program(p->b), p->pid);
      case K::While: return prog::loop(ecq(p->cond), program(p->a), p->pid);
    }
    return p;
  }

  Action action(const Action& a) const {
    Action out = a;
    for (const auto& x : a.params) check_var(x);
    for (auto& e : out.effects) {
      e.guard = ecq(e.guard);
      for (auto& x : e.add) x = atom(x, true);
      for (auto& x : e.del) x = atom(x, false);
    }
    return out;
  }

 private:
  const ConstantTable& c_;
  const TBox* t_;
};

void check_invocation(const EcqPtr& guard, const std::vector<std::string>& args, const Action& act,
                      const std::string& where) {
  validate_domain_independent(*guard);
  if (args.size() != act.params.size())
    throw ValidationError(where + ": action " + act.name + " expects " + std::to_string(act.params.size()) +
                          " arguments");
  std::set<std::string> fv = free_vars(*guard);
  std::set<std::string> as(args.begin(), args.end());
  if (as.size() != args.size()) throw ValidationError(where + ": repeated argument");
  if (fv != as) throw ValidationError(where + ": arguments must be exactly the free variables of the guard");
}

void check_program(const ProgramPtr& p, const Instance& inst) {
  using K = Program::Kind;
  switch (p->kind) {
    case K::Empty: return;
    case K::Invoke: {
      const Action* act = nullptr;
      for (const auto& a : inst.actions)
        if (a.name == p->action) act = &a;
      if (!act) throw ValidationError("program invokes unknown action " + p->action);
      check_invocation(p->cond, p->args, *act, "program");
      return;
    }
    case K::If:
    case K::While:
      validate_domain_independent(*p->cond);
      if (!free_vars(*p->cond).empty()) throw ValidationError("program condition must be boolean");
      break;
    default: break;
  }
  if (p->a) check_program(p->a, inst);
  if (p->b) check_program(p->b, inst);
}

void validate(Instance& inst) {
  inst.tbox.validate();
  for (const auto& f : inst.abox) {
    if (f.marker()) {
      if (f.role) throw ValidationError("marker facts are unary: " + f.str());
      continue;
    }
    bool ok = f.role ? inst.tbox.has_role(f.pred) : inst.tbox.has_concept(f.pred);
    if (!ok) throw ValidationError("fact over unknown predicate or wrong arity: " + f.str());
  }
  for (const auto& c : adom(inst.abox))
    if (!inst.constants.contains(c)) inst.constants.add(c, false);
  for (const auto& v : inst.services.values)
    if (!inst.constants.contains(v)) inst.constants.add(v, false);

  Resolver r(inst.constants, &inst.tbox);
  std::set<std::string> names;
  for (auto& a : inst.actions) {
    if (!names.insert(a.name).second) throw ValidationError("duplicate action " + a.name);
    a = r.action(a);
    validate_action(a);
  }
  if (inst.process) {
    for (auto& rule : *inst.process) {
      rule.cond = r.ecq(rule.cond);
      for (const auto& a : rule.args) r.check_var(a);
      const Action* act = nullptr;
      for (const auto& a : inst.actions)
        if (a.name == rule.action) act = &a;
      if (!act) throw ValidationError("process rule uses unknown action " + rule.action);
      check_invocation(rule.cond, rule.args, *act, "process rule for " + rule.action);
    }
  }
  if (inst.program) {
    inst.program = r.program(inst.program);
    check_program(inst.program, inst);
  }
  std::set<std::string> fnames;
  for (auto& [name, f] : inst.formulas) {
    if (!fnames.insert(name).second) throw ValidationError("duplicate formula " + name);
    std::set<std::string> bound;
    f = r.mu(f, bound);
    if (!free_predicate_vars(*f).empty()) throw ValidationError("formula " + name + " has free predicate variables");
    if (!free_individual_vars(*f).empty()) throw ValidationError("formula " + name + " is not closed");
    validate_monotone(*f);
  }
}

std::string join(const std::vector<std::string>& xs, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

std::string atoms_str(const std::vector<Atom>& xs) {
  std::vector<std::string> s;
  for (const auto& a : xs) s.push_back(a.str());
  return join(s, ", ");
}

bool same_action(const Action& a, const Action& b) {
  if (a.name != b.name || a.params != b.params || a.effects.size() != b.effects.size()) return false;
  for (std::size_t i = 0; i < a.effects.size(); ++i) {
    const Effect& x = a.effects[i];
    const Effect& y = b.effects[i];
    if (!equal(*x.guard, *y.guard) || x.add != y.add || x.del != y.del) return false;
  }
  return true;
}

}  // namespace

Kab Instance::kab() const {
  return {constants, tbox, abox, actions, process.value_or(std::vector<ProcessRule>{})};
}

Gkab Instance::gkab() const {
  ProgramPtr p = program ? program : prog::empty();
  return {constants, tbox, abox, actions, p->pid.empty() ? assign_ids(p) : p};
}

MuPtr Instance::formula(const std::string& name) const {
  for (const auto& [n, f] : formulas)
    if (n == name) return f;
  throw ValidationError("no formula named " + name);
}

Instance from_kab(const Kab& k) {
  Instance i;
  i.constants = k.constants;
  i.tbox = k.tbox;
  i.abox = k.a0;
  i.actions = k.actions;
  i.process = k.process;
  return i;
}

Instance from_gkab(const Gkab& g) {
  Instance i;
  i.constants = g.constants;
  i.tbox = g.tbox;
  i.abox = g.a0;
  i.actions = g.actions;
  i.program = g.program;
  return i;
}

Instance parse_instance(const std::string& text) {
  Parser p(text);
  Instance inst = p.instance();
  validate(inst);
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

namespace {

template <class T, class F>
T parse_fragment(const std::string& text, F f) {
  Parser p(text);
  T out = f(p);
  if (!p.at_end()) p.fail("unexpected trailing input");
  return out;
}

}  // namespace

EcqPtr parse_ecq(const std::string& text, const ConstantTable& constants) {
  EcqPtr e = parse_fragment<EcqPtr>(text, [](Parser& p) { return p.ecq_or(); });
  return Resolver(constants, nullptr).ecq(e);
}

MuPtr parse_mu(const std::string& text, const ConstantTable& constants) {
  MuPtr f = parse_fragment<MuPtr>(text, [](Parser& p) { return p.mu_or(); });
  std::set<std::string> bound;
  return Resolver(constants, nullptr).mu(f, bound);
}

ProgramPtr parse_program(const std::string& text, const ConstantTable& constants) {
  ProgramPtr p = parse_fragment<ProgramPtr>(text, [](Parser& p) { return p.program(); });
  return Resolver(constants, nullptr).program(p);
}

ABox parse_facts(const std::string& text) {
  Parser p(text);
  ABox out;
  while (!p.at_end()) {
    std::string pred = p.ident("predicate");
    auto args = p.name_list();
    if (args.size() == 1) {
      out.insert(concept_fact(pred, args[0]));
    } else if (args.size() == 2) {
      out.insert(role_fact(pred, args[0], args[1]));
    } else {
      p.fail("facts are unary or binary");
    }
    if (!p.accept(";")) p.accept(",");
  }
  return out;
}

std::string serialize(const Instance& inst) {
  std::ostringstream o;
  std::vector<std::string> plain, dist;
  for (const auto& [n, d] : inst.constants.entries) (d ? dist : plain).push_back(n);
  o << "constants {\n";
  if (!plain.empty()) o << "  " << join(plain, ", ") << ";\n";
  if (!dist.empty()) o << "  distinguished " << join(dist, ", ") << ";\n";
  o << "}\n\ntbox {\n";
  const TBox& t = inst.tbox;
  if (!t.concepts().empty()) o << "  concept " << join({t.concepts().begin(), t.concepts().end()}, ", ") << ";\n";
  if (!t.roles().empty()) o << "  role " << join({t.roles().begin(), t.roles().end()}, ", ") << ";\n";
  for (const auto& r : t.functs()) o << "  funct " << r.str() << ";\n";
  for (const auto& ci : t.concept_inclusions())
    o << "  " << ci.lhs.str() << " <= " << (ci.negated ? "not " : "") << ci.rhs.str() << ";\n";
  for (const auto& ri : t.role_inclusions())
    o << "  " << ri.lhs.str() << " <= " << (ri.negated ? "not " : "") << ri.rhs.str() << ";\n";
  o << "}\n\nabox {\n";
  for (const auto& f : inst.abox) o << "  " << f.str() << ";\n";
  o << "}\n";
  const ServiceConfig& s = inst.services;
  if (s.mode == ServiceConfig::Mode::Enumerate) {
    if (!s.values.empty()) o << "\nservice enumerate { " << join(s.values, ", ") << " }\n";
  } else {
    std::map<std::string, std::vector<std::string>> lines;
    for (const auto& [call, v] : s.table) lines[call.substr(0, call.find('('))].push_back(call + " = " + v + ";");
    for (const auto& [f, v] : s.defaults) lines[f].push_back("default = " + v + ";");
    for (const auto& [f, ls] : lines) o << "\nservice " << f << " { " << join(ls, " ") << " }\n";
  }
  for (const auto& a : inst.actions) {
    o << "\naction " << a.name << "(" << join(a.params, ", ") << ") {\n";
    for (const auto& e : a.effects)
      o << "  effect " << to_string(*e.guard) << " -> add { " << atoms_str(e.add) << " }, del { "
        << atoms_str(e.del) << " };\n";
    o << "}\n";
  }
  if (inst.process) {
    o << "\nprocess {\n";
    for (const auto& r : *inst.process)
      o << "  " << to_string(*r.cond) << " => " << r.action << "(" << join(r.args, ", ") << ");\n";
    o << "}\n";
  }
  if (inst.program) o << "\nprogram " << to_string(*inst.program) << "\n";
  for (const auto& [n, f] : inst.formulas) o << "\nformula " << n << ": " << to_string(*f) << "\n";
  if (inst.limits)
    o << "\nlimits { max_states = " << inst.limits->max_states << "; max_run_adom = " << inst.limits->max_run_adom
      << "; }\n";
  return o.str();
}

bool same_model(const Instance& a, const Instance& b) {
  if (!(a.constants == b.constants) || !(a.tbox == b.tbox) || a.abox != b.abox) return false;
  if (!(a.services == b.services)) return false;
  if (a.actions.size() != b.actions.size()) return false;
  for (std::size_t i = 0; i < a.actions.size(); ++i)
    if (!same_action(a.actions[i], b.actions[i])) return false;
  if (a.process.has_value() != b.process.has_value()) return false;
  if (a.process) {
    if (a.process->size() != b.process->size()) return false;
    for (std::size_t i = 0; i < a.process->size(); ++i) {
      const auto& x = (*a.process)[i];
      const auto& y = (*b.process)[i];
      if (x.action != y.action || x.args != y.args || !equal(*x.cond, *y.cond)) return false;
    }
  }
  if ((a.program == nullptr) != (b.program == nullptr)) return false;
  if (a.program && !equal(*a.program, *b.program)) return false;
  if (a.formulas.size() != b.formulas.size()) return false;
  for (std::size_t i = 0; i < a.formulas.size(); ++i)
    if (a.formulas[i].first != b.formulas[i].first || !equal(*a.formulas[i].second, *b.formulas[i].second))
      return false;
  if (a.limits.has_value() != b.limits.has_value()) return false;
  if (a.limits && (a.limits->max_states != b.limits->max_states || a.limits->max_run_adom != b.limits->max_run_adom))
    return false;
  return true;
}

namespace {

nlohmann::ordered_json calls_json(const ServiceCallMap& m) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& [c, v] : m) out.push_back({{"call", c}, {"value", v}});
  return out;
}

}  // namespace

std::string ts_to_json(const TransitionSystem& ts) {
  using J = nlohmann::ordered_json;
  J states = J::array();
  for (std::size_t i = 0; i < ts.states.size(); ++i) {
    const TsState& s = ts.states[i];
    J facts = J::array();
    for (const auto& f : s.abox) facts.push_back(f.str());
    J st;
    st["id"] = i;
    st["abox"] = facts;
    st["scmap"] = calls_json(s.scmap);
    if (s.has_program) st["program_pid"] = s.program;
    states.push_back(st);
  }
  J edges = J::array();
  for (const auto& e : ts.edges) {
    J sigma = J::object();
    for (const auto& [k, v] : e.sigma) sigma[k] = v;
    edges.push_back({{"src", e.src}, {"dst", e.dst}, {"action", e.action}, {"sigma", sigma},
                     {"theta", calls_json(e.theta)}});
  }
  J out;
  out["states"] = states;
  out["edges"] = edges;
  out["initial"] = ts.initial;
  return out.dump(2) + "\n";
}

std::string ts_to_dot(const TransitionSystem& ts) {
  auto esc = [](std::string s) {
    std::string out;
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out;
  };
  std::ostringstream o;
  o << "digraph ts {\n  node [shape=box];\n";
  for (std::size_t i = 0; i < ts.states.size(); ++i)
    o << "  s" << i << " [label=\"" << i << ": " << esc(ts.states[i].abox.str()) << "\""
      << (i == ts.initial ? ", penwidth=2" : "") << "];\n";
  for (const auto& e : ts.edges)
    o << "  s" << e.src << " -> s" << e.dst << " [label=\"" << esc(e.action + to_string(e.sigma)) << "\"];\n";
  o << "}\n";
  return o.str();
}

}  // namespace kab
