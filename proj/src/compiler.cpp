#include "kab/compiler.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "kab/consistency.hpp"
#include "kab/errors.hpp"

namespace kab {

namespace {

const Term X = Term::var("X");
const Term Y = Term::var("Y");
const Term Z = Term::var("Z");
const Term W = Term::var("W");

EcqPtr plain(std::vector<Atom> atoms) { return ecq::query(make_ucq({CQ{std::move(atoms)}}, true)); }

EcqPtr differ(const Term& a, const Term& b) { return ecq::neg(ecq::atom(eq_atom(a, b), true)); }

std::string ident(const BasicRole& r) { return r.inverse ? r.name + "_inv" : r.name; }

std::string ident(const BasicConcept& b) { return b.exists ? "some_" + ident(b.role()) : b.name; }

std::string ident_pid(std::string pid) {
  std::replace(pid.begin(), pid.end(), '.', '_');
  return pid;
}

// P(x,x) is inconsistent on its own.
bool self_type(const NegativeClosure& nc, const std::string& p) {
  BasicRole r{p, false};
  return nc.concepts.count({BasicConcept::some(r), BasicConcept::some(r.inv())}) ||
         nc.roles.count({r, r.inv()});
}

// Atom of the concept fact at `at`, with the role witness named `w`.
Atom side(const BasicConcept& b, const Term& at, const std::string& w) { return concept_atom(b, at, w); }

// Guard excluding the case where the atom is a self-conflicting P(c,c) fact.
EcqPtr not_self(const NegativeClosure& nc, const Atom& a) {
  if (a.args.size() != 2 || !self_type(nc, a.pred)) return nullptr;
  return differ(a.args[0], a.args[1]);
}

EcqPtr conj_opt(EcqPtr a, EcqPtr b) { return b ? ecq::conj(std::move(a), std::move(b)) : a; }

Action make_action(std::string name, std::vector<std::string> params, std::vector<Effect> effects) {
  return {std::move(name), std::move(params), std::move(effects)};
}

Effect del_effect(EcqPtr guard, Atom a) { return {std::move(guard), {}, {std::move(a)}}; }

void add_unique(std::vector<Action>& acts, Action a) {
  for (const auto& x : acts)
    if (x.name == a.name) return;
  acts.push_back(std::move(a));
}

RepairActions delete_one_side(const TBox& t, const NegativeClosure& nc) {
  RepairActions out;
  for (const auto& r : t.functs()) {
    std::string name = "__fix_" + ident(r);
    EcqPtr body = ecq::conj(plain({role_atom(r, X, Y), role_atom(r, X, Z)}), differ(Y, Z));
    out.invocations.push_back({ecq::exists("Z", body), name, {"X", "Y"}});
    add_unique(out.actions, make_action(name, {"X", "Y"},
                                        {del_effect(ecq::conj(plain({role_atom(r, X, Z)}), differ(Z, Y)),
                                                    role_atom(r, X, Z))}));
  }
  for (const auto& [b1, b2] : nc.concepts) {
    std::string name = "__del_" + ident(b1);
    out.invocations.push_back({plain({side(b1, X, "_w1"), side(b2, X, "_w2")}), name, {"X"}});
    EcqPtr g = b1.exists ? plain({side(b1, X, "W")}) : ecq::top();
    add_unique(out.actions, make_action(name, {"X"}, {del_effect(g, side(b1, X, "W"))}));
  }
  for (const auto& [r1, r2] : nc.roles) {
    std::string name = "__del_" + ident(r1);
    out.invocations.push_back({plain({role_atom(r1, X, Y), role_atom(r2, X, Y)}), name, {"X", "Y"}});
    add_unique(out.actions, make_action(name, {"X", "Y"}, {del_effect(ecq::top(), role_atom(r1, X, Y))}));
  }
  return out;
}

// Effects deleting every fact realizing b at `at`.
Effect delete_concept(const BasicConcept& b, const Term& at) {
  if (!b.exists) return del_effect(ecq::top(), side(b, at, "W"));
  return del_effect(plain({side(b, at, "W")}), side(b, at, "W"));
}

RepairActions keep_one(const TBox& t, const NegativeClosure& nc) {
  RepairActions out;
  for (const auto& n : t.concepts()) {
    BasicConcept b = BasicConcept::atomic(n);
    std::vector<CQ> clash;
    std::vector<Effect> effects;
    for (const auto& [b1, b2] : nc.concepts) {
      if (b1 != b) continue;
      clash.push_back(CQ{{side(b, X, "_w1"), side(b2, X, "_w2")}});
      effects.push_back(delete_concept(b2, X));
    }
    if (clash.empty()) continue;
    std::string name = "__keep_" + n;
    out.invocations.push_back({ecq::query(make_ucq(clash, true)), name, {"X"}});
    out.actions.push_back(make_action(name, {"X"}, std::move(effects)));
  }
  for (const auto& p : t.roles()) {
    BasicRole r{p, false};
    Atom self = role_atom(r, X, Y);
    std::vector<CQ> clash;
    std::vector<EcqPtr> fclash;
    std::vector<Effect> effects;
    for (const auto& [b1, b2] : nc.concepts) {
      if (!b1.exists || b1.name != p) continue;
      const Term& at = b1.inverse ? Y : X;
      clash.push_back(CQ{{self, side(b2, at, "_w2")}});
      effects.push_back(delete_concept(b2, at));
    }
    for (const auto& [r1, r2] : nc.roles) {
      if (r1.name != p) continue;
      Atom other = r1.inverse ? role_atom(r2, Y, X) : role_atom(r2, X, Y);
      clash.push_back(CQ{{self, other}});
      effects.push_back(del_effect(ecq::top(), other));
    }
    for (const auto& f : t.functs()) {
      if (f.name != p) continue;
      // funct(P): P(X,Z), Z != Y; funct(P-): P(Z,Y), Z != X.
      Atom other = f.inverse ? role_atom(r, Z, Y) : role_atom(r, X, Z);
      const Term& mine = f.inverse ? X : Y;
      EcqPtr g = ecq::conj(plain({other}), differ(Z, mine));
      fclash.push_back(ecq::exists("Z", ecq::conj(plain({self, other}), differ(Z, mine))));
      effects.push_back(del_effect(g, other));
    }
    if (clash.empty() && fclash.empty()) continue;
    std::vector<EcqPtr> parts;
    if (!clash.empty()) parts.push_back(ecq::query(make_ucq(clash, true)));
    for (auto& f : fclash) parts.push_back(f);
    EcqPtr guard = conj_opt(ecq::disj_all(parts), not_self(nc, self));
    std::string name = "__keep_" + p;
    out.invocations.push_back({guard, name, {"X", "Y"}});
    out.actions.push_back(make_action(name, {"X", "Y"}, std::move(effects)));
    if (self_type(nc, p)) {
      std::string drop = "__drop_" + p;
      Atom loop = role_atom(r, X, X);
      out.invocations.push_back({plain({loop}), drop, {"X"}});
      out.actions.push_back(make_action(drop, {"X"}, {del_effect(ecq::top(), loop)}));
    }
  }
  return out;
}

// Shared program rewriting: every invoke becomes invoke ; suffix.
ProgramPtr rewrite_invokes(const ProgramPtr& p, const std::function<ProgramPtr(const Program&)>& f) {
  using K = Program::Kind;
  switch (p->kind) {
    case K::Empty: return prog::empty();
    case K::Invoke: return f(*p);
    case K::Choice: return prog::choice(rewrite_invokes(p->a, f), rewrite_invokes(p->b, f));
    case K::Seq: return prog::seq(rewrite_invokes(p->a, f), rewrite_invokes(p->b, f));
    case K::If: return prog::ite(p->cond, rewrite_invokes(p->a, f), rewrite_invokes(p->b, f));
    case K::While: return prog::loop(p->cond, rewrite_invokes(p->a, f));
  }
  return p;
}

ProgramPtr plain_invoke(const Program& p) { return prog::invoke(p.cond, p.action, p.args); }

void collect_pred_vars(const Mu& f, std::set<std::string>& out) {
  if (f.kind == Mu::Kind::Var || f.kind == Mu::Kind::Lfp || f.kind == Mu::Kind::Gfp) out.insert(f.var);
  if (f.a) collect_pred_vars(*f.a, out);
  if (f.b) collect_pred_vars(*f.b, out);
}

class FreshVars {
 public:
  explicit FreshVars(const Mu& f) { collect_pred_vars(f, used_); }
  std::string next() {
    std::string z;
    do z = "Z" + std::to_string(k_++);
    while (used_.count(z));
    used_.insert(z);
    return z;
  }

 private:
  std::set<std::string> used_;
  int k_ = 0;
};

// Structural recursion shared by the three formula translations; `modal`
// handles the diamond/box cases with the already translated operand.
MuPtr translate(const MuPtr& f, const std::function<MuPtr(bool box, MuPtr inner)>& modal) {
  using K = Mu::Kind;
  switch (f->kind) {
    case K::Query:
    case K::Var:
    case K::True:
    case K::False: return f;
    case K::Not: return mu::neg(translate(f->a, modal));
    case K::And: return mu::conj(translate(f->a, modal), translate(f->b, modal));
    case K::Or: return mu::disj(translate(f->a, modal), translate(f->b, modal));
    case K::Exists: return mu::exists(f->var, translate(f->a, modal));
    case K::Forall: return mu::forall(f->var, translate(f->a, modal));
    case K::Lfp: return mu::lfp(f->var, translate(f->a, modal));
    case K::Gfp: return mu::gfp(f->var, translate(f->a, modal));
    case K::Diamond: return modal(false, translate(f->a, modal));
    case K::Box: return modal(true, translate(f->a, modal));
  }
  return f;
}

MuPtr marker(std::string_view pred, const std::string& c) { return mu::query(marker_query(pred, c)); }

void require_nnf(const MuPtr& f) {
  if (!is_nnf(*f)) throw FormulaNotNNF("formula is not in negation normal form: " + to_string(*f));
}

Atom renamed(const Atom& a) {
  Atom out = a;
  out.pred = new_name(a.pred);
  return out;
}

BasicConcept renamed(BasicConcept b) {
  b.name = new_name(b.name);
  return b;
}

BasicRole renamed(BasicRole r) {
  r.name = new_name(r.name);
  return r;
}

}  // namespace

EcqPtr marker_query(std::string_view pred, const std::string& c) { return ecq::atom(marker_atom(pred, c), true); }

Atom marker_atom(std::string_view pred, const std::string& c) {
  return make_atom(std::string(pred), {Term::constant(c)});
}

Gkab tkabs(const Kab& k) {
  Gkab g{k.constants, k.tbox, k.a0, k.actions, nullptr};
  std::vector<ProgramPtr> body;
  for (const auto& r : k.process) body.push_back(prog::invoke(r.cond, r.action, r.args));
  g.program = body.empty() ? prog::empty() : prog::loop(ecq::top(), prog::choice_all(body));
  g.program = assign_ids(g.program);
  return g;
}

RepairActions brepair_actions(const TBox& t, BRepairStrategy strategy) {
  NegativeClosure nc = saturate_negatives(t);
  return strategy == BRepairStrategy::KeepOne ? keep_one(t, nc) : delete_one_side(t, nc);
}

ProgramPtr brepair_program(const TBox& t, BRepairStrategy strategy) {
  RepairActions ra = brepair_actions(t, strategy);
  std::vector<ProgramPtr> body;
  for (const auto& i : ra.invocations) body.push_back(prog::invoke(i.guard, i.action, i.args));
  return prog::loop(build_qunsat(t), prog::choice_all(body));
}

Gkab tgkabb(const Gkab& g, BRepairStrategy strategy) {
  Gkab out{g.constants, g.tbox.positive_part(), g.a0, g.actions, nullptr};
  out.constants.add("rep", true);
  RepairActions ra = brepair_actions(g.tbox, strategy);
  Action set{"__set_rep", {}, {{ecq::top(), {marker_atom(kStatePred, "rep")}, {}}}};
  Action unset{"__unset_rep", {}, {{ecq::top(), {}, {marker_atom(kStatePred, "rep")}}}};
  out.actions.push_back(set);
  out.actions.push_back(unset);
  for (auto& a : ra.actions) out.actions.push_back(a);
  ProgramPtr repair = brepair_program(g.tbox, strategy);
  out.program = assign_ids(rewrite_invokes(g.program, [&](const Program& p) {
    return prog::seq_all({plain_invoke(p), prog::invoke(ecq::top(), set.name, {}), repair,
                          prog::invoke(ecq::top(), unset.name, {})});
  }));
  return out;
}

MuPtr tforb(const MuPtr& f) {
  require_nnf(f);
  FreshVars fresh(*f);
  MuPtr m = marker(kStatePred, "rep");
  return translate(f, [&](bool box, MuPtr inner) {
    std::string z = fresh.next();
    if (!box) {
      MuPtr body = mu::disj(mu::conj(m, mu::diamond(mu::var(z))), mu::conj(mu::neg(m), inner));
      return mu::diamond(mu::diamond(mu::lfp(z, body)));
    }
    MuPtr body = mu::disj(mu::conj(m, mu::conj(mu::box(mu::var(z)), mu::diamond(mu::top()))),
                          mu::conj(mu::neg(m), inner));
    return mu::box(mu::box(mu::lfp(z, body)));
  });
}

Action crepair_action(const TBox& t) {
  NegativeClosure nc = saturate_negatives(t);
  std::vector<Effect> effects;
  // f is deleted when it clashes with some g that is not self-conflicting;
  // self-conflicting facts are deleted unconditionally.
  for (const auto& [b1, b2] : nc.concepts) {
    Atom f = side(b1, X, "W1");
    Atom g = side(b2, X, "W2");
    effects.push_back(del_effect(conj_opt(plain({f, g}), not_self(nc, g)), f));
  }
  for (const auto& [r1, r2] : nc.roles) {
    Atom f = role_atom(r1, X, Y);
    Atom g = role_atom(r2, X, Y);
    effects.push_back(del_effect(conj_opt(plain({f, g}), not_self(nc, g)), f));
  }
  for (const auto& r : t.functs()) {
    Atom f = role_atom(r, X, Y);
    Atom g = role_atom(r, X, Z);
    effects.push_back(del_effect(conj_opt(ecq::conj(plain({f, g}), differ(Y, Z)), not_self(nc, g)), f));
  }
  for (const auto& p : t.roles()) {
    if (!self_type(nc, p)) continue;
    Atom loop = role_atom({p, false}, X, X);
    effects.push_back(del_effect(plain({loop}), loop));
  }
  return {"__crepair", {}, std::move(effects)};
}

Gkab tgkabc(const Gkab& g) {
  Gkab out{g.constants, g.tbox.positive_part(), g.a0, g.actions, nullptr};
  Action c = crepair_action(g.tbox);
  out.actions.push_back(c);
  out.program = assign_ids(rewrite_invokes(
      g.program, [&](const Program& p) { return prog::seq(plain_invoke(p), prog::invoke(ecq::top(), c.name, {})); }));
  return out;
}

MuPtr tford(const MuPtr& f) {
  return translate(f, [](bool box, MuPtr inner) {
    return box ? mu::box(mu::box(inner)) : mu::diamond(mu::diamond(inner));
  });
}

std::string new_name(const std::string& n) { return n + std::string(kNewSuffix); }

TBox new_vocabulary_tbox(const TBox& t) {
  auto ends_new = [](const std::string& n) {
    return n.size() >= kNewSuffix.size() && n.compare(n.size() - kNewSuffix.size(), kNewSuffix.size(), kNewSuffix) == 0;
  };
  for (const auto& n : t.concepts())
    if (ends_new(n) || t.has_role(new_name(n)))
      throw VocabularyCollision("concept name " + n + " collides with the renamed vocabulary");
  for (const auto& n : t.roles())
    if (ends_new(n) || t.has_concept(new_name(n)))
      throw VocabularyCollision("role name " + n + " collides with the renamed vocabulary");
  TBox out = t.positive_part();
  for (const auto& n : t.concepts()) out.declare_concept(new_name(n));
  for (const auto& n : t.roles()) out.declare_role(new_name(n));
  for (const auto& ci : t.concept_inclusions()) out.add(ConceptInclusion{renamed(ci.lhs), renamed(ci.rhs), ci.negated});
  for (const auto& ri : t.role_inclusions()) out.add(RoleInclusion{renamed(ri.lhs), renamed(ri.rhs), ri.negated});
  for (const auto& r : t.functs()) out.add_funct(renamed(r));
  return out;
}

Action evolution_action(const TBox& t) {
  NegativeClosure nc = saturate_negatives(t);
  std::vector<Effect> effects;
  for (const auto& r : t.functs()) {
    EcqPtr g = ecq::conj(plain({role_atom(r, X, Y), role_atom(r, X, Z), role_atom(renamed(r), X, Y)}), differ(Y, Z));
    effects.push_back(del_effect(g, role_atom(r, X, Z)));
  }
  for (const auto& [b1, b2] : nc.concepts) {
    Atom old = side(b2, X, "W");
    effects.push_back(del_effect(plain({side(b1, X, "_w1"), old, side(renamed(b1), X, "_w2")}), old));
  }
  for (const auto& [r1, r2] : nc.roles) {
    Atom old = role_atom(r2, X, Y);
    effects.push_back(del_effect(plain({role_atom(r1, X, Y), old, role_atom(renamed(r1), X, Y)}), old));
  }
  for (const auto& n : t.concepts()) {
    Atom a = make_atom(new_name(n), {X});
    effects.push_back(del_effect(plain({a}), a));
  }
  for (const auto& n : t.roles()) {
    Atom a = make_atom(new_name(n), {X, Y});
    effects.push_back(del_effect(plain({a}), a));
  }
  return {"__evolve", {}, std::move(effects)};
}

Gkab tgkabe(const Gkab& g) {
  Gkab out{g.constants, new_vocabulary_tbox(g.tbox), g.a0, {}, nullptr};
  for (const auto& a : g.actions) {
    Action b = a;
    for (auto& e : b.effects) {
      std::vector<Atom> extra;
      for (const auto& at : e.add) extra.push_back(renamed(at));
      e.add.insert(e.add.end(), extra.begin(), extra.end());
    }
    out.actions.push_back(std::move(b));
  }
  Action ev = evolution_action(g.tbox);
  out.actions.push_back(ev);
  out.program = assign_ids(rewrite_invokes(
      g.program, [&](const Program& p) { return prog::seq(plain_invoke(p), prog::invoke(ecq::top(), ev.name, {})); }));
  return out;
}

namespace {

struct ProgCtx {
  const Gkab& g;
  int* counter;
  ConstantTable* taken;
  ProgramTranslation out;

  std::string fresh(const std::string& prefix) {
    std::string c = taken->fresh(prefix, counter);
    taken->add(c, true);
    out.constants.push_back(c);
    return c;
  }

  EcqPtr flag(const std::string& c) const { return marker_query(kFlagPred, c); }

  Action flag_action(const std::string& name, std::vector<Atom> add, std::vector<Atom> del) {
    add.push_back(marker_atom(kStatePred, "temp"));
    return {name, {}, {{ecq::top(), std::move(add), std::move(del)}}};
  }

  void rule(EcqPtr cond, const Action& a, std::vector<std::string> args = {}) {
    out.rules.push_back({std::move(cond), a.name, std::move(args)});
    out.actions.push_back(a);
  }

  void run(const std::string& pre, const ProgramPtr& p, const std::string& post) {
    using K = Program::Kind;
    if (p->pid.empty()) throw ValidationError("tgprog requires program ids");
    out.flags.pre[p->pid] = pre;
    out.flags.post[p->pid] = post;
    std::string id = ident_pid(p->pid);
    Atom fpre = marker_atom(kFlagPred, pre);
    Atom fpost = marker_atom(kFlagPred, post);
    switch (p->kind) {
      case K::Empty:
        rule(flag(pre), flag_action("__eps_" + id, {fpost}, {fpre}));
        return;
      case K::Invoke: {
        Action a = g.action(p->action);
        a.name = "__inv_" + id;
        a.effects.push_back({ecq::top(), {fpost}, {fpre, marker_atom(kStatePred, "temp")}});
        Atom noop = make_atom(std::string(kNoopPred), {W});
        a.effects.push_back(del_effect(plain({noop}), noop));
        rule(ecq::conj(p->cond, flag(pre)), a, p->args);
        run(post, prog::empty(epsilon_pid(p->pid)), post);
        return;
      }
      case K::Choice: {
        std::string c1 = fresh("c"), c2 = fresh("c");
        rule(flag(pre), flag_action("__pick1_" + id, {marker_atom(kFlagPred, c1)}, {fpre}));
        rule(flag(pre), flag_action("__pick2_" + id, {marker_atom(kFlagPred, c2)}, {fpre}));
        run(c1, p->a, post);
        run(c2, p->b, post);
        return;
      }
      case K::Seq: {
        std::string c = fresh("c");
        run(pre, p->a, c);
        run(c, p->b, post);
        return;
      }
      case K::If: {
        std::string c1 = fresh("c"), c2 = fresh("c");
        rule(ecq::conj(p->cond, flag(pre)), flag_action("__then_" + id, {marker_atom(kFlagPred, c1)}, {fpre}));
        rule(ecq::conj(ecq::neg(p->cond), flag(pre)),
             flag_action("__else_" + id, {marker_atom(kFlagPred, c2)}, {fpre}));
        run(c1, p->a, post);
        run(c2, p->b, post);
        return;
      }
      case K::While: {
        std::string start = fresh("c"), noop = fresh("c");
        EcqPtr idle = marker_query(kNoopPred, noop);
        Atom fnoop = marker_atom(kNoopPred, noop);
        rule(ecq::conj(ecq::conj(p->cond, flag(pre)), ecq::neg(idle)),
             flag_action("__do_" + id, {marker_atom(kFlagPred, start), fnoop}, {fpre}));
        rule(ecq::conj(flag(pre), ecq::disj(ecq::neg(p->cond), idle)),
             flag_action("__end_" + id, {fpost}, {fpre, fnoop}));
        run(start, p->a, pre);
        return;
      }
    }
  }
};

}  // namespace

ProgramTranslation tgprog(const std::string& pre, const ProgramPtr& p, const std::string& post, const Gkab& g,
                          int* counter, ConstantTable* taken) {
  ProgCtx ctx{g, counter, taken, {}};
  ctx.run(pre, p, post);
  return std::move(ctx.out);
}

Kab tgkab(const Gkab& g, int seed) {
  Kab k{g.constants, g.tbox, g.a0, {}, {}};
  for (const char* c : {"start", "end", "temp"}) k.constants.add(c, true);
  k.a0.insert(concept_fact(std::string(kFlagPred), "start"));
  ProgramPtr p = g.program->pid.empty() ? assign_ids(g.program) : g.program;
  int counter = seed;
  ProgramTranslation tr = tgprog("start", p, "end", g, &counter, &k.constants);
  k.actions = std::move(tr.actions);
  k.process = std::move(tr.rules);
  return k;
}

MuPtr tforj(const MuPtr& f) {
  require_nnf(f);
  FreshVars fresh(*f);
  MuPtr temp = marker(kStatePred, "temp");
  return translate(f, [&](bool box, MuPtr inner) {
    std::string z = fresh.next();
    if (!box) {
      MuPtr body = mu::disj(mu::conj(temp, mu::diamond(mu::var(z))), mu::conj(mu::neg(temp), inner));
      return mu::diamond(mu::lfp(z, body));
    }
    MuPtr body = mu::disj(mu::conj(temp, mu::box(mu::var(z))), mu::conj(mu::neg(temp), inner));
    return mu::box(mu::gfp(z, body));
  });
}

}  // namespace kab
