// Reference oracles and random generators shared by the unit and acceptance tests.
// The oracles avoid the library's saturation, rewriting and repair code paths.
#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kab/action.hpp"
#include "kab/compiler.hpp"
#include "kab/consistency.hpp"
#include "kab/errors.hpp"
#include "kab/golog.hpp"
#include "kab/mu.hpp"
#include "kab/repair.hpp"

namespace kab::oracle {

// ---------------------------------------------------------------------------
// Consistency by exhaustive model search over the domain adom(A) plus one
// anonymous element, encoded as CNF and solved by DPLL.

class Cnf {
 public:
  int var(const std::string& name) {
    auto [it, fresh] = ids_.emplace(name, static_cast<int>(ids_.size()) + 1);
    return it->second;
  }
  void clause(std::vector<int> c) { clauses_.push_back(std::move(c)); }

  bool satisfiable() const {
    std::vector<int> val(ids_.size() + 1, 0);
    return dpll(val);
  }

 private:
  bool dpll(std::vector<int>& val) const {
    std::vector<int> trail;
    auto undo = [&] {
      for (int v : trail) val[v] = 0;
    };
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& c : clauses_) {
        int unassigned = 0, last = 0;
        bool sat = false;
        for (int lit : c) {
          int v = val[std::abs(lit)];
          if (v == 0) {
            ++unassigned;
            last = lit;
          } else if ((v > 0) == (lit > 0)) {
            sat = true;
            break;
          }
        }
        if (sat) continue;
        if (unassigned == 0) {
          undo();
          return false;
        }
        if (unassigned == 1) {
          val[std::abs(last)] = last > 0 ? 1 : -1;
          trail.push_back(std::abs(last));
          changed = true;
        }
      }
    }
    int pick = 0;
    for (std::size_t v = 1; v < val.size(); ++v)
      if (val[v] == 0) {
        pick = static_cast<int>(v);
        break;
      }
    if (pick == 0) return true;
    for (int s : {1, -1}) {
      val[pick] = s;
      if (dpll(val)) return true;
    }
    val[pick] = 0;
    undo();
    return false;
  }

  std::map<std::string, int> ids_;
  std::vector<std::vector<int>> clauses_;
};

inline bool oracle_consistent(const TBox& t, const ABox& a) {
  std::vector<std::string> dom;
  for (const auto& c : adom(strip_markers(a))) dom.push_back(c);
  dom.push_back("*anon*");
  Cnf cnf;
  auto cv = [&](const std::string& n, const std::string& d) { return cnf.var(n + "(" + d + ")"); };
  auto rv = [&](const std::string& p, const std::string& d, const std::string& e) {
    return cnf.var(p + "(" + d + "," + e + ")");
  };
  auto role_lit = [&](const BasicRole& r, const std::string& d, const std::string& e) {
    return r.inverse ? rv(r.name, e, d) : rv(r.name, d, e);
  };
  // Literals whose disjunction expresses B(d).
  auto concept_lits = [&](const BasicConcept& b, const std::string& d) {
    std::vector<int> out;
    if (!b.exists) {
      out.push_back(cv(b.name, d));
    } else {
      for (const auto& e : dom) out.push_back(role_lit(b.role(), d, e));
    }
    return out;
  };
  for (const auto& n : t.concepts())
    for (const auto& d : dom) cv(n, d);
  for (const auto& f : strip_markers(a)) cnf.clause({f.role ? rv(f.pred, f.s, f.o) : cv(f.pred, f.s)});
  for (const auto& ci : t.concept_inclusions()) {
    for (const auto& d : dom) {
      for (int l : concept_lits(ci.lhs, d)) {
        if (ci.negated) {
          for (int r : concept_lits(ci.rhs, d)) cnf.clause({-l, -r});
        } else {
          std::vector<int> c{-l};
          for (int r : concept_lits(ci.rhs, d)) c.push_back(r);
          cnf.clause(c);
        }
      }
    }
  }
  for (const auto& ri : t.role_inclusions())
    for (const auto& d : dom)
      for (const auto& e : dom) {
        int l = role_lit(ri.lhs, d, e), r = role_lit(ri.rhs, d, e);
        cnf.clause({-l, ri.negated ? -r : r});
      }
  for (const auto& r : t.functs())
    for (const auto& d : dom)
      for (const auto& e : dom)
        for (const auto& f : dom)
          if (e < f) cnf.clause({-role_lit(r, d, e), -role_lit(r, d, f)});
  return cnf.satisfiable();
}

// ---------------------------------------------------------------------------
// Repairs by subset enumeration.

using ConsistencyFn = std::function<bool(const TBox&, const ABox&)>;

inline std::vector<ABox> oracle_b_repairs(const TBox& t, const ABox& a, const ConsistencyFn& consistent) {
  ABox base = strip_markers(a);
  ABox marks = minus(a, base);
  const auto& fs = base.facts();
  std::size_t n = fs.size();
  std::vector<std::pair<unsigned, ABox>> ok;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    ABox s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) s.insert(fs[i]);
    if (consistent(t, s)) ok.emplace_back(mask, s);
  }
  std::vector<ABox> out;
  for (const auto& [m, s] : ok) {
    bool maximal = true;
    for (const auto& [m2, s2] : ok)
      if (m2 != m && (m2 & m) == m) maximal = false;
    if (maximal) out.push_back(unite(s, marks));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline ABox oracle_c_repair(const TBox& t, const ABox& a, const ConsistencyFn& consistent) {
  auto rs = oracle_b_repairs(t, a, consistent);
  ABox out = rs.front();
  for (const auto& r : rs) out = intersect(out, r);
  return out;
}

inline ABox oracle_evolve(const TBox& t, const ABox& a, const ABox& fplus, const ABox& fminus,
                          const ConsistencyFn& consistent) {
  // Largest subset of A \ F- consistent together with F+; unique when it exists.
  ABox rest = minus(a, fminus);
  const auto& fs = rest.facts();
  std::size_t n = fs.size();
  std::vector<ABox> best;
  std::size_t best_size = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    ABox s = fplus;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) {
        s.insert(fs[i]);
        ++k;
      }
    if (!consistent(t, s)) continue;
    if (best.empty() || k > best_size) {
      best = {s};
      best_size = k;
    } else if (k == best_size) {
      best.push_back(s);
    }
  }
  return best.size() == 1 ? best.front() : ABox{};
}

// ---------------------------------------------------------------------------
// Certain answers by a depth-bounded restricted chase followed by evaluation
// of the query over the chased database.

struct ChaseDb {
  std::set<std::vector<std::string>> facts;  // {pred, arg...}
  std::set<std::string> constants;
};

inline ChaseDb chase(const TBox& t, const ABox& a, int max_depth = 3) {
  ChaseDb db;
  std::map<std::string, int> depth;
  for (const auto& f : a) {
    if (f.role) {
      db.facts.insert({f.pred, f.s, f.o});
    } else {
      db.facts.insert({f.pred, f.s});
    }
    for (const auto& c : {f.s, f.o})
      if (!c.empty()) {
        db.constants.insert(c);
        depth[c] = 0;
      }
  }
  int nulls = 0;
  auto holds_concept = [&](const BasicConcept& b, const std::string& d) {
    if (!b.exists) return db.facts.count({b.name, d}) > 0;
    for (const auto& f : db.facts)
      if (f.size() == 3 && f[0] == b.name && f[b.inverse ? 2 : 1] == d) return true;
    return false;
  };
  auto role_fact_of = [](const BasicRole& r, const std::string& d, const std::string& e) {
    return r.inverse ? std::vector<std::string>{r.name, e, d} : std::vector<std::string>{r.name, d, e};
  };
  for (bool changed = true; changed;) {
    changed = false;
    std::set<std::string> individuals;
    for (const auto& f : db.facts)
      for (std::size_t i = 1; i < f.size(); ++i) individuals.insert(f[i]);
    for (const auto& ci : t.concept_inclusions()) {
      if (ci.negated) continue;
      for (const auto& d : individuals) {
        if (!holds_concept(ci.lhs, d) || holds_concept(ci.rhs, d)) continue;
        if (!ci.rhs.exists) {
          db.facts.insert({ci.rhs.name, d});
          changed = true;
        } else if (depth[d] < max_depth) {
          std::string n = "_null" + std::to_string(nulls++);
          depth[n] = depth[d] + 1;
          db.facts.insert(role_fact_of(ci.rhs.role(), d, n));
          changed = true;
        }
      }
    }
    for (const auto& ri : t.role_inclusions()) {
      if (ri.negated) continue;
      std::vector<std::vector<std::string>> add;
      for (const auto& f : db.facts) {
        if (f.size() != 3 || f[0] != ri.lhs.name) continue;
        // ri.lhs holds on (x, y).
        const std::string& x = ri.lhs.inverse ? f[2] : f[1];
        const std::string& y = ri.lhs.inverse ? f[1] : f[2];
        add.push_back(role_fact_of(ri.rhs, x, y));
      }
      for (auto& f : add)
        if (db.facts.insert(f).second) changed = true;
    }
  }
  return db;
}

inline std::set<Substitution> eval_on_db(const UCQ& q, const ChaseDb& db) {
  std::set<std::string> inds = db.constants;
  for (const auto& f : db.facts)
    for (std::size_t k = 1; k < f.size(); ++k) inds.insert(f[k]);
  std::set<Substitution> out;
  for (const auto& cq0 : q.cqs) {
    // Relational atoms first, equalities once their sides are bound.
    std::vector<Atom> atoms;
    for (const auto& a : cq0.atoms)
      if (!a.is_eq()) atoms.push_back(a);
    for (const auto& a : cq0.atoms)
      if (a.is_eq()) atoms.push_back(a);
    std::function<void(std::size_t, const Substitution&)> go = [&](std::size_t i, const Substitution& s) {
      auto value = [&](const Term& t) -> std::string {
        if (t.is_const()) return t.name;
        auto it = s.find(t.name);
        return it == s.end() ? std::string() : it->second;
      };
      if (i == atoms.size()) {
        Substitution ans;
        for (const auto& v : q.free) {
          std::string x = value(Term::var(v));
          if (x.empty()) {
            for (const auto& c : db.constants) {
              Substitution s2 = s;
              s2[v] = c;
              go(i, s2);
            }
            return;
          }
          if (!db.constants.count(x)) return;
          ans[v] = x;
        }
        out.insert(ans);
        return;
      }
      const Atom& at = atoms[i];
      if (at.is_eq()) {
        std::string l = value(at.args[0]), r = value(at.args[1]);
        if (!l.empty() && !r.empty()) {
          if (l == r) go(i + 1, s);
        } else if (!l.empty() || !r.empty()) {
          Substitution s2 = s;
          s2[(l.empty() ? at.args[0] : at.args[1]).name] = l.empty() ? r : l;
          go(i + 1, s2);
        } else {
          for (const auto& d : inds) {
            Substitution s2 = s;
            s2[at.args[0].name] = d;
            s2[at.args[1].name] = d;
            go(i + 1, s2);
          }
        }
        return;
      }
      for (const auto& f : db.facts) {
        if (f[0] != at.pred || f.size() != at.args.size() + 1) continue;
        Substitution s2 = s;
        bool ok = true;
        for (std::size_t k = 0; k < at.args.size() && ok; ++k) {
          const Term& t = at.args[k];
          if (t.is_const()) {
            ok = t.name == f[k + 1];
          } else {
            auto [it, fresh] = s2.emplace(t.name, f[k + 1]);
            ok = fresh || it->second == f[k + 1];
          }
        }
        if (ok) go(i + 1, s2);
      }
    };
    go(0, {});
  }
  return out;
}

// True when no basic concept can generate a role chain back to itself.
inline bool acyclic_existentials(const TBox& t) {
  std::map<BasicConcept, std::set<BasicConcept>> edges;
  for (const auto& ci : t.concept_inclusions()) {
    if (ci.negated) continue;
    edges[ci.lhs].insert(ci.rhs);
    if (ci.rhs.exists) edges[ci.rhs].insert(BasicConcept::some(ci.rhs.role().inv()));
  }
  for (const auto& ri : t.role_inclusions()) {
    if (ri.negated) continue;
    edges[BasicConcept::some(ri.lhs)].insert(BasicConcept::some(ri.rhs));
    edges[BasicConcept::some(ri.lhs.inv())].insert(BasicConcept::some(ri.rhs.inv()));
  }
  std::map<BasicConcept, int> color;
  std::function<bool(const BasicConcept&)> dfs = [&](const BasicConcept& b) {
    color[b] = 1;
    for (const auto& c : edges[b]) {
      if (color[c] == 1) return false;
      if (color[c] == 0 && !dfs(c)) return false;
    }
    color[b] = 2;
    return true;
  };
  for (const auto& [b, _] : edges)
    if (color[b] == 0 && !dfs(b)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Transition-system oracles.

inline std::set<std::size_t> reach_oracle(const TransitionSystem& ts, const std::set<std::size_t>& targets) {
  // States from which some target is reachable (including the target itself).
  std::vector<std::vector<std::size_t>> pred(ts.size());
  for (const auto& e : ts.edges) pred[e.dst].push_back(e.src);
  std::set<std::size_t> seen(targets.begin(), targets.end());
  std::deque<std::size_t> q(targets.begin(), targets.end());
  while (!q.empty()) {
    std::size_t s = q.front();
    q.pop_front();
    for (std::size_t p : pred[s])
      if (seen.insert(p).second) q.push_back(p);
  }
  return seen;
}

// Runs a repair program from A under the positive TBox and collects the
// marker-free ABoxes of the terminal configurations. Fails (returns nullopt)
// when a run exceeds `max_depth` steps or stalls in a non-final state.
inline std::optional<std::set<ABox>> repair_outcomes(const TBox& t, const ABox& a, const ProgramPtr& program,
                                                     const std::vector<Action>& actions, std::size_t max_depth) {
  Gkab g{{}, t.positive_part(), a, actions, program};
  ServiceConfig cfg;
  std::set<ABox> out;
  bool ok = true;
  std::function<void(const GkabState&, std::size_t)> dfs = [&](const GkabState& s, std::size_t depth) {
    if (!ok) return;
    auto steps = program_step(g, Filter::S, cfg, s);
    if (steps.empty()) {
      if (!is_final(g.tbox, s)) ok = false;
      out.insert(strip_markers(s.abox));
      return;
    }
    if (depth == max_depth) {
      ok = false;
      return;
    }
    for (const auto& st : steps) dfs(st.next, depth + 1);
  };
  dfs({a, {}, program}, 0);
  if (!ok) return std::nullopt;
  return out;
}

// ---------------------------------------------------------------------------
// Random generators (desk scale).

struct Gen {
  std::mt19937 rng;
  explicit Gen(unsigned seed) : rng(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }
  template <class T>
  const T& pick(const std::vector<T>& xs) {
    return xs[static_cast<std::size_t>(uniform(0, static_cast<int>(xs.size()) - 1))];
  }

  std::vector<std::string> concepts{"N0", "N1", "N2", "N3"};
  std::vector<std::string> roles{"P0", "P1"};
  std::vector<std::string> consts{"a", "b", "c"};

  BasicConcept basic(bool allow_exists = true) {
    if (allow_exists && coin(0.35)) return BasicConcept::some({pick(roles), coin()});
    return BasicConcept::atomic(pick(concepts));
  }

  struct TBoxOptions {
    int max_pos = 3;
    int max_neg = 3;
    bool exists_rhs = true;  // positive inclusions with an existential right-hand side
    bool role_inclusions = true;
    bool funct = true;
  };

  TBox tbox(const TBoxOptions& o) {
    for (;;) {
      TBox t;
      int nc = uniform(2, 4), nr = uniform(1, 2);
      for (int i = 0; i < nc; ++i) t.declare_concept(concepts[static_cast<std::size_t>(i)]);
      for (int i = 0; i < nr; ++i) t.declare_role(roles[static_cast<std::size_t>(i)]);
      auto c = [&](bool ex) {
        BasicConcept b = basic(ex);
        if (!b.exists) b.name = concepts[static_cast<std::size_t>(uniform(0, nc - 1))];
        else b.name = roles[static_cast<std::size_t>(uniform(0, nr - 1))];
        return b;
      };
      auto r = [&] { return BasicRole{roles[static_cast<std::size_t>(uniform(0, nr - 1))], coin()}; };
      int npos = uniform(0, o.max_pos), nneg = uniform(0, o.max_neg);
      for (int i = 0; i < npos; ++i) {
        if (o.role_inclusions && coin(0.2)) {
          t.add(RoleInclusion{r(), r(), false});
        } else {
          t.add(ConceptInclusion{c(true), c(o.exists_rhs), false});
        }
      }
      for (int i = 0; i < nneg; ++i) {
        if (o.role_inclusions && coin(0.2)) {
          t.add(RoleInclusion{r(), r(), true});
        } else {
          t.add(ConceptInclusion{c(true), c(true), true});
        }
      }
      if (o.funct && coin(0.4)) t.add_funct(r());
      try {
        t.validate();
        saturate_negatives(t);
        return t;
      } catch (const Error&) {
      }
    }
  }

  Fact fact(const TBox& t) {
    std::vector<std::string> cs(t.concepts().begin(), t.concepts().end());
    std::vector<std::string> rs(t.roles().begin(), t.roles().end());
    if (rs.empty() || (!cs.empty() && coin(0.55))) return concept_fact(pick(cs), pick(consts));
    return role_fact(pick(rs), pick(consts), pick(consts));
  }

  ABox abox(const TBox& t, int max_facts = 6, int min_facts = 0) {
    ABox a;
    int n = uniform(min_facts, max_facts);
    for (int i = 0; i < n; ++i) a.insert(fact(t));
    return a;
  }

  ABox consistent_abox(const TBox& t, int max_facts = 6, int min_facts = 0) {
    for (;;) {
      ABox a = abox(t, max_facts, min_facts);
      if (is_consistent(t, a)) return a;
    }
  }

  // Random indexed transition system over concepts N0..N2 and constants a, b.
  TransitionSystem random_ts(std::size_t n, double edge_p = 0.3) {
    TransitionSystem ts;
    for (auto c : {"N0", "N1", "N2"}) ts.tbox.declare_concept(c);
    ts.tbox.declare_role("P0");
    for (std::size_t i = 0; i < n; ++i) {
      TsState s;
      for (auto c : {"N0", "N1", "N2"})
        for (auto d : {"a", "b"})
          if (coin(0.35)) s.abox.insert(concept_fact(c, d));
      if (coin(0.3)) s.abox.insert(role_fact("P0", "a", "b"));
      ts.states.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (coin(edge_p)) ts.edges.push_back({i, j, "e", {}, {}});
    ts.index();
    return ts;
  }
};

// Random fixpoint body over N0..N2 at a, b in which Z occurs only positively.
inline MuPtr random_body(Gen& g, int depth) {
  static const std::vector<std::string> cs{"N0", "N1", "N2"};
  auto lit = [&] {
    return mu::query(ecq::query(make_ucq({CQ{{make_atom(g.pick(cs), {Term::constant(g.coin() ? "a" : "b")})}}})));
  };
  if (depth == 0 || g.coin(0.25)) {
    switch (g.uniform(0, 2)) {
      case 0: return mu::var("Z");
      case 1: return lit();
      default: return mu::neg(lit());
    }
  }
  switch (g.uniform(0, 3)) {
    case 0: return mu::conj(random_body(g, depth - 1), random_body(g, depth - 1));
    case 1: return mu::disj(random_body(g, depth - 1), random_body(g, depth - 1));
    case 2: return mu::diamond(random_body(g, depth - 1));
    default: return mu::box(random_body(g, depth - 1));
  }
}

// Random dynamic systems: at most three actions over constants a, b and the
// service value domain {v1, v2}.
struct SystemGen : Gen {
  explicit SystemGen(unsigned seed) : Gen(seed) { consts = {"a", "b"}; }

  ConstantTable constant_table() const {
    ConstantTable c;
    c.add("a", true);
    c.add("b", true);
    c.add("v1", false);
    c.add("v2", false);
    return c;
  }

  ServiceConfig services() const {
    ServiceConfig s;
    s.mode = ServiceConfig::Mode::Enumerate;
    s.values = {"v1", "v2"};
    return s;
  }

  Atom atom_over(const TBox& t, const std::vector<Term>& terms) {
    std::vector<std::string> cs(t.concepts().begin(), t.concepts().end());
    std::vector<std::string> rs(t.roles().begin(), t.roles().end());
    if (rs.empty() || coin(0.6)) return make_atom(pick(cs), {pick(terms)});
    return make_atom(pick(rs), {pick(terms), pick(terms)});
  }

  Action action(const TBox& t, const std::string& name, bool with_param, bool services) {
    Action a;
    a.name = name;
    std::vector<Term> terms{Term::constant("a"), Term::constant("b")};
    if (with_param) {
      a.params = {"x"};
      terms = {Term::var("x"), Term::var("x"), Term::constant("a")};
    }
    int ne = uniform(1, 2);
    for (int i = 0; i < ne; ++i) {
      Effect e;
      if (coin(0.5)) {
        e.guard = ecq::top();
      } else if (with_param && coin(0.5)) {
        e.guard = ecq::query(make_ucq({CQ{{atom_over(t, {Term::var("x")})}}}));
      } else {
        Atom g = atom_over(t, {Term::constant("a"), Term::constant("b")});
        e.guard = coin(0.5) ? ecq::query(make_ucq({CQ{{g}}})) : ecq::neg(ecq::query(make_ucq({CQ{{g}}})));
      }
      std::vector<Term> add_terms = terms;
      if (services && coin(0.3)) add_terms.push_back(Term::call("f", {terms.front()}));
      int na = uniform(0, 2);
      for (int k = 0; k < na; ++k) e.add.push_back(atom_over(t, add_terms));
      if (coin(0.5)) e.del.push_back(atom_over(t, terms));
      if (e.add.empty() && e.del.empty()) e.add.push_back(atom_over(t, terms));
      a.effects.push_back(std::move(e));
    }
    return a;
  }

  EcqPtr guard_for(const TBox& t, const Action& a) {
    if (a.params.empty()) {
      if (coin(0.6)) return ecq::top();
      Atom g = atom_over(t, {Term::constant("a"), Term::constant("b")});
      return coin(0.5) ? ecq::query(make_ucq({CQ{{g}}})) : ecq::neg(ecq::query(make_ucq({CQ{{g}}})));
    }
    // Union of one or two patterns N(x), P(x,_y), P(_y,x), so that guards fire often.
    std::vector<std::string> cs(t.concepts().begin(), t.concepts().end());
    std::vector<std::string> rs(t.roles().begin(), t.roles().end());
    std::vector<CQ> cqs;
    int n = uniform(1, 2);
    for (int i = 0; i < n; ++i) {
      Term x = Term::var("x"), y = Term::var("_y");
      if (rs.empty() || coin(0.5))
        cqs.push_back(CQ{{make_atom(pick(cs), {x})}});
      else
        cqs.push_back(CQ{{coin() ? make_atom(pick(rs), {x, y}) : make_atom(pick(rs), {y, x})}});
    }
    return ecq::query(make_ucq(cqs));
  }

  std::vector<Action> actions(const TBox& t, bool services = true) {
    std::vector<Action> out;
    int n = uniform(1, 3);
    for (int i = 0; i < n; ++i) out.push_back(action(t, "act" + std::to_string(i), coin(0.5), services));
    return out;
  }

  EcqPtr boolean_cond(const TBox& t) {
    Atom g = atom_over(t, {Term::constant("a"), Term::constant("b")});
    EcqPtr q = ecq::query(make_ucq({CQ{{g}}}));
    return coin(0.5) ? q : ecq::neg(q);
  }

  ProgramPtr program(const TBox& t, const std::vector<Action>& acts, int depth) {
    auto inv = [&] {
      const Action& a = pick(acts);
      return prog::invoke(guard_for(t, a), a.name, a.params);
    };
    if (depth == 0) return coin(0.05) ? prog::empty() : inv();
    switch (uniform(0, 5)) {
      case 0: return prog::choice(program(t, acts, depth - 1), program(t, acts, depth - 1));
      case 1: return prog::seq(program(t, acts, depth - 1), program(t, acts, depth - 1));
      case 2: return prog::ite(boolean_cond(t), program(t, acts, depth - 1), program(t, acts, depth - 1));
      case 3: return prog::loop(coin(0.5) ? ecq::top() : boolean_cond(t), program(t, acts, depth - 1));
      default: return inv();
    }
  }

  Gkab gkab(const TBox& t) {
    Gkab g;
    g.constants = constant_table();
    g.tbox = t;
    g.a0 = consistent_abox(t, 6, 3);
    g.actions = actions(t);
    ProgramPtr body = program(t, g.actions, 2);
    if (coin(0.6)) body = prog::loop(coin(0.7) ? ecq::top() : boolean_cond(t), prog::choice(body, program(t, g.actions, 1)));
    g.program = assign_ids(body);
    return g;
  }

  Kab kab(const TBox& t) {
    Kab k;
    k.constants = constant_table();
    k.tbox = t;
    k.a0 = consistent_abox(t, 6, 3);
    k.actions = actions(t);
    for (const auto& a : k.actions) k.process.push_back({guard_for(t, a), a.name, a.params});
    return k;
  }

  // Closed NNF formulas: fact literals under up to three modalities,
  // quantified literals, cross-state quantification, a mu and a nu template.
  std::vector<MuPtr> formulas(const TBox& t, int n = 22) {
    std::vector<std::string> cs(t.concepts().begin(), t.concepts().end());
    std::vector<std::string> rs(t.roles().begin(), t.roles().end());
    auto literal = [&](const std::vector<Term>& terms) -> MuPtr {
      Atom a = (rs.empty() || coin(0.7)) ? make_atom(pick(cs), {pick(terms)})
                                         : make_atom(pick(rs), {pick(terms), pick(terms)});
      MuPtr q = mu::query(ecq::query(make_ucq({CQ{{a}}})));
      return coin(0.3) ? mu::neg(q) : q;
    };
    std::vector<Term> ground{Term::constant("a"), Term::constant("b")};
    auto modal = [&](MuPtr f, int depth) {
      for (int i = 0; i < depth; ++i) f = coin() ? mu::diamond(f) : mu::box(f);
      return f;
    };
    std::vector<MuPtr> out;
    std::string c0 = cs.front();
    Atom qa = make_atom(c0, {Term::constant("a")});
    MuPtr q = mu::query(ecq::query(make_ucq({CQ{{qa}}})));
    out.push_back(mu::lfp("Z", mu::disj(literal(ground), mu::diamond(mu::var("Z")))));
    out.push_back(mu::gfp("Z", mu::conj(literal(ground), mu::box(mu::var("Z")))));
    out.push_back(mu::gfp("Y", mu::conj(q, mu::box(mu::lfp("Z", mu::disj(literal(ground), mu::diamond(mu::var("Z"))))))));
    while (static_cast<int>(out.size()) < n) {
      switch (uniform(0, 5)) {
        case 0:
        case 1: out.push_back(modal(literal(ground), uniform(0, 3))); break;
        case 2:
          out.push_back(modal(mu::conj(literal(ground), modal(literal(ground), uniform(1, 2))), uniform(0, 1)));
          break;
        case 3:
          out.push_back(modal(mu::exists("x", mu::conj(mu::query(ecq::query(make_ucq({CQ{{make_atom(
                                                                                  pick(cs), {Term::var("x")})}}}))),
                                                      literal({Term::var("x")}))),
                              uniform(0, 2)));
          break;
        case 4: {
          // The bound individual persists into later states.
          MuPtr here = mu::query(ecq::query(make_ucq({CQ{{make_atom(pick(cs), {Term::var("x")})}}})));
          out.push_back(mu::exists("x", mu::conj(here, modal(literal({Term::var("x")}), uniform(1, 2)))));
          break;
        }
        default:
          out.push_back(mu::disj(modal(literal(ground), uniform(1, 3)), modal(literal(ground), uniform(1, 2))));
          break;
      }
    }
    return out;
  }
};

}  // namespace kab::oracle
