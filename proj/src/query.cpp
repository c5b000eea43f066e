#include "kab/query.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <unordered_map>

#include "kab/errors.hpp"

namespace kab {

std::string Term::str() const {
  if (kind != Kind::Call) return name;
  std::string out = name + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += args[i].str();
  }
  return out + ")";
}

bool Term::operator==(const Term& o) const { return kind == o.kind && name == o.name && args == o.args; }

bool Term::operator<(const Term& o) const {
  if (kind != o.kind) return kind < o.kind;
  if (name != o.name) return name < o.name;
  return std::lexicographical_compare(args.begin(), args.end(), o.args.begin(), o.args.end());
}

std::string Atom::str() const {
  if (is_eq()) return args[0].str() + " = " + args[1].str();
  std::string out = pred + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += args[i].str();
  }
  return out + ")";
}

Atom make_atom(std::string pred, std::vector<Term> args) { return {std::move(pred), std::move(args)}; }
Atom eq_atom(Term a, Term b) { return {"=", {std::move(a), std::move(b)}}; }

bool is_existential_var(const std::string& v) { return !v.empty() && v[0] == '_'; }

namespace {

void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.is_var()) out.insert(t.name);
  for (const auto& a : t.args) collect_vars(a, out);
}

std::set<std::string> vars_of(const CQ& q) {
  std::set<std::string> out;
  for (const auto& a : q.atoms)
    for (const auto& t : a.args) collect_vars(t, out);
  return out;
}

std::string cq_str(const CQ& q) {
  if (q.atoms.empty()) return "true";
  std::string out;
  for (std::size_t i = 0; i < q.atoms.size(); ++i) {
    if (i) out += " & ";
    out += q.atoms[i].str();
  }
  return out;
}

}  // namespace

UCQ make_ucq(std::vector<CQ> cqs, bool plain) {
  UCQ u;
  std::set<std::string> fv;
  for (const auto& c : cqs)
    for (const auto& v : vars_of(c))
      if (!is_existential_var(v)) fv.insert(v);
  u.free.assign(fv.begin(), fv.end());
  u.cqs = std::move(cqs);
  u.plain = plain;
  return u;
}

std::string UCQ::str() const {
  std::string out = plain ? "$[" : "[";
  if (cqs.empty()) out += "false";
  for (std::size_t i = 0; i < cqs.size(); ++i) {
    if (i) out += " | ";
    out += cq_str(cqs[i]);
  }
  return out + "]";
}

std::string to_string(const Substitution& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : s) {
    if (!first) out += ", ";
    first = false;
    out += k + "->" + v;
  }
  return out + "}";
}

Term substitute(const Term& t, const Substitution& s) {
  if (t.is_var()) {
    auto it = s.find(t.name);
    return it == s.end() ? t : Term::constant(it->second);
  }
  if (t.is_call()) {
    Term out = t;
    for (auto& a : out.args) a = substitute(a, s);
    return out;
  }
  return t;
}

Atom substitute(const Atom& a, const Substitution& s) {
  Atom out = a;
  for (auto& t : out.args) t = substitute(t, s);
  return out;
}

// ---------------------------------------------------------------------------
// ECQ construction and inspection

namespace ecq {

namespace {
EcqPtr node(Ecq::Kind k, EcqPtr a = nullptr, EcqPtr b = nullptr, std::string v = {}) {
  auto n = std::make_shared<Ecq>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  n->var = std::move(v);
  return n;
}
}  // namespace

EcqPtr query(UCQ q) {
  auto n = std::make_shared<Ecq>();
  n->kind = Ecq::Kind::Query;
  n->q = std::move(q);
  return n;
}

EcqPtr atom(Atom a, bool plain) { return query(make_ucq({CQ{{std::move(a)}}}, plain)); }
EcqPtr neg(EcqPtr a) { return node(Ecq::Kind::Not, std::move(a)); }
EcqPtr conj(EcqPtr a, EcqPtr b) { return node(Ecq::Kind::And, std::move(a), std::move(b)); }
EcqPtr disj(EcqPtr a, EcqPtr b) { return node(Ecq::Kind::Or, std::move(a), std::move(b)); }
EcqPtr exists(std::string v, EcqPtr a) { return node(Ecq::Kind::Exists, std::move(a), nullptr, std::move(v)); }
EcqPtr forall(std::string v, EcqPtr a) { return node(Ecq::Kind::Forall, std::move(a), nullptr, std::move(v)); }
EcqPtr top() { return node(Ecq::Kind::True); }
EcqPtr bottom() { return node(Ecq::Kind::False); }

EcqPtr conj_all(const std::vector<EcqPtr>& xs) {
  if (xs.empty()) return top();
  EcqPtr out = xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) out = conj(out, xs[i]);
  return out;
}

EcqPtr disj_all(const std::vector<EcqPtr>& xs) {
  if (xs.empty()) return bottom();
  EcqPtr out = xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) out = disj(out, xs[i]);
  return out;
}

}  // namespace ecq

std::set<std::string> free_vars(const Ecq& q) {
  using K = Ecq::Kind;
  switch (q.kind) {
    case K::Query:
      return {q.q.free.begin(), q.q.free.end()};
    case K::Not:
      return free_vars(*q.a);
    case K::And:
    case K::Or: {
      auto s = free_vars(*q.a);
      auto t = free_vars(*q.b);
      s.insert(t.begin(), t.end());
      return s;
    }
    case K::Exists:
    case K::Forall: {
      auto s = free_vars(*q.a);
      s.erase(q.var);
      return s;
    }
    default:
      return {};
  }
}

std::string to_string(const Ecq& q) {
  using K = Ecq::Kind;
  switch (q.kind) {
    case K::Query:
      return q.q.str();
    case K::Not:
      return "!" + to_string(*q.a);
    case K::And:
      return "(" + to_string(*q.a) + " & " + to_string(*q.b) + ")";
    case K::Or:
      return "(" + to_string(*q.a) + " | " + to_string(*q.b) + ")";
    case K::Exists:
      return "(exists " + q.var + ". " + to_string(*q.a) + ")";
    case K::Forall:
      return "(forall " + q.var + ". " + to_string(*q.a) + ")";
    case K::True:
      return "true";
    case K::False:
      return "false";
  }
  return "";
}

bool equal(const Ecq& a, const Ecq& b) {
  if (a.kind != b.kind || a.var != b.var) return false;
  if (a.kind == Ecq::Kind::Query) return a.q == b.q;
  if (a.a && !equal(*a.a, *b.a)) return false;
  if (a.b && !equal(*a.b, *b.b)) return false;
  return true;
}

namespace {
void walk(const Ecq& q, const std::function<void(const Atom&)>& f) {
  if (q.kind == Ecq::Kind::Query) {
    for (const auto& c : q.q.cqs)
      for (const auto& a : c.atoms) f(a);
  }
  if (q.a) walk(*q.a, f);
  if (q.b) walk(*q.b, f);
}
}  // namespace

bool mentions_markers(const Ecq& q) {
  bool found = false;
  walk(q, [&](const Atom& a) { found = found || is_marker_pred(a.pred); });
  return found;
}

std::set<std::string> predicates(const Ecq& q) {
  std::set<std::string> out;
  walk(q, [&](const Atom& a) {
    if (!a.is_eq()) out.insert(a.pred);
  });
  return out;
}

std::set<std::string> constants_of(const Ecq& q) {
  std::set<std::string> out;
  walk(q, [&](const Atom& a) {
    for (const auto& t : a.args)
      if (t.is_const()) out.insert(t.name);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Domain independence

namespace {

using VarSet = std::set<std::string>;

VarSet ucq_range(const UCQ& u) {
  VarSet out(u.free.begin(), u.free.end());
  for (const auto& c : u.cqs) {
    VarSet r;
    for (const auto& a : c.atoms)
      if (!a.is_eq())
        for (const auto& t : a.args)
          if (t.is_var()) r.insert(t.name);
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& a : c.atoms) {
        if (!a.is_eq()) continue;
        const Term& l = a.args[0];
        const Term& rt = a.args[1];
        auto known = [&](const Term& t) { return t.is_const() || r.count(t.name); };
        if (l.is_var() && !r.count(l.name) && known(rt)) grew = r.insert(l.name).second || grew;
        if (rt.is_var() && !r.count(rt.name) && known(l)) grew = r.insert(rt.name).second || grew;
      }
    }
    VarSet keep;
    std::set_intersection(out.begin(), out.end(), r.begin(), r.end(), std::inserter(keep, keep.end()));
    out = keep;
  }
  return out;
}

VarSet unite(VarSet a, const VarSet& b) {
  a.insert(b.begin(), b.end());
  return a;
}

VarSet cap(const VarSet& a, const VarSet& b) {
  VarSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

VarSet rr(const Ecq& q, bool pos) {
  using K = Ecq::Kind;
  switch (q.kind) {
    case K::Query:
      return pos ? ucq_range(q.q) : VarSet{};
    case K::Not:
      return rr(*q.a, !pos);
    case K::And:
      return pos ? unite(rr(*q.a, true), rr(*q.b, true)) : cap(rr(*q.a, false), rr(*q.b, false));
    case K::Or:
      return pos ? cap(rr(*q.a, true), rr(*q.b, true)) : unite(rr(*q.a, false), rr(*q.b, false));
    case K::Exists:
      if (!pos) return {};
      {
        auto s = rr(*q.a, true);
        s.erase(q.var);
        return s;
      }
    case K::Forall:
      if (pos) return {};
      {
        auto s = rr(*q.a, false);
        s.erase(q.var);
        return s;
      }
    default:
      return {};
  }
}

void require(const VarSet& need, const VarSet& have, const Ecq& at) {
  for (const auto& v : need)
    if (!have.count(v))
      throw NonDomainIndependent("variable " + v + " is not range-restricted in " + to_string(at));
}

void check(const Ecq& q, bool pos, const VarSet& bound) {
  using K = Ecq::Kind;
  switch (q.kind) {
    case K::Query: {
      std::set<std::string> fv(q.q.free.begin(), q.q.free.end());
      for (const auto& c : q.q.cqs) {
        std::set<std::string> cv;
        for (const auto& v : vars_of(c))
          if (!is_existential_var(v) || fv.count(v)) cv.insert(v);
        for (const auto& v : fv)
          if (!cv.count(v) && !bound.count(v))
            throw NonDomainIndependent("free variable " + v + " missing from a disjunct of " + q.q.str());
      }
      require(fv, pos ? unite(bound, ucq_range(q.q)) : bound, q);
      return;
    }
    case K::Not:
      if (pos) require(free_vars(*q.a), bound, q);
      check(*q.a, !pos, bound);
      return;
    case K::And:
      if (pos) {
        check(*q.a, true, unite(bound, rr(*q.b, true)));
        check(*q.b, true, unite(bound, rr(*q.a, true)));
      } else {
        check(*q.a, false, bound);
        check(*q.b, false, bound);
      }
      return;
    case K::Or:
      if (pos) {
        check(*q.a, true, bound);
        check(*q.b, true, bound);
      } else {
        check(*q.a, false, unite(bound, rr(*q.b, false)));
        check(*q.b, false, unite(bound, rr(*q.a, false)));
      }
      return;
    case K::Exists:
    case K::Forall: {
      bool positive_exists = (q.kind == K::Exists) == pos;
      bool body_pol = positive_exists ? pos : q.kind == K::Exists;
      VarSet inner = bound;
      inner.erase(q.var);
      if (!rr(*q.a, body_pol).count(q.var))
        throw NonDomainIndependent("quantified variable " + q.var + " is not range-restricted in " + to_string(q));
      if (!positive_exists) require(free_vars(q), bound, q);
      check(*q.a, body_pol, inner);
      return;
    }
    default:
      return;
  }
}

}  // namespace

void validate_domain_independent(const Ecq& q, const std::set<std::string>& bound) {
  check(q, true, bound);
  require(free_vars(q), unite(bound, rr(q, true)), q);
}

// ---------------------------------------------------------------------------
// Rewriting

namespace {

struct Rewriter {
  const TBoxIndex& ix;
  std::set<std::string> free;
  int fresh = 0;

  Term fresh_var() { return Term::var("_f" + std::to_string(fresh++)); }

  bool unbound(const CQ& q, const Term& t) const {
    if (!t.is_var() || free.count(t.name)) return false;
    int n = 0;
    for (const auto& a : q.atoms)
      for (const auto& x : a.args)
        if (x.is_var() && x.name == t.name) ++n;
    return n == 1;
  }

  Atom concept_atom(const BasicConcept& b, const Term& t) {
    if (!b.exists) return make_atom(b.name, {t});
    if (b.inverse) return make_atom(b.name, {fresh_var(), t});
    return make_atom(b.name, {t, fresh_var()});
  }

  static Atom role_atom(const BasicRole& r, const Term& t1, const Term& t2) {
    return r.inverse ? make_atom(r.name, {t2, t1}) : make_atom(r.name, {t1, t2});
  }

  CQ canon(CQ q) const {
    std::sort(q.atoms.begin(), q.atoms.end());
    q.atoms.erase(std::unique(q.atoms.begin(), q.atoms.end()), q.atoms.end());
    for (int round = 0; round < 2; ++round) {
      auto shape = [&](const Atom& a) {
        Atom s = a;
        for (auto& t : s.args)
          if (t.is_var() && !free.count(t.name)) t.name = "?";
        return s;
      };
      std::stable_sort(q.atoms.begin(), q.atoms.end(),
                       [&](const Atom& x, const Atom& y) { return shape(x) < shape(y); });
      Substitution ren;
      int k = 0;
      for (const auto& a : q.atoms)
        for (const auto& t : a.args)
          if (t.is_var() && !free.count(t.name) && !ren.count(t.name))
            ren[t.name] = "_e" + std::to_string(k++);
      for (auto& a : q.atoms)
        for (auto& t : a.args)
          if (t.is_var() && ren.count(t.name)) t.name = ren[t.name];
    }
    std::sort(q.atoms.begin(), q.atoms.end());
    q.atoms.erase(std::unique(q.atoms.begin(), q.atoms.end()), q.atoms.end());
    return q;
  }

  std::vector<CQ> atom_steps(const CQ& q) {
    std::vector<CQ> out;
    for (std::size_t i = 0; i < q.atoms.size(); ++i) {
      const Atom& g = q.atoms[i];
      if (g.is_eq()) continue;
      auto replace = [&](Atom r) {
        CQ n = q;
        n.atoms[i] = std::move(r);
        out.push_back(std::move(n));
      };
      if (g.args.size() == 1) {
        auto it = ix.concept_parents_of.find(BasicConcept::atomic(g.pred));
        if (it != ix.concept_parents_of.end())
          for (const auto& b : it->second) replace(concept_atom(b, g.args[0]));
        continue;
      }
      const Term& t1 = g.args[0];
      const Term& t2 = g.args[1];
      if (unbound(q, t2)) {
        auto it = ix.concept_parents_of.find(BasicConcept::some({g.pred, false}));
        if (it != ix.concept_parents_of.end())
          for (const auto& b : it->second) replace(concept_atom(b, t1));
      }
      if (unbound(q, t1)) {
        auto it = ix.concept_parents_of.find(BasicConcept::some({g.pred, true}));
        if (it != ix.concept_parents_of.end())
          for (const auto& b : it->second) replace(concept_atom(b, t2));
      }
      auto it = ix.role_parents_of.find(BasicRole{g.pred, false});
      if (it != ix.role_parents_of.end())
        for (const auto& r : it->second) replace(role_atom(r, t1, t2));
    }
    return out;
  }

  // Most general unifier of two atoms, applied to q. Free variables that get
  // identified with another term keep an equality atom so the head is preserved.
  std::optional<CQ> reduce(const CQ& q, const Atom& a, const Atom& b) const {
    if (a.pred != b.pred || a.args.size() != b.args.size() || a.is_eq()) return std::nullopt;
    std::map<std::string, std::string> parent;  // union-find over "v:" / "c:" keys
    std::function<std::string(const std::string&)> find = [&](const std::string& k) {
      auto it = parent.find(k);
      if (it == parent.end() || it->second == k) return k;
      return it->second = find(it->second);
    };
    auto key = [](const Term& t) { return (t.is_var() ? "v:" : "c:") + t.name; };
    for (std::size_t i = 0; i < a.args.size(); ++i) {
      std::string x = find(key(a.args[i]));
      std::string y = find(key(b.args[i]));
      if (x == y) continue;
      if (x[0] == 'c' && y[0] == 'c') return std::nullopt;
      parent[x] = y;
      parent.emplace(y, y);
    }
    std::map<std::string, std::vector<std::string>> classes;
    for (const auto& [k, _] : parent) classes[find(k)].push_back(k);
    Substitution sub;
    std::vector<Atom> eqs;
    for (const auto& [root, members] : classes) {
      std::string rep;
      for (const auto& m : members)
        if (m[0] == 'c') rep = m;
      if (rep.empty())
        for (const auto& m : members)
          if (free.count(m.substr(2)) && (rep.empty() || m < rep)) rep = m;
      if (rep.empty()) rep = *std::min_element(members.begin(), members.end());
      for (const auto& m : members) {
        if (m == rep || m[0] == 'c') continue;
        std::string v = m.substr(2);
        sub[v] = rep;
        if (free.count(v)) {
          Term r = rep[0] == 'c' ? Term::constant(rep.substr(2)) : Term::var(rep.substr(2));
          eqs.push_back(eq_atom(Term::var(v), r));
        }
      }
    }
    CQ out;
    for (const auto& at : q.atoms) {
      Atom n = at;
      for (auto& t : n.args) {
        if (!t.is_var()) continue;
        auto it = sub.find(t.name);
        if (it == sub.end()) continue;
        t = it->second[0] == 'c' ? Term::constant(it->second.substr(2)) : Term::var(it->second.substr(2));
      }
      out.atoms.push_back(std::move(n));
    }
    for (auto& e : eqs) out.atoms.push_back(std::move(e));
    return out;
  }
};

std::mutex g_cache_mu;
std::unordered_map<std::string, UCQ> g_cache;

}  // namespace

UCQ rewrite_ucq(const UCQ& q, const TBox& t, std::size_t cap_n) {
  const TBoxIndex& ix = t.index();
  if (ix.concept_parents_of.empty() && ix.role_parents_of.empty()) return q;
  std::string key = ix.key + "|" + std::to_string(cap_n) + "|" + q.str();
  {
    std::lock_guard<std::mutex> lock(g_cache_mu);
    auto it = g_cache.find(key);
    if (it != g_cache.end()) return it->second;
  }
  Rewriter rw{ix, {q.free.begin(), q.free.end()}};
  std::set<CQ> done;
  std::deque<CQ> work;
  auto push = [&](CQ c) {
    c = rw.canon(std::move(c));
    if (done.insert(c).second) {
      if (done.size() > cap_n) throw RewriteBlowup("rewriting of " + q.str() + " exceeds " + std::to_string(cap_n));
      work.push_back(std::move(c));
    }
  };
  for (const auto& c : q.cqs) push(c);
  while (!work.empty()) {
    CQ cur = work.front();
    work.pop_front();
    for (auto& n : rw.atom_steps(cur)) push(std::move(n));
    for (std::size_t i = 0; i < cur.atoms.size(); ++i)
      for (std::size_t j = i + 1; j < cur.atoms.size(); ++j)
        if (auto r = rw.reduce(cur, cur.atoms[i], cur.atoms[j])) push(std::move(*r));
  }
  UCQ out = q;
  out.cqs.assign(done.begin(), done.end());
  std::lock_guard<std::mutex> lock(g_cache_mu);
  g_cache.emplace(key, out);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

using Row = std::vector<std::string>;

struct Rel {
  std::vector<std::string> vars;  // sorted
  std::set<Row> rows;
};

class Evaluator {
 public:
  Evaluator(const TBox& t, const ABox& a, bool markers) : t_(t), a_(a) {
    auto d = adom(a, markers);
    dom_.assign(d.begin(), d.end());
    domset_ = std::move(d);
  }

  Rel eval(const Ecq& q, const Substitution& b) {
    using K = Ecq::Kind;
    switch (q.kind) {
      case K::Query:
        return eval_ucq(q, b);
      case K::True:
        return {{}, {Row{}}};
      case K::False:
        return {{}, {}};
      case K::Not: {
        Rel r = eval(*q.a, b);
        Rel out{r.vars, {}};
        for_tuples(r.vars.size(), [&](const Row& row) {
          if (!r.rows.count(row)) out.rows.insert(row);
        });
        return out;
      }
      case K::And:
        return eval_and(q, b);
      case K::Or: {
        Rel x = eval(*q.a, b);
        Rel y = eval(*q.b, b);
        Rel out{merge_vars(x.vars, y.vars), {}};
        widen(x, out);
        widen(y, out);
        return out;
      }
      case K::Exists: {
        Substitution inner = b;
        inner.erase(q.var);
        Rel r = eval(*q.a, inner);
        auto it = std::find(r.vars.begin(), r.vars.end(), q.var);
        if (it == r.vars.end()) {
          if (dom_.empty()) r.rows.clear();
          return r;
        }
        std::size_t pos = it - r.vars.begin();
        Rel out;
        for (std::size_t i = 0; i < r.vars.size(); ++i)
          if (i != pos) out.vars.push_back(r.vars[i]);
        for (const auto& row : r.rows) {
          Row n;
          for (std::size_t i = 0; i < row.size(); ++i)
            if (i != pos) n.push_back(row[i]);
          out.rows.insert(std::move(n));
        }
        return out;
      }
      case K::Forall: {
        Substitution inner = b;
        inner.erase(q.var);
        Rel r = eval(*q.a, inner);
        auto it = std::find(r.vars.begin(), r.vars.end(), q.var);
        if (it == r.vars.end()) {
          if (dom_.empty()) {
            Rel all{r.vars, {}};
            for_tuples(r.vars.size(), [&](const Row& row) { all.rows.insert(row); });
            return all;
          }
          return r;
        }
        std::size_t pos = it - r.vars.begin();
        Rel out;
        for (std::size_t i = 0; i < r.vars.size(); ++i)
          if (i != pos) out.vars.push_back(r.vars[i]);
        for_tuples(out.vars.size(), [&](const Row& rest) {
          for (const auto& d : dom_) {
            Row full = rest;
            full.insert(full.begin() + pos, d);
            if (!r.rows.count(full)) return;
          }
          out.rows.insert(rest);
        });
        return out;
      }
    }
    return {};
  }

 private:
  template <typename F>
  void for_tuples(std::size_t k, F&& f) {
    Row row(k);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == k) {
        f(row);
        return;
      }
      for (const auto& d : dom_) {
        row[i] = d;
        rec(i + 1);
      }
    };
    rec(0);
  }

  static std::vector<std::string> merge_vars(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::string> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
  }

  void widen(const Rel& r, Rel& out) {
    std::vector<int> pos(out.vars.size(), -1);
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < out.vars.size(); ++i) {
      auto it = std::find(r.vars.begin(), r.vars.end(), out.vars[i]);
      if (it == r.vars.end())
        missing.push_back(i);
      else
        pos[i] = static_cast<int>(it - r.vars.begin());
    }
    for (const auto& row : r.rows) {
      Row base(out.vars.size());
      for (std::size_t i = 0; i < out.vars.size(); ++i)
        if (pos[i] >= 0) base[i] = row[pos[i]];
      for_tuples(missing.size(), [&](const Row& ext) {
        Row n = base;
        for (std::size_t j = 0; j < missing.size(); ++j) n[missing[j]] = ext[j];
        out.rows.insert(std::move(n));
      });
    }
  }

  static bool negative(const Ecq& q) { return q.kind == Ecq::Kind::Not || q.kind == Ecq::Kind::Forall; }

  Rel eval_and(const Ecq& q, const Substitution& b) {
    const Ecq* first = q.a.get();
    const Ecq* second = q.b.get();
    if (negative(*first) && !negative(*second)) std::swap(first, second);
    Rel x = eval(*first, b);
    std::vector<std::string> fv;
    {
      auto all = free_vars(q);
      for (const auto& v : all)
        if (!b.count(v)) fv.push_back(v);
    }
    Rel out{fv, {}};
    for (const auto& row : x.rows) {
      Substitution b2 = b;
      for (std::size_t i = 0; i < x.vars.size(); ++i) b2[x.vars[i]] = row[i];
      Rel y = eval(*second, b2);
      for (const auto& r2 : y.rows) {
        Substitution full = b2;
        for (std::size_t i = 0; i < y.vars.size(); ++i) full[y.vars[i]] = r2[i];
        Row n;
        for (const auto& v : fv) n.push_back(full.at(v));
        out.rows.insert(std::move(n));
      }
    }
    return out;
  }

  const UCQ& effective(const Ecq& q) {
    if (q.q.plain) return q.q;
    auto it = rewritten_.find(&q);
    if (it != rewritten_.end()) return it->second;
    return rewritten_.emplace(&q, rewrite_ucq(q.q, t_)).first->second;
  }

  Rel eval_ucq(const Ecq& node, const Substitution& b) {
    const UCQ& u = effective(node);
    Rel out;
    for (const auto& v : u.free)
      if (!b.count(v)) out.vars.push_back(v);
    for (const auto& c : u.cqs) {
      CQ inst;
      for (const auto& a : c.atoms) inst.atoms.push_back(substitute(a, b));
      match_cq(inst, [&](const Substitution& s) {
        Row r;
        for (const auto& v : out.vars) {
          auto it = s.find(v);
          if (it == s.end() || !domset_.count(it->second)) return;
          r.push_back(it->second);
        }
        out.rows.insert(std::move(r));
      });
    }
    return out;
  }

  static const std::string* value(const Term& t, const Substitution& s) {
    if (t.is_const()) return &t.name;
    auto it = s.find(t.name);
    return it == s.end() ? nullptr : &it->second;
  }

  void match_cq(const CQ& c, const std::function<void(const Substitution&)>& emit) {
    std::vector<const Atom*> rel;
    std::vector<const Atom*> eqs;
    for (const auto& a : c.atoms) (a.is_eq() ? eqs : rel).push_back(&a);
    Substitution s;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == rel.size()) {
        finish(c, eqs, s, emit);
        return;
      }
      const Atom& a = *rel[i];
      bool is_role = a.args.size() == 2;
      Fact probe{a.pred, "", "", false};
      auto lo = std::lower_bound(a_.begin(), a_.end(), probe,
                                 [](const Fact& f, const Fact& p) { return f.pred < p.pred; });
      for (auto it = lo; it != a_.end() && it->pred == a.pred; ++it) {
        if (it->role != is_role) continue;
        std::vector<std::string> bound_here;
        bool ok = true;
        for (std::size_t k = 0; k < a.args.size() && ok; ++k) {
          const std::string& fv = k == 0 ? it->s : it->o;
          const Term& t = a.args[k];
          if (const std::string* v = value(t, s)) {
            ok = *v == fv;
          } else {
            s[t.name] = fv;
            bound_here.push_back(t.name);
          }
        }
        if (ok) rec(i + 1);
        for (const auto& v : bound_here) s.erase(v);
      }
    };
    rec(0);
  }

  void finish(const CQ& c, const std::vector<const Atom*>& eqs, Substitution s,
              const std::function<void(const Substitution&)>& emit) {
    bool grew = true;
    while (grew) {
      grew = false;
      for (const Atom* e : eqs) {
        const std::string* l = value(e->args[0], s);
        const std::string* r = value(e->args[1], s);
        if (l && !r) {
          s[e->args[1].name] = *l;
          grew = true;
        } else if (r && !l) {
          s[e->args[0].name] = *r;
          grew = true;
        }
      }
    }
    std::vector<std::string> open;
    for (const auto& v : vars_of(c))
      if (!s.count(v)) open.push_back(v);
    for_tuples(open.size(), [&](const Row& ext) {
      Substitution full = s;
      for (std::size_t i = 0; i < open.size(); ++i) full[open[i]] = ext[i];
      for (const Atom* e : eqs)
        if (*value(e->args[0], full) != *value(e->args[1], full)) return;
      emit(full);
    });
  }

  const TBox& t_;
  const ABox& a_;
  std::vector<std::string> dom_;
  std::set<std::string> domset_;
  std::map<const Ecq*, UCQ> rewritten_;
};

}  // namespace

std::set<Substitution> certain_answers_ucq(const UCQ& q, const TBox& t, const ABox& a) {
  return eval_ecq(ecq::query(q), t, a);
}

std::set<Substitution> eval_ecq(const EcqPtr& q, const TBox& t, const ABox& a, const Substitution& partial) {
  Evaluator ev(t, a, mentions_markers(*q));
  Rel r = ev.eval(*q, partial);
  std::set<Substitution> out;
  for (const auto& row : r.rows) {
    Substitution s;
    for (std::size_t i = 0; i < r.vars.size(); ++i) s[r.vars[i]] = row[i];
    out.insert(std::move(s));
  }
  return out;
}

bool holds(const EcqPtr& q, const TBox& t, const ABox& a, const Substitution& partial) {
  return !eval_ecq(q, t, a, partial).empty();
}

}  // namespace kab
