#include "kab/action.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <unordered_map>

#include "kab/consistency.hpp"
#include "kab/errors.hpp"
#include "kab/repair.hpp"

namespace kab {

void TransitionSystem::index() {
  succ.assign(states.size(), {});
  pred.assign(states.size(), {});
  for (const auto& e : edges) {
    succ[e.src].push_back(e.dst);
    pred[e.dst].push_back(e.src);
  }
  for (auto* lists : {&succ, &pred})
    for (auto& l : *lists) {
      std::sort(l.begin(), l.end());
      l.erase(std::unique(l.begin(), l.end()), l.end());
    }
}

const char* to_string(Filter f) {
  switch (f) {
    case Filter::S: return "s";
    case Filter::B: return "b";
    case Filter::C: return "c";
    case Filter::E: return "e";
  }
  return "?";
}

const Action& Kab::action(const std::string& name) const {
  for (const auto& a : actions)
    if (a.name == name) return a;
  throw ValidationError("unknown action " + name);
}

namespace {

void term_vars(const Term& t, std::set<std::string>& out) {
  if (t.is_var()) out.insert(t.name);
  for (const auto& a : t.args) term_vars(a, out);
}

bool ground(const Term& t) {
  if (t.is_var()) return false;
  for (const auto& a : t.args)
    if (!ground(a)) return false;
  return true;
}

Fact to_fact(const Atom& a) {
  if (a.args.size() == 1) return concept_fact(a.pred, a.args[0].name);
  return role_fact(a.pred, a.args[0].name, a.args[1].name);
}

template <typename F>
void for_each_instance(const TBox& t, const ABox& a, const Action& act, const Substitution& sigma, F&& f) {
  for (const auto& e : act.effects) {
    for (const auto& rho : eval_ecq(e.guard, t, a, sigma)) {
      Substitution s = sigma;
      s.insert(rho.begin(), rho.end());
      f(e, s);
    }
  }
}

}  // namespace

void validate_action(const Action& a) {
  std::set<std::string> params(a.params.begin(), a.params.end());
  if (params.size() != a.params.size()) throw ValidationError("duplicate parameter in action " + a.name);
  for (const auto& e : a.effects) {
    validate_domain_independent(*e.guard, params);
    std::set<std::string> known = params;
    for (const auto& v : free_vars(*e.guard)) known.insert(v);
    auto check = [&](const Atom& at, bool del) {
      if (at.args.empty() || at.args.size() > 2 || at.is_eq())
        throw ValidationError("bad effect atom " + at.str() + " in action " + a.name);
      for (const auto& t : at.args) {
        if (t.is_call()) {
          if (del) throw ValidationError("service call in delete set of action " + a.name);
          for (const auto& x : t.args)
            if (x.is_call()) throw ValidationError("nested service call in action " + a.name);
        }
        std::set<std::string> vs;
        term_vars(t, vs);
        for (const auto& v : vs)
          if (!known.count(v))
            throw ValidationError("variable " + v + " in effect head of " + a.name + " is not bound");
      }
    };
    for (const auto& at : e.add) check(at, false);
    for (const auto& at : e.del) check(at, true);
  }
}

std::vector<Atom> add_facts(const TBox& t, const ABox& a, const Action& act, const Substitution& sigma) {
  std::set<Atom> out;
  for_each_instance(t, a, act, sigma, [&](const Effect& e, const Substitution& s) {
    for (const auto& at : e.add) {
      Atom g = substitute(at, s);
      for (const auto& x : g.args)
        if (!ground(x)) throw UngroundedDeletion("effect head " + at.str() + " is not ground");
      out.insert(std::move(g));
    }
  });
  return {out.begin(), out.end()};
}

ABox del_facts(const TBox& t, const ABox& a, const Action& act, const Substitution& sigma) {
  std::vector<Fact> out;
  for_each_instance(t, a, act, sigma, [&](const Effect& e, const Substitution& s) {
    for (const auto& at : e.del) {
      Atom g = substitute(at, s);
      for (const auto& x : g.args)
        if (!x.is_const()) throw UngroundedDeletion("delete atom " + at.str() + " is not ground");
      out.push_back(to_fact(g));
    }
  });
  return ABox(std::move(out));
}

std::vector<Term> ground_calls(const std::vector<Atom>& facts) {
  std::set<Term> out;
  for (const auto& f : facts)
    for (const auto& t : f.args)
      if (t.is_call()) out.insert(t);
  return {out.begin(), out.end()};
}

std::vector<ServiceCallMap> eval_thetas(const std::vector<Term>& calls, const ServiceCallMap& m,
                                        const ServiceConfig& cfg) {
  if (cfg.mode == ServiceConfig::Mode::Oracle) {
    ServiceCallMap theta;
    for (const auto& c : calls) {
      std::string k = c.str();
      auto it = cfg.table.find(k);
      if (it != cfg.table.end()) {
        theta[k] = it->second;
        continue;
      }
      auto d = cfg.defaults.find(c.name);
      if (d == cfg.defaults.end()) throw OracleIncomplete("no value for service call " + k);
      theta[k] = d->second;
    }
    for (const auto& [k, v] : theta) {
      auto it = m.find(k);
      if (it != m.end() && it->second != v) return {};
    }
    return {theta};
  }
  if (cfg.values.empty() && !calls.empty()) throw ValidationError("empty service value domain");
  std::vector<ServiceCallMap> out;
  ServiceCallMap cur;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == calls.size()) {
      out.push_back(cur);
      return;
    }
    std::string k = calls[i].str();
    auto it = m.find(k);
    if (it != m.end()) {
      cur[k] = it->second;
      rec(i + 1);
      return;
    }
    for (const auto& v : cfg.values) {
      cur[k] = v;
      rec(i + 1);
    }
    cur.erase(k);
  };
  rec(0);
  return out;
}

ABox ground_with(const std::vector<Atom>& facts, const ServiceCallMap& theta) {
  std::vector<Fact> out;
  for (const auto& f : facts) {
    Atom g = f;
    for (auto& t : g.args) {
      if (!t.is_call()) continue;
      auto it = theta.find(t.str());
      if (it == theta.end()) throw PreconditionViolated("no value for service call " + t.str());
      t = Term::constant(it->second);
    }
    out.push_back(to_fact(g));
  }
  return ABox(std::move(out));
}

ABox do_action(const ABox& a, const ABox& del, const std::vector<Atom>& add, const ServiceCallMap& theta) {
  return unite(minus(a, del), ground_with(add, theta));
}

std::vector<ABox> apply_filter(const TBox& t, const ABox& a, const ABox& fplus, const ABox& fminus, Filter kind) {
  ABox updated = unite(minus(a, fminus), fplus);
  switch (kind) {
    case Filter::S:
      return {updated};
    case Filter::B:
      return b_repairs(t, updated);
    case Filter::C:
      return {c_repair(t, updated)};
    case Filter::E:
      if (!is_consistent(t, a) || !is_consistent(t, fplus)) return {};
      return {evolve(t, a, fplus, fminus)};
  }
  return {};
}

std::vector<TellResult> tell(const TBox& t, Filter f, const ABox& a, const ServiceCallMap& m, const Action& act,
                             const Substitution& sigma, const ServiceConfig& cfg) {
  std::vector<Atom> add = add_facts(t, a, act, sigma);
  ABox del = del_facts(t, a, act, sigma);
  std::vector<TellResult> out;
  for (const auto& theta : eval_thetas(ground_calls(add), m, cfg)) {
    ABox fplus = ground_with(add, theta);
    ServiceCallMap m2 = m;
    m2.insert(theta.begin(), theta.end());
    for (auto& next : apply_filter(t, a, fplus, del, f))
      if (is_consistent(t, next)) out.push_back({std::move(next), m2, theta});
  }
  return out;
}

std::vector<Substitution> legal_params(const TBox& t, const ABox& a, const EcqPtr& guard,
                                       const std::vector<std::string>& args, const Action& act) {
  if (args.size() != act.params.size()) throw ValidationError("arity mismatch invoking " + act.name);
  std::vector<Substitution> out;
  for (const auto& ans : eval_ecq(guard, t, a)) {
    Substitution s;
    for (std::size_t i = 0; i < args.size(); ++i) {
      auto it = ans.find(args[i]);
      if (it == ans.end()) throw ValidationError("argument " + args[i] + " of " + act.name + " not bound by guard");
      s[act.params[i]] = it->second;
    }
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

std::string state_key(const ABox& a, const ServiceCallMap& m) { return a.str() + "|" + to_string(m); }

}  // namespace

TransitionSystem build_ts_skab(const Kab& k, const ServiceConfig& cfg, const Limits& limits) {
  TransitionSystem ts;
  ts.constants = k.constants;
  ts.tbox = k.tbox;
  if (!is_consistent(k.tbox, k.a0)) throw PreconditionViolated("initial ABox is inconsistent");
  std::unordered_map<std::string, std::size_t> ids;
  std::vector<std::set<std::string>> seen_consts;
  auto intern = [&](TsState s, std::size_t parent) {
    std::string key = state_key(s.abox, s.scmap);
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    if (ts.states.size() >= limits.max_states)
      throw StateLimitExceeded("more than " + std::to_string(limits.max_states) + " states");
    std::set<std::string> run = parent == SIZE_MAX ? std::set<std::string>{} : seen_consts[parent];
    auto d = adom(s.abox, false);
    run.insert(d.begin(), d.end());
    if (limits.max_run_adom && run.size() > limits.max_run_adom)
      throw RunBoundExceeded("run mentions more than " + std::to_string(limits.max_run_adom) + " constants");
    seen_consts.push_back(std::move(run));
    ts.states.push_back(std::move(s));
    ids.emplace(key, ts.states.size() - 1);
    return ts.states.size() - 1;
  };
  intern(TsState{k.a0, {}, false, {}}, SIZE_MAX);
  for (std::size_t cur = 0; cur < ts.states.size(); ++cur) {
    ABox a = ts.states[cur].abox;
    ServiceCallMap m = ts.states[cur].scmap;
    for (const auto& rule : k.process) {
      const Action& act = k.action(rule.action);
      for (const auto& sigma : legal_params(k.tbox, a, rule.cond, rule.args, act)) {
        for (auto& r : tell(k.tbox, Filter::S, a, m, act, sigma, cfg)) {
          std::size_t dst = intern(TsState{std::move(r.abox), std::move(r.scmap), false, {}}, cur);
          ts.edges.push_back({cur, dst, act.name, sigma, std::move(r.theta)});
        }
      }
    }
  }
  ts.index();
  return ts;
}

}  // namespace kab
