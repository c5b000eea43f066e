#include "kab/mu.hpp"

#include <cstdint>
#include <functional>
#include <optional>

#include "kab/errors.hpp"

namespace kab {

namespace mu {

namespace {
MuPtr node(Mu::Kind k, MuPtr a = nullptr, MuPtr b = nullptr, std::string v = {}) {
  auto n = std::make_shared<Mu>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  n->var = std::move(v);
  return n;
}
}  // namespace

MuPtr query(EcqPtr q) {
  auto n = std::make_shared<Mu>();
  n->kind = Mu::Kind::Query;
  n->q = std::move(q);
  return n;
}
MuPtr neg(MuPtr a) { return node(Mu::Kind::Not, std::move(a)); }
MuPtr conj(MuPtr a, MuPtr b) { return node(Mu::Kind::And, std::move(a), std::move(b)); }
MuPtr disj(MuPtr a, MuPtr b) { return node(Mu::Kind::Or, std::move(a), std::move(b)); }
MuPtr exists(std::string x, MuPtr a) { return node(Mu::Kind::Exists, std::move(a), nullptr, std::move(x)); }
MuPtr forall(std::string x, MuPtr a) { return node(Mu::Kind::Forall, std::move(a), nullptr, std::move(x)); }
MuPtr diamond(MuPtr a) { return node(Mu::Kind::Diamond, std::move(a)); }
MuPtr box(MuPtr a) { return node(Mu::Kind::Box, std::move(a)); }
MuPtr var(std::string z) { return node(Mu::Kind::Var, nullptr, nullptr, std::move(z)); }
MuPtr lfp(std::string z, MuPtr a) { return node(Mu::Kind::Lfp, std::move(a), nullptr, std::move(z)); }
MuPtr gfp(std::string z, MuPtr a) { return node(Mu::Kind::Gfp, std::move(a), nullptr, std::move(z)); }
MuPtr top() { return node(Mu::Kind::True); }
MuPtr bottom() { return node(Mu::Kind::False); }

}  // namespace mu

std::string to_string(const Mu& f) {
  using K = Mu::Kind;
  switch (f.kind) {
    case K::Query: return to_string(*f.q);
    case K::Not: return "!" + to_string(*f.a);
    case K::And: return "(" + to_string(*f.a) + " & " + to_string(*f.b) + ")";
    case K::Or: return "(" + to_string(*f.a) + " | " + to_string(*f.b) + ")";
    case K::Exists: return "(exists " + f.var + ". " + to_string(*f.a) + ")";
    case K::Forall: return "(forall " + f.var + ". " + to_string(*f.a) + ")";
    case K::Diamond: return "<>" + to_string(*f.a);
    case K::Box: return "[]" + to_string(*f.a);
    case K::Var: return f.var;
    case K::Lfp: return "(mu " + f.var + ". " + to_string(*f.a) + ")";
    case K::Gfp: return "(nu " + f.var + ". " + to_string(*f.a) + ")";
    case K::True: return "true";
    case K::False: return "false";
  }
  return "";
}

bool equal(const Mu& a, const Mu& b) {
  if (a.kind != b.kind || a.var != b.var) return false;
  if (a.kind == Mu::Kind::Query) return equal(*a.q, *b.q);
  if (a.a && !equal(*a.a, *b.a)) return false;
  if (a.b && !equal(*a.b, *b.b)) return false;
  return true;
}

bool is_nnf(const Mu& f) {
  if (f.kind == Mu::Kind::Not) return f.a->kind == Mu::Kind::Query;
  if (f.a && !is_nnf(*f.a)) return false;
  if (f.b && !is_nnf(*f.b)) return false;
  return true;
}

namespace {

MuPtr push(const MuPtr& f, bool negate, const std::set<std::string>& flipped) {
  using K = Mu::Kind;
  switch (f->kind) {
    case K::Query: return negate ? mu::neg(f) : f;
    case K::True: return negate ? mu::bottom() : f;
    case K::False: return negate ? mu::top() : f;
    case K::Not: return push(f->a, !negate, flipped);
    case K::And: {
      auto a = push(f->a, negate, flipped), b = push(f->b, negate, flipped);
      return negate ? mu::disj(a, b) : mu::conj(a, b);
    }
    case K::Or: {
      auto a = push(f->a, negate, flipped), b = push(f->b, negate, flipped);
      return negate ? mu::conj(a, b) : mu::disj(a, b);
    }
    case K::Exists: {
      auto a = push(f->a, negate, flipped);
      return negate ? mu::forall(f->var, a) : mu::exists(f->var, a);
    }
    case K::Forall: {
      auto a = push(f->a, negate, flipped);
      return negate ? mu::exists(f->var, a) : mu::forall(f->var, a);
    }
    case K::Diamond: {
      auto a = push(f->a, negate, flipped);
      return negate ? mu::box(a) : mu::diamond(a);
    }
    case K::Box: {
      auto a = push(f->a, negate, flipped);
      return negate ? mu::diamond(a) : mu::box(a);
    }
    case K::Var: return (negate != (flipped.count(f->var) > 0)) ? mu::neg(f) : f;
    case K::Lfp:
    case K::Gfp: {
      // not mu Z. phi = nu Z. not phi[Z/not Z]
      std::set<std::string> fl = flipped;
      if (negate)
        fl.insert(f->var);
      else
        fl.erase(f->var);
      auto a = push(f->a, negate, fl);
      bool least = (f->kind == K::Lfp) != negate;
      return least ? mu::lfp(f->var, a) : mu::gfp(f->var, a);
    }
  }
  return f;
}

void collect_free(const Mu& f, std::set<std::string>& ind, std::set<std::string>& pred,
                  std::set<std::string> bound_ind, std::set<std::string> bound_pred) {
  using K = Mu::Kind;
  switch (f.kind) {
    case K::Query:
      for (const auto& v : free_vars(*f.q))
        if (!bound_ind.count(v)) ind.insert(v);
      return;
    case K::Var:
      if (!bound_pred.count(f.var)) pred.insert(f.var);
      return;
    case K::Exists:
    case K::Forall:
      bound_ind.insert(f.var);
      break;
    case K::Lfp:
    case K::Gfp:
      bound_pred.insert(f.var);
      break;
    default:
      break;
  }
  if (f.a) collect_free(*f.a, ind, pred, bound_ind, bound_pred);
  if (f.b) collect_free(*f.b, ind, pred, bound_ind, bound_pred);
}

}  // namespace

MuPtr nnf(const MuPtr& f) { return push(f, false, {}); }

std::set<std::string> free_individual_vars(const Mu& f) {
  std::set<std::string> ind, pred;
  collect_free(f, ind, pred, {}, {});
  return ind;
}

std::set<std::string> free_predicate_vars(const Mu& f) {
  std::set<std::string> ind, pred;
  collect_free(f, ind, pred, {}, {});
  return pred;
}

bool mentions_markers(const Mu& f) {
  if (f.kind == Mu::Kind::Query) return mentions_markers(*f.q);
  return (f.a && mentions_markers(*f.a)) || (f.b && mentions_markers(*f.b));
}

void validate_monotone(const Mu& f) {
  std::map<std::string, int> parity;  // negations seen since the binder
  std::function<void(const Mu&, int)> rec = [&](const Mu& g, int negs) {
    using K = Mu::Kind;
    switch (g.kind) {
      case K::Var: {
        auto it = parity.find(g.var);
        if (it != parity.end() && (negs - it->second) % 2 != 0)
          throw NonMonotoneFixpoint("predicate variable " + g.var + " occurs negatively");
        return;
      }
      case K::Not:
        rec(*g.a, negs + 1);
        return;
      case K::Lfp:
      case K::Gfp: {
        auto saved = parity.find(g.var) != parity.end() ? std::optional<int>(parity[g.var]) : std::nullopt;
        parity[g.var] = negs;
        rec(*g.a, negs);
        if (saved)
          parity[g.var] = *saved;
        else
          parity.erase(g.var);
        return;
      }
      default:
        if (g.a) rec(*g.a, negs);
        if (g.b) rec(*g.b, negs);
    }
  };
  rec(f, 0);
}

namespace {

using Bits = std::vector<char>;

class Checker {
 public:
  explicit Checker(const TransitionSystem& ts) : ts_(ts), n_(ts.states.size()) {
    for (const auto& s : ts.states) {
      auto d = adom(s.abox, false);
      adoms_.push_back(d);
      all_.insert(d.begin(), d.end());
    }
    if (ts.succ.size() != n_) throw PreconditionViolated("transition system is not indexed");
  }

  Bits eval(const Mu& f, const Valuation& v, std::map<std::string, Bits>& V) {
    const Info& info = info_of(f);
    std::string key;
    if (info.pred_closed) {
      key = std::to_string(reinterpret_cast<std::uintptr_t>(&f)) + "|";
      for (const auto& x : info.ind) {
        auto it = v.find(x);
        key += x + "=" + (it == v.end() ? "?" : it->second) + ";";
      }
      auto it = memo_.find(key);
      if (it != memo_.end()) return it->second;
    }
    Bits out = compute(f, v, V);
    if (info.pred_closed) memo_.emplace(key, out);
    return out;
  }

 private:
  struct Info {
    std::set<std::string> ind;
    bool pred_closed = true;
  };

  const Info& info_of(const Mu& f) {
    auto it = info_.find(&f);
    if (it != info_.end()) return it->second;
    Info i;
    i.ind = free_individual_vars(f);
    i.pred_closed = free_predicate_vars(f).empty();
    return info_.emplace(&f, std::move(i)).first->second;
  }

  Bits compute(const Mu& f, const Valuation& v, std::map<std::string, Bits>& V) {
    using K = Mu::Kind;
    switch (f.kind) {
      case K::True: return Bits(n_, 1);
      case K::False: return Bits(n_, 0);
      case K::Query: {
        Substitution part;
        for (const auto& x : free_vars(*f.q)) {
          auto it = v.find(x);
          if (it == v.end()) throw ValidationError("unbound variable " + x + " in " + to_string(*f.q));
          part[x] = it->second;
        }
        Bits out(n_, 0);
        for (std::size_t s = 0; s < n_; ++s) out[s] = holds(f.q, ts_.tbox, ts_.states[s].abox, part);
        return out;
      }
      case K::Not: {
        Bits a = eval(*f.a, v, V);
        for (auto& x : a) x = !x;
        return a;
      }
      case K::And:
      case K::Or: {
        Bits a = eval(*f.a, v, V);
        Bits b = eval(*f.b, v, V);
        for (std::size_t s = 0; s < n_; ++s) a[s] = f.kind == K::And ? (a[s] && b[s]) : (a[s] || b[s]);
        return a;
      }
      case K::Exists:
      case K::Forall: {
        bool ex = f.kind == K::Exists;
        Bits out(n_, ex ? 0 : 1);
        for (const auto& d : all_) {
          Valuation v2 = v;
          v2[f.var] = d;
          Bits a = eval(*f.a, v2, V);
          for (std::size_t s = 0; s < n_; ++s) {
            if (!adoms_[s].count(d)) continue;
            if (ex && a[s]) out[s] = 1;
            if (!ex && !a[s]) out[s] = 0;
          }
        }
        return out;
      }
      case K::Diamond: {
        Bits a = eval(*f.a, v, V);
        Bits out(n_, 0);
        for (std::size_t t = 0; t < n_; ++t)
          if (a[t])
            for (auto s : ts_.pred[t]) out[s] = 1;
        return out;
      }
      case K::Box: {
        Bits a = eval(*f.a, v, V);
        Bits out(n_, 1);
        for (std::size_t t = 0; t < n_; ++t)
          if (!a[t])
            for (auto s : ts_.pred[t]) out[s] = 0;
        return out;
      }
      case K::Var: {
        auto it = V.find(f.var);
        if (it == V.end()) throw ValidationError("unbound predicate variable " + f.var);
        return it->second;
      }
      case K::Lfp:
      case K::Gfp: {
        auto saved = V.find(f.var) != V.end() ? std::optional<Bits>(V[f.var]) : std::nullopt;
        Bits cur(n_, f.kind == K::Lfp ? 0 : 1);
        for (;;) {
          V[f.var] = cur;
          Bits next = eval(*f.a, v, V);
          if (next == cur) break;
          cur = std::move(next);
        }
        if (saved)
          V[f.var] = *saved;
        else
          V.erase(f.var);
        return cur;
      }
    }
    return Bits(n_, 0);
  }

  const TransitionSystem& ts_;
  std::size_t n_;
  std::vector<std::set<std::string>> adoms_;
  std::set<std::string> all_;
  std::map<const Mu*, Info> info_;
  std::map<std::string, Bits> memo_;
};

}  // namespace

std::set<std::size_t> extension(const TransitionSystem& ts, const MuPtr& f, const Valuation& v,
                                const PredValuation& V) {
  validate_monotone(*f);
  Checker c(ts);
  std::map<std::string, Bits> pv;
  for (const auto& [z, set] : V) {
    Bits b(ts.states.size(), 0);
    for (auto s : set) b.at(s) = 1;
    pv[z] = b;
  }
  Bits r = c.eval(*f, v, pv);
  std::set<std::size_t> out;
  for (std::size_t s = 0; s < r.size(); ++s)
    if (r[s]) out.insert(s);
  return out;
}

bool model_check(const TransitionSystem& ts, const MuPtr& f) {
  if (!free_individual_vars(*f).empty()) throw ValidationError("formula is not closed: " + to_string(*f));
  if (!free_predicate_vars(*f).empty()) throw ValidationError("free predicate variable in " + to_string(*f));
  return extension(ts, f).count(ts.initial) > 0;
}

}  // namespace kab
