#include "kab/golog.hpp"

#include <functional>
#include <unordered_map>
#include <unordered_set>

#include "kab/consistency.hpp"
#include "kab/errors.hpp"

namespace kab {

namespace {

std::string structural_key(const Program& p) {
  using K = Program::Kind;
  switch (p.kind) {
    case K::Empty: return "e";
    case K::Invoke: {
      std::string s = "pick " + to_string(*p.cond) + " . " + p.action + "(";
      for (std::size_t i = 0; i < p.args.size(); ++i) s += (i ? "," : "") + p.args[i];
      return s + ")";
    }
    case K::Choice: return "(" + p.a->key + "|" + p.b->key + ")";
    case K::Seq: return "(" + p.a->key + ";" + p.b->key + ")";
    case K::If: return "if " + to_string(*p.cond) + "(" + p.a->key + "," + p.b->key + ")";
    case K::While: return "while " + to_string(*p.cond) + "(" + p.a->key + ")";
  }
  return "";
}

ProgramPtr make(Program p) {
  p.key = p.pid.empty() ? structural_key(p) : p.pid;
  return std::make_shared<const Program>(std::move(p));
}

}  // namespace

namespace prog {

ProgramPtr empty(std::string pid) { return make({Program::Kind::Empty, std::move(pid), nullptr, {}, {}, nullptr, nullptr, {}}); }

ProgramPtr invoke(EcqPtr guard, std::string action, std::vector<std::string> args, std::string pid) {
  return make({Program::Kind::Invoke, std::move(pid), std::move(guard), std::move(action), std::move(args), nullptr,
               nullptr, {}});
}

ProgramPtr choice(ProgramPtr a, ProgramPtr b, std::string pid) {
  return make({Program::Kind::Choice, std::move(pid), nullptr, {}, {}, std::move(a), std::move(b), {}});
}

ProgramPtr seq(ProgramPtr a, ProgramPtr b, std::string pid) {
  return make({Program::Kind::Seq, std::move(pid), nullptr, {}, {}, std::move(a), std::move(b), {}});
}

ProgramPtr ite(EcqPtr cond, ProgramPtr a, ProgramPtr b, std::string pid) {
  return make({Program::Kind::If, std::move(pid), std::move(cond), {}, {}, std::move(a), std::move(b), {}});
}

ProgramPtr loop(EcqPtr cond, ProgramPtr body, std::string pid) {
  return make({Program::Kind::While, std::move(pid), std::move(cond), {}, {}, std::move(body), nullptr, {}});
}

ProgramPtr choice_all(const std::vector<ProgramPtr>& xs) {
  if (xs.empty()) return empty();
  ProgramPtr out = xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) out = choice(out, xs[i]);
  return out;
}

ProgramPtr seq_all(const std::vector<ProgramPtr>& xs) {
  if (xs.empty()) return empty();
  ProgramPtr out = xs.back();
  for (std::size_t i = xs.size() - 1; i-- > 0;) out = seq(xs[i], out);
  return out;
}

}  // namespace prog

std::string epsilon_pid(const std::string& invoke_pid) { return invoke_pid.empty() ? "" : invoke_pid + ".e"; }

ProgramPtr assign_ids(const ProgramPtr& p, const std::string& root) {
  Program n = *p;
  n.pid = root;
  if (n.a) n.a = assign_ids(n.a, root + ".1");
  if (n.b) n.b = assign_ids(n.b, root + ".2");
  return make(std::move(n));
}

std::string to_string(const Program& p) {
  using K = Program::Kind;
  switch (p.kind) {
    case K::Empty: return "skip";
    case K::Invoke: {
      std::string s = "pick " + to_string(*p.cond) + " . " + p.action + "(";
      for (std::size_t i = 0; i < p.args.size(); ++i) s += (i ? "," : "") + p.args[i];
      return s + ")";
    }
    case K::Choice: return "(" + to_string(*p.a) + " | " + to_string(*p.b) + ")";
    case K::Seq: return "(" + to_string(*p.a) + " ; " + to_string(*p.b) + ")";
    case K::If:
      return "(if " + to_string(*p.cond) + " then " + to_string(*p.a) + " else " + to_string(*p.b) + ")";
    case K::While: return "(while " + to_string(*p.cond) + " do " + to_string(*p.a) + ")";
  }
  return "";
}

bool equal(const Program& a, const Program& b) {
  if (a.kind != b.kind || a.action != b.action || a.args != b.args) return false;
  if ((a.cond == nullptr) != (b.cond == nullptr)) return false;
  if (a.cond && !equal(*a.cond, *b.cond)) return false;
  if (a.a && !equal(*a.a, *b.a)) return false;
  if (a.b && !equal(*a.b, *b.b)) return false;
  return true;
}

const Action& Gkab::action(const std::string& name) const {
  for (const auto& a : actions)
    if (a.name == name) return a;
  throw ValidationError("unknown action " + name);
}

bool is_final(const TBox& t, const GkabState& s) {
  const Program& p = *s.program;
  using K = Program::Kind;
  switch (p.kind) {
    case K::Empty:
      return true;
    case K::Invoke:
      return false;
    case K::Choice:
      return is_final(t, {s.abox, s.scmap, p.a}) || is_final(t, {s.abox, s.scmap, p.b});
    case K::Seq:
      return is_final(t, {s.abox, s.scmap, p.a}) && is_final(t, {s.abox, s.scmap, p.b});
    case K::If:
      return holds(p.cond, t, s.abox) ? is_final(t, {s.abox, s.scmap, p.a}) : is_final(t, {s.abox, s.scmap, p.b});
    case K::While:
      return !holds(p.cond, t, s.abox) || is_final(t, {s.abox, s.scmap, p.a});
  }
  return false;
}

std::vector<GkabStep> program_step(const Gkab& g, Filter f, const ServiceConfig& cfg, const GkabState& s) {
  const Program& p = *s.program;
  using K = Program::Kind;
  std::vector<GkabStep> out;
  auto descend = [&](const ProgramPtr& sub, const std::function<ProgramPtr(ProgramPtr)>& wrap) {
    for (auto& st : program_step(g, f, cfg, {s.abox, s.scmap, sub})) {
      st.next.program = wrap(st.next.program);
      out.push_back(std::move(st));
    }
  };
  auto same = [](ProgramPtr x) { return x; };
  switch (p.kind) {
    case K::Empty:
      break;
    case K::Invoke: {
      const Action& act = g.action(p.action);
      for (const auto& sigma : legal_params(g.tbox, s.abox, p.cond, p.args, act))
        for (auto& r : tell(g.tbox, f, s.abox, s.scmap, act, sigma, cfg))
          out.push_back({act.name, sigma, std::move(r.theta),
                         {std::move(r.abox), std::move(r.scmap), prog::empty(epsilon_pid(p.pid))}});
      break;
    }
    case K::Choice:
      descend(p.a, same);
      descend(p.b, same);
      break;
    case K::Seq:
      descend(p.a, [&](ProgramPtr x) { return prog::seq(std::move(x), p.b); });
      if (is_final(g.tbox, {s.abox, s.scmap, p.a})) descend(p.b, same);
      break;
    case K::If:
      descend(holds(p.cond, g.tbox, s.abox) ? p.a : p.b, same);
      break;
    case K::While:
      if (holds(p.cond, g.tbox, s.abox)) {
        ProgramPtr self = s.program;
        descend(p.a, [&](ProgramPtr x) { return prog::seq(std::move(x), self); });
      }
      break;
  }
  return out;
}

TransitionSystem build_ts_gkab(const Gkab& g, Filter f, const ServiceConfig& cfg, const Limits& limits) {
  TransitionSystem ts;
  ts.constants = g.constants;
  ts.tbox = g.tbox;
  if (!is_consistent(g.tbox, g.a0)) throw PreconditionViolated("initial ABox is inconsistent");
  std::unordered_map<std::string, std::size_t> ids;
  std::vector<ProgramPtr> programs;
  std::vector<std::set<std::string>> run_consts;
  auto intern = [&](GkabState st, std::size_t parent) {
    std::string key = st.abox.str() + "|" + to_string(st.scmap) + "|" + st.program->key;
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    if (ts.states.size() >= limits.max_states)
      throw StateLimitExceeded("more than " + std::to_string(limits.max_states) + " states");
    std::set<std::string> run = parent == SIZE_MAX ? std::set<std::string>{} : run_consts[parent];
    auto d = adom(st.abox, false);
    run.insert(d.begin(), d.end());
    if (limits.max_run_adom && run.size() > limits.max_run_adom)
      throw RunBoundExceeded("run mentions more than " + std::to_string(limits.max_run_adom) + " constants");
    run_consts.push_back(std::move(run));
    ts.states.push_back({std::move(st.abox), std::move(st.scmap), true, st.program->key});
    programs.push_back(std::move(st.program));
    ids.emplace(key, ts.states.size() - 1);
    return ts.states.size() - 1;
  };
  intern({g.a0, {}, g.program}, SIZE_MAX);
  std::unordered_set<std::string> edge_keys;
  for (std::size_t cur = 0; cur < ts.states.size(); ++cur) {
    GkabState st{ts.states[cur].abox, ts.states[cur].scmap, programs[cur]};
    if (f == Filter::E && !is_consistent(g.tbox, st.abox))
      throw PreconditionViolated("bold evolution reached an inconsistent ABox");
    for (auto& step : program_step(g, f, cfg, st)) {
      std::size_t dst = intern(std::move(step.next), cur);
      std::string ek = std::to_string(dst) + "|" + step.action + "|" + to_string(step.sigma) + "|" +
                       to_string(step.theta) + "|" + std::to_string(cur);
      if (!edge_keys.insert(ek).second) continue;
      ts.edges.push_back({cur, dst, step.action, std::move(step.sigma), std::move(step.theta)});
    }
  }
  ts.index();
  return ts;
}

}  // namespace kab
