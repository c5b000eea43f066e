#include "kab/consistency.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_map>

namespace kab {

Atom concept_atom(const BasicConcept& b, const Term& t, const std::string& witness) {
  if (!b.exists) return make_atom(b.name, {t});
  if (b.inverse) return make_atom(b.name, {Term::var(witness), t});
  return make_atom(b.name, {t, Term::var(witness)});
}

Atom role_atom(const BasicRole& r, const Term& t1, const Term& t2) {
  return r.inverse ? make_atom(r.name, {t2, t1}) : make_atom(r.name, {t1, t2});
}

std::optional<std::string> realizes(const Fact& f, const BasicConcept& b) {
  if (f.pred != b.name) return std::nullopt;
  if (!b.exists) {
    if (f.role) return std::nullopt;
    return f.s;
  }
  if (!f.role) return std::nullopt;
  return b.inverse ? f.o : f.s;
}

std::optional<std::pair<std::string, std::string>> realizes(const Fact& f, const BasicRole& r) {
  if (f.pred != r.name || !f.role) return std::nullopt;
  if (r.inverse) return std::make_pair(f.o, f.s);
  return std::make_pair(f.s, f.o);
}

namespace {

std::mutex g_mu;
std::unordered_map<std::string, EcqPtr> g_qunsat;

}  // namespace

EcqPtr build_qunsat(const TBox& t) {
  {
    std::lock_guard<std::mutex> lock(g_mu);
    auto it = g_qunsat.find(t.key());
    if (it != g_qunsat.end()) return it->second;
  }
  NegativeClosure nc = saturate_negatives(t);
  Term x = Term::var("X"), y = Term::var("Y"), z = Term::var("Z");
  std::vector<EcqPtr> parts;
  for (const auto& r : t.functs()) {
    EcqPtr body = ecq::conj(ecq::query(make_ucq({CQ{{role_atom(r, x, y), role_atom(r, x, z)}}}, true)),
                            ecq::neg(ecq::atom(eq_atom(y, z), true)));
    parts.push_back(ecq::exists("X", ecq::exists("Y", ecq::exists("Z", body))));
  }
  for (const auto& [b1, b2] : nc.concepts) {
    if (b2 < b1) continue;
    CQ c{{concept_atom(b1, x, "_w1"), concept_atom(b2, x, "_w2")}};
    parts.push_back(ecq::exists("X", ecq::query(make_ucq({c}, true))));
  }
  std::set<std::pair<BasicRole, BasicRole>> seen;
  for (const auto& [r1, r2] : nc.roles) {
    // (R1,R2), (R2,R1), (R1-,R2-), (R2-,R1-) describe the same clash.
    auto p1 = std::minmax(r1, r2);
    auto p2 = std::minmax(r1.inv(), r2.inv());
    auto key = std::min(std::make_pair(p1.first, p1.second), std::make_pair(p2.first, p2.second));
    if (!seen.insert(key).second) continue;
    CQ c{{role_atom(r1, x, y), role_atom(r2, x, y)}};
    parts.push_back(ecq::exists("X", ecq::exists("Y", ecq::query(make_ucq({c}, true)))));
  }
  EcqPtr q = ecq::disj_all(parts);
  std::lock_guard<std::mutex> lock(g_mu);
  g_qunsat.emplace(t.key(), q);
  return q;
}

bool is_consistent(const TBox& t, const ABox& a) {
  if (!t.has_negative_part()) return true;
  return !holds(build_qunsat(t), t, strip_markers(a));
}

bool conflict(const TBox& t, const NegativeClosure& nc, const Fact& f, const Fact& g) {
  if (f.marker() || g.marker()) return false;
  for (const auto& [b1, b2] : nc.concepts) {
    auto c1 = realizes(f, b1);
    if (!c1) continue;
    auto c2 = realizes(g, b2);
    if (c2 && *c1 == *c2) return true;
  }
  for (const auto& [r1, r2] : nc.roles) {
    auto p1 = realizes(f, r1);
    if (!p1) continue;
    auto p2 = realizes(g, r2);
    if (p2 && *p1 == *p2) return true;
  }
  for (const auto& r : t.functs()) {
    auto p1 = realizes(f, r);
    auto p2 = realizes(g, r);
    if (p1 && p2 && p1->first == p2->first && p1->second != p2->second) return true;
  }
  return false;
}

ConflictGraph conflict_graph(const TBox& t, const ABox& a) {
  NegativeClosure nc = saturate_negatives(t);
  ConflictGraph g;
  for (const auto& f : a)
    if (!f.marker()) g.facts.push_back(f);
  std::size_t n = g.facts.size();
  g.adj.assign(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      if (conflict(t, nc, g.facts[i], g.facts[j]) || conflict(t, nc, g.facts[j], g.facts[i]))
        g.adj[i][j] = g.adj[j][i] = true;
  return g;
}

ABox inc_set(const TBox& t, const ABox& a) {
  ConflictGraph g = conflict_graph(t, a);
  std::vector<Fact> out;
  for (std::size_t i = 0; i < g.facts.size(); ++i)
    if (std::find(g.adj[i].begin(), g.adj[i].end(), true) != g.adj[i].end()) out.push_back(g.facts[i]);
  return ABox(std::move(out));
}

}  // namespace kab
