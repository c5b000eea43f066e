#include "kab/repair.hpp"

#include <algorithm>
#include <functional>

#include "kab/consistency.hpp"
#include "kab/errors.hpp"

namespace kab {

namespace {

// Bron-Kerbosch with pivoting on the complement of the conflict graph, so
// maximal cliques found are maximal independent sets of the conflicts.
void enumerate_mis(const ConflictGraph& g, const std::vector<std::size_t>& verts, std::size_t cap,
                   const std::function<void(const std::vector<std::size_t>&)>& emit) {
  std::size_t found = 0;
  auto compatible = [&](std::size_t u, std::size_t v) { return u != v && !g.adj[u][v]; };
  std::vector<std::size_t> r;
  std::function<void(std::vector<std::size_t>, std::vector<std::size_t>)> rec =
      [&](std::vector<std::size_t> p, std::vector<std::size_t> x) {
        if (p.empty() && x.empty()) {
          if (++found > cap) throw CombinatorialLimit("more than " + std::to_string(cap) + " b-repairs");
          emit(r);
          return;
        }
        std::size_t pivot = p.empty() ? x.front() : p.front();
        std::size_t best = 0;
        for (auto cand : p) {
          std::size_t n = 0;
          for (auto w : p) n += compatible(cand, w);
          if (n > best) best = n, pivot = cand;
        }
        std::vector<std::size_t> todo;
        for (auto v : p)
          if (!compatible(pivot, v)) todo.push_back(v);
        for (auto v : todo) {
          std::vector<std::size_t> np, nx;
          for (auto w : p)
            if (compatible(v, w)) np.push_back(w);
          for (auto w : x)
            if (compatible(v, w)) nx.push_back(w);
          r.push_back(v);
          rec(np, nx);
          r.pop_back();
          p.erase(std::find(p.begin(), p.end(), v));
          x.push_back(v);
        }
      };
  rec(verts, {});
}

}  // namespace

std::vector<ABox> b_repairs(const TBox& t, const ABox& a, std::size_t cap) {
  ConflictGraph g = conflict_graph(t, a);
  std::vector<Fact> markers;
  for (const auto& f : a)
    if (f.marker()) markers.push_back(f);
  std::vector<std::size_t> verts;
  for (std::size_t i = 0; i < g.facts.size(); ++i)
    if (!g.self_conflicting(i)) verts.push_back(i);
  std::vector<ABox> out;
  if (verts.empty()) {
    out.push_back(ABox(markers));
    return out;
  }
  enumerate_mis(g, verts, cap, [&](const std::vector<std::size_t>& set) {
    std::vector<Fact> facts = markers;
    for (auto i : set) facts.push_back(g.facts[i]);
    out.push_back(ABox(std::move(facts)));
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ABox c_repair(const TBox& t, const ABox& a, std::size_t cap) {
  auto reps = b_repairs(t, a, cap);
  ABox out = reps.front();
  for (std::size_t i = 1; i < reps.size(); ++i) out = intersect(out, reps[i]);
  return out;
}

ABox evolve(const TBox& t, const ABox& a, const ABox& fplus, const ABox& fminus) {
  if (!is_consistent(t, a)) throw PreconditionViolated("evolve: current ABox is inconsistent");
  if (!is_consistent(t, fplus)) throw PreconditionViolated("evolve: added facts are inconsistent");
  NegativeClosure nc = saturate_negatives(t);
  ABox out = fplus;
  for (const auto& f : minus(a, fminus)) {
    bool clash = false;
    for (const auto& g : fplus) {
      if (conflict(t, nc, f, g) || conflict(t, nc, g, f)) {
        clash = true;
        break;
      }
    }
    if (!clash) out.insert(f);
  }
  return out;
}

}  // namespace kab
