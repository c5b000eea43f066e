#include "kab/bisim.hpp"

#include <deque>
#include <functional>
#include <unordered_map>

namespace kab {

namespace {

using Macro = std::vector<std::vector<std::size_t>>;

const Fact kTemp = concept_fact(std::string(kStatePred), "temp");
const Fact kRep = concept_fact(std::string(kStatePred), "rep");

// States reachable from `from` through states carrying `marker`, ending in the
// first state without it. Marker cycles contribute nothing.
std::vector<std::size_t> corridor_exits(const TransitionSystem& ts, const std::vector<std::size_t>& from,
                                        const Fact& marker) {
  std::set<std::size_t> exits;
  std::vector<char> seen(ts.size(), 0);
  std::deque<std::size_t> todo;
  for (auto s : from) {
    if (!ts.states[s].abox.contains(marker)) {
      exits.insert(s);
    } else if (!seen[s]) {
      seen[s] = 1;
      todo.push_back(s);
    }
  }
  while (!todo.empty()) {
    auto t = todo.front();
    todo.pop_front();
    for (auto u : ts.succ[t]) {
      if (!ts.states[u].abox.contains(marker)) {
        exits.insert(u);
      } else if (!seen[u]) {
        seen[u] = 1;
        todo.push_back(u);
      }
    }
  }
  return {exits.begin(), exits.end()};
}

bool refine(const TransitionSystem& ts1, const TransitionSystem& ts2, const Macro& macro,
            const std::function<bool(std::size_t, std::size_t)>& match) {
  if (!match(ts1.initial, ts2.initial)) return false;
  auto key = [&](std::size_t a, std::size_t b) { return static_cast<std::uint64_t>(a) * ts2.size() + b; };
  std::unordered_map<std::uint64_t, std::size_t> index;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::unordered_map<std::uint64_t, bool> match_cache;
  auto matches = [&](std::size_t a, std::size_t b) {
    auto k = key(a, b);
    auto it = match_cache.find(k);
    if (it != match_cache.end()) return it->second;
    return match_cache[k] = match(a, b);
  };
  auto add = [&](std::size_t a, std::size_t b) {
    auto [it, fresh] = index.emplace(key(a, b), pairs.size());
    if (fresh) pairs.push_back({a, b});
    return fresh;
  };
  add(ts1.initial, ts2.initial);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [a, b] = pairs[i];
    for (auto a2 : ts1.succ[a])
      for (auto b2 : macro[b])
        if (matches(a2, b2)) add(a2, b2);
  }
  std::vector<char> alive(pairs.size(), 1);
  auto in = [&](std::size_t a, std::size_t b) {
    auto it = index.find(key(a, b));
    return it != index.end() && alive[it->second];
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (!alive[i]) continue;
      auto [a, b] = pairs[i];
      bool ok = true;
      for (auto a2 : ts1.succ[a]) {
        bool found = false;
        for (auto b2 : macro[b])
          if (in(a2, b2)) {
            found = true;
            break;
          }
        if (!found) {
          ok = false;
          break;
        }
      }
      for (std::size_t j = 0; ok && j < macro[b].size(); ++j) {
        bool found = false;
        for (auto a2 : ts1.succ[a])
          if (in(a2, macro[b][j])) {
            found = true;
            break;
          }
        ok = found;
      }
      if (!ok) {
        alive[i] = 0;
        changed = true;
      }
    }
  }
  return alive[0];
}

}  // namespace

bool equal_modulo_markers(const ABox& a1, const ABox& a2) { return strip_markers(a1) == strip_markers(a2); }

bool e_bisimilar(const TransitionSystem& ts1, const TransitionSystem& ts2) {
  return refine(ts1, ts2, ts2.succ,
                [&](std::size_t a, std::size_t b) { return ts1.states[a].abox == ts2.states[b].abox; });
}

bool j_bisimilar(const TransitionSystem& ts1, const TransitionSystem& ts2) {
  Macro macro(ts2.size());
  for (std::size_t s = 0; s < ts2.size(); ++s) macro[s] = corridor_exits(ts2, ts2.succ[s], kTemp);
  return refine(ts1, ts2, macro, [&](std::size_t a, std::size_t b) {
    return equal_modulo_markers(ts1.states[a].abox, ts2.states[b].abox);
  });
}

bool l_bisimilar(const TransitionSystem& ts1, const TransitionSystem& ts2) {
  Macro macro(ts2.size());
  for (std::size_t s = 0; s < ts2.size(); ++s) {
    std::set<std::size_t> out;
    for (auto s1 : ts2.succ[s])
      for (auto x : corridor_exits(ts2, ts2.succ[s1], kRep)) out.insert(x);
    macro[s].assign(out.begin(), out.end());
  }
  return refine(ts1, ts2, macro,
                [&](std::size_t a, std::size_t b) { return ts1.states[a].abox == ts2.states[b].abox; });
}

bool s_bisimilar(const TransitionSystem& ts1, const TransitionSystem& ts2) {
  Macro macro(ts2.size());
  for (std::size_t s = 0; s < ts2.size(); ++s) {
    std::set<std::size_t> out;
    for (auto s1 : ts2.succ[s])
      for (auto s2 : ts2.succ[s1]) out.insert(s2);
    macro[s].assign(out.begin(), out.end());
  }
  return refine(ts1, ts2, macro,
                [&](std::size_t a, std::size_t b) { return ts1.states[a].abox == ts2.states[b].abox; });
}

}  // namespace kab
