#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "kab/kb.hpp"
#include "kab/query.hpp"

namespace kab {

// Atom for basic concept b at term t; exists P expands to P(t, w) with w a
// variable named `witness` (existential when it starts with '_').
Atom concept_atom(const BasicConcept& b, const Term& t, const std::string& witness);
Atom role_atom(const BasicRole& r, const Term& t1, const Term& t2);

// Constant at which fact f instantiates b, if any.
std::optional<std::string> realizes(const Fact& f, const BasicConcept& b);
std::optional<std::pair<std::string, std::string>> realizes(const Fact& f, const BasicRole& r);

// Boolean ECQ true exactly on T-inconsistent ABoxes (evaluated as a database).
EcqPtr build_qunsat(const TBox& t);

bool is_consistent(const TBox& t, const ABox& a);

// Pairwise conflicts among the non-marker facts of an ABox; self loops mark
// facts that are inconsistent on their own.
struct ConflictGraph {
  std::vector<Fact> facts;
  std::vector<std::vector<bool>> adj;

  bool self_conflicting(std::size_t i) const { return adj[i][i]; }
};

ConflictGraph conflict_graph(const TBox& t, const ABox& a);
bool conflict(const TBox& t, const NegativeClosure& nc, const Fact& f, const Fact& g);

ABox inc_set(const TBox& t, const ABox& a);

}  // namespace kab
