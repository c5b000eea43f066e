#pragma once

#include <cstddef>
#include <vector>

#include "kab/kb.hpp"

namespace kab {

// All maximal T-consistent subsets of A, sorted. Marker facts are kept in every repair.
std::vector<ABox> b_repairs(const TBox& t, const ABox& a, std::size_t cap = 4096);

// Intersection of all b-repairs.
ABox c_repair(const TBox& t, const ABox& a, std::size_t cap = 4096);

// Bold evolution: new facts win over old ones.
ABox evolve(const TBox& t, const ABox& a, const ABox& fplus, const ABox& fminus);

}  // namespace kab
